from pathlib import Path

import numpy as np
import pytest

from fermient import FockVector, ModeOrder

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def phi_abc() -> FockVector:
    return FockVector(ModeOrder("abc"), {"100": 0.5, "010": 0.5, "101": 0.5, "011": 0.5})


@pytest.fixture
def psi_ab() -> FockVector:
    return FockVector(ModeOrder("ab"), {"00": 0.5, "01": 0.5, "10": 0.5, "11": 0.5})


def random_state(rng: np.random.Generator, n: int, labels: str = "abcdefgh") -> FockVector:
    vec = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return FockVector.from_array(ModeOrder(labels[:n]), vec / np.linalg.norm(vec))


def random_density(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> np.ndarray:
    a = rng.standard_normal((dim, rank or dim)) + 1j * rng.standard_normal((dim, rank or dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
