"""``fermient`` command line.

Exit codes: 0 success, 1 usage or parse error, 2 superselection violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import channels, density, entanglement, fock
from .formats import FormatError, dump_density, dump_state, parse_density, parse_state
from .roof import RoofConfig

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which we reserve
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_float(x: float) -> str:
    return format(float(x) + 0.0, ".12g")


def _split_labels(text: str, known: Sequence[str]) -> list[str]:
    """``"a,c"`` / ``"a c"`` / ``"ac"`` (when every label is a single character)."""
    if "," in text or " " in text.strip():
        labels = [tok for tok in text.replace(",", " ").split() if tok]
    elif text in known:
        labels = [text]
    elif all(len(lab) == 1 for lab in known):
        labels = list(text)
    else:
        labels = [text]
    for lab in labels:
        if lab not in known:
            raise UsageError(f"unknown mode {lab!r}; modes are {' '.join(known)}")
    return labels


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_state(path: str) -> fock.FockVector:
    try:
        return parse_state(_read(path))
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_rho(path: str) -> density.DensityMatrix:
    try:
        return parse_density(_read(path))
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _sectors(bits_iter) -> str:
    names = sorted({"even" if sum(b) % 2 == 0 else "odd" for b in bits_iter})
    return ",".join(names) or "none"


def cmd_check(args, out) -> int:
    if args.state:
        state = _load_state(args.state)
        if state.is_zero():
            raise UsageError(f"{args.state}: state has no nonzero amplitudes")
        verdict = fock.ssr_check_pure(state)
        print(f"modes: {state.order}", file=out)
        print(f"parity: {fock.parity_of(state).value}", file=out)
        print(f"sectors: {_sectors(state.terms)}", file=out)
        print(f"norm: {_csv_float(state.norm())}", file=out)
    else:
        rho = _load_rho(args.rho)
        verdict = density.ssr_check_mixed(rho)
        n = rho.n_modes
        diag = np.abs(np.diag(rho.matrix))
        populated = [fock.index_to_bits(i, n) for i in np.flatnonzero(diag > density.SSR_TOL)]
        print(f"modes: {rho.order if rho.order else ''}", file=out)
        print(f"sectors: {_sectors(populated)}", file=out)
        print(f"trace: {_csv_float(np.trace(rho.matrix).real)}", file=out)
    print(str(verdict), file=out)
    return EXIT_OK if verdict else EXIT_VIOLATION


def cmd_reorder(args, out) -> int:
    state = _load_state(args.state)
    order = _split_labels(args.order, state.order.labels)
    try:
        out.write(dump_state(fock.reorder_modes(state, order)))
    except fock.FockError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


def cmd_reduce(args, out) -> int:
    state = _load_state(args.state)
    try:
        if args.order:
            state = fock.reorder_modes(state, _split_labels(args.order, state.order.labels))
        traced = _split_labels(args.trace_out, state.order.labels)
        rho = density.outer(state)
    except (fock.FockError, density.DensityError) as exc:
        raise UsageError(str(exc)) from None
    out.write(dump_density(density.partial_trace(rho, traced)))
    return EXIT_OK


MEASURES = ("negativity", "log-negativity", "concurrence", "eof-wootters", "eof-roof")


def cmd_measure(args, out) -> int:
    rho = _load_rho(args.rho)
    if rho.order is None:
        raise UsageError("measures need at least one mode")
    name = args.measure
    try:
        if name in ("negativity", "log-negativity"):
            sub = (
                _split_labels(args.subsystem, rho.order.labels)
                if args.subsystem
                else [rho.order.labels[-1]]
            )
            fn = entanglement.negativity if name == "negativity" else entanglement.log_negativity
            report = entanglement.EntanglementReport(name, fn(rho, sub))
        elif name == "concurrence":
            report = entanglement.EntanglementReport(name, entanglement.concurrence_two_qubit(rho))
        elif name == "eof-wootters":
            report = entanglement.EntanglementReport(name, entanglement.eof_wootters(rho))
        else:
            constraint = (
                entanglement.RoofConstraint.PARITY_SSR
                if args.constraint == "ssr"
                else entanglement.RoofConstraint.UNCONSTRAINED
            )
            if constraint is entanglement.RoofConstraint.PARITY_SSR:
                verdict = density.ssr_check_mixed(rho)
                if not verdict:
                    print(str(verdict), file=sys.stderr)
                    return EXIT_VIOLATION
            cfg = RoofConfig(seed=args.seed, restarts=args.restarts)
            report, _ = entanglement.eof_convex_roof(rho, constraint, cfg)
    except density.DensityError as exc:
        raise UsageError(str(exc)) from None
    print(report.to_line(), file=out)
    if not report.converged:
        print(f"warning: roof optimizer did not converge (residual {report.residual:.3g})", file=sys.stderr)
    return EXIT_OK


def cmd_erasure(args, out) -> int:
    p = args.p
    if not (math.isfinite(p) and 0.0 <= p <= 1.0):
        raise UsageError(f"--p must lie in [0, 1], got {p}")
    pt_spec = channels.erasure_ppt_spectrum(p)
    neg = entanglement.negativity(channels.erasure_choi(p), [1], channels.CHOI_DIMS)
    cap = channels.erasure_quantum_capacity(p)
    if args.report == "ppt":
        eigs = ",".join(_csv_float(e) for e in sorted(pt_spec.eigenvalues))
        print(f"p={_csv_float(p)} ppt_eigenvalues={eigs}", file=out)
    elif args.report == "negativity":
        print(f"p={_csv_float(p)} negativity={_csv_float(neg)}", file=out)
    elif args.report == "capacity":
        print(f"p={_csv_float(p)} capacity={_csv_float(cap)}", file=out)
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["p", "neg_eig", "negativity", "capacity"])
        writer.writerow([_csv_float(v) for v in (p, pt_spec.min, neg, cap)])
    return EXIT_OK


def unruh_curve_rows(samples: int, seed: int, restarts: int = 32) -> list[tuple[float, float, float, float]]:
    cfg = RoofConfig(seed=seed, restarts=restarts)
    rows = []
    for r in np.linspace(0.0, math.pi / 4, samples):
        rho = channels.grassmann_output_state(r)
        lower = entanglement.eof_wootters(rho)
        upper = entanglement.eof_convex_roof(rho, entanglement.RoofConstraint.PARITY_SSR, cfg)[0].value
        rows.append((float(r), lower, upper, upper - lower))
    return rows


def cmd_unruh_curve(args, out) -> int:
    if args.samples < 2:
        raise UsageError(f"--samples must be at least 2, got {args.samples}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "eof_wootters", "eof_ssr", "gap"])
    for row in unruh_curve_rows(args.samples, args.seed, args.restarts):
        writer.writerow([_csv_float(v) for v in row])
    try:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    print(f"wrote {args.samples} rows to {args.out}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fermient", description="Fermionic Fock states and entanglement diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="parity sectors and superselection verdict")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", metavar="FILE")
    src.add_argument("--rho", metavar="FILE")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reorder", help="express a state in another mode order")
    p.add_argument("--state", metavar="FILE", required=True)
    p.add_argument("--order", metavar="PERM", required=True)
    p.set_defaults(func=cmd_reorder)

    p = sub.add_parser("reduce", help="fermionic partial trace of a pure state")
    p.add_argument("--state", metavar="FILE", required=True)
    p.add_argument("--trace-out", metavar="LABELS", required=True)
    p.add_argument("--order", metavar="PERM")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("measure", help="entanglement measure of a density matrix")
    p.add_argument("--rho", metavar="FILE", required=True)
    p.add_argument("--measure", choices=MEASURES, required=True)
    p.add_argument("--constraint", choices=("none", "ssr"), default="none")
    p.add_argument("--subsystem", metavar="LABELS", help="transposed modes (default: last mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=32)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("erasure", help="erasure-channel Choi diagnostics")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--report", choices=("ppt", "negativity", "capacity", "all"), default="all")
    p.set_defaults(func=cmd_erasure)

    p = sub.add_parser("unruh-curve", help="constrained vs unconstrained EoF along the acceleration")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--out", metavar="FILE.csv", required=True)
    p.set_defaults(func=cmd_unruh_curve)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
