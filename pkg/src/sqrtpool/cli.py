"""Command line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed
verification.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    Cancelled,
    DegenerateDirection,
    DegenerateGram,
    InfiniteInformation,
    InvalidDensity,
    InvalidPanel,
    InvalidRange,
    QuadratureFailure,
)
from .kernels import GramPair, gram, write_gram
from .oracle import SearchConfig, fisher_direct, search_alpha, search_alpha_nonneg
from .panelfile import PanelFile, PanelFileError, load_panel_file
from .pooling import PooledPrior, pool, sample_curve
from .solver import RANK_TOL, min_rayleigh

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

_INPUT_ERRORS = (PanelFileError, InvalidDensity, InvalidPanel, InfiniteInformation, InvalidRange)
_NUMERIC_ERRORS = (QuadratureFailure, DegenerateGram, DegenerateDirection, Cancelled, np.linalg.LinAlgError)

VERIFY_REL_TOL = 1e-6
VERIFY_BEAT_TOL = 1e-9


def _warnings(pp: PooledPrior) -> list[str]:
    out = list(pp.gram.warnings)
    sol = pp.solution
    m = len(pp.panel)
    if sol.used_reduction:
        out.append(f"B is singular: effective rank {sol.effective_rank} of {m} (coincident experts)")
    else:
        w = np.linalg.eigvalsh(pp.gram.b)
        if w[0] < 1e-8 * w[-1]:
            out.append(f"B is nearly singular (condition number {w[-1] / w[0]:.3g})")
    if sol.multiplicity_warning:
        out.append("smallest eigenvalue is (nearly) repeated; the optimal weights are not unique")
    return out


def condition_report(name: str, pp: PooledPrior) -> dict:
    return {
        "name": name,
        "alpha": [{"label": lab, "value": float(v)} for lab, v in zip(pp.panel.labels, pp.alpha)],
        "information": float(pp.information),
        "dominant": pp.dominant_label,
        "reduction_percent": float(pp.reduction_percent),
        "rank": int(pp.solution.effective_rank),
        "warnings": _warnings(pp),
    }


def pool_report(pf: PanelFile, condition: str | None = None, rank_tol: float = RANK_TOL) -> dict:
    """The JSON report for every (or one) condition of a panel file."""
    return {"conditions": [condition_report(name, pool(panel, rank_tol=rank_tol)) for name, panel in pf.panels(condition)]}


@dataclass
class CheckRow:
    condition: str
    check: str
    value: float
    reference: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        rel = abs(self.value - self.reference) / max(abs(self.reference), 1e-300)
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.condition:<8} {self.check:<24} {self.value:>24.16e} {self.reference:>24.16e} "
            f"{rel:>10.2e} {self.tolerance:>8.0e}  {status}"
        )


def verify_conditions(pf: PanelFile, seed: int, condition=None, iterations=20000, corrupt=False) -> list[CheckRow]:
    """Cross-check solver output against direct quadrature and random search.

    ``corrupt`` perturbs A before solving (a negative control: the checks
    must then fail).
    """
    rows = []
    sc = SearchConfig(n_iterations=iterations, seed=seed)
    for name, panel in pf.panels(condition):
        g = gram(panel)
        if corrupt:
            a = g.a.copy()
            a[0, 0] *= 1.5
            g = GramPair(a, g.b, g.provenance)
        sol = min_rayleigh(g)
        info = sol.information
        direct = fisher_direct(panel, sol.alpha)
        rows.append(
            CheckRow(name, "fisher_direct", direct, info, VERIFY_REL_TOL,
                     abs(direct - info) <= VERIFY_REL_TOL * abs(info))
        )
        _, found = search_alpha(panel, g, sc)
        rows.append(
            CheckRow(name, "search not below solver", found, info, VERIFY_BEAT_TOL,
                     found >= info - VERIFY_BEAT_TOL * max(abs(info), 1e-300))
        )
        rows.append(
            CheckRow(name, "search reaches solver", found, info, VERIFY_REL_TOL,
                     found - info <= VERIFY_REL_TOL * abs(info))
        )
        _, found_nn = search_alpha_nonneg(panel, g, sc)
        rows.append(
            CheckRow(name, "nonneg search >= solver", found_nn, info, VERIFY_BEAT_TOL,
                     found_nn >= info - VERIFY_BEAT_TOL * max(abs(info), 1e-300))
        )
    return rows


def _write_curve(path, labels, rows: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "pooled", *labels])
        for r in rows:
            w.writerow([f"{v:.17g}" for v in r])


def _write_gnuplot(path, csv_path, labels) -> None:
    cols = [f"'{csv_path}' using 1:2 with lines lw 3 lc rgb 'black' title 'pooled'"]
    for k, lab in enumerate(labels):
        cols.append(f"'' using 1:{k + 3} with lines dt 2 title '{lab}'")
    text = "set datafile separator ','\nset key autotitle columnhead\nplot " + ", \\\n     ".join(cols) + "\n"
    Path(path).write_text(text, encoding="ascii")


def cmd_pool(args) -> int:
    pf = load_panel_file(args.panel)
    report = pool_report(pf, args.condition, args.rank_tol)
    for cond in report["conditions"]:
        for w in cond["warnings"]:
            print(f"warning: condition {cond['name']}: {w}", file=sys.stderr)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_curve(args) -> int:
    pf = load_panel_file(args.panel)
    panel = pf.panel(args.condition)
    pp = pool(panel, rank_tol=args.rank_tol)
    lo, hi = pp.effective_support()
    lo = lo if args.lo is None else args.lo
    hi = hi if args.hi is None else args.hi
    rows = sample_curve(pp, lo, hi, args.n)
    out = args.out or "curve.csv"
    _write_curve(out, panel.labels, rows)
    if args.gnuplot:
        _write_gnuplot(args.gnuplot, out, panel.labels)
    for w in _warnings(pp):
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_gram(args) -> int:
    pf = load_panel_file(args.panel)
    panel = pf.panel(args.condition)
    g = gram(panel)
    prefix = args.out or "gram"
    write_gram(f"{prefix}.A.txt", g.a, "A")
    write_gram(f"{prefix}.B.txt", g.b, "B")
    for kind, mat in (("A", g.a), ("B", g.b)):
        w = np.linalg.eigvalsh(mat)[::-1]
        print(f"eigenvalues {kind}: " + " ".join(f"{v:.17g}" for v in w))
    for w in g.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    pf = load_panel_file(args.panel)
    rows = verify_conditions(pf, args.seed, args.condition, args.iterations, args.corrupt_gram)
    print(f"{'cond':<8} {'check':<24} {'value':>24} {'reference':>24} {'rel.err':>10} {'tol':>8}  status")
    for r in rows:
        print(r.line())
    ok = all(r.passed for r in rows)
    print("verification " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqrtpool", description="Minimum-information pooling of expert priors.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("panel", help="panel JSON file, or a bundled name such as 'ecology_ticks'")
        sp.add_argument("--condition", default=None, help="pool only this condition")

    sp = sub.add_parser("pool", help="pool a panel and write a JSON report")
    common(sp)
    sp.add_argument("--rank-tol", type=float, default=RANK_TOL)
    sp.add_argument("--out", default=None, help="report path (default: stdout)")
    sp.set_defaults(func=cmd_pool)

    sp = sub.add_parser("curve", help="tabulate pooled and expert densities as CSV")
    common(sp)
    sp.add_argument("--rank-tol", type=float, default=RANK_TOL)
    sp.add_argument("--lo", type=float, default=None)
    sp.add_argument("--hi", type=float, default=None)
    sp.add_argument("--n", type=int, default=1001)
    sp.add_argument("--out", default=None, help="CSV path (default: curve.csv)")
    sp.add_argument("--gnuplot", default=None, help="also write a gnuplot script here")
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("gram", help="dump the A and B matrices")
    common(sp)
    sp.add_argument("--out", default=None, help="output prefix (writes PREFIX.A.txt and PREFIX.B.txt)")
    sp.set_defaults(func=cmd_gram)

    sp = sub.add_parser("verify", help="cross-check the solver against brute-force oracles")
    common(sp)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--iterations", type=int, default=20000, help="search iterations per restart")
    sp.add_argument("--corrupt-gram", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
