"""Command-line front end.

Subcommands: selftest, sweep, covariance, exact-cf, limit-cf, mc, gf-check.
A flat key=value config file can supply any long flag's value; explicit
flags win.  Exit status: 0 success, 1 numeric failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exact import (
    CouplingVariant,
    char_fn_exact,
    gf_closed_form,
    gf_series,
    series_truncation,
)
from .harness import (
    DEFAULT_GRID_AXIS,
    SweepConfig,
    run_covariance,
    run_selftest,
    run_sweep,
    write_report,
)
from .kernel import StickinessParam, simulate_endpoints
from .limits import RegimeSpec, limit_cf

_REGIMES = {"sub": "subcritical", "critical": "critical", "super": "supercritical"}
_COUPLINGS = {"kernel": CouplingVariant.KERNEL, "paper": CouplingVariant.PAPER}


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(";", ",").split(",") if tok.strip())


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(";", ",").split(",") if tok.strip())


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line is not key=value: {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _merge(args: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Fill flags the user left unset from the config file, if any."""
    if not getattr(args, "config", None):
        return args
    file_values = _load_config(args.config)
    for key, text in file_values.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            continue
        if getattr(args, attr) is None:
            setattr(args, attr, text)
    return args


def _regime_from(args) -> RegimeSpec:
    if args.regime is None:
        raise ValueError("--regime is required (sub | critical | super)")
    kind = _REGIMES[args.regime]
    if kind == "critical":
        alpha = float(args.alpha) if args.alpha is not None else None
        if alpha is None:
            raise ValueError("critical regime requires --alpha")
        return RegimeSpec.critical(alpha)
    if kind == "subcritical":
        return RegimeSpec.subcritical()
    return RegimeSpec.supercritical()


def _grid_from(args) -> tuple[tuple[float, float], ...]:
    axis = _parse_floats(args.grid) if args.grid is not None else DEFAULT_GRID_AXIS
    return tuple((s, t) for s in axis for t in axis)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value file; flags override it")
    sub.add_argument("--out", help="output file path (default: stdout)")
    sub.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stickywalk",
                                     description="Sticky random walk laboratory")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("selftest", help="run every invariant suite at pinned parameters")
    p.add_argument("--coupling", choices=sorted(_COUPLINGS), default=None)
    _add_common(p)

    p = subs.add_parser("sweep", help="regime sweep: exact vs Monte Carlo vs limit")
    p.add_argument("--regime", choices=sorted(_REGIMES), default=None)
    p.add_argument("--alpha", default=None)
    p.add_argument("--n", dest="n", default=None, help="comma list of step counts")
    p.add_argument("--grid", default=None, help="comma list of axis values; grid is the square")
    p.add_argument("--paths", default=None)
    p.add_argument("--seed", default=None)
    p.add_argument("--workers", default=None)
    p.add_argument("--coupling", choices=sorted(_COUPLINGS), default=None)
    p.add_argument("--tol", default=None, help="quadrature tolerance for the limit side")
    _add_common(p)

    p = subs.add_parser("covariance", help="n^-1 E[x y] at delta = alpha sqrt(n) vs limit")
    p.add_argument("--alpha", default=None)
    p.add_argument("--n", dest="n", default=None)
    p.add_argument("--paths", default=None)
    p.add_argument("--seed", default=None)
    p.add_argument("--workers", default=None)
    _add_common(p)

    p = subs.add_parser("exact-cf", help="exact characteristic function at one point")
    p.add_argument("--delta", default=None)
    p.add_argument("--n", dest="n", default=None)
    p.add_argument("--s", default=None)
    p.add_argument("--t", default=None)
    p.add_argument("--coupling", choices=sorted(_COUPLINGS), default=None)
    _add_common(p)

    p = subs.add_parser("limit-cf", help="limiting characteristic function at one point")
    p.add_argument("--regime", choices=sorted(_REGIMES), default=None)
    p.add_argument("--alpha", default=None)
    p.add_argument("--s", default=None)
    p.add_argument("--t", default=None)
    p.add_argument("--tol", default=None)
    _add_common(p)

    p = subs.add_parser("mc", help="simulate endpoints and write CSV + JSON sidecar")
    p.add_argument("--delta", default=None)
    p.add_argument("--n", dest="n", default=None)
    p.add_argument("--paths", default=None)
    p.add_argument("--seed", default=None)
    p.add_argument("--workers", default=None)
    _add_common(p)

    p = subs.add_parser("gf-check", help="closed-form generating function vs truncated series")
    p.add_argument("--delta", default=None)
    p.add_argument("--t", default=None)
    p.add_argument("--z", default=None)
    p.add_argument("--j", default=None)
    p.add_argument("--tol", default=None, help="pick series truncation from this tail bound")
    _add_common(p)

    return parser


def _cmd_selftest(args) -> int:
    coupling = _COUPLINGS[args.coupling or "kernel"]
    report = run_selftest(coupling)
    for name, entry in report["checks"].items():
        status = "PASS" if entry["passed"] else "FAIL"
        print(f"[{status}] {name}: {entry['detail']}")
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return 0 if report["passed"] else 1


def _cmd_sweep(args) -> int:
    config = SweepConfig(
        regime=_regime_from(args),
        n_list=_parse_ints(args.n or "256,1024,4096"),
        grid=_grid_from(args),
        paths=int(args.paths or 0),
        seed=int(args.seed or 0),
        workers=int(args.workers or 1),
        coupling=_COUPLINGS[args.coupling or "kernel"],
        tolerances={"quad": float(args.tol or 1e-10)},
    )
    rows = run_sweep(config)
    text = write_report(rows, out=args.out, fmt=args.fmt or "csv")
    if not args.out:
        print(text, end="")
    failures = sum(1 for row in rows if row.error)
    if failures:
        print(f"{failures} row(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_covariance(args) -> int:
    if args.alpha is None:
        raise ValueError("covariance requires --alpha")
    rows = run_covariance(
        alpha=float(args.alpha),
        n_list=_parse_ints(args.n or "100,1000,10000"),
        seed=int(args.seed or 0),
        paths=int(args.paths or 0),
        workers=int(args.workers or 1),
    )
    text = write_report(rows, out=args.out, fmt=args.fmt or "csv")
    if not args.out:
        print(text, end="")
    failures = sum(1 for row in rows if row.error)
    if failures:
        print(f"{failures} row(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_exact_cf(args) -> int:
    p = StickinessParam(float(args.delta if args.delta is not None else 1.0))
    value = char_fn_exact(
        p,
        float(args.s or 0.0),
        float(args.t or 0.0),
        int(args.n or 0),
        _COUPLINGS[args.coupling or "kernel"],
    )
    print(f"{value.real:.17g}")
    return 0


def _cmd_limit_cf(args) -> int:
    value = limit_cf(
        _regime_from(args),
        float(args.s or 0.0),
        float(args.t or 0.0),
        tol=float(args.tol or 1e-10),
    )
    print(f"{value:.17g}")
    return 0


def _cmd_mc(args) -> int:
    if not args.out:
        raise ValueError("mc requires --out for the CSV (a .json sidecar is written next to it)")
    p = StickinessParam(float(args.delta if args.delta is not None else 1.0))
    seed = int(args.seed or 0)
    sample = simulate_endpoints(
        p, int(args.n or 0), int(args.paths or 1000), seed, workers=int(args.workers or 1)
    )
    sample.write_csv(args.out)
    print(f"wrote {sample.paths} endpoints to {args.out}")
    return 0


def _cmd_gf_check(args) -> int:
    p = StickinessParam(float(args.delta if args.delta is not None else 1.0))
    t = float(args.t or 0.0)
    z = float(args.z if args.z is not None else 0.5)
    j = int(args.j or 0)
    tol = float(args.tol or 1e-12)
    N = series_truncation(z, tol)
    closed = gf_closed_form(p, t, z, j)
    series = gf_series(p, t, z, j, N)
    bound = z ** (N + 1) / (1.0 - z) + 1e-12
    gap = abs(closed - series)
    ok = gap <= bound
    print(f"closed={closed:.17g} series(N={N})={series:.17g} |gap|={gap:.3e} bound={bound:.3e}")
    print("OK" if ok else "MISMATCH")
    return 0 if ok else 1


_COMMANDS = {
    "selftest": _cmd_selftest,
    "sweep": _cmd_sweep,
    "covariance": _cmd_covariance,
    "exact-cf": _cmd_exact_cf,
    "limit-cf": _cmd_limit_cf,
    "mc": _cmd_mc,
    "gf-check": _cmd_gf_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    args = _merge(args, parser)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
