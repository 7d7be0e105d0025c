"""Command-line front end: ``qhl <subcommand> [flags]``.

Exit codes: 0 success, 1 a check failed or output could not be written,
2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from .groups import InvalidParameters, QuotientContext, group_compose, validate_params
from .hardy import (DomainError, build_basis, reproducing_check, szego_kernel,
                    szego_series)
from .operators import (SymbolError, WindowTooSmall, bmo_identity_check,
                        check_brown_halmos, hartman_rank_bound, matrix_rank, nehari_experiment,
                        small_hankel_matrix, theta_monomial)
from . import pisier

DEFAULTS = {"m": 1, "t": 1, "d": 2, "a": 0, "c": 0, "D": 8, "N": [16], "q": 128}
SIG = 12


class InputError(Exception):
    pass


def fmt_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.{SIG}g}")
    if isinstance(v, (tuple, list)):
        return " ".join(str(fmt_value(x)) for x in v)
    return v


def _json_value(v):
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.{SIG}g}")
    return v


def render(rows: Sequence[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_json_value(list(rows)), indent=1) + "\n"
    if not rows:
        return ""
    header = list(rows[0])
    for r in rows[1:]:
        header += [k for k in r if k not in header]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([fmt_value(r.get(k, "")) for k in header])
    return buf.getvalue()


def emit(rows: Sequence[dict], fmt: str = "csv", path: str | None = None) -> None:
    text = render(rows, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def n_threads() -> int:
    raw = os.environ.get("QHL_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"QHL_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise InputError(f"QHL_THREADS must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn: Callable, items: Iterable) -> list:
    items = list(items)
    workers = n_threads()
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _get(args, name):
    v = getattr(args, name)
    return DEFAULTS[name] if v is None else v


def _context(args) -> QuotientContext:
    m, t, d = _get(args, "m"), _get(args, "t"), _get(args, "d")
    a, c = _get(args, "a"), _get(args, "c")
    validate_params(m, t, d)
    if a not in (0, 1):
        raise InputError(f"character index a={a} must be 0 or 1")
    if not 0 <= c < m // t:
        raise InputError(f"character index c={c} must satisfy 0 <= c < m/t = {m // t}")
    return QuotientContext.build(m=m, t=t, d=d, a=a, c=c)


def _window(args) -> int:
    D = _get(args, "D")
    if D < 1:
        raise InputError(f"window D={D} must be positive")
    return D


def sample_points(ctx: QuotientContext, count: int, radius: float = 0.6, seed: int = 0) -> list[np.ndarray]:
    """Deterministic interior points kept away from the zero set of ell_rho."""
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < count:
        z = radius * np.sqrt(rng.uniform(size=ctx.d)) * np.exp(2j * np.pi * rng.uniform(size=ctx.d))
        if abs(ctx.ell(z)) > 1e-3:
            pts.append(z)
    return pts


def _cplx(z) -> str:
    return " ".join(f"{complex(v).real:.6g}{complex(v).imag:+.6g}j" for v in np.atleast_1d(z))


# -- subcommands ----------------------------------------------------------

def cmd_group(args) -> tuple[list[dict], bool]:
    ctx = _context(args)
    group = list(ctx.group)
    keys = {g.perm + g.exps for g in group}
    ok = len(group) == ctx.m ** ctx.d * math.factorial(ctx.d) // ctx.t
    ident = group[0]
    for g in group:
        ok &= (g @ g.inverse()) == ident
        for h in group:
            ok &= (group_compose(g, h).perm + group_compose(g, h).exps) in keys
    rows = [{"kind": "element", "index": i, "label": f"perm={list(g.perm)} nu={list(g.exps)}",
             "detail": g.sign()} for i, g in enumerate(group)]
    for i, ch in enumerate(ctx.characters):
        ell = QuotientContext.build(m=ctx.m, t=ctx.t, d=ctx.d, a=ch.a, c=ch.c).ell
        rows.append({"kind": "character", "index": i, "label": ch.label(), "detail": repr(ell)})
    return rows, ok


def cmd_basis(args):
    ctx = _context(args)
    basis = build_basis(ctx, _window(args))
    res = basis.gram_residual()
    rows = [{"lambda": list(en.lam), "degree": en.degree, "analytic": en.analytic,
             "terms": len(en.e), "gram_residual": res} for en in basis]
    return rows, res <= 1e-10


def cmd_kernel(args):
    ctx = _context(args)
    D = _window(args)
    basis = build_basis(ctx, D)
    f = ctx.ell * ctx.theta[0]
    rows, ok = [], True
    pts = sample_points(ctx, 6)
    for i, (z, w) in enumerate(zip(pts[:3], pts[3:])):
        s = szego_kernel(ctx, z, w)
        herm = abs(s - np.conj(szego_kernel(ctx, w, z)))
        series = abs(s - szego_series(basis, z, w))
        rep = reproducing_check(ctx, f, w, D, basis=basis)
        ok &= herm <= 1e-12 and rep <= 1e-8
        rows.append({"index": i, "z": _cplx(z), "w": _cplx(w), "S_re": s.real, "S_im": s.imag,
                     "hermitian_residual": herm, "series_gap": series, "reproducing_residual": rep})
    return rows, ok


def cmd_toeplitz(args):
    ctx = _context(args)
    basis = build_basis(ctx, _window(args))
    symbols = [(f"p{j + 1}", th) for j, th in enumerate(ctx.theta)]
    symbols.append((f"p1 + conj(p{ctx.d})", ctx.theta[0] + ctx.theta[-1].conj()))
    rows, ok = [], True
    for name, sym in symbols:
        rep = check_brown_halmos(ctx, basis, sym)
        for rel, val in rep.residuals.items():
            ok &= val <= 1e-10
            rows.append({"symbol": name, "relation": rel, "residual": val,
                         "margin": rep.margin, "interior": rep.interior_size})
    return rows, ok


def cmd_hankel_rank(args):
    ctx = _context(args)
    basis = build_basis(ctx, _window(args))
    gammas = [g for total in range(4) for g in itertools.product(range(total + 1), repeat=ctx.d)
              if sum(g) == total]

    def one(gamma):
        A = small_hankel_matrix(ctx, basis, theta_monomial(ctx, gamma))
        rank = matrix_rank(A, 1e-8)
        bound = hartman_rank_bound(ctx, basis, gamma)
        return {"gamma": list(gamma), "d0": ctx.m0 + sum(g * mj for g, mj in zip(gamma, ctx.degrees)),
                "rank": rank, "bound": bound, "ok": rank <= bound}

    rows = parallel_map(one, gammas)
    return rows, all(r["ok"] for r in rows)


def cmd_nehari(args):
    m, t, d = _get(args, "m"), _get(args, "t"), _get(args, "d")
    validate_params(m, t, d)
    Ns = sorted(set(_get(args, "N")))
    if Ns[0] < 1:
        raise InputError(f"series cutoff N={Ns[0]} must be at least 1")
    D = args.D if args.D is not None else max(Ns)  # one window for the whole sweep
    if D < 1:
        raise InputError(f"window D={D} must be positive")
    for N in Ns:
        q = args.q if args.q is not None else max(DEFAULTS["q"], 4 * N)
        if q < 4 * N:
            raise InputError(f"grid order q={q} must be at least 4N={4 * N}")

    def one(N):
        q = args.q if args.q is not None else max(DEFAULTS["q"], 4 * N)
        return nehari_experiment(m, t, d, N, D, q).row()

    rows = sorted(parallel_map(one, Ns), key=lambda r: r["N"])
    return rows, True


def cmd_bmo(args):
    ctx = _context(args)
    q = _get(args, "q")
    if q < 4:
        raise InputError(f"grid order q={q} must be at least 4")
    D = _window(args)
    th = ctx.theta
    symbols = [("p1", th[0]), ("p1 + conj(p1)", th[0] + th[0].conj()),
               (f"p{ctx.d} + 2 conj(p1)", th[-1] + th[0].conj().scale(2))]
    rows, ok = [], True
    for name, sym in symbols:
        for i, z in enumerate(sample_points(ctx, 3, radius=0.5, seed=1)):
            rep = bmo_identity_check(ctx, sym, z, q=q, D=D)
            ok &= rep.residual1 <= 1e-6
            rows.append({"symbol": name, "point": _cplx(z), "lhs": rep.lhs, "rhs": rep.rhs,
                         "residual1": rep.residual1, "residual2": rep.residual2,
                         "hankel_bound": rep.hankel_bound})
    return rows, ok


def cmd_pisier(args):
    if args.m is not None:
        if args.m < 1:
            raise InputError(f"m={args.m} must be positive")
        pairs = [(args.m, n) for n in range(1, 6 // args.m + 1)]
        if not pairs:
            raise InputError(f"m={args.m} leaves no n with m*n <= 6")
    else:
        pairs = [(m, n) for m in (1, 2) for n in (1, 2, 3)]
    ok = max(pisier.base_identities().values()) == 0
    ok &= max(pisier.step1_relations(5).values()) == 0
    ok &= max(pisier.w_relations(5).values()) == 0
    ok &= pisier.hankel_intertwining_residual(pisier.PisierParams(1, 3)) == 0

    def one(pair):
        return pisier.delta_growth_experiment(*pair).row()

    rows = sorted(parallel_map(one, pairs), key=lambda r: (r["m"], r["n"]))
    ok &= all(r["margin"] >= -1e-9 for r in rows)
    return rows, ok


COMMANDS = {
    "group": cmd_group,
    "basis": cmd_basis,
    "kernel": cmd_kernel,
    "toeplitz-check": cmd_toeplitz,
    "hankel-rank": cmd_hankel_rank,
    "nehari": cmd_nehari,
    "bmo": cmd_bmo,
    "pisier": cmd_pisier,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhl", description="Hardy-space experiments on quotient domains")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--m", type=int)
        p.add_argument("--t", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--a", type=int)
        p.add_argument("--c", type=int)
        p.add_argument("--D", type=int)
        p.add_argument("--N", type=int, nargs="+")
        p.add_argument("--q", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rows, ok = COMMANDS[args.command](args)
    except (InputError, InvalidParameters, WindowTooSmall, SymbolError, DomainError, ValueError) as exc:
        print(f"qhl {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2
    try:
        emit(rows, args.format, args.out)
    except OSError as exc:
        print(f"qhl {args.command}: cannot write output: {exc}", file=sys.stderr)
        return 1
    if not ok:
        print(f"qhl {args.command}: check failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
