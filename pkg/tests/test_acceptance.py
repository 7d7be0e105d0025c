"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from qhl.groups import QuotientContext, enumerate_group
from qhl.hardy import build_basis, reproducing_check, szego_kernel, szego_series
from qhl.laurent import LaurentPoly
from qhl.numerics import opnorm
from qhl.operators import (bmo_identity_check, check_brown_halmos, delta_r_matrix,
                           hartman_rank_bound, matrix_rank, nehari_experiment,
                           small_hankel_matrix, theta_monomial)
from qhl import pisier

RESULTS: dict[int, str] = {}

GROUPS = [(1, 1, 2), (1, 1, 3), (2, 1, 2), (2, 2, 2), (3, 1, 2)]


def contexts(params_list):
    for params in params_list:
        for ch in QuotientContext.build(*params, verify_ell=False).characters:
            yield QuotientContext.build(*params, a=ch.a, c=ch.c)


def disc_point(rng, d, radius=0.7):
    return radius * np.sqrt(rng.uniform(size=d)) * np.exp(2j * np.pi * rng.uniform(size=d))


@contextmanager
def criterion(number, name, limit):
    start = time.perf_counter()
    detail = {}
    ok = False
    try:
        yield detail
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        timely = elapsed < limit
        status = "PASS" if ok and timely else "FAIL"
        extra = "" if timely else f" [over the {limit:g}s limit]"
        info = " ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in detail.items())
        line = f"criterion {number:2d} {status}  {name}  ({elapsed:.1f}s){extra}  {info}".rstrip()
        RESULTS[number] = line
        print(line)
    assert timely, f"criterion {number} exceeded {limit}s"


def test_criterion_01_group_law():
    with criterion(1, "group law", 1.0) as info:
        for m, t, d in GROUPS:
            group = enumerate_group(m, t, d)
            assert len(group) == m ** d * math.factorial(d) // t
            members = set(group)
            for g in group:
                assert g.inverse() in members and (g @ g.inverse()).is_identity()
                for h in group:
                    assert g @ h in members
        info["groups"] = len(GROUPS)


def test_criterion_02_invariance():
    rng = np.random.default_rng(2)
    with criterion(2, "invariance of theta and ell", 5.0) as info:
        worst = 0.0
        for ctx in contexts(GROUPS):
            for g in ctx.group:
                rho = ctx.rho(g)
                for _ in range(20):
                    z = disc_point(rng, ctx.d)
                    gz = g(z)
                    worst = max(worst, max(abs(th(gz) - th(z)) for th in ctx.theta))
                    worst = max(worst, abs(ctx.ell(gz) - rho * ctx.ell(z)))
        info["max_residual"] = worst
        assert worst <= 1e-12


def test_criterion_03_basis_gram():
    with criterion(3, "basis orthonormality", 30.0) as info:
        worst = 0.0
        for ctx in contexts(GROUPS + [(2, 1, 3)]):
            D = 6 if ctx.d == 2 else 4
            worst = max(worst, build_basis(ctx, D).gram_residual())
        info["max_gram_residual"] = worst
        assert worst <= 1e-10


def test_criterion_04_reproducing_kernel():
    rng = np.random.default_rng(4)
    with criterion(4, "reproducing kernel", 60.0) as info:
        series_gap = rep = 0.0
        for a in (0, 1):
            ctx = QuotientContext.build(1, 1, 2, a=a)
            B24 = build_basis(ctx, 24)
            series_gap = max(series_gap, abs(szego_kernel(ctx, [0.5, 0.2], [0.1, 0.3])
                                             - szego_series(B24, [0.5, 0.2], [0.1, 0.3])))
            th1, th2 = ctx.theta
            f = ctx.ell * (th1 ** 2 - 2j * th2 + th1 + 1)
            B8 = build_basis(ctx, 8)
            for _ in range(5):
                w = disc_point(rng, 2)
                rep = max(rep, reproducing_check(ctx, f, w, 8, basis=B8))
        info["series_gap"] = series_gap
        info["reproducing_residual"] = rep
        assert series_gap <= 1e-6 and rep <= 1e-8


def test_criterion_05_brown_halmos():
    rng = np.random.default_rng(5)
    with criterion(5, "Brown-Halmos relations", 60.0) as info:
        worst, count = 0.0, 0
        # G(3,1,2) needs a margin of 12 > 10 and is left out at D = 10
        for ctx in contexts([(1, 1, 2), (2, 1, 2), (2, 2, 2), (1, 1, 3)]):
            basis = build_basis(ctx, 10)
            for _ in range(10):
                raw = LaurentPoly(ctx.d, {tuple(rng.integers(-2, 3, size=ctx.d)): complex(*rng.normal(size=2))
                                          for _ in range(4)})
                worst = max(worst, check_brown_halmos(ctx, basis, ctx.symmetrize(raw)).max)
                count += 1
        info["symbols"] = count
        info["max_residual"] = worst
        assert worst <= 1e-10


def test_criterion_06_small_hankel_rank():
    with criterion(6, "finite-rank small Hankel", 60.0) as info:
        checked = 0
        for ctx in contexts([(1, 1, 2), (2, 1, 2)]):
            basis = build_basis(ctx, 8)
            for gamma in itertools.product(range(4), repeat=2):
                if sum(gamma) > 3:
                    continue
                A = small_hankel_matrix(ctx, basis, theta_monomial(ctx, gamma))
                assert matrix_rank(A, 1e-8) <= hartman_rank_bound(ctx, basis, gamma), (ctx.describe(), gamma)
                checked += 1
        info["cases"] = checked


def test_criterion_07_delta_r():
    rng = np.random.default_rng(7)
    with criterion(7, "delta_r approximate identity", 5.0) as info:
        worst = 0.0
        for ctx in contexts([(1, 1, 2), (2, 1, 2)]):
            basis = build_basis(ctx, 6)
            M = delta_r_matrix(ctx, basis, 0.999).entries
            assert opnorm(M) <= 1 + 1e-15
            assert np.array_equal(M, M.conj().T)
            keep = [i for i, en in enumerate(basis.analytic) if en.degree <= 4]
            for _ in range(10):
                c = np.zeros(len(basis.analytic), dtype=complex)
                c[keep] = rng.normal(size=len(keep)) + 1j * rng.normal(size=len(keep))
                worst = max(worst, np.linalg.norm(M @ c - c) / np.linalg.norm(c))
        info["max_relative_gap"] = worst
        assert worst <= 0.01


def test_criterion_08_bmo_identity():
    ctx = QuotientContext.build(1, 1, 2)
    th1, th2 = ctx.theta
    symbols = [th1 + th1.conj(), th1 ** 2 - 1j * th2, th2.conj() + 0.5 * th1 * th2]
    points = [np.array([0.3, 0.1]), np.array([0.5j, -0.2 + 0.1j]), np.array([-0.4 + 0.3j, 0.6])]
    with criterion(8, "BMO identity", 120.0) as info:
        worst = 0.0
        for f in symbols:
            for z in points:
                worst = max(worst, bmo_identity_check(ctx, f, z, q=128).residual1)
        info["max_residual"] = worst
        assert worst <= 1e-6


def test_criterion_09_nehari_dichotomy():
    with criterion(9, "Nehari dichotomy witness", 300.0) as info:
        D = 64  # one window for both truncations
        r32 = nehari_experiment(1, 1, 2, 32, D)
        r64 = nehari_experiment(1, 1, 2, 64, D)
        growth = r64.phi0_sup_lower - r32.phi0_sup_lower
        ratio = r64.hankel_norm / r32.hankel_norm
        info["phi0_growth"] = growth
        info["hankel_ratio"] = ratio
        info["hankel_norm_64"] = r64.hankel_norm
        assert growth >= 0.6
        assert growth >= 0.3
        assert ratio <= 1.05


def test_criterion_10_pisier_lab():
    rng = np.random.default_rng(10)
    with criterion(10, "Pisier lab", 300.0) as info:
        assert all(v == 0 for v in pisier.base_identities().values())
        for n in range(1, 6):
            assert all(v == 0 for v in pisier.step1_relations(n).values())
        for _ in range(20):
            n = int(rng.integers(1, 6))
            a = rng.normal(size=n) + 1j * rng.normal(size=n)
            norm, lo, hi = pisier.cc_norm_check(a, n)
            assert lo - 1e-9 <= norm <= hi + 1e-9
        iso = 0.0
        for _ in range(20):
            mn = int(rng.integers(1, 11))
            alpha = rng.normal(size=mn) + 1j * rng.normal(size=mn)
            iso = max(iso, pisier.lambda_isometry_check(alpha, mn))
        assert iso <= 1e-9
        margin = math.inf
        for m in range(1, 7):
            for n in range(1, 6 // m + 1):
                rep = pisier.delta_growth_experiment(m, n)
                margin = min(margin, rep.margin)
        info["iso_residual"] = iso
        info["min_growth_margin"] = margin
        assert margin >= -1e-9


def test_criterion_11_module_action():
    rng = np.random.default_rng(11)
    with criterion(11, "theta module action", 5.0) as info:
        worst = 0.0
        for params in [(1, 1, 2), (3, 1, 2), (2, 1, 3)]:
            ctx = QuotientContext.build(*params)
            m, _, d = params
            T = rng.normal(size=(8, 8)) / 4
            p1 = LaurentPoly.variable(d, 0)
            assert np.array_equal(pisier.theta_module_action(T, p1, ctx), d * np.linalg.matrix_power(T, m))
            for _ in range(20):
                g = LaurentPoly(d, {tuple(rng.integers(0, 3, size=d)): rng.normal() for _ in range(3)})
                h = LaurentPoly(d, {tuple(rng.integers(0, 3, size=d)): rng.normal() for _ in range(3)})
                lhs = pisier.theta_module_action(T, g * h, ctx)
                rhs = pisier.theta_module_action(T, g, ctx) @ pisier.theta_module_action(T, h, ctx)
                worst = max(worst, np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs))))
        info["max_relative_residual"] = worst
        assert worst <= 1e-10


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
