"""Cylinder geometry, branch validation and contraction-gap checks."""

import math

import numpy as np
import pytest

from mfspec.errors import (DegenerateCylinderError, EnumerationLimitError,
                           InsufficientDepthError)
from mfspec.geometry import (Branch, CylinderTable, cylinder_interval,
                             example2_system, g_eval, geometric_potential,
                             lambda_n, lemma1_gap, linear_system,
                             manneville_pomeau_system, project)

HALVES = linear_system([0.5, 0.5])
MIXED = linear_system([0.5, 1 / 3])
EX2 = example2_system()
MP = manneville_pomeau_system(0.5)


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------

def test_binary_subdivision():
    iv = cylinder_interval(HALVES, (1, 0))
    assert (iv.lo, iv.hi) == (0.5, 0.75)


def test_example2_left_branch_image():
    iv = cylinder_interval(EX2, (0,))
    assert iv.lo == 0.0
    assert iv.hi == pytest.approx(0.5, abs=1e-15)


def test_example2_constant_word_formula():
    # the left branch iterates [0,1] onto [0, 1/(n+1)]
    for n in (1, 3, 5, 9):
        iv = cylinder_interval(EX2, (0,) * n)
        assert iv.lo == 0.0
        assert iv.hi == pytest.approx(1 / (n + 1), abs=1e-12)
        assert lambda_n(EX2, (0,) * n) == pytest.approx(math.log(n + 1) / n,
                                                        abs=1e-12)


def test_nesting_and_shrinkage():
    rng = np.random.default_rng(11)
    for system in (HALVES, MIXED, EX2, MP):
        for _ in range(15):
            w = tuple(rng.integers(0, system.m, size=6))
            parent = cylinder_interval(system, w)
            for a in range(system.m):
                child = cylinder_interval(system, w + (a,))
                assert parent.lo - 1e-12 <= child.lo
                assert child.hi <= parent.hi + 1e-12
                assert child.diameter <= parent.diameter + 1e-15


def test_depth1_open_disjointness():
    for system in (HALVES, MIXED, EX2, MP):
        images = sorted((cylinder_interval(system, (a,)) for a in
                         range(system.m)), key=lambda iv: iv.lo)
        for left, right in zip(images, images[1:]):
            assert right.lo >= left.hi - 1e-12


def test_linear_diameters_exact():
    table = CylinderTable(MIXED, 6)
    ratios = np.array([0.5, 1 / 3])
    for idx, w in enumerate(table.words()):
        expected = np.prod(ratios[list(w)])
        assert table.diameters()[idx] == pytest.approx(expected, rel=1e-13)


def test_lambda_examples():
    assert lambda_n(MIXED, (0, 1)) == pytest.approx(
        (math.log(2) + math.log(3)) / 2, abs=1e-12)
    for w in ((0, 0, 0), (1, 0, 1), (1, 1, 1, 1)):
        assert lambda_n(HALVES, w) == pytest.approx(math.log(2), abs=1e-12)


def test_lambda_degenerate_cylinder():
    tiny = linear_system([0.01, 0.01])
    with pytest.raises(DegenerateCylinderError):
        lambda_n(tiny, (0,) * 200)


def test_projection():
    point, err = project(HALVES, (1,) * 12)
    assert err == pytest.approx(2.0**-13)
    assert abs(point - 1.0) <= 2.0**-12
    point, err = project(EX2, (0,) * 9)
    assert err == pytest.approx(1 / 20, abs=1e-12)
    assert abs(point) <= 1 / 10
    point, _ = project(MIXED, (1,))
    assert point == pytest.approx(0.5 + 1 / 6, abs=1e-12)


# ---------------------------------------------------------------------------
# geometric potential
# ---------------------------------------------------------------------------

def test_g_constant_for_linear_branches():
    for suffix in ((1,), (0, 1), (1, 1, 0)):
        assert g_eval(MIXED, (0,) + suffix) == pytest.approx(math.log(2),
                                                             abs=1e-14)
        assert g_eval(MIXED, (1,) + suffix) == pytest.approx(math.log(3),
                                                             abs=1e-14)


def test_g_needs_a_suffix():
    with pytest.raises(InsufficientDepthError):
        g_eval(MP, (0,))


def test_g_vanishes_at_parabolic_points():
    # left MP branch along all-0 suffixes: derivative -> 1 at the fixed point
    vals = [g_eval(MP, (0,) * n) for n in (3, 6, 12, 24, 48)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.05
    # example2 right branch with suffix cylinders shrinking to {1}
    vals = [g_eval(EX2, (1,) * n) for n in (3, 6, 12, 24, 48)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.05


def test_mean_value_identity_on_sampled_words():
    # -log(D_n / D_{n-1}(suffix)) is a branch log-derivative somewhere on the
    # suffix cylinder, so it lies between the endpoint values (the shipped
    # branch derivatives are monotone)
    rng = np.random.default_rng(5)
    for system in (EX2, MP):
        for _ in range(25):
            w = tuple(rng.integers(0, system.m, size=7))
            suffix = cylinder_interval(system, w[1:])
            ratio = (cylinder_interval(system, w).diameter / suffix.diameter)
            lo = -math.log(float(system.apply_derivative(w[0], suffix.lo)))
            hi = -math.log(float(system.apply_derivative(w[0], suffix.hi)))
            lo, hi = min(lo, hi), max(lo, hi)
            assert lo - 1e-10 <= -math.log(ratio) <= hi + 1e-10


# ---------------------------------------------------------------------------
# system validation
# ---------------------------------------------------------------------------

def test_mp_inverse_branches_are_sections():
    # composing the forward map with each inverse branch is the identity
    beta = 0.5
    grid = np.linspace(0.0, 1.0, 1000)
    forward = lambda x: x + x ** (1 + beta)
    left, right = MP.branches
    assert np.max(np.abs(forward(left.map(grid)) - grid)) < 1e-10
    assert np.max(np.abs(forward(right.map(grid)) - (grid + 1.0))) < 1e-10


def test_mp_parabolic_flags():
    assert MP.parabolic_symbols == (0,)
    assert EX2.parabolic_symbols == (0, 1)
    assert HALVES.parabolic_symbols == ()


def test_overlapping_images_rejected():
    with pytest.raises(ValueError):
        linear_system([0.6, 0.6])
    with pytest.raises(ValueError):
        linear_system([0.5, 0.4], offsets=[0.0, 0.3])


def test_hyperbolic_branch_with_unit_derivative_rejected():
    with pytest.raises(ValueError):
        Branch(map=lambda x: np.asarray(x, dtype=float),
               derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)))


def test_parabolic_flag_must_match_derivative():
    with pytest.raises(ValueError):
        Branch(map=lambda x: 0.5 * np.asarray(x, dtype=float),
               derivative=lambda x: np.full_like(
                   np.asarray(x, dtype=float), 0.5),
               parabolic=True, fixed_point=0.0)


# ---------------------------------------------------------------------------
# contraction-rate gap
# ---------------------------------------------------------------------------

def test_gap_zero_for_linear_systems():
    for ratios in ([0.5, 0.5], [0.5, 1 / 3], [0.3, 0.2, 0.4]):
        system = linear_system(ratios)
        for n in (3, 6, 9):
            assert lemma1_gap(system, n) <= 1e-12


def test_gap_decreases_for_parabolic_systems():
    mp_gaps = [lemma1_gap(MP, n) for n in (4, 8, 12)]
    assert mp_gaps[2] < mp_gaps[1] < mp_gaps[0]
    ex_gaps = [lemma1_gap(EX2, n) for n in (4, 8, 12)]
    assert ex_gaps[2] < ex_gaps[1] < ex_gaps[0]


def test_gap_sampled_mode_bounded_by_exhaustive():
    exact = lemma1_gap(MP, 10)
    sampled = lemma1_gap(MP, 10, sample=300, seed=2)
    assert sampled <= exact + 1e-12
    assert sampled == lemma1_gap(MP, 10, sample=300, seed=2)  # deterministic


def test_gap_cap_guard():
    with pytest.raises(EnumerationLimitError):
        lemma1_gap(HALVES, 20, cap=1000)


def test_table_word_roundtrip():
    table = CylinderTable(MIXED, 5)
    for idx in (0, 7, 19, 31):
        w = table.word(idx)
        assert table.index(w) == idx
        iv = cylinder_interval(MIXED, w)
        assert table.lo(5)[idx] == pytest.approx(iv.lo, abs=1e-15)
        assert table.hi(5)[idx] == pytest.approx(iv.hi, abs=1e-15)


def test_geometric_potential_matches_g_eval():
    g = geometric_potential(MP, depth=6)
    for w in ((0, 1), (1, 0, 1), (0, 0, 0, 1)):
        assert g.evaluate(w) == pytest.approx(g_eval(MP, w), abs=1e-14)
