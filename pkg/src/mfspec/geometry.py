"""Interval IFS branches, cylinder geometry and the contraction-rate gap.

An ``IfsSystem`` is a finite ordered family of increasing C^1 self-maps of
[0,1] with pairwise disjoint open images (endpoint touching allowed, as for
the inverse branches of a piecewise-onto expanding map).  The cylinder of a
word w = (w_1..w_n) is the interval obtained by composing the branches in
word order and applying the composition to [0,1]; since branches are
increasing, endpoint images suffice.

Depth-n rates: lambda_n(w) = -(1/n) log diam(cylinder(w)).  The geometric
potential g assigns to a word the branch log-derivative at (an approximation
of) the projected shifted sequence; ``lemma1_gap`` measures how far the two
notions are apart at a given depth, which is the uniform-approximation
residual attached to every variational dimension report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateCylinderError, InsufficientDepthError
from .symbolic import (DEFAULT_WORD_CAP, Alphabet, Word, WordFunction,
                       word_label)

_PARABOLIC_TOL = 1e-9
_VALIDATION_GRID = 513


@dataclass(frozen=True)
class Interval:
    """A closed subinterval of [0,1]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo}, {self.hi}")

    @property
    def diameter(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass(frozen=True)
class Branch:
    """One increasing C^1 branch of an interval IFS.

    ``map`` and ``derivative`` must accept floats and numpy arrays alike.
    A parabolic branch declares its indifferent fixed point explicitly;
    detection is by flag plus a numeric check, never by inference.

    ``map_width`` optionally maps (lo, width) to the width of the image of
    [lo, lo+width] in a cancellation-free form (e.g. r*width for an affine
    branch); without it the image width falls back to an endpoint
    difference, whose relative error grows as cylinders shrink far from 0.
    """

    map: Callable
    derivative: Callable
    parabolic: bool = False
    fixed_point: float | None = None
    label: str = ""
    map_width: Callable | None = None

    def image_width(self, lo, width):
        if self.map_width is not None:
            return self.map_width(lo, width)
        return self.map(lo + width) - self.map(lo)

    def __post_init__(self):
        grid = np.linspace(0.0, 1.0, _VALIDATION_GRID)
        d = np.asarray(self.derivative(grid), dtype=float)
        if np.any(d <= 0):
            raise ValueError(f"branch {self.label!r}: derivative must be positive")
        if self.parabolic:
            if self.fixed_point is None:
                raise ValueError(
                    f"branch {self.label!r}: parabolic branch needs a fixed point")
            fp = self.fixed_point
            if abs(float(self.map(fp)) - fp) > 1e-9:
                raise ValueError(
                    f"branch {self.label!r}: declared fixed point is not fixed")
            if abs(float(self.derivative(fp)) - 1.0) > _PARABOLIC_TOL:
                raise ValueError(
                    f"branch {self.label!r}: derivative at fixed point is not 1")
        else:
            # sampled check only; hyperbolicity is not certified
            if np.max(d) >= 1.0:
                raise ValueError(
                    f"branch {self.label!r}: non-parabolic branch has sampled "
                    f"derivative >= 1")
        lo, hi = float(self.map(0.0)), float(self.map(1.0))
        if not (-1e-12 <= lo <= hi <= 1.0 + 1e-12):
            raise ValueError(f"branch {self.label!r}: image {lo, hi} not inside [0,1]")

    @property
    def image(self) -> Interval:
        return Interval(float(self.map(0.0)), float(self.map(1.0)))


@dataclass(frozen=True)
class IfsSystem:
    """An ordered family of branches with pairwise disjoint open images."""

    branches: tuple[Branch, ...]
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if len(self.branches) < 2:
            raise ValueError("a system needs at least 2 branches")
        images = [b.image for b in self.branches]
        order = sorted(range(len(images)), key=lambda i: images[i].lo)
        for a, b in zip(order, order[1:]):
            if images[b].lo < images[a].hi - 1e-12:
                raise ValueError(
                    f"open images of branches {a} and {b} overlap")
        self._check_diameter_decay()

    def _check_diameter_decay(self, depth: int = 8, samples: int = 128) -> None:
        # Sampled sanity check that cylinder diameters shrink with depth;
        # uniform decay is assumed, not certified.
        m = len(self.branches)
        d1 = max(b.image.diameter for b in self.branches)
        if m**depth <= 65536:
            lo, hi = _full_depth_endpoints(self, depth)
            widths = hi - lo
        else:
            rng = np.random.default_rng(0)
            words = rng.integers(0, m, size=(samples, depth))
            widths = _sampled_widths(self, words)[1]
        if float(np.max(widths)) >= d1:
            raise ValueError(
                f"system {self.name!r}: sampled cylinder diameters do not "
                f"decrease by depth {depth}")

    @property
    def m(self) -> int:
        return len(self.branches)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.m)

    @property
    def parabolic_symbols(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.branches) if b.parabolic)

    @property
    def has_parabolic(self) -> bool:
        return any(b.parabolic for b in self.branches)

    def apply(self, symbol: int, x):
        return self.branches[symbol].map(x)

    def apply_derivative(self, symbol: int, x):
        return self.branches[symbol].derivative(x)

    def apply_width(self, symbol: int, lo, width):
        return self.branches[symbol].image_width(lo, width)


def _full_depth_endpoints(system: IfsSystem, n: int):
    lo = np.array([float(b.map(0.0)) for b in system.branches])
    width = np.array([b.image.diameter for b in system.branches])
    for _ in range(n - 1):
        plo, pw = lo, width
        lo = np.concatenate(
            [np.asarray(b.map(plo)) for b in system.branches])
        width = np.concatenate(
            [np.asarray(b.image_width(plo, pw)) for b in system.branches])
    return lo, lo + width


def _sampled_widths(system: IfsSystem, words: np.ndarray):
    """Cylinder (lo, width) pairs for a (count, n) array of sampled words."""
    count = words.shape[0]
    lo = np.zeros(count)
    width = np.ones(count)
    for j in range(words.shape[1] - 1, -1, -1):
        for a in range(system.m):
            mask = words[:, j] == a
            if mask.any():
                width[mask] = system.apply_width(a, lo[mask], width[mask])
                lo[mask] = system.apply(a, lo[mask])
    return lo, width


# ---------------------------------------------------------------------------
# word-level operations
# ---------------------------------------------------------------------------

def _fold_cylinder(system: IfsSystem, w: Word) -> tuple[float, float]:
    """(lo, width) of the cylinder of ``w``, widths kept cancellation-free."""
    system.alphabet.validate_word(w)
    lo, width = 0.0, 1.0
    for s in reversed(tuple(w)):
        width = float(system.apply_width(s, lo, width))
        lo = float(system.apply(s, lo))
    return lo, width


def cylinder_interval(system: IfsSystem, w: Word) -> Interval:
    """The interval image of [0,1] under the branch composition of ``w``."""
    lo, width = _fold_cylinder(system, w)
    return Interval(lo, lo + width)


def lambda_n(system: IfsSystem, w: Word) -> float:
    """Depth-n contraction rate -(1/n) log diam of the cylinder of ``w``."""
    width = _fold_cylinder(system, w)[1]
    if width <= 0.0:
        raise DegenerateCylinderError(word_label(w))
    return -math.log(width) / len(w)


def g_eval(system: IfsSystem, w: Word) -> float:
    """Geometric potential of a word: branch log-derivative at the shifted point.

    The shifted projection is approximated by the midpoint of the suffix
    cylinder, so at least one suffix symbol is required.
    """
    if len(w) < 2:
        raise InsufficientDepthError(
            "geometric potential needs a word of length >= 2")
    suffix_mid = cylinder_interval(system, tuple(w)[1:]).midpoint
    return -math.log(float(system.apply_derivative(w[0], suffix_mid)))


def project(system: IfsSystem, w: Word) -> tuple[float, float]:
    """Projection estimate for any sequence starting with ``w``.

    Returns (midpoint, half-diameter) of the cylinder; every true projected
    point of the cylinder lies within the error of the midpoint.
    """
    lo, width = _fold_cylinder(system, w)
    return lo + 0.5 * width, 0.5 * width


# ---------------------------------------------------------------------------
# exhaustive cylinder tables
# ---------------------------------------------------------------------------

class CylinderTable:
    """All cylinder intervals of a system up to a given depth.

    Slot ``i`` at depth k holds the word whose base-m encoding is ``i`` with
    the first symbol most significant, i.e. lexicographic order.  Built by
    prepending symbols: the depth-k block for leading symbol a is the branch-a
    image of the whole depth-(k-1) table, so construction is O(m^depth)
    vectorized branch applications.  All downstream sums over these arrays use
    numpy's pairwise summation, so results are reproducible bit-for-bit.
    """

    def __init__(self, system: IfsSystem, depth: int,
                 cap: int = DEFAULT_WORD_CAP):
        if depth < 1:
            raise ValueError("table depth must be >= 1")
        system.alphabet.check_cap(depth, cap)
        self.system = system
        self.depth = depth
        self._lo = [np.array([float(b.map(0.0)) for b in system.branches])]
        self._width = [np.array([b.image.diameter for b in system.branches])]
        for _ in range(depth - 1):
            plo, pw = self._lo[-1], self._width[-1]
            self._width.append(np.concatenate(
                [np.asarray(b.image_width(plo, pw))
                 for b in system.branches]))
            self._lo.append(np.concatenate(
                [np.asarray(b.map(plo)) for b in system.branches]))

    @property
    def m(self) -> int:
        return self.system.m

    def lo(self, k: int) -> np.ndarray:
        return self._lo[k - 1]

    def hi(self, k: int) -> np.ndarray:
        return self._lo[k - 1] + self._width[k - 1]

    def mid(self, k: int) -> np.ndarray:
        return self._lo[k - 1] + 0.5 * self._width[k - 1]

    def diameters(self, k: int | None = None) -> np.ndarray:
        k = self.depth if k is None else k
        return self._width[k - 1]

    def max_diameter(self, k: int) -> float:
        return float(np.max(self.diameters(k)))

    def word(self, idx: int, k: int | None = None) -> Word:
        """Decode a slot index back into its word."""
        k = self.depth if k is None else k
        out = []
        for _ in range(k):
            out.append(idx % self.m)
            idx //= self.m
        return tuple(reversed(out))

    def index(self, w: Word) -> int:
        idx = 0
        for s in w:
            idx = idx * self.m + s
        return idx

    def words(self, k: int | None = None):
        """All words at depth k in slot order."""
        return self.system.alphabet.words(self.depth if k is None else k)

    # -- per-depth value arrays -------------------------------------------

    def value_arrays(self, func: Callable) -> list[np.ndarray]:
        """func applied to all cylinder midpoints, one array per depth."""
        return [np.asarray(func(self.mid(k)), dtype=float)
                for k in range(1, self.depth + 1)]

    def first_symbol_arrays(self, values: Sequence[float]) -> list[np.ndarray]:
        """Per-depth arrays of a function that depends on the first symbol only."""
        v = np.asarray(values, dtype=float)
        return [np.repeat(v, self.m ** (k - 1)) for k in range(1, self.depth + 1)]

    @cached_property
    def g_arrays(self) -> list[np.ndarray]:
        """Geometric-potential values per depth.

        Depth-k slot a*m^(k-1)+j evaluates branch a's log-derivative at the
        midpoint of the depth-(k-1) suffix cylinder j; at depth 1 the suffix
        cylinder is all of [0,1] and the midpoint 0.5 is used.
        """
        sys_ = self.system
        out = [np.array([-math.log(float(b.derivative(0.5)))
                         for b in sys_.branches])]
        for k in range(2, self.depth + 1):
            pm = self.mid(k - 1)
            out.append(np.concatenate(
                [-np.log(np.asarray(b.derivative(pm), dtype=float))
                 for b in sys_.branches]))
        return out

    def g_oscillation(self, k: int) -> float:
        """Max oscillation of any branch log-derivative over depth-(k-1) cylinders.

        Endpoint differences are exact for monotone branch derivatives (true
        for every shipped family); this is the declared error bound of the
        geometric potential at word length k.
        """
        if k == 1:
            los = np.zeros(1)
            his = np.ones(1)
        else:
            los, his = self.lo(k - 1), self.hi(k - 1)
        worst = 0.0
        for b in self.system.branches:
            dlo = np.log(np.asarray(b.derivative(los), dtype=float))
            dhi = np.log(np.asarray(b.derivative(his), dtype=float))
            worst = max(worst, float(np.max(np.abs(dhi - dlo))))
        return worst

    def birkhoff(self, values: list[np.ndarray]) -> np.ndarray:
        """Birkhoff sums over all depth-n words from per-depth value arrays.

        S_k(w) = v_k(w) + S_{k-1}(suffix of w); with the lexicographic slot
        encoding the suffix array is just the depth-(k-1) array tiled m times.
        """
        s = values[0]
        for k in range(2, self.depth + 1):
            s = values[k - 1] + np.tile(s, self.m)
        return s

    @cached_property
    def birkhoff_g(self) -> np.ndarray:
        return self.birkhoff(self.g_arrays)

    @cached_property
    def log_diameters(self) -> np.ndarray:
        d = self.diameters()
        if np.any(d <= 0.0):
            idx = int(np.argmax(d <= 0.0))
            raise DegenerateCylinderError(word_label(self.word(idx)))
        return np.log(d)

    @cached_property
    def lambda_array(self) -> np.ndarray:
        """lambda_n over all depth-n words."""
        return -self.log_diameters / self.depth

    @cached_property
    def lemma1_gap_value(self) -> float:
        """Exhaustive sup over depth-n words of |lambda_n - A_n g|."""
        return float(np.max(np.abs(self.lambda_array -
                                   self.birkhoff_g / self.depth)))


def lemma1_gap(system: IfsSystem, n: int, sample: int | None = None,
               seed: int = 0, cap: int = DEFAULT_WORD_CAP) -> float:
    """Sup over depth-n words of |lambda_n(w) - A_n g(w)|.

    ``sample=None`` enumerates all m^n words (cap-guarded) and returns the
    true word-level sup; otherwise that many pseudo-random words are drawn
    with the fixed seed.  Vanishes identically for linear systems and decays
    with n when branch derivatives are continuous.
    """
    if sample is None:
        return CylinderTable(system, n, cap).lemma1_gap_value
    rng = np.random.default_rng(seed)
    words = rng.integers(0, system.m, size=(sample, n))
    lo = np.zeros(sample)
    width = np.ones(sample)
    gsum = np.zeros(sample)
    # fold suffixes from the right; before applying symbol w_j the current
    # interval is the suffix cylinder needed by the geometric potential
    for j in range(n - 1, -1, -1):
        mid = lo + 0.5 * width
        for a in range(system.m):
            mask = words[:, j] == a
            if mask.any():
                gsum[mask] += -np.log(np.asarray(
                    system.apply_derivative(a, mid[mask]), dtype=float))
                width[mask] = system.apply_width(a, lo[mask], width[mask])
                lo[mask] = system.apply(a, lo[mask])
    if np.any(width <= 0.0):
        bad = int(np.argmax(width <= 0.0))
        raise DegenerateCylinderError(word_label(tuple(words[bad])))
    lam = -np.log(width) / n
    return float(np.max(np.abs(lam - gsum / n)))


def geometric_potential(system: IfsSystem, depth: int,
                        cap: int = DEFAULT_WORD_CAP) -> WordFunction:
    """The geometric potential as a word function with declared error bounds.

    Words of length 1 are evaluated at the midpoint of [0,1] (the suffix
    cylinder of an empty suffix); error bounds come from branch-derivative
    oscillations over suffix cylinders enumerated up to ``depth``.
    """
    table = CylinderTable(system, depth, cap)
    bounds = [table.g_oscillation(k) for k in range(1, depth + 1)]

    def evaluate(w: Word) -> float:
        if len(w) == 1:
            point = 0.5
        else:
            point = cylinder_interval(system, tuple(w)[1:]).midpoint
        return -math.log(float(system.apply_derivative(w[0], point)))

    def error_bound(k: int) -> float:
        if not 1 <= k <= depth:
            raise ValueError(f"error bound enumerated only up to depth {depth}")
        return bounds[k - 1]

    return WordFunction(evaluate=evaluate, error_bound=error_bound,
                        name=f"g[{system.name}]")


# ---------------------------------------------------------------------------
# shipped system constructors
# ---------------------------------------------------------------------------

def linear_system(ratios: Sequence[float],
                  offsets: Sequence[float] | None = None) -> IfsSystem:
    """Affine branches x -> o_i + r_i x, stacked left to right by default."""
    ratios = [float(r) for r in ratios]
    if any(not 0.0 < r < 1.0 for r in ratios):
        raise ValueError("linear ratios must lie in (0, 1)")
    if offsets is None:
        offsets = np.concatenate([[0.0], np.cumsum(ratios)[:-1]]).tolist()
    else:
        offsets = [float(o) for o in offsets]
        if len(offsets) != len(ratios):
            raise ValueError("offsets and ratios must have the same length")
    if offsets[-1] + ratios[-1] > 1.0 + 1e-12:
        raise ValueError("branch images must fit inside [0,1]")

    def make(r, o, i):
        return Branch(
            map=lambda x, r=r, o=o: o + r * np.asarray(x, dtype=float),
            derivative=lambda x, r=r: np.full_like(
                np.asarray(x, dtype=float), r),
            map_width=lambda lo, width, r=r: r * width,
            label=f"affine{i}",
        )

    branches = tuple(make(r, o, i)
                     for i, (r, o) in enumerate(zip(ratios, offsets)))
    return IfsSystem(branches=branches, name="linear",
                     params={"ratios": ratios, "offsets": offsets})


def example2_system() -> IfsSystem:
    """Inverse branches of x/(1-x) on [0,1/2] and (2x-1)/x on (1/2,1].

    Both branches are parabolic: the left at 0, the right at 1.  The branch
    images tile [0,1].
    """

    def s1(y):
        y = np.asarray(y, dtype=float)
        return y / (1.0 + y)

    def s1d(y):
        y = np.asarray(y, dtype=float)
        return 1.0 / (1.0 + y) ** 2

    def s1w(lo, width):
        # s1(lo+w) - s1(lo) = w / ((1+lo)(1+lo+w)), exact difference form
        lo = np.asarray(lo, dtype=float)
        return width / ((1.0 + lo) * (1.0 + lo + width))

    def s2(y):
        y = np.asarray(y, dtype=float)
        return 1.0 / (2.0 - y)

    def s2d(y):
        y = np.asarray(y, dtype=float)
        return 1.0 / (2.0 - y) ** 2

    def s2w(lo, width):
        # s2(lo+w) - s2(lo) = w / ((2-lo)(2-lo-w))
        lo = np.asarray(lo, dtype=float)
        return width / ((2.0 - lo) * (2.0 - lo - width))

    branches = (
        Branch(map=s1, derivative=s1d, parabolic=True, fixed_point=0.0,
               map_width=s1w, label="left"),
        Branch(map=s2, derivative=s2d, parabolic=True, fixed_point=1.0,
               map_width=s2w, label="right"),
    )
    return IfsSystem(branches=branches, name="example2")


def manneville_pomeau_system(beta: float) -> IfsSystem:
    """Inverse branches of x + x^(1+beta) mod 1 on [0,1].

    The forward map is piecewise onto with branch domains split where
    x + x^(1+beta) crosses 1 (found once by root finding); the left inverse
    branch is parabolic at 0.  Inverse values are computed by bisection
    bracketing plus a Newton polish on the monotone forward map.
    """
    if not 0.0 < beta:
        raise ValueError("beta must be positive")
    cut = brentq(lambda x: x + x ** (1.0 + beta) - 1.0, 0.0, 1.0,
                 xtol=1e-15, rtol=8.9e-16)

    def forward(x):
        return x + x ** (1.0 + beta)

    def forward_derivative(x):
        return 1.0 + (1.0 + beta) * np.asarray(x, dtype=float) ** beta

    def invert(y, lo, hi, offset):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        target = y + offset
        a = np.full(y.shape, lo)
        b = np.full(y.shape, hi)
        for _ in range(45):
            midp = 0.5 * (a + b)
            low = forward(midp) < target
            a = np.where(low, midp, a)
            b = np.where(low, b, midp)
        x = 0.5 * (a + b)
        for _ in range(3):
            x = np.clip(x - (forward(x) - target) / forward_derivative(x),
                        lo, hi)
        return x[0] if scalar else x

    def left(y):
        return invert(y, 0.0, cut, 0.0)

    def left_derivative(y):
        return 1.0 / forward_derivative(left(y))

    def right(y):
        return invert(y, cut, 1.0, 1.0)

    def right_derivative(y):
        return 1.0 / forward_derivative(right(y))

    branches = (
        Branch(map=left, derivative=left_derivative, parabolic=True,
               fixed_point=0.0, label="left"),
        Branch(map=right, derivative=right_derivative, label="right"),
    )
    return IfsSystem(branches=branches, name="manneville_pomeau",
                     params={"beta": float(beta), "cut": float(cut)})
