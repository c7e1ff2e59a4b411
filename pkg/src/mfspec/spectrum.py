"""Dimension estimators for Birkhoff-average level sets of an interval IFS.

Two routes are combined per level value alpha:

* a variational lower route: maximize block entropy over expected log
  cylinder length among depth-n block measures whose mean potential sum is
  n * alpha.  The maximizer of the linearized objective is an exponential
  family in (log-diameter, potential sum), so the inner problem is a 1-D
  monotone root find and the outer fractional program is a bisection on the
  ratio (Dinkelbach scheme).  The returned value is the entropy/length ratio
  of an explicitly constructed feasible measure, hence a certified
  finite-depth value, with the depth-n contraction-rate gap attached.

* a cover upper route: the Moran exponent of the depth-n cylinders whose
  word average falls inside the alpha window, widened to the resolution the
  window actually certifies (twice the window plus the word-approximation
  slack).

Systems with indifferent fixed points get special dispatch: on the interval
spanned by the potential values at those fixed points, the level-set
dimension equals the attractor dimension, so both routes are replaced by the
unfiltered Moran estimate and the point is flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (AlphaUnreachableError, InfeasibleAlphaError,
                     InvalidScheduleError, MfspecError, NoCylindersError,
                     NotContractingError, SolverError)
from .geometry import CylinderTable, IfsSystem, Interval
from .potentials import PotentialSpec, potential_arrays, variation_slack
from .symbolic import DEFAULT_WORD_CAP, BlockMeasure, Word

_Q_EXP_LIMIT = 700.0
_TIE_TOL = 1e-9
_SCHEDULE_TOL = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    """Knobs shared by the depth-n estimators.

    ``rho`` is the alpha-window half-width for the cover route (None picks
    max(0.05, twice the word-approximation slack)).  ``delta`` is the
    Lyapunov floor excluding words with lambda_n below it (None means no
    floor, except that parabolic systems apply a small default floor to the
    cover route outside the flagged interval).
    """

    n: int = 10
    rho: float | None = None
    delta: float | None = None
    t_tol: float = 1e-8
    alpha_tol: float = 1e-9
    moran_tol: float = 1e-10
    boundary_tol: float = 1e-9
    max_iter: int = 200
    word_cap: int = DEFAULT_WORD_CAP
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("solver depth n must be >= 2")
        for name in ("t_tol", "alpha_tol", "moran_tol", "boundary_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.rho is not None and self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.delta is not None and self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class LowerBoundResult:
    """Certified feasible value of the depth-n variational problem."""

    dim: float
    t: float
    q: float | None
    alpha_achieved: float
    lyapunov: float
    entropy_rate: float
    iterations: int
    n: int
    boundary: bool
    lemma1_gap: float
    measure: BlockMeasure


@dataclass(frozen=True)
class UpperBoundResult:
    """Moran exponent of the windowed depth-n cylinder cover."""

    s_n: float
    cover_size: int
    half_width: float
    rho: float
    delta: float
    n: int


@dataclass(frozen=True)
class SpectrumPoint:
    """One row of a spectrum table."""

    alpha: float
    lower: float | None
    upper: float | None
    in_parabolic_interval: bool
    n: int
    rho: float | None = None
    delta: float | None = None
    lemma1_gap: float | None = None
    iterations: int | None = None
    t: float | None = None
    q: float | None = None
    cover_size: int | None = None
    error: str | None = None


@dataclass(frozen=True)
class SamplerCheckpoint:
    """Birkhoff diagnostics at the end of one alternating stage."""

    stage: int
    n: int
    f_average: float
    g_average: float
    k: int
    eps: float


# ---------------------------------------------------------------------------
# Moran cover exponent
# ---------------------------------------------------------------------------

def _moran_root(diameters: np.ndarray, tol: float) -> float:
    """Unique s >= 0 with sum diameters^s = 1, by bisection.

    The map is strictly decreasing for diameters < 1; a single cylinder
    forces s = 0.
    """
    d = np.asarray(diameters, dtype=float)
    if d.size == 0:
        raise NoCylindersError("no cylinders to cover with")
    if float(np.max(d)) >= 1.0:
        raise NotContractingError(
            "some cylinder diameter is >= 1; increase the depth n")
    if d.size == 1:
        return 0.0
    logd = np.log(d)

    def total(s: float) -> float:
        return float(np.exp(s * logd).sum())

    hi = 1.0
    while total(hi) > 1.0:
        hi *= 2.0
        if hi > 2.0**40:
            raise SolverError("Moran bisection failed to bracket a root")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if total(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def moran_dimension(system: IfsSystem, n: int,
                    word_filter: Callable[[Word], bool] | None = None,
                    cap: int = DEFAULT_WORD_CAP, tol: float = 1e-10) -> float:
    """Moran exponent of the depth-n cylinders passing ``word_filter``.

    With no filter this estimates the attractor dimension.
    """
    table = CylinderTable(system, n, cap)
    d = table.diameters()
    if word_filter is not None:
        keep = np.fromiter((bool(word_filter(w)) for w in table.words()),
                           dtype=bool, count=d.size)
        d = d[keep]
    return _moran_root(d, tol)


# ---------------------------------------------------------------------------
# shared depth-n arrays
# ---------------------------------------------------------------------------

class DepthContext:
    """Exhaustive depth-n arrays shared by both estimator routes."""

    def __init__(self, system: IfsSystem, potential: PotentialSpec,
                 opts: SolverOptions | None = None,
                 table: CylinderTable | None = None):
        self.opts = opts or SolverOptions()
        self.system = system
        self.potential = potential
        self.n = self.opts.n
        if table is not None and table.depth == self.n:
            self.table = table
        else:
            self.table = CylinderTable(system, self.n, self.opts.word_cap)
        self.phi = self.table.birkhoff(potential_arrays(self.table, potential))
        self.averages = self.phi / self.n
        self.slack = variation_slack(self.table, potential)

    @cached_property
    def ell(self) -> np.ndarray:
        return -self.table.log_diameters

    @cached_property
    def lam(self) -> np.ndarray:
        return self.table.lambda_array

    @cached_property
    def lemma1_gap(self) -> float:
        return self.table.lemma1_gap_value

    @cached_property
    def attractor_dimension(self) -> float:
        return _moran_root(self.table.diameters(), self.opts.moran_tol)

    @property
    def rho(self) -> float:
        if self.opts.rho is not None:
            return self.opts.rho
        return max(0.05, 2.0 * self.slack)

    def delta_mask(self, delta: float) -> np.ndarray | None:
        if delta <= 0.0:
            return None
        return self.lam >= delta


# ---------------------------------------------------------------------------
# parabolic dispatch interval
# ---------------------------------------------------------------------------

def parabolic_interval(system: IfsSystem,
                       potential: PotentialSpec) -> Interval | None:
    """Potential-value span of the indifferent fixed points, or None.

    On this interval the level-set dimension equals the attractor dimension;
    a system with no parabolic branch returns None and the spectrum dispatch
    never takes the flagged path.
    """
    symbols = system.parabolic_symbols
    if not symbols:
        return None
    vals = [potential.fixed_point_value(system, s) for s in symbols]
    return Interval(min(vals), max(vals))


# ---------------------------------------------------------------------------
# cover upper route
# ---------------------------------------------------------------------------

def upper_bound(system: IfsSystem, potential: PotentialSpec, alpha: float,
                opts: SolverOptions | None = None,
                context: DepthContext | None = None) -> UpperBoundResult:
    """Moran exponent of the cylinders whose word average sits near alpha.

    The cover keeps words with |A_n f - alpha| below twice the window rho
    plus the word-approximation slack; that widened half-width is what a
    finite-depth window actually certifies about means over the covered
    cylinders, and is reported back.  A positive Lyapunov floor additionally
    drops words with lambda_n below it.
    """
    ctx = context or DepthContext(system, potential, opts)
    opts = ctx.opts
    rho = ctx.rho
    if rho <= ctx.slack:
        raise ValueError(
            f"window rho={rho:g} must exceed the word-approximation slack "
            f"{ctx.slack:g} at depth {ctx.n}")
    half = 2.0 * rho + ctx.slack
    delta = opts.delta if opts.delta is not None else 0.0
    dev = np.abs(ctx.averages - alpha)
    keep = dev < half
    if (mask := ctx.delta_mask(delta)) is not None:
        keep &= mask
    if not keep.any():
        lo = float(np.min(ctx.averages))
        hi = float(np.max(ctx.averages))
        raise AlphaUnreachableError(alpha, half, float(np.min(dev)), (lo, hi))
    s = _moran_root(ctx.table.diameters()[keep], opts.moran_tol)
    return UpperBoundResult(s_n=s, cover_size=int(keep.sum()), half_width=half,
                            rho=rho, delta=delta, n=ctx.n)


# ---------------------------------------------------------------------------
# variational lower route
# ---------------------------------------------------------------------------

def _gibbs_stats(ell, phi, t, q):
    """Normalized exponential-family stats for weights ~ exp(-t*ell + q*phi)."""
    a = -t * ell + q * phi
    shift = float(a.max())
    w = np.exp(a - shift)
    z = float(w.sum())
    p = w / z
    logz = shift + math.log(z)
    e_phi = float(p @ phi)
    e_ell = float(p @ ell)
    entropy = logz + t * e_ell - q * e_phi
    variance = float(p @ (phi - e_phi) ** 2)
    return p, entropy, e_ell, e_phi, variance


def _solve_q(ell, phi, t, target, tol, max_iter=80):
    """Find q with the Gibbs mean of phi equal to target (monotone in q).

    Newton steps with bisection fallback inside a maintained bracket; |q| is
    capped so the exponent stays within floating range, and an unreachable
    target simply clamps at the cap (caller checks the residual).
    """
    scale = max(float(np.max(np.abs(phi))), 1e-12)
    cap = _Q_EXP_LIMIT / scale
    lo, hi = -cap, cap
    stats = _gibbs_stats(ell, phi, t, lo)
    if target <= stats[3]:
        return lo, stats
    stats = _gibbs_stats(ell, phi, t, hi)
    if target >= stats[3]:
        return hi, stats
    q = 0.0
    for _ in range(max_iter):
        stats = _gibbs_stats(ell, phi, t, q)
        residual = stats[3] - target
        if abs(residual) <= tol:
            return q, stats
        if residual > 0:
            hi = q
        else:
            lo = q
        variance = stats[4]
        step = q - residual / variance if variance > 1e-300 else None
        if step is None or not lo < step < hi:
            step = 0.5 * (lo + hi)
        q = step
    return q, _gibbs_stats(ell, phi, t, q)


def lower_bound(system: IfsSystem, potential: PotentialSpec, alpha: float,
                opts: SolverOptions | None = None,
                context: DepthContext | None = None) -> LowerBoundResult:
    """Best entropy/length ratio over depth-n block measures with mean alpha.

    Outer bisection on the ratio t drives max H - t*L to zero over the
    constrained simplex; each inner problem is solved exactly by the
    exponential-family measure with the multiplier q tuned so the mean
    potential sum hits n * alpha.  At a boundary alpha the constraint forces
    support on the extreme words and the uniform measure over them is
    returned.  The result records the measure itself, so feasibility and the
    Gibbs form can be re-verified independently.
    """
    ctx = context or DepthContext(system, potential, opts)
    opts = ctx.opts
    n = ctx.n
    phi = ctx.phi
    ell = ctx.ell
    if float(np.min(ell)) <= 0.0:
        raise NotContractingError(
            "some cylinder diameter is >= 1; increase the depth n")
    delta = opts.delta if opts.delta is not None else 0.0
    if (mask := ctx.delta_mask(delta)) is not None:
        if not mask.any():
            raise NoCylindersError(
                f"Lyapunov floor {delta:g} excludes every word")
        phi = phi[mask]
        ell = ell[mask]
    target = n * alpha
    lo_avg = float(np.min(phi)) / n
    hi_avg = float(np.max(phi)) / n
    if alpha < lo_avg - opts.boundary_tol or alpha > hi_avg + opts.boundary_tol:
        raise InfeasibleAlphaError(alpha, (lo_avg, hi_avg))

    def finalize(p, entropy, e_ell, e_phi, t, q, iterations, boundary):
        words = ctx.table.words()
        if mask is not None:
            weights = {}
            j = 0
            for idx, w in enumerate(words):
                if mask[idx]:
                    weights[w] = float(p[j])
                    j += 1
        else:
            weights = {w: float(pi) for w, pi in zip(words, p.tolist())}
        measure = BlockMeasure(n=n, weights=weights)
        return LowerBoundResult(
            dim=entropy / e_ell, t=t, q=q, alpha_achieved=e_phi / n,
            lyapunov=e_ell / n, entropy_rate=entropy / n,
            iterations=iterations, n=n, boundary=boundary,
            lemma1_gap=ctx.lemma1_gap, measure=measure)

    if alpha >= hi_avg - opts.boundary_tol or alpha <= lo_avg + opts.boundary_tol:
        extreme = float(np.max(phi)) if alpha >= hi_avg - opts.boundary_tol \
            else float(np.min(phi))
        sel = np.abs(phi - extreme) <= _TIE_TOL
        count = int(sel.sum())
        p = np.where(sel, 1.0 / count, 0.0)
        entropy = math.log(count)
        e_ell = float(ell[sel].mean())
        e_phi = extreme
        return finalize(p, entropy, e_ell, e_phi, entropy / e_ell, None, 0,
                        boundary=True)

    q_tol = n * opts.alpha_tol * max(1.0, abs(alpha))
    t_lo = 0.0
    t_hi = math.log(phi.size) / float(np.min(ell)) + 1.0
    iterations = 0
    while t_hi - t_lo > opts.t_tol:
        iterations += 1
        if iterations > opts.max_iter:
            raise SolverError(
                f"ratio bisection did not reach {opts.t_tol:g} within "
                f"{opts.max_iter} iterations")
        t = 0.5 * (t_lo + t_hi)
        _, (_, entropy, e_ell, _, _) = _solve_q(ell, phi, t, target, q_tol)
        if entropy - t * e_ell > 0:
            t_lo = t
        else:
            t_hi = t
    t = 0.5 * (t_lo + t_hi)
    q, (p, entropy, e_ell, e_phi, _) = _solve_q(ell, phi, t, target, q_tol)
    if abs(e_phi - target) > 10.0 * q_tol:
        raise SolverError(
            f"constraint residual {abs(e_phi - target):g} after multiplier "
            f"capping; alpha={alpha:g} is too close to the achievable edge "
            f"[{lo_avg:.6g}, {hi_avg:.6g}] at depth {n}")
    return finalize(p, entropy, e_ell, e_phi, t, q, iterations,
                    boundary=False)


# ---------------------------------------------------------------------------
# spectrum sweep
# ---------------------------------------------------------------------------

def full_spectrum(system: IfsSystem, potential: PotentialSpec,
                  alphas: Iterable[float],
                  opts: SolverOptions | None = None,
                  workers: int = 1) -> list[SpectrumPoint]:
    """Lower and upper estimates for a grid of level values, sorted by alpha.

    Points inside the indifferent-fixed-point interval are flagged and get
    the unfiltered attractor estimate for both columns.  Estimator errors are
    per point: a failed point carries its message and the sweep continues.
    """
    ctx = DepthContext(system, potential, opts)
    opts = ctx.opts
    interval = parabolic_interval(system, potential)
    if opts.delta is None and system.has_parabolic:
        upper_delta = 1e-3 * math.log(system.m)
    else:
        upper_delta = opts.delta if opts.delta is not None else 0.0
    upper_opts = replace(opts, delta=upper_delta)
    upper_ctx = DepthContext(system, potential, upper_opts, table=ctx.table)
    if ctx.rho <= ctx.slack:
        # alpha-independent precondition; fail before sweeping
        raise ValueError(
            f"window rho={ctx.rho:g} must exceed the word-approximation "
            f"slack {ctx.slack:g} at depth {ctx.n}")

    def compute(alpha: float) -> SpectrumPoint:
        if interval is not None and interval.contains(alpha):
            s = ctx.attractor_dimension
            return SpectrumPoint(
                alpha=alpha, lower=s, upper=s, in_parabolic_interval=True,
                n=ctx.n, rho=ctx.rho, delta=0.0, lemma1_gap=ctx.lemma1_gap)
        lower = upper = None
        t = q = None
        iterations = cover = None
        errors = []
        try:
            lb = lower_bound(system, potential, alpha, context=ctx)
            lower, t, q, iterations = lb.dim, lb.t, lb.q, lb.iterations
        except MfspecError as exc:
            errors.append(f"lower: {exc}")
        try:
            ub = upper_bound(system, potential, alpha, context=upper_ctx)
            upper, cover = ub.s_n, ub.cover_size
        except MfspecError as exc:
            errors.append(f"upper: {exc}")
        return SpectrumPoint(
            alpha=alpha, lower=lower, upper=upper,
            in_parabolic_interval=False, n=ctx.n, rho=ctx.rho,
            delta=upper_delta, lemma1_gap=ctx.lemma1_gap,
            iterations=iterations, t=t, q=q, cover_size=cover,
            error="; ".join(errors) or None)

    grid = sorted(float(a) for a in alphas)
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(compute, grid))
    return [compute(a) for a in grid]


# ---------------------------------------------------------------------------
# alternating-block sampler
# ---------------------------------------------------------------------------

def alternating_sampler(system: IfsSystem, potential: PotentialSpec,
                        measure: BlockMeasure, symbol: int,
                        k_schedule: Sequence[int],
                        eps_schedule: Sequence[float], horizon: int,
                        seed: int = 0, eval_depth: int = 64
                        ) -> list[SamplerCheckpoint]:
    """Generate an alternating-block word and stream its Birkhoff averages.

    Stage i appends i symbols drawn from the Bernoulli extension of
    ``measure`` followed by i * k_i copies of the indifferent ``symbol``;
    a checkpoint is emitted after each stage with the running averages of
    the potential and of the geometric potential.  As the parabolic blocks
    dominate, the potential average should approach the potential value at
    the indifferent fixed point while the geometric average decays to 0.

    The finite schedule must have nondecreasing k_i and nonincreasing
    k_i * eps_i (the numeric stand-ins for k_i -> infinity, k_i eps_i -> 0).
    Suffixes during evaluation are truncated at ``eval_depth`` symbols; the
    truncation error is bounded by the potential oscillation over cylinders
    of that depth.
    """
    if symbol not in system.parabolic_symbols:
        raise ValueError(f"symbol {symbol} is not an indifferent branch")
    ks = [int(k) for k in k_schedule]
    eps = [float(e) for e in eps_schedule]
    if len(ks) != len(eps):
        raise InvalidScheduleError("k and eps schedules differ in length")
    if not ks:
        raise InvalidScheduleError("empty schedule")
    if any(k < 0 for k in ks) or any(e < 0 for e in eps):
        raise InvalidScheduleError("schedule entries must be nonnegative")
    if any(b < a for a, b in zip(ks, ks[1:])):
        raise InvalidScheduleError("k schedule must be nondecreasing")
    products = [k * e for k, e in zip(ks, eps)]
    if any(b > a + _SCHEDULE_TOL for a, b in zip(products, products[1:])):
        raise InvalidScheduleError(
            "k_i * eps_i must be nonincreasing within tolerance")

    rng = np.random.default_rng(seed)
    support = sorted(measure.support())
    weights = np.array([measure.weights[w] for w in support])
    weights = weights / weights.sum()
    block_len = measure.n

    chunks: list[np.ndarray] = []
    marks: list[tuple[int, int]] = []  # (stage, cumulative length)
    total = 0

    def emit_stage(i: int, k: int) -> int:
        draws = rng.choice(len(support), size=-(-i // block_len), p=weights)
        nu_part = np.concatenate([np.array(support[j]) for j in draws])[:i]
        chunks.append(nu_part.astype(np.int64))
        if k:
            chunks.append(np.full(i * k, symbol, dtype=np.int64))
        return i * (1 + k)

    stage = 0
    for i, k in enumerate(ks, start=1):
        if total + i * (1 + k) > horizon:
            break
        total += emit_stage(i, k)
        marks.append((i, total))
        stage = i
    if not marks:
        raise ValueError("horizon too small for even one stage")
    # continue the construction past the last checkpoint so every checkpoint
    # position is evaluated on a full-depth window, not a sequence-end stub
    while total < marks[-1][1] + eval_depth:
        stage += 1
        if stage <= len(ks):
            total += emit_stage(stage, ks[stage - 1])
        else:
            pad = marks[-1][1] + eval_depth - total
            chunks.append(np.full(pad, symbol, dtype=np.int64))
            total += pad
    seq = np.concatenate(chunks)

    mids = _window_midpoints(system, seq, min(eval_depth, len(seq)))
    if potential.word_local:
        vals = np.asarray(potential.symbol_values(system.m))
        f_terms = vals[seq]
    else:
        f_terms = np.asarray(potential.func(mids), dtype=float)
    shifted = np.append(mids[1:], 0.5)
    g_terms = np.empty(len(seq))
    for a in range(system.m):
        sel = seq == a
        if sel.any():
            g_terms[sel] = -np.log(np.asarray(
                system.apply_derivative(a, shifted[sel]), dtype=float))
    f_cum = np.cumsum(f_terms)
    g_cum = np.cumsum(g_terms)
    return [
        SamplerCheckpoint(stage=i, n=nq, f_average=float(f_cum[nq - 1] / nq),
                          g_average=float(g_cum[nq - 1] / nq),
                          k=ks[i - 1], eps=eps[i - 1])
        for i, nq in marks
    ]


def _window_midpoints(system: IfsSystem, seq: np.ndarray,
                      depth: int) -> np.ndarray:
    """Midpoints of the cylinders of the length-``depth`` suffix windows.

    Entry k approximates the projection of the shifted sequence at position
    k; windows reaching past the end of ``seq`` are shortened.
    """
    size = len(seq)
    lo = np.zeros(size)
    width = np.ones(size)
    for j in range(depth, 0, -1):
        valid = size - j + 1
        sym = seq[j - 1:j - 1 + valid]
        cl = lo[:valid]
        cw = width[:valid]
        for a in range(system.m):
            sel = sym == a
            if sel.any():
                cw[sel] = system.apply_width(a, cl[sel], cw[sel])
                cl[sel] = system.apply(a, cl[sel])
    return lo + 0.5 * width
