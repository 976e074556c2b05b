"""Weight constructions: every recipe produces |w*| on the grid plus, when
the log-modulus is integrable, the analytic outer function behind it.

A weight whose prescribed modulus fails log-integrability (the recipe
target vanishes too hard) cannot be completed to an analytic outer
function; with ``strict=False`` the recipe still returns the boundary
modulus with flat phase, which is all the measure-level diagnostics ever
read: the singular values of the weighted composition operator depend on
|w*| only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import BoundaryGrid, BoundarySamples, quadrature
from .outer import OuterFunction, hilbert_transform, log_divergence_flag
from .symbols import LevelSets, Symbol, level_sets
from .carleson import (
    PullbackMeasure,
    _box_indices,
    _corona_levels,
    _tail_exponent,
    pullback,
)

__all__ = [
    "Weight",
    "WeightError",
    "CompactifySchedule",
    "StaircaseSeries",
    "BoxSelection",
    "unit_weight",
    "hs_weight",
    "power_weight",
    "default_gauge",
    "compactify_weight",
    "staircase_weight",
    "stretched_staircase_delta",
    "eps_staircase_delta",
    "lens_decompact_weight",
    "box_decompact_weight",
    "parse_weight",
]

# Deep-approach threshold for the ||phi||_inf = 1 proxy: the co-modulus must
# drop below this along a dyadic angle ladder toward a contact point.
NORM_ONE_CO_THRESHOLD = 1e-6
# A reported series counts as converging when its last term is below this
# fraction of the total, or its terms decay with a fitted power beyond the
# summability threshold (quadratic-tail series like sum 1/k^2 keep a last
# term above 1% at desk-scale truncations).
SERIES_TOL = 0.01
SERIES_TAIL_EXPONENT = 1.25


def _series_converges(terms: np.ndarray) -> bool:
    total = float(np.sum(terms))
    if total == 0.0:
        return True
    if terms[-1] <= SERIES_TOL * total:
        return True
    s = _tail_exponent(np.arange(1, len(terms) + 1), np.asarray(terms))
    return s is not None and s > SERIES_TAIL_EXPONENT


class WeightError(ValueError):
    """A weight recipe's precondition failed."""


@dataclass(frozen=True)
class Weight:
    """Boundary data of a weight: exact modulus target plus analytic trace."""

    name: str
    modulus: BoundarySamples
    trace: BoundarySamples
    log_divergent: bool = False
    outer: Optional[OuterFunction] = None

    @property
    def grid(self) -> BoundaryGrid:
        return self.modulus.grid

    def density(self) -> np.ndarray:
        """|w*|^2, the boundary density seen by the pull-back measure."""
        return np.asarray(self.modulus.values, dtype=float) ** 2

    def h2_norm_sq(self) -> float:
        return float(np.mean(self.density()))


def _finish(name: str, grid: BoundaryGrid, modulus: np.ndarray,
            log_modulus: np.ndarray, strict: bool) -> Weight:
    divergent = log_divergence_flag(log_modulus)
    if divergent and strict:
        raise WeightError(f"{name}: divergent log-integral")
    if divergent:
        trace = modulus.astype(complex)
        outer = None
    else:
        outer = OuterFunction(grid, log_modulus)
        trace = np.exp(log_modulus + 1j * hilbert_transform(log_modulus))
    return Weight(
        name=name,
        modulus=grid.samples(modulus),
        trace=grid.samples(trace),
        log_divergent=divergent,
        outer=outer,
    )


def _co_modulus_on(phi, grid: BoundaryGrid) -> np.ndarray:
    """1 - |phi*| on the grid, cancellation-free when phi is a Symbol."""
    if isinstance(phi, Symbol):
        return np.asarray(phi.co_modulus_of_angle(grid.signed_angles()))
    return 1.0 - np.asarray(phi.values, dtype=float)


def unit_weight(grid: BoundaryGrid) -> Weight:
    return _finish("unit", grid, np.ones(grid.size), np.zeros(grid.size),
                   strict=True)


def hs_weight(phi, grid: BoundaryGrid | None = None, strict: bool = True) -> Weight:
    """Outer weight with |w*|^2 = 1 - |phi*| pointwise at the grid angles.

    ``phi`` is a catalog symbol or modulus samples (then ``grid`` is taken
    from them).  Raises "divergent log-integral" when log(1 - |phi*|) fails
    the integrability check, unless ``strict=False``.
    """
    if grid is None:
        if isinstance(phi, Symbol):
            raise ValueError("grid required when phi is a Symbol")
        grid = phi.grid
    co = _co_modulus_on(phi, grid)
    with np.errstate(divide="ignore"):
        log_modulus = 0.5 * np.log(co)
    return _finish("hs", grid, np.sqrt(co), log_modulus, strict)


def default_gauge(k_floor: float = 2.0) -> Callable:
    """Nondecreasing gauge g(t) = max(k_floor, log log(e^2/(1-t))) -> inf."""

    def gauge(t):
        t = np.asarray(t, dtype=float)
        inner = np.maximum(1.0 - t, 1e-300)
        return np.maximum(k_floor, np.log(2.0 + np.log(1.0 / inner)))

    return gauge


def power_weight(phi, grid: BoundaryGrid | None = None, exponent=2.0,
                 strict: bool = True) -> Weight:
    """Weight with |w*| = (1 - |phi*|)^K, or gauge form (1-|phi*|)^{g(|phi*|)}.

    ``exponent`` is a constant K >= 0 (K = 0 passes the unit weight
    through) or a nondecreasing gauge callable evaluated at the modulus.
    """
    if grid is None:
        if isinstance(phi, Symbol):
            raise ValueError("grid required when phi is a Symbol")
        grid = phi.grid
    co = _co_modulus_on(phi, grid)
    if callable(exponent):
        expo = np.asarray(exponent(1.0 - co), dtype=float)
        if np.any(expo < 1.0):
            raise WeightError("gauge values must be >= 1")
        name = "gauge"
    else:
        expo = float(exponent)
        if expo < 0:
            raise WeightError("power exponent must be >= 0")
        if expo == 0.0:
            return unit_weight(grid)
        name = f"power:{expo:g}"
    with np.errstate(divide="ignore", invalid="ignore"):
        modulus = co**expo
        log_modulus = expo * np.log(co)
    log_modulus = np.where(np.isnan(log_modulus), -np.inf, log_modulus)
    return _finish(name, grid, modulus, log_modulus, strict)


@dataclass(frozen=True)
class CompactifySchedule:
    """Chosen levels k_n and the reported series sum c_{k_n} log n."""

    ks: np.ndarray
    terms: np.ndarray
    partial_sums: np.ndarray
    cauchy: bool

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1]) if len(self.partial_sums) else 0.0


def compactify_weight(levels: LevelSets, n_max: int = 64):
    """Weight with |w*| = prod over n of (1/n on F_{k_n}, 1 elsewhere).

    The schedule k_n = min{k : c_k <= 2^-n} forces sum c_{k_n} log n <=
    sum 2^-n log n, so the reported series is summable by construction.
    Returns (weight, schedule).
    """
    c = levels.masses
    k_available = np.arange(len(c))
    ks, terms = [], []
    for n in range(1, n_max + 1):
        ok = k_available[(c <= 2.0**-n) & (k_available >= 1)]
        if len(ok) == 0:
            if n == 1:
                raise WeightError(
                    "not compactifiable at this resolution: no level set "
                    "with mass <= 1/2"
                )
            break
        k_n = int(ok[0])
        ks.append(k_n)
        terms.append(float(c[k_n]) * np.log(n))
    ks_arr = np.array(ks, dtype=np.int64)
    terms_arr = np.array(terms)
    partial = np.cumsum(terms_arr) if len(terms_arr) else np.zeros(0)
    cauchy = _series_converges(terms_arr) if len(terms_arr) else True

    # log|w*| per sample: sum of -log n over schedule entries with k_n <= level
    log_steps = np.zeros(levels.k_max + 1)
    for n, k_n in enumerate(ks_arr, start=1):
        log_steps[k_n] -= np.log(n)
    cumulative = np.cumsum(log_steps)
    log_modulus = cumulative[levels.level_index]
    weight = _finish("compactify", levels.grid, np.exp(log_modulus),
                     log_modulus, strict=True)
    schedule = CompactifySchedule(ks=ks_arr, terms=terms_arr,
                                  partial_sums=partial, cauchy=cauchy)
    return weight, schedule


@dataclass(frozen=True)
class StaircaseSeries:
    """Reported series sum_k c_k log(1/delta_k) for a staircase weight."""

    terms: np.ndarray
    partial_sums: np.ndarray
    cauchy: bool

    @property
    def total(self) -> float:
        return float(self.partial_sums[-1])


def _monotone_from_tail(delta: np.ndarray) -> np.ndarray:
    """Smallest nonincreasing majorant: flattens the early hump of a
    schedule whose raw formula only decreases eventually, leaving the tail
    (which carries the decay rate) untouched."""
    return np.maximum.accumulate(delta[::-1])[::-1]


def stretched_staircase_delta(beta: float, k_max: int) -> np.ndarray:
    """Staircase schedule delta_k = exp(-2^{k/beta}/k^2), k = 1..k_max.

    The raw formula is not monotone for small k (the k^2 factor wins until
    2^{k/beta} takes over); it is replaced by its smallest nonincreasing
    majorant, identical from the hump on.
    """
    k = np.arange(1, k_max + 1, dtype=float)
    return _monotone_from_tail(np.exp(-(2.0 ** (k / beta)) / k**2))


def eps_staircase_delta(k_max: int, eps_fn: Callable | None = None) -> np.ndarray:
    """Schedule delta_k = exp(-2^{k/3} eps(2^k)); default eps(n) = 1/log(n)^2.

    Monotonized from the tail like the stretched schedule.
    """
    if eps_fn is None:
        eps_fn = lambda n: 1.0 / np.log(n) ** 2
    k = np.arange(1, k_max + 1, dtype=float)
    return _monotone_from_tail(np.exp(-(2.0 ** (k / 3.0)) * eps_fn(2.0**k)))


def staircase_weight(levels: LevelSets, delta: Sequence[float]):
    """Weight with log|w*| = sum_k log(delta_k) on F_k; returns (weight, series).

    Requires delta in (0, 1] and the series sum c_k log(1/delta_k)
    converging over the available range ("divergent staircase" otherwise).
    """
    d = np.asarray(delta, dtype=float)
    if np.any(d <= 0) or np.any(d > 1):
        raise WeightError("staircase deltas must lie in (0, 1]")
    k_count = min(len(d), levels.k_max)
    c = levels.masses[1 : k_count + 1]
    terms = c * np.log(1.0 / d[:k_count])
    partial = np.cumsum(terms)
    cauchy = _series_converges(terms)
    if not cauchy:
        raise WeightError("divergent staircase")
    log_delta = np.concatenate([[0.0], np.log(d[:k_count]),
                                np.zeros(levels.k_max - k_count)])
    cumulative = np.cumsum(log_delta)
    log_modulus = cumulative[np.minimum(levels.level_index, levels.k_max)]
    weight = _finish("staircase", levels.grid, np.exp(log_modulus),
                     log_modulus, strict=True)
    return weight, StaircaseSeries(terms=terms, partial_sums=partial,
                                   cauchy=cauchy)


def lens_decompact_weight(theta: float, grid: BoundaryGrid) -> Weight:
    """Closed-form weight w = (1 - lambda_theta)^a with a = (1 - 1/theta)/2.

    The negative power amplifies mass near the contact point exactly hard
    enough to keep the pull-back measure Carleson but not vanishing; a is
    chosen so 2 a theta = theta - 1 > -1, hence w is in H^2.
    """
    from .symbols import lens  # local import to keep module load light

    if not 0.0 < theta < 1.0:
        raise ValueError("theta must be in (0, 1)")
    a = 0.5 * (1.0 - 1.0 / theta)
    lam = lens(theta).trace(grid).values
    base = 1.0 - lam
    trace = base**a
    modulus = np.abs(base) ** a
    log_modulus = a * np.log(np.abs(base))
    return Weight(
        name=f"lensdecomp:{theta:g}",
        modulus=grid.samples(modulus),
        trace=grid.samples(trace),
        log_divergent=False,
        outer=None,
    )


@dataclass(frozen=True)
class BoxSelection:
    """Boxes chosen by the box-indicator decompactifying weight."""

    ks: np.ndarray
    box_index: np.ndarray
    centers: np.ndarray
    box_masses: np.ndarray
    u: np.ndarray

    @property
    def added_mass(self) -> float:
        return float(np.sum(2.0 ** -self.ks.astype(float)))


def box_decompact_weight(phi: Symbol, grid: BoundaryGrid):
    """Weight with |w*|^2 = 1 + sum_n 2^{-k_n}/m(box_n) on the box preimages.

    Levels k_n run over the dyadic coronas that hold at least one pull-back
    atom; within each corona the heaviest of the 2^{k_n} aligned boxes is
    taken.  The construction pins nu(W(center_n, 2^{-k_n})) >= 2^{-k_n}, so
    the resulting measure cannot be vanishing Carleson, while the added
    boundary mass sum 2^{-k_n} <= 1 keeps it Carleson.

    Requires the symbol to reach the boundary: the co-modulus must drop
    below the deep-approach threshold along a dyadic ladder toward a
    contact angle ("norm below one" otherwise).  Returns (weight, boxes).
    """
    ladder = 2.0 ** -np.arange(3, 51, dtype=float)
    if phi.singular_angles:
        probes = np.concatenate([a + ladder for a in phi.singular_angles])
    else:
        probes = np.linspace(-np.pi, np.pi, 4097)[1:]
    co_min = float(np.min(phi.co_modulus_of_angle(probes)))
    if co_min > NORM_ONE_CO_THRESHOLD:
        raise WeightError("norm below one: symbol does not reach the boundary")

    trace = phi.trace(grid)
    mu = pullback(trace, 1.0)
    lev = _corona_levels(mu)
    cap = int(np.log2(grid.size)) - 2
    ks, idxs, centers, box_masses = [], [], [], []
    u = np.ones(grid.size)
    for k in range(1, cap + 1):
        sel = np.flatnonzero(lev == k)
        if sel.size == 0:
            continue
        boxes = _box_indices(mu.angles[sel], k)
        masses = np.bincount(boxes, weights=mu.masses[sel], minlength=1 << k)
        j = int(np.argmax(masses))
        mass = float(masses[j])
        members = sel[boxes == j]
        u[members] += 2.0**-k / mass
        ks.append(k)
        idxs.append(j)
        centers.append(np.exp(2j * np.pi * j / (1 << k)))
        box_masses.append(mass)
    if not ks:
        raise WeightError("norm below one: no corona holds an atom")

    log_modulus = 0.5 * np.log(u)
    weight = _finish("boxdecomp", grid, np.sqrt(u), log_modulus, strict=True)
    boxes = BoxSelection(
        ks=np.array(ks, dtype=np.int64),
        box_index=np.array(idxs, dtype=np.int64),
        centers=np.array(centers, dtype=complex),
        box_masses=np.array(box_masses),
        u=u,
    )
    return weight, boxes


def parse_weight(spec: str, phi: Symbol, grid: BoundaryGrid,
                 strict: bool = True):
    """Build a recipe weight from its CLI name.

    Accepted forms: ``unit``, ``hs``, ``power:K``, ``gauge``,
    ``compactify``, ``staircase:default``, ``staircase:<csv-file>``,
    ``lensdecomp``, ``boxdecomp``.  Recipes that also produce a report
    object return only the weight here.
    """
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "unit":
        return unit_weight(grid)
    if name == "hs":
        return hs_weight(phi, grid, strict=strict)
    if name == "power":
        return power_weight(phi, grid, float(arg), strict=strict)
    if name == "gauge":
        return power_weight(phi, grid, default_gauge(), strict=strict)
    if name == "compactify":
        return compactify_weight(level_sets(phi, grid))[0]
    if name == "staircase":
        levels = level_sets(phi, grid)
        if arg in ("", "default"):
            if phi.kind != "betaexp":
                raise WeightError(
                    "staircase:default needs a betaexp symbol; pass a delta file"
                )
            delta = stretched_staircase_delta(phi.params[0], levels.k_max)
        else:
            delta = np.loadtxt(arg, delimiter=",", dtype=float, ndmin=1)
        return staircase_weight(levels, delta)[0]
    if name == "lensdecomp":
        if phi.kind != "lens":
            raise WeightError("lensdecomp needs a lens symbol")
        return lens_decompact_weight(phi.params[0], grid)
    if name == "boxdecomp":
        return box_decompact_weight(phi, grid)[0]
    raise ValueError(f"unknown weight spec {spec!r}")
