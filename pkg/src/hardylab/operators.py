"""Truncated matrices of weighted composition operators and their spectra.

Two routes to the singular values:

* ``operator_matrix`` + ``singular_values``: the coefficient matrix of
  f -> w (f o phi) in the monomial basis, columns extracted from boundary
  products by FFT.  Faithful to the operator but doubly truncated; every
  experiment stamps it with a truncation study.
* ``embedding_spectrum``: the weighted composition operator has the same
  singular numbers as the embedding of H^2 into L^2 of the pull-back
  measure, whose Gram matrix against an atomic measure is the closed-form
  reproducing-kernel matrix sqrt(m_i m_j)/(1 - z_i conj(z_j)).  No row or
  column truncation at all; the only parameters are the atoms themselves.
  This is the route that resolves stretched-exponential decay at desk
  scale; its price is a noise floor at sqrt(eps) relative to the top
  singular value, since eigenvalues of the Gram are the squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .grid import BoundaryGrid, BoundarySamples, GridError, IntegralResult
from .carleson import CarlesonReport, PullbackMeasure

__all__ = [
    "OperatorMatrix",
    "SingularSpectrum",
    "DecayFit",
    "ColumnNorms",
    "TruncationStudy",
    "operator_matrix",
    "singular_values",
    "embedding_spectrum",
    "hs_norm_boundary",
    "moment_integral",
    "schatten_estimate",
    "column_pnorms",
    "decay_fit",
    "truncation_study",
]

# Divergence rule for quadrature-based integrals: flagged when nested
# sub-grid quadratures drift by more than 5% or the value explodes.
INTEGRAL_DRIFT_TOL = 0.05
INTEGRAL_MAGNITUDE_CAP = 1e6

# decay_fit defaults: skip the transient head, drop values at the noise
# floor, refuse fits with large log-log residual.
FIT_SKIP = 8
FIT_FLOOR = 1e-12
FIT_MIN_WINDOW = 16
FIT_MAX_RESIDUAL = 0.5

# Gram-route guards.
KERNEL_MAX_ATOMS = 6000
KERNEL_RELATIVE_FLOOR = 2e-8


@dataclass(frozen=True)
class OperatorMatrix:
    """Coefficient matrix: entry (m, n) = m-th coefficient of w (phi*)^n."""

    entries: np.ndarray
    row_cut: int
    col_cut: int
    grid_size: int

    def frobenius_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing singular values with truncation metadata."""

    values: np.ndarray
    row_cut: int
    col_cut: int
    grid_size: int
    source: str = "matrix"
    floor: float = FIT_FLOOR

    def __len__(self):
        return len(self.values)

    def to_csv(self) -> str:
        lines = ["n,s_n"]
        for i, s in enumerate(self.values, start=1):
            lines.append(f"{i},{s:.17g}")
        return "\n".join(lines) + "\n"


def operator_matrix(wtrace: BoundarySamples, phitrace: BoundarySamples,
                    row_cut: int, col_cut: int) -> OperatorMatrix:
    """Truncated matrix of f -> w (f o phi) in the monomial basis.

    Column n holds the first row_cut+1 coefficients of the boundary product
    w* (phi*)^n, built from a running product so each column costs one
    multiply and one FFT.  Cuts beyond N/4 are rejected (aliasing guard).
    """
    if wtrace.grid is not phitrace.grid and wtrace.grid.size != phitrace.grid.size:
        raise GridError("traces must share a grid")
    n = wtrace.grid.size
    if row_cut >= n // 4 or col_cut >= n // 4:
        raise GridError(f"cuts must stay below N/4 = {n // 4}")
    k = np.arange(row_cut + 1)
    phase = np.exp(-1j * np.pi * k / n)
    entries = np.empty((row_cut + 1, col_cut + 1), dtype=complex)
    g = np.asarray(wtrace.values, dtype=complex).copy()
    phi = np.asarray(phitrace.values, dtype=complex)
    for col in range(col_cut + 1):
        entries[:, col] = np.fft.fft(g)[: row_cut + 1] / n * phase
        if col < col_cut:
            g *= phi
    return OperatorMatrix(entries=entries, row_cut=row_cut, col_cut=col_cut,
                          grid_size=n)


def singular_values(a: OperatorMatrix) -> SingularSpectrum:
    """Full singular value list of the truncated matrix, nonincreasing."""
    vals = np.linalg.svd(a.entries, compute_uv=False)
    return SingularSpectrum(values=vals, row_cut=a.row_cut, col_cut=a.col_cut,
                            grid_size=a.grid_size, source="matrix",
                            floor=FIT_FLOOR)


def embedding_spectrum(mu: PullbackMeasure) -> SingularSpectrum:
    """Singular values of the embedding of H^2 into L^2 of an atomic measure.

    Computed as square roots of the eigenvalues of the reproducing-kernel
    Gram matrix; exact in the atoms, no basis truncation.  Atoms on the
    unit circle are excluded (the embedding is unbounded against boundary
    mass); their total mass is expected to be zero for the measures this is
    used on.
    """
    interior = mu.radii < 1.0
    z = mu.locations[interior]
    w = mu.masses[interior]
    if z.size > KERNEL_MAX_ATOMS:
        raise ValueError(
            f"{z.size} atoms exceed the kernel-route cap {KERNEL_MAX_ATOMS}; "
            "use a coarser discretization"
        )
    sw = np.sqrt(w)
    gram = (sw[:, None] * sw[None, :]) / (1.0 - z[:, None] * np.conj(z)[None, :])
    eigenvalues = np.linalg.eigvalsh(gram)[::-1]
    vals = np.sqrt(np.maximum(eigenvalues, 0.0))
    floor = max(FIT_FLOOR, float(vals[0]) * KERNEL_RELATIVE_FLOOR) if vals.size else FIT_FLOOR
    return SingularSpectrum(values=vals, row_cut=-1, col_cut=z.size - 1,
                            grid_size=z.size, source="kernel", floor=floor)


def _stable_quadrature(values: np.ndarray) -> IntegralResult:
    """Mean with the drift-under-refinement divergence rule."""
    full = float(np.mean(values))
    half = float(np.mean(values[::2]))
    quarter = float(np.mean(values[::4]))
    if not np.isfinite(full) or abs(full) > INTEGRAL_MAGNITUDE_CAP:
        return IntegralResult(full, True)
    scale = max(abs(full), 1e-12)
    drift = max(abs(full - half), abs(half - quarter))
    return IntegralResult(full, bool(drift > INTEGRAL_DRIFT_TOL * scale))


def _one_minus_mod_sq(phitrace: BoundarySamples, phi_co) -> np.ndarray:
    """1 - |phi*|^2, preferring a cancellation-free co-modulus when given."""
    if phi_co is not None:
        co = np.asarray(
            phi_co.values if isinstance(phi_co, BoundarySamples) else phi_co,
            dtype=float,
        )
        return co * (2.0 - co)
    mod = np.abs(np.asarray(phitrace.values))
    return 1.0 - mod**2


def hs_norm_boundary(wtrace: BoundarySamples, phitrace: BoundarySamples,
                     phi_co=None) -> IntegralResult:
    """Quadrature of |w*|^2/(1 - |phi*|^2): the Hilbert-Schmidt norm squared.

    Equals the sum over n of the squared norms of the images of the
    monomials.  ``phi_co`` (samples of 1 - |phi*|) avoids cancellation for
    symbols hugging the circle.  Divergence is a return state.
    """
    dens = np.abs(np.asarray(wtrace.values)) ** 2
    denom = _one_minus_mod_sq(phitrace, phi_co)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(denom > 0.0, dens / denom, np.inf)
    if np.any(~np.isfinite(integrand) & (dens > 0.0)):
        return IntegralResult(float("inf"), True)
    integrand = np.where(np.isfinite(integrand), integrand, 0.0)
    return _stable_quadrature(integrand)


def moment_integral(wtrace: BoundarySamples, phitrace: BoundarySamples,
                    alpha: float, phi_co=None) -> IntegralResult:
    """Quadrature of |w*|^2 (1 - |phi*|^2)^{-alpha} with the divergence rule."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    dens = np.abs(np.asarray(wtrace.values)) ** 2
    base = _one_minus_mod_sq(phitrace, phi_co)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(base > 0.0, dens * base**-alpha, np.inf)
    if np.any(~np.isfinite(integrand) & (dens > 0.0)):
        return IntegralResult(float("inf"), True)
    integrand = np.where(np.isfinite(integrand), integrand, 0.0)
    return _stable_quadrature(integrand)


class SchattenEstimate(NamedTuple):
    value: float
    tail: str  # "stable" or "growing"


def schatten_estimate(spectrum: SingularSpectrum, p: float) -> SchattenEstimate:
    """(sum s_n^p)^{1/p} over the truncation, with a tail-health flag.

    The flag reads "growing" when the last quartile of the truncated list
    contributes more than 10% of the sum: membership in the class cannot
    then be asserted from this truncation.
    """
    if p <= 0:
        raise ValueError("Schatten exponent must be positive")
    s = spectrum.values
    powers = s.astype(float) ** p
    total = float(powers.sum())
    if total == 0.0:
        return SchattenEstimate(0.0, "stable")
    cut = (3 * len(powers)) // 4
    tail = float(powers[cut:].sum())
    flag = "growing" if tail > 0.10 * total else "stable"
    return SchattenEstimate(total ** (1.0 / p), flag)


@dataclass(frozen=True)
class ColumnNorms:
    """H^p norms of the monomial images w (phi*)^n, n = 0..n_max."""

    p: float
    norms: np.ndarray

    @property
    def total(self) -> float:
        return float(self.norms.sum())

    def scaled_max(self, power: float = 2.0) -> float:
        n = np.arange(1, len(self.norms), dtype=float)
        return float(np.max(n**power * self.norms[1:]))

    def tail_fraction(self) -> float:
        """Contribution of the second half of the indices to the sum."""
        half = len(self.norms) // 2
        total = self.total
        return float(self.norms[half:].sum() / total) if total > 0 else 0.0

    def to_csv(self) -> str:
        lines = ["n,norm_p"]
        for i, v in enumerate(self.norms):
            lines.append(f"{i},{v:.17g}")
        return "\n".join(lines) + "\n"


def column_pnorms(wtrace: BoundarySamples, phitrace: BoundarySamples,
                  p: float, n_max: int) -> ColumnNorms:
    """Norms ||w (phi*)^n||_p = (quadrature |w*|^p |phi*|^{pn})^{1/p}."""
    if p < 1:
        raise ValueError("Hardy exponent must be >= 1")
    wp = np.abs(np.asarray(wtrace.values)) ** p
    phip = np.abs(np.asarray(phitrace.values)) ** p
    norms = np.empty(n_max + 1)
    g = wp.copy()
    for n in range(n_max + 1):
        norms[n] = float(np.mean(g)) ** (1.0 / p)
        if n < n_max:
            g *= phip
    return ColumnNorms(p=p, norms=norms)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of s_n ~ exp(-b n^gamma) in log-log coordinates."""

    b: float
    gamma: float
    residual: float
    window: tuple
    ok: bool

    def to_json_dict(self) -> dict:
        return {
            "b": self.b,
            "gamma": self.gamma,
            "residual": self.residual,
            "window": list(self.window),
            "ok": self.ok,
        }


def decay_fit(spectrum: SingularSpectrum, window: tuple | None = None,
              floor: float | None = None) -> DecayFit:
    """Fit log log(1/s_n) against log n over a window of indices (1-based).

    The default window drops the first FIT_SKIP indices (transient) and
    everything at or below the spectrum's noise floor.  A fit with log-log
    RMS residual above 0.5, or a window shorter than 16 points, is
    returned as not ok ("unfittable").
    """
    s = spectrum.values
    idx = np.arange(1, len(s) + 1)
    if floor is None:
        floor = spectrum.floor
    if window is None:
        lo = FIT_SKIP + 1
        above = idx[s > floor]
        hi = int(above[-1]) if len(above) else 0
    else:
        lo, hi = int(window[0]), int(window[1])
    mask = (idx >= lo) & (idx <= hi) & (s > floor) & (s < 1.0)
    bad = DecayFit(b=float("nan"), gamma=float("nan"), residual=float("inf"),
                   window=(lo, hi), ok=False)
    if mask.sum() < FIT_MIN_WINDOW:
        return bad
    x = np.log(idx[mask].astype(float))
    y = np.log(np.log(1.0 / s[mask]))
    gamma, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((gamma * x + intercept - y) ** 2)))
    if residual > FIT_MAX_RESIDUAL:
        return DecayFit(b=float(np.exp(intercept)), gamma=float(gamma),
                        residual=residual, window=(lo, hi), ok=False)
    return DecayFit(b=float(np.exp(intercept)), gamma=float(gamma),
                    residual=residual, window=(lo, hi), ok=True)


@dataclass(frozen=True)
class TruncationStudy:
    """Per-index relative change of s_n between consecutive cuts."""

    cuts: tuple
    spectra: tuple
    changes: tuple  # one array per consecutive pair

    def stable_through(self, count: int, tol: float = 0.01) -> bool:
        """True when s_1..s_count moved less than tol at every doubling."""
        return all(len(ch) >= count and float(np.max(ch[:count])) < tol
                   for ch in self.changes)

    def flagged(self, tol: float = 0.01) -> np.ndarray:
        """1-based indices whose last-pair change exceeds tol."""
        last = self.changes[-1]
        return np.flatnonzero(last > tol) + 1


def truncation_study(trace_factory, cuts: Sequence[tuple]) -> TruncationStudy:
    """Recompute the spectrum at growing cuts (row, col, N) and compare.

    ``trace_factory(N)`` must return the (wtrace, phitrace) pair on the
    N-point grid; cut triples must be increasing.
    """
    if len(cuts) < 2:
        raise ValueError("need at least two cuts to compare")
    prev = None
    for cut in cuts:
        if prev is not None and not all(a <= b for a, b in zip(prev, cut)):
            raise ValueError("cuts must be nondecreasing in every component")
        prev = cut
    spectra = []
    for row_cut, col_cut, n in cuts:
        w, phi = trace_factory(n)
        spectra.append(singular_values(operator_matrix(w, phi, row_cut,
                                                       col_cut)))
    changes = []
    for a, b in zip(spectra[:-1], spectra[1:]):
        count = min(len(a.values), len(b.values))
        denom = np.maximum(np.abs(b.values[:count]), 1e-300)
        changes.append(np.abs(a.values[:count] - b.values[:count]) / denom)
    return TruncationStudy(cuts=tuple(cuts), spectra=tuple(spectra),
                           changes=tuple(changes))
