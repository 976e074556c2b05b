"""Catalog of analytic self-maps of the disk and their boundary behavior.

Every symbol carries a closed-form boundary modulus and, crucially, a
closed-form *co-modulus* 1 - |phi*| evaluated without cancellation: the
catalog's interesting symbols approach the unit circle so fast that
``1 - modulus`` in floating point would lose all digits exactly where the
diagnostics look.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import TWO_PI, BoundaryGrid, BoundarySamples, GridError, make_grid
from .outer import hilbert_transform, _herglotz_eval

__all__ = [
    "Symbol",
    "LevelSets",
    "lens",
    "half",
    "beta_exp",
    "extreme_not_exposed",
    "hs_extremal",
    "custom_outer",
    "constant",
    "boundary_trace",
    "level_sets",
    "parse_symbol",
]

# Reference grid used for interior evaluation of outer-type symbols.
_REF_N = 4096


@dataclass(frozen=True)
class Symbol:
    """Analytic self-map of the disk with closed-form boundary data."""

    kind: str
    label: str
    params: tuple
    singular_angles: tuple
    _modulus_fn: Callable
    _co_fn: Callable
    _trace_fn: Callable
    _eval_fn: Callable
    _angle_trace_fn: Optional[Callable] = None

    def modulus_of_angle(self, t):
        """|phi*(e^{it})| for signed angles t in (-pi, pi]."""
        return self._modulus_fn(np.asarray(t, dtype=float))

    def co_modulus_of_angle(self, t):
        """1 - |phi*(e^{it})|, computed cancellation-free."""
        return self._co_fn(np.asarray(t, dtype=float))

    def modulus(self, grid: BoundaryGrid) -> BoundarySamples:
        return grid.samples(self.modulus_of_angle(grid.signed_angles()))

    def trace(self, grid: BoundaryGrid) -> BoundarySamples:
        return grid.samples(self._trace_fn(grid))

    @property
    def has_angle_trace(self) -> bool:
        return self._angle_trace_fn is not None

    def trace_of_angle(self, t):
        """Boundary trace at arbitrary angles; closed-form symbols only."""
        if self._angle_trace_fn is None:
            raise NotImplementedError(
                f"symbol {self.label!r} has no closed-form trace off the grid"
            )
        return self._angle_trace_fn(np.asarray(t, dtype=float))

    def __call__(self, z):
        return self._eval_fn(np.asarray(z, dtype=complex))

    def __repr__(self):
        return f"Symbol({self.label})"


def _signed(grid: BoundaryGrid) -> np.ndarray:
    return grid.signed_angles()


def _outer_symbol(kind, label, params, log_modulus_fn, modulus_fn, co_fn,
                  singular=(0.0,)):
    """Symbol given as the outer function of a prescribed boundary modulus.

    The grid trace is modulus * exp(i H log-modulus); interior values come
    from the Herglotz integral of the log-modulus on a reference grid.
    """
    ref = make_grid(_REF_N)
    ref_logm = log_modulus_fn(ref.signed_angles())

    def trace_fn(grid):
        t = _signed(grid)
        logm = log_modulus_fn(t)
        return np.exp(logm + 1j * hilbert_transform(logm))

    def eval_fn(z):
        return np.exp(_herglotz_eval(ref, ref_logm, z))

    return Symbol(
        kind=kind,
        label=label,
        params=params,
        singular_angles=singular,
        _modulus_fn=modulus_fn,
        _co_fn=co_fn,
        _trace_fn=trace_fn,
        _eval_fn=eval_fn,
    )


def lens(theta: float) -> Symbol:
    """Lens map of parameter theta in (0, 1), pinching the disk at +-1.

    lambda(z) = (1 - s)/(1 + s) with s = ((1-z)/(1+z))^theta (principal
    powers); fixes +-1 as boundary limits, lambda(0) = 0, and
    1 - |lambda*(e^{it})| behaves like |t|^theta near the contact points.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"lens parameter must be in (0, 1), got {theta}")

    def core(z):
        s = ((1.0 - z) / (1.0 + z)) ** theta
        return (1.0 - s) / (1.0 + s)

    def s_of_angle(t):
        xi = np.exp(1j * t)
        return ((1.0 - xi) / (1.0 + xi)) ** theta

    def angle_trace(t):
        s = s_of_angle(t)
        return (1.0 - s) / (1.0 + s)

    def co_fn(t):
        s = s_of_angle(t)
        # 1 - |lambda|^2 = 4 Re s / |1+s|^2; convert without cancellation
        x = 4.0 * np.real(s) / np.abs(1.0 + s) ** 2
        x = np.clip(x, 0.0, 1.0)
        return x / (1.0 + np.sqrt(1.0 - x))

    def modulus_fn(t):
        return 1.0 - co_fn(t)

    return Symbol(
        kind="lens",
        label=f"lens:{theta:g}",
        params=(theta,),
        singular_angles=(0.0, np.pi),
        _modulus_fn=modulus_fn,
        _co_fn=co_fn,
        _trace_fn=lambda grid: angle_trace(_signed(grid)),
        _eval_fn=core,
        _angle_trace_fn=angle_trace,
    )


def half() -> Symbol:
    """The symbol phi(z) = (1+z)/2 with boundary modulus |cos(t/2)|."""

    def angle_trace(t):
        return (1.0 + np.exp(1j * t)) / 2.0

    def co_fn(t):
        return 2.0 * np.sin(t / 4.0) ** 2

    return Symbol(
        kind="half",
        label="half",
        params=(),
        singular_angles=(0.0,),
        _modulus_fn=lambda t: np.abs(np.cos(t / 2.0)),
        _co_fn=co_fn,
        _trace_fn=lambda grid: angle_trace(_signed(grid)),
        _eval_fn=lambda z: (1.0 + z) / 2.0,
        _angle_trace_fn=angle_trace,
    )


def beta_exp(beta: float) -> Symbol:
    """Symbol exp(-U) where U is the Herglotz map of u(t) = |sin(t/2)|^beta.

    Boundary modulus exp(-|sin(t/2)|^beta) in closed form; the boundary
    argument is the conjugate function of -u.  Re U >= 0 exactly, so the
    self-map property holds by construction.
    """
    if not 0.0 < beta <= 2.0:
        raise ValueError(f"beta must be in (0, 2], got {beta}")

    def u_fn(t):
        return np.abs(np.sin(t / 2.0)) ** beta

    sym = _outer_symbol(
        kind="betaexp",
        label=f"betaexp:{beta:g}",
        params=(beta,),
        log_modulus_fn=lambda t: -u_fn(t),
        modulus_fn=lambda t: np.exp(-u_fn(t)),
        co_fn=lambda t: -np.expm1(-u_fn(t)),
    )
    if beta == 2.0:
        # u = (1 - cos t)/2 has elementary conjugate -sin(t)/2, giving a
        # closed-form trace at arbitrary angles (needed off the grid)
        object.__setattr__(
            sym, "_angle_trace_fn",
            lambda t: np.exp(-np.sin(t / 2.0) ** 2 + 0.5j * np.sin(t)),
        )
    return sym


def extreme_not_exposed() -> Symbol:
    """Outer symbol with |phi*| = 1 - exp(-1/|t|).

    The boundary modulus never reaches 1 away from t = 0, its log is
    integrable, but log(1 - |phi*|) = -1/|t| is not: the symbol is an
    extreme but not exposed point of the unit ball of H^infinity.
    """

    def co_fn(t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(-1.0 / np.abs(t))

    def log_modulus_fn(t):
        return np.log1p(-co_fn(t))

    return _outer_symbol(
        kind="extreme",
        label="extreme",
        params=(),
        log_modulus_fn=log_modulus_fn,
        modulus_fn=lambda t: 1.0 - co_fn(t),
        co_fn=co_fn,
    )


def hs_extremal() -> Symbol:
    """Outer symbol with |phi*| = 1 - exp(-e^{1/|t|}).

    The modulus is bounded below by 1 - exp(-e^{1/pi}) > 0 and approaches 1
    at t = 0 doubly exponentially fast; the co-modulus exp(-e^{1/|t|})
    underflows to exact zero near the contact angle, which every consumer
    treats as a boundary-touching sample.
    """

    def co_fn(t):
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(-np.exp(1.0 / np.abs(t)))

    return _outer_symbol(
        kind="hsx",
        label="hsx",
        params=(),
        log_modulus_fn=lambda t: np.log1p(-co_fn(t)),
        modulus_fn=lambda t: 1.0 - co_fn(t),
        co_fn=co_fn,
    )


def custom_outer(angles, modulus) -> Symbol:
    """Outer symbol from a table of (angle, modulus) boundary samples.

    Angles may be given in [0, 2*pi) or (-pi, pi]; the modulus is
    interpolated periodically.  Values must lie in (0, 1].
    """
    a = np.asarray(angles, dtype=float) % TWO_PI
    m = np.asarray(modulus, dtype=float)
    if a.shape != m.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("need matching 1-d angle and modulus tables")
    if np.any(m <= 0.0) or np.any(m > 1.0):
        raise ValueError("custom outer modulus must have values in (0, 1]")
    order = np.argsort(a)
    a, m = a[order], m[order]
    a_ext = np.concatenate(([a[-1] - TWO_PI], a, [a[0] + TWO_PI]))
    m_ext = np.concatenate(([m[-1]], m, [m[0]]))

    def modulus_fn(t):
        return np.interp(np.asarray(t, dtype=float) % TWO_PI, a_ext, m_ext)

    return _outer_symbol(
        kind="customouter",
        label="outer:<table>",
        params=(),
        log_modulus_fn=lambda t: np.log(modulus_fn(t)),
        modulus_fn=modulus_fn,
        co_fn=lambda t: 1.0 - modulus_fn(t),
        singular=(),
    )


def constant(c: complex) -> Symbol:
    """Constant symbol phi ≡ c with |c| < 1; diagnostic use."""
    c = complex(c)
    if abs(c) >= 1.0:
        raise ValueError("constant symbol must lie strictly inside the disk")

    return Symbol(
        kind="const",
        label=f"const:{c.real:g}" if c.imag == 0 else f"const:{c!r}",
        params=(c,),
        singular_angles=(),
        _modulus_fn=lambda t: np.full_like(t, abs(c), dtype=float),
        _co_fn=lambda t: np.full_like(t, 1.0 - abs(c), dtype=float),
        _trace_fn=lambda grid: np.full(grid.size, c, dtype=complex),
        _eval_fn=lambda z: np.full_like(z, c, dtype=complex),
        _angle_trace_fn=lambda t: np.full_like(t, c, dtype=complex),
    )


def boundary_trace(phi: Symbol, grid: BoundaryGrid):
    """Boundary trace and closed-form modulus of a symbol on a grid."""
    return phi.trace(grid), phi.modulus(grid)


@dataclass(frozen=True)
class LevelSets:
    """Nested boundary sets F_k = {|phi*| > 1 - h_k} with masses c_k.

    ``level_index[j]`` is the deepest k whose set contains sample j; the
    sets are nested by construction.  The inclusion at the threshold is
    strict, so a constant symbol sitting exactly on a dyadic level has
    empty sets from k = 1 on.
    """

    grid: BoundaryGrid
    thresholds: np.ndarray
    level_index: np.ndarray
    masses: np.ndarray

    @property
    def k_max(self) -> int:
        return len(self.thresholds) - 1

    def mask(self, k: int) -> np.ndarray:
        return self.level_index >= k


def level_sets(phi, grid: BoundaryGrid, k_max: int | None = None,
               thresholds=None) -> LevelSets:
    """Compute level-set masses of a symbol (or of modulus samples).

    Dyadic thresholds h_k = 2^{-k} by default; pass explicit decreasing
    ``thresholds`` (h_0 = 1 first) for non-dyadic schedules.  The guard
    k_max <= log2(N) - 2 keeps at least four samples per resolvable set.
    """
    n = grid.size
    resolution_cap = int(np.log2(n)) - 2
    if thresholds is None:
        if k_max is None:
            k_max = resolution_cap
        if k_max > resolution_cap:
            raise GridError(
                f"k_max={k_max} beyond resolution guard {resolution_cap}"
            )
        thresholds = 2.0 ** -np.arange(k_max + 1)
    else:
        thresholds = np.asarray(thresholds, dtype=float)
        if thresholds[0] != 1.0 or np.any(np.diff(thresholds) >= 0):
            raise ValueError("thresholds must start at 1 and strictly decrease")
        if len(thresholds) - 1 > resolution_cap:
            raise GridError(
                f"{len(thresholds) - 1} levels beyond resolution guard "
                f"{resolution_cap}"
            )

    if isinstance(phi, Symbol):
        co = phi.co_modulus_of_angle(grid.signed_angles())
    else:
        co = 1.0 - np.asarray(phi.values, dtype=float)

    level = np.zeros(n, dtype=np.int64)
    for k in range(1, len(thresholds)):
        level[co < thresholds[k]] = k
    masses = np.array([np.mean(level >= k) for k in range(len(thresholds))])
    return LevelSets(
        grid=grid,
        thresholds=thresholds,
        level_index=level,
        masses=masses,
    )


def boundary_contact_fraction(modulus: BoundarySamples, deltas) -> np.ndarray:
    """Fraction of samples with |phi*| > 1 - delta, per delta.

    Proxy for m({|phi*| = 1}) = 0: for a fixed grid the fraction at a fixed
    delta is the measure of a fixed super-level set, so the diagnostic
    refines delta (not the grid) and checks the fractions decrease toward
    zero.
    """
    v = np.asarray(modulus.values, dtype=float)
    return np.array([float(np.mean(v > 1.0 - d)) for d in np.asarray(deltas)])


def parse_symbol(spec: str) -> Symbol:
    """Build a catalog symbol from its CLI name.

    Accepted forms: ``lens:0.5``, ``half``, ``betaexp:2.0``, ``extreme``,
    ``hsx``, ``outer:<csv-file>`` (two columns: angle, modulus).
    """
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "half":
        return half()
    if name == "extreme":
        return extreme_not_exposed()
    if name == "hsx":
        return hs_extremal()
    if name == "lens":
        return lens(float(arg))
    if name == "betaexp":
        return beta_exp(float(arg))
    if name == "outer":
        table = np.loadtxt(arg, delimiter=",", dtype=float)
        if table.ndim != 2 or table.shape[1] != 2:
            raise ValueError(f"{arg}: expected two CSV columns angle,modulus")
        return custom_outer(table[:, 0], table[:, 1])
    raise ValueError(f"unknown symbol spec {spec!r}")
