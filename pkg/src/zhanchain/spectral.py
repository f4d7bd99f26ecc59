"""Spectral-radius enclosures and trace-power limit sequences.

The estimator works component by component: the spectral radius of a
non-negative matrix is the largest spectral radius among the diagonal blocks
of its strong components, and on each irreducible block the shifted matrix
``B + delta*I`` is primitive, so power iteration on it converges even when
``B`` itself is periodic. Every iterate yields Collatz-Wielandt quotients,
which bracket the Perron root rigorously; the reported interval is the
intersection of all brackets seen.
"""
from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .matrix import DimensionMismatch, Matrix, power_log_scaled, spectral_radius_2x2, trace_of_power
from .structure import strong_components

__all__ = [
    "Method",
    "SpectralEstimate",
    "TraceSequence",
    "NotConverged",
    "NotPositive",
    "NonPositiveVector",
    "cw_bounds",
    "spectral_radius",
    "power_iteration_enclosure",
    "trace_sequence",
    "power_identity_check",
    "lemma_limit_check",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000

_EPS = sys.float_info.epsilon
_MAX_SQUARINGS = 64
_STALL_WINDOW = 500
_STALL_RATIO = 0.99


class Method(str, enum.Enum):
    POWER_ITERATION_2SIDED = "PowerIteration2Sided"
    CLOSED_FORM_2X2 = "ClosedForm2x2"
    TRACE_EXTRAPOLATION = "TraceExtrapolation"


class NotConverged(RuntimeError):
    def __init__(self, estimate: "SpectralEstimate"):
        super().__init__(
            f"spectral radius enclosure [{estimate.lower!r}, {estimate.upper!r}] "
            f"did not reach tolerance after {estimate.iterations} iterations"
        )
        self.estimate = estimate


class NotPositive(ValueError):
    pass


class NonPositiveVector(ValueError):
    pass


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    lower: float
    upper: float
    iterations: int
    method: Method
    converged: bool
    perron_vector: Optional[tuple[float, ...]] = None

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "iterations": self.iterations,
            "method": self.method.value,
            "converged": self.converged,
            "perron_vector": None if self.perron_vector is None else list(self.perron_vector),
        }


@dataclass(frozen=True)
class TraceSequence:
    """``s[m-1] = (Tr A^m)^(1/m)`` for ``m = 1..m_max``."""

    m_max: int
    s: tuple[float, ...]
    oscillating: bool
    estimate: float
    window: int = field(default=0)

    def at(self, m: int) -> float:
        return self.s[m - 1]

    def to_dict(self) -> dict:
        return {
            "m_max": self.m_max,
            "s": list(self.s),
            "oscillating": self.oscillating,
            "estimate": self.estimate,
            "window": self.window,
        }


def cw_bounds(a: Matrix, x) -> tuple[float, float]:
    """Collatz-Wielandt quotients ``min_i (Ax)_i/x_i`` and ``max_i (Ax)_i/x_i``.

    For non-negative ``A`` and positive ``x`` these bracket ``rho(A)``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.n,):
        raise DimensionMismatch(f"vector of length {a.n} expected, got shape {x.shape}")
    if not np.all(x > 0) or not np.all(np.isfinite(x)):
        raise NonPositiveVector("Collatz-Wielandt vector must be entrywise positive and finite")
    q = (a.array @ x) / x
    return float(q.min()), float(q.max())


def _cw(b: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    q = (b @ x) / x
    return float(q.min()), float(q.max())


@dataclass
class _BlockResult:
    lower: float
    upper: float
    iterations: int
    converged: bool
    vector: np.ndarray


def _block_enclosure(b: np.ndarray, tol: float, max_iter: int) -> _BlockResult:
    """Enclose the Perron root of an irreducible block ``b``."""
    k = b.shape[0]
    if k == 1:
        v = float(b[0, 0])
        return _BlockResult(v, v, 0, True, np.ones(1))
    delta = float(b.max())
    shifted = b + delta * np.eye(k)
    x = np.full(k, 1.0 / k)
    lower, upper = _cw(b, x)
    if upper - lower <= tol * max(1.0, upper):
        return _BlockResult(lower, upper, 0, True, x)

    # Squaring the normalized power doubles the effective step count each
    # round; plain steps take over once the power is saturated or degenerate.
    power = shifted / shifted.max()
    squarings = 0
    stall_ref = upper - lower
    for it in range(1, max_iter + 1):
        if squarings < _MAX_SQUARINGS:
            power = power @ power
            power /= power.max()
            squarings += 1
            cand = power.sum(axis=1)
            if not np.all(cand > 0) or not np.all(np.isfinite(cand)):
                squarings = _MAX_SQUARINGS
                cand = shifted @ x
        else:
            cand = shifted @ x
        cand = cand / cand.sum()
        if np.all(cand > 0):
            x = cand
            lo, hi = _cw(b, x)
            lower = max(lower, lo)
            upper = min(upper, hi)
        if upper - lower <= tol * max(1.0, upper):
            return _BlockResult(lower, upper, it, True, x)
        if it % _STALL_WINDOW == 0:
            width = upper - lower
            if width > _STALL_RATIO * stall_ref:
                return _BlockResult(lower, upper, it, False, x)
            stall_ref = width
    return _BlockResult(lower, upper, max_iter, False, x)


def _inflate(lower: float, upper: float, n: int) -> tuple[float, float]:
    # absorbs the rounding of one matvec and one division per quotient
    pad = 4.0 * (n + 1) * _EPS
    return max(0.0, lower * (1.0 - pad)), upper * (1.0 + pad)


def _perron_2x2(a: Matrix, rho: float) -> Optional[tuple[float, ...]]:
    (p, q), (r, s) = a.array
    if q <= 0 or r <= 0:
        return None
    # (A - rho I) x = 0 from the first row; rho - p > 0 when q, r > 0
    x = np.array([q, rho - p])
    if not np.all(x > 0):
        x = np.array([rho - s, r])
        if not np.all(x > 0):
            return None
    return tuple(float(v) for v in x / x.sum())


def spectral_radius(a: Matrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SpectralEstimate:
    """Rigorous enclosure of ``rho(A)`` for non-negative ``A``.

    Parameters
    ----------
    a : Matrix
    tol : float
        Target relative width, ``upper - lower <= tol * max(1, upper)``.
    max_iter : int
        Iteration budget per irreducible block.

    Returns
    -------
    SpectralEstimate
        ``value`` is the midpoint of the enclosure. For ``n == 2`` the closed
        form is used and the enclosure is degenerate. When an enclosure stops
        shrinking the value is taken from the trace-power sequence (clipped
        to the enclosure) and ``converged`` is False; no exception is raised.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")
    n = a.n
    if a.is_zero():
        return SpectralEstimate(0.0, 0.0, 0.0, 0, Method.POWER_ITERATION_2SIDED, True, None)
    if n == 2:
        rho = spectral_radius_2x2(a)
        return SpectralEstimate(rho, rho, rho, 0, Method.CLOSED_FORM_2X2, True, _perron_2x2(a, rho))

    return power_iteration_enclosure(a, tol, max_iter)


def power_iteration_enclosure(
    a: Matrix, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SpectralEstimate:
    """The shifted two-sided power-iteration route of :func:`spectral_radius`.

    Applies to every dimension, including n = 2, which is what lets the
    closed form serve as an independent check.
    """
    n = a.n
    arr = a.array
    comps = strong_components(a)
    lower = upper = 0.0
    iterations = 0
    converged = True
    vector = None
    for comp in comps:
        block = arr[np.ix_(comp, comp)]
        if not block.any():
            continue  # acyclic singleton
        res = _block_enclosure(block, tol, max_iter)
        lower = max(lower, res.lower)
        upper = max(upper, res.upper)
        iterations = max(iterations, res.iterations)
        converged &= res.converged
        if len(comps) == 1:
            vector = res.vector
    lower, upper = _inflate(lower, upper, n)
    perron = None
    if vector is not None and np.all(vector > 0):
        perron = tuple(float(v) for v in vector / vector.sum())
    if converged:
        value = 0.5 * (lower + upper)
        return SpectralEstimate(value, lower, upper, iterations, Method.POWER_ITERATION_2SIDED, True, perron)
    guess = trace_sequence(a, 64).estimate
    value = min(max(guess, lower), upper)
    return SpectralEstimate(value, lower, upper, iterations, Method.TRACE_EXTRAPOLATION, False, perron)


def trace_sequence(a: Matrix, m_max: int, tol: float = 1e-9) -> TraceSequence:
    """The sequence ``(Tr A^m)^(1/m)``, its oscillation flag and a lim-sup estimate.

    The tail window is the last ``ceil(m_max / 4)`` terms. The sequence is
    flagged as oscillating when the tail's relative spread exceeds
    ``100 * tol`` and the tail either contains a zero or moves both up and
    down by more than ``tol`` (relative). ``estimate`` is the tail maximum.
    """
    if m_max < 4:
        raise ValueError(f"m_max must be >= 4, got {m_max}")
    s = tuple(trace_of_power(a, m).root(m) for m in range(1, m_max + 1))
    window = math.ceil(m_max / 4)
    tail = np.array(s[-window:])
    top = float(tail.max())
    if top == 0.0:
        return TraceSequence(m_max, s, False, 0.0, window)
    spread = (top - float(tail.min())) / top
    steps = np.diff(tail) / top
    non_monotone = bool((steps > tol).any() and (steps < -tol).any())
    has_zero = bool((tail == 0.0).any())
    oscillating = spread > 100 * tol and (has_zero or non_monotone)
    return TraceSequence(m_max, s, oscillating, top, window)


def power_identity_check(a: Matrix, k: int, tol: float) -> bool:
    """Check ``rho(A^k) == rho(A)^k`` to relative tolerance ``tol``.

    Raises :class:`NotConverged` if either spectral radius fails to converge.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    base = spectral_radius(a)
    if not base.converged:
        raise NotConverged(base)
    p, log_scale = power_log_scaled(a, k)
    scaled = spectral_radius(Matrix(p))
    if not scaled.converged:
        raise NotConverged(scaled)
    lhs = scaled.value * math.exp(log_scale)
    rhs = base.value**k
    return abs(lhs - rhs) <= tol * max(1.0, rhs)


def lemma_limit_check(a: Matrix, m: int, tol: float) -> bool:
    """Check that ``(A / rho(A))^m`` is numerically rank one with unit trace.

    Every 2 x 2 minor of ``M = (A/rho)^m`` must be at most
    ``tol * max(M)^2`` in magnitude and ``|Tr M - 1| <= tol``.
    """
    if not a.is_positive():
        raise NotPositive("lemma_limit_check requires an entrywise positive matrix")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    rho = spectral_radius(a).value
    p, log_scale = power_log_scaled(a, m)
    mat = p * math.exp(log_scale - m * math.log(rho))
    top = float(mat.max())
    # minors[i, j, k, l] = M_ij M_kl - M_il M_kj
    minors = np.einsum("ij,kl->ijkl", mat, mat) - np.einsum("il,kj->ijkl", mat, mat)
    rank_one = float(np.abs(minors).max()) <= tol * top * top
    return rank_one and abs(float(np.trace(mat)) - 1.0) <= tol
