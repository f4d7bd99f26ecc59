"""The Hadamard/conventional product spectral-radius chain and its proof steps.

For non-negative n x n matrices A and B::

    rho(A o B) <= rho((A o A)(B o B))**0.5 <= rho(AB)

This module checks the chain numerically (:func:`zhan_chain`), checks the
trace-power chain that implies it (:func:`trace_chain`), and replays the
individual summation arguments by brute-force enumeration over multi-indices
(:func:`brute_force_trace_cycle`, :func:`proof_vectors`,
:func:`diagonal_subset_check`). The counterexample pairs used to show the
chain has no reverse bound are available as constructors.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .matrix import (
    DimensionMismatch,
    LogScaledTrace,
    Matrix,
    entrywise_square,
    hadamard,
    matmul,
    trace_of_power,
)
from .spectral import DEFAULT_TOL, spectral_radius

__all__ = [
    "ChainReport",
    "TraceChainReport",
    "ProofTraceReport",
    "TracePattern",
    "SizeGuardExceeded",
    "zhan_chain",
    "trace_chain",
    "brute_force_trace_cycle",
    "cyclic_products",
    "proof_vector_pair",
    "proof_vectors",
    "diagonal_subset_sums",
    "diagonal_subset_check",
    "hadamard_submult",
    "counterexample_pair",
    "unbounded_family",
]

RATIO_FLOOR = 1e-300
TRACE_RTOL = 1e-9
IDENTITY_RTOL = 1e-10
MULTISET_RTOL = 1e-12
SUBSET_RTOL = 1e-12
HADAMARD_CYCLE_LIMIT = 10**7
CONV_CYCLE_LIMIT = 10**7
PROOF_VECTOR_LIMIT = 10**6
MAX_TRACE_POWER = 64

# fixed chunk size keeps summation order, and so the bits, independent of
# how the index space is traversed
_CHUNK = 1 << 16


class SizeGuardExceeded(ValueError):
    pass


class TracePattern(str, enum.Enum):
    HADAMARD_CYCLE = "HadamardCycle"
    CONV_CYCLE = "ConvCycle"


@dataclass(frozen=True)
class ChainReport:
    rho_had: float
    rho_mid: float
    rho_conv: float
    enclosures: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    first_holds: bool
    second_holds: bool
    ratio: float
    certified: bool
    converged: bool = True

    @property
    def holds(self) -> bool:
        return self.first_holds and self.second_holds

    def to_dict(self) -> dict:
        return {
            "rho_had": self.rho_had,
            "rho_mid": self.rho_mid,
            "rho_conv": self.rho_conv,
            "enclosures": {
                "had": list(self.enclosures[0]),
                "mid": list(self.enclosures[1]),
                "conv": list(self.enclosures[2]),
            },
            "first_holds": self.first_holds,
            "second_holds": self.second_holds,
            "ratio": self.ratio,
            "certified": self.certified,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class TraceChainReport:
    k: int
    t1: LogScaledTrace  # Tr((A o B)^(2k))
    t2: LogScaledTrace  # Tr(((A o A)(B o B))^k)
    t3: LogScaledTrace  # Tr((AB)^(2k))
    holds: tuple[bool, bool]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "t1": self.t1.to_dict(),
            "t2": self.t2.to_dict(),
            "t3": self.t3.to_dict(),
            "holds": list(self.holds),
        }


@dataclass(frozen=True)
class ProofTraceReport:
    k: int
    length: int
    inner_xy: float
    inner_xx: float
    multiset_equal: bool
    xy_equals_t1: bool
    xx_equals_t2: bool

    def to_dict(self) -> dict:
        return asdict(self)


# -- spectral chain ---------------------------------------------------------

def _verdict(left: tuple, right: tuple, tol: float) -> tuple[bool, bool]:
    """(flag, certified) for ``left <= right`` given midpoints and enclosures."""
    (l_mid, l_lo, l_hi), (r_mid, r_lo, r_hi) = left, right
    flag = l_mid <= r_mid + tol * max(1.0, r_mid)
    if flag:
        certified = l_hi <= r_lo
    else:
        certified = l_lo > r_hi
    return flag, certified


def zhan_chain(a: Matrix, b: Matrix, tol: float = 1e-8, spectral_tol: float = DEFAULT_TOL) -> ChainReport:
    """Evaluate ``rho(A o B) <= rho((A o A)(B o B))^(1/2) <= rho(AB)``.

    Each flag compares enclosure midpoints with slack ``tol * max(1, rhs)``.
    ``certified`` is True only when, for both flags, the enclosures
    themselves separate (so the verdict does not rest on the slack) and every
    spectral estimate converged.
    """
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    had = spectral_radius(hadamard(a, b), spectral_tol)
    sq = spectral_radius(matmul(entrywise_square(a), entrywise_square(b)), spectral_tol)
    conv = spectral_radius(matmul(a, b), spectral_tol)

    had_t = (had.value, had.lower, had.upper)
    mid_t = (math.sqrt(sq.value), math.sqrt(sq.lower), math.sqrt(sq.upper))
    conv_t = (conv.value, conv.lower, conv.upper)
    first, cert1 = _verdict(had_t, mid_t, tol)
    second, cert2 = _verdict(mid_t, conv_t, tol)
    converged = had.converged and sq.converged and conv.converged
    return ChainReport(
        rho_had=had_t[0],
        rho_mid=mid_t[0],
        rho_conv=conv_t[0],
        enclosures=(had_t[1:], mid_t[1:], conv_t[1:]),
        first_holds=first,
        second_holds=second,
        ratio=had_t[0] / max(conv_t[0], RATIO_FLOOR),
        certified=cert1 and cert2 and converged,
        converged=converged,
    )


def hadamard_submult(a: Matrix, b: Matrix, tol: float = 1e-8) -> bool:
    """``rho(A o B) <= rho(A) rho(B)`` up to ``tol * max(1, rho(A) rho(B))``."""
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    lhs = spectral_radius(hadamard(a, b)).value
    rhs = spectral_radius(a).value * spectral_radius(b).value
    return lhs <= rhs + tol * max(1.0, rhs)


# -- trace chain ------------------------------------------------------------

def trace_chain(a: Matrix, b: Matrix, k: int) -> TraceChainReport:
    """``Tr((A o B)^2k) <= Tr(((A o A)(B o B))^k) <= Tr((AB)^2k)``, in log domain."""
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    if k < 1 or 2 * k > MAX_TRACE_POWER:
        raise ValueError(f"k must satisfy 1 <= 2k <= {MAX_TRACE_POWER}, got {k}")
    t1 = trace_of_power(hadamard(a, b), 2 * k)
    t2 = trace_of_power(matmul(entrywise_square(a), entrywise_square(b)), k)
    t3 = trace_of_power(matmul(a, b), 2 * k)
    return TraceChainReport(k, t1, t2, t3, (t1.le(t2, TRACE_RTOL), t2.le(t3, TRACE_RTOL)))


# -- brute-force multi-index sums -------------------------------------------

def _check_same(a: Matrix, b: Matrix) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")


def _guard(n: int, length: int, limit: int) -> int:
    terms = n**length
    if terms > limit:
        raise SizeGuardExceeded(f"{n}^{length} = {terms} terms exceeds the limit {limit}")
    return terms


def _cycle_chunks(factors: Sequence[np.ndarray], n: int):
    """Yield, chunk by chunk, ``prod_t factors[t][i_t, i_{t+1}]`` over all cycles.

    Multi-indices ``(i_1, ..., i_L)`` run in lexicographic order; the index
    after ``i_L`` wraps to ``i_1``.
    """
    length = len(factors)
    shape = (n,) * length
    total = n**length
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(flat, shape)
        prod = np.ones(flat.shape[0])
        for t, f in enumerate(factors):
            prod *= f[idx[t], idx[(t + 1) % length]]
        yield prod


def _cyclic_sum(factors: Sequence[np.ndarray], n: int) -> float:
    return math.fsum(float(chunk.sum()) for chunk in _cycle_chunks(factors, n))


def cyclic_products(factors: Sequence[np.ndarray], n: int) -> np.ndarray:
    """All ``n**len(factors)`` cyclic products as one vector (lexicographic order)."""
    return np.concatenate(list(_cycle_chunks(factors, n)))


def _alternating(first: np.ndarray, second: np.ndarray, length: int) -> list[np.ndarray]:
    return [first if t % 2 == 0 else second for t in range(length)]


def brute_force_trace_cycle(a: Matrix, b: Matrix, k: int, pattern: TracePattern | str) -> float:
    """Direct multi-index summation, no matrix products.

    ``HadamardCycle`` sums ``prod_t A_{i_t i_{t+1}} B_{i_t i_{t+1}}`` over the
    ``2k`` cyclic indices, which equals ``Tr((A o B)^2k)``. ``ConvCycle`` sums
    the alternating ``A B A B ...`` products over ``4k`` cyclic indices
    ``(i_1..i_2k, j_1..j_2k)``, which equals ``Tr((AB)^2k)``.
    """
    _check_same(a, b)
    pattern = TracePattern(pattern)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = a.n
    if pattern is TracePattern.HADAMARD_CYCLE:
        _guard(n, 2 * k, HADAMARD_CYCLE_LIMIT)
        length = 2 * k
        total = n**length
        s = []
        for start in range(0, total, _CHUNK):
            flat = np.arange(start, min(start + _CHUNK, total))
            idx = np.unravel_index(flat, (n,) * length)
            prod = np.ones(flat.shape[0])
            for t in range(length):
                i, j = idx[t], idx[(t + 1) % length]
                prod *= a.array[i, j]
                prod *= b.array[i, j]
            s.append(float(prod.sum()))
        return math.fsum(s)
    _guard(n, 4 * k, CONV_CYCLE_LIMIT)
    return _cyclic_sum(_alternating(a.array, b.array, 4 * k), n)


def proof_vector_pair(a: Matrix, b: Matrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The two vectors in ``R_+^(n^2k)`` whose inner product is ``Tr((A o B)^2k)``.

    ``x`` has entries ``A_{i1 i2} B_{i2 i3} ... A_{i(2k-1) i2k} B_{i2k i1}``;
    ``y`` is the same with A and B exchanged.
    """
    _check_same(a, b)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _guard(a.n, 2 * k, PROOF_VECTOR_LIMIT)
    x = cyclic_products(_alternating(a.array, b.array, 2 * k), a.n)
    y = cyclic_products(_alternating(b.array, a.array, 2 * k), a.n)
    return x, y


def _rel_close(u: float, v: float, rtol: float) -> bool:
    return abs(u - v) <= rtol * max(abs(u), abs(v))


def proof_vectors(a: Matrix, b: Matrix, k: int) -> ProofTraceReport:
    """Materialize the Cauchy-Schwarz step and check its three claims.

    ``multiset_equal``: sorted ``x`` and sorted ``y`` agree entrywise to
    relative 1e-12. ``xy_equals_t1`` / ``xx_equals_t2``: the inner products
    ``<x, y>`` and ``<x, x>`` equal ``Tr((A o B)^2k)`` and
    ``Tr(((A o A)(B o B))^k)`` to relative 1e-10.
    """
    x, y = proof_vector_pair(a, b, k)
    xs, ys = np.sort(x), np.sort(y)
    multiset_equal = bool(np.all(np.abs(xs - ys) <= MULTISET_RTOL * np.maximum(xs, ys)))
    inner_xy = math.fsum(x * y)
    inner_xx = math.fsum(x * x)
    t1 = trace_of_power(hadamard(a, b), 2 * k)
    t2 = trace_of_power(matmul(entrywise_square(a), entrywise_square(b)), k)
    return ProofTraceReport(
        k=k,
        length=int(x.shape[0]),
        inner_xy=inner_xy,
        inner_xx=inner_xx,
        multiset_equal=multiset_equal,
        xy_equals_t1=t1.isclose(inner_xy, IDENTITY_RTOL),
        xx_equals_t2=t2.isclose(inner_xx, IDENTITY_RTOL),
    )


def diagonal_subset_sums(a: Matrix, b: Matrix, k: int) -> tuple[float, float]:
    """``(S_diag, S_full)`` for the ``4k``-index expansion of ``Tr((AB)^2k)``.

    ``S_full`` sums every term; ``S_diag`` keeps only the terms with
    ``i_t == j_t`` for all t, i.e. the products
    ``(A_{i1 i2} ... B_{i2k i1})^2`` over ``2k`` indices.
    """
    _check_same(a, b)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = a.n
    _guard(n, 4 * k, CONV_CYCLE_LIMIT)
    full = _cyclic_sum(_alternating(a.array, b.array, 4 * k), n)
    diag = math.fsum(
        float((chunk * chunk).sum()) for chunk in _cycle_chunks(_alternating(a.array, b.array, 2 * k), n)
    )
    return diag, full


def diagonal_subset_check(a: Matrix, b: Matrix, k: int) -> bool:
    """True iff ``S_diag <= S_full`` and ``S_diag == Tr(((A o A)(B o B))^k)`` (rel 1e-12)."""
    diag, full = diagonal_subset_sums(a, b, k)
    t2 = trace_of_power(matmul(entrywise_square(a), entrywise_square(b)), k)
    return diag <= full * (1 + SUBSET_RTOL) and t2.isclose(diag, SUBSET_RTOL)


# -- counterexample families ------------------------------------------------

def counterexample_pair() -> tuple[Matrix, Matrix]:
    """``A = [[0,0],[1,0]]``, ``B = [[1,1],[0,1]]``: rho(AB) = 1 > rho(A) rho(B) = 0."""
    return Matrix.from_rows([[0, 0], [1, 0]]), Matrix.from_rows([[1, 1], [0, 1]])


def unbounded_family(x: float, y: float) -> tuple[Matrix, Matrix, float]:
    """``A = [[1,x],[0,1]]``, ``B = [[1,0],[y,1]]`` and the exact ``rho(AB)``.

    ``AB = [[1+xy, x], [y, 1]]`` has determinant 1 and trace ``2 + xy``, so
    ``rho(AB) = ((2+xy) + sqrt((2+xy)^2 - 4)) / 2`` grows without bound while
    ``A o B = I``.
    """
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError("x and y must be finite")
    a = Matrix.from_rows([[1, x], [0, 1]])
    b = Matrix.from_rows([[1, 0], [y, 1]])
    p = x * y
    # (2+p)^2 - 4 == p (p + 4), without the cancellation
    rho = 0.5 * ((2.0 + p) + math.sqrt(p * (p + 4.0)))
    return a, b, rho
