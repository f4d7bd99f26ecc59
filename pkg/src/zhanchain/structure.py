"""Zero-pattern digraph analysis: irreducibility, period, primitivity.

The digraph of ``A`` has an edge ``i -> j`` iff ``A[i, j] > 0``. The zero
threshold is exact; callers working with noisy data should threshold first.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .matrix import Matrix

__all__ = [
    "StructureReport",
    "strong_components",
    "analyze",
    "permutation_trace_period",
    "is_permutation_matrix",
    "permutation_matrix",
]

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class StructureReport:
    irreducible: bool
    scc_count: int
    period: int  # gcd of all cycle lengths; 0 when the digraph is acyclic
    primitive: bool

    def to_dict(self) -> dict:
        return asdict(self)


def strong_components(a: Matrix) -> list[np.ndarray]:
    """Vertex index arrays of the strongly connected components of ``a``'s digraph."""
    n = a.n
    if n == 1:
        return [np.array([0])]
    count, labels = connected_components(csr_matrix(a.array > 0), directed=True, connection="strong")
    return [np.flatnonzero(labels == c) for c in range(count)]


def _component_period(adj: np.ndarray, comp: np.ndarray) -> int:
    """gcd of cycle lengths inside one strong component (0 if it has none).

    BFS levels from an arbitrary root; every intra-component edge ``u -> v``
    contributes ``level[u] + 1 - level[v]`` to the gcd.
    """
    members = set(int(v) for v in comp)
    root = int(comp[0])
    level = {root: 0}
    queue = deque([root])
    g = 0
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in members:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, abs(level[u] + 1 - level[v]))
    return g


def analyze(a: Matrix) -> StructureReport:
    """Irreducibility, component count, period and primitivity of ``a``.

    Examples
    --------
    >>> analyze(Matrix.from_rows([[0, 1], [1, 0]]))
    StructureReport(irreducible=True, scc_count=1, period=2, primitive=False)
    """
    adj = a.array > 0
    comps = strong_components(a)
    period = reduce(math.gcd, (_component_period(adj, c) for c in comps), 0)
    irreducible = len(comps) == 1
    return StructureReport(
        irreducible=irreducible,
        scc_count=len(comps),
        period=period,
        primitive=irreducible and period == 1,
    )


def permutation_trace_period(cycle_lengths: Sequence[int]) -> int:
    """Period of ``m -> Tr(P^m)`` for a permutation with the given cycle type.

    This is the lcm of the cycle lengths. Raises ``OverflowError`` when the
    result does not fit a signed 64-bit integer.
    """
    lengths = [int(c) for c in cycle_lengths]
    if not lengths:
        raise ValueError("cycle type must be non-empty")
    if any(c < 1 for c in lengths):
        raise ValueError(f"cycle lengths must be positive, got {lengths}")
    out = math.lcm(*lengths)
    if out > _INT64_MAX:
        raise OverflowError(f"lcm {out} exceeds the 64-bit integer range")
    return out


def is_permutation_matrix(a: Matrix) -> Optional[tuple[int, ...]]:
    """Cycle type (sorted ascending) if ``a`` is a permutation matrix, else None."""
    arr = a.array
    if not np.all((arr == 0) | (arr == 1)):
        return None
    if not (np.all(arr.sum(axis=0) == 1) and np.all(arr.sum(axis=1) == 1)):
        return None
    target = arr.argmax(axis=1)
    seen = np.zeros(a.n, dtype=bool)
    cycles = []
    for start in range(a.n):
        if seen[start]:
            continue
        length, v = 0, start
        while not seen[v]:
            seen[v] = True
            v = int(target[v])
            length += 1
        cycles.append(length)
    return tuple(sorted(cycles))


def permutation_matrix(cycle_lengths: Sequence[int]) -> Matrix:
    """Block permutation matrix whose cycles have the given lengths, in order."""
    n = sum(cycle_lengths)
    p = np.zeros((n, n))
    start = 0
    for c in cycle_lengths:
        for t in range(c):
            p[start + t, start + (t + 1) % c] = 1.0
        start += c
    return Matrix(p)
