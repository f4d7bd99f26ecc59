"""
The trace inequalities behind the spectral chain
================================================

Tr((A o B)^2k) <= Tr(((A o A)(B o B))^k) <= Tr((AB)^2k). The first step is
Cauchy-Schwarz on two vectors with the same multiset of entries; the second
keeps only the diagonal terms of a sum of non-negative products.
"""

import numpy as np

from zhanchain import Matrix, trace_chain
from zhanchain.inequalities import TracePattern, brute_force_trace_cycle, diagonal_subset_sums, proof_vector_pair

rng = np.random.default_rng(3)
a = Matrix(rng.random((3, 3)))
b = Matrix(rng.random((3, 3)))
k = 2

tc = trace_chain(a, b, k)
print("t1 =", tc.t1.value, " t2 =", tc.t2.value, " t3 =", tc.t3.value, " holds:", tc.holds)

# The same traces as explicit cyclic sums over n^(2k) and n^(4k) indices.
print("brute t1 =", brute_force_trace_cycle(a, b, k, TracePattern.HADAMARD_CYCLE))
print("brute t3 =", brute_force_trace_cycle(a, b, k, TracePattern.CONV_CYCLE))

# x and y are permutations of each other, so <x, y> <= |x| |y| = <x, x>.
x, y = proof_vector_pair(a, b, k)
print("same multiset:", np.allclose(np.sort(x), np.sort(y)))
print("<x,y> =", x @ y, " <x,x> =", x @ x)

s_diag, s_full = diagonal_subset_sums(a, b, k)
print("S_diag =", s_diag, "<= S_full =", s_full)
