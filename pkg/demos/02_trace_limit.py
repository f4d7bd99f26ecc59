"""
Traces of powers and the spectral radius
========================================

For a positive matrix Tr(A^m)^(1/m) converges to rho(A). Periodic matrices
break this: their traces vanish on whole residue classes of m.
"""

import numpy as np

from zhanchain import Matrix, analyze, spectral_radius, trace_sequence
from zhanchain.structure import permutation_matrix, permutation_trace_period
from zhanchain.matrix import trace_of_power

rng = np.random.default_rng(0)
a = Matrix(rng.uniform(0.1, 1.0, (5, 5)))
rho = spectral_radius(a).value

# s_m = Tr(A^m)^(1/m); traces are kept in log scale so m can be large.
seq = trace_sequence(a, 40)
for m in (1, 2, 5, 10, 20, 40):
    print(f"m={m:2d}  s_m={seq.at(m):.10f}  |s_m - rho|={abs(seq.at(m) - rho):.2e}")

# The swap matrix has period 2: odd traces are zero, even ones equal 2.
swap = Matrix.from_rows([[0, 1], [1, 0]])
print(analyze(swap))
print("swap sequence:", trace_sequence(swap, 8).s, "oscillating:", trace_sequence(swap, 8).oscillating)

# A permutation with cycles of length 2 and 3 repeats its traces every lcm(2, 3) = 6 steps.
p = permutation_matrix([2, 3])
print("traces:", [trace_of_power(p, m).value for m in range(1, 13)])
print("period:", permutation_trace_period([2, 3]))
