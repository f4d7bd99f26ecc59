"""Spectral radius of Hadamard versus conventional products of non-negative matrices.

Numerical checks of ``rho(A o B) <= rho((A o A)(B o B))^(1/2) <= rho(AB)``,
the trace-power representation of the spectral radius it rests on, and the
counterexample families around it.
"""
from .inequalities import (
    ChainReport,
    ProofTraceReport,
    SizeGuardExceeded,
    TraceChainReport,
    TracePattern,
    brute_force_trace_cycle,
    counterexample_pair,
    diagonal_subset_check,
    diagonal_subset_sums,
    hadamard_submult,
    proof_vectors,
    trace_chain,
    unbounded_family,
    zhan_chain,
)
from .matrix import (
    DimensionMismatch,
    LogScaledTrace,
    Matrix,
    MatrixError,
    NegativeEntry,
    NonFiniteEntry,
    entrywise_square,
    hadamard,
    matmul,
    new_checked,
    read_matrix,
    spectral_radius_2x2,
    trace_of_power,
    write_matrix,
)
from .spectral import (
    Method,
    NonPositiveVector,
    NotConverged,
    NotPositive,
    SpectralEstimate,
    TraceSequence,
    cw_bounds,
    lemma_limit_check,
    power_identity_check,
    spectral_radius,
    trace_sequence,
)
from .structure import (
    StructureReport,
    analyze,
    is_permutation_matrix,
    permutation_matrix,
    permutation_trace_period,
)

__version__ = "0.1.0"
