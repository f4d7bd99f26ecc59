"""
Hadamard products are not submultiplicative for the spectral radius
===================================================================

The entrywise product behaves better than the ordinary one: for non-negative
matrices rho(A o B) never exceeds rho(AB), yet rho(AB) can be far larger
than rho(A) rho(B).
"""

import math

from zhanchain import counterexample_pair, hadamard, matmul, spectral_radius, unbounded_family, zhan_chain

# A nilpotent A times a unipotent B: both radii are tiny, the product is not.
a, b = counterexample_pair()
print("rho(A) =", spectral_radius(a).value)
print("rho(B) =", spectral_radius(b).value)
print("rho(AB) =", spectral_radius(matmul(a, b)).value)
print("rho(A o B) =", spectral_radius(hadamard(a, b)).value)

# The full chain, with certified enclosures for each radius.
report = zhan_chain(a, b)
print(report.rho_had, "<=", report.rho_mid, "<=", report.rho_conv, "holds:", report.holds)

# A one-parameter family where A o B = I while rho(AB) grows like t^2.
for t in (1, 2, 4, 8, 16):
    fa, fb, exact = unbounded_family(t, t)
    rho_had = spectral_radius(hadamard(fa, fb)).value
    rho_ab = spectral_radius(matmul(fa, fb)).value
    print(f"t={t:2d}  rho(AoB)={rho_had:.1f}  rho(AB)={rho_ab:12.6f}  exact={exact:12.6f}  ratio={rho_had / rho_ab:.3e}")

print("3 + 2 sqrt(2) =", 3 + 2 * math.sqrt(2))
