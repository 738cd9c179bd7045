#!/usr/bin/env python3
"""Tour of the canonical symplectic toolkit.

Walks through the structure matrix J, the symplectic inverse, the two
basis-quality measures and the (oblique) symplectic projection on
matrices small enough to print.
"""

import numpy as np

from sympmor import (
    apply_poisson,
    classify_basis,
    orthonormality_measure,
    symplectic_inverse,
    symplectic_projection,
    symplecticity_measure,
)

np.set_printoptions(precision=4, suppress=True)

print("=" * 64)
print("1. The structure matrix J acts by swapping (q, p) -> (p, -q)")
print("=" * 64)
v = np.array([3.0, 5.0])
print(f"J @ {v} = {apply_poisson(v)}")
v = np.array([1.0, 2.0, 3.0, 4.0])
print(f"J @ {v} = {apply_poisson(v)}")
print(f"v . (J v) = {v @ apply_poisson(v):.1f}   (always zero: J is skew)")

print()
print("=" * 64)
print("2. Symplectic inverse: a left inverse for symplectic matrices")
print("=" * 64)
A = np.diag([2.0, 0.5])   # symplectic: det = 1 on the (q, p) pair
Ap = symplectic_inverse(A)
print("A =\n", A)
print("A^+ =\n", Ap)
print("A^+ A =\n", Ap @ A)

print()
print("=" * 64)
print("3. Basis measures: orthonormality o_V and symplecticity s_V")
print("=" * 64)
n = 3
canonical = np.eye(2 * n)[:, [0, 1, n, n + 1]]   # [e1 e2 e4 e5]
print("canonical pair basis:     o_V = %.2e, s_V = %.2e -> %s" % (
    orthonormality_measure(canonical), symplecticity_measure(canonical),
    classify_basis(canonical)))

stretched = canonical.copy()
stretched[:, 0] *= 2.0
stretched[:, 2] /= 2.0   # rescale the conjugate column too
print("stretched pair basis:     o_V = %.2e, s_V = %.2e -> %s" % (
    orthonormality_measure(stretched), symplecticity_measure(stretched),
    classify_basis(stretched)))

rng = np.random.default_rng(3)
Q, _ = np.linalg.qr(rng.standard_normal((2 * n, 4)))
print("random orthonormal basis: o_V = %.2e, s_V = %.2e -> %s" % (
    orthonormality_measure(Q), symplecticity_measure(Q),
    classify_basis(Q)))

print()
print("=" * 64)
print("4. Symplectic projection P = V V^+ is oblique but idempotent")
print("=" * 64)
V = stretched
X = rng.standard_normal((2 * n, 3))
PX = symplectic_projection(V, X)
PPX = symplectic_projection(V, PX)
print(f"||P X - P P X||_F = {np.linalg.norm(PX - PPX):.2e}")
inside = V @ rng.standard_normal((4, 2))
print(f"||P y - y||_F for y in span(V): "
      f"{np.linalg.norm(symplectic_projection(V, inside) - inside):.2e}")
