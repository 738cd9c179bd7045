#!/usr/bin/env python3
"""All seven basis generators on one snapshot set.

Shows the trade-offs at a glance: the orthogonal baselines minimize
the orthogonal projection error but ignore the symplectic pairing;
the orthonormal symplectic family keeps both defects at zero; the
decomposition-based method gives up orthonormality and buys the
smallest symplectic projection error of all.
"""

import numpy as np

from sympmor import (
    METHODS,
    CantileverLattice,
    build_basis,
    pod_loss,
    psd_loss,
    snapshot_collect,
    standard_design,
)

family = CantileverLattice(8, 2, forcing_kind="sinusoidal_tip",
                           tip_preload=1.0)
design = standard_design(nt=81, sweep=(8,))
snaps = snapshot_collect(design, family.assemble)
X = snaps.data
two_k = 12
total = np.linalg.norm(X) ** 2

print(f"snapshot matrix {snaps.dim} x {snaps.ns}, basis size 2k = {two_k}")
print(f"{'method':<20s} {'kind':<26s} {'o_V':>9s} {'s_V':>9s} "
      f"{'orth loss':>10s} {'sympl loss':>10s}")
for name in METHODS:
    V = build_basis(name, X, two_k)
    o, s = V.measures()
    orth = pod_loss(V, X) / total
    sympl = psd_loss(V, X) / total if V.is_symplectic else np.nan
    sympl_txt = f"{sympl:>10.2e}" if np.isfinite(sympl) else f"{'-':>10s}"
    print(f"{name:<20s} {V.kind:<26s} {o:>9.1e} {s:>9.1e} "
          f"{orth:>10.2e} {sympl_txt}")

print()
print("notes:")
print(" * pod_full minimizes the orthogonal loss; nothing beats it there")
print(" * the three orthonormal symplectic methods agree on both "
      "defects;")
print("   the augmented-snapshot route and the complex route even share")
print("   their projector, and the greedy method lands close")
print(" * psd_svd_like trades o_V away for the best symplectic loss")
