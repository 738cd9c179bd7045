#!/usr/bin/env python3
"""A complete generalization experiment at demo scale.

Trains every basis method on nine parameter configurations of the
cantilever lattice and scores the reduced models on sixteen unseen
parameters: relative state errors, Hamiltonian preservation, and the
projection-error decay.  The command-line tool runs the same pipeline
with CSV outputs (`sympmor evaluate`); this script keeps everything
in memory and prints the highlights.
"""

import numpy as np

from sympmor import (
    METHODS,
    CantileverLattice,
    run_generalization_experiment,
    standard_design,
)

SWEEP = (8, 16, 24, 32)

print("autonomous model (constant tip load): energy preservation")
family = CantileverLattice(8, 2, forcing_kind="constant_tip")
design = standard_design(nt=101, sweep=SWEEP)
report = run_generalization_experiment(
    family, design, ("pod_full", "psd_complex_svd", "psd_svd_like"))
counts = report.preservation_counts()
print(f"{'method':<18s}" + "".join(f"  2k={s:<4d}" for s in SWEEP))
for method in report.methods:
    row = [counts[(method, s)] for s in SWEEP]
    print(f"{method:<18s}" + "".join(f"  {a:>2d}/{b:<4d}" for a, b in row))
print("the symplectic reductions preserve the reduced Hamiltonian in")
print("every run; the orthogonal baseline never does.\n")

print("forced model (sinusoidal tip load): test-set accuracy")
family = CantileverLattice(8, 2, forcing_kind="sinusoidal_tip",
                           tip_preload=1.0)
report = run_generalization_experiment(family, design, tuple(METHODS))

print(f"{'method':<20s}" + "".join(f"  2k={s:<8d}" for s in SWEEP))
for method in report.methods:
    meds = []
    for s in SWEEP:
        vals = [r.rel_err for r in report.rows
                if r.method == method and r.two_k == s
                and r.status == "ok" and np.isfinite(r.rel_err)]
        meds.append(np.median(vals) if vals else np.nan)
    print(f"{method:<20s}" + "".join(f"  {v:<10.2e}" for v in meds))

print()
print("median relative error over the 16 test parameters; the")
print("orthogonal baselines are unstable (errors far above one),")
print("the symplectic reductions converge, and the non-orthonormal")
print("method is consistently the most accurate.")
