"""
Purity of the empirical average via pairwise overlaps
=====================================================

"""

import numpy as np

from rmps.ensembles import (
    EnsembleSpec,
    RmpsSource,
    purity_of_average_via_overlaps,
    purity_relative_error,
)

# Tr[(average state)^2] decomposes into 1/r (the self terms) plus the
# cross term (1/r^2) sum_{i != j} |<psi_i|psi_j>|^2.  For the
# sequential ensemble the cross term approaches 1/2^N, so it can be
# estimated by r^2/2 overlap contractions without building any 2^N
# vector -- this is how mixedness is certified far beyond dense sizes.
for n in (10, 20, 30):
    spec = EnsembleSpec(RmpsSource(n, 2, 2), 300, 3)
    rep = purity_of_average_via_overlaps(spec)
    rel = purity_relative_error(spec, rep)
    print(f"N={n:2d}: cross term = {rep.value:.3e}  "
          f"2^-N = {2.0**-n:.3e}  relative error = {rel:+.3f}")

# The relative error stays flat as N grows (it does not blow up even
# though 2^-N spans six orders of magnitude above), because the
# overlap statistics self-average: each |<psi_i|psi_j>|^2 is itself
# concentrated around 2^-N.
spec = EnsembleSpec(RmpsSource(24, 2, 2), 300, 3)
rep = purity_of_average_via_overlaps(spec)
print("jackknife stderr at N=24, in units of 2^-N:",
      round(rep.stderr * 2.0**24, 3))

# The full purity of the empirical average is 1/r + cross term; with
# identical samples it would be 1, with orthogonal ones exactly 1/r.
print("full purity at N=24, r=300:", rep.value + 1 / spec.r)
