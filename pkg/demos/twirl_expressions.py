"""
Monte-Carlo twirls and permutation expressions
==============================================

"""

import numpy as np

from rmps.dense import haar_twirl_monte_carlo, permutation_twirl

# The Haar average of U (x) U* is the projector onto the maximally
# entangled vector, Pi_n = (1/n) sum_{l,l'} |l,l><l',l'|.  A
# Monte-Carlo average over r unitaries converges to it at 1/sqrt(r).
n, r = 3, 20000
mc = haar_twirl_monte_carlo(1, n, r, 13)
pi = permutation_twirl(1, n)
print(f"one copy, dim {n}: max |MC - projector| = "
      f"{np.abs(mc - pi).max():.4f} (expect ~{1 / np.sqrt(r):.4f})")

# The projector is rank one and idempotent.
print("rank:", np.linalg.matrix_rank(pi))
print("idempotency defect:", np.abs(pi @ pi - pi).max())

# With two copies, U (x) U (x) U* (x) U* averages to a combination of
# the two permutation operators of S_2.  The unit-normalized
# permutation-vector expression below is the correct span but not the
# exact Weingarten combination, so a finite deviation remains even at
# infinite r -- it shrinks as the dimension grows.
for n in (2, 3, 4):
    mc2 = haar_twirl_monte_carlo(2, n, 4000, 14)
    perm2 = permutation_twirl(2, n)
    print(f"two copies, dim {n}: max |MC - permutation expression| = "
          f"{np.abs(mc2 - perm2).max():.4f}")

# Reproducibility: the same seed gives the same average, bit for bit.
again = haar_twirl_monte_carlo(1, 3, 100, 99)
print("deterministic:",
      np.array_equal(again, haar_twirl_monte_carlo(1, 3, 100, 99)))
