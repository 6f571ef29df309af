"""
Building a random MPS by sequential generation
==============================================

"""

import numpy as np

from rmps.haar import haar_unitary
from rmps.mps import LocalObservable, a_matrices_from_unitary, sample_rmps

# Sequential generation prepares an entangled chain one site at a time:
# a Haar-random unitary acts on the current site plus a chi-dimensional
# ancilla, and the site matrices are the blocks A^i[a, b] = <i, a|U|0, b>.
chi = 3
u = haar_unitary(2 * chi, 11)
a = a_matrices_from_unitary(u, 2, chi)
print("site tensor shape (phys, chi, chi):", a.shape)

# Cutting blocks out of a unitary makes the tensor an exact isometry,
# sum_i A^i{}^dag A^i = identity.  This is what normalizes the state
# and drives all the concentration results.
defect = np.abs(sum(m.conj().T @ m for m in a) - np.eye(chi)).max()
print("isometry defect:", defect)

# sample_rmps draws one tensor set per site (or one shared set with
# homogeneous=True) plus a random right boundary vector.
m = sample_rmps(6, 2, chi, 42)
print("norm^2 of a 6-site chain:", m.norm_squared())

# Amplitudes are matrix products: <left| A^{i_1} ... A^{i_N} |right>.
# For a tiny chain, check one amplitude by hand against to_dense().
m3 = sample_rmps(3, 2, 2, 5)
i1, i2, i3 = 1, 0, 1
by_hand = m3.left_vec.conj() @ (m3.tensors[0][i1] @ m3.tensors[1][i2]
                                @ m3.tensors[2][i3]) @ m3.right_vec
dense = m3.to_dense().amplitudes[i1 * 4 + i2 * 2 + i3]
print("amplitude by hand:", by_hand)
print("amplitude dense:  ", dense)

# Expectation values contract the chain in O(N D chi^3) without ever
# building the 2^N amplitude vector.
sz = np.array([[1.0, 0.0], [0.0, -1.0]])
print("<sigma_z at site 2> =", m.expectation(LocalObservable((sz,), 2)))

# Rings close the matrix product with a trace instead of boundary
# vectors and have no open indices.
ring = sample_rmps(6, 2, chi, 42, boundary="pbc")
print("ring norm^2:", ring.norm_squared())
