"""One- and two-orbital reduced density matrices by fermionic partial trace.

Local Fock states of a single spatial orbital are ordered (empty, up, down,
doubly occupied) = indices 0..3; a pair (i, j) with i < j uses the composite
index 4 * state(i) + state(j).  Matrix elements carry the parity of the
permutation that moves the spin-orbitals of i (up then down) and then of j
in front of the remaining spin-orbitals, starting from the canonical
ordering of :mod:`orbent.ci` (all alpha ascending, then all beta ascending).
"""

import numpy as np

from .ci import _excitation_operator

__all__ = [
    "LOCAL_STATE_LABELS",
    "LOCAL_STATE_CHARS",
    "LOCAL_PARTICLE_NUMBER",
    "LOCAL_SZ_TWICE",
    "COMPOSITE_PARTICLE_NUMBER",
    "COMPOSITE_SZ_TWICE",
    "one_orbital_rdm",
    "two_orbital_rdm",
    "oracle_rdm",
    "spin_summed_1rdm",
    "rdm_spectrum",
]

LOCAL_STATE_LABELS = ("empty", "up", "down", "double")
LOCAL_STATE_CHARS = "0ab2"
LOCAL_PARTICLE_NUMBER = np.array([0, 1, 1, 2])
LOCAL_SZ_TWICE = np.array([0, 1, -1, 0])
# composite index 4*a + b for local states a of i and b of j
COMPOSITE_PARTICLE_NUMBER = (LOCAL_PARTICLE_NUMBER[:, None]
                             + LOCAL_PARTICLE_NUMBER[None, :]).ravel()
COMPOSITE_SZ_TWICE = (LOCAL_SZ_TWICE[:, None] + LOCAL_SZ_TWICE[None, :]).ravel()

EIGENVALUE_CLAMP = 1e-14


def _popcount(arr):
    return np.bitwise_count(arr).astype(np.int64)


def _check_orbital(basis, i):
    if not 0 <= i < basis.n_orb:
        raise IndexError(f"orbital index {i} outside 0..{basis.n_orb - 1}")


def one_orbital_rdm(psi, i):
    """4x4 density matrix of spatial orbital ``i`` (0-based).

    Determinant weights are grouped by the local state of orbital i and by
    the occupation pattern of all remaining orbitals; the result is diagonal
    for any fixed-(n_alpha, n_beta) state.
    """
    basis = psi.basis
    _check_orbital(basis, i)
    amask, bmask = basis.masks()
    bit = np.int64(1 << i)
    below = np.int64(bit - 1)
    a_i = ((amask & bit) != 0).astype(np.int64)
    b_i = ((bmask & bit) != 0).astype(np.int64)
    local = a_i + 2 * b_i
    env = (amask & ~bit) << np.int64(basis.n_orb) | (bmask & ~bit)
    pos_sum = (a_i * _popcount(amask & below)
               + b_i * (basis.n_alpha + _popcount(bmask & below)))
    m = a_i + b_i
    exponent = pos_sum - m * (m - 1) // 2
    signed = np.where(exponent % 2 == 0, 1.0, -1.0) * psi.coeffs
    _, group = np.unique(env, return_inverse=True)
    vectors = np.zeros((group.max() + 1, 4))
    vectors[group, local] = signed
    return vectors.T @ vectors


def two_orbital_rdm(psi, i, j):
    """16x16 density matrix of the orbital pair (i, j), i < j, 0-based."""
    basis = psi.basis
    _check_orbital(basis, i)
    _check_orbital(basis, j)
    if i == j:
        raise ValueError("two_orbital_rdm needs two distinct orbitals")
    if i > j:
        raise ValueError("orbital pair must be ordered i < j")
    amask, bmask = basis.masks()
    bit_i, bit_j = np.int64(1 << i), np.int64(1 << j)
    below_i, below_j = np.int64(bit_i - 1), np.int64(bit_j - 1)
    a_i = ((amask & bit_i) != 0).astype(np.int64)
    a_j = ((amask & bit_j) != 0).astype(np.int64)
    b_i = ((bmask & bit_i) != 0).astype(np.int64)
    b_j = ((bmask & bit_j) != 0).astype(np.int64)
    composite = 4 * (a_i + 2 * b_i) + (a_j + 2 * b_j)
    clear = ~(bit_i | bit_j)
    env = (amask & clear) << np.int64(basis.n_orb) | (bmask & clear)
    n_alpha = basis.n_alpha
    pos_sum = (a_i * _popcount(amask & below_i)
               + a_j * _popcount(amask & below_j)
               + b_i * (n_alpha + _popcount(bmask & below_i))
               + b_j * (n_alpha + _popcount(bmask & below_j)))
    m = a_i + a_j + b_i + b_j
    # extra transposition: canonical subset order (i-up, j-up, i-down, j-down)
    # versus target (i-up, i-down, j-up, j-down) swaps j-up with i-down
    exponent = pos_sum - m * (m - 1) // 2 + b_i * a_j
    signed = np.where(exponent % 2 == 0, 1.0, -1.0) * psi.coeffs
    _, group = np.unique(env, return_inverse=True)
    vectors = np.zeros((group.max() + 1, 16))
    vectors[group, composite] = signed
    return vectors.T @ vectors


def oracle_rdm(psi, orbitals, max_fock_dim=4 ** 8):
    """Reference RDM via brute-force embedding in the full orbital Fock space.

    The state is rebuilt mode by mode with Jordan-Wigner sign bookkeeping on
    a chain whose first modes are the requested orbitals (each as up then
    down), then the complement is traced out by direct summation.  Slow and
    simple on purpose; limited to subsets of at most 3 orbitals.
    """
    basis = psi.basis
    n = basis.n_orb
    orbitals = tuple(sorted(int(p) for p in orbitals))
    if len(set(orbitals)) != len(orbitals):
        raise ValueError("orbital subset contains duplicates")
    if not 1 <= len(orbitals) <= 3:
        raise ValueError("oracle subset must contain 1 to 3 orbitals")
    for p in orbitals:
        _check_orbital(basis, p)
    if 4 ** n > max_fock_dim:
        raise ValueError(f"Fock dimension 4^{n} exceeds cap {max_fock_dim}")

    mode_order = list(orbitals) + [p for p in range(n) if p not in orbitals]
    mode_rank = {p: k for k, p in enumerate(mode_order)}

    tensor = np.zeros((4,) * n)
    amask, bmask = basis.masks()
    for det, coeff in enumerate(psi.coeffs):
        am, bm = int(amask[det]), int(bmask[det])
        sequence = [2 * mode_rank[p] for p in range(n) if am >> p & 1]
        sequence += [2 * mode_rank[p] + 1 for p in range(n) if bm >> p & 1]
        bits = 0
        sign = 1.0
        for k in reversed(sequence):
            if (bits & ((1 << k) - 1)).bit_count() % 2:
                sign = -sign
            bits |= 1 << k
        local = tuple(
            (bits >> (2 * k) & 1) + 2 * (bits >> (2 * k + 1) & 1)
            for k in range(n)
        )
        tensor[local] += sign * coeff

    m = len(orbitals)
    flat = tensor.reshape(4 ** m, 4 ** (n - m))
    return flat @ flat.T


def spin_summed_1rdm(psi):
    """Spin-summed one-particle density matrix D_pq = <sum_s a+_ps a_qs>."""
    basis = psi.basis
    n = basis.n_orb
    na, nb = basis.grid_shape()
    grid = basis.to_grid(psi.coeffs)
    op_a = _excitation_operator(basis.alpha_strings, n)
    op_b = _excitation_operator(basis.beta_strings, n)
    t_a = (op_a @ grid).reshape(n, n, na, nb)
    t_b = (op_b @ grid.T).reshape(n, n, nb, na)
    return (np.einsum("pqij,ij->pq", t_a, grid)
            + np.einsum("pqji,ij->pq", t_b, grid))


def rdm_spectrum(rho):
    """Eigenvalues of a density matrix, ascending, with sub-1e-14 values
    clamped to zero so the w*ln(w) limit is safe against round-off."""
    w = np.linalg.eigvalsh(np.asarray(rho))
    w = np.where(np.abs(w) < EIGENVALUE_CLAMP, 0.0, w)
    return w
