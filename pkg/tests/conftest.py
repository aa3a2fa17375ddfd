"""Shared fixtures: random problem generators and brute-force oracles.

The brute-force Hamiltonian here is deliberately independent of the string
machinery in orbent.ci: determinants are occupation vectors over 2*n_orb
spin-orbitals (alpha block first, then beta block) and every matrix element
comes from applying explicit creation/annihilation operator strings.
"""

import numpy as np
import pytest

from orbent.ci import CIVector, DeterminantBasis
from orbent.integrals import IntegralSet


def random_integrals(n_orb, n_elec, ms2, rng, scale=1.0, core=None):
    """IntegralSet with random symmetric h and 8-fold symmetric (pq|rs)."""
    h = rng.standard_normal((n_orb, n_orb)) * scale
    h = 0.5 * (h + h.T)
    g = rng.standard_normal((n_orb,) * 4) * scale
    g = g + g.transpose(1, 0, 2, 3)
    g = g + g.transpose(0, 1, 3, 2)
    g = g + g.transpose(2, 3, 0, 1)
    if core is None:
        core = float(rng.standard_normal())
    return IntegralSet.from_arrays(h, g, core, n_elec, ms2)


def random_state(basis, rng):
    return CIVector(basis, rng.standard_normal(basis.dimension))


def random_basis(rng, n_orb_range=(3, 5)):
    """Random small basis with at least one alpha and one beta electron."""
    n_orb = int(rng.integers(n_orb_range[0], n_orb_range[1] + 1))
    n_alpha = int(rng.integers(1, n_orb + 1))
    n_beta = int(rng.integers(1, n_orb + 1))
    return DeterminantBasis(n_orb, n_alpha, n_beta)


# -- brute-force second quantization ----------------------------------------

def apply_destroy(occ, k):
    """a_k |occ> -> (occ', sign) or None; sign counts set modes below k."""
    if not occ[k]:
        return None
    sign = -1.0 if sum(occ[:k]) % 2 else 1.0
    new = list(occ)
    new[k] = 0
    return tuple(new), sign


def apply_create(occ, k):
    """a+_k |occ> -> (occ', sign) or None."""
    if occ[k]:
        return None
    sign = -1.0 if sum(occ[:k]) % 2 else 1.0
    new = list(occ)
    new[k] = 1
    return tuple(new), sign


def _apply_string(occ, operators):
    """Apply [(mode, is_create), ...] right to left; returns (occ', sign) or None."""
    sign = 1.0
    for mode, is_create in reversed(operators):
        step = apply_create(occ, mode) if is_create else apply_destroy(occ, mode)
        if step is None:
            return None
        occ, s = step
        sign *= s
    return occ, sign


def occupation_of(basis, det):
    """Occupation tuple over 2*n_orb spin-orbitals of basis determinant det."""
    n = basis.n_orb
    ia, ib = basis.pairs[det]
    amask = int(basis.alpha_strings[ia])
    bmask = int(basis.beta_strings[ib])
    return tuple(
        [amask >> p & 1 for p in range(n)] + [bmask >> p & 1 for p in range(n)]
    )


def brute_hamiltonian(basis, integrals):
    """Dense H over the basis from explicit operator-string application."""
    n = basis.n_orb
    dim = basis.dimension
    index = {occupation_of(basis, d): d for d in range(dim)}
    h = integrals.h_matrix()
    g = integrals.eri_tensor()

    H = np.zeros((dim, dim))
    H[np.diag_indices(dim)] += integrals.core_energy
    for det in range(dim):
        occ = occupation_of(basis, det)
        column = {}

        def add(target, value):
            if target in index:
                column[target] = column.get(target, 0.0) + value

        for p in range(n):
            for q in range(n):
                if h[p, q] == 0.0:
                    continue
                for spin in (0, n):
                    result = _apply_string(
                        occ, [(p + spin, True), (q + spin, False)])
                    if result:
                        add(result[0], h[p, q] * result[1])
        for p in range(n):
            for q in range(n):
                for r in range(n):
                    for s in range(n):
                        if g[p, q, r, s] == 0.0:
                            continue
                        for sp1 in (0, n):
                            for sp2 in (0, n):
                                result = _apply_string(occ, [
                                    (p + sp1, True), (r + sp2, True),
                                    (s + sp2, False), (q + sp1, False),
                                ])
                                if result:
                                    add(result[0],
                                        0.5 * g[p, q, r, s] * result[1])
        for target, value in column.items():
            H[index[target], det] += value
    return H


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
