import numpy as np
import pytest

from orbent.ci import (CIHamiltonian, CIVector, DeterminantBasis,
                       dense_solve, enumerate_basis, s_squared, solve_lowest)
from orbent.integrals import IntegralSet

from conftest import (apply_create, apply_destroy, brute_hamiltonian,
                      occupation_of, random_integrals, random_state)


class TestBasis:
    def test_two_orbital_dimension(self):
        assert enumerate_basis(2, 1, 1).dimension == 4

    def test_nine_orbital_dimension(self):
        assert enumerate_basis(9, 5, 4).dimension == 15876

    def test_single_determinant(self):
        basis = enumerate_basis(2, 2, 0)
        assert basis.dimension == 1
        amask, bmask = basis.masks()
        assert amask[0] == 0b11 and bmask[0] == 0

    def test_strings_canonically_ordered(self):
        basis = enumerate_basis(4, 2, 1)
        assert np.all(np.diff(basis.alpha_strings) > 0)
        assert np.all(np.diff(basis.beta_strings) > 0)

    def test_no_duplicate_pairs(self):
        basis = enumerate_basis(4, 2, 2)
        seen = {tuple(p) for p in basis.pairs}
        assert len(seen) == basis.dimension

    def test_electron_count_error(self):
        with pytest.raises(ValueError):
            enumerate_basis(2, 3, 0)

    def test_symmetry_filtering(self):
        orbsym = [1, 2]
        basis = enumerate_basis(2, 1, 1, orbsym=orbsym, isym=1)
        # products of irreps under XOR on (label-1): only (1,1) and (2,2)
        # occupations stay in irrep 1
        assert basis.dimension == 2
        for k in range(basis.dimension):
            occ = basis.occupation_string(k)
            assert occ in ("20", "02")

    def test_symmetry_filtered_dimensions_add_up(self):
        orbsym = [1, 2, 1, 2]
        total = 0
        for isym in (1, 2):
            total += enumerate_basis(4, 2, 1, orbsym=orbsym, isym=isym).dimension
        assert total == enumerate_basis(4, 2, 1).dimension


class TestCIVector:
    def test_normalized(self):
        basis = enumerate_basis(2, 1, 1)
        psi = CIVector(basis, [2.0, 0.0, 0.0, 0.0])
        assert abs(np.linalg.norm(psi.coeffs) - 1.0) < 1e-12

    def test_length_mismatch(self):
        basis = enumerate_basis(2, 1, 1)
        with pytest.raises(ValueError):
            CIVector(basis, [1.0, 0.0])

    def test_zero_vector(self):
        basis = enumerate_basis(2, 1, 1)
        with pytest.raises(ValueError):
            CIVector(basis, np.zeros(4))


class TestHamiltonianAction:
    def test_single_determinant_sigma_is_diagonal(self, rng):
        ints = random_integrals(3, 6, 0, rng)
        basis = enumerate_basis(3, 3, 3)
        ham = CIHamiltonian(basis, ints)
        sig = ham.sigma(np.array([1.0]))
        assert sig.shape == (1,)
        assert abs(sig[0] - ham.diagonal_element(0)) < 1e-12
        assert abs(sig[0] - ham.matrix()[0, 0]) < 1e-12

    @pytest.mark.parametrize("n_orb,n_alpha,n_beta", [
        (2, 1, 1), (3, 2, 1), (4, 2, 2), (4, 1, 3), (3, 3, 1),
    ])
    def test_sigma_matches_operator_oracle(self, rng, n_orb, n_alpha, n_beta):
        ints = random_integrals(n_orb, n_alpha + n_beta, n_alpha - n_beta, rng)
        basis = enumerate_basis(n_orb, n_alpha, n_beta)
        ham = CIHamiltonian(basis, ints)
        H_ref = brute_hamiltonian(basis, ints)
        c = rng.standard_normal(basis.dimension)
        assert np.abs(ham.sigma(c) - H_ref @ c).max() < 1e-12 * max(
            1.0, np.abs(H_ref).max())
        assert np.abs(ham.matrix() - H_ref).max() < 1e-12 * max(
            1.0, np.abs(H_ref).max())
        assert np.abs(ham.diagonal() - np.diag(H_ref)).max() < 1e-12 * max(
            1.0, np.abs(H_ref).max())

    def test_sigma_hermitian(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        ham = CIHamiltonian(basis, ints)
        for _ in range(5):
            x = rng.standard_normal(basis.dimension)
            y = rng.standard_normal(basis.dimension)
            assert abs(x @ ham.sigma(y) - ham.sigma(x) @ y) < 1e-12 * (
                np.linalg.norm(x) * np.linalg.norm(y) * 10)

    def test_filtered_basis_matches_submatrix(self, rng):
        orbsym = [1, 2, 1, 2]
        ints = random_integrals(4, 3, 1, rng)
        full = enumerate_basis(4, 2, 1)
        sector = enumerate_basis(4, 2, 1, orbsym=orbsym, isym=2)
        ham_full = CIHamiltonian(full, ints)
        ham_sector = CIHamiltonian(sector, ints)
        H = ham_full.matrix()
        amask_f, bmask_f = full.masks()
        amask_s, bmask_s = sector.masks()
        sel = [full.index_of(a, b) for a, b in zip(amask_s, bmask_s)]
        assert np.allclose(ham_sector.matrix(), H[np.ix_(sel, sel)], atol=1e-12)
        c = rng.standard_normal(sector.dimension)
        assert np.allclose(
            ham_sector.sigma(c), H[np.ix_(sel, sel)] @ c, atol=1e-12)

    def test_double_excitation_sign_order_independent(self, rng):
        # the same alpha+beta double excitation applied through its two
        # single-excitation orderings must produce the same signed result
        basis = enumerate_basis(4, 2, 2)
        for det in range(0, basis.dimension, 3):
            occ = occupation_of(basis, det)
            n = basis.n_orb
            moves = []
            for p in range(n):
                for q in range(n):
                    if occ[p] and not occ[q]:
                        for r in range(n, 2 * n):
                            for s in range(n, 2 * n):
                                if occ[r] and not occ[s]:
                                    moves.append((p, q, r, s))
            for p, q, r, s in moves[:6]:
                first = apply_destroy(occ, p)
                step = apply_create(first[0], q)
                mid = (step[0], first[1] * step[1])
                step = apply_destroy(mid[0], r)
                mid2 = (step[0], mid[1] * step[1])
                step = apply_create(mid2[0], s)
                path_a = (step[0], mid2[1] * step[1])

                first = apply_destroy(occ, r)
                step = apply_create(first[0], s)
                mid = (step[0], first[1] * step[1])
                step = apply_destroy(mid[0], p)
                mid2 = (step[0], mid[1] * step[1])
                step = apply_create(mid2[0], q)
                path_b = (step[0], mid2[1] * step[1])
                assert path_a == path_b


class TestSolvers:
    def test_two_orbital_matches_dense(self, rng):
        ints = random_integrals(2, 2, 0, rng)
        basis = enumerate_basis(2, 1, 1)
        davidson = solve_lowest(basis, ints, tol=1e-10)
        dense = dense_solve(basis, ints)
        assert davidson.converged
        assert abs(davidson.energies[0] - dense.energies[0]) < 1e-10

    def test_single_determinant_energy_is_diagonal(self, rng):
        ints = random_integrals(3, 6, 0, rng)
        basis = enumerate_basis(3, 3, 3)
        result = solve_lowest(basis, ints)
        ham = CIHamiltonian(basis, ints)
        assert result.energies[0] == pytest.approx(
            ham.diagonal_element(0), abs=1e-14)

    def test_dense_closed_form_2x2(self):
        # one alpha electron in two orbitals: H = h + core
        ints = IntegralSet(2, 1, 1, core_energy=0.0)
        a, b, d = -1.0, 0.3, 0.5
        ints.set_h(1, 1, a)
        ints.set_h(2, 1, b)
        ints.set_h(2, 2, d)
        basis = enumerate_basis(2, 1, 0)
        dense = dense_solve(basis, ints)
        expected = (a + d) / 2 - np.hypot((a - d) / 2, b)
        assert dense.energies[0] == pytest.approx(expected, abs=1e-13)

    def test_agreement_on_random_instances(self, rng):
        for _ in range(12):
            n_orb = int(rng.integers(2, 5))
            n_alpha = int(rng.integers(1, n_orb + 1))
            n_beta = int(rng.integers(0, n_alpha + 1))
            ints = random_integrals(
                n_orb, n_alpha + n_beta, n_alpha - n_beta, rng)
            basis = enumerate_basis(n_orb, n_alpha, n_beta)
            n_roots = min(2, basis.dimension)
            davidson = solve_lowest(basis, ints, n_roots=n_roots)
            dense = dense_solve(basis, ints, n_roots=n_roots)
            assert np.abs(davidson.energies - dense.energies).max() < 1e-9

    def test_variational_bound(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        result = solve_lowest(basis, ints)
        diag = CIHamiltonian(basis, ints).diagonal()
        assert result.energies[0] <= diag.min() + 1e-12

    def test_residual_norms_below_tolerance(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        result = solve_lowest(basis, ints, n_roots=3, tol=1e-9)
        assert result.converged
        assert np.all(result.residual_norms <= 1e-9)
        ham = CIHamiltonian(basis, ints)
        for k, state in enumerate(result.states):
            res = np.linalg.norm(
                ham.sigma(state.coeffs) - result.energies[k] * state.coeffs)
            assert res <= 1e-8

    def test_eigenvalues_ascending(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        result = solve_lowest(basis, ints, n_roots=4)
        assert np.all(np.diff(result.energies) >= -1e-12)

    def test_non_convergence_flagged(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        result = solve_lowest(basis, ints, tol=1e-30, max_iter=2)
        assert not result.converged
        assert result.iterations <= 2
        assert np.isfinite(result.energies).all()

    def test_n_roots_exceeding_dimension(self, rng):
        ints = random_integrals(2, 2, 0, rng)
        basis = enumerate_basis(2, 1, 1)
        with pytest.raises(ValueError):
            solve_lowest(basis, ints, n_roots=5)
        with pytest.raises(ValueError):
            dense_solve(basis, ints, n_roots=5)

    def test_dense_cap(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        with pytest.raises(ValueError):
            dense_solve(basis, ints, cap=10)

    def test_degeneracy_count(self, rng):
        # two decoupled identical sectors give a doubly degenerate ground state
        ints = IntegralSet(2, 1, 1, core_energy=0.0)
        ints.set_h(1, 1, -1.0)
        ints.set_h(2, 2, -1.0)
        basis = enumerate_basis(2, 1, 0)
        result = dense_solve(basis, ints, n_roots=2)
        assert result.degeneracy() == 2

    def test_determinism(self, rng):
        ints = random_integrals(4, 4, 0, rng)
        basis = enumerate_basis(4, 2, 2)
        first = solve_lowest(basis, ints, n_roots=2)
        second = solve_lowest(basis, ints, n_roots=2)
        assert np.array_equal(first.energies, second.energies)
        for a, b in zip(first.states, second.states):
            assert np.array_equal(a.coeffs, b.coeffs)


class TestSpinDiagnostic:
    def test_high_spin_determinant(self):
        basis = enumerate_basis(2, 2, 0)
        psi = CIVector(basis, [1.0])
        assert s_squared(psi) == pytest.approx(2.0, abs=1e-12)

    def test_closed_shell(self):
        basis = enumerate_basis(2, 1, 1)
        # alpha and beta both in orbital 1: determinant (ia=0, ib=0)
        c = np.zeros(4)
        c[0] = 1.0
        assert s_squared(CIVector(basis, c)) == pytest.approx(0.0, abs=1e-12)

    def test_open_shell_singlet_and_triplet(self):
        basis = enumerate_basis(2, 1, 1)
        # determinants ordered (1a1b, 1a2b, 2a1b, 2a2b); the spin-product
        # singlet |ud> - |du> picks up a sign moving beta ops behind alpha,
        # so it is the plus combination of determinants
        singlet = np.array([0.0, 1.0, 1.0, 0.0])
        triplet = np.array([0.0, 1.0, -1.0, 0.0])
        assert s_squared(CIVector(basis, singlet)) == pytest.approx(0.0, abs=1e-12)
        assert s_squared(CIVector(basis, triplet)) == pytest.approx(2.0, abs=1e-12)

    def test_matches_brute_force_operator(self, rng):
        # S^2 via explicit operators in the occupation representation
        basis = enumerate_basis(3, 2, 1)
        psi = random_state(basis, rng)
        n = basis.n_orb
        dim = basis.dimension
        occs = [occupation_of(basis, d) for d in range(dim)]

        def splus(state):
            out = {}
            for occ, coeff in state.items():
                for p in range(n):
                    step = apply_destroy(occ, p + n)
                    if step is None:
                        continue
                    step2 = apply_create(step[0], p)
                    if step2 is None:
                        continue
                    key = step2[0]
                    out[key] = out.get(key, 0.0) + coeff * step[1] * step2[1]
            return out

        state = {occs[d]: psi.coeffs[d] for d in range(dim)}
        lifted = splus(state)
        sz = 0.5 * (basis.n_alpha - basis.n_beta)
        expected = sz * sz + sz + sum(v * v for v in lifted.values())
        assert s_squared(psi) == pytest.approx(expected, abs=1e-12)
