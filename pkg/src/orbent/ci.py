"""Determinant CI: basis enumeration, Hamiltonian action, eigensolvers.

Determinants factorize into alpha and beta occupation bitmasks over the
spatial orbitals (bit p set means orbital p is occupied by that spin).
The canonical spin-orbital ordering is all alpha spin-orbitals ascending,
then all beta spin-orbitals ascending; every fermionic sign in this package
counts occupied spin-orbitals in that ordering.
"""

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

__all__ = [
    "DeterminantBasis",
    "CIVector",
    "SpectrumResult",
    "CIHamiltonian",
    "enumerate_basis",
    "solve_lowest",
    "dense_solve",
    "s_squared",
]

DEGENERACY_WINDOW = 1e-6      # roots within this of the lowest count as degenerate
DENSE_DIMENSION_CAP = 20000


def _bitstrings(n_orb, n_elec):
    """All n_orb-bit masks with n_elec bits set, ascending by value."""
    masks = [
        sum(1 << p for p in combo)
        for combo in itertools.combinations(range(n_orb), n_elec)
    ]
    return np.array(sorted(masks), dtype=np.int64)


def _string_irreps(strings, orbsym):
    """XOR-product irrep (0-based) of the occupied orbitals of each string."""
    labels = np.asarray([s - 1 for s in orbsym], dtype=np.int64)
    out = np.zeros(len(strings), dtype=np.int64)
    for p, lab in enumerate(labels):
        occ = (strings >> p) & 1
        out ^= occ * lab
    return out


class DeterminantBasis:
    """Slater-determinant space for fixed (n_orb, n_alpha, n_beta).

    Strings are stored ascending by bitmask value and determinants are
    ordered alpha-major, so enumeration is deterministic.  When both
    ``orbsym`` and ``isym`` are given, only determinants whose occupied
    orbitals XOR-multiply (on label-1) to irrep isym-1 are retained.
    """

    def __init__(self, n_orb, n_alpha, n_beta, orbsym=None, isym=None):
        if not 0 <= n_alpha <= n_orb or not 0 <= n_beta <= n_orb:
            raise ValueError(
                f"electron counts ({n_alpha}a, {n_beta}b) exceed {n_orb} orbitals")
        self.n_orb = int(n_orb)
        self.n_alpha = int(n_alpha)
        self.n_beta = int(n_beta)
        self.alpha_strings = _bitstrings(n_orb, n_alpha)
        self.beta_strings = _bitstrings(n_orb, n_beta)
        na, nb = len(self.alpha_strings), len(self.beta_strings)
        ia, ib = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
        pairs = np.column_stack([ia.ravel(), ib.ravel()])
        self.filtered = orbsym is not None and isym is not None
        if self.filtered:
            sym_a = _string_irreps(self.alpha_strings, orbsym)
            sym_b = _string_irreps(self.beta_strings, orbsym)
            keep = (sym_a[pairs[:, 0]] ^ sym_b[pairs[:, 1]]) == (isym - 1)
            pairs = pairs[keep]
        self.pairs = np.ascontiguousarray(pairs, dtype=np.int64)
        self._index = None

    @property
    def dimension(self):
        return len(self.pairs)

    @property
    def n_elec(self):
        return self.n_alpha + self.n_beta

    def masks(self):
        """(alpha, beta) bitmask arrays of every determinant, in basis order."""
        return (self.alpha_strings[self.pairs[:, 0]],
                self.beta_strings[self.pairs[:, 1]])

    def index_of(self, alpha_mask, beta_mask):
        """Basis index of the determinant with the given masks, or -1."""
        if self._index is None:
            am, bm = self.masks()
            self._index = {
                (int(a), int(b)): k for k, (a, b) in enumerate(zip(am, bm))
            }
        return self._index.get((int(alpha_mask), int(beta_mask)), -1)

    def occupation_string(self, k):
        """Per-orbital occupation characters of determinant k: 0/a/b/2."""
        ia, ib = self.pairs[k]
        amask = int(self.alpha_strings[ia])
        bmask = int(self.beta_strings[ib])
        chars = []
        for p in range(self.n_orb):
            a, b = amask >> p & 1, bmask >> p & 1
            chars.append("0ab2"[a + 2 * b])
        return "".join(chars)

    def grid_shape(self):
        return len(self.alpha_strings), len(self.beta_strings)

    def to_grid(self, coeffs):
        """Scatter a coefficient vector onto the full (alpha, beta) string grid."""
        na, nb = self.grid_shape()
        if not self.filtered:
            return np.asarray(coeffs, dtype=float).reshape(na, nb)
        grid = np.zeros((na, nb))
        grid[self.pairs[:, 0], self.pairs[:, 1]] = coeffs
        return grid

    def from_grid(self, grid):
        if not self.filtered:
            return grid.ravel()
        return grid[self.pairs[:, 0], self.pairs[:, 1]]


def enumerate_basis(n_orb, n_alpha, n_beta, orbsym=None, isym=None):
    """Deterministically ordered determinant basis; see :class:`DeterminantBasis`."""
    return DeterminantBasis(n_orb, n_alpha, n_beta, orbsym=orbsym, isym=isym)


@dataclass(eq=False)
class CIVector:
    """Unit-norm real coefficient vector over a determinant basis."""

    basis: DeterminantBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.basis.dimension,):
            raise ValueError(
                f"coefficient length {c.shape} does not match basis "
                f"dimension {self.basis.dimension}")
        norm = np.linalg.norm(c)
        if not np.isfinite(norm) or norm < 1e-14:
            raise ValueError("coefficient vector has no usable norm")
        self.coeffs = c / norm


@dataclass(eq=False)
class SpectrumResult:
    """Lowest eigenpairs of a CI Hamiltonian, ascending."""

    energies: np.ndarray
    states: list
    residual_norms: np.ndarray
    iterations: int
    converged: bool

    def degeneracy(self, window=DEGENERACY_WINDOW):
        """How many computed roots lie within ``window`` of the lowest."""
        return int(np.sum(self.energies <= self.energies[0] + window))


def _excitation_table(strings, n_orb):
    """Single-excitation table of one spin string set.

    Returns (src, label, tgt, sign) arrays with label = p * n_orb + q and
    sign = <tgt| a+_p a_q |src> for every nonvanishing pair.
    """
    index = {int(m): i for i, m in enumerate(strings)}
    src, label, tgt, sign = [], [], [], []
    for i, mask in enumerate(strings):
        mask = int(mask)
        occ = [p for p in range(n_orb) if mask >> p & 1]
        for q in occ:
            m1 = mask & ~(1 << q)
            par_q = (mask & ((1 << q) - 1)).bit_count()
            for p in range(n_orb):
                if p == q:
                    src.append(i)
                    label.append(p * n_orb + q)
                    tgt.append(i)
                    sign.append(1.0)
                    continue
                if m1 >> p & 1:
                    continue
                par_p = (m1 & ((1 << p) - 1)).bit_count()
                src.append(i)
                label.append(p * n_orb + q)
                tgt.append(index[m1 | (1 << p)])
                sign.append(-1.0 if (par_q + par_p) % 2 else 1.0)
    return (np.array(src, dtype=np.int64), np.array(label, dtype=np.int64),
            np.array(tgt, dtype=np.int64), np.array(sign, dtype=float))


def _excitation_operator(strings, n_orb):
    """Sparse map C -> t[p*n_orb+q, tgt] = sum_src <tgt|a+_p a_q|src> C[src]."""
    n = len(strings)
    src, label, tgt, sign = _excitation_table(strings, n_orb)
    rows = label * n + tgt
    mat = scipy.sparse.csr_matrix(
        (sign, (rows, src)), shape=(n_orb * n_orb * n, n))
    return mat


class CIHamiltonian:
    """Second-quantized Hamiltonian bound to a basis and integral set.

    The two-electron part acts through alpha/beta string excitation tables;
    the one-electron part is folded into an effective two-electron tensor.
    All operations are pure functions of the immutable inputs.
    """

    def __init__(self, basis, integrals):
        if integrals.n_orb != basis.n_orb:
            raise ValueError("basis and integrals disagree on orbital count")
        self.basis = basis
        self.integrals = integrals
        self.core_energy = integrals.core_energy
        n = basis.n_orb
        h = integrals.h_matrix()
        g = integrals.eri_tensor()
        nel = basis.n_elec
        g_eff = g.copy()
        if nel > 0:
            f = (h - 0.5 * np.einsum("prrq->pq", g)) / nel
            for k in range(n):
                g_eff[k, k, :, :] += f
                g_eff[:, :, k, k] += f
        self._g2 = 0.5 * g_eff.reshape(n * n, n * n)
        self._coulomb = np.einsum("ppqq->pq", g)
        self._exchange = np.einsum("pqqp->pq", g)
        self._h_diag = np.diag(h)
        self._op_a = _excitation_operator(basis.alpha_strings, n)
        self._op_b = _excitation_operator(basis.beta_strings, n)

    def _occupancies(self, strings):
        occ = np.zeros((len(strings), self.basis.n_orb))
        for p in range(self.basis.n_orb):
            occ[:, p] = (strings >> p) & 1
        return occ

    def diagonal(self):
        """All diagonal matrix elements <D|H|D>, in basis order."""
        occ_a = self._occupancies(self.basis.alpha_strings)
        occ_b = self._occupancies(self.basis.beta_strings)
        J, K = self._coulomb, self._exchange

        def same_spin(occ):
            one = occ @ self._h_diag
            coul = 0.5 * np.einsum("ip,pq,iq->i", occ, J, occ)
            exch = 0.5 * np.einsum("ip,pq,iq->i", occ, K, occ)
            return one + coul - exch

        part_a = same_spin(occ_a)
        part_b = same_spin(occ_b)
        cross = occ_a @ J @ occ_b.T
        grid = self.core_energy + part_a[:, None] + part_b[None, :] + cross
        return self.basis.from_grid(grid)

    def diagonal_element(self, det):
        """<D|H|D> for a determinant given as (alpha_mask, beta_mask) or index."""
        if isinstance(det, (int, np.integer)):
            ia, ib = self.basis.pairs[det]
            amask = int(self.basis.alpha_strings[ia])
            bmask = int(self.basis.beta_strings[ib])
        else:
            amask, bmask = int(det[0]), int(det[1])
        n = self.basis.n_orb
        occ_a = [p for p in range(n) if amask >> p & 1]
        occ_b = [p for p in range(n) if bmask >> p & 1]
        e = self.core_energy
        e += sum(self._h_diag[p] for p in occ_a + occ_b)
        for occ in (occ_a, occ_b):
            for p in occ:
                for q in occ:
                    e += 0.5 * (self._coulomb[p, q] - self._exchange[p, q])
        for p in occ_a:
            for q in occ_b:
                e += self._coulomb[p, q]
        return float(e)

    def sigma(self, coeffs):
        """Matrix-vector product H @ c, core energy included."""
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.basis.dimension,):
            raise ValueError(
                f"vector length {c.shape} does not match basis dimension "
                f"{self.basis.dimension}")
        n = self.basis.n_orb
        n2 = n * n
        na, nb = self.basis.grid_shape()
        grid = self.basis.to_grid(c)
        if self.basis.n_elec == 0:
            return self.core_energy * c

        t1 = (self._op_a @ grid).reshape(n2, na, nb)
        t1 += (self._op_b @ grid.T).reshape(n2, nb, na).transpose(0, 2, 1)
        t2 = (self._g2 @ t1.reshape(n2, na * nb)).reshape(n, n, na, nb)
        out = (self._op_a.T @ t2.transpose(1, 0, 2, 3).reshape(n2 * na, nb))
        out += (self._op_b.T
                @ t2.transpose(1, 0, 3, 2).reshape(n2 * nb, na)).T
        out += self.core_energy * grid
        return self.basis.from_grid(out)

    def matrix(self, cap=DENSE_DIMENSION_CAP):
        """Dense Hamiltonian matrix over the basis (dimension-capped)."""
        dim = self.basis.dimension
        if dim > cap:
            raise ValueError(f"dimension {dim} exceeds dense cap {cap}")
        n = self.basis.n_orb
        n2 = n * n
        na, nb = self.basis.grid_shape()
        if na * nb > cap:
            # a filtered basis is assembled on the full string grid first
            raise ValueError(
                f"dense build works on the full {na} x {nb} string grid, "
                f"which exceeds the cap {cap}")
        if self.basis.n_elec == 0:
            return np.array([[self.core_energy]])

        def dense_ops(strings):
            nstr = len(strings)
            src, label, tgt, sign = _excitation_table(strings, n)
            ops = np.zeros((n2, nstr, nstr))
            ops[label, tgt, src] = sign
            return ops

        ops_a = dense_ops(self.basis.alpha_strings)
        same = self.basis.n_alpha == self.basis.n_beta
        ops_b = ops_a if same else dense_ops(self.basis.beta_strings)

        g_a = (self._g2 @ ops_a.reshape(n2, na * na)).reshape(n2, na, na)
        g_b = g_a if same else (
            self._g2 @ ops_b.reshape(n2, nb * nb)).reshape(n2, nb, nb)

        h4 = np.zeros((na, nb, na, nb))
        # the 1/2 of the two-electron sum already lives in _g2, so the
        # same-spin blocks contract plainly and the two cross orderings
        # of the opposite-spin part combine into a factor 2
        h_aa = np.einsum("xji,xik->jk", ops_a, g_a)
        h_bb = h_aa if same else np.einsum("xji,xik->jk", ops_b, g_b)
        idx_b = np.arange(nb)
        h4[:, idx_b, :, idx_b] += h_aa[None, :, :]
        idx_a = np.arange(na)
        h4[idx_a, :, idx_a, :] += h_bb[None, :, :]
        src, label, tgt, sign = _excitation_table(self.basis.alpha_strings, n)
        for k in range(len(src)):
            h4[tgt[k], :, src[k], :] += (2.0 * sign[k]) * g_b[label[k]]

        full = h4.reshape(na * nb, na * nb)
        full.flat[:: na * nb + 1] += self.core_energy
        if self.basis.filtered:
            sel = self.basis.pairs[:, 0] * nb + self.basis.pairs[:, 1]
            full = full[np.ix_(sel, sel)]
        return full


def _canonical_state(basis, vec):
    """Unit CIVector with the largest-magnitude coefficient made positive."""
    v = np.asarray(vec, dtype=float)
    lead = np.argmax(np.abs(v))
    if v[lead] < 0:
        v = -v
    return CIVector(basis, v)


def solve_lowest(basis, integrals, n_roots=1, tol=1e-8,
                 max_iter=200, subspace_cap=40):
    """Lowest eigenpairs by block Davidson iteration.

    Start vectors are the unit vectors at the n_roots lowest diagonal
    elements plus one dense deterministic guard direction; the update is
    diagonally preconditioned with a small-level shift guard, and the
    subspace restarts from the current Ritz vectors when it would exceed
    ``subspace_cap``.  Deterministic for fixed input.

    Returns a :class:`SpectrumResult`; when the iteration cap is hit the
    best current eigenpairs are returned with ``converged=False``.
    """
    if n_roots < 1:
        raise ValueError("n_roots must be at least 1")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    dim = basis.dimension
    if n_roots > dim:
        raise ValueError(f"n_roots={n_roots} exceeds basis dimension {dim}")
    ham = CIHamiltonian(basis, integrals)
    diag = ham.diagonal()
    cap = max(subspace_cap, 2 * n_roots)

    start = np.argsort(diag, kind="stable")[:n_roots]
    V = np.zeros((dim, n_roots))
    V[start, np.arange(n_roots)] = 1.0
    # one dense, deterministic guard direction: unit-vector starts can be
    # trapped in a symmetry sector of H (e.g. alpha/beta exchange) and would
    # then converge to the wrong roots with vanishing residuals
    guard = np.random.default_rng(dim).standard_normal(dim)
    guard -= V @ (V.T @ guard)
    norm = np.linalg.norm(guard)
    if norm > 1e-8:
        V = np.column_stack([V, guard / norm])
    AV = np.empty((dim, 0))

    theta = np.zeros(n_roots)
    X = V.copy()
    res_norms = np.full(n_roots, np.inf)
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        while AV.shape[1] < V.shape[1]:
            k = AV.shape[1]
            AV = np.column_stack([AV, ham.sigma(V[:, k])])
        S = V.T @ AV
        S = 0.5 * (S + S.T)
        evals, evecs = np.linalg.eigh(S)
        theta = evals[:n_roots]
        X = V @ evecs[:, :n_roots]
        AX = AV @ evecs[:, :n_roots]
        R = AX - X * theta[None, :]
        res_norms = np.linalg.norm(R, axis=0)
        if np.all(res_norms <= tol):
            converged = True
            break

        if V.shape[1] >= cap:
            V, AV = X.copy(), AX.copy()

        added = 0
        for k in range(n_roots):
            if res_norms[k] <= tol:
                continue
            denom = theta[k] - diag
            small = np.abs(denom) < 1e-10
            denom = np.where(small, np.where(denom < 0, -1e-10, 1e-10), denom)
            d = R[:, k] / denom
            norm = np.linalg.norm(d)
            if norm == 0.0:
                continue
            d = d / norm  # scale-free linear-dependence test below
            for _ in range(2):  # straight re-orthogonalization, twice
                d -= V @ (V.T @ d)
            norm = np.linalg.norm(d)
            if norm > 1e-8:
                V = np.column_stack([V, d / norm])
                added += 1
        if added == 0:
            # No usable new direction: the subspace is exact or stagnant.
            converged = bool(np.all(res_norms <= tol))
            break

    states = [_canonical_state(basis, X[:, k]) for k in range(n_roots)]
    return SpectrumResult(
        energies=np.array(theta, dtype=float),
        states=states,
        residual_norms=np.array(res_norms, dtype=float),
        iterations=iterations,
        converged=converged,
    )


def dense_solve(basis, integrals, n_roots=1, cap=DENSE_DIMENSION_CAP):
    """Validation oracle: full dense symmetric eigensolve of the Hamiltonian."""
    if n_roots < 1:
        raise ValueError("n_roots must be at least 1")
    dim = basis.dimension
    if n_roots > dim:
        raise ValueError(f"n_roots={n_roots} exceeds basis dimension {dim}")
    ham = CIHamiltonian(basis, integrals)
    H = ham.matrix(cap=cap)
    evals, evecs = scipy.linalg.eigh(
        H, subset_by_index=[0, n_roots - 1], driver="evr",
        overwrite_a=True, check_finite=False)
    states = [_canonical_state(basis, evecs[:, k]) for k in range(n_roots)]
    residuals = np.array([
        np.linalg.norm(ham.sigma(st.coeffs) - evals[k] * st.coeffs)
        for k, st in enumerate(states)
    ])
    return SpectrumResult(
        energies=np.array(evals, dtype=float),
        states=states,
        residual_norms=residuals,
        iterations=1,
        converged=True,
    )


def s_squared(psi):
    """Total-spin expectation <S^2> via S^2 = Sz^2 + Sz + S-S+."""
    basis = psi.basis
    n = basis.n_orb
    sz = 0.5 * (basis.n_alpha - basis.n_beta)
    value = sz * sz + sz
    if basis.n_beta == 0 or basis.n_alpha == n:
        return float(value)

    raised_a = _bitstrings(n, basis.n_alpha + 1)
    raised_b = _bitstrings(n, basis.n_beta - 1)
    lifted = np.zeros((len(raised_a), len(raised_b)))
    amask, bmask = basis.masks()
    coeffs = psi.coeffs
    for p in range(n):
        bit = 1 << p
        below = bit - 1
        sel = ((bmask & bit) != 0) & ((amask & bit) == 0)
        if not np.any(sel):
            continue
        a_sel, b_sel = amask[sel], bmask[sel]
        new_a = a_sel | bit
        new_b = b_sel & ~bit
        parity = (basis.n_alpha
                  + np.bitwise_count(b_sel & below).astype(np.int64)
                  + np.bitwise_count(a_sel & below).astype(np.int64))
        sgn = np.where(parity % 2 == 0, 1.0, -1.0)
        ia = np.searchsorted(raised_a, new_a)
        ib = np.searchsorted(raised_b, new_b)
        np.add.at(lifted, (ia, ib), sgn * coeffs[sel])
    value += float(np.sum(lifted * lifted))
    return float(value)
