"""Orbital entanglement measures and derived analyses.

All entropies are von Neumann entropies of orbital reduced density matrix
spectra, in natural log units (nats).  Mutual information is the
non-negative combination I_ij = s_i + s_j - s_ij with zero diagonal.
Classification bins follow the usual order-of-magnitude reading: mutual
information at 1e-1 / 1e-2 / 1e-3 is large / moderate / small, one-orbital
entropy is large above 0.5 and moderate within [0.1, 0.5].
"""

from dataclasses import dataclass, field

import numpy as np

from .rdm import one_orbital_rdm, rdm_spectrum, two_orbital_rdm

__all__ = [
    "Thresholds",
    "EntropyReport",
    "shannon_entropy",
    "one_orbital_entropy",
    "two_orbital_entropy",
    "entropy_profile",
    "mutual_information",
    "classify_orbital",
    "classify_pair",
    "regime_hint",
    "classify",
    "fiedler_order",
    "fiedler_degenerate",
]

S_MAX_ONE = np.log(4.0)
S_MAX_TWO = np.log(16.0)


def shannon_entropy(weights, *, weight_floor=1e-12, sum_tolerance=1e-8):
    """-sum(w ln w) over a probability vector, with 0 ln 0 = 0.

    Weights may dip to -1e-12 from eigensolver round-off and the sum may
    deviate from 1 by up to 1e-8; anything beyond either tolerance raises.
    The vector is renormalized internally before evaluation.
    """
    w = np.asarray(weights, dtype=float)
    if w.size and w.min() < -weight_floor:
        raise ValueError(f"negative weight {w.min():g} beyond tolerance")
    total = w.sum()
    if abs(total - 1.0) > sum_tolerance:
        raise ValueError(f"weights sum to {total:g}, expected 1 within {sum_tolerance:g}")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    positive = w[w > 0.0]
    return float(-np.sum(positive * np.log(positive)) + 0.0)  # kill -0.0


def one_orbital_entropy(psi, i):
    """Entropy of the orbital-i RDM spectrum, in nats."""
    return shannon_entropy(rdm_spectrum(one_orbital_rdm(psi, i)))


def two_orbital_entropy(psi, i, j):
    """Entropy of the orbital-pair (i, j) RDM spectrum, in nats."""
    return shannon_entropy(rdm_spectrum(two_orbital_rdm(psi, i, j)))


def entropy_profile(psi):
    """All one- and two-orbital entropies and the mutual information.

    Returns (s, s2, mutual) where s has length n_orb, and s2 and mutual are
    symmetric (n_orb, n_orb) matrices with zero diagonal.
    """
    n = psi.basis.n_orb
    s = np.array([one_orbital_entropy(psi, i) for i in range(n)])
    s2 = np.zeros((n, n))
    mutual = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sij = two_orbital_entropy(psi, i, j)
            s2[i, j] = s2[j, i] = sij
            mutual[i, j] = mutual[j, i] = s[i] + s[j] - sij
    return s, s2, mutual


def mutual_information(psi):
    """Mutual information matrix I_ij = s_i + s_j - s_ij (zero diagonal)."""
    return entropy_profile(psi)[2]


@dataclass(frozen=True)
class Thresholds:
    """Classification bin edges (overridable, defaults from common usage)."""

    i_large: float = 1e-1
    i_moderate: float = 1e-2
    i_small: float = 1e-3
    s_large: float = 0.5   # strictly greater than -> large
    s_small: float = 0.1   # below -> small; [s_small, s_large] is moderate


def classify_orbital(s_value, thresholds=Thresholds()):
    """Label a one-orbital entropy as large / moderate / small."""
    if s_value > thresholds.s_large:
        return "large"
    if s_value >= thresholds.s_small:
        return "moderate"
    return "small"


def classify_pair(i_value, thresholds=Thresholds()):
    """Label a mutual information value as large / moderate / small / negligible."""
    if i_value >= thresholds.i_large:
        return "large"
    if i_value >= thresholds.i_moderate:
        return "moderate"
    if i_value >= thresholds.i_small:
        return "small"
    return "negligible"


_REGIMES = {
    ("large", "large"): "non-dynamic",
    ("moderate", "moderate"): "static",
    ("small", "small"): "dynamic",
}


def regime_hint(s_label, i_label):
    """Advisory correlation regime for matching entropy/information labels."""
    return _REGIMES.get((s_label, i_label))


def classify(s, mutual, thresholds=Thresholds()):
    """Classify every orbital and pair; returns (class_s, class_i, advisories).

    class_s is a list of labels, class_i a symmetric array of labels with
    empty-string diagonal, and advisories a list of human-readable regime
    hints for pairs whose one-orbital and pair labels point the same way.
    """
    n = len(s)
    class_s = [classify_orbital(v, thresholds) for v in s]
    class_i = np.full((n, n), "", dtype=object)
    advisories = []
    for i in range(n):
        for j in range(i + 1, n):
            label = classify_pair(mutual[i, j], thresholds)
            class_i[i, j] = class_i[j, i] = label
            if class_s[i] == class_s[j]:
                hint = regime_hint(class_s[i], label)
                if hint:
                    advisories.append(
                        f"orbitals {i + 1}-{j + 1}: {class_s[i]} s, "
                        f"{label} I: {hint} correlation signature")
    return class_s, class_i, advisories


def _connected_components(mutual, edge_floor=1e-12):
    n = mutual.shape[0]
    seen = np.zeros(n, dtype=bool)
    components = []
    for start in range(n):
        if seen[start]:
            continue
        stack, members = [start], []
        seen[start] = True
        while stack:
            v = stack.pop()
            members.append(v)
            for w in range(n):
                if not seen[w] and mutual[v, w] > edge_floor:
                    seen[w] = True
                    stack.append(w)
        components.append(sorted(members))
    return components


def _order_component(mutual, members):
    """Fiedler ordering of one connected component (indices into mutual)."""
    if len(members) <= 1:
        return list(members)
    sub = mutual[np.ix_(members, members)]
    lap = np.diag(sub.sum(axis=1)) - sub
    _, vecs = np.linalg.eigh(lap)
    v = vecs[:, 1]
    nonzero = np.nonzero(np.abs(v) > 1e-12)[0]
    if nonzero.size and v[nonzero[0]] < 0:
        v = -v
    ranked = sorted(range(len(members)), key=lambda k: (v[k], k))
    return [members[k] for k in ranked]


def fiedler_order(mutual):
    """Orbital permutation from the mutual-information graph Laplacian.

    Orbitals are sorted by the components of the eigenvector of the
    second-smallest Laplacian eigenvalue.  Equal components fall back to
    original index order; the eigenvector sign is fixed so its first
    nonzero component is positive; disconnected graphs are ordered
    component by component (components sorted by smallest member).
    """
    mutual = np.asarray(mutual, dtype=float)
    if mutual.ndim != 2 or mutual.shape[0] != mutual.shape[1]:
        raise ValueError("mutual information must be a square matrix")
    if not np.allclose(mutual, mutual.T, atol=1e-10):
        raise ValueError("mutual information matrix must be symmetric")
    if mutual.size and mutual.min() < -1e-10:
        raise ValueError(f"negative entry {mutual.min():g} beyond tolerance")
    work = np.clip(0.5 * (mutual + mutual.T), 0.0, None)
    np.fill_diagonal(work, 0.0)
    order = []
    for members in _connected_components(work):
        order.extend(_order_component(work, members))
    return np.array(order, dtype=int)


def fiedler_degenerate(mutual, window=1e-8):
    """True when the Fiedler eigenvalue of any component is degenerate."""
    work = np.clip(np.asarray(mutual, dtype=float), 0.0, None)
    np.fill_diagonal(work, 0.0)
    for members in _connected_components(work):
        if len(members) < 3:
            continue
        sub = work[np.ix_(members, members)]
        lap = np.diag(sub.sum(axis=1)) - sub
        evals = np.linalg.eigvalsh(lap)
        if evals[2] - evals[1] < window:
            return True
    return False


@dataclass(eq=False)
class EntropyReport:
    """Full orbital entanglement analysis of one CI root."""

    n_orb: int
    n_elec: int
    ms2: int
    basis_dimension: int
    root: int
    n_roots: int
    energies: np.ndarray
    degeneracy: int
    s_squared: float
    converged: bool
    s: np.ndarray
    s2: np.ndarray
    mutual: np.ndarray
    class_s: list
    class_i: np.ndarray
    advisories: list
    fiedler: np.ndarray
    fiedler_degenerate: bool
    labels: list = field(default_factory=list)
    configurations: list = field(default_factory=list)
    convention: str = "I = s_i + s_j - s_ij (nats, no 1/2 prefactor)"

    @property
    def energy(self):
        return float(self.energies[self.root])

    def orbital_label(self, i):
        """User label of 0-based orbital i, falling back to its 1-based index."""
        if self.labels:
            return self.labels[i]
        return str(i + 1)
