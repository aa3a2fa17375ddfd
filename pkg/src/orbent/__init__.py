"""Exact CI ground states and orbital entanglement analysis for small
active-space Hamiltonians."""

__version__ = "0.1.0"

from .ci import (CIHamiltonian, CIVector, DeterminantBasis, SpectrumResult,
                 dense_solve, enumerate_basis, s_squared, solve_lowest)
from .entropy import (EntropyReport, Thresholds, classify, entropy_profile,
                      fiedler_order, mutual_information, one_orbital_entropy,
                      shannon_entropy, two_orbital_entropy)
from .integrals import FcidumpError, IntegralSet, parse_fcidump, write_fcidump
from .rdm import (one_orbital_rdm, oracle_rdm, rdm_spectrum, spin_summed_1rdm,
                  two_orbital_rdm)

__all__ = [
    "__version__",
    "CIHamiltonian",
    "CIVector",
    "DeterminantBasis",
    "SpectrumResult",
    "dense_solve",
    "enumerate_basis",
    "s_squared",
    "solve_lowest",
    "EntropyReport",
    "Thresholds",
    "classify",
    "entropy_profile",
    "fiedler_order",
    "mutual_information",
    "one_orbital_entropy",
    "shannon_entropy",
    "two_orbital_entropy",
    "FcidumpError",
    "IntegralSet",
    "parse_fcidump",
    "write_fcidump",
    "one_orbital_rdm",
    "oracle_rdm",
    "rdm_spectrum",
    "spin_summed_1rdm",
    "two_orbital_rdm",
]
