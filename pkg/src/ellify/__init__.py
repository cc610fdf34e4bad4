"""Strong l-ifications of matrix polynomials built from dual minimal bases."""

from .polycore import MatrixPolynomial, Eigenstructure, reversal, evaluate, read_mp, write_mp
from .minbases import (enumerate_parameters, dual_kronecker_pair, is_dual_pair,
                       kronecker_embedding, reversal_dual_check)
from .convsolve import convolution_matrix, solve_NB_eq_Q, solve_M, xi_map
from .constructors import (BlockKroneckerPolynomial, StrongBlockMinimalBasesPolynomial,
                           assemble_sbmb, block_kronecker_companion, frobenius_companion,
                           frobenius_like_ellification, q_of, sigma_block,
                           symmetric_companion_quadratification)
from .recovery import minimal_indices_of, recover_eigenvector
from .verify import eigenvalue_agreement, verify_ellification

__all__ = [
    "MatrixPolynomial", "Eigenstructure", "reversal", "evaluate", "read_mp", "write_mp",
    "enumerate_parameters", "dual_kronecker_pair", "is_dual_pair", "kronecker_embedding",
    "reversal_dual_check", "convolution_matrix", "solve_NB_eq_Q", "solve_M", "xi_map",
    "BlockKroneckerPolynomial", "StrongBlockMinimalBasesPolynomial", "assemble_sbmb",
    "block_kronecker_companion", "frobenius_companion", "frobenius_like_ellification",
    "q_of", "sigma_block", "symmetric_companion_quadratification", "minimal_indices_of",
    "recover_eigenvector", "eigenvalue_agreement", "verify_ellification",
]

__version__ = "0.1.0"
