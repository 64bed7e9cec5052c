"""Rational matrix functions over the scaled quaternions H_t.

Scalars, matrices, realizations R(x) = D + x C (I - x A)^{-1} B, structure
certificates for the four symmetry classes, and the factorization and
decomposition algorithms built on them.
"""
from .core import AlgebraContext, HtScalar, bilinear, conj_star, embed, invert, mul, norm_form, unembed
from .matrix import HtMatrix, eigenpairs, positive_factorize
from .realization import Node, evaluate, is_minimal, mcmillan_degree, node_adjoint, node_product
from .structured import Certificate, Kind, Signature, solve_certificate, verify_certificate
from .factorization import additive_decomposition, eigen_subspaces, junitary_factor
from .constructors import blaschke_circle, blaschke_line, blaschke_line_pair, brune_section, theta_builder

__all__ = [
    "AlgebraContext", "HtScalar", "bilinear", "conj_star", "embed", "invert", "mul", "norm_form", "unembed",
    "HtMatrix", "eigenpairs", "positive_factorize",
    "Node", "evaluate", "is_minimal", "mcmillan_degree", "node_adjoint", "node_product",
    "Certificate", "Kind", "Signature", "solve_certificate", "verify_certificate",
    "additive_decomposition", "eigen_subspaces", "junitary_factor",
    "blaschke_circle", "blaschke_line", "blaschke_line_pair", "brune_section", "theta_builder",
]
