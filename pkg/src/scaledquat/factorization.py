"""Minimal factorizations and structured splittings.

A supporting projection pi (A ker pi in ker pi, A^x ran pi in ran pi) splits a
node with D = I into R1 R2.  Written in a basis [ker pi, ran pi], A is block
upper triangular and A^x block lower triangular, and the factors are the
diagonal compressions.  Structured splittings take ker pi = M (A-invariant,
H-nondegenerate) and ran pi = the H-orthogonal complement of M.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import DEFAULT_TOL
from .errors import (CircleInvertibilityRequired, DegenerateSubspace, DNotInvertible, KindMismatch,
                     NotFreeModule, NotIdempotent, NotInClass, NotInvariant, NotMinimal, NotSupporting,
                     PreconditionViolated, Singular)
from .matrix import (RANK_RTOL, FormH, HtMatrix, ProjectionDecomposition, cond, eigenpairs,
                     h_orthogonal_complement, is_h_nondegenerate, is_idempotent, is_invariant,
                     left_mult_real, mat_inv, module_basis_from_real, projection_ops, real_span)
from .realization import Node, a_times, is_minimal
from .structured import (Certificate, Kind, certificate_residuals, embed_T, solve_certificate,
                         VERIFY_TOL)

INVARIANCE_TOL = 1e-8


@dataclass(frozen=True)
class FactorPair:
    R1: Node
    R2: Node
    pi: ProjectionDecomposition
    cert1: Certificate | None = None
    cert2: Certificate | None = None


@dataclass(frozen=True)
class SummandPair:
    phi1: Node
    phi2: Node
    cert1: Certificate | None = None
    cert2: Certificate | None = None


def normalize_D(node: Node, tol=DEFAULT_TOL):
    """(D, node of D^{-1} R) so that R = D R~ with R~(0) = I."""
    try:
        Di = mat_inv(node.D, tol)
    except Singular as exc:
        raise DNotInvertible("D is not invertible") from exc
    return node.D, Node(node.A, node.B, Di @ node.C, HtMatrix.eye(node.D.rows, node.ctx))


def _kernel_range_real(pi: HtMatrix):
    L = left_mult_real(pi)
    ran = sla.orth(L, rcond=RANK_RTOL) if np.any(L) else np.zeros((L.shape[0], 0))
    return sla.null_space(L, rcond=RANK_RTOL), ran


def is_supporting_projection(node: Node, pi: HtMatrix, tol=INVARIANCE_TOL) -> bool:
    Ax = a_times(node)
    if not is_idempotent(pi, max(tol, 1e-9)):
        raise NotIdempotent("pi @ pi != pi")
    ker, ran = _kernel_range_real(pi)
    return is_invariant(node.A, ker, tol) and is_invariant(Ax, ran, tol)


def _split(node: Node, S: HtMatrix, k: int):
    """Write the node in the basis S and cut the state space after k coordinates."""
    Si = mat_inv(S)
    A, B, C = Si @ node.A @ S, Si @ node.B, node.C @ S
    N = node.N
    a = slice(0, k)
    b = slice(k, N)
    low = A[b, a].norm() if k and N - k else 0.0
    return A, B, C, Si, low, (a, b)


def factor_from_projection(node: Node, pi: HtMatrix, tol=INVARIANCE_TOL) -> FactorPair:
    """Factor a node with D = I along a supporting projection."""
    I = HtMatrix.eye(node.D.rows, node.ctx)
    if node.D.shape != I.shape or not node.D.is_close(I, 1e-9):
        raise PreconditionViolated("factor_from_projection expects D = I; use normalize_D first")
    if not is_minimal(node):
        raise NotMinimal("node is not minimal")
    if not is_supporting_projection(node, pi, tol):
        raise NotSupporting("pi is not a supporting projection")
    dec = projection_ops(pi)
    k = dec.kernel_basis.cols
    S = HtMatrix.hstack([dec.kernel_basis, dec.range_basis])
    A, B, C, _, _, (a, b) = _split(node, S, k)
    R1 = Node(A[a, a], B[a, :], C[:, a], I)
    R2 = Node(A[b, b], B[b, :], C[:, b], I)
    return FactorPair(R1, R2, dec)


# structured splittings --------------------------------------------------------

def _subspace_data(node: Node, H: HtMatrix, basis: HtMatrix, tol):
    """Checks M and returns (S, k, form) with S = [basis of M, basis of M^{perp H}]."""
    N = node.N
    if basis.rows != N:
        raise PreconditionViolated(f"subspace vectors have {basis.rows} rows, state dimension is {N}")
    R = real_span(basis)
    if not is_invariant(node.A, R, tol):
        raise NotInvariant("subspace is not A-invariant")
    form = FormH(H)
    if not is_h_nondegenerate(basis, form):
        raise DegenerateSubspace("subspace is degenerate for the H-form")
    M = module_basis_from_real(R, N, node.ctx)
    P = h_orthogonal_complement(M, form)
    S = HtMatrix.hstack([M, P])
    return S, M.cols, form


def _projection_from_basis(S: HtMatrix, k: int) -> ProjectionDecomposition:
    N = S.rows
    ctx = S.ctx
    d = np.r_[np.zeros(k), np.ones(N - k)]
    pi = S @ HtMatrix.real(np.diag(d), ctx) @ mat_inv(S)
    return ProjectionDecomposition(pi, S[:, k:], S[:, :k])


def _line_or_circle(kind):
    if kind in ("line", "circle"):
        return kind == "line"
    return Kind.parse(kind).is_line


def junitary_factor(node: Node, J, cert: Certificate, subspace_basis: HtMatrix, kind="line",
                    tol=INVARIANCE_TOL) -> FactorPair:
    """Split a J-unitary node along an A-invariant, H-nondegenerate subspace M.

    Line case: R1 = (A11, B1, C1, D) certified by H11 and R2 = (A22, B2, D^{-1} C2, I)
    certified by H22.  Circle case: the left factor is
    R1(x) = I - (1 - x) C1 (I - x A11)^{-1} H11^{-1} (I - A11^*)^{-1} C1^* J,
    and R2 absorbs the constant so that R1 R2 = R.
    """
    line = _line_or_circle(kind)
    want = Kind.LINE_JUNITARY if line else Kind.CIRCLE_JUNITARY
    if cert.kind is not want:
        raise KindMismatch(f"certificate is {cert.kind.value}, requested {want.value}")
    J = J.J if hasattr(J, "J") and not isinstance(J, HtMatrix) else J
    J = cert.J if J is None else J
    ctx = node.ctx
    N = node.N
    if not line and N:
        I_N = HtMatrix.eye(N, ctx)
        if cond(node.A.embed()) > 1 / RANK_RTOL or cond((I_N - node.A).embed()) > 1 / RANK_RTOL:
            raise CircleInvertibilityRequired("circle factorization needs A and I - A invertible")
    S, k, _ = _subspace_data(node, cert.H, subspace_basis, tol)
    A, B, C, Si, _, (a, b) = _split(node, S, k)
    Hs = S.star() @ cert.H @ S
    H11, H22 = Hs[a, a], Hs[b, b]
    D = node.D
    n = D.rows
    I = HtMatrix.eye(n, ctx)
    dec = _projection_from_basis(S, k)
    if line:
        R1 = Node(A[a, a], B[a, :], C[:, a], D)
        R2 = Node(A[b, b], B[b, :], mat_inv(D) @ C[:, b], I)
        c1 = Certificate(H11, want, certificate_residuals(R1, J, H11, want), J)
        c2 = Certificate(H22, want, certificate_residuals(R2, J, H22, want), J)
        return FactorPair(R1, R2, dec, c1, c2)
    A11, C1 = A[a, a], C[:, a]
    I1 = HtMatrix.eye(k, ctx)
    Y = mat_inv(H11) @ mat_inv(I1 - A11.star()) @ C1.star() @ J if k else HtMatrix.zeros(0, n, ctx)
    D1 = I - C1 @ Y
    R1 = Node(A11, (I1 - A11) @ Y, C1, D1)
    try:
        D1i = mat_inv(D1)
    except Singular as exc:
        raise DNotInvertible("left factor has a singular value at the origin") from exc
    R2 = Node(A[b, b], B[b, :], D1i @ C[:, b], D1i @ D)
    c1 = Certificate(H11, want, certificate_residuals(R1, J, H11, want), J)
    c2 = _certify(R2, J, H22, want)
    return FactorPair(R1, R2, dec, c1, c2)


def _certify(R: Node, J, Hguess: HtMatrix, kind: Kind) -> Certificate:
    """Use the inherited block when it works, otherwise solve afresh."""
    res = certificate_residuals(R, J, Hguess, kind)
    if all(v <= VERIFY_TOL for v in res.values()):
        return Certificate(Hguess, kind, res, J)
    try:
        return solve_certificate(R, J, kind)
    except NotInClass:
        return Certificate(Hguess, kind, res, J)


def additive_decomposition(phi: Node, cert: Certificate, subspace_basis: HtMatrix, kind="line",
                           tol=INVARIANCE_TOL, skew_split: HtMatrix | None = None) -> SummandPair:
    """Split an anti-symmetric phi = phi1 + phi2 along M via T = [[I, phi], [0, I]].

    Constant parts: phi1 receives the skew part of D (or ``skew_split`` when
    given) plus, on the circle, the symmetric part B1^* H11 B1 / 2 its
    certificate demands.  phi2 gets the rest.
    """
    line = _line_or_circle(kind)
    want = Kind.LINE_ANTISYM if line else Kind.CIRCLE_ANTISYM
    if cert.kind is not want:
        raise KindMismatch(f"certificate is {cert.kind.value}, requested {want.value}")
    ctx = phi.ctx
    n = phi.shape[0]
    S, k, _ = _subspace_data(phi, cert.H, subspace_basis, tol)
    # factor T~ = D_T^{-1} T in the adapted basis; D_T^{-1} [C; 0] = [C; 0]
    T = embed_T(phi)
    A, BT, CT, _, _, (a, b) = _split(T, S, k)
    Hs = S.star() @ cert.H @ S
    H11, H22 = Hs[a, a], Hs[b, b]
    Z = HtMatrix.zeros(n, n, ctx)
    # upper-right blocks of T~1 = (A11, BT1, CT1, I) and T~2 = (A22, BT2, CT2, I)
    p1 = Node(A[a, a], BT[a, n:], CT[:n, a], Z)
    p2 = Node(A[b, b], BT[b, n:], CT[:n, b], Z)
    D = phi.D
    skew = (D - D.star()) * 0.5 if skew_split is None else skew_split
    if not (skew + skew.star()).is_close(Z, 1e-9 * max(1.0, skew.norm())):
        raise PreconditionViolated("skew_split must be star-anti-symmetric")
    if line:
        D1 = skew
    else:
        D1 = skew + (p1.B.star() @ H11 @ p1.B) * 0.5
    phi1 = Node(p1.A, p1.B, p1.C, D1)
    phi2 = Node(p2.A, p2.B, p2.C, D - D1)
    c1 = Certificate(H11, want, certificate_residuals(phi1, None, H11, want))
    c2 = Certificate(H22, want, certificate_residuals(phi2, None, H22, want))
    return SummandPair(phi1, phi2, c1, c2)


# candidate subspaces ---------------------------------------------------------

def eigen_subspaces(A: HtMatrix):
    """Distinct one-dimensional modules f H_t spanned by eigenvectors of A.

    For t > 0 an eigenvector can be a zero-divisor column whose module has real
    dimension 2; two such halves are combined when their sum is a free rank-one
    module.
    """
    out, spans, halves = [], [], []

    def add(R, f):
        if any(np.linalg.norm(R - P @ (P.T @ R)) < 1e-6 for P in spans):
            return
        spans.append(R)
        out.append(f)

    for f, _ in eigenpairs(A):
        R = real_span(f)
        if R.shape[1] == 4:
            add(R, f)
        elif R.shape[1] == 2:
            halves.append(R)
    for i in range(len(halves)):
        for j in range(i + 1, len(halves)):
            R = sla.orth(np.hstack([halves[i], halves[j]]), rcond=RANK_RTOL)
            if R.shape[1] != 4:
                continue
            try:
                f = module_basis_from_real(R, A.rows, A.ctx)
            except NotFreeModule:
                continue
            add(R, f)
    return out


def proper_eigen_subspaces(A: HtMatrix):
    if A.rows < 2:
        return []
    return eigen_subspaces(A)
