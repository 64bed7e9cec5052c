"""State-space nodes R(x) = D + x C (I - x A)^{-1} B over H_t."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL
from .errors import (DNotInvertible, InternalInconsistency, NotMinimal, NotSimilar, NotStructured, PoleAt,
                     Singular, SizeMismatch)
from .matrix import RANK_RTOL, HtMatrix, cond, mat_inv, numerical_rank

POLE_COND = 1e10


@dataclass(frozen=True)
class Node:
    A: HtMatrix
    B: HtMatrix
    C: HtMatrix
    D: HtMatrix

    def __post_init__(self):
        A, B, C, D = self.A, self.B, self.C, self.D
        N = A.rows
        if A.cols != N or B.rows != N or C.cols != N or D.rows != C.rows or D.cols != B.cols:
            raise SizeMismatch(f"inconsistent node sizes A{A.shape} B{B.shape} C{C.shape} D{D.shape}")
        if len({A.t, B.t, C.t, D.t}) != 1:
            raise ValueError("node matrices come from different algebras")

    @property
    def ctx(self):
        return self.D.ctx

    @property
    def t(self):
        return self.D.t

    @property
    def N(self):
        return self.A.rows

    @property
    def shape(self):
        return self.D.shape

    @classmethod
    def constant(cls, D: HtMatrix):
        n, m = D.shape
        z = HtMatrix.zeros
        return cls(z(0, 0, D.ctx), z(0, m, D.ctx), z(n, 0, D.ctx), D)

    def __call__(self, x, tol=DEFAULT_TOL):
        return evaluate(self, x, tol)

    def transform(self, S: HtMatrix, Sinv: HtMatrix | None = None) -> "Node":
        """Similar node (S^{-1} A S, S^{-1} B, C S, D)."""
        Si = mat_inv(S) if Sinv is None else Sinv
        return Node(Si @ self.A @ S, Si @ self.B, self.C @ S, self.D)


def evaluate(node: Node, x: float, tol=DEFAULT_TOL) -> HtMatrix:
    x = float(x)
    if x == 0.0 or node.N == 0:
        return node.D
    M = (HtMatrix.eye(node.N, node.ctx) - node.A * x).embed()
    if cond(M) > POLE_COND:
        raise PoleAt(x)
    Y = np.linalg.solve(M, node.B.embed())
    E = node.D.embed() + x * node.C.embed() @ Y
    return HtMatrix.from_embedded(E, node.ctx, tol=1e-6)


def node_product(n1: Node, n2: Node) -> Node:
    if n1.shape[1] != n2.shape[0]:
        raise SizeMismatch(f"cannot multiply {n1.shape}-valued by {n2.shape}-valued functions")
    ctx = n1.ctx
    Z = HtMatrix.zeros(n2.N, n1.N, ctx)
    A = HtMatrix.block([[n1.A, n1.B @ n2.C], [Z, n2.A]])
    B = HtMatrix.vstack([n1.B @ n2.D, n2.B])
    C = HtMatrix.hstack([n1.C, n1.D @ n2.C])
    return Node(A, B, C, n1.D @ n2.D)


def _inv_D(D, tol):
    if D.rows != D.cols:
        raise DNotInvertible(f"D has shape {D.shape}")
    try:
        return mat_inv(D, tol)
    except Singular as exc:
        raise DNotInvertible("D is not invertible") from exc


def a_times(node: Node, tol=DEFAULT_TOL) -> HtMatrix:
    """A^x = A - B D^{-1} C, the state matrix of the inverse."""
    return node.A - node.B @ _inv_D(node.D, tol) @ node.C


def node_inverse(node: Node, tol=DEFAULT_TOL) -> Node:
    Di = _inv_D(node.D, tol)
    return Node(node.A - node.B @ Di @ node.C, node.B @ Di, -(Di @ node.C), Di)


def node_adjoint(node: Node) -> Node:
    """Node of x -> R(x)^* , namely D^* + x B^* (I - x A^*)^{-1} C^*."""
    return Node(node.A.star(), node.C.star(), node.B.star(), node.D.star())


def observability_matrix(node: Node) -> np.ndarray:
    A, C = node.A.embed(), node.C.embed()
    blocks, P = [], C
    for _ in range(2 * node.N):
        blocks.append(P)
        P = P @ A
    return np.vstack(blocks)


def controllability_matrix(node: Node) -> np.ndarray:
    A, B = node.A.embed(), node.B.embed()
    blocks, P = [], B
    for _ in range(2 * node.N):
        blocks.append(P)
        P = A @ P
    return np.hstack(blocks)


def is_observable(node: Node, rtol=RANK_RTOL) -> bool:
    if node.N == 0:
        return True
    return numerical_rank(observability_matrix(node), rtol) == 2 * node.N


def is_controllable(node: Node, rtol=RANK_RTOL) -> bool:
    if node.N == 0:
        return True
    return numerical_rank(controllability_matrix(node), rtol) == 2 * node.N


def is_minimal(node: Node, rtol=RANK_RTOL) -> bool:
    return is_observable(node, rtol) and is_controllable(node, rtol)


def mcmillan_degree(node: Node, rtol=RANK_RTOL) -> int:
    """Half the rank of the embedded block Hankel matrix (= obs @ ctrl)."""
    if node.N == 0:
        return 0
    r = numerical_rank(observability_matrix(node) @ controllability_matrix(node), rtol)
    if r % 2:
        raise InternalInconsistency(f"embedded Hankel rank {r} is odd")
    return r // 2


def similarity_between(n1: Node, n2: Node, tol=1e-8) -> HtMatrix:
    """The unique S with S A1 = A2 S, S B1 = B2 and C1 = C2 S."""
    if n1.N != n2.N or n1.shape != n2.shape:
        raise NotSimilar("nodes have different sizes")
    if not (is_minimal(n1) and is_minimal(n2)):
        raise NotMinimal("similarity requires minimal nodes")
    if not n1.D.is_close(n2.D, tol * max(1.0, n1.D.norm())):
        raise NotSimilar("feedthrough terms differ")
    O1, O2 = observability_matrix(n1), observability_matrix(n2)
    S_emb = np.linalg.lstsq(O2, O1, rcond=None)[0]
    try:
        S = HtMatrix.from_embedded(S_emb, n1.ctx, tol=1e-6)
    except NotStructured as exc:
        raise NotSimilar("no structured similarity exists") from exc
    scale = max(1.0, n1.A.norm(), n1.B.norm(), n1.C.norm(), n2.A.norm(), n2.B.norm(), n2.C.norm())
    res = max((S @ n1.A - n2.A @ S).norm(), (S @ n1.B - n2.B).norm(), (n1.C - n2.C @ S).norm())
    if res > tol * scale * max(1.0, S.norm()):
        raise NotSimilar(f"similarity residual {res:.3g}")
    return S
