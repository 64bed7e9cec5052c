"""Certificates for the four structural classes.

A minimal node is certified by an invertible star-symmetric H solving a set
of equations linear in H:

==================  ==========================================================
kind                equations
==================  ==========================================================
line-junitary       A*H + HA = -C*JC,  HB = -C*JD,  DJD* = J
circle-junitary     A*HA + C*JC = H,  A*HB + C*JD = 0,  B*HB + D*JD = J
line-antisym        A*H + HA = 0,  HB = C*,  D + D* = 0
circle-antisym      A*HA = H,  A*HB = C*,  D + D* = B*HB
==================  ==========================================================

All four share the kernel identity  K(x, y) = C (I - xA)^{-1} H^{-1} (I - yA*)^{-1} C*.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (AInvertibilityRequired, KindMismatch, NotInClass, NotMinimal, PoleAt,
                     PreconditionViolated, Singular)
from .matrix import RANK_RTOL, HtMatrix, cond, is_star_symmetric, mat_inv, solve_star_symmetric
from .realization import Node, evaluate, is_minimal

VERIFY_TOL = 1e-8
LINE_GRID = (-0.35, -0.3, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.3, 0.35)
CIRCLE_GRID = LINE_GRID
ADMISSIBLE_COND = 1e8


class Kind(enum.Enum):
    LINE_JUNITARY = "line-junitary"
    CIRCLE_JUNITARY = "circle-junitary"
    LINE_ANTISYM = "line-antisym"
    CIRCLE_ANTISYM = "circle-antisym"

    @property
    def is_line(self):
        return self in (Kind.LINE_JUNITARY, Kind.LINE_ANTISYM)

    @property
    def is_junitary(self):
        return self in (Kind.LINE_JUNITARY, Kind.CIRCLE_JUNITARY)

    @classmethod
    def parse(cls, s):
        if isinstance(s, Kind):
            return s
        key = str(s).lower().replace("_", "-").replace("j-unitary", "junitary")
        for k in cls:
            if key in (k.value, k.name.lower().replace("_", "-")):
                return k
        raise ValueError(f"unknown kind {s!r}; expected one of {[k.value for k in cls]}")


@dataclass(frozen=True)
class Signature:
    J: HtMatrix

    def __post_init__(self):
        J = self.J
        if not is_star_symmetric(J, 1e-9) or not (J @ J).is_close(HtMatrix.eye(J.rows, J.ctx), 1e-9 * max(1, J.norm())):
            raise PreconditionViolated("a signature matrix needs J = J^* = J^{-1}")


@dataclass(frozen=True)
class Certificate:
    H: HtMatrix
    kind: Kind
    residuals: dict = field(default_factory=dict)
    J: HtMatrix | None = None


@dataclass
class VerificationReport:
    kind: Kind
    residuals: list
    tol: float
    n_points: int = 0
    n_pairs: int = 0

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for _, r in self.residuals)

    @property
    def max_residual(self) -> float:
        return max((r for _, r in self.residuals), default=0.0)

    def as_dict(self):
        return {"kind": self.kind.value, "passed": self.passed, "tol": self.tol,
                "n_points": self.n_points, "n_pairs": self.n_pairs,
                "residuals": [[k, float(v)] for k, v in self.residuals]}


def _rel(terms) -> float:
    """Norm of a sum relative to its largest term (floored at 1)."""
    total = terms[0]
    for x in terms[1:]:
        total = total + x
    return total.norm() / max(1.0, *(x.norm() for x in terms))


def _identity(n, ctx):
    return HtMatrix.eye(n, ctx)


def _need_J(J, node):
    if J is None:
        raise PreconditionViolated("J-unitary kinds need a signature matrix J")
    J = J.J if isinstance(J, Signature) else J
    Signature(J)
    if J.rows != node.shape[0]:
        raise PreconditionViolated(f"J is {J.shape} but R is {node.shape}-valued")
    return J


def certificate_terms(node: Node, J, kind: Kind):
    """Map label -> (H -> list of terms summing to zero).  Every entry is affine in H."""
    A, B, C, D = node.A, node.B, node.C, node.D
    As, Bs, Cs, Ds = A.star(), B.star(), C.star(), D.star()
    if kind is Kind.LINE_JUNITARY:
        return {
            "lyapunov": lambda H: [As @ H, H @ A, Cs @ J @ C],
            "coupling": lambda H: [H @ B, Cs @ J @ D],
            "d-junitary": lambda H: [D @ J @ Ds, -J],
        }
    if kind is Kind.CIRCLE_JUNITARY:
        return {
            "stein": lambda H: [As @ H @ A, Cs @ J @ C, -H],
            "coupling": lambda H: [As @ H @ B, Cs @ J @ D],
            "d-block": lambda H: [Bs @ H @ B, Ds @ J @ D, -J],
        }
    if kind is Kind.LINE_ANTISYM:
        return {
            "lyapunov": lambda H: [As @ H, H @ A],
            "coupling": lambda H: [H @ B, -Cs],
            "d-skew": lambda H: [D, Ds],
        }
    return {
        "stein": lambda H: [As @ H @ A, -H],
        "coupling": lambda H: [As @ H @ B, -Cs],
        "d-sym": lambda H: [D, Ds, -(Bs @ H @ B)],
    }


def certificate_residuals(node: Node, J, H: HtMatrix, kind) -> dict:
    """Relative residual of every algebraic certificate equation, plus derived checks."""
    kind = Kind.parse(kind)
    if kind.is_junitary:
        J = _need_J(J, node)
    out = {k: _rel(f(H)) for k, f in certificate_terms(node, J, kind).items()}
    if node.N == 0:
        return out
    try:
        Hi = mat_inv(H)
    except Singular:
        out["h-invertible"] = np.inf
        return out
    A, B, C, D = node.A, node.B, node.C, node.D
    if kind is Kind.LINE_JUNITARY:
        out["b-formula"] = _rel([B, Hi @ C.star() @ J @ D])
        try:
            Ax = A - B @ mat_inv(D) @ C
            out["a-times"] = _rel([Hi @ A.star() @ H, Ax])
        except Singular:
            out["a-times"] = np.inf
    elif kind is Kind.CIRCLE_JUNITARY:
        # equivalent block form with H^{-1}:  M diag(H^-1, J) M^* = diag(H^-1, J)
        M = HtMatrix.block([[A, B], [C, D]])
        Z = HtMatrix.zeros(H.rows, J.rows, H.ctx)
        P = HtMatrix.block([[Hi, Z], [Z.star(), J]])
        out["inverse-block"] = _rel([M @ P @ M.star(), -P])
    elif kind is Kind.LINE_ANTISYM:
        out["b-formula"] = _rel([B, -(Hi @ C.star())])
    return out


def solve_certificate(node: Node, J=None, kind=Kind.LINE_JUNITARY, tol=VERIFY_TOL) -> Certificate:
    """Solve for the certificate H of a minimal node.

    All H-linear equations of the class are stacked into one real least-squares
    problem over the star-symmetric coordinates of H.
    """
    kind = Kind.parse(kind)
    if kind.is_junitary:
        J = _need_J(J, node)
    else:
        J = None
    if not is_minimal(node):
        raise NotMinimal("certificates are only defined for minimal realizations")
    if not kind.is_line and node.N:
        if cond(node.A.embed()) > 1.0 / RANK_RTOL:
            raise AInvertibilityRequired("circle classes need A invertible")
        if kind is Kind.CIRCLE_JUNITARY:
            Dinf = node.D - node.C @ mat_inv(node.A) @ node.B
            if Dinf.rows != Dinf.cols or cond(Dinf.embed()) > 1.0 / RANK_RTOL:
                raise AInvertibilityRequired("R is not invertible at infinity (D - C A^{-1} B singular)")
    terms = certificate_terms(node, J, kind)

    def eqs(H):
        out = []
        for f in terms.values():
            parts = f(H)
            s = parts[0]
            for p in parts[1:]:
                s = s + p
            out.append(s)
        return out

    H, _, rank, npar = solve_star_symmetric(eqs, node.N, node.ctx)
    if rank < npar:
        raise NotInClass(f"certificate equations do not determine H (rank {rank} < {npar})")
    res = certificate_residuals(node, J, H, kind)
    bad = {k: v for k, v in res.items() if not v <= tol}
    if bad:
        raise NotInClass("certificate equations not satisfied: "
                         + ", ".join(f"{k}={v:.3g}" for k, v in bad.items()))
    if node.N and cond(H.embed()) > 1e10:
        raise NotInClass("solved H is singular")
    return Certificate(H, kind, res, J)


# pointwise verification -----------------------------------------------------

def kernel_rhs(node: Node, Hi: HtMatrix, x, y):
    I = _identity(node.N, node.ctx)
    Phi_x = node.C @ mat_inv(I - node.A * x)
    Phi_y = node.C @ mat_inv(I - node.A * y)
    return Phi_x @ Hi @ Phi_y.star()


def kernel_lhs(kind: Kind, J, Rx, Ry, x, y):
    if kind.is_junitary:
        num = J - Rx @ J @ Ry.star()
    else:
        num = Rx + Ry.star()
    den = (x + y) if kind.is_line else (1.0 - x * y)
    return num / den


def _admissible(node, x):
    if node.N == 0:
        return True
    return cond((_identity(node.N, node.ctx) - node.A * x).embed()) < ADMISSIBLE_COND


def functional_residual(node: Node, J, kind: Kind, x):
    """Relative residual of the defining functional equation at x."""
    kind = Kind.parse(kind)
    xr = -x if kind.is_line else 1.0 / x
    Rx, Rr = evaluate(node, x), evaluate(node, xr)
    if kind.is_junitary:
        L, R = Rx @ J @ Rr.star(), J
    else:
        L, R = Rx, -Rr.star()
    return (L - R).norm() / max(1.0, L.norm(), R.norm())


def verify_certificate(node: Node, J, cert: Certificate, sample_xs=None, tol=VERIFY_TOL,
                       kind=None) -> VerificationReport:
    """Check the functional equation, the certificate equations and the kernel identity."""
    if kind is not None and Kind.parse(kind) is not cert.kind:
        raise KindMismatch(f"certificate is {cert.kind.value}, requested {Kind.parse(kind).value}")
    kind = cert.kind
    if kind.is_junitary:
        J = _need_J(J if J is not None else cert.J, node)
    else:
        J = None
    xs = list(LINE_GRID if kind.is_line else CIRCLE_GRID) if sample_xs is None else list(sample_xs)
    residuals = [(k, v) for k, v in certificate_residuals(node, J, cert.H, kind).items()]

    points = []
    for x in xs:
        if x == 0:
            continue
        mirror = -x if kind.is_line else 1.0 / x
        if _admissible(node, x) and _admissible(node, mirror):
            points.append(x)
    func = 0.0
    for x in points:
        try:
            func = max(func, functional_residual(node, J, kind, x))
        except PoleAt:
            continue
    residuals.append(("functional", func))

    kern, npairs = 0.0, 0
    if node.N:
        Hi = mat_inv(cert.H)
        vals = {}
        for x in points:
            try:
                vals[x] = evaluate(node, x)
            except PoleAt:
                pass
        for x in vals:
            for y in vals:
                den = (x + y) if kind.is_line else (1.0 - x * y)
                if abs(den) < 1e-6:
                    continue
                L = kernel_lhs(kind, J, vals[x], vals[y], x, y)
                R = kernel_rhs(node, Hi, x, y)
                kern = max(kern, (L - R).norm() / max(1.0, L.norm(), R.norm()))
                npairs += 1
    residuals.append(("kernel", kern))
    return VerificationReport(kind, residuals, tol, len(points), npairs)


# anti-symmetric constructions -----------------------------------------------

def _is_line(kind) -> bool:
    if kind in ("line", "circle"):
        return kind == "line"
    return Kind.parse(kind).is_line


def make_phi_from_psi(psi: Node, kind) -> Node:
    """Doubled node of phi(x) = psi(x) - psi(-x)^* (line) or psi(x) - psi(1/x)^* (circle)."""
    line = _is_line(kind)
    A, B, C, D = psi.A, psi.B, psi.C, psi.D
    if psi.shape[0] != psi.shape[1]:
        raise PreconditionViolated("psi must be square-valued")
    Z = HtMatrix.zeros(psi.N, psi.N, psi.ctx)
    if line:
        A2 = HtMatrix.block([[A, Z], [Z, -A.star()]])
        return Node(A2, HtMatrix.vstack([B, C.star()]), HtMatrix.hstack([C, B.star()]), D - D.star())
    if psi.N and cond(A.embed()) > 1.0 / RANK_RTOL:
        raise AInvertibilityRequired("circle doubling needs A invertible")
    Ai = mat_inv(A.star()) if psi.N else Z
    A2 = HtMatrix.block([[A, Z], [Z, Ai]])
    B2 = HtMatrix.vstack([B, Ai @ C.star()])
    C2 = HtMatrix.hstack([C, B.star() @ Ai])
    return Node(A2, B2, C2, D - D.star() + B.star() @ Ai @ C.star())


def antidiag_identity(n, ctx) -> HtMatrix:
    I = HtMatrix.eye(n, ctx)
    Z = HtMatrix.zeros(n, n, ctx)
    return HtMatrix.block([[Z, I], [I, Z]])


def doubled_certificate(psi: Node, kind) -> Certificate:
    """H = [[0, I], [I, 0]] for the doubled node (valid when that node is minimal)."""
    line = _is_line(kind)
    k = Kind.LINE_ANTISYM if line else Kind.CIRCLE_ANTISYM
    phi = make_phi_from_psi(psi, "line" if line else "circle")
    H = antidiag_identity(psi.N, psi.ctx)
    return Certificate(H, k, certificate_residuals(phi, None, H, k))


def embed_T(phi: Node) -> Node:
    """Node of T(x) = [[I, phi(x)], [0, I]]."""
    n = phi.shape[0]
    if phi.shape[1] != n:
        raise PreconditionViolated("phi must be square-valued")
    ctx = phi.ctx
    I, Z = HtMatrix.eye(n, ctx), HtMatrix.zeros(n, n, ctx)
    B = HtMatrix.hstack([HtMatrix.zeros(phi.N, n, ctx), phi.B])
    C = HtMatrix.vstack([phi.C, HtMatrix.zeros(n, phi.N, ctx)])
    D = HtMatrix.block([[I, phi.D], [Z, I]])
    return Node(phi.A, B, C, D)


def embed_T_certificate(phi: Node, cert: Certificate) -> tuple:
    """(J, Certificate) for T: J antidiagonal, H_T = -H, kind of the matching J-unitary class."""
    if cert.kind.is_junitary:
        raise KindMismatch("embed_T needs an anti-symmetric certificate")
    n = phi.shape[0]
    J = antidiag_identity(n, phi.ctx)
    kind = Kind.LINE_JUNITARY if cert.kind.is_line else Kind.CIRCLE_JUNITARY
    T = embed_T(phi)
    H = -cert.H
    return J, Certificate(H, kind, certificate_residuals(T, J, H, kind), J)
