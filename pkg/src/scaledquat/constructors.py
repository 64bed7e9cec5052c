"""Canonical structured nodes, the Stein Gram matrix and truncated power series."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_TOL, ONE, AlgebraContext, HtScalar, conj_star, invert, mul, norm_form
from .errors import (DegenerateAlpha, DegeneratePair, GramSingular, PreconditionViolated,
                     SizeMismatch, SpectralRadiusTooLarge, UnimodularAlpha)
from .matrix import HtMatrix, cond, mat_inv, solve_star_symmetric
from .realization import Node
from .structured import Certificate, Kind, Signature, certificate_residuals

STABILITY_MARGIN = 1e-6


def _S(q, ctx):
    return HtMatrix.scalar(q, ctx)


def blaschke_line(alpha: HtScalar, ctx: AlgebraContext, tol=DEFAULT_TOL):
    """R(x) = (1 + x alpha^*)(1 - x alpha)^{-1}, certified by h = -1/(alpha + alpha^*)."""
    s = 2.0 * alpha.a.real  # alpha + alpha^* is this real number
    if abs(s) <= tol:
        raise DegenerateAlpha("alpha + alpha^* = 0")
    one = HtMatrix.eye(1, ctx)
    node = Node(_S(alpha, ctx), HtMatrix.real([[s]], ctx), one, one)
    H = HtMatrix.real([[-1.0 / s]], ctx)
    return node, Certificate(H, Kind.LINE_JUNITARY,
                             certificate_residuals(node, one, H, Kind.LINE_JUNITARY), one)


def blaschke_line_pair(alpha: HtScalar, beta: HtScalar, ctx: AlgebraContext, tol=DEFAULT_TOL):
    """diag((1 + x beta^*)(1 - x alpha)^{-1}, (1 - x beta)^{-1}(1 + x alpha^*)) with H = -J = antidiag."""
    c = alpha + conj_star(beta)
    if max(abs(c.a), abs(c.b)) <= tol:
        raise DegeneratePair("alpha + beta^* = 0")
    A = HtMatrix.diag([alpha, beta], ctx)
    C = HtMatrix.diag([c, ONE], ctx)
    H = HtMatrix.real([[0, 1], [1, 0]], ctx)
    J = -H
    D = HtMatrix.eye(2, ctx)
    B = -(mat_inv(H) @ C.star() @ J @ D)
    node = Node(A, B, C, D)
    cert = Certificate(H, Kind.LINE_JUNITARY, certificate_residuals(node, J, H, Kind.LINE_JUNITARY), J)
    return node, cert, Signature(J)


def brune_section(alpha: HtScalar, beta: HtScalar, gamma: HtScalar, h: float, ctx: AlgebraContext,
                  tol=DEFAULT_TOL):
    """Degree one section with C^*JC = 0: A = alpha (skew), C = [beta; gamma], J = diag(1, -1)."""
    if abs(alpha.a.real) > tol:
        raise PreconditionViolated("alpha must satisfy alpha = -alpha^*")
    if max(abs(alpha.a), abs(alpha.b)) <= tol:
        raise PreconditionViolated("alpha must be nonzero")
    nb, ng = norm_form(beta, ctx), norm_form(gamma, ctx)
    if abs(nb - ng) > tol * max(1.0, abs(nb)):
        raise PreconditionViolated("beta beta^* must equal gamma gamma^*")
    if abs(nb) <= tol:
        raise PreconditionViolated("beta beta^* must be nonzero")
    h = float(h)
    if h == 0:
        raise PreconditionViolated("h must be nonzero")
    A = _S(alpha, ctx)
    C = HtMatrix.from_scalars([[beta], [gamma]], ctx)
    J = HtMatrix.real([[1, 0], [0, -1]], ctx)
    H = HtMatrix.real([[h]], ctx)
    D = HtMatrix.eye(2, ctx)
    B = -(mat_inv(H) @ C.star() @ J @ D)
    node = Node(A, B, C, D)
    cert = Certificate(H, Kind.LINE_JUNITARY, certificate_residuals(node, J, H, Kind.LINE_JUNITARY), J)
    return node, cert, Signature(J)


def blaschke_circle(alpha: HtScalar, ctx: AlgebraContext, tol=DEFAULT_TOL):
    """b(x) = (x - alpha)(1 - x alpha^*)^{-1}, certified by h = 1 - alpha alpha^*."""
    h = 1.0 - norm_form(alpha, ctx)
    if abs(h) <= tol:
        raise UnimodularAlpha("alpha alpha^* = 1")
    node = Node(_S(conj_star(alpha), ctx), HtMatrix.eye(1, ctx), HtMatrix.real([[h]], ctx),
                _S(-alpha, ctx))
    one = HtMatrix.eye(1, ctx)
    H = HtMatrix.real([[h]], ctx)
    return node, Certificate(H, Kind.CIRCLE_JUNITARY,
                             certificate_residuals(node, one, H, Kind.CIRCLE_JUNITARY), one)


def spectral_radius(A: HtMatrix) -> float:
    if A.rows == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvals(A.embed())).max())


@dataclass(frozen=True)
class GramStein:
    G: HtMatrix
    series_G: HtMatrix
    discrepancy: float
    terms: int


def stein_solve(A: HtMatrix, C: HtMatrix, tol=1e-12, max_terms=100000) -> GramStein:
    """Solve G - A^* G A = C^* C and cross-check against sum_n A^{*n} C^* C A^n."""
    if spectral_radius(A) >= 1.0 - STABILITY_MARGIN:
        raise SpectralRadiusTooLarge(f"spectral radius {spectral_radius(A):.6g} >= 1")
    if C.cols != A.rows:
        raise SizeMismatch(f"C is {C.shape}, A is {A.shape}")
    CC = C.star() @ C
    G, _, rank, npar = solve_star_symmetric(lambda G: [G - A.star() @ G @ A - CC], A.rows, A.ctx)
    S, term = CC, CC
    scale = max(1.0, CC.norm())
    n = 1
    while term.norm() > tol * scale and n < max_terms:
        term = A.star() @ term @ A
        S = S + term
        n += 1
    disc = (G - S).norm() / max(1.0, G.norm())
    return GramStein(G, S, disc, n)


def theta_builder(alphas, ctx: AlgebraContext):
    """Product Theta with A = diag(alpha_i^*), C = [1 ... 1] and Stein certificate H = G, J = 1."""
    alphas = list(alphas)
    N = len(alphas)
    A = HtMatrix.diag([conj_star(a) for a in alphas], ctx)
    C = HtMatrix.real(np.ones((1, N)), ctx)
    gs = stein_solve(A, C)
    G = gs.G
    if cond(G.embed()) > 1e10:
        raise GramSingular("Stein Gram matrix is singular (repeated alphas?)")
    I = HtMatrix.eye(N, ctx)
    # W = G^{-1} (I - A^*)^{-1} C^* by two embedded solves (G can be ill conditioned)
    E = np.linalg.solve((I - A.star()).embed(), C.star().embed())
    W = HtMatrix.from_embedded(np.linalg.solve(G.embed(), E), ctx, tol=1e-6)
    B = (I - A) @ W
    D = HtMatrix.eye(1, ctx) - C @ W
    node = Node(A, B, C, D)
    one = HtMatrix.eye(1, ctx)
    return node, Certificate(G, Kind.CIRCLE_JUNITARY,
                             certificate_residuals(node, one, G, Kind.CIRCLE_JUNITARY), one)


def theta_identities(node: Node, G: HtMatrix) -> dict:
    A, B, C, D = node.A, node.B, node.C, node.D
    rel = lambda L, R: (L - R).norm() / max(1.0, L.norm(), R.norm())
    I = HtMatrix.eye(D.cols, node.ctx)
    return {
        "stein": rel(A.star() @ G @ A + C.star() @ C, G),
        "cross": rel(B.star() @ G @ A + D.star() @ C, HtMatrix.zeros(B.cols, A.cols, node.ctx)),
        "d-block": rel(B.star() @ G @ B + D.star() @ D, I),
    }


def theta_alt_eval(node: Node, G: HtMatrix, x: float) -> HtMatrix:
    """1 - (1 - x) C (I - xA)^{-1} G^{-1} (I - A^*)^{-1} C^*."""
    A, C = node.A, node.C
    I = HtMatrix.eye(A.rows, node.ctx)
    one = HtMatrix.eye(1, node.ctx)
    E = np.linalg.solve((I - A.star()).embed(), C.star().embed())
    E = np.linalg.solve(G.embed(), E)
    E = np.linalg.solve((I - A * x).embed(), E)
    V = HtMatrix.from_embedded(C.embed() @ E, node.ctx, tol=1e-6)
    return one - V * (1.0 - x)


def theta_one_closed_form(A: HtScalar, x: float, ctx) -> HtScalar:
    """(1 - xA)^{-1}(x - A^*)(1 - A)(1 - A^*)^{-1}, the N = 1 form (A the state scalar)."""
    p = invert(ONE - A * x, ctx)
    p = mul(p, HtScalar.real(x) - conj_star(A), ctx)
    p = mul(p, ONE - A, ctx)
    return mul(p, invert(ONE - conj_star(A), ctx), ctx)


# power series ---------------------------------------------------------------

class SeriesHt:
    """Truncated power series sum_n f_n x^n with H_t coefficients."""

    def __init__(self, coeffs, ctx: AlgebraContext):
        self.a = np.array([c.a for c in coeffs], dtype=complex)
        self.b = np.array([c.b for c in coeffs], dtype=complex)
        self.ctx = ctx

    @property
    def order(self):
        return len(self.a) - 1

    def __getitem__(self, n):
        return HtScalar(self.a[n], self.b[n])

    @property
    def coefficients(self):
        return [self[n] for n in range(len(self.a))]

    def __add__(self, other):
        K = min(self.order, other.order) + 1
        return SeriesHt([self[n] + other[n] for n in range(K)], self.ctx)

    def is_close(self, other, tol=1e-12):
        K = min(self.order, other.order) + 1
        return all(self[n].is_close(other[n], tol) for n in range(K))


def star_product(f: SeriesHt, g: SeriesHt) -> SeriesHt:
    """Cauchy product h_n = sum_k f_k g_{n-k}, truncated at the smaller order."""
    K = min(f.order, g.order) + 1
    t = f.ctx.t
    ha = np.zeros(K, complex)
    hb = np.zeros(K, complex)
    for n in range(K):
        fa, fb = f.a[:n + 1], f.b[:n + 1]
        ga, gb = g.a[n::-1], g.b[n::-1]
        ha[n] = np.sum(fa * ga + t * fb * np.conj(gb))
        hb[n] = np.sum(fa * gb + fb * np.conj(ga))
    return SeriesHt([HtScalar(a, b) for a, b in zip(ha, hb)], f.ctx)


def star_eval(f: SeriesHt, q: HtScalar) -> HtScalar:
    """sum_n f_n q^n with powers of q placed on the right."""
    out = HtScalar()
    p = ONE
    for n in range(f.order + 1):
        out = out + mul(f[n], p, f.ctx)
        p = mul(p, q, f.ctx)
    return out


def node_series(node: Node, order=64) -> SeriesHt:
    """Taylor coefficients D, CB, CAB, ... of a scalar-valued node."""
    if node.shape != (1, 1):
        raise SizeMismatch("node_series needs a scalar-valued node")
    coeffs = [node.D[0, 0]]
    P = node.B
    for _ in range(order):
        coeffs.append((node.C @ P)[0, 0])
        P = node.A @ P
    return SeriesHt(coeffs, node.ctx)


def blaschke_circle_series(alpha: HtScalar, ctx, order=64) -> SeriesHt:
    return node_series(blaschke_circle(alpha, ctx)[0], order)


def bb_closed_form(alpha: HtScalar, q: HtScalar, ctx) -> HtScalar:
    """(q^2 - 2q Re(alpha) + det alpha)(q^2 det alpha - 2q Re(alpha) + 1)^{-1}."""
    re = alpha.a.real
    det = norm_form(alpha, ctx)
    q2 = mul(q, q, ctx)
    num = q2 - q * (2 * re) + HtScalar.real(det)
    den = q2 * det - q * (2 * re) + ONE
    return mul(num, invert(den, ctx), ctx)
