"""Worked examples with known structure, used by the self-test and fixtures."""
from __future__ import annotations

import numpy as np

from .constructors import blaschke_circle, blaschke_line, blaschke_line_pair, brune_section
from .core import AlgebraContext, HtScalar, J as J_T, conj_star, invert, norm_form
from .matrix import HtMatrix
from .realization import Node, node_product
from .structured import Certificate, Kind, antidiag_identity, certificate_residuals


def quaternion(x0, x1=0.0, x2=0.0, x3=0.0):
    return HtScalar.from_quad((x0, x1, x2, x3))


def brune_example(t=-1.0):
    """alpha = j_t, beta = gamma = 1, h = 1."""
    ctx = AlgebraContext(t)
    return brune_section(J_T, quaternion(1), quaternion(1), 1.0, ctx)


def line_blaschke_example(t=-1.0, alpha=(2.0, 0.0, 0.0, 0.0)):
    return blaschke_line(quaternion(*alpha), AlgebraContext(t))


def circle_blaschke_example(t=-1.0, alpha=(0.3, 0.2, -0.25, 0.1)):
    return blaschke_circle(quaternion(*alpha), AlgebraContext(t))


def line_pair_example(t=-1.0, alpha=(0.5, 0.3, 0.2, -0.1), beta=(0.7, -0.2, 0.1, 0.4)):
    return blaschke_line_pair(quaternion(*alpha), quaternion(*beta), AlgebraContext(t))


def blaschke_product_example(t=-1.0, a1=(0.6, 0.2, -0.3, 0.1), a2=(-0.4, 0.5, 0.2, 0.3)):
    ctx = AlgebraContext(t)
    n1, _ = blaschke_line(quaternion(*a1), ctx)
    n2, _ = blaschke_line(quaternion(*a2), ctx)
    return node_product(n1, n2), HtMatrix.eye(1, ctx)


def line_antisym_pair(p0: HtScalar, ctx):
    """phi(x) = x(1 - x p0)^{-1} + x(1 + x p0^*)^{-1} with H = antidiag.

    A = diag(p0, -p0^*), C = B^* = [1, 1], D = 0.  For t < 0, or p0 with
    non-real spectrum, every eigen-derived proper subspace is H-neutral and phi
    has no nontrivial decomposition.  For t > 0 and real spectrum the
    zero-divisor eigenvector halves can combine into a nondegenerate module.
    """
    A = HtMatrix.diag([p0, -conj_star(p0)], ctx)
    C = HtMatrix.real([[1, 1]], ctx)
    node = Node(A, C.star(), C, HtMatrix.zeros(1, 1, ctx))
    H = antidiag_identity(1, ctx)
    return node, Certificate(H, Kind.LINE_ANTISYM, certificate_residuals(node, None, H, Kind.LINE_ANTISYM))


def line_antisym_example(t=-1.0, p0=(0.4, 0.3, -0.2, 0.5)):
    return line_antisym_pair(quaternion(*p0), AlgebraContext(t))


def double_x_example(t=-1.0):
    """2x = x + x on the (non-minimal) node A = 0, B = [1; 1], C = [1, 1] with H = I."""
    ctx = AlgebraContext(t)
    C = HtMatrix.real([[1, 1]], ctx)
    node = Node(HtMatrix.zeros(2, 2, ctx), C.star(), C, HtMatrix.zeros(1, 1, ctx))
    H = HtMatrix.eye(2, ctx)
    return node, Certificate(H, Kind.LINE_ANTISYM, certificate_residuals(node, None, H, Kind.LINE_ANTISYM))


def unit_scalar(ctx, a=0.6 + 0.3j, b=0.4 - 0.2j):
    """Rescale a + b j_t so that q q^* = 1 (needs positive norm form)."""
    q = HtScalar(a, b)
    n = norm_form(q, ctx)
    if n <= 0:
        raise ValueError("norm form must be positive to normalize")
    return q / np.sqrt(n)


def circle_antisym_example(t=-1.0):
    """phi(x) = 1/2 (1 + x p0)(1 - x p0)^{-1} with p0 p0^* = 1: A = C = p0, B = H = 1, D = 1/2."""
    ctx = AlgebraContext(t)
    p0 = unit_scalar(ctx)
    P = HtMatrix.scalar(p0, ctx)
    node = Node(P, HtMatrix.eye(1, ctx), P, HtMatrix.real([[0.5]], ctx))
    H = HtMatrix.eye(1, ctx)
    return node, Certificate(H, Kind.CIRCLE_ANTISYM, certificate_residuals(node, None, H, Kind.CIRCLE_ANTISYM))


def circle_antisym_pair(p1: HtScalar, ctx):
    """A = diag(p1, p1^{-*}), B = [1; 1], C = [p1, p1^{-*}], D = 1, H = antidiag."""
    pi = conj_star(invert(p1, ctx))
    A = HtMatrix.diag([p1, pi], ctx)
    B = HtMatrix.real([[1], [1]], ctx)
    C = HtMatrix.from_scalars([[p1, pi]], ctx)
    node = Node(A, B, C, HtMatrix.eye(1, ctx))
    H = antidiag_identity(1, ctx)
    return node, Certificate(H, Kind.CIRCLE_ANTISYM, certificate_residuals(node, None, H, Kind.CIRCLE_ANTISYM))


def circle_antisym_pair_example(t=-1.0, p1=(0.8, 0.3, -0.4, 0.2)):
    return circle_antisym_pair(quaternion(*p1), AlgebraContext(t))


def psi_power_node(p0: HtScalar, n: int, ctx) -> Node:
    """(1 - x p0)^{-n} as an n-fold product of (A = p0, B = p0, C = 1, D = 1)."""
    one = HtMatrix.eye(1, ctx)
    P = HtMatrix.scalar(p0, ctx)
    base = Node(P, P, one, one)
    node = base
    for _ in range(n - 1):
        node = node_product(node, base)
    return node
