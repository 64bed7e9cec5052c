"""Scalar arithmetic in the scaled quaternions H_t.

An element is stored as a pair of complex numbers, q = a + b j_t, with
a = x0 + i x1 and b = x2 + i x3.  The real quadruple (x0, x1, x2, x3) holds
the coefficients of 1, i, j_t, k_t where k_t = i j_t.

The rule j_t a = conj(a) j_t gives the product

    (a1 + b1 j)(a2 + b2 j) = (a1 a2 + t b1 conj(b2)) + (a1 b2 + b1 conj(a2)) j
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotStructured, ZeroDivisor

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class AlgebraContext:
    """Holds the scale parameter t of H_t (t = -1 quaternions, t = 1 split)."""

    t: float

    def __post_init__(self):
        t = float(self.t)
        if not math.isfinite(t) or t == 0.0:
            raise ValueError(f"t must be finite and nonzero, got {self.t!r}")
        object.__setattr__(self, "t", t)


@dataclass(frozen=True)
class HtScalar:
    a: complex = 0j
    b: complex = 0j

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if not all(math.isfinite(v) for v in (a.real, a.imag, b.real, b.imag)):
            raise ValueError("HtScalar components must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_quad(cls, x) -> "HtScalar":
        x0, x1, x2, x3 = (float(v) for v in x)
        return cls(complex(x0, x1), complex(x2, x3))

    @classmethod
    def real(cls, r) -> "HtScalar":
        return cls(complex(float(r), 0.0), 0j)

    def quad(self) -> tuple:
        return (self.a.real, self.a.imag, self.b.real, self.b.imag)

    def __add__(self, other):
        if not isinstance(other, HtScalar):
            return NotImplemented
        return HtScalar(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        if not isinstance(other, HtScalar):
            return NotImplemented
        return HtScalar(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return HtScalar(-self.a, -self.b)

    def __mul__(self, r):
        # only real scaling here; the ring product needs t, see mul()
        if isinstance(r, (int, float, np.floating, np.integer)):
            return HtScalar(self.a * r, self.b * r)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, r):
        if isinstance(r, (int, float, np.floating, np.integer)):
            return HtScalar(self.a / r, self.b / r)
        return NotImplemented

    def is_close(self, other: "HtScalar", tol: float = DEFAULT_TOL) -> bool:
        return abs(self.a - other.a) <= tol and abs(self.b - other.b) <= tol

    def star(self) -> "HtScalar":
        return conj_star(self)


ZERO = HtScalar(0, 0)
ONE = HtScalar(1, 0)
I = HtScalar(1j, 0)
J = HtScalar(0, 1)
K = HtScalar(0, 1j)  # i * j_t


def add(p: HtScalar, q: HtScalar) -> HtScalar:
    return p + q


def sub(p: HtScalar, q: HtScalar) -> HtScalar:
    return p - q


def scale(p: HtScalar, r: float) -> HtScalar:
    return p * float(r)


def mul(p: HtScalar, q: HtScalar, ctx: AlgebraContext) -> HtScalar:
    a = p.a * q.a + ctx.t * p.b * q.b.conjugate()
    b = p.a * q.b + p.b * q.a.conjugate()
    return HtScalar(a, b)


def embed(q: HtScalar, ctx: AlgebraContext) -> np.ndarray:
    return np.array([[q.a, ctx.t * q.b], [q.b.conjugate(), q.a.conjugate()]], dtype=complex)


def unembed(M, ctx: AlgebraContext, tol: float = DEFAULT_TOL) -> HtScalar:
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise NotStructured(f"expected a 2x2 matrix, got shape {M.shape}")
    a, b = M[0, 0], np.conj(M[1, 0])
    if abs(M[1, 1] - np.conj(a)) > tol or abs(M[0, 1] - ctx.t * b) > tol:
        raise NotStructured("matrix is not of the form [[a, t b], [conj(b), conj(a)]]")
    return HtScalar(a, b)


def conj_star(q: HtScalar) -> HtScalar:
    return HtScalar(q.a.conjugate(), -q.b)


def norm_form(q: HtScalar, ctx: AlgebraContext) -> float:
    """q q^* = |a|^2 - t |b|^2, also the determinant of embed(q)."""
    return abs(q.a) ** 2 - ctx.t * abs(q.b) ** 2


def invert(q: HtScalar, ctx: AlgebraContext, tol: float = DEFAULT_TOL) -> HtScalar:
    n = norm_form(q, ctx)
    if abs(n) <= tol:
        raise ZeroDivisor(f"{q} has norm form {n:.3g}; not invertible in H_t with t = {ctx.t}")
    return conj_star(q) / n


def bilinear(p: HtScalar, q: HtScalar, ctx: AlgebraContext) -> float:
    """Symmetric real form [p, q] = Tr I(p^*) I(q)."""
    return 2.0 * (q.a * p.a.conjugate()).real - 2.0 * ctx.t * (q.b * p.b.conjugate()).real


def j_symmetry(q: HtScalar) -> HtScalar:
    return HtScalar(q.a, -q.b)


def power(q: HtScalar, n: int, ctx: AlgebraContext) -> HtScalar:
    out = ONE
    for _ in range(n):
        out = mul(out, q, ctx)
    return out
