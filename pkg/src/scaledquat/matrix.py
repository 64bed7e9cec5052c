"""Dense matrices over H_t.

A matrix is stored as two complex arrays ``a`` and ``b`` (entrywise
q = a + b j_t) together with the algebra context.  Every rank or
invertibility decision goes through the complex embedding, which places the
2x2 block I(q_jk) at rows 2j, 2j+1 and columns 2k, 2k+1.

Subspaces of H_t^N are handled as real spans (dimension <= 4N).  When an
H_t-module basis is needed (to write a node in an adapted basis) it is picked
greedily from the real span, which can fail for t > 0 where modules need not
be free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .core import DEFAULT_TOL, AlgebraContext, HtScalar, conj_star
from .errors import (EigenFailure, NotFreeModule, NotIdempotent, NotNonnegative,
                     NotStarHermitian, NotStarSymmetric, NotStructured, PreconditionViolated,
                     Singular, SizeMismatch)

RANK_RTOL = 1e-10

# right multiplication by these spans the real coordinates 1, i, j_t, k_t
UNITS = (HtScalar(1, 0), HtScalar(1j, 0), HtScalar(0, 1), HtScalar(0, 1j))


def numerical_rank(M, rtol=RANK_RTOL) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def cond(M) -> float:
    M = np.asarray(M)
    if M.size == 0:
        return 1.0
    s = np.linalg.svd(M, compute_uv=False)
    return np.inf if s[-1] == 0 else s[0] / s[-1]


class HtMatrix:
    """Immutable dense matrix over H_t."""

    __slots__ = ("a", "b", "ctx")

    def __init__(self, a, b, ctx: AlgebraContext):
        a = np.array(a, dtype=complex, ndmin=2)
        b = np.array(b, dtype=complex, ndmin=2)
        if a.shape != b.shape or a.ndim != 2:
            raise SizeMismatch(f"component shapes differ: {a.shape} vs {b.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("HtMatrix entries must be finite")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, name, value):
        raise AttributeError("HtMatrix is immutable")

    # construction
    @classmethod
    def zeros(cls, n, m, ctx):
        return cls(np.zeros((n, m)), np.zeros((n, m)), ctx)

    @classmethod
    def eye(cls, n, ctx):
        return cls(np.eye(n), np.zeros((n, n)), ctx)

    @classmethod
    def real(cls, R, ctx):
        R = np.array(R, dtype=float, ndmin=2)
        return cls(R, np.zeros_like(R), ctx)

    @classmethod
    def scalar(cls, q: HtScalar, ctx):
        return cls([[q.a]], [[q.b]], ctx)

    @classmethod
    def from_scalars(cls, rows, ctx):
        rows = [list(r) for r in rows]
        n = len(rows)
        m = len(rows[0]) if n else 0
        if any(len(r) != m for r in rows):
            raise SizeMismatch("ragged rows")
        a = np.array([[q.a for q in r] for r in rows], dtype=complex).reshape(n, m)
        b = np.array([[q.b for q in r] for r in rows], dtype=complex).reshape(n, m)
        return cls(a, b, ctx)

    @classmethod
    def from_quads(cls, X, ctx):
        X = np.asarray(X, dtype=float)
        if X.ndim != 3 or X.shape[2] != 4:
            if X.size == 0:
                n = X.shape[0] if X.ndim >= 1 else 0
                return cls.zeros(n, 0, ctx)
            raise SizeMismatch(f"expected an (n, m, 4) array of quadruples, got {X.shape}")
        return cls(X[..., 0] + 1j * X[..., 1], X[..., 2] + 1j * X[..., 3], ctx)

    @classmethod
    def diag(cls, entries, ctx):
        entries = list(entries)
        n = len(entries)
        a = np.zeros((n, n), complex)
        b = np.zeros((n, n), complex)
        for k, q in enumerate(entries):
            a[k, k], b[k, k] = q.a, q.b
        return cls(a, b, ctx)

    @classmethod
    def from_embedded(cls, M, ctx, tol=DEFAULT_TOL):
        M = np.asarray(M, dtype=complex)
        if M.ndim != 2 or M.shape[0] % 2 or M.shape[1] % 2:
            raise NotStructured(f"embedded matrix must have even dimensions, got {M.shape}")
        a = M[0::2, 0::2]
        b = np.conj(M[1::2, 0::2])
        scale = 1.0 + (np.abs(M).max() if M.size else 0.0)
        if M.size and (np.abs(M[1::2, 1::2] - np.conj(a)).max() > tol * scale
                       or np.abs(M[0::2, 1::2] - ctx.t * b).max() > tol * scale):
            raise NotStructured("matrix does not have the block structure of an H_t matrix")
        return cls(a, b, ctx)

    @classmethod
    def block(cls, blocks, ctx=None):
        rows = [cls.hstack(r) for r in blocks]
        return cls.vstack(rows)

    @classmethod
    def hstack(cls, mats):
        mats = list(mats)
        ctx = _common_ctx(mats)
        return cls(np.hstack([m.a for m in mats]), np.hstack([m.b for m in mats]), ctx)

    @classmethod
    def vstack(cls, mats):
        mats = list(mats)
        ctx = _common_ctx(mats)
        return cls(np.vstack([m.a for m in mats]), np.vstack([m.b for m in mats]), ctx)

    # views
    @property
    def shape(self):
        return self.a.shape

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def t(self):
        return self.ctx.t

    def __getitem__(self, idx):
        if isinstance(idx, tuple) and len(idx) == 2 and all(isinstance(i, (int, np.integer)) for i in idx):
            return HtScalar(self.a[idx], self.b[idx])
        if not isinstance(idx, tuple):
            idx = (idx, slice(None))
        i, j = (slice(k, k + 1) if isinstance(k, (int, np.integer)) else k for k in idx)
        return HtMatrix(self.a[i, j], self.b[i, j], self.ctx)

    def col(self, j):
        return self[:, j:j + 1]

    def quads(self) -> np.ndarray:
        return np.stack([self.a.real, self.a.imag, self.b.real, self.b.imag], axis=-1)

    def embed(self) -> np.ndarray:
        n, m = self.shape
        E = np.zeros((2 * n, 2 * m), complex)
        E[0::2, 0::2] = self.a
        E[0::2, 1::2] = self.t * self.b
        E[1::2, 0::2] = np.conj(self.b)
        E[1::2, 1::2] = np.conj(self.a)
        return E

    def realvec(self) -> np.ndarray:
        """Real coordinates, column-major over entries, 4 per entry."""
        return self.quads().transpose(1, 0, 2).reshape(-1)

    @classmethod
    def from_realvec(cls, x, n, ctx, m=1):
        X = np.asarray(x, float).reshape(m, n, 4).transpose(1, 0, 2)
        return cls.from_quads(X, ctx)

    # arithmetic
    def _check(self, other, op):
        if not isinstance(other, HtMatrix):
            raise TypeError(f"unsupported operand for {op}: {type(other).__name__}")
        if other.ctx.t != self.ctx.t:
            raise ValueError(f"matrices from different algebras (t = {self.t} vs {other.t})")

    def __add__(self, other):
        self._check(other, "+")
        if self.shape != other.shape:
            raise SizeMismatch(f"{self.shape} + {other.shape}")
        return HtMatrix(self.a + other.a, self.b + other.b, self.ctx)

    def __sub__(self, other):
        self._check(other, "-")
        if self.shape != other.shape:
            raise SizeMismatch(f"{self.shape} - {other.shape}")
        return HtMatrix(self.a - other.a, self.b - other.b, self.ctx)

    def __neg__(self):
        return HtMatrix(-self.a, -self.b, self.ctx)

    def __matmul__(self, other):
        self._check(other, "@")
        if self.cols != other.rows:
            raise SizeMismatch(f"{self.shape} @ {other.shape}")
        a = self.a @ other.a + self.t * (self.b @ np.conj(other.b))
        b = self.a @ other.b + self.b @ np.conj(other.a)
        return HtMatrix(a, b, self.ctx)

    def __mul__(self, r):
        if isinstance(r, (int, float, np.integer, np.floating)):
            return HtMatrix(self.a * r, self.b * r, self.ctx)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, r):
        return self * (1.0 / float(r))

    def rmul(self, q: HtScalar):
        """self * q with q acting on the right of every entry."""
        a = self.a * q.a + self.t * self.b * np.conj(q.b)
        b = self.a * q.b + self.b * np.conj(q.a)
        return HtMatrix(a, b, self.ctx)

    def lmul(self, q: HtScalar):
        """q * self entrywise."""
        a = q.a * self.a + self.t * q.b * np.conj(self.b)
        b = q.a * self.b + q.b * np.conj(self.a)
        return HtMatrix(a, b, self.ctx)

    def star(self):
        return HtMatrix(np.conj(self.a.T), -self.b.T, self.ctx)

    def inv(self, tol=DEFAULT_TOL):
        return mat_inv(self, tol)

    def norm(self) -> float:
        """Frobenius norm of the embedding."""
        return float(np.linalg.norm(self.embed())) if self.a.size else 0.0

    def is_close(self, other, tol=DEFAULT_TOL) -> bool:
        return self.shape == other.shape and (self - other).norm() <= tol

    def __repr__(self):
        return f"HtMatrix(t={self.t}, shape={self.shape}, quads={self.quads().tolist()})"


def _common_ctx(mats):
    if not mats:
        raise ValueError("need at least one matrix")
    ts = {m.ctx.t for m in mats}
    if len(ts) > 1:
        raise ValueError(f"matrices from different algebras: t in {sorted(ts)}")
    return mats[0].ctx


def mat_conj_star(A: HtMatrix) -> HtMatrix:
    return A.star()


def mat_inv(A: HtMatrix, tol=DEFAULT_TOL) -> HtMatrix:
    if A.rows != A.cols:
        raise SizeMismatch(f"cannot invert a {A.shape} matrix")
    if A.rows == 0:
        return A
    E = A.embed()
    if cond(E) > 1.0 / RANK_RTOL:
        raise Singular("matrix is singular to working precision")
    Ei = np.linalg.inv(E)
    # the inverse of a structured matrix is structured; a failure here is a bug
    return HtMatrix.from_embedded(Ei, A.ctx, tol=max(tol, 1e-8) * cond(E))


def sym_part(A):
    return (A + A.star()) * 0.5


def skew_part(A):
    return (A - A.star()) * 0.5


def is_star_symmetric(A, tol=DEFAULT_TOL):
    return A.rows == A.cols and (A - A.star()).norm() <= tol * max(1.0, A.norm())


# real coordinates ---------------------------------------------------------

def metric(n, ctx) -> np.ndarray:
    """Diagonal real matrix of [p, q] in coordinates: weights 2, 2, -2t, -2t."""
    return np.diag(np.tile([2.0, 2.0, -2.0 * ctx.t, -2.0 * ctx.t], n))


def left_mult_real(A: HtMatrix) -> np.ndarray:
    """Real 4n x 4m matrix L with realvec(A f) = L realvec(f)."""
    n, m = A.shape
    L = np.zeros((4 * n, 4 * m))
    for j in range(m):
        c = A.col(j)
        for k, u in enumerate(UNITS):
            L[:, 4 * j + k] = c.rmul(u).realvec()
    return L


def real_span(V: HtMatrix) -> np.ndarray:
    """Orthonormal real basis (4N x d) of the right H_t-module spanned by the columns of V."""
    N = V.rows
    if V.cols == 0:
        return np.zeros((4 * N, 0))
    cols = [V.col(j).rmul(u).realvec() for j in range(V.cols) for u in UNITS]
    M = np.column_stack(cols)
    if not np.any(M):
        return np.zeros((4 * N, 0))
    return sla.orth(M, rcond=RANK_RTOL)


def module_rank(V: HtMatrix) -> int:
    """Rank of the embedding; 2k for k H_t-independent columns."""
    return numerical_rank(V.embed())


def module_basis(candidates: HtMatrix, target_dim=None) -> HtMatrix:
    """Greedy H_t-independent columns: keep a column when the embedded rank grows by 2."""
    N = candidates.rows
    chosen = []
    r = 0
    for j in range(candidates.cols):
        c = candidates.col(j)
        if c.norm() == 0:
            continue
        trial = HtMatrix.hstack(chosen + [c])
        rk = module_rank(trial)
        if rk == r + 2:
            chosen.append(c)
            r = rk
        if target_dim is not None and len(chosen) == target_dim:
            break
    if not chosen:
        return HtMatrix.zeros(N, 0, candidates.ctx)
    return HtMatrix.hstack(chosen)


def _best_conditioned(chosen, cands):
    """Candidate whose addition keeps the embedded columns best conditioned."""
    best, score = None, 0.0
    k = 2 * (len(chosen) + 1)
    for c in cands:
        E = HtMatrix.hstack(chosen + [c]).embed()
        s = np.linalg.svd(E, compute_uv=False)
        if len(s) < k or s[0] == 0:
            continue
        sc = s[k - 1] / s[0]
        if sc > score:
            best, score = c, sc
    return best, score


def module_basis_from_real(R: np.ndarray, N: int, ctx) -> HtMatrix:
    """H_t-module basis of the real subspace with orthonormal basis R (4N x d).

    Columns are picked greedily from the real basis vectors and their pairwise
    sums and differences, each time keeping the best conditioned embedding.
    """
    d = R.shape[1]
    if d == 0:
        return HtMatrix.zeros(N, 0, ctx)
    if d % 4:
        raise NotFreeModule(f"real dimension {d} is not a multiple of 4")
    vecs = [R[:, k] for k in range(d)]
    vecs += [R[:, i] + s * R[:, j] for i in range(d) for j in range(i + 1, d) for s in (1.0, -1.0)]
    cands = [HtMatrix.from_realvec(v / np.linalg.norm(v), N, ctx) for v in vecs]
    chosen = []
    while len(chosen) < d // 4:
        c, score = _best_conditioned(chosen, cands)
        if c is None or score <= RANK_RTOL:
            break
        chosen.append(c)
    basis = HtMatrix.hstack(chosen) if chosen else HtMatrix.zeros(N, 0, ctx)
    if basis.cols != d // 4 or real_span(basis).shape[1] != d:
        raise NotFreeModule("subspace is not a free right H_t-module")
    return basis


def subspace_projector(R: np.ndarray) -> np.ndarray:
    return R @ R.T


def is_invariant(A: HtMatrix, R: np.ndarray, tol=DEFAULT_TOL) -> bool:
    """Test A span(R) in span(R) with the scale-free residual ||(I-P)AP|| <= tol ||A||."""
    if R.shape[1] == 0:
        return True
    L = left_mult_real(A)
    P = subspace_projector(R)
    res = np.linalg.norm((np.eye(P.shape[0]) - P) @ L @ R)
    return res <= tol * max(1.0, np.linalg.norm(L))


# forms ---------------------------------------------------------------------

def vec_bilinear(f: HtMatrix, g: HtMatrix) -> float:
    """[f, g] = sum_k [f_k, g_k] (works for any pair of equal-shape matrices)."""
    if f.shape != g.shape:
        raise SizeMismatch(f"{f.shape} vs {g.shape}")
    t = f.t
    return float(2.0 * np.sum((g.a * np.conj(f.a)).real) - 2.0 * t * np.sum((g.b * np.conj(f.b)).real))


@dataclass(frozen=True)
class FormH:
    """Indefinite form [f, g]_H = [f, H g] for an invertible star-symmetric H."""

    H: HtMatrix
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not is_star_symmetric(self.H, max(self.tol, 1e-9)):
            raise NotStarSymmetric("H must equal its star-adjoint")
        if self.H.rows and cond(self.H.embed()) > 1.0 / RANK_RTOL:
            raise Singular("H must be invertible")

    def __call__(self, f, g):
        return form_H(f, g, self)

    def delta(self, A: HtMatrix) -> HtMatrix:
        """H-adjoint A^Delta = H^{-1} A^* H."""
        return mat_inv(self.H) @ A.star() @ self.H

    def real_matrix(self) -> np.ndarray:
        """W with [f, g]_H = realvec(f)^T W realvec(g)."""
        return metric(self.H.rows, self.H.ctx) @ left_mult_real(self.H)


def form_H(f, g, form: FormH) -> float:
    if form.H.cols != g.rows:
        raise SizeMismatch(f"H is {form.H.shape}, vector has {g.rows} rows")
    return vec_bilinear(f, form.H @ g)


def quadratic_form_matrix(M: HtMatrix) -> np.ndarray:
    if M.rows != M.cols:
        raise SizeMismatch("quadratic form needs a square matrix")
    W = metric(M.rows, M.ctx) @ left_mult_real(M)
    return 0.5 * (W + W.T)


def is_star_nonnegative(M: HtMatrix, tol=DEFAULT_TOL) -> bool:
    if not is_star_symmetric(M, tol):
        raise NotStarSymmetric("matrix is not star-symmetric")
    if M.rows == 0:
        return True
    Q = quadratic_form_matrix(M)
    ev = np.linalg.eigvalsh(Q)
    return bool(ev[0] >= -tol * max(1.0, abs(ev).max()))


def positive_factorize(M: HtMatrix, tol=DEFAULT_TOL) -> HtMatrix:
    """Write M = F F^* with F lower triangular (t < 0 only).

    Scans for the first positive diagonal pivot; every earlier row must vanish.
    The remaining block is handled through its Schur complement.
    """
    if M.t >= 0:
        raise PreconditionViolated("positive_factorize requires t < 0")
    if not is_star_symmetric(M, tol):
        raise NotStarSymmetric("matrix is not star-symmetric")
    scale = max(1.0, M.norm())
    F = _pf(M, tol * scale)
    if (F @ F.star() - M).norm() > 1e3 * tol * scale:
        raise NotNonnegative("reconstruction failed; matrix is not nonnegative")
    return F


def _pf(M: HtMatrix, tol) -> HtMatrix:
    n = M.rows
    ctx = M.ctx
    if n == 0:
        return HtMatrix.zeros(0, 0, ctx)
    d = M.a.diagonal().real
    k = 0
    while k < n and d[k] <= tol:
        if d[k] < -tol:
            raise NotNonnegative(f"negative diagonal entry {d[k]:.3g} at index {k}")
        if np.abs(M.a[k]).max() > tol or np.abs(M.b[k]).max() > tol:
            raise NotNonnegative(f"zero diagonal entry at index {k} with a nonzero row")
        k += 1
    F = np.zeros((n, n), complex), np.zeros((n, n), complex)
    if k == n:
        return HtMatrix(*F, ctx)
    s = np.sqrt(d[k])
    Brow = M[k:k + 1, k + 1:]
    col = Brow.star() / s
    F[0][k, k] = s
    F[0][k + 1:, k] = col.a[:, 0]
    F[1][k + 1:, k] = col.b[:, 0]
    S = M[k + 1:, k + 1:] - (Brow.star() @ Brow) / d[k]
    S = sym_part(S)
    Fs = _pf(S, tol)
    F[0][k + 1:, k + 1:] = Fs.a
    F[1][k + 1:, k + 1:] = Fs.b
    return HtMatrix(*F, ctx)


# eigenpairs ----------------------------------------------------------------

def _select_order(w, tol=1e-9):
    key = [(-round(abs(z) / tol), -round(z.real / tol), -round(z.imag / tol)) for z in w]
    return sorted(range(len(w)), key=lambda k: key[k])


def eigenpairs(A: HtMatrix):
    """All complex eigenpairs of embed(A) turned into H_t eigenvectors, in selection order.

    For an eigenpair (lam, u) of I(A) with u = (a_1, conj(b_1), ...), the column
    f with entries a_k + b_k j_t satisfies A f = f lam.
    """
    if A.rows != A.cols:
        raise SizeMismatch("eigenpair needs a square matrix")
    try:
        w, U = np.linalg.eig(A.embed())
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    out = []
    for k in _select_order(w):
        u = U[:, k]
        f = HtMatrix(u[0::2, None], np.conj(u[1::2, None]), A.ctx)
        out.append((f, complex(w[k])))
    return out


def eigenpair(A: HtMatrix, tol=1e-8):
    f, lam = eigenpairs(A)[0]
    res = (A @ f - f.rmul(HtScalar(lam, 0))).norm()
    if res > tol * max(1.0, A.norm()):
        raise EigenFailure(f"eigenpair residual {res:.3g} too large")
    return f, lam


# projections and subspaces -------------------------------------------------

@dataclass(frozen=True)
class ProjectionDecomposition:
    pi: HtMatrix
    range_basis: HtMatrix
    kernel_basis: HtMatrix


def is_idempotent(pi: HtMatrix, tol=DEFAULT_TOL) -> bool:
    return pi.rows == pi.cols and (pi @ pi - pi).norm() <= tol * max(1.0, pi.norm())


def projection_ops(pi: HtMatrix, tol=DEFAULT_TOL) -> ProjectionDecomposition:
    if not is_idempotent(pi, tol):
        raise NotIdempotent("pi @ pi != pi")
    N = pi.rows
    ran = module_basis(pi)
    ker = module_basis(HtMatrix.eye(N, pi.ctx) - pi)
    if ran.cols + ker.cols != N:
        raise NotFreeModule("range and kernel of pi are not free H_t-modules")
    return ProjectionDecomposition(pi, ran, ker)


def h_orthogonal_complement(basis: HtMatrix, form: FormH) -> HtMatrix:
    N = form.H.rows
    R = real_span(basis)
    if R.shape[1] == 0:
        return HtMatrix.eye(N, form.H.ctx)
    W = form.real_matrix()
    Rp = sla.null_space((W.T @ R).T, rcond=RANK_RTOL)
    return module_basis_from_real(Rp, N, form.H.ctx)


def gram_real(basis: HtMatrix, form: FormH) -> np.ndarray:
    R = real_span(basis)
    return R.T @ form.real_matrix() @ R


def is_h_nondegenerate(basis: HtMatrix, form: FormH, tol=1e-8) -> bool:
    G = gram_real(basis, form)
    if G.size == 0:
        return True
    s = np.linalg.svd(G, compute_uv=False)
    return bool(s[-1] > tol * max(1.0, np.linalg.norm(form.real_matrix(), 2)))


def kernel_positivity_check(K, points, tol=DEFAULT_TOL) -> bool:
    """Positivity of the kernel K (callable (z, w) -> HtMatrix) sampled on points.

    The block matrix [K(w_k, w_j)] must be star-Hermitian; its real quadratic
    form is then tested for positive semidefiniteness.
    """
    blocks = [[K(wk, wj) for wj in points] for wk in points]
    big = HtMatrix.block(blocks)
    if not is_star_symmetric(big, max(tol, 1e-8)):
        raise NotStarHermitian("K(z, w) != K(w, z)^* on the sample")
    return is_star_nonnegative(sym_part(big), tol)


# linear solves in a star-symmetric unknown -----------------------------------

def star_symmetric_basis(n, ctx):
    """Real basis of the star-symmetric n x n matrices (2n^2 - n elements)."""
    out = []
    for i in range(n):
        a = np.zeros((n, n), complex)
        a[i, i] = 1
        out.append(HtMatrix(a, np.zeros((n, n)), ctx))
    for i in range(n):
        for j in range(i + 1, n):
            for u in UNITS:
                a = np.zeros((n, n), complex)
                b = np.zeros((n, n), complex)
                a[i, j], b[i, j] = u.a, u.b
                s = conj_star(u)
                a[j, i], b[j, i] = s.a, s.b
                out.append(HtMatrix(a, b, ctx))
    return out


def solve_star_symmetric(equations, n, ctx):
    """Least-squares solve of an affine system F(H) = 0 over star-symmetric H.

    ``equations`` maps H to a list of HtMatrix residuals (affine in H).
    Returns (H, residual_norm, rank, n_params).
    """
    def vec(H):
        res = equations(H)
        return np.concatenate([r.realvec() for r in res]) if res else np.zeros(0)

    basis = star_symmetric_basis(n, ctx)
    f0 = vec(HtMatrix.zeros(n, n, ctx))
    if not basis:
        return HtMatrix.zeros(0, 0, ctx), float(np.linalg.norm(f0)), 0, 0
    M = np.column_stack([vec(E) - f0 for E in basis])
    theta, *_ = np.linalg.lstsq(M, -f0, rcond=None)
    H = HtMatrix.zeros(n, n, ctx)
    for c, E in zip(theta, basis):
        H = H + E * float(c)
    res = float(np.linalg.norm(M @ theta + f0))
    return H, res, numerical_rank(M), len(basis)
