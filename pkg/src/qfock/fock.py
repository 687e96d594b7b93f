"""Truncated q-deformed Fock space over a deformed base space.

Degree-n tensors are stored as dense coordinate blocks of length ``dim**n``
with the first tensor factor most significant (np.kron ordering).  The
q-symmetrizer is the permutation sum ``sum_sigma q^inv(sigma) sigma`` and the
degree-n inner product is the quadratic form of ``G^{(x)n} P_q^(n)``; both
matrices commute because the base metric is diagonal in the chosen basis.
"""

from __future__ import annotations

import itertools
import warnings

import numpy as np

from .spaces import DeformedSpace, deformed_inner


def c_constant(q: float, increment: float = 1e-14) -> float:
    """The norm-equivalence constant ``prod_k (1-|q|^k)^{-1}``.

    Partial products are accumulated until the multiplicative increment
    falls below ``increment``.
    """
    if not -1.0 < q < 1.0:
        raise ValueError("|q| must be < 1")
    aq = abs(q)
    if aq == 0.0:
        return 1.0
    prod = 1.0
    k = 1
    while True:
        factor = 1.0 / (1.0 - aq ** k)
        prod *= factor
        if factor - 1.0 < increment:
            return prod
        k += 1


def _digit_table(dim: int, n: int) -> np.ndarray:
    """Array of shape (dim**n, n) listing base-``dim`` digits of each index."""
    if n == 0:
        return np.zeros((1, 0), dtype=int)
    idx = np.arange(dim ** n)
    digits = np.empty((dim ** n, n), dtype=int)
    for pos in range(n - 1, -1, -1):
        digits[:, pos] = idx % dim
        idx //= dim
    return digits


def _inversions(sigma) -> int:
    return sum(1 for i in range(len(sigma)) for j in range(i + 1, len(sigma))
               if sigma[i] > sigma[j])


class FockContext:
    """Truncated q-Fock space: cached symmetrizers and degree metrics.

    Immutable after construction; heavier caches (inverses, metric square
    roots, annihilation-word tensors) are filled lazily but never mutated
    once computed, so contexts stay safe to share across parameter sweeps.
    """

    def __init__(self, space: DeformedSpace, q: float, degree: int):
        if not -1.0 < q < 1.0:
            raise ValueError("|q| must be < 1")
        if degree < 0:
            raise ValueError("truncation degree must be >= 0")
        self.space = space
        self.q = float(q)
        self.degree = int(degree)
        self.dim = space.dim
        self._digits = {n: _digit_table(self.dim, n) for n in range(degree + 1)}
        self._gt = {n: self._metric_diagonal(n) for n in range(degree + 1)}
        self._sym = {n: self._build_symmetrizer(n) for n in range(degree + 1)}
        self._metric = {n: self._gt[n][:, None] * self._sym[n] for n in range(degree + 1)}
        self._sym_inv = {}
        self._metric_eig = {}
        self._ann = {}

    # -- construction helpers -------------------------------------------------

    def _metric_diagonal(self, n: int) -> np.ndarray:
        if n == 0:
            return np.ones(1)
        return np.prod(self.space.g[self._digits[n]], axis=1)

    def _build_symmetrizer(self, n: int) -> np.ndarray:
        size = self.dim ** n
        if n <= 1:
            return np.eye(size)
        weights = self.dim ** np.arange(n - 1, -1, -1)
        digits = self._digits[n]
        cols = np.arange(size)
        P = np.zeros((size, size))
        for sigma in itertools.permutations(range(n)):
            rows = digits[:, sigma] @ weights
            P[rows, cols] += self.q ** _inversions(sigma)
        return P

    # -- cached accessors ------------------------------------------------------

    def block_size(self, n: int) -> int:
        return self.dim ** n

    def sym(self, n: int) -> np.ndarray:
        """q-symmetrizer on degree-n tensors."""
        if not 0 <= n <= self.degree:
            raise ValueError("degree out of range")
        return self._sym[n]

    def sym_inv(self, n: int) -> np.ndarray:
        if n not in self._sym_inv:
            self._sym_inv[n] = np.linalg.inv(self._sym[n])
        return self._sym_inv[n]

    def metric(self, n: int) -> np.ndarray:
        """Positive matrix of the degree-n q-inner product."""
        if not 0 <= n <= self.degree:
            raise ValueError("degree out of range")
        return self._metric[n]

    def metric_diag_free(self, n: int) -> np.ndarray:
        """Diagonal of the free (q = 0) degree-n metric."""
        return self._gt[n]

    def _eig(self, n: int):
        if n not in self._metric_eig:
            M = self._metric[n]
            w, v = np.linalg.eigh((M + M.T) / 2.0)
            if w.min() <= 0:
                raise ValueError(f"degree-{n} metric is not positive definite")
            self._metric_eig[n] = (w, v)
        return self._metric_eig[n]

    def metric_sqrt(self, n: int) -> np.ndarray:
        w, v = self._eig(n)
        return (v * np.sqrt(w)) @ v.T

    def metric_invsqrt(self, n: int) -> np.ndarray:
        w, v = self._eig(n)
        return (v / np.sqrt(w)) @ v.T

    def metric_inv(self, n: int) -> np.ndarray:
        w, v = self._eig(n)
        return (v / w) @ v.T

    # -- inner products and norms ----------------------------------------------

    def q_inner(self, x, y, n: int) -> complex:
        x = np.asarray(x)
        y = np.asarray(y)
        if x.shape != (self.block_size(n),) or y.shape != (self.block_size(n),):
            raise ValueError("degree-n block length mismatch")
        return complex(np.conj(x) @ self.metric(n) @ y)

    def q_norm(self, x, n: int) -> float:
        return float(np.sqrt(max(self.q_inner(x, x, n).real, 0.0)))

    def block_norm(self, B, m: int, n: int) -> float:
        """Operator norm of a degree-n -> degree-m block w.r.t. the q-inner products."""
        return float(np.linalg.norm(self.metric_sqrt(m) @ B @ self.metric_invsqrt(n), ord=2))

    # -- annihilation-word tensors ----------------------------------------------

    def ann_words(self, m: int, p: int) -> np.ndarray:
        """Tensor of shape (dim**m, dim**(p-m), dim**p).

        Entry ``[t]`` is the matrix of the m-fold annihilation word
        ``a_q(e_{t_1}) ... a_q(e_{t_m})`` restricted to degree-p input,
        obtained from the free word conjugated by symmetrizers.
        """
        if m > p or p > self.degree:
            raise ValueError("degree out of range")
        key = (m, p)
        if key in self._ann:
            return self._ann[key]
        dim = self.dim
        if m == 0:
            arr = np.eye(dim ** p)[None, :, :]
        else:
            # the free word for args (e_{t_1}..e_{t_m}) selects the rows of
            # P_q^(p) whose leading m digits are the reversed arg digits,
            # scaled by the product of base-metric weights
            resh = self._sym[p].reshape(dim ** m, dim ** (p - m), dim ** p)
            revmap = self._reverse_map(m)
            gt_m = self._gt[m]
            picked = resh[revmap] * gt_m[:, None, None]
            arr = np.einsum("ir,trj->tij", self.sym_inv(p - m), picked)
        self._ann[key] = arr
        return arr

    def _reverse_map(self, m: int) -> np.ndarray:
        digits = self._digits[m]
        weights = self.dim ** np.arange(m - 1, -1, -1)
        return digits[:, ::-1] @ weights

    def partner_map(self, m: int) -> np.ndarray:
        """Flat index map of the conjugation's basis permutation on degree m."""
        digits = self._digits[m]
        weights = self.dim ** np.arange(m - 1, -1, -1)
        return self.space.partner[digits] @ weights if m > 0 else np.zeros(1, dtype=int)

    def mixed_word_block(self, Z, k: int, m: int, p: int) -> np.ndarray:
        """Block (degree p -> degree p-m+k) of ``sum_{s,t} Z[s,t] a*_q(e_s) a_q(e_t)``
        with ``e_s``/``e_t`` running over degree-k/degree-m basis tensors."""
        Z = np.asarray(Z).reshape(self.dim ** k, self.dim ** m)
        arr = np.einsum("st,tij->sij", Z, self.ann_words(m, p))
        return arr.reshape(self.dim ** (k + p - m), self.dim ** p)

    def mixed_word_operator(self, Z, k: int, m: int) -> "GradedOperator":
        blocks = {}
        for p in range(m, self.degree + 1):
            out = p - m + k
            if out > self.degree:
                continue
            blocks[(out, p)] = self.mixed_word_block(Z, k, m, p)
        return GradedOperator(self, self, blocks)


class GradedVector:
    """Element of the truncated Fock space: one dense block per degree."""

    def __init__(self, ctx: FockContext, blocks):
        if len(blocks) != ctx.degree + 1:
            raise ValueError("expected one block per degree 0..N")
        self.ctx = ctx
        self.blocks = [np.asarray(b, dtype=complex).reshape(ctx.block_size(n))
                       for n, b in enumerate(blocks)]

    @classmethod
    def vacuum(cls, ctx: FockContext) -> "GradedVector":
        blocks = [np.zeros(ctx.block_size(n), dtype=complex) for n in range(ctx.degree + 1)]
        blocks[0][0] = 1.0
        return cls(ctx, blocks)

    @classmethod
    def from_degree(cls, ctx: FockContext, n: int, coeffs) -> "GradedVector":
        vec = cls.vacuum(ctx)
        vec.blocks[0][0] = 0.0
        vec.blocks[n] = np.asarray(coeffs, dtype=complex).reshape(ctx.block_size(n))
        return vec

    @classmethod
    def random(cls, ctx: FockContext, rng, degrees=None) -> "GradedVector":
        degrees = range(ctx.degree + 1) if degrees is None else degrees
        vec = cls.vacuum(ctx)
        vec.blocks[0][0] = 0.0
        for n in degrees:
            size = ctx.block_size(n)
            vec.blocks[n] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return vec

    def __add__(self, other):
        return GradedVector(self.ctx, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        return GradedVector(self.ctx, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __rmul__(self, scalar):
        return GradedVector(self.ctx, [scalar * b for b in self.blocks])

    def norm(self) -> float:
        total = sum(self.ctx.q_inner(b, b, n).real for n, b in enumerate(self.blocks))
        return float(np.sqrt(max(total, 0.0)))


class GradedOperator:
    """Block operator between truncated Fock spaces, indexed (out degree, in degree)."""

    def __init__(self, ctx_out: FockContext, ctx_in: FockContext, blocks):
        self.ctx_out = ctx_out
        self.ctx_in = ctx_in
        self.blocks = {}
        for (m, n), B in blocks.items():
            B = np.asarray(B, dtype=complex)
            expect = (ctx_out.block_size(m), ctx_in.block_size(n))
            if B.shape != expect:
                raise ValueError(f"block ({m},{n}) has shape {B.shape}, expected {expect}")
            self.blocks[(m, n)] = B

    @classmethod
    def identity(cls, ctx: FockContext) -> "GradedOperator":
        return cls(ctx, ctx, {(n, n): np.eye(ctx.block_size(n)) for n in range(ctx.degree + 1)})

    def block(self, m: int, n: int) -> np.ndarray:
        if (m, n) in self.blocks:
            return self.blocks[(m, n)]
        return np.zeros((self.ctx_out.block_size(m), self.ctx_in.block_size(n)), dtype=complex)

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        if other.ctx_out is not self.ctx_in:
            raise ValueError("context mismatch in operator composition")
        blocks = {}
        for (m, p), A in self.blocks.items():
            for (p2, n), B in other.blocks.items():
                if p != p2:
                    continue
                key = (m, n)
                C = A @ B
                blocks[key] = blocks[key] + C if key in blocks else C
        return GradedOperator(self.ctx_out, other.ctx_in, blocks)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        blocks = dict(self.blocks)
        for key, B in other.blocks.items():
            blocks[key] = blocks[key] + B if key in blocks else B
        return GradedOperator(self.ctx_out, self.ctx_in, blocks)

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "GradedOperator":
        return GradedOperator(self.ctx_out, self.ctx_in,
                              {key: scalar * B for key, B in self.blocks.items()})

    def adjoint(self) -> "GradedOperator":
        """Adjoint w.r.t. the q-inner products of both contexts."""
        blocks = {}
        for (m, n), B in self.blocks.items():
            blocks[(n, m)] = self.ctx_in.metric_inv(n) @ np.conj(B).T @ self.ctx_out.metric(m)
        return GradedOperator(self.ctx_in, self.ctx_out, blocks)

    def apply(self, vec: GradedVector) -> GradedVector:
        out = [np.zeros(self.ctx_out.block_size(n), dtype=complex)
               for n in range(self.ctx_out.degree + 1)]
        for (m, n), B in self.blocks.items():
            out[m] = out[m] + B @ vec.blocks[n]
        return GradedVector(self.ctx_out, out)

    def compress(self, degrees) -> "GradedOperator":
        degrees = set(degrees)
        return GradedOperator(self.ctx_out, self.ctx_in,
                              {key: B for key, B in self.blocks.items()
                               if key[0] in degrees and key[1] in degrees})

    def diagonal_part(self) -> "GradedOperator":
        return GradedOperator(self.ctx_out, self.ctx_in,
                              {key: B for key, B in self.blocks.items() if key[0] == key[1]})

    def to_dense(self, gauge: bool = False) -> np.ndarray:
        """Full matrix over the direct sum of degree blocks.

        With ``gauge=True`` the matrix is conjugated by the metric square
        roots, so plain spectral norms/eigenvalues refer to the q-inner
        product geometry.
        """
        No, Ni = self.ctx_out.degree + 1, self.ctx_in.degree + 1
        off_out = np.cumsum([0] + [self.ctx_out.block_size(n) for n in range(No)])
        off_in = np.cumsum([0] + [self.ctx_in.block_size(n) for n in range(Ni)])
        full = np.zeros((off_out[-1], off_in[-1]), dtype=complex)
        for (m, n), B in self.blocks.items():
            if gauge:
                B = self.ctx_out.metric_sqrt(m) @ B @ self.ctx_in.metric_invsqrt(n)
            full[off_out[m]:off_out[m + 1], off_in[n]:off_in[n + 1]] = B
        return full

    def op_norm(self) -> float:
        """Operator norm w.r.t. the q-inner products of the truncated spaces."""
        return float(np.linalg.norm(self.to_dense(gauge=True), ord=2))

    def max_diff(self, other: "GradedOperator") -> float:
        return (self - other).op_norm()


# -- canonical operators -------------------------------------------------------


def creation(ctx: FockContext, v) -> GradedOperator:
    """Creation operator: left tensoring by ``v``; degree N maps to zero."""
    v = np.asarray(v, dtype=complex).reshape(ctx.dim)
    blocks = {}
    for n in range(ctx.degree):
        blocks[(n + 1, n)] = np.kron(v[:, None], np.eye(ctx.block_size(n)))
    return GradedOperator(ctx, ctx, blocks)


def annihilation(ctx: FockContext, v) -> GradedOperator:
    """Annihilation operator; the q-adjoint of creation, realized as the
    symmetrizer conjugate of the free annihilation."""
    v = np.asarray(v, dtype=complex).reshape(ctx.dim)
    return ctx.mixed_word_operator(np.conj(v)[None, :], 0, 1)


def s_q(ctx: FockContext, h, tol: float = 1e-10) -> GradedOperator:
    """Field operator ``a*_q(h) + a_q(h)`` for ``h`` in the I-fixed real subspace."""
    h = np.asarray(h, dtype=complex).reshape(ctx.dim)
    if np.linalg.norm(ctx.space.conjugate(h) - h) > tol:
        warnings.warn("argument is not fixed by the conjugation; s_q will not be self-adjoint",
                      stacklevel=2)
    return creation(ctx, h) + annihilation(ctx, h)


def first_quantization(ctx_src: FockContext, ctx_tgt: FockContext, T) -> GradedOperator:
    """Degree-wise tensor powers of ``T``; fixes the vacuum."""
    if ctx_src.degree != ctx_tgt.degree or ctx_src.q != ctx_tgt.q:
        raise ValueError("contexts must share q and truncation degree")
    T = np.asarray(T, dtype=complex)
    if T.shape != (ctx_tgt.dim, ctx_src.dim):
        raise ValueError("matrix shape does not match the base spaces")
    blocks = {(0, 0): np.eye(1, dtype=complex)}
    power = np.eye(1, dtype=complex)
    for n in range(1, ctx_src.degree + 1):
        power = np.kron(T, power)
        blocks[(n, n)] = power
    return GradedOperator(ctx_tgt, ctx_src, blocks)


def q_symmetrizer(ctx: FockContext, n: int) -> np.ndarray:
    return ctx.sym(n).copy()


def q_inner(ctx: FockContext, x, y, n: int) -> complex:
    return ctx.q_inner(x, y, n)


def crossing_weighted_partitions(n: int, k: int):
    """All partitions of {1..n} into I1 of size k and its complement, with the
    crossing number sum(i_l - l)."""
    for i1 in itertools.combinations(range(1, n + 1), k):
        i2 = tuple(sorted(set(range(1, n + 1)) - set(i1)))
        cross = sum(i - (l + 1) for l, i in enumerate(i1))
        yield i1, i2, cross


def r_star(ctx: FockContext, n: int, k: int) -> np.ndarray:
    """Crossing-weighted coproduct from degree n+k to degree-n (x) degree-k
    coordinates, acting on simple tensors by partition reordering."""
    if n < 0 or k < 0 or n + k > ctx.degree:
        raise ValueError("degree overflow")
    total = n + k
    size = ctx.block_size(total)
    if total == 0:
        return np.eye(1)
    digits = ctx._digits[total]
    weights = ctx.dim ** np.arange(total - 1, -1, -1)
    cols = np.arange(size)
    R = np.zeros((size, size))
    for i1, i2, cross in crossing_weighted_partitions(total, n):
        order = [p - 1 for p in i1] + [p - 1 for p in i2]
        rows = digits[:, order] @ weights
        R[rows, cols] += ctx.q ** cross
    return R


def factorization_residual(ctx: FockContext, n: int, k: int) -> float:
    """Spectral-norm residual of ``P_q^(n+k) = (P_q^(n) (x) P_q^(k)) R*``."""
    lhs = ctx.sym(n + k)
    rhs = np.kron(ctx.sym(n), ctx.sym(k)) @ r_star(ctx, n, k)
    return float(np.linalg.norm(lhs - rhs, ord=2))


def rstar_free_norm(ctx: FockContext, n: int, k: int) -> float:
    """Norm of R* between undeformed tensor powers (plain spectral norm; the
    base metric commutes with position permutations)."""
    return float(np.linalg.norm(r_star(ctx, n, k), ord=2))


def id_embedding_norm(ctx: FockContext, n: int, k: int) -> float:
    """Deformed norm of the coordinate identity from degree-n (x) degree-k to
    degree n+k."""
    total = n + k
    pair_metric_invsqrt = np.kron(ctx.metric_invsqrt(n), ctx.metric_invsqrt(k))
    return float(np.linalg.norm(ctx.metric_sqrt(total) @ pair_metric_invsqrt, ord=2))


def rstar_deformed_norm(ctx: FockContext, n: int, k: int) -> float:
    pair_metric_sqrt = np.kron(ctx.metric_sqrt(n), ctx.metric_sqrt(k))
    return float(np.linalg.norm(pair_metric_sqrt @ r_star(ctx, n, k)
                                @ ctx.metric_invsqrt(n + k), ord=2))


def rstar_adjoint_residual(ctx: FockContext, n: int, k: int) -> float:
    """Residual of ``(Id_{n,k})* = R*`` w.r.t. the deformed q-inner products."""
    pair_metric = np.kron(ctx.metric(n), ctx.metric(k))
    adj = np.linalg.solve(pair_metric, ctx.metric(n + k))
    return float(np.linalg.norm(adj - r_star(ctx, n, k), ord=2))
