"""Length-graded machinery for the algebra generated by creation operators.

Elements are realized as graded operators on the truncated Fock space:
creation words, annihilation words, their mixed products, the circle-action
conditional expectation (implemented as the exact block-diagonal projection),
compressions to conjugation-invariant subspaces, and the quantitative norm
comparisons between an element and its lowest nonvanishing corner.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .fock import FockContext, GradedOperator, c_constant, first_quantization, r_star
from .spaces import DeformedSpace


def creation_word(ctx: FockContext, v_tensor, degree: int) -> GradedOperator:
    """Linear extension of ``v_1 (x) ... (x) v_k -> a*_q(v_1)...a*_q(v_k)``."""
    v = np.asarray(v_tensor, dtype=complex).reshape(ctx.block_size(degree), 1)
    blocks = {}
    for p in range(ctx.degree - degree + 1):
        blocks[(p + degree, p)] = np.kron(v, np.eye(ctx.block_size(p)))
    if degree == 0:
        return v[0, 0] * GradedOperator.identity(ctx)
    return GradedOperator(ctx, ctx, blocks)


def annihilation_word(ctx: FockContext, w_tensor, degree: int) -> GradedOperator:
    """Extension of ``w_1 (x) ... (x) w_m -> a_q(w_1)...a_q(w_m)`` (antilinear
    in the tensor, i.e. linear on the conjugate space)."""
    w = np.asarray(w_tensor, dtype=complex).reshape(ctx.block_size(degree))
    if degree == 0:
        return np.conj(w[0]) * GradedOperator.identity(ctx)
    return ctx.mixed_word_operator(np.conj(w)[None, :], 0, degree)


@dataclass
class LengthElement:
    """A mixed creation/annihilation element with its realized operator.

    ``n_create`` and ``n_annihilate`` count the tensor degrees of the two
    legs; the total length is their sum.  Elements used in the corner-norm
    comparisons are the balanced ones (equal legs).
    """

    ctx: FockContext
    n_create: int
    n_annihilate: int
    coeff: np.ndarray = field(repr=False)
    op: GradedOperator = field(repr=False)

    @property
    def length(self) -> int:
        return self.n_create + self.n_annihilate

    @property
    def balanced(self) -> bool:
        return self.n_create == self.n_annihilate


def realize(ctx: FockContext, coeff, n_create: int, n_annihilate: int) -> LengthElement:
    """Realize a coefficient tensor on (creation leg) x (conjugate
    annihilation leg) as a graded operator."""
    if n_create + n_annihilate > ctx.degree:
        raise ValueError("length overflow for this truncation")
    Z = np.asarray(coeff, dtype=complex).reshape(ctx.block_size(n_create),
                                                 ctx.block_size(n_annihilate))
    op = ctx.mixed_word_operator(Z, n_create, n_annihilate)
    return LengthElement(ctx, n_create, n_annihilate, Z, op)


def monomial(ctx: FockContext, v_list, w_list) -> LengthElement:
    """Product of creations then annihilations in the given order."""
    k, m = len(v_list), len(w_list)
    if k + m > ctx.degree:
        raise ValueError("length overflow for this truncation")
    v = np.ones(1, dtype=complex)
    for vec in v_list:
        v = np.kron(v, np.asarray(vec, dtype=complex).reshape(ctx.dim))
    w = np.ones(1, dtype=complex)
    for vec in w_list:
        w = np.kron(w, np.asarray(vec, dtype=complex).reshape(ctx.dim))
    coeff = np.outer(v, np.conj(w))
    return realize(ctx, coeff, k, m)


def random_balanced(ctx: FockContext, rng, n: int) -> LengthElement:
    size = ctx.block_size(n)
    coeff = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return realize(ctx, coeff, n, n)


def degree_expectation(op: GradedOperator) -> GradedOperator:
    """Circle-action average: exact projection onto the degree-diagonal blocks."""
    return op.diagonal_part()


def flip(ctx: FockContext, n: int) -> np.ndarray:
    """Tensor order reversal on degree-n coordinates."""
    if n > ctx.degree:
        raise ValueError("degree out of range")
    size = ctx.block_size(n)
    rows = ctx._reverse_map(n) if n > 0 else np.zeros(1, dtype=int)
    F = np.zeros((size, size))
    F[rows, np.arange(size)] = 1.0
    return F


def flip_pairing_residual(ctx: FockContext, v_tensor, w_tensor, e_tensor, n: int) -> float:
    """Residual of ``a*_q(v) a_q(w-bar) e = <flip(w), e> v`` on degree-n input.

    At q = 0 the pairing is the plain (free) one; for q != 0 the identity
    holds with the q-deformed pairing, which is what is checked here.
    """
    v = np.asarray(v_tensor, dtype=complex).reshape(ctx.block_size(n))
    w = np.asarray(w_tensor, dtype=complex).reshape(ctx.block_size(n))
    e = np.asarray(e_tensor, dtype=complex).reshape(ctx.block_size(n))
    elem = realize(ctx, np.outer(v, np.conj(w)), n, n)
    lhs = elem.op.block(n, n) @ e
    pairing = ctx.q_inner(flip(ctx, n) @ w, e, n)
    rhs = pairing * v
    return ctx.q_norm(lhs - rhs, n)


def subspace(space: DeformedSpace, indices) -> DeformedSpace:
    """Deformed subspace spanned by the given basis indices.

    The index set must be closed under the conjugation pairing, which also
    makes it invariant under the generator (diagonal in this basis).
    """
    indices = sorted(set(int(i) for i in indices))
    pos = {i: r for r, i in enumerate(indices)}
    for i in indices:
        if space.partner[i] not in pos:
            raise ValueError("subspace is not invariant under the conjugation")
    partner = np.array([pos[space.partner[i]] for i in indices])
    return DeformedSpace(space.a[indices], partner)


def inclusion_of_subspace(space: DeformedSpace, indices) -> np.ndarray:
    indices = sorted(set(int(i) for i in indices))
    m = np.zeros((space.dim, len(indices)))
    for col, i in enumerate(indices):
        m[i, col] = 1.0
    return m


def compression(ctx_big: FockContext, ctx_small: FockContext, indices,
                op: GradedOperator) -> GradedOperator:
    """Compress an operator to the Fock space over a basis-index subspace:
    ``F_q(iota*) x F_q(iota)``, a *-homomorphism on operators leaving the
    small Fock space invariant."""
    iota = inclusion_of_subspace(ctx_big.space, indices)
    finc = first_quantization(ctx_small, ctx_big, iota)
    fproj = first_quantization(ctx_big, ctx_small, iota.T)
    return fproj @ op @ finc


def finkernel_rank(ctx: FockContext, indices, max_length: int,
                   threshold: float = 1e-8) -> dict:
    """Numerical column rank of the realization map on the truncated monomial
    basis over a subspace; full rank certifies injectivity at this scale."""
    if max_length > ctx.degree // 2:
        raise ValueError("max_length must be at most N/2")
    indices = sorted(set(int(i) for i in indices))
    p_max = ctx.degree - max_length
    basis_vecs = []
    for i in indices:
        e = np.zeros(ctx.dim, dtype=complex)
        e[i] = 1.0
        basis_vecs.append(e)
    n_cols_kept = sum(ctx.block_size(p) for p in range(p_max + 1))
    columns = []
    for k in range(max_length + 1):
        for m in range(max_length + 1 - k):
            for vs in itertools.product(basis_vecs, repeat=k):
                for ws in itertools.product(basis_vecs, repeat=m):
                    elem = monomial(ctx, list(vs), list(ws))
                    dense = elem.op.to_dense()[:, :n_cols_kept]
                    columns.append(dense.ravel())
    matrix = np.stack(columns, axis=1)
    svals = np.linalg.svd(matrix, compute_uv=False)
    rank = int(np.sum(svals > threshold * svals[0]))
    return {
        "n_columns": matrix.shape[1],
        "rank": rank,
        "full_rank": rank == matrix.shape[1],
        "smallest_singular_value": float(svals[-1]),
        "largest_singular_value": float(svals[0]),
    }


def compression_identity_residual(ctx: FockContext, elem: LengthElement, k: int) -> float:
    """Residual of the corner propagation identity
    ``P_{n+k} x P_{n+k} = (P_n x P_n (x) Id_k) R*`` for balanced x."""
    if not elem.balanced:
        raise ValueError("identity applies to balanced elements")
    n = elem.n_create
    if n + k > ctx.degree:
        raise ValueError("degree overflow")
    lhs = elem.op.block(n + k, n + k)
    rhs = np.kron(elem.op.block(n, n), np.eye(ctx.block_size(k))) @ r_star(ctx, n, k)
    return ctx.block_norm(lhs - rhs, n + k, n + k)


def norm_bound_margin(ctx: FockContext, elem: LengthElement) -> float:
    """``C(q) ||P_n x P_n|| - sup_k ||P_{n+k} x P_{n+k}||`` for balanced x of
    leg degree n; nonnegative up to numerics."""
    if not elem.balanced:
        raise ValueError("bound applies to balanced elements")
    n = elem.n_create
    corner = ctx.block_norm(elem.op.block(n, n), n, n)
    sup = 0.0
    for k in range(ctx.degree - n + 1):
        sup = max(sup, ctx.block_norm(elem.op.block(n + k, n + k), n + k, n + k))
    return c_constant(ctx.q) * corner - sup


def low_degree_residual(ctx: FockContext, elem: LengthElement) -> float:
    """Max norm of corners ``P_m x P_m`` below the annihilation leg degree;
    zero for pure-length elements."""
    res = 0.0
    for m in range(min(elem.n_annihilate, ctx.degree + 1)):
        res = max(res, ctx.block_norm(elem.op.block(m, m), m, m))
    return res


def majorisation_check(A, B, T, consistency_tol: float = 1e-12) -> dict:
    """Check ``A = B T`` with A, B PSD implies ``A <= ||T|| B``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    T = np.asarray(T, dtype=complex)
    scale = max(np.linalg.norm(A, ord=2), 1.0)
    consistency = float(np.linalg.norm(A - B @ T, ord=2))
    psd_a = float(np.linalg.eigvalsh((A + np.conj(A).T) / 2.0)[0])
    psd_b = float(np.linalg.eigvalsh((B + np.conj(B).T) / 2.0)[0])
    t_norm = float(np.linalg.norm(T, ord=2))
    gap = t_norm * B - A
    margin = float(np.linalg.eigvalsh((gap + np.conj(gap).T) / 2.0)[0])
    return {
        "consistent": consistency <= consistency_tol * scale,
        "consistency_residual": consistency,
        "min_eig_A": psd_a,
        "min_eig_B": psd_b,
        "t_norm": t_norm,
        "margin": margin,
    }
