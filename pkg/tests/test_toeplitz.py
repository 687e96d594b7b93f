import numpy as np
import pytest

from qfock import toeplitz
from qfock import spaces as sp
from qfock.fock import FockContext, GradedOperator, GradedVector, c_constant, r_star
from conftest import Q_GRID, make_ctx


def test_monomial_free_action_on_vacuum(ctx_free, rng):
    # a*(v)a(w) kills the vacuum; a*(v) creates v
    ctx = ctx_free
    v = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    w = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    vac = GradedVector.vacuum(ctx)
    assert toeplitz.monomial(ctx, [v], [w]).op.apply(vac).norm() < 1e-12
    created = toeplitz.monomial(ctx, [v], []).op.apply(vac)
    assert np.allclose(created.blocks[1], v)


def test_monomial_matches_word_product(ctx_half, rng):
    ctx = ctx_half
    v = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    w = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    combined = toeplitz.monomial(ctx, [v], [w]).op
    split = toeplitz.creation_word(ctx, v, 1) @ toeplitz.annihilation_word(ctx, w, 1)
    assert combined.max_diff(split) < 1e-10


def test_degree_expectation_properties(ctx_half, rng):
    ctx = ctx_half
    blocks = {(m, n): rng.standard_normal((ctx.block_size(m), ctx.block_size(n)))
              for m in range(3) for n in range(3)}
    op = GradedOperator(ctx, ctx, blocks)
    ex = toeplitz.degree_expectation(op)
    assert toeplitz.degree_expectation(ex).max_diff(ex) < 1e-14  # idempotent
    ident = GradedOperator.identity(ctx)
    assert toeplitz.degree_expectation(ident).max_diff(ident) < 1e-14  # unital
    # vacuum-state compatible
    vac = GradedVector.vacuum(ctx)
    lhs = ex.apply(vac).blocks[0][0]
    rhs = op.apply(vac).blocks[0][0]
    assert abs(lhs - rhs) < 1e-14


def test_degree_expectation_positive(ctx_half, rng):
    ctx = ctx_half
    op = GradedOperator(ctx, ctx, {(1, 2): rng.standard_normal((3, 9)),
                                   (2, 2): rng.standard_normal((9, 9))})
    psd = op.adjoint() @ op
    ex = toeplitz.degree_expectation(psd)
    for n in range(3):
        gauged = ctx.metric_sqrt(n) @ ex.block(n, n) @ ctx.metric_invsqrt(n)
        w = np.linalg.eigvalsh((gauged + np.conj(gauged).T) / 2.0)
        assert w.min() > -1e-10 * max(1.0, w.max())


def test_flip_reverses_tensor_order(ctx_half, rng):
    ctx = ctx_half
    v = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    w = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    F = toeplitz.flip(ctx, 2)
    assert np.allclose(F @ np.kron(v, w), np.kron(w, v))
    assert np.allclose(F @ F, np.eye(ctx.block_size(2)))


def test_flip_pairing_free_case(ctx_free, rng):
    ctx = ctx_free
    for n in (1, 2):
        size = ctx.block_size(n)
        v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        w = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        e = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        assert toeplitz.flip_pairing_residual(ctx, v, w, e, n) < 1e-10


def test_flip_pairing_q_deformed(rng):
    for q in Q_GRID:
        ctx = make_ctx("b2", q, 4)
        size = ctx.block_size(2)
        v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        w = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        e = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        assert toeplitz.flip_pairing_residual(ctx, v, w, e, 2) < 1e-10


def test_subspace_requires_conjugation_closure(space_b2t1):
    with pytest.raises(ValueError):
        toeplitz.subspace(space_b2t1, [0])  # lambda = 2 without its 1/2 partner
    sub = toeplitz.subspace(space_b2t1, [0, 1])
    assert sub.dim == 2
    assert np.allclose(sorted(sub.a), [0.5, 2.0])


def test_compression_is_multiplicative(rng):
    ctx = make_ctx("b2+t1", 0.5, 4)
    sub = toeplitz.subspace(ctx.space, [0, 1])
    ctx_small = FockContext(sub, 0.5, 4)
    v = np.array([1.0, 2.0j, 0.0])
    w = np.array([0.5, -1.0, 0.0])
    x = toeplitz.monomial(ctx, [v], [w]).op
    y = toeplitz.monomial(ctx, [w], []).op
    lhs = toeplitz.compression(ctx, ctx_small, [0, 1], x @ y)
    rhs = toeplitz.compression(ctx, ctx_small, [0, 1], x) \
        @ toeplitz.compression(ctx, ctx_small, [0, 1], y)
    for p in range(ctx.degree - 1):
        for m in range(ctx.degree + 1):
            assert ctx_small.block_norm(lhs.block(m, p) - rhs.block(m, p), m, p) < 1e-9


def test_finkernel_full_rank_examples():
    for q in (0.0, 0.5, -0.9):
        ctx = make_ctx("b2", q, 4)
        report = toeplitz.finkernel_rank(ctx, [0, 1], max_length=2)
        assert report["full_rank"]
        assert report["n_columns"] == 1 + 2 + 2 + 4 + 4 + 4  # lengths 0..2


def test_finkernel_rejects_deep_lengths(ctx_half):
    with pytest.raises(ValueError):
        toeplitz.finkernel_rank(ctx_half, [0, 1], max_length=3)


def test_compression_identity_pure_length(rng):
    for q in Q_GRID:
        ctx = make_ctx("t2", q, 5)
        for n in (1, 2):
            elem = toeplitz.random_balanced(ctx, rng, n)
            for k in range(ctx.degree - 2 * n + 1):
                assert toeplitz.compression_identity_residual(ctx, elem, k) < 1e-10


def test_low_degree_corners_vanish(ctx_half, rng):
    elem = toeplitz.random_balanced(ctx_half, rng, 2)
    assert toeplitz.low_degree_residual(ctx_half, elem) < 1e-14


def test_norm_bound_margin_nonnegative(rng):
    for q in Q_GRID:
        ctx = make_ctx("b2", q, 4)
        for n in (1, 2):
            elem = toeplitz.random_balanced(ctx, rng, n)
            assert toeplitz.norm_bound_margin(ctx, elem) > -1e-8


def test_norm_bound_uses_frozen_constant():
    assert abs(c_constant(0.5) - 3.46275) < 1e-5


def test_majorisation_on_symmetrizer_factorization(rng):
    for q in (0.3, -0.5, 0.9):
        ctx = make_ctx("b2", q, 4)
        for n, k in ((1, 1), (2, 1), (1, 2), (2, 2)):
            check = toeplitz.majorisation_check(
                ctx.sym(n + k), np.kron(ctx.sym(n), ctx.sym(k)), r_star(ctx, n, k))
            assert check["consistent"]
            assert check["min_eig_A"] > 0
            assert check["min_eig_B"] > 0
            assert check["margin"] > -1e-10


def test_majorisation_detects_inconsistency(rng):
    A = np.eye(2)
    B = np.eye(2)
    T = np.diag([1.0, 0.5])
    check = toeplitz.majorisation_check(A, B, T)
    assert not check["consistent"]


def test_unbalanced_elements_rejected(ctx_half, rng):
    elem = toeplitz.realize(ctx_half, rng.standard_normal((9, 3)), 2, 1)
    with pytest.raises(ValueError):
        toeplitz.compression_identity_residual(ctx_half, elem, 0)
    with pytest.raises(ValueError):
        toeplitz.norm_bound_margin(ctx_half, elem)
