import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfock import wick
from qfock.fock import GradedVector, annihilation, creation
from conftest import Q_GRID, make_ctx


def test_crossing_number_examples():
    assert wick.crossing_number((1, 2), ()) == 0
    assert wick.crossing_number((2,), (1,)) == 1
    assert wick.crossing_number((1, 3), (2,)) == 1
    assert wick.crossing_number((2, 3), (1,)) == 2
    with pytest.raises(ValueError):
        wick.crossing_number((1, 1), (2,))
    with pytest.raises(ValueError):
        wick.crossing_number((2, 1), (3,))


def test_degree_one_word_is_field_like(ctx_half, rng):
    # W(xi) at degree 1 = a*(xi) + a(I xi): check on the vacuum and degree 1
    ctx = ctx_half
    xi = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    word = wick.wick_word(ctx, xi, 1)
    expected = creation(ctx, xi) + annihilation(ctx, ctx.space.conjugate(xi))
    assert word.op.max_diff(expected) < 1e-12


def test_degree_two_word_free_case_hand_expansion(ctx_free, rng):
    # q = 0: W(v (x) w) = a*(v)a*(w) + a*(v)a(Iw) + a(Iv)a(Iw) ... with the
    # partition (I1, I2) ordering; assembled by hand from canonical operators
    ctx = ctx_free
    v = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    w = rng.standard_normal(ctx.dim) + 1j * rng.standard_normal(ctx.dim)
    word = wick.wick_word(ctx, np.kron(v, w), 2)
    Iv = ctx.space.conjugate(v)
    Iw = ctx.space.conjugate(w)
    # at q = 0 the crossing-weighted partition I1 = {2} drops out
    hand = (creation(ctx, v) @ creation(ctx, w)
            + creation(ctx, v) @ annihilation(ctx, Iw)
            + annihilation(ctx, Iv) @ annihilation(ctx, Iw))
    # compare away from the truncation edge
    for p in range(ctx.degree - 1):
        for m in range(ctx.degree + 1):
            gap = word.op.block(m, p) - hand.block(m, p)
            assert ctx.block_norm(gap, m, p) < 1e-10


def test_vacuum_image_across_grid(rng):
    for spectrum in ("t2", "b2+t1"):
        for q in Q_GRID:
            ctx = make_ctx(spectrum, q, 4)
            for n in (1, 2, 3):
                size = ctx.block_size(n)
                xi = rng.standard_normal(size) + 1j * rng.standard_normal(size)
                assert wick.vacuum_residual(ctx, xi, n) < 1e-10


def test_linearity(ctx_half, rng):
    ctx = ctx_half
    xi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    eta = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    combined = wick.wick_word(ctx, 2.0 * xi - 1j * eta, 2).op
    split = 2.0 * wick.wick_word(ctx, xi, 2).op - 1j * wick.wick_word(ctx, eta, 2).op
    assert combined.max_diff(split) < 1e-12


def test_adjoint_tensor_involution(ctx_half, rng):
    xi = rng.standard_normal(27) + 1j * rng.standard_normal(27)
    twice = wick.adjoint_tensor(ctx_half, wick.adjoint_tensor(ctx_half, xi, 3), 3)
    assert np.allclose(twice, xi)


def test_word_adjoint_is_adjoint_tensor_word(ctx_half, rng):
    ctx = ctx_half
    for n in (1, 2):
        xi = rng.standard_normal(ctx.block_size(n)) + 1j * rng.standard_normal(ctx.block_size(n))
        adj = wick.wick_word(ctx, xi, n).op.adjoint()
        expected = wick.wick_word(ctx, wick.adjoint_tensor(ctx, xi, n), n).op
        assert adj.max_diff(expected) < 1e-10


def test_self_adjoint_for_fixed_tensors(ctx_half, rng):
    ctx = ctx_half
    for n in (1, 2):
        size = ctx.block_size(n)
        xi = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        fixed = (xi + wick.adjoint_tensor(ctx, xi, n)) / 2.0
        word = wick.wick_word(ctx, fixed, n)
        assert wick.self_adjoint_residual(ctx, word) < 1e-10


@settings(max_examples=25, deadline=None)
@given(q=st.floats(min_value=-0.9, max_value=0.9),
       seed=st.integers(min_value=0, max_value=2 ** 31))
def test_vacuum_image_property(q, seed):
    ctx = make_ctx("t2", q, 3)
    gen = np.random.default_rng(seed)
    n = int(gen.integers(1, 4))
    size = ctx.block_size(n)
    xi = gen.standard_normal(size) + 1j * gen.standard_normal(size)
    assert wick.vacuum_residual(ctx, xi, n) < 1e-10


def test_degree_zero_word_is_scalar(ctx_half):
    word = wick.wick_word(ctx_half, np.array([2.5 - 1j]), 0)
    vac = GradedVector.vacuum(ctx_half)
    assert abs(word.op.apply(vac).blocks[0][0] - (2.5 - 1j)) < 1e-14


def test_degree_overflow_rejected(ctx_half):
    with pytest.raises(ValueError):
        wick.wick_word(ctx_half, np.zeros(3 ** 5), 5)
