import numpy as np
import numpy.testing as npt
import pytest

from mtvqa import autodiff as ad
from mtvqa.errors import ShapeError, TrainingError

from helpers import OP_CASES


def test_affine_identity_passthrough():
    x = np.random.default_rng(0).normal(size=(3, 4))
    out = ad.affine(ad.constant(x), ad.constant(np.eye(4)), ad.constant(np.zeros(4)))
    npt.assert_array_equal(out.data, x)


def test_conv_width1_is_positionwise_affine():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(2, 5, 3))
    k = rng.normal(size=(1, 3, 4))
    b = rng.normal(size=4)
    out = ad.conv1d(ad.constant(x), ad.constant(k), ad.constant(b))
    for t in range(5):
        expected = x[:, t, :] @ k[0] + b
        npt.assert_allclose(out.data[:, t, :], expected, rtol=1e-12)


def test_max_over_time_constant_sequence():
    x = np.tile(np.array([2.5, -1.0, 0.0]), (2, 4, 1))
    out = ad.max_over_time(ad.constant(x))
    npt.assert_array_equal(out.data, np.tile(np.array([2.5, -1.0, 0.0]), (2, 1)))


def test_concat_splits_gradient():
    rng = np.random.default_rng(2)
    a = ad.parameter(rng.normal(size=(2, 2)), "a")
    b = ad.parameter(rng.normal(size=(2, 3)), "b")
    w = rng.normal(size=(2, 5))
    out = ad.weighted_sum(ad.concat([a, b]), w)
    out.backward()
    npt.assert_array_equal(a.grad, w[:, :2])
    npt.assert_array_equal(b.grad, w[:, 2:])


def test_embedding_rows_and_scatter():
    table = ad.parameter(np.arange(12, dtype=float).reshape(4, 3), "table")
    ids = np.array([[1, 1, 0]])
    out = ad.embedding(table, ids)
    npt.assert_array_equal(out.data[0, 0], table.data[1])
    loss = ad.weighted_sum(out, np.ones((1, 3, 3)))
    loss.backward()
    npt.assert_array_equal(table.grad[1], np.full(3, 2.0))  # id 1 used twice
    npt.assert_array_equal(table.grad[2], np.zeros(3))


def test_embedding_grad_mask_freezes_row():
    table = ad.parameter(np.ones((3, 2)), "table")
    mask = np.ones((3, 2), dtype=bool)
    mask[0] = False
    table.grad_mask = mask
    out = ad.embedding(table, np.array([[0, 1]]))
    ad.weighted_sum(out, np.ones((1, 2, 2))).backward()
    npt.assert_array_equal(table.grad[0], np.zeros(2))
    npt.assert_array_equal(table.grad[1], np.full(2, 1.0))


def test_gradient_accumulates_over_reuse():
    x = ad.parameter(np.array([2.0]), "x")
    y = ad.add(ad.mul(x, x), x)  # x^2 + x, dy/dx = 2x + 1 = 5
    ad.weighted_sum(y, np.ones(1)).backward()
    npt.assert_allclose(x.grad, [5.0])


@pytest.mark.parametrize("name", sorted(OP_CASES))
def test_operator_gradients(name):
    rng = np.random.default_rng(hash(name) % (2 ** 31))
    worst = 0.0
    for _ in range(10):
        fn, params = OP_CASES[name](rng)
        report = ad.check_gradients(fn, params)
        worst = max(worst, report.max_rel_err)
    assert worst < 1e-4, f"{name}: max relative error {worst:.3e}"


def test_shape_errors_name_the_operator():
    a = ad.constant(np.zeros((2, 3)))
    b = ad.constant(np.zeros((3, 2)))
    with pytest.raises(ShapeError, match="add"):
        ad.add(a, b)
    with pytest.raises(ShapeError, match="mul"):
        ad.mul(a, b)
    with pytest.raises(ShapeError, match="affine"):
        ad.affine(a, ad.constant(np.zeros((4, 2))), ad.constant(np.zeros(2)))
    with pytest.raises(ShapeError, match="conv1d"):
        ad.conv1d(ad.constant(np.zeros((1, 2, 3))), ad.constant(np.zeros((3, 3, 2))),
                  ad.constant(np.zeros(2)))
    with pytest.raises(ShapeError, match="max_over_time"):
        ad.max_over_time(a)


def test_backward_requires_scalar():
    with pytest.raises(ShapeError):
        ad.constant(np.zeros(3)).backward()


def test_masked_ce_examples():
    # uniform logits over 4 classes, one unmasked head
    out = ad.softmax_cross_entropy_masked([ad.constant(np.zeros((1, 4)))],
                                          [np.array([2])], [np.array([True])])
    npt.assert_allclose(float(out.data), np.log(4.0), rtol=1e-12)

    # all heads masked: zero loss, exactly-zero gradients
    lg = ad.parameter(np.random.default_rng(3).normal(size=(2, 4)), "lg")
    out = ad.softmax_cross_entropy_masked([lg], [np.array([-1, -1])],
                                          [np.array([False, False])])
    out.backward()
    assert float(out.data) == 0.0
    assert np.all(lg.grad == 0.0)


def test_masked_ce_scalar_oracle():
    # independent scalar computation for logits [2,1,0], target 0
    z = [2.0, 1.0, 0.0]
    import math
    denom = sum(math.exp(v) for v in z)
    expected = -math.log(math.exp(z[0]) / denom)
    out = ad.softmax_cross_entropy_masked([ad.constant(np.array([z]))],
                                          [np.array([0])], [np.array([True])])
    npt.assert_allclose(float(out.data), expected, rtol=1e-12)


def test_masked_ce_gradient_rows_sum_to_zero():
    rng = np.random.default_rng(4)
    lg = ad.parameter(rng.normal(size=(3, 5)), "lg")
    targets = np.array([0, 3, 2])
    mask = np.array([True, False, True])
    ad.softmax_cross_entropy_masked([lg], [targets], [mask]).backward()
    row_sums = lg.grad.sum(axis=1)
    npt.assert_allclose(row_sums[mask], 0.0, atol=1e-12)
    assert np.all(lg.grad[1] == 0.0)


def test_masked_ce_target_out_of_range():
    lg = ad.constant(np.zeros((1, 3)))
    with pytest.raises(TrainingError, match="out of range"):
        ad.softmax_cross_entropy_masked([lg], [np.array([5])], [np.array([True])])
