import re

import numpy as np
import pytest

from dispo import numgrad as ng
from dispo.errors import NonFiniteError, ShapeMismatchError


def _finite_difference(fn, arrays, weights, position, h=1e-6):
    base = [a.copy() for a in arrays]
    grad = np.zeros_like(base[position])
    for idx in np.ndindex(base[position].shape):
        plus = [a.copy() for a in base]
        minus = [a.copy() for a in base]
        plus[position][idx] += h
        minus[position][idx] -= h
        f_plus = np.sum(fn(*[ng.Tensor(a) for a in plus]).data * weights)
        f_minus = np.sum(fn(*[ng.Tensor(a) for a in minus]).data * weights)
        grad[idx] = (f_plus - f_minus) / (2 * h)
    return grad


def _check_gradients(fn, arrays, seed, rtol=1e-4, atol=1e-7):
    rng = np.random.default_rng(seed)
    inputs = [ng.Tensor(a, requires_grad=True) for a in arrays]
    with ng.Tape() as tape:
        out = fn(*inputs)
        weights = rng.standard_normal(out.shape)
        loss = ng.sum_(ng.mul(out, weights))
    ng.backward(tape, loss)
    for position, tensor in enumerate(inputs):
        numeric = _finite_difference(fn, arrays, weights, position)
        assert np.allclose(tensor.grad, numeric, rtol=rtol, atol=atol), (position, tensor.grad, numeric)


def _uniform(rng, shape, low=-1.0, high=1.0):
    return rng.uniform(low, high, size=shape)


def _normal(*shapes):
    return lambda r: [r.standard_normal(s) for s in shapes]


params_primitive_gradients = [
    # C1: elementwise binaries with a trailing-suffix operand
    ("add", lambda a, b: ng.add(a, b), lambda r: [r.standard_normal((3, 4)), r.standard_normal(4)]),
    ("sub", lambda a, b: ng.sub(a, b), lambda r: [r.standard_normal((3, 4)), r.standard_normal((3, 4))]),
    ("mul", lambda a, b: ng.mul(a, b), lambda r: [r.standard_normal((2, 3)), r.standard_normal(3)]),
    ("div", lambda a, b: ng.div(a, b), lambda r: [r.standard_normal((2, 3)), _uniform(r, 3, 1.0, 2.0)]),
    # C2: unary maps
    ("neg", ng.neg, lambda r: [r.standard_normal((2, 3))]),
    ("exp", ng.exp, lambda r: [r.standard_normal((2, 3))]),
    ("expm1", ng.expm1, lambda r: [r.standard_normal((2, 3))]),
    ("softplus", ng.softplus, lambda r: [r.standard_normal((2, 3))]),
    ("silu", ng.silu, lambda r: [r.standard_normal((2, 3))]),
    ("sqrt", ng.sqrt, lambda r: [_uniform(r, (2, 3), 0.5, 2.0)]),
    ("square", ng.square, lambda r: [r.standard_normal((2, 3))]),
    # C3: contractions and normalization
    ("matmul", ng.matmul, lambda r: [r.standard_normal((2, 3, 4)), r.standard_normal((4, 5))]),
    ("matmul batched", ng.matmul, lambda r: [r.standard_normal((2, 3, 4)), r.standard_normal((2, 4, 5))]),
    ("layernorm", ng.layer_norm, _normal((3, 5), 5, 5)),
    # C4: structural primitives
    ("concat", lambda a, b: ng.concat([a, b], axis=0), _normal((2, 3), (1, 3))),
    ("slice", lambda x: ng.getitem(x, (slice(1, 3), slice(None))), lambda r: [r.standard_normal((4, 3))]),
    ("take", lambda x: ng.take(x, [0, 2, 2], axis=0), lambda r: [r.standard_normal((4, 3))]),
    ("sum", lambda x: ng.sum_(x, axis=1), lambda r: [r.standard_normal((4, 3))]),
    ("mean", lambda x: ng.mean(x, axis=0, keepdims=True), lambda r: [r.standard_normal((4, 3))]),
    ("broadcast", lambda x: ng.broadcast_to(x, (2, 4, 3)), lambda r: [r.standard_normal((1, 3))]),
    ("reshape", lambda x: ng.reshape(x, (3, 4)), lambda r: [r.standard_normal((2, 6))]),
    # C5: sequence primitives
    (
        "causal_conv1d",
        ng.causal_conv1d,
        lambda r: [r.standard_normal((2, 5, 3)), r.standard_normal((3, 4)), r.standard_normal(3)],
    ),
    ("logsumexp", lambda x: ng.logsumexp(x, mask=np.array([True, False, True, True])), _normal((3, 4))),
]


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("name, fn, make", params_primitive_gradients)
def test_primitive_gradients(name, fn, make, seed):
    arrays = make(np.random.default_rng(seed))
    _check_gradients(fn, arrays, seed)


X_3BY2 = np.arange(6.0).reshape(3, 2)

params_primitive_values = [
    # C1: softplus at zero is ln 2
    (lambda: ng.softplus(ng.Tensor(0.0)), np.log(2.0)),
    # C2: identity matrix leaves the operand unchanged
    (lambda: ng.matmul(ng.Tensor(np.eye(3)), ng.Tensor(X_3BY2)), X_3BY2),
    # C3: layernorm of [1, 2, 3] with unit gain and zero bias
    (lambda: ng.layer_norm(ng.Tensor([1.0, 2.0, 3.0]), np.ones(3), np.zeros(3)), [-1.2247, 0, 1.2247]),
    # C4: a causal convolution only looks back
    (
        lambda: ng.causal_conv1d(ng.Tensor([[1.0], [2.0], [3.0]]), ng.Tensor([[10.0, 1.0]]), ng.Tensor([0.0])),
        [[1.0], [12.0], [23.0]],
    ),
    # C5: masked entries do not contribute
    (lambda: ng.logsumexp(ng.Tensor([0.0, 100.0, 0.0]), mask=[True, False, True]), np.log(2.0)),
    # C6: a row mask applies to every leading row
    (
        lambda: ng.logsumexp(ng.Tensor([[0.0, 100.0, 0.0], [1.0, -5.0, 1.0]]), mask=[True, False, True]),
        [np.log(2.0), 1.0 + np.log(2.0)],
    ),
]


@pytest.mark.parametrize("build, expected", params_primitive_values)
def test_primitive_values(build, expected):
    actual = build()
    assert np.allclose(actual.data, expected, atol=1e-4)


def test_backward_examples():
    # x squared at 3
    x = ng.Tensor(3.0, requires_grad=True)
    with ng.Tape() as tape:
        loss = ng.square(x)
    ng.backward(tape, loss)
    assert x.grad == pytest.approx(6.0)

    # sum of softplus at 0
    x = ng.Tensor(np.zeros(4), requires_grad=True)
    with ng.Tape() as tape:
        loss = ng.sum_(ng.softplus(x))
    ng.backward(tape, loss)
    assert np.allclose(x.grad, 0.5)


def test_backward_accumulates_shared_operands():
    x = ng.Tensor([1.0, -2.0], requires_grad=True)
    with ng.Tape() as tape:
        loss = ng.sum_(ng.mul(x, x) + x)
    ng.backward(tape, loss)
    assert np.allclose(x.grad, 2 * x.data + 1)
    ng.zero_grad([x])
    assert x.grad is None


def test_scalar_tensors_keep_zero_dimensions():
    scale = ng.Tensor(-0.5)
    assert scale.shape == ()
    x = ng.Tensor(np.ones((2, 2)), requires_grad=True)
    with ng.Tape() as tape:
        loss = ng.sum_(ng.mul(x, scale))
    ng.backward(tape, loss)
    assert loss.shape == ()
    assert np.allclose(x.grad, -0.5)


def test_recording_needs_tape_and_grad():
    x = ng.Tensor([1.0, 2.0], requires_grad=True)
    y = ng.exp(x)
    assert y.is_leaf and not y.requires_grad
    with ng.Tape() as tape:
        ng.exp(ng.Tensor([1.0]))
        z = ng.exp(x)
    assert tape.kinds() == ["exp"]
    assert z.requires_grad
    assert ng.active_tape() is None


params_primitive_errors = [
    # C1: unknown primitive
    (lambda: ng.primitive_forward("fft", ng.Tensor(1.0)), [ValueError, "Unknown primitive 'fft'."]),
    # C2: mismatched operands name the op-kind and both shapes
    (
        lambda: ng.add(ng.Tensor(np.ones((2, 3))), ng.Tensor(np.ones(2))),
        [ShapeMismatchError, "Incompatible shapes for 'add': (2, 3) and (2,)."],
    ),
    (
        lambda: ng.matmul(ng.Tensor(np.ones((2, 3))), ng.Tensor(np.ones((2, 3)))),
        [ShapeMismatchError, "Incompatible shapes for 'matmul': (2, 3) and (2, 3)."],
    ),
    # C3: non-finite inputs and outputs
    (lambda: ng.exp(ng.Tensor([np.nan])), [NonFiniteError, "Non-finite input 0 for 'exp'."]),
    (lambda: ng.exp(ng.Tensor([1000.0])), [NonFiniteError, "Non-finite output for 'exp'."]),
    (lambda: ng.div(ng.Tensor([1.0]), ng.Tensor([0.0])), [NonFiniteError, "Division by zero in 'div'."]),
    # C4: a mask row without entries
    (
        lambda: ng.logsumexp(ng.Tensor(np.zeros((2, 2))), mask=[[True, False], [False, False]]),
        [ValueError, "'logsumexp' mask selects no entry in at least one row."],
    ),
    # C5: a mask that does not broadcast to the input
    (
        lambda: ng.logsumexp(ng.Tensor(np.zeros((3, 4))), mask=[True, False, True]),
        [ShapeMismatchError, "Incompatible shapes for 'logsumexp': (3, 4) and (3,)."],
    ),
]


@pytest.mark.parametrize("build, expected", params_primitive_errors)
def test_primitive_errors(build, expected):
    with pytest.raises(expected[0], match=re.escape(expected[1])):
        build()


def test_backward_rejects_non_scalar_loss():
    x = ng.Tensor(np.ones(3), requires_grad=True)
    with ng.Tape() as tape:
        y = ng.exp(x)
    with pytest.raises(ValueError, match=re.escape("backward() needs a scalar loss, got a tensor of shape (3,).")):
        ng.backward(tape, y)


params_adamw_step = [
    # C1: one step with unit gradient moves by the learning rate after bias correction
    ([1.0, 1.0, 0.1, 0.0], 0.9),
    # C2: zero gradient and zero decay leave the parameter unchanged
    ([1.0, 0.0, 0.1, 0.0], 1.0),
    # C3: decoupled decay shrinks by lr * decay * p
    ([2.0, 0.0, 0.1, 0.5], 2.0 - 0.1 * 0.5 * 2.0),
]


@pytest.mark.parametrize("inputs, expected", params_adamw_step)
def test_adamw_step(inputs, expected):
    value, grad, lr, decay = inputs
    p = ng.Tensor(value, requires_grad=True, name="p")
    p.grad = np.array(grad)
    state = ng.OptimState([p], lr=lr, weight_decay=decay)
    ng.adamw_step([p], state)
    assert p.item() == pytest.approx(expected, abs=1e-6)
    assert state.step == 1


def test_adamw_step_missing_grad():
    params = {"w": ng.Tensor(np.ones(2), requires_grad=True)}
    state = ng.OptimState(params)
    with pytest.raises(ValueError, match=re.escape("Parameter 'w' has no gradient.")):
        ng.adamw_step(params, state)
