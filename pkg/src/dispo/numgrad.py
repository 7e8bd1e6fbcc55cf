#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Reverse-mode automatic differentiation over dense numpy tensors.

Primitives are evaluated eagerly. When a :class:`Tape` is active on the current thread and any operand requires
a gradient, the primitive is recorded on that tape together with the forward values its vector-Jacobian product
needs. :func:`backward` replays the tape in reverse and accumulates gradients into the leaf tensors.

Broadcasting is restricted: an elementwise operand of lower rank must match the trailing dimensions of the other
operand exactly. Size-one axes are only expanded by the explicit ``broadcast`` primitive.
"""

import threading

import numpy as np
from scipy.special import expit

from dispo.errors import NonFiniteError, ShapeMismatchError

LAYERNORM_EPS = 1e-5

unknown_kind_emsg = "Unknown primitive '{kind}'. Known primitives are: {known}."
non_scalar_loss_emsg = "backward() needs a scalar loss, got a tensor of shape {shape}."
loss_not_on_tape_emsg = "The loss was not produced by an operation recorded on this tape."
missing_grad_emsg = "Parameter '{name}' has no gradient. Run backward() before adamw_step()."

_local = threading.local()


class Tensor:
    """A dense float64 array with an optional gradient.

    Parameters
    ----------
    data: array-like
        Values of the tensor. Stored as a contiguous float64 array.
    requires_grad: bool
        Whether gradients should be accumulated into this tensor. Default False.
    name: str
        Optional name used in diagnostics and checkpoints.
    """

    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64, order="C")
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.name = name
        self._record = None

    def __repr__(self):
        label = f", name='{self.name}'" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def is_leaf(self):
        return self._record is None

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0])

    def detach(self):
        return Tensor(self.data.copy())

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)

    def sum(self, axis=None, keepdims=False):
        return sum_(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = shape[0]
        return reshape(self, tuple(shape))


def as_tensor(value):
    """Return ``value`` as a :class:`Tensor`, wrapping numbers and arrays as constants."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


class _Record:
    __slots__ = ("kind", "inputs", "output", "saved", "attrs")

    def __init__(self, kind, inputs, output, saved, attrs):
        self.kind = kind
        self.inputs = inputs
        self.output = output
        self.saved = saved
        self.attrs = attrs


class Tape:
    """Ordered record of the primitives evaluated while the tape is active.

    Use as a context manager; the tape is active for the current thread only, so separate workers need separate
    tapes. Tapes nest, the innermost one records.
    """

    def __init__(self):
        self.records = []

    def __len__(self):
        return len(self.records)

    def __enter__(self):
        stack = getattr(_local, "stack", None)
        if stack is None:
            stack = _local.stack = []
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _local.stack.pop()
        return False

    def kinds(self):
        return [r.kind for r in self.records]


def active_tape():
    """Return the innermost active tape of the current thread, or None."""
    stack = getattr(_local, "stack", None)
    return stack[-1] if stack else None


# shape checks


def _check_trailing(kind, a, b):
    long_, short = (a, b) if a.ndim >= b.ndim else (b, a)
    if short.ndim and long_.shape[long_.ndim - short.ndim :] != short.shape:
        raise ShapeMismatchError(kind, a.shape, b.shape)


def _reduce_to(grad, shape):
    """Sum ``grad`` over the leading dimensions it has beyond ``shape``."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad.reshape(shape)


def _expand_reduced(grad, shape, axis, keepdims):
    if axis is None:
        return np.broadcast_to(np.reshape(grad, (1,) * len(shape)), shape)
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    axes = tuple(a % len(shape) for a in axes)
    if not keepdims:
        for a in sorted(axes):
            grad = np.expand_dims(grad, a)
    return np.broadcast_to(grad, shape)


# primitive table: kind -> (check, forward, vjp)
# forward(arrays, attrs) -> (out, saved); vjp(g, arrays, out, saved, attrs) -> list of input grads


def _no_check(kind, arrays, attrs):
    return None


def _binary_check(kind, arrays, attrs):
    _check_trailing(kind, arrays[0], arrays[1])


def _add_vjp(g, arrays, out, saved, attrs):
    return [_reduce_to(g, arrays[0].shape), _reduce_to(g, arrays[1].shape)]


def _sub_vjp(g, arrays, out, saved, attrs):
    return [_reduce_to(g, arrays[0].shape), _reduce_to(-g, arrays[1].shape)]


def _mul_vjp(g, arrays, out, saved, attrs):
    a, b = arrays
    return [_reduce_to(g * b, a.shape), _reduce_to(g * a, b.shape)]


def _div_check(kind, arrays, attrs):
    _check_trailing(kind, arrays[0], arrays[1])
    if np.any(arrays[1] == 0.0):
        raise NonFiniteError(kind, message=f"Division by zero in '{kind}'.")


def _div_vjp(g, arrays, out, saved, attrs):
    a, b = arrays
    return [_reduce_to(g / b, a.shape), _reduce_to(-g * a / (b * b), b.shape)]


def _matmul_check(kind, arrays, attrs):
    a, b = arrays
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatchError(kind, a.shape, b.shape)
    if b.ndim > 2 and b.shape[:-2] != a.shape[:-2]:
        raise ShapeMismatchError(kind, a.shape, b.shape)


def _matmul_vjp(g, arrays, out, saved, attrs):
    a, b = arrays
    ga = g @ np.swapaxes(b, -1, -2)
    if b.ndim == 2:
        gb = a.reshape(-1, a.shape[-1]).T @ g.reshape(-1, g.shape[-1])
    else:
        gb = np.swapaxes(a, -1, -2) @ g
    return [ga, gb]


def _softplus_vjp(g, arrays, out, saved, attrs):
    return [g * expit(arrays[0])]


def _silu_forward(arrays, attrs):
    s = expit(arrays[0])
    return arrays[0] * s, s


def _silu_vjp(g, arrays, out, s, attrs):
    x = arrays[0]
    return [g * (s + x * s * (1.0 - s))]


def _sqrt_vjp(g, arrays, out, saved, attrs):
    # subgradient 0 where the root is 0
    safe = np.where(out > 0.0, out, 1.0)
    return [np.where(out > 0.0, g / (2.0 * safe), 0.0)]


def _layernorm_check(kind, arrays, attrs):
    x, gain, bias = arrays
    if gain.shape != (x.shape[-1],) or bias.shape != (x.shape[-1],):
        raise ShapeMismatchError(kind, x.shape, gain.shape, bias.shape)


def _layernorm_forward(arrays, attrs):
    x, gain, bias = arrays
    mu = x.mean(axis=-1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
    rstd = 1.0 / np.sqrt(var + LAYERNORM_EPS)
    xhat = (x - mu) * rstd
    return xhat * gain + bias, (xhat, rstd)


def _layernorm_vjp(g, arrays, out, saved, attrs):
    x, gain, bias = arrays
    xhat, rstd = saved
    gxhat = g * gain
    gx = rstd * (
        gxhat - gxhat.mean(axis=-1, keepdims=True) - xhat * (gxhat * xhat).mean(axis=-1, keepdims=True)
    )
    lead = tuple(range(x.ndim - 1))
    return [gx, (g * xhat).sum(axis=lead), g.sum(axis=lead)]


def _concat_check(kind, arrays, attrs):
    axis = attrs.get("axis", 0)
    ref = arrays[0]
    for a in arrays[1:]:
        if a.ndim != ref.ndim or any(
            a.shape[d] != ref.shape[d] for d in range(ref.ndim) if d != axis % ref.ndim
        ):
            raise ShapeMismatchError(kind, ref.shape, a.shape)


def _concat_forward(arrays, attrs):
    return np.concatenate(arrays, axis=attrs.get("axis", 0)), None


def _concat_vjp(g, arrays, out, saved, attrs):
    axis = attrs.get("axis", 0)
    bounds = np.cumsum([a.shape[axis] for a in arrays])[:-1]
    return np.split(g, bounds, axis=axis)


def _getitem_forward(arrays, attrs):
    return np.array(arrays[0][attrs["index"]]), None


def _getitem_vjp(g, arrays, out, saved, attrs):
    full = np.zeros_like(arrays[0])
    full[attrs["index"]] = g
    return [full]


def _take_check(kind, arrays, attrs):
    idx = np.asarray(attrs["indices"])
    axis = attrs.get("axis", 0)
    if idx.size and (idx.min() < 0 or idx.max() >= arrays[0].shape[axis]):
        raise ShapeMismatchError(kind, arrays[0].shape, idx.shape)


def _take_forward(arrays, attrs):
    return np.take(arrays[0], attrs["indices"], axis=attrs.get("axis", 0)), None


def _take_vjp(g, arrays, out, saved, attrs):
    axis = attrs.get("axis", 0)
    full = np.zeros_like(arrays[0])
    moved = np.moveaxis(full, axis, 0)
    np.add.at(moved, np.asarray(attrs["indices"]), np.moveaxis(g, axis, 0))
    return [full]


def _sum_vjp(g, arrays, out, saved, attrs):
    return [np.array(_expand_reduced(g, arrays[0].shape, attrs.get("axis"), attrs.get("keepdims", False)))]


def _mean_forward(arrays, attrs):
    return np.mean(arrays[0], axis=attrs.get("axis"), keepdims=attrs.get("keepdims", False)), None


def _mean_vjp(g, arrays, out, saved, attrs):
    x = arrays[0]
    count = x.size // max(np.size(out), 1)
    return [np.array(_expand_reduced(g, x.shape, attrs.get("axis"), attrs.get("keepdims", False))) / count]


def _broadcast_check(kind, arrays, attrs):
    try:
        np.broadcast_shapes(arrays[0].shape, tuple(attrs["shape"]))
    except ValueError:
        raise ShapeMismatchError(kind, arrays[0].shape, tuple(attrs["shape"]))
    if np.broadcast_shapes(arrays[0].shape, tuple(attrs["shape"])) != tuple(attrs["shape"]):
        raise ShapeMismatchError(kind, arrays[0].shape, tuple(attrs["shape"]))


def _broadcast_vjp(g, arrays, out, saved, attrs):
    shape = arrays[0].shape
    g = _reduce_to(g, g.shape[g.ndim - len(shape) :]) if g.ndim > len(shape) else g
    axes = tuple(d for d, n in enumerate(shape) if n == 1 and g.shape[d] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return [g.reshape(shape)]


def _broadcast_forward(arrays, attrs):
    return np.broadcast_to(arrays[0], tuple(attrs["shape"])).copy(), None


def _reshape_check(kind, arrays, attrs):
    if int(np.prod(attrs["shape"])) != arrays[0].size:
        raise ShapeMismatchError(kind, arrays[0].shape, tuple(attrs["shape"]))


def _reshape_forward(arrays, attrs):
    return arrays[0].reshape(tuple(attrs["shape"])), None


def _conv_check(kind, arrays, attrs):
    x, w, b = arrays
    if x.ndim < 2 or w.ndim != 2 or w.shape[0] != x.shape[-1] or b.shape != (x.shape[-1],):
        raise ShapeMismatchError(kind, x.shape, w.shape, b.shape)


def _conv_forward(arrays, attrs):
    x, w, b = arrays
    width = w.shape[1]
    length = x.shape[-2]
    pad = [(0, 0)] * x.ndim
    pad[-2] = (width - 1, 0)
    xpad = np.pad(x, pad)
    out = np.broadcast_to(b, x.shape).copy()
    for j in range(width):
        out += xpad[..., j : j + length, :] * w[:, j]
    return out, xpad


def _conv_vjp(g, arrays, out, xpad, attrs):
    x, w, b = arrays
    width = w.shape[1]
    length = x.shape[-2]
    gxpad = np.zeros_like(xpad)
    gw = np.zeros_like(w)
    lead = tuple(range(x.ndim - 1))
    for j in range(width):
        gxpad[..., j : j + length, :] += g * w[:, j]
        gw[:, j] = (g * xpad[..., j : j + length, :]).sum(axis=lead)
    return [gxpad[..., width - 1 :, :], gw, g.sum(axis=lead)]


def _logsumexp_check(kind, arrays, attrs):
    mask = attrs.get("mask")
    if mask is not None:
        try:
            mask = np.broadcast_to(mask, arrays[0].shape)
        except ValueError:
            raise ShapeMismatchError(kind, arrays[0].shape, np.shape(mask))
        if not np.all(np.any(mask, axis=-1)):
            raise ValueError(f"'{kind}' mask selects no entry in at least one row.")


def _logsumexp_forward(arrays, attrs):
    x = arrays[0]
    mask = attrs.get("mask")
    if mask is None:
        mask = np.ones(x.shape, dtype=bool)
    mask = np.broadcast_to(mask, x.shape)
    shifted = np.where(mask, x, -np.inf)
    top = shifted.max(axis=-1, keepdims=True)
    weights = np.where(mask, np.exp(x - top), 0.0)
    total = weights.sum(axis=-1, keepdims=True)
    out = (top + np.log(total))[..., 0]
    return out, weights / total


def _logsumexp_vjp(g, arrays, out, softmax, attrs):
    return [g[..., None] * softmax]


_OPS = {
    "add": (_binary_check, lambda a, at: (a[0] + a[1], None), _add_vjp),
    "sub": (_binary_check, lambda a, at: (a[0] - a[1], None), _sub_vjp),
    "mul": (_binary_check, lambda a, at: (a[0] * a[1], None), _mul_vjp),
    "div": (_div_check, lambda a, at: (a[0] / a[1], None), _div_vjp),
    "neg": (_no_check, lambda a, at: (-a[0], None), lambda g, a, o, s, at: [-g]),
    "exp": (_no_check, lambda a, at: (np.exp(a[0]), None), lambda g, a, o, s, at: [g * o]),
    "expm1": (_no_check, lambda a, at: (np.expm1(a[0]), None), lambda g, a, o, s, at: [g * (o + 1.0)]),
    "softplus": (_no_check, lambda a, at: (np.logaddexp(0.0, a[0]), None), _softplus_vjp),
    "silu": (_no_check, _silu_forward, _silu_vjp),
    "sqrt": (_no_check, lambda a, at: (np.sqrt(np.maximum(a[0], 0.0)), None), _sqrt_vjp),
    "square": (_no_check, lambda a, at: (a[0] * a[0], None), lambda g, a, o, s, at: [2.0 * g * a[0]]),
    "matmul": (_matmul_check, lambda a, at: (a[0] @ a[1], None), _matmul_vjp),
    "layernorm": (_layernorm_check, _layernorm_forward, _layernorm_vjp),
    "concat": (_concat_check, _concat_forward, _concat_vjp),
    "slice": (_no_check, _getitem_forward, _getitem_vjp),
    "take": (_take_check, _take_forward, _take_vjp),
    "sum": (
        _no_check,
        lambda a, at: (np.sum(a[0], axis=at.get("axis"), keepdims=at.get("keepdims", False)), None),
        _sum_vjp,
    ),
    "mean": (_no_check, _mean_forward, _mean_vjp),
    "broadcast": (_broadcast_check, _broadcast_forward, _broadcast_vjp),
    "reshape": (_reshape_check, _reshape_forward, lambda g, a, o, s, at: [g.reshape(a[0].shape)]),
    "causal_conv1d": (_conv_check, _conv_forward, _conv_vjp),
    "logsumexp": (_logsumexp_check, _logsumexp_forward, _logsumexp_vjp),
}

PRIMITIVE_KINDS = tuple(_OPS)


def primitive_forward(kind, *inputs, **attrs):
    """Evaluate a primitive and record it on the active tape.

    Parameters
    ----------
    kind: str
        One of :data:`PRIMITIVE_KINDS`.
    inputs: Tensor or array-like
        Operands. Arrays and numbers are wrapped as constant tensors.
    attrs:
        Static attributes of the primitive (``axis``, ``shape``, ``index``, ``indices``, ``mask``, ``keepdims``).

    Returns
    -------
    Tensor:
        The result. It requires a gradient when a tape is active and any operand requires one.
    """
    if kind not in _OPS:
        raise ValueError(unknown_kind_emsg.format(kind=kind, known=", ".join(PRIMITIVE_KINDS)))
    check, forward, vjp = _OPS[kind]
    tensors = [as_tensor(x) for x in inputs]
    arrays = [t.data for t in tensors]
    for position, a in enumerate(arrays):
        if not np.all(np.isfinite(a)):
            raise NonFiniteError(kind, where=f"input {position}")
    check(kind, arrays, attrs)
    out, saved = forward(arrays, attrs)
    out = np.asarray(out, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError(kind, where="output")
    result = Tensor(out)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in tensors):
        result.requires_grad = True
        record = _Record(kind, tensors, result, saved, attrs)
        result._record = record
        tape.records.append(record)
    return result


def backward(tape, loss):
    """Accumulate d(loss)/d(leaf) into the ``grad`` of every leaf tensor that requires a gradient.

    Gradients accumulate across calls until the caller zeroes them (see :func:`zero_grad`).

    Parameters
    ----------
    tape: Tape
        The tape the loss was recorded on.
    loss: Tensor
        Scalar tensor (a single element).
    """
    if loss.size != 1:
        raise ValueError(non_scalar_loss_emsg.format(shape=loss.shape))
    if loss.is_leaf:
        if loss.requires_grad:
            _accumulate(loss, np.ones_like(loss.data))
            return
        raise ValueError(loss_not_on_tape_emsg)
    try:
        stop = next(i for i, r in enumerate(tape.records) if r is loss._record)
    except StopIteration:
        raise ValueError(loss_not_on_tape_emsg)

    adjoints = {id(loss): np.ones_like(loss.data)}
    for record in reversed(tape.records[: stop + 1]):
        g = adjoints.pop(id(record.output), None)
        if g is None:
            continue
        _, _, vjp = _OPS[record.kind]
        grads = vjp(g, [t.data for t in record.inputs], record.output.data, record.saved, record.attrs)
        for tensor, grad in zip(record.inputs, grads):
            if grad is None or not tensor.requires_grad:
                continue
            grad = np.asarray(grad, dtype=np.float64).reshape(tensor.shape)
            if tensor.is_leaf:
                _accumulate(tensor, grad)
            elif id(tensor) in adjoints:
                adjoints[id(tensor)] = adjoints[id(tensor)] + grad
            else:
                adjoints[id(tensor)] = grad


def _accumulate(tensor, grad):
    if tensor.grad is None:
        tensor.grad = grad.copy()
    else:
        tensor.grad = tensor.grad + grad


def zero_grad(params):
    for _, p in _named(params):
        p.grad = None


# convenience wrappers


def add(a, b):
    return primitive_forward("add", a, b)


def sub(a, b):
    return primitive_forward("sub", a, b)


def mul(a, b):
    return primitive_forward("mul", a, b)


def div(a, b):
    return primitive_forward("div", a, b)


def neg(x):
    return primitive_forward("neg", x)


def exp(x):
    return primitive_forward("exp", x)


def expm1(x):
    return primitive_forward("expm1", x)


def softplus(x):
    return primitive_forward("softplus", x)


def silu(x):
    return primitive_forward("silu", x)


def sqrt(x):
    return primitive_forward("sqrt", x)


def square(x):
    return primitive_forward("square", x)


def matmul(a, b):
    return primitive_forward("matmul", a, b)


def layer_norm(x, gain, bias):
    return primitive_forward("layernorm", x, gain, bias)


def concat(tensors, axis=0):
    return primitive_forward("concat", *tensors, axis=axis)


def getitem(x, index):
    return primitive_forward("slice", x, index=index)


def take(x, indices, axis=0):
    return primitive_forward("take", x, indices=np.asarray(indices, dtype=np.intp), axis=axis)


def sum_(x, axis=None, keepdims=False):
    return primitive_forward("sum", x, axis=axis, keepdims=keepdims)


def mean(x, axis=None, keepdims=False):
    return primitive_forward("mean", x, axis=axis, keepdims=keepdims)


def broadcast_to(x, shape):
    return primitive_forward("broadcast", x, shape=tuple(shape))


def reshape(x, shape):
    return primitive_forward("reshape", x, shape=tuple(shape))


def causal_conv1d(x, weight, bias):
    """Depthwise causal convolution along axis -2 of ``x`` [..., L, C] with ``weight`` [C, width]."""
    return primitive_forward("causal_conv1d", x, weight, bias)


def logsumexp(x, mask=None):
    """Log-sum-exp over the last axis, restricted to the entries where ``mask`` is True."""
    if mask is None:
        return primitive_forward("logsumexp", x)
    return primitive_forward("logsumexp", x, mask=np.asarray(mask, dtype=bool))


# optimizer


def _named(params):
    if isinstance(params, dict):
        return list(params.items())
    return [(p.name or f"param{i}", p) for i, p in enumerate(params)]


class OptimState:
    """Moment accumulators of the decoupled-weight-decay Adam optimizer.

    Parameters
    ----------
    params: dict or list of Tensor
        Parameters the state belongs to; moment arrays take their shapes.
    lr: float
        Learning rate. Default 3e-4.
    weight_decay: float
        Decoupled weight-decay coefficient. Default 1e-6.
    betas: tuple of float
        Decay rates of the first and second moments. Default (0.9, 0.999).
    eps: float
        Denominator offset. Default 1e-8.
    """

    def __init__(self, params, lr=3e-4, weight_decay=1e-6, betas=(0.9, 0.999), eps=1e-8):
        named = _named(params)
        self.names = [name for name, _ in named]
        self.m = [np.zeros_like(p.data) for _, p in named]
        self.v = [np.zeros_like(p.data) for _, p in named]
        self.step = 0
        self.lr = float(lr)
        self.weight_decay = float(weight_decay)
        self.betas = (float(betas[0]), float(betas[1]))
        self.eps = float(eps)


def adamw_step(params, state):
    """Apply one AdamW update in place. Gradients are left untouched.

    Parameters
    ----------
    params: dict or list of Tensor
        The parameters, in the order the state was created with.
    state: OptimState
        Moments and hyper-parameters; its step counter is incremented.
    """
    named = _named(params)
    if len(named) != len(state.m):
        raise ValueError(f"Optimizer state holds {len(state.m)} parameters, got {len(named)}.")
    for name, p in named:
        if p.grad is None:
            raise ValueError(missing_grad_emsg.format(name=name))
    state.step += 1
    beta1, beta2 = state.betas
    correction1 = 1.0 - beta1**state.step
    correction2 = 1.0 - beta2**state.step
    for i, (_, p) in enumerate(named):
        g = p.grad
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g
        update = (state.m[i] / correction1) / (np.sqrt(state.v[i] / correction2) + state.eps)
        p.data = p.data * (1.0 - state.lr * state.weight_decay) - state.lr * update


# End of file
