#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Selective state-space blocks whose discretization step is scaled per position.

The continuous system is ``h' = A h + B u, y = C h`` with a diagonal, strictly negative ``A``. ``B``, ``C`` and the
step ``Δ`` are functions of the input, and ``Δ`` is multiplied by an externally supplied step-scale factor ``r``
before the zero-order-hold discretization. Scaling ``r`` by one half simulates the same continuous dynamics at half
the step.

All functions accept an optional leading batch dimension: sequences are ``[..., L, channels]``.
"""

import numpy as np

from dispo import numgrad as ng
from dispo.errors import ShapeMismatchError
from dispo.numgrad import Tensor

non_positive_scale_emsg = "Step-scale factors must be strictly positive, got minimum {value}."
unit_prefix_emsg = "The first 1 + T_o = {n} step-scale factors must equal 1 (fixed observation rate)."
scale_length_emsg = "Step-scale sequence has length {found}, the input has {expected} positions."
unstable_a_emsg = "The diagonal state matrix must be strictly negative."
non_positive_delta_emsg = "Discretization steps must be strictly positive, got minimum {value}."


class StepScaleSequence:
    """Per-position multipliers of the discretization step.

    Layout is ``[1 (diffusion-step slot), 1 repeated T_o times (observations), T_a action factors]``.

    Parameters
    ----------
    values: array-like
        Factors, shape ``[L]`` or ``[batch, L]``.
    obs_horizon: int
        Number of observation slots T_o; the first ``1 + T_o`` factors must be 1.
    """

    def __init__(self, values, obs_horizon):
        values = np.array(values, dtype=np.float64)
        if values.ndim not in (1, 2) or values.shape[-1] < 1 + obs_horizon:
            raise ValueError(f"Step-scale values must be [L] or [batch, L] with L > T_o, got {values.shape}.")
        if np.min(values) <= 0.0:
            raise ValueError(non_positive_scale_emsg.format(value=np.min(values)))
        if not np.all(values[..., : 1 + obs_horizon] == 1.0):
            raise ValueError(unit_prefix_emsg.format(n=1 + obs_horizon))
        self.values = values
        self.obs_horizon = int(obs_horizon)

    def __len__(self):
        return self.values.shape[-1]

    def __eq__(self, other):
        if not isinstance(other, StepScaleSequence):
            return NotImplemented
        return self.obs_horizon == other.obs_horizon and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"StepScaleSequence({self.values.tolist()}, obs_horizon={self.obs_horizon})"

    @property
    def action_factors(self):
        return self.values[..., 1 + self.obs_horizon :]

    @property
    def batched(self):
        return self.values.ndim == 2

    @classmethod
    def from_action_factors(cls, obs_horizon, factors):
        """Build ``r`` from the ``T_a`` action factors (``r^act``)."""
        factors = np.asarray(factors, dtype=np.float64)
        prefix = np.ones(factors.shape[:-1] + (1 + obs_horizon,))
        return cls(np.concatenate([prefix, factors], axis=-1), obs_horizon)

    @classmethod
    def constant(cls, obs_horizon, action_horizon, r_act):
        """The first T_o action slots keep factor 1, the remaining ``T_a - T_o`` use ``r_act``."""
        tail = np.full(action_horizon - obs_horizon, float(r_act))
        return cls.from_action_factors(obs_horizon, np.concatenate([np.ones(obs_horizon), tail]))

    @classmethod
    def ramp(cls, obs_horizon, action_horizon, start, end):
        """Like :meth:`constant`, with the tail moving linearly from ``start`` to ``end`` (e.g. 0.7 to 0.5)."""
        tail = np.linspace(float(start), float(end), action_horizon - obs_horizon)
        return cls.from_action_factors(obs_horizon, np.concatenate([np.ones(obs_horizon), tail]))

    @classmethod
    def ones(cls, obs_horizon, action_horizon):
        return cls.constant(obs_horizon, action_horizon, 1.0)

    @classmethod
    def stack(cls, sequences):
        horizons = {s.obs_horizon for s in sequences}
        if len(horizons) != 1:
            raise ValueError("Cannot stack step-scale sequences with different observation horizons.")
        return cls(np.stack([s.values for s in sequences]), horizons.pop())


def _scale_values(r):
    if isinstance(r, StepScaleSequence):
        return r.values
    values = np.asarray(r, dtype=np.float64)
    if np.min(values) <= 0.0:
        raise ValueError(non_positive_scale_emsg.format(value=np.min(values)))
    return values


def _uniform(rng, bound, shape):
    return rng.uniform(-bound, bound, size=shape)


class SsmCoreParams:
    """Parameters of the selective SSM: ``A = -exp(A_log)``, ``f_B``, ``f_C``, ``f_Δ`` and the ``Δ`` bias.

    Weights are stored input-major (``[in, out]``), so a linear map is ``x @ W``.
    """

    def __init__(self, A_log, W_B, W_C, W_dt, dt_bias):
        self.A_log = A_log
        self.W_B = W_B
        self.W_C = W_C
        self.W_dt = W_dt
        self.dt_bias = dt_bias

    @classmethod
    def init(cls, d_inner, n_state, rng, dt_min=1e-3, dt_max=1e-1):
        """Stable initialization.

        ``-A`` spans ``[1, N]`` log-uniformly in every channel, and the ``Δ`` bias puts ``softplus`` of it in
        ``[dt_min, dt_max]`` uniformly in log space.
        """
        a = np.tile(np.log(np.geomspace(1.0, float(n_state), n_state)), (d_inner, 1))
        dt = np.exp(rng.uniform(np.log(dt_min), np.log(dt_max), size=d_inner))
        # inverse of softplus
        dt_bias = dt + np.log(-np.expm1(-dt))
        bound = d_inner**-0.5
        return cls(
            Tensor(a, requires_grad=True),
            Tensor(_uniform(rng, bound, (d_inner, n_state)), requires_grad=True),
            Tensor(_uniform(rng, bound, (d_inner, n_state)), requires_grad=True),
            Tensor(_uniform(rng, bound, (d_inner, d_inner)), requires_grad=True),
            Tensor(dt_bias, requires_grad=True),
        )

    def A(self):
        return ng.neg(ng.exp(self.A_log))

    def parameters(self, prefix=""):
        return {
            f"{prefix}A_log": self.A_log,
            f"{prefix}W_B": self.W_B,
            f"{prefix}W_C": self.W_C,
            f"{prefix}W_dt": self.W_dt,
            f"{prefix}dt_bias": self.dt_bias,
        }


class MambaRBlockParams:
    """Parameters of one step-scalable block.

    Pre-norm gain/bias ``[D]``, ``in_proj`` ``[D, 2 D_inner]`` (content and gate), depthwise causal convolution
    ``[D_inner, width]`` with bias, the SSM core, and ``out_proj`` ``[D_inner, D]``.
    """

    def __init__(self, norm_gain, norm_bias, W_in, conv_w, conv_b, core, W_out):
        self.norm_gain = norm_gain
        self.norm_bias = norm_bias
        self.W_in = W_in
        self.conv_w = conv_w
        self.conv_b = conv_b
        self.core = core
        self.W_out = W_out

    @property
    def d_model(self):
        return self.W_in.shape[0]

    @property
    def d_inner(self):
        return self.W_out.shape[0]

    @classmethod
    def init(cls, d_model, n_state, rng, expand=2, conv_width=4):
        d_inner = expand * d_model
        conv_bound = conv_width**-0.5
        return cls(
            Tensor(np.ones(d_model), requires_grad=True),
            Tensor(np.zeros(d_model), requires_grad=True),
            Tensor(_uniform(rng, d_model**-0.5, (d_model, 2 * d_inner)), requires_grad=True),
            Tensor(_uniform(rng, conv_bound, (d_inner, conv_width)), requires_grad=True),
            Tensor(_uniform(rng, conv_bound, (d_inner,)), requires_grad=True),
            SsmCoreParams.init(d_inner, n_state, rng),
            Tensor(_uniform(rng, d_inner**-0.5, (d_inner, d_model)), requires_grad=True),
        )

    def parameters(self, prefix=""):
        params = {
            f"{prefix}norm_gain": self.norm_gain,
            f"{prefix}norm_bias": self.norm_bias,
            f"{prefix}W_in": self.W_in,
            f"{prefix}conv_w": self.conv_w,
            f"{prefix}conv_b": self.conv_b,
        }
        params.update(self.core.parameters(f"{prefix}core."))
        params[f"{prefix}W_out"] = self.W_out
        return params


def zoh_discretize(A_diag, B, delta):
    r"""Zero-order-hold discretization of a diagonal system with input-dependent ``B`` and ``Δ``.

    .. math::

        \bar{A} = \exp(\Delta A), \qquad \bar{B} = (\Delta A)^{-1}(\exp(\Delta A) - 1)\,\Delta B

    Because ``A`` is diagonal both are elementwise over (position, channel, state).

    Parameters
    ----------
    A_diag: Tensor
        ``[D_inner, N]``, strictly negative.
    B: Tensor
        ``[..., L, N]``.
    delta: Tensor
        ``[..., L, D_inner]``, strictly positive.

    Returns
    -------
    (Tensor, Tensor):
        ``A_bar`` and ``B_bar``, both ``[..., L, D_inner, N]``.
    """
    A_diag, B, delta = ng.as_tensor(A_diag), ng.as_tensor(B), ng.as_tensor(delta)
    if not np.all(A_diag.data < 0.0):
        raise ValueError(unstable_a_emsg)
    if not np.all(delta.data > 0.0):
        raise ValueError(non_positive_delta_emsg.format(value=np.min(delta.data)))
    d_inner, n_state = A_diag.shape
    lead = delta.shape[:-1]
    if B.shape[:-1] != lead or B.shape[-1] != n_state or delta.shape[-1] != d_inner:
        raise ShapeMismatchError("zoh_discretize", A_diag.shape, B.shape, delta.shape)
    full = lead + (d_inner, n_state)
    dA = ng.mul(ng.broadcast_to(ng.reshape(delta, lead + (d_inner, 1)), full), A_diag)
    A_bar = ng.exp(dA)
    # (ΔA)^-1 (e^ΔA - 1) ΔB == (e^ΔA - 1) / A * B
    B_full = ng.broadcast_to(ng.reshape(B, lead + (1, n_state)), full)
    B_bar = ng.mul(ng.div(ng.expm1(dA), A_diag), B_full)
    return A_bar, B_bar


def compute_delta(u, r, params):
    """Step sizes ``Δ[l, d] = r[l] * softplus(u[l] @ W_dt + Δ_bias)[d]``.

    Parameters
    ----------
    u: Tensor
        ``[..., L, D_inner]``.
    r: StepScaleSequence or array-like
        ``[L]`` or ``[batch, L]``; every row scales all channels of its position uniformly.
    params: SsmCoreParams

    Returns
    -------
    Tensor:
        ``[..., L, D_inner]``.
    """
    u = ng.as_tensor(u)
    values = _scale_values(r)
    if values.shape[-1] != u.shape[-2]:
        raise ValueError(scale_length_emsg.format(found=values.shape[-1], expected=u.shape[-2]))
    raw = ng.softplus(ng.add(ng.matmul(u, params.W_dt), params.dt_bias))
    scale = ng.broadcast_to(Tensor(values[..., None]), u.shape)
    return ng.mul(scale, raw)


def selective_scan(A_bar, B_bar, C, u):
    """Run ``h_l = A_bar_l * h_{l-1} + B_bar_l * u_l`` from ``h_0 = 0`` and read out ``y_l = <C_l, h_l>``.

    Parameters
    ----------
    A_bar, B_bar: Tensor
        ``[..., L, D_inner, N]``.
    C: Tensor
        ``[..., L, N]``.
    u: Tensor
        ``[..., L, D_inner]``.

    Returns
    -------
    Tensor:
        ``y`` of shape ``[..., L, D_inner]``; position ``l`` depends only on positions ``<= l``.
    """
    A_bar, B_bar, C, u = (ng.as_tensor(x) for x in (A_bar, B_bar, C, u))
    lead = u.shape[:-2]
    length, d_inner = u.shape[-2:]
    n_state = A_bar.shape[-1]
    full = lead + (length, d_inner, n_state)
    if A_bar.shape != full or B_bar.shape != full or C.shape != lead + (length, n_state):
        raise ShapeMismatchError("selective_scan", A_bar.shape, B_bar.shape, C.shape, u.shape)

    drive = ng.mul(B_bar, ng.broadcast_to(ng.reshape(u, lead + (length, d_inner, 1)), full))
    states = []
    h = None
    for pos in range(length):
        index = (Ellipsis, slice(pos, pos + 1), slice(None), slice(None))
        b_l = ng.getitem(drive, index)
        h = b_l if h is None else ng.add(ng.mul(ng.getitem(A_bar, index), h), b_l)
        states.append(h)
    H = ng.concat(states, axis=-3)
    C_full = ng.broadcast_to(ng.reshape(C, lead + (length, 1, n_state)), full)
    return ng.sum_(ng.mul(C_full, H), axis=-1)


def mamba_r_forward(u_in, r, params):
    """One step-scalable block with a residual connection.

    pre-norm, ``in_proj`` split into content and gate, causal convolution and SiLU on the content,
    ``B``/``C`` from the content, :func:`compute_delta`, :func:`zoh_discretize`, :func:`selective_scan`,
    SiLU-gated output, ``out_proj``, then ``u_in`` is added back.

    Parameters
    ----------
    u_in: Tensor
        ``[..., L, D]``.
    r: StepScaleSequence or array-like
        ``[L]`` or ``[batch, L]``.
    params: MambaRBlockParams

    Returns
    -------
    Tensor:
        ``[..., L, D]``.
    """
    u_in = ng.as_tensor(u_in)
    if u_in.shape[-1] != params.d_model:
        raise ShapeMismatchError("mamba_r_forward", u_in.shape, params.W_in.shape)
    d_inner = params.d_inner
    x = ng.layer_norm(u_in, params.norm_gain, params.norm_bias)
    xz = ng.matmul(x, params.W_in)
    content = ng.getitem(xz, (Ellipsis, slice(0, d_inner)))
    gate = ng.getitem(xz, (Ellipsis, slice(d_inner, 2 * d_inner)))
    content = ng.silu(ng.causal_conv1d(content, params.conv_w, params.conv_b))

    core = params.core
    B = ng.matmul(content, core.W_B)
    C = ng.matmul(content, core.W_C)
    delta = compute_delta(content, r, core)
    A_bar, B_bar = zoh_discretize(core.A(), B, delta)
    y = selective_scan(A_bar, B_bar, C, content)
    y = ng.mul(y, ng.silu(gate))
    return ng.add(u_in, ng.matmul(y, params.W_out))


# End of file
