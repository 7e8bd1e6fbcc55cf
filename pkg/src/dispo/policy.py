#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""The noise-prediction network, its training objective, and the sampler.

The network reads the sequence ``[diffusion step, T_o observations, T_a noisy actions]`` (length
``L = 1 + T_o + T_a``), runs it through a stack of step-scalable blocks with long skip connections, and predicts
the injected noise from the last ``T_a`` rows.
"""

import logging
import math
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np
from tqdm import tqdm

from dispo import numgrad as ng
from dispo.data.augment import AugmentConfig, make_training_batch
from dispo.errors import NonFiniteError, NumericalError, ShapeMismatchError
from dispo.numgrad import Tensor
from dispo.ssm import MambaRBlockParams, StepScaleSequence, mamba_r_forward

logger = logging.getLogger(__name__)

SCHEDULES = ["squaredcos_cap_v2", "linear"]

single_variant_wmsg = (
    "No source window in this batch has two or more rate variants. The rank-contrast loss contributes 0."
)
step_range_emsg = "Diffusion step k={k} is outside {low}..{K}."
non_positive_r_emsg = "Step-scale factors must be strictly positive, got {value}."


@dataclass
class DiSPoConfig:
    """Architecture and objective settings.

    Attributes
    ----------
    d_model: int
        Width ``D`` of the token rows.
    n_state: int
        SSM state size ``N``.
    n_block: int
        Number of blocks; even, the mid-stack feature is the input of block ``n_block/2 + 1``.
    obs_horizon, action_horizon: int
        ``T_o <= T_a``.
    diffusion_steps: int
        ``K``.
    d_obs, d_act: int
        Observation and action feature sizes.
    schedule: str
        One of ``squaredcos_cap_v2`` or ``linear``.
    tau_rnc: float
        Temperature of the rank-contrast loss.
    mse_weight, rnc_weight: float
        Weights of the two loss terms.
    expand: int
        ``D_inner = expand * D``.
    conv_width: int
        Width of the causal convolution in every block.
    action_index: int or None
        0-based slot of the sampled window that is executed. None means ``T_o`` (``T_a - 1`` when ``T_o = T_a``).
    clip_sample: bool
        Clip the sampled window to [-1, 1].
    """

    d_model: int = 64
    n_state: int = 16
    n_block: int = 4
    obs_horizon: int = 2
    action_horizon: int = 5
    diffusion_steps: int = 25
    d_obs: int = 3
    d_act: int = 2
    schedule: str = "squaredcos_cap_v2"
    tau_rnc: float = 2.0
    mse_weight: float = 1.0
    rnc_weight: float = 1.0
    expand: int = 2
    conv_width: int = 4
    action_index: int = None
    clip_sample: bool = True

    def __post_init__(self):
        if self.n_block < 2 or self.n_block % 2:
            raise ValueError(f"n_block must be a positive even number, got {self.n_block}.")
        if not 1 <= self.obs_horizon <= self.action_horizon:
            raise ValueError(
                f"Need 1 <= T_o <= T_a, got T_o={self.obs_horizon} and T_a={self.action_horizon}."
            )
        if self.d_model % 2:
            raise ValueError(f"d_model must be even for the sinusoidal step encoding, got {self.d_model}.")
        if self.diffusion_steps < 1:
            raise ValueError(f"diffusion_steps must be at least 1, got {self.diffusion_steps}.")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"Unknown noise schedule '{self.schedule}'. Choose from {SCHEDULES}.")
        if self.tau_rnc <= 0:
            raise ValueError(f"tau_rnc must be positive, got {self.tau_rnc}.")
        if self.action_index is None:
            self.action_index = min(self.obs_horizon, self.action_horizon - 1)
        if not 0 <= self.action_index < self.action_horizon:
            raise ValueError(f"action_index must lie in 0..{self.action_horizon - 1}, got {self.action_index}.")

    @property
    def seq_len(self):
        return 1 + self.obs_horizon + self.action_horizon

    @property
    def d_inner(self):
        return self.expand * self.d_model

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"Unknown model settings: {unknown}.")
        return cls(**values)

    def to_dict(self):
        return asdict(self)


def _cosine_betas(n_steps, max_beta=0.999):
    def alpha_bar(t):
        return math.cos((t + 0.008) / 1.008 * math.pi / 2) ** 2

    return np.array(
        [min(1.0 - alpha_bar((i + 1) / n_steps) / alpha_bar(i / n_steps), max_beta) for i in range(n_steps)]
    )


def _linear_betas(n_steps):
    scale = 1000.0 / n_steps
    return np.minimum(np.linspace(scale * 1e-4, scale * 0.02, n_steps), 0.999)


class NoiseSchedule:
    """Forward-noising schedule indexed by ``k = 0..K``; index 0 is the clean sample (``alpha_bar[0] = 1``).

    Parameters
    ----------
    n_steps: int
        Number of diffusion steps ``K``.
    kind: str
        ``squaredcos_cap_v2`` (default) or ``linear``.
    """

    def __init__(self, n_steps, kind="squaredcos_cap_v2"):
        if kind == "squaredcos_cap_v2":
            betas = _cosine_betas(n_steps)
        elif kind == "linear":
            betas = _linear_betas(n_steps)
        else:
            raise ValueError(f"Unknown noise schedule '{kind}'. Choose from {SCHEDULES}.")
        self.kind = kind
        self.n_steps = int(n_steps)
        self.betas = np.concatenate([[0.0], betas])
        self.alphas = 1.0 - self.betas
        self.alpha_bars = np.cumprod(self.alphas)
        previous = np.concatenate([[1.0], self.alpha_bars[:-1]])
        variance = np.zeros(n_steps + 1)
        variance[1:] = self.betas[1:] * (1.0 - previous[1:]) / (1.0 - self.alpha_bars[1:])
        self.posterior_variance = variance

    def coefficients(self, k):
        """``(alpha, gamma, sigma)`` of the reverse step ``x <- alpha * (x - gamma * eps) + sigma * z``."""
        self._check(k)
        alpha = 1.0 / math.sqrt(self.alphas[k])
        gamma = self.betas[k] / math.sqrt(1.0 - self.alpha_bars[k])
        sigma = math.sqrt(self.posterior_variance[k])
        return alpha, gamma, sigma

    def _check(self, k):
        if not 0 <= int(k) <= self.n_steps:
            raise ValueError(step_range_emsg.format(k=k, low=0, K=self.n_steps))

    def to_dict(self):
        return {"kind": self.kind, "n_steps": self.n_steps, "alpha_bars": self.alpha_bars.tolist()}


def timestep_encoding(k, dim):
    """Sinusoidal encoding of the (1-based) diffusion step; ``k`` may be an int or an integer array."""
    half = dim // 2
    freqs = np.exp(-math.log(10000.0) * np.arange(half) / half)
    args = np.asarray(k, dtype=np.float64)[..., None] * freqs
    return np.concatenate([np.sin(args), np.cos(args)], axis=-1)


def skip_pairs(n_block):
    """Long skips as 1-based ``(source, target)``: the output of ``source`` is added to the input of ``target``."""
    return [(i, n_block - i + 1) for i in range(1, n_block // 2 + 1)]


def head_rows(config):
    """Slice of the rows the output head reads: the last ``T_a``."""
    return slice(config.seq_len - config.action_horizon, config.seq_len)


def _param(rng, bound, shape):
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


class DiSPoModel:
    """Parameters of the noise predictor together with its schedule and the frozen normalizer.

    Linear maps are stored input-major, so ``obs_embed.weight`` has shape ``[d_obs, D]``.

    Parameters
    ----------
    config: DiSPoConfig
    rng: numpy.random.Generator
        Initialization stream. Default ``default_rng(0)``.
    """

    def __init__(self, config, rng=None):
        if rng is None:
            rng = np.random.default_rng(0)
        self.config = config
        self.schedule = NoiseSchedule(config.diffusion_steps, config.schedule)
        self.normalizer = None
        D = config.d_model
        self.lambda_k = Tensor(rng.normal(0.0, 0.02, D), requires_grad=True)
        self.obs_weight = _param(rng, config.d_obs**-0.5, (config.d_obs, D))
        self.obs_bias = Tensor(np.zeros(D), requires_grad=True)
        self.lambda_obs = Tensor(rng.normal(0.0, 0.02, D), requires_grad=True)
        self.act_weight = _param(rng, config.d_act**-0.5, (config.d_act, D))
        self.act_bias = Tensor(np.zeros(D), requires_grad=True)
        self.lambda_act = Tensor(rng.normal(0.0, 0.02, D), requires_grad=True)
        self.blocks = [
            MambaRBlockParams.init(D, config.n_state, rng, expand=config.expand, conv_width=config.conv_width)
            for _ in range(config.n_block)
        ]
        self.head_gain = Tensor(np.ones(D), requires_grad=True)
        self.head_bias = Tensor(np.zeros(D), requires_grad=True)
        self.head_weight = _param(rng, D**-0.5, (D, config.d_act))
        self.head_out_bias = Tensor(np.zeros(config.d_act), requires_grad=True)

    def parameters(self):
        params = {
            "time_embed.lambda": self.lambda_k,
            "obs_embed.weight": self.obs_weight,
            "obs_embed.bias": self.obs_bias,
            "obs_embed.lambda": self.lambda_obs,
            "act_embed.weight": self.act_weight,
            "act_embed.bias": self.act_bias,
            "act_embed.lambda": self.lambda_act,
        }
        for i, block in enumerate(self.blocks):
            params.update(block.parameters(f"blocks.{i}."))
        params["head.norm_gain"] = self.head_gain
        params["head.norm_bias"] = self.head_bias
        params["head.weight"] = self.head_weight
        params["head.bias"] = self.head_out_bias
        return params

    def load_parameters(self, arrays):
        """Overwrite parameter values from ``{name: array}``; names and shapes must match exactly."""
        params = self.parameters()
        missing = sorted(set(params) - set(arrays))
        extra = sorted(set(arrays) - set(params))
        if missing or extra:
            raise ValueError(f"Parameter names differ. Missing: {missing}. Unexpected: {extra}.")
        for name, tensor in params.items():
            value = np.asarray(arrays[name], dtype=np.float64)
            if value.shape != tensor.shape:
                raise ShapeMismatchError(name, tensor.shape, value.shape)
            tensor.data = value.copy()
            tensor.grad = None

    def copy(self):
        clone = DiSPoModel(self.config)
        clone.load_parameters({name: p.data for name, p in self.parameters().items()})
        clone.normalizer = self.normalizer
        return clone


class ParameterEMA:
    """Exponential moving average of the model parameters.

    Parameters
    ----------
    model: DiSPoModel
    decay: float
        Weight of the running average per update, in (0, 1).
    """

    def __init__(self, model, decay=0.999):
        if not 0.0 < decay < 1.0:
            raise ValueError(f"EMA decay must lie in (0, 1), got {decay}.")
        self.decay = float(decay)
        self.shadow = {name: p.data.copy() for name, p in model.parameters().items()}

    def update(self, model):
        for name, p in model.parameters().items():
            self.shadow[name] = self.decay * self.shadow[name] + (1.0 - self.decay) * p.data

    def averaged_model(self, model):
        clone = model.copy()
        clone.load_parameters(self.shadow)
        return clone


def _check_inputs(obs, actions, config):
    T_o, T_a = config.obs_horizon, config.action_horizon
    if obs.shape[-2:] != (T_o, config.d_obs) or actions.shape[-2:] != (T_a, config.d_act):
        raise ShapeMismatchError("encode_inputs", obs.shape, actions.shape)
    if obs.shape[:-2] != actions.shape[:-2]:
        raise ShapeMismatchError("encode_inputs", obs.shape, actions.shape)


def encode_inputs(k, obs, noisy_actions, model):
    """Build the input rows ``u^1``: ``[1 + T_o + T_a, D]`` (batched: ``[B, L, D]``).

    Row 0 is the sinusoidal encoding of ``k`` plus ``λ_k``; the next ``T_o`` rows embed the (normalized)
    observations plus ``λ_O``; the last ``T_a`` rows embed the noisy actions plus ``λ_A``.

    Parameters
    ----------
    k: int or numpy.ndarray
        Diffusion step, one per batch element or shared.
    obs: array-like or Tensor
        ``[..., T_o, d_obs]``.
    noisy_actions: array-like or Tensor
        ``[..., T_a, d_act]``.
    model: DiSPoModel
    """
    config = model.config
    obs, noisy_actions = ng.as_tensor(obs), ng.as_tensor(noisy_actions)
    _check_inputs(obs, noisy_actions, config)
    lead = noisy_actions.shape[:-2]
    pe = timestep_encoding(k, config.d_model)
    pe = np.broadcast_to(pe.reshape(pe.shape[:-1] + (1, config.d_model)), lead + (1, config.d_model))
    step_row = ng.add(Tensor(pe), model.lambda_k)
    obs_rows = ng.add(ng.add(ng.matmul(obs, model.obs_weight), model.obs_bias), model.lambda_obs)
    act_rows = ng.add(ng.add(ng.matmul(noisy_actions, model.act_weight), model.act_bias), model.lambda_act)
    return ng.concat([step_row, obs_rows, act_rows], axis=-2)


def forward_noise_pred(obs, noisy_actions, r, k, model):
    """Predict the injected noise.

    Returns
    -------
    (Tensor, Tensor):
        ``ε̂`` of shape ``[..., T_a, d_act]`` and the mid-stack rows (input of block ``n_block/2 + 1``),
        ``[..., L, D]``.
    """
    config = model.config
    ks = np.asarray(k)
    if np.any(ks < 1) or np.any(ks > config.diffusion_steps):
        raise ValueError(step_range_emsg.format(k=k, low=1, K=config.diffusion_steps))
    n_block = config.n_block
    # the middle pair is the serial connection itself
    skips = {target: source for source, target in skip_pairs(n_block) if target != source + 1}
    outputs = {}
    x = encode_inputs(k, obs, noisy_actions, model)
    mid = None
    for i, block in enumerate(model.blocks, start=1):
        if i in skips:
            x = ng.add(x, outputs[skips[i]])
        if i == n_block // 2 + 1:
            mid = x
        x = mamba_r_forward(x, r, block)
        outputs[i] = x
    rows = ng.getitem(x, (Ellipsis, head_rows(config), slice(None)))
    normed = ng.layer_norm(rows, model.head_gain, model.head_bias)
    eps_hat = ng.add(ng.matmul(normed, model.head_weight), model.head_out_bias)
    return eps_hat, mid


def ddpm_training_pair(clean_actions, k, schedule, rng):
    """Noise a clean window to step ``k``: ``A_k = sqrt(ᾱ_k) A0 + sqrt(1 - ᾱ_k) ε``.

    Returns
    -------
    (numpy.ndarray, numpy.ndarray):
        The noisy window and the noise ``ε``.
    """
    schedule._check(k)
    clean_actions = np.asarray(clean_actions, dtype=np.float64)
    eps = rng.standard_normal(clean_actions.shape)
    alpha_bar = schedule.alpha_bars[int(k)]
    return math.sqrt(alpha_bar) * clean_actions + math.sqrt(1.0 - alpha_bar) * eps, eps


def pool_action_features(mid, config):
    """Mean over the action rows of the mid-stack features: ``[..., D]``."""
    return ng.mean(ng.getitem(mid, (Ellipsis, head_rows(config), slice(None))), axis=-2)


def loss_rnc(features, labels, tau, groups=None):
    """Rank-contrast loss over a batch.

    For every anchor ``i`` and positive ``j != i`` the loss is
    ``-log(exp(-|v_i - v_j| / tau) / sum_{m in S_ij} exp(-|v_i - v_m| / tau))`` with
    ``S_ij = {m != i : d(i, m) >= d(i, j)}``, averaged over all ordered pairs.

    Parameters
    ----------
    features: Tensor
        ``[M, D]`` pooled features.
    labels: numpy.ndarray
        ``[M, F]`` flattened denormalized action windows; ``d`` is their L2 distance.
    tau: float
        Temperature.
    groups: array-like or None
        Source-window id per row. When given, at least one source must have two or more rows.

    Returns
    -------
    (Tensor, bool):
        The loss, and whether the batch was skipped for having single-variant sources only.
    """
    features = ng.as_tensor(features)
    labels = np.asarray(labels, dtype=np.float64).reshape(len(labels), -1)
    M, D = features.shape
    if labels.shape[0] != M:
        raise ShapeMismatchError("loss_rnc", features.shape, labels.shape)
    single = M < 2
    if groups is not None and not single:
        _, counts = np.unique(np.asarray(groups), return_counts=True)
        single = counts.max() < 2
    if single:
        warnings.warn(single_variant_wmsg, UserWarning)
        return Tensor(0.0), True

    label_dist = np.linalg.norm(labels[:, None, :] - labels[None, :, :], axis=-1)
    rows = ng.broadcast_to(ng.reshape(features, (1, M, D)), (M, M, D))
    anchors = ng.broadcast_to(ng.reshape(features, (M, 1, D)), (M, M, D))
    dist = ng.sqrt(ng.sum_(ng.square(ng.sub(rows, anchors)), axis=-1))
    logits = ng.mul(dist, -1.0 / tau)
    # candidates[i, j, m] = logits[i, m]
    candidates = ng.broadcast_to(ng.reshape(logits, (M, 1, M)), (M, M, M))
    not_anchor = ~np.eye(M, dtype=bool)
    mask = not_anchor[:, None, :] & (label_dist[:, None, :] >= label_dist[:, :, None])
    per_pair = ng.sub(ng.logsumexp(candidates, mask=mask), logits)
    weights = not_anchor / not_anchor.sum()
    return ng.sum_(ng.mul(per_pair, weights)), False


def train_step(batch, model, optim, rng):
    """One optimization step on a :class:`~dispo.data.augment.TrainingBatch`; returns the loss values."""
    config = model.config
    k = int(rng.integers(1, config.diffusion_steps + 1))
    noisy, eps = ddpm_training_pair(batch.actions, k, model.schedule, rng)
    params = model.parameters()
    skipped = False
    with ng.Tape() as tape:
        eps_hat, mid = forward_noise_pred(batch.obs, noisy, batch.step_scale, k, model)
        mse = ng.mean(ng.square(ng.sub(eps_hat, eps)))
        if config.rnc_weight > 0.0:
            features = pool_action_features(mid, config)
            rnc, skipped = loss_rnc(features, batch.labels, config.tau_rnc, groups=batch.groups)
        else:
            rnc = Tensor(0.0)
        total = ng.add(ng.mul(mse, config.mse_weight), ng.mul(rnc, config.rnc_weight))
    losses = {"L_MSE": mse.item(), "L_RNC": rnc.item(), "L": total.item()}
    if not all(math.isfinite(v) for v in losses.values()):
        raise NumericalError(-1, -1, losses)
    ng.zero_grad(params)
    ng.backward(tape, total)
    ng.adamw_step(params, optim)
    losses["single_variant"] = skipped
    return losses


def train_epoch(dataset, model, optim, rng, augment=None, epoch=0, progress=False, ema=None):
    """Train for one epoch of ``ceil(len(dataset) / batch_size)`` batches.

    Parameters
    ----------
    dataset: WindowDataset
    model: DiSPoModel
    optim: dispo.numgrad.OptimState
    rng: numpy.random.Generator
    augment: AugmentConfig
        Batch size and rate variants. Default ``AugmentConfig()``.
    epoch: int
        Used in diagnostics only.
    progress: bool
        Show a progress bar.
    ema: ParameterEMA
        Updated after every step when given.

    Returns
    -------
    dict:
        Epoch means of ``L_MSE``, ``L_RNC`` and ``L``, plus counts of skipped variants and single-variant
        batches.
    """
    if augment is None:
        augment = AugmentConfig()
    if len(dataset) == 0:
        raise ValueError("Cannot train on an empty dataset.")
    n_batches = math.ceil(len(dataset) / augment.batch_size)
    totals = {"L_MSE": 0.0, "L_RNC": 0.0, "L": 0.0}
    skipped_variants = 0
    single_variant_batches = 0
    losses = {}
    for b in tqdm(range(n_batches), desc=f"epoch {epoch}", disable=not progress, leave=False):
        batch = make_training_batch(dataset, augment, rng)
        skipped_variants += batch.skipped
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                losses = train_step(batch, model, optim, rng)
        except NumericalError as err:
            raise NumericalError(epoch, b, err.losses) from err
        except NonFiniteError as err:
            raise NumericalError(epoch, b, {"L": float("nan"), "op": err.kind}) from err
        single_variant_batches += int(losses.pop("single_variant"))
        if ema is not None:
            ema.update(model)
        for key in totals:
            totals[key] += losses[key]
        logger.debug("epoch %d batch %d: %s", epoch, b, losses)
    if single_variant_batches:
        warnings.warn(single_variant_wmsg, UserWarning)
    metrics = {key: value / n_batches for key, value in totals.items()}
    metrics["skipped_variants"] = skipped_variants
    metrics["single_variant_batches"] = single_variant_batches
    return metrics


def ddpm_sample(obs, r, model, rng, return_trajectory=False):
    """Denoise a standard-normal window from step ``K`` down to 0.

    Parameters
    ----------
    obs: array-like
        Normalized observations ``[..., T_o, d_obs]``.
    r: StepScaleSequence or array-like
        Step-scale factors of length ``L``.
    model: DiSPoModel
    rng: numpy.random.Generator
    return_trajectory: bool
        Also return the list of intermediate windows, ``A^K`` first.

    Returns
    -------
    numpy.ndarray:
        ``[..., T_a, d_act]``, clipped to [-1, 1] when the config asks for it.
    """
    config = model.config
    obs = np.asarray(obs, dtype=np.float64)
    x = rng.standard_normal(obs.shape[:-2] + (config.action_horizon, config.d_act))
    trajectory = [x.copy()]
    for k in range(config.diffusion_steps, 0, -1):
        eps_hat, _ = forward_noise_pred(obs, x, r, k, model)
        alpha, gamma, sigma = model.schedule.coefficients(k)
        x = alpha * (x - gamma * eps_hat.data)
        if k > 1:
            x = x + sigma * rng.standard_normal(x.shape)
        trajectory.append(x.copy())
    if config.clip_sample:
        x = np.clip(x, -1.0, 1.0)
    if return_trajectory:
        return x, trajectory
    return x


def resolve_step_scale(r_act, config):
    """Turn a scalar, a tail/ramp vector, a full action-factor vector, or a sequence into a StepScaleSequence."""
    if isinstance(r_act, StepScaleSequence):
        return r_act
    T_o, T_a = config.obs_horizon, config.action_horizon
    values = np.asarray(r_act, dtype=np.float64)
    if np.any(values <= 0.0):
        raise ValueError(non_positive_r_emsg.format(value=r_act))
    if values.ndim == 0:
        return StepScaleSequence.constant(T_o, T_a, float(values))
    if values.shape == (T_a - T_o,):
        return StepScaleSequence.from_action_factors(T_o, np.concatenate([np.ones(T_o), values]))
    if values.shape == (T_a,):
        return StepScaleSequence.from_action_factors(T_o, values)
    raise ValueError(f"Cannot build step-scale factors from shape {values.shape}.")


def infer_next_action(obs_history, r_act, model, rng):
    """Sample an action window for the latest observations and pick the executed action.

    Parameters
    ----------
    obs_history: array-like
        Raw (unnormalized) native-rate observations ``[n, d_obs]``, oldest first. Fewer than ``T_o`` samples are
        padded by repeating the earliest one.
    r_act: float, array-like or StepScaleSequence
        Positive step-scale; a scalar applies to the ``T_a - T_o`` tail slots.
    model: DiSPoModel
    rng: numpy.random.Generator

    Returns
    -------
    (numpy.ndarray, numpy.ndarray):
        The action at ``config.action_index`` and the whole denormalized window ``[T_a, d_act]``.
    """
    config = model.config
    r = resolve_step_scale(r_act, config)
    history = np.atleast_2d(np.asarray(obs_history, dtype=np.float64))
    if history.shape[0] == 0:
        raise ValueError("The observation history is empty.")
    if history.shape[0] < config.obs_horizon:
        pad = np.repeat(history[:1], config.obs_horizon - history.shape[0], axis=0)
        history = np.concatenate([pad, history])
    obs = history[-config.obs_horizon :]
    if model.normalizer is not None:
        obs = model.normalizer.normalize_obs(obs)
    window = ddpm_sample(obs, r, model, rng)
    if model.normalizer is not None:
        window = model.normalizer.denormalize_act(window)
    return window[config.action_index].copy(), window


# End of file
