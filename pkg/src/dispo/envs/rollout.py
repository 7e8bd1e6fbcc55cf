#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Closed-loop episodes of a trained policy with step-scale control.

Observations reach the policy at the native (training) rate. With ``obs_mode="native"`` the history only takes a
new sample once a full native step of time has been executed; ``obs_mode="every"`` appends one after every executed
action. Each inference executes the tail slots from ``action_index`` until one native step of time is covered.

The ``interp`` ablation samples at ``r = 1``, linearly interpolates the window from the current slot onward at
half steps, and executes the first half of the interpolated sequence.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from dispo.envs.experts import ideal_steps as expert_ideal_steps
from dispo.errors import CheckpointMismatchError
from dispo.policy import infer_next_action, resolve_step_scale

logger = logging.getLogger(__name__)

OBS_MODES = ["native", "every"]
ABLATIONS = ["none", "interp", "interp_tail"]
SAMPLER_STREAM = 1


@dataclass
class EpisodeResult:
    task: str
    seed: int
    step_scale: float
    ablation: str
    obs_mode: str
    score: float
    breakdown: dict
    positions: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    n_inferences: int = 0

    def to_dict(self):
        return {
            "task": self.task,
            "seed": self.seed,
            "r": self.step_scale,
            "ablation": self.ablation,
            "obs_mode": self.obs_mode,
            "score": self.score,
            "breakdown": self.breakdown,
            "n_inferences": self.n_inferences,
            "positions": self.positions,
            "actions": self.actions,
        }


def check_compatible(env, model):
    """Raise CheckpointMismatchError when the model's feature sizes do not fit the environment."""
    config = model.config
    if env.obs_dim != config.d_obs:
        raise CheckpointMismatchError("d_obs", env.obs_dim, config.d_obs)
    if env.act_dim != config.d_act:
        raise CheckpointMismatchError("d_act", env.act_dim, config.d_act)


def double_window(window):
    """Interpolate ``window`` at half steps to twice its length and keep the first half (``len(window)`` rows)."""
    window = np.asarray(window, dtype=np.float64)
    knots = np.arange(len(window), dtype=np.float64)
    query = np.arange(len(window)) / 2.0
    return np.stack([np.interp(query, knots, window[:, d]) for d in range(window.shape[1])], axis=-1)


def interpolate_half_steps(anchor, window):
    """Interpolate ``[anchor, *window]`` at half steps and keep the first half: ``len(window)`` actions."""
    sequence = np.concatenate([np.asarray(anchor, dtype=np.float64)[None], np.asarray(window)])
    knots = np.arange(len(sequence), dtype=np.float64)
    query = np.arange(1, 2 * (len(sequence) - 1) + 1) / 2.0
    dense = np.stack([np.interp(query, knots, sequence[:, d]) for d in range(sequence.shape[1])], axis=-1)
    return dense[: len(window)]


def plan_actions(env, state, history, model, r, rng, obs_mode, ablation):
    """Actions of one inference as ``[(action, time factor), ...]``."""
    config = model.config
    start = config.action_index
    if ablation == "interp":
        _, window = infer_next_action(history, 1.0, model, rng)
        return [(a, 0.5) for a in double_window(window)]
    if ablation == "interp_tail":
        _, window = infer_next_action(history, 1.0, model, rng)
        anchor = window[start - 1] if start > 0 else env.position(state)
        return [(a, 0.5) for a in interpolate_half_steps(anchor, window[start:])]

    _, window = infer_next_action(history, r, model, rng)
    factors = r.action_factors
    if obs_mode == "every":
        return [(window[start], float(factors[start]))]
    plan = []
    covered = 0.0
    for i in range(start, config.action_horizon):
        plan.append((window[i], float(factors[i])))
        covered += factors[i]
        if covered >= 1.0 - 1e-9:
            break
    return plan


def rollout(env, model, r_act=1.0, obs_mode="native", seed=0, ablation="none", native_rate=0.5, ideal=None):
    """Run one episode.

    Parameters
    ----------
    env: SideTappingEnv or DrawingEnv
    model: DiSPoModel
        Trained model with its normalizer.
    r_act: float, array-like or StepScaleSequence
        Step scale of the tail action slots; ignored by the interpolation ablations, which run the model at 1.
    obs_mode: str
        ``native`` or ``every``.
    seed: int
        Seeds the initial state and, through a separate stream, the sampler.
    ablation: str
        ``none``, ``interp`` (the whole predicted window at half steps) or ``interp_tail`` (only the slots from
        ``action_index`` on, anchored at the previous slot).
    native_rate: float
        Rate of the training demonstrations, in samples per fine step; sets the ideal episode length.
    ideal: int
        Ideal number of steps; computed from the expert plan when not given.

    Returns
    -------
    EpisodeResult
    """
    if obs_mode not in OBS_MODES:
        raise ValueError(f"Unknown obs_mode '{obs_mode}'. Choose from {OBS_MODES}.")
    if ablation not in ABLATIONS:
        raise ValueError(f"Unknown ablation '{ablation}'. Choose from {ABLATIONS}.")
    check_compatible(env, model)
    config = model.config
    r = resolve_step_scale(r_act, config)
    tail = r.action_factors[config.obs_horizon :]
    scale = 0.5 if ablation != "none" else float(np.mean(tail)) if len(tail) else 1.0
    if ideal is None:
        ideal = int(round(expert_ideal_steps(env, seed, native_rate) / scale))

    rng = np.random.default_rng([seed, SAMPLER_STREAM])
    state = env.reset(seed)
    history = [env.observe(state)]
    positions = [env.position(state).tolist()]
    actions = []
    elapsed = 0.0
    n_inferences = 0
    while not env.done(state):
        plan = plan_actions(env, state, history[-config.obs_horizon :], model, r, rng, obs_mode, ablation)
        n_inferences += 1
        for action, factor in plan:
            if env.done(state):
                break
            state = env.step(state, action)
            actions.append(np.asarray(action).tolist())
            positions.append(env.position(state).tolist())
            elapsed += factor
            if obs_mode == "every":
                history.append(env.observe(state))
            elif elapsed >= 1.0 - 1e-9:
                elapsed -= 1.0
                history.append(env.observe(state))
    breakdown = env.score(state, ideal)
    logger.info("episode %s seed %d r=%s ablation=%s: %s", env.task, seed, r_act, ablation, breakdown)
    return EpisodeResult(
        task=env.task,
        seed=int(seed),
        step_scale=scale,
        ablation=ablation,
        obs_mode=obs_mode,
        score=breakdown["score"],
        breakdown=breakdown,
        positions=positions,
        actions=actions,
        n_inferences=n_inferences,
    )


def run_episodes(env, model, seeds, workers=1, **options):
    """Roll out one episode per seed; results come back in seed order whatever the number of workers."""
    seeds = [int(s) for s in seeds]
    if workers <= 1:
        return [rollout(env, model, seed=s, **options) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: rollout(env, model, seed=s, **options), seeds))


# End of file
