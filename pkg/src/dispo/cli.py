#!/usr/bin/env python
##############################################################################
#
# dispo             step-scalable diffusion policies
#
# See AUTHORS.rst for a list of people who contributed.
# See LICENSE.rst for license information.
#
##############################################################################

"""Command-line entry point ``dispo`` with the subcommands gen-demos, train, eval and dump-features.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
from tqdm import tqdm

from dispo import numgrad as ng
from dispo.checkpoint import load_checkpoint, save_checkpoint
from dispo.config import augment_config, configure_logging, load_run_config, model_config, write_config
from dispo.data.augment import WindowDataset
from dispo.data.serialization import read_trajectories, write_csv, write_json, write_jsonl, write_trajectories
from dispo.data.trajectory import coarsify_demo, extract_window
from dispo.envs import TASKS, make_env
from dispo.envs.experts import scripted_expert
from dispo.envs.rollout import ABLATIONS, OBS_MODES, check_compatible, run_episodes
from dispo.errors import CheckpointMismatchError, NonFiniteError, NumericalError, UnsupportedTypeError
from dispo.policy import (
    DiSPoModel,
    ParameterEMA,
    ddpm_training_pair,
    forward_noise_pred,
    pool_action_features,
    train_epoch,
)
from dispo.ssm import StepScaleSequence
from dispo.version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

SEED_STRIDE = 100003
EVAL_SEED_OFFSET = 10_000_000
METRIC_COLUMNS = ["epoch", "L_MSE", "L_RNC", "L", "eval_score"]
FEATURE_BATCH = 128


def demo_seeds(seed, n):
    return [seed * SEED_STRIDE + i for i in range(n)]


def eval_seeds(seed, n):
    return [EVAL_SEED_OFFSET + seed * SEED_STRIDE + i for i in range(n)]


def cmd_gen_demos(args):
    overrides = {"task": args.task, "seed": args.seed, "data": {"n_demos": args.n, "stride": args.stride}}
    overrides["data"]["fine_rate"] = args.rate
    config = load_run_config(args.config, overrides)
    data = config["data"]
    env = make_env(config["task"], max_steps=None)
    rng = np.random.default_rng(config["seed"])
    fine, coarse = [], []
    for s in demo_seeds(config["seed"], data["n_demos"]):
        demo = scripted_expert(env, s, rate=data["fine_rate"])
        fine.append(demo)
        coarse.append(coarsify_demo(demo, data["stride"], rng))
    out = Path(args.out)
    write_trajectories(out / "demos.jsonl", coarse)
    write_trajectories(out / "demos_fine.jsonl", fine)
    write_config(out, config)
    logger.info("wrote %d demonstrations of %s to %s", len(coarse), config["task"], out)
    return EXIT_OK


def evaluate(model, task, seeds, step_scale, native_rate, eval_config, ablation=None, obs_mode=None):
    env = make_env(task) if eval_config.get("max_steps") is None else make_env(task, eval_config["max_steps"])
    return run_episodes(
        env,
        model,
        seeds,
        workers=eval_config["workers"],
        r_act=step_scale,
        obs_mode=obs_mode or eval_config["obs_mode"],
        ablation=ablation or eval_config["ablation"],
        native_rate=native_rate,
    )


def _metric_row(epoch, metrics, eval_score):
    return [epoch, metrics["L_MSE"], metrics["L_RNC"], metrics["L"], "" if eval_score is None else eval_score]


def cmd_train(args):
    overrides = {"seed": args.seed, "train": {"epochs": args.epochs}}
    config = load_run_config(args.config, overrides)
    trajectories = read_trajectories(args.data)
    if not trajectories:
        raise ValueError(f"No demonstrations in {args.data}.")
    config["task"] = trajectories[0].task
    env = make_env(config["task"])
    mcfg = model_config(config, env.obs_dim, env.act_dim)
    seed = config["seed"]
    dataset = WindowDataset(trajectories, mcfg.obs_horizon, mcfg.action_horizon)
    model = DiSPoModel(mcfg, rng=np.random.default_rng([seed, 2]))
    model.normalizer = dataset.normalizer
    optim_config = config["optim"]
    optim = ng.OptimState(
        model.parameters(),
        lr=optim_config["lr"],
        weight_decay=optim_config["weight_decay"],
        betas=tuple(optim_config["betas"]),
        eps=optim_config["eps"],
    )
    train_config = config["train"]
    ema = ParameterEMA(model, train_config["ema_decay"]) if train_config["ema_decay"] > 0 else None
    native_rate = trajectories[0].rate
    augment = augment_config(config)
    rng = np.random.default_rng([seed, 0])

    out = Path(args.out)
    write_config(out, config)
    extra = {"task": config["task"], "native_rate": native_rate, "seed": seed}
    rows = []
    best = None
    epochs = train_config["epochs"]
    try:
        for epoch in tqdm(range(1, epochs + 1), desc="train", disable=not args.verbose):
            metrics = train_epoch(dataset, model, optim, rng, augment=augment, epoch=epoch, ema=ema)
            eval_score = None
            if epoch % train_config["eval_every"] == 0 or epoch == epochs:
                candidate = model if ema is None else ema.averaged_model(model)
                episodes = evaluate(
                    candidate,
                    config["task"],
                    eval_seeds(seed, train_config["eval_episodes"]),
                    train_config["select_step_scale"],
                    native_rate,
                    config["eval"],
                )
                eval_score = float(np.mean([e.score for e in episodes]))
                ckpt_dir = out / "checkpoints" / f"epoch_{epoch:04d}"
                ckpt = save_checkpoint(ckpt_dir, candidate, dict(extra, epoch=epoch))
                if best is None or eval_score > best["eval_score"]:
                    best = {"epoch": epoch, "eval_score": eval_score, "checkpoint": str(ckpt.relative_to(out))}
                    write_json(out / "best.json", best)
            rows.append(_metric_row(epoch, metrics, eval_score))
            write_csv(out / "metrics.csv", METRIC_COLUMNS, rows)
            logger.info("epoch %d: %s eval=%s", epoch, metrics, eval_score)
    finally:
        write_csv(out / "metrics.csv", METRIC_COLUMNS, rows)
    return EXIT_OK


def _summary_rows(results):
    rows = []
    groups = {}
    for result in results:
        groups.setdefault((result.step_scale, result.ablation), []).append(result)
    for (scale, ablation), episodes in groups.items():
        keys = [k for k, v in episodes[0].breakdown.items() if isinstance(v, (int, float))]
        for key in keys:
            values = np.array([e.breakdown[key] for e in episodes], dtype=np.float64)
            stats = [values.mean(), values.std(), values.min(), values.max(), len(values)]
            rows.append([scale, ablation, key] + stats)
    return rows


def cmd_eval(args):
    overrides = {
        "seed": args.seed,
        "eval": {
            "episodes": args.episodes,
            "step_scales": args.step_scale,
            "ablation": args.ablation,
            "obs_mode": args.obs_mode,
            "workers": args.workers,
        },
    }
    config = load_run_config(args.config, overrides)
    model, manifest = load_checkpoint(args.ckpt)
    extra = manifest.get("extra", {})
    task = args.task or extra.get("task") or config["task"]
    config["task"] = task
    check_compatible(make_env(task), model)
    native_rate = extra.get("native_rate", config["data"]["fine_rate"] / config["data"]["stride"])
    eval_config = config["eval"]
    seeds = eval_seeds(config["seed"], eval_config["episodes"])
    scales = eval_config["step_scales"]
    if eval_config["ablation"] != "none":
        logger.info("ablation %s runs the model at r=1; ignoring step scales %s", eval_config["ablation"], scales)
        scales = [1.0]
    results = []
    for scale in scales:
        results.extend(evaluate(model, task, seeds, scale, native_rate, eval_config))
    out = Path(args.out)
    write_config(out, config)
    write_jsonl(out / "episodes.jsonl", (r.to_dict() for r in results))
    write_csv(
        out / "summary.csv",
        ["r", "ablation", "metric", "mean", "std", "min", "max", "n"],
        _summary_rows(results),
    )
    return EXIT_OK


def feature_rows(model, dataset, k, rng):
    """Pooled mid-stack features of every source window of ``dataset`` at diffusion step ``k``."""
    config = model.config
    r = StepScaleSequence.ones(config.obs_horizon, config.action_horizon)
    features, labels = [], []
    for start in range(0, len(dataset), FEATURE_BATCH):
        items = range(start, min(start + FEATURE_BATCH, len(dataset)))
        windows = [dataset.window(i) for i in items]
        obs = np.stack([w.obs for w in windows])
        act = np.stack([w.act for w in windows])
        noisy, _ = ddpm_training_pair(act, k, model.schedule, rng)
        _, mid = forward_noise_pred(obs, noisy, r, k, model)
        features.append(pool_action_features(mid, config).data)
        labels.append(dataset.normalizer.denormalize_act(act).reshape(len(windows), -1))
    return np.concatenate(features), np.concatenate(labels)


def adjacent_feature_distance(dataset, features):
    """Mean feature distance between windows of the same trajectory whose anchors are one step apart."""
    distances = []
    for i in range(len(dataset) - 1):
        (ta, sa), (tb, sb) = dataset.index[i], dataset.index[i + 1]
        if ta == tb and sb == sa + 1:
            distances.append(np.linalg.norm(features[i + 1] - features[i]))
    return float(np.mean(distances)) if distances else 0.0


def cmd_dump_features(args):
    config = load_run_config(args.config, {"seed": args.seed})
    model, _ = load_checkpoint(args.ckpt)
    mcfg = model.config
    if not 1 <= args.k <= mcfg.diffusion_steps:
        raise ValueError(f"k={args.k} is outside 1..{mcfg.diffusion_steps}.")
    trajectories = read_trajectories(args.data)
    dataset = WindowDataset(trajectories, mcfg.obs_horizon, mcfg.action_horizon, normalizer=model.normalizer)
    if args.max_windows is not None:
        dataset.index = dataset.index[: args.max_windows]
    features, labels = feature_rows(model, dataset, args.k, np.random.default_rng(config["seed"]))
    out = Path(args.out)
    header = (
        ["window", "trajectory", "anchor"]
        + [f"f{i}" for i in range(features.shape[1])]
        + [f"a{i}" for i in range(labels.shape[1])]
    )
    rows = (
        [i, t, s] + list(f) + list(a) for i, ((t, s), f, a) in enumerate(zip(dataset.index, features, labels))
    )
    write_csv(out / "features.csv", header, rows)
    report = {
        "k": args.k,
        "n_windows": len(dataset),
        "feature_width": int(features.shape[1]),
        "rnc_weight": mcfg.rnc_weight,
        "mean_adjacent_distance": adjacent_feature_distance(dataset, features),
    }
    write_json(out / "feature_report.json", report)
    write_config(out, config)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="dispo", description="Step-scalable diffusion policies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log progress at INFO level.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-demos", help="Generate coarse (and fine) scripted demonstrations.")
    gen.add_argument("--task", choices=TASKS, default=None)
    gen.add_argument("--n", type=int, default=None, help="Number of demonstrations.")
    gen.add_argument("--stride", type=int, default=None, help="Coarsening stride.")
    gen.add_argument("--rate", type=float, default=None, help="Fine demonstration rate.")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--config", default=None)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen_demos)

    train = sub.add_parser("train", help="Train a policy on demonstrations.")
    train.add_argument("--config", default=None)
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True)
    train.add_argument("--seed", type=int, default=None)
    train.add_argument("--epochs", type=int, default=None)
    train.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="Evaluate a checkpoint across step scales.")
    ev.add_argument("--ckpt", required=True)
    ev.add_argument("--task", choices=TASKS, default=None)
    ev.add_argument("--episodes", type=int, default=None)
    ev.add_argument("--step-scale", type=float, nargs="+", default=None)
    ev.add_argument("--ablation", choices=ABLATIONS, default=None)
    ev.add_argument("--obs-mode", choices=OBS_MODES, default=None)
    ev.add_argument("--workers", type=int, default=None)
    ev.add_argument("--seed", type=int, default=None)
    ev.add_argument("--config", default=None)
    ev.add_argument("--out", required=True)
    ev.set_defaults(func=cmd_eval)

    dump = sub.add_parser("dump-features", help="Dump mid-stack features of every dataset window.")
    dump.add_argument("--ckpt", required=True)
    dump.add_argument("--data", required=True)
    dump.add_argument("--k", type=int, default=10)
    dump.add_argument("--max-windows", type=int, default=None)
    dump.add_argument("--seed", type=int, default=None)
    dump.add_argument("--config", default=None)
    dump.add_argument("--out", required=True)
    dump.set_defaults(func=cmd_dump_features)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.verbose)
        return args.func(args)
    except (NumericalError, NonFiniteError) as err:
        print(f"dispo: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (CheckpointMismatchError, UnsupportedTypeError, ValueError, OSError) as err:
        print(f"dispo: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

# End of file
