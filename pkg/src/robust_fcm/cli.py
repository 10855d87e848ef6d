"""Command-line entry point: ``robust-fcm {cluster,segment,tune-gamma,benchmark}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import dataio, evaluation, experiments, tuning
from .core import ConfigError, ModelConfig, validate_config

EXIT_USAGE = 2


class CliError(Exception):
    pass


def _add_model_args(p, clusters=2):
    p.add_argument("--clusters", type=int, default=clusters)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--weight", default="l2", help="kind[:beta], beta may use 's'/'s2' sigma suffixes")
    p.add_argument("--kernel", default="linear", help="linear | poly:b,t,d | rbf:b | tanh:b,t")
    p.add_argument("--penalty", choices=("none", "si", "sii"), default="none")
    p.add_argument("--topology", choices=("seq", "nn1", "nn2"), default=None)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="result JSON path")


def _add_source_args(p, pre_default):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV file of features")
    src.add_argument("--image", help="grayscale PGM image")
    src.add_argument("--synthetic", action="store_true", help="built-in 64x64 two-class image")
    p.add_argument("--label-column", type=int, default=-1, help="CSV label column (default last)")
    p.add_argument("--no-labels", action="store_true", help="CSV has no label column")
    p.add_argument("--header", action="store_true", help="CSV has a header row")
    p.add_argument("--pre", type=str.lower, choices=("n01", "nop", "u01"), default=pre_default)
    p.add_argument("--noise", default="none", help="none | gauss:P | sp:P")
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--filter", choices=("none", "mean", "median"), default="none")
    p.add_argument("--init", choices=("random", "kde"), default=None)
    p.add_argument("--truth", help="ground-truth PGM (distinct gray levels are classes)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-fcm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a feature table")
    _add_source_args(p, "n01")
    _add_model_args(p, clusters=3)

    p = sub.add_parser("segment", help="segment a grayscale image")
    _add_source_args(p, "n01")
    _add_model_args(p, clusters=2)
    p.add_argument("--save-labels", help="write the label image as PGM")

    p = sub.add_parser("tune-gamma", help="select the penalty factor")
    _add_source_args(p, "n01")
    _add_model_args(p, clusters=2)
    p.add_argument("--tgamma", type=int, default=10)
    p.add_argument("--holdout", type=float, default=0.0, help="validation fraction; 0 validates on the training data")

    p = sub.add_parser("benchmark", help="sweep a model grid and write a CSV summary")
    p.add_argument("--suite", choices=("uci-mini", "synth-image"), required=True)
    p.add_argument("--grid", help="JSON list of grid cells overriding the suite default")
    p.add_argument("--noise", default="gauss:5")
    p.add_argument("--noise-seed", type=int, default=0)
    p.add_argument("--filter", choices=("none", "mean", "median"), default="none")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default stdout)")
    return parser


def _truth_from_pgm(path):
    levels = dataio.load_pgm(path).samples[:, 0]
    _, codes = np.unique(levels, return_inverse=True)
    return codes


def _load_source(args):
    if args.data:
        label_column = None if args.no_labels else args.label_column
        return dataio.load_csv(args.data, label_column=label_column, header=args.header), False
    image = dataio.synth_two_class_image() if args.synthetic else dataio.load_pgm(args.image)
    if args.truth:
        image = type(image)(image.samples, labels=_truth_from_pgm(args.truth), grid=image.grid)
    return image, True


def _config(args, data, image: bool) -> ModelConfig:
    sigma = evaluation.data_diameter(data)
    topology = args.topology or ("nn2" if image else "seq")
    return ModelConfig(
        n_clusters=args.clusters,
        m=args.m,
        gamma=args.gamma,
        weight=experiments.parse_weight(args.weight if ":" in args.weight else args.weight + ":1s", sigma),
        kernel=experiments.parse_kernel(args.kernel, sigma),
        penalty=experiments.parse_penalty(args.penalty, topology),
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        seed=args.seed,
    )


def _prepared(args, data, image):
    """Data as the engine will see it (noise, filter, preprocessing applied)."""
    if image:
        data = experiments.filtered_image(experiments.noisy_image(data, args.noise, args.noise_seed), args.filter)
    return evaluation.preprocess(data, args.pre)


def cmd_cluster(args) -> int:
    data, image = _load_source(args)
    if image:
        return cmd_segment(args)
    work = _prepared(args, data, False)
    config = _config(args, work, False)
    validate_config(config, work)
    out = experiments.cluster(work, config, args.restarts)
    metrics = {"best_objective": out.best_by_objective.final_state.objective_trace[-1]}
    chosen = out.best_by_objective
    if out.best_accuracy is not None:
        metrics["best_accuracy"] = out.best_accuracy
        metrics["restart_accuracies"] = out.accuracies
        chosen = out.best_by_accuracy
        print(f"best accuracy {out.best_accuracy:.2f}%")
    print(f"best objective {metrics['best_objective']:.6g}")
    if args.out:
        dataio.save_result(args.out, chosen, metrics)
    return 0


def cmd_segment(args) -> int:
    image, is_image = _load_source(args)
    if not is_image:
        raise CliError("segment needs --image or --synthetic")
    work = _prepared(args, image, True)
    config = _config(args, work, True)
    validate_config(config, work)
    out = experiments.segment(
        image,
        config,
        noise=args.noise,
        noise_seed=args.noise_seed,
        filt=args.filter,
        pre=args.pre,
        init=getattr(args, "init", None) or "kde",
        restarts=args.restarts,
    )
    metrics = {"best_objective": out.result.final_state.objective_trace[-1]}
    if out.accuracy is not None:
        metrics["segmentation_accuracy"] = out.accuracy
        print(f"SA {out.accuracy:.2f}%")
    if args.out:
        dataio.save_result(args.out, out.result, metrics)
    if getattr(args, "save_labels", None):
        labels = out.aligned_labels if out.accuracy is not None else out.result.hard_labels
        dataio.save_pgm(args.save_labels, dataio.label_image(labels, image.grid, config.n_clusters))
    return 0


def cmd_tune_gamma(args) -> int:
    data, image = _load_source(args)
    work = _prepared(args, data, image)
    if args.penalty == "none":
        raise CliError("tune-gamma needs --penalty si or sii")
    config = _config(args, work, image)
    validate_config(config, work)
    n = work.n_samples
    if args.holdout > 0:
        if image:
            raise CliError("--holdout is not supported for images")
        rng = np.random.default_rng(args.seed)
        perm = rng.permutation(n)
        n_val = max(1, int(round(args.holdout * n)))
        split = (np.sort(perm[n_val:]), np.sort(perm[:n_val]))
    else:
        split = (np.arange(n), np.arange(n))
    kwargs = {}
    init = getattr(args, "init", None) or ("kde" if image else "random")
    if init == "kde":
        kwargs["init_centroids"] = evaluation.kde_peak_centroids(work, config.n_clusters)[:, None]
    res = tuning.tune_gamma(work, split, config, t_gamma=args.tgamma, **kwargs)
    for g, e in res.trace:
        print(f"{g:.6g}\t{e:.6g}")
    print(f"selected gamma {res.best_gamma:.6g}")
    if args.out:
        dataio.write_json(
            args.out,
            {
                "schema_version": dataio.RESULT_SCHEMA_VERSION,
                "config": config.to_dict(),
                "trace": [[float(g), float(e)] for g, e in res.trace],
                "best_gamma": float(res.best_gamma),
                "stopped_early": res.stopped_early,
            },
        )
    return 0


def _read_grid(path):
    with open(path, encoding="utf-8") as fh:
        cells = json.load(fh)
    if not isinstance(cells, list) or not cells:
        raise CliError(f"grid file {path} has no cells")
    return [experiments.GridCell(**c) for c in cells]


def cmd_benchmark(args) -> int:
    image = args.suite == "synth-image"
    if args.grid:
        cells = _read_grid(args.grid)
    else:
        cells = experiments.synth_image_grid() if image else experiments.uci_mini_grid()
    data = dataio.synth_two_class_image() if image else experiments.load_iris()
    n_clusters = data.n_classes
    restarts = args.restarts if args.restarts is not None else (1 if image else 20)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(experiments.SUMMARY_HEADER)
    for cell in cells:
        row, _ = experiments.run_cell(
            cell,
            data,
            image=image,
            n_clusters=n_clusters,
            restarts=restarts,
            seed=args.seed,
            noise=args.noise if image else "none",
            noise_seed=args.noise_seed,
            filt=args.filter,
        )
        writer.writerow(row)
    text = buf.getvalue()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise dataio.IoError(str(exc)) from exc
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "cluster": cmd_cluster,
    "segment": cmd_segment,
    "tune-gamma": cmd_tune_gamma,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, CliError, ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
