"""Command line interface: ``tdeclf {fit,predict,benchmark,compare}``.

Exit codes: 0 success, 1 build failure, 2 unreadable or incompatible input,
3 incomplete result matrix in ``compare``. Output files are written under
``--output-dir`` (default: ``$TDECLF_OUTPUT_DIR`` or the working directory)
unless given as absolute paths.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from .dataset_io import load_ts, load_ucr_split
from .ensembles import VARIANTS, EnsembleConfig, build_ensemble
from .exceptions import DatasetError, IncompleteMatrixError
from .harness import ClassifierSpec, read_results, run_experiment, score_matrix, write_results
from .persistence import load_model, save_model
from .stats import format_report, mean_ranks_and_cliques

log = logging.getLogger("tdeclf")

OUTPUT_DIR_ENV = "TDECLF_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message, code=2):
        super().__init__(message)
        self.code = code


def parse_duration(text: str) -> float:
    """Seconds from ``90``, ``90s``, ``5m`` or ``1.5h``."""
    match = re.fullmatch(r"\s*([0-9]*\.?[0-9]+)\s*([smh]?)\s*", text)
    if not match:
        raise argparse.ArgumentTypeError(f"invalid duration {text!r}")
    value, unit = float(match.group(1)), match.group(2)
    return value * {"": 1, "s": 1, "m": 60, "h": 3600}[unit]


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _output_path(args, name) -> Path:
    path = Path(name)
    if path.is_absolute():
        return path
    base = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    base.mkdir(parents=True, exist_ok=True)
    return base / path


def _read_dataset(path):
    path = Path(path)
    if not path.exists():
        raise CliError(f"file not found: {path}")
    try:
        return load_ts(path)
    except (DatasetError, ValueError) as exc:
        raise CliError(f"cannot parse {path}: {exc}")


def _config_options(args, variant):
    options = {"k": args.k, "s": args.s, "time_contract": args.contract,
               "word_lengths": args.word_lengths}
    if variant in ("sboss", "csboss", "tde"):
        options["levels"] = tuple(range(1, args.max_height + 1))
    return options


def cmd_fit(args):
    train = _read_dataset(args.train)
    variant = args.variant.replace("-", "").lower()
    try:
        config = EnsembleConfig(variant, seed=args.seed, **_config_options(args, variant))
    except ValueError as exc:
        raise CliError(str(exc))
    started = time.perf_counter()
    try:
        ensemble = build_ensemble(train, config)
    except Exception as exc:
        raise CliError(f"build failed: {exc}", code=1)
    seconds = time.perf_counter() - started
    out = _output_path(args, args.out)
    save_model(ensemble, out)
    print(f"model={out} variant={variant} members={len(ensemble.members)} "
          f"train_acc_estimate={ensemble.train_accuracy_estimate:.4f} "
          f"build_seconds={seconds:.2f} seed={args.seed}")


def cmd_predict(args):
    model_path = Path(args.model)
    if not model_path.exists():
        raise CliError(f"file not found: {model_path}")
    ensemble = load_model(model_path)
    test = _read_dataset(args.test)
    if test.series_length != ensemble.series_length:
        raise CliError(f"series length {test.series_length} in {args.test} does not match "
                       f"model length {ensemble.series_length}")
    unknown = sorted(set(test.classes) - set(ensemble.classes))
    if unknown:
        raise CliError(f"labels {unknown} in {args.test} unknown to the model")

    dist = ensemble.predict_proba(test.X)
    pred = np.argmax(dist, axis=1)
    index = {c: i for i, c in enumerate(ensemble.classes)}
    truth = np.array([index[c] for c in test.labels])

    out = _output_path(args, args.out)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "predicted"] + [f"p_{c}" for c in ensemble.classes])
        for i, (p, row) in enumerate(zip(pred, dist)):
            writer.writerow([i, ensemble.classes[p]] + [repr(float(v)) for v in row])
    print(f"predictions={out} cases={len(pred)} accuracy={np.mean(pred == truth):.4f}")


def _resolve_datasets(args):
    pairs = []
    for entry in args.datasets:
        prefix = Path(entry)
        train_path = Path(f"{prefix}_TRAIN.ts")
        try:
            if train_path.exists():
                test_path = Path(f"{prefix}_TEST.ts")
                if not test_path.exists():
                    raise CliError(f"file not found: {test_path}")
                pairs.append((load_ts(train_path), load_ts(test_path)))
            else:
                pairs.append(load_ucr_split(args.data_dir, entry))
        except FileNotFoundError as exc:
            raise CliError(f"file not found: {exc}")
        except (DatasetError, ValueError) as exc:
            raise CliError(f"cannot parse dataset {entry}: {exc}")
    return pairs


def cmd_benchmark(args):
    if args.s < 1 or (args.contract is None and args.s > args.k):
        raise CliError("require 1 <= --s <= --k")
    pairs = _resolve_datasets(args)
    specs = []
    for name in args.variants:
        variant = name.replace("-", "").lower()
        if variant in VARIANTS:
            specs.append(ClassifierSpec.of(name, variant, **_config_options(args, variant)))
        else:
            specs.append(ClassifierSpec.of(name, variant))
    results = run_experiment(pairs, specs, args.resamples, args.seed, args.threads)
    out = _output_path(args, args.out)
    with open(out, "w", newline="") as fh:
        write_results(results, fh, include_times=args.timings)
    failed = sum(r.failed for r in results)
    print(f"results={out} rows={len(results)} failed={failed} seed={args.seed}")
    if failed:
        raise CliError(f"{failed} cells failed", code=1)


def cmd_compare(args):
    results = []
    for path in args.results:
        path = Path(path)
        if not path.exists():
            raise CliError(f"file not found: {path}")
        try:
            results.extend(read_results(path.read_text()))
        except ValueError as exc:
            raise CliError(f"cannot parse {path}: {exc}")
    try:
        datasets, names, matrix = score_matrix(results, args.metric)
        report = mean_ranks_and_cliques(matrix, names, args.alpha, datasets)
    except IncompleteMatrixError as exc:
        raise CliError(str(exc), code=3)
    text = format_report(report, args.metric)
    if args.out:
        _output_path(args, args.out).write_text(text)
    sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdeclf", description=__doc__.splitlines()[0])
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output-dir", default=None)
        p.add_argument("--threads", type=int, default=1)

    def build_options(p):
        p.add_argument("--k", type=int, default=250, help="parameter samples")
        p.add_argument("--s", type=int, default=50, help="maximum ensemble size")
        p.add_argument("--contract", type=parse_duration, default=None,
                       help="build time limit, e.g. 60s or 5m (replaces --k)")
        p.add_argument("--word-lengths", type=_int_list, default=(16, 14, 12, 10, 8))
        p.add_argument("--max-height", type=int, choices=(1, 2, 3), default=3)

    p = sub.add_parser("fit", help="build an ensemble and save it")
    common(p)
    build_options(p)
    p.add_argument("--variant", choices=VARIANTS + ("c-boss", "s-boss", "cs-boss"),
                   default="tde")
    p.add_argument("--train", required=True)
    p.add_argument("--out", default="model.npz")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="predict a .ts file with a saved model")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", default="predictions.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark", help="run seeded resample experiments")
    common(p)
    build_options(p)
    p.add_argument("--variants", nargs="+", default=["tde"])
    p.add_argument("--datasets", nargs="+", required=True,
                   help="dataset names (looked up in --data-dir) or path prefixes")
    p.add_argument("--data-dir", default=".")
    p.add_argument("--resamples", type=int, default=1)
    p.add_argument("--timings", action="store_true",
                   help="record train_seconds (makes output run-dependent)")
    p.add_argument("--out", default="results.csv")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("compare", help="mean ranks and cliques from result CSVs")
    common(p)
    p.add_argument("--results", nargs="+", required=True)
    p.add_argument("--metric", choices=("accuracy", "balanced_accuracy", "f1", "auroc"),
                   default="accuracy")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except CliError as exc:
        print(f"tdeclf {args.command}: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
