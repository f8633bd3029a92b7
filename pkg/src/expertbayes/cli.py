"""Batch command-line entry points: refine, learn, eval, serve.

Exit codes: 0 success, 2 usage error, 3 data/format error. Every command
is deterministic given its flags (including --seed); reports differ
across runs only in the created_at timestamp, which is excluded from
the stability digest.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .baselines import K2Config
from .errors import ExpertBayesError
from .evaluation import (
    DEFAULT_THRESHOLDS,
    ExpertBayesSpec,
    K2Spec,
    OriginalSpec,
    TanSpec,
    cross_validate,
    make_folds,
)
from .formats import (
    canonical_json,
    dataset_digest,
    eval_report_document,
    learn_report_document,
    load_dataset,
    load_network,
    network_digest,
    refine_report_document,
    save_network,
)
from .refine import RefinementConfig, refine

USAGE_ERROR = 2
DATA_ERROR = 3


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="training CSV file")
    p.add_argument("--class", dest="class_name", required=True, help="class column name")
    p.add_argument("--missing", default="?", help="missing-value token (default '?')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expertbayes",
        description="Refine expert-built Bayesian network classifiers and "
        "compare them against K2/TAN baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_refine = sub.add_parser("refine", help="single-edit refinement of a network")
    p_refine.add_argument("--network", required=True, help="network document (JSON)")
    _add_data_flags(p_refine)
    p_refine.add_argument("--positive", required=True, help="positive class state label")
    split = p_refine.add_mutually_exclusive_group()
    split.add_argument("--test", help="held-out test CSV (single split mode)")
    split.add_argument("--folds", type=int, help="cross-validate with k folds instead")
    p_refine.add_argument("--iterations", type=int, default=100)
    p_refine.add_argument("--seed", type=int, default=0)
    p_refine.add_argument("--threshold", type=float, default=0.5)
    p_refine.add_argument("--pseudocount", type=float, default=1.0)
    p_refine.add_argument("--redraw-rejected", action="store_true")
    p_refine.add_argument("--out", required=True, help="report output path")

    p_learn = sub.add_parser("learn", help="learn a structure from data (K2 or TAN)")
    p_learn.add_argument("--algorithm", required=True, choices=("k2", "tan"))
    _add_data_flags(p_learn)
    p_learn.add_argument("--max-parents", type=int, default=1)
    p_learn.add_argument("--pseudocount", type=float, default=1.0)
    p_learn.add_argument("--out", required=True, help="network output path")
    p_learn.add_argument("--report", help="optional report document path")

    p_eval = sub.add_parser("eval", help="cross-validated comparison of learners")
    p_eval.add_argument(
        "--learners",
        required=True,
        help="comma-separated subset of original,expertbayes,k2,tan",
    )
    _add_data_flags(p_eval)
    p_eval.add_argument("--positive", required=True)
    p_eval.add_argument("--network", help="network document for original/expertbayes")
    p_eval.add_argument("--folds", type=int, default=5)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--iterations", type=int, default=100)
    p_eval.add_argument("--threshold", type=float, default=0.5)
    p_eval.add_argument("--pseudocount", type=float, default=1.0)
    p_eval.add_argument("--max-parents", type=int, default=1)
    p_eval.add_argument("--out", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP job API")
    p_serve.add_argument("--port", type=int, default=8700)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--storage-dir", required=True)
    p_serve.add_argument("--ui-dir", help="built web UI to serve at /")

    return parser


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def cmd_refine(args: argparse.Namespace) -> int:
    if args.folds is None and args.test is None:
        print("expertbayes refine: one of --test or --folds is required", file=sys.stderr)
        return USAGE_ERROR
    if args.folds is not None and args.folds < 2:
        print("expertbayes refine: --folds must be >= 2", file=sys.stderr)
        return USAGE_ERROR

    net_bytes = _read(args.network)
    train_bytes = _read(args.data)
    network = load_network(net_bytes)
    train = load_dataset(train_bytes, args.class_name, args.missing)
    config = RefinementConfig(
        iterations=args.iterations,
        seed=args.seed,
        positive_state=args.positive,
        threshold=args.threshold,
        pseudocount=args.pseudocount,
        redraw_rejected=args.redraw_rejected,
    )

    if args.test is not None:
        test_bytes = _read(args.test)
        test = load_dataset(test_bytes, args.class_name, args.missing)
        run = refine(network, train, test, config)
        inputs = {
            "network": network_digest(network),
            "train": dataset_digest(train),
            "test": dataset_digest(test),
        }
        doc = refine_report_document(run, inputs)
        _write(args.out, canonical_json(doc))
        print(f"{run.best_test_score:.6f}")
        return 0

    plan = make_folds(train, args.folds, args.seed)
    report = cross_validate(
        [ExpertBayesSpec(network, config)],
        train,
        plan,
        DEFAULT_THRESHOLDS,
        positive_state=args.positive,
        cci_threshold=args.threshold,
    )
    inputs = {"network": network_digest(network), "data": dataset_digest(train)}
    doc = eval_report_document(report, inputs)
    _write(args.out, canonical_json(doc))
    print(f"{report.learners[0].macro_cci:.6f}")
    return 0


def cmd_learn(args: argparse.Namespace) -> int:
    data_bytes = _read(args.data)
    data = load_dataset(data_bytes, args.class_name, args.missing)
    if args.algorithm == "k2":
        from .baselines import learn_k2

        network = learn_k2(data, K2Config(max_parents=args.max_parents), args.pseudocount)
    else:
        from .baselines import learn_tan

        network = learn_tan(data, args.pseudocount)
    _write(args.out, save_network(network))
    if args.report:
        doc = learn_report_document(
            network, args.algorithm, {"data": dataset_digest(data)}
        )
        _write(args.report, canonical_json(doc))
    print(len(network.structure.edges))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    names = [n.strip() for n in args.learners.split(",") if n.strip()]
    known = {"original", "expertbayes", "k2", "tan"}
    if not names or any(n not in known for n in names):
        print(
            f"expertbayes eval: --learners must be a subset of {sorted(known)}",
            file=sys.stderr,
        )
        return USAGE_ERROR
    if len(set(names)) != len(names):
        print("expertbayes eval: duplicate learner names", file=sys.stderr)
        return USAGE_ERROR
    if args.folds < 2:
        print("expertbayes eval: --folds must be >= 2", file=sys.stderr)
        return USAGE_ERROR
    needs_network = {"original", "expertbayes"} & set(names)
    if needs_network and not args.network:
        print(
            f"expertbayes eval: --network is required for {sorted(needs_network)}",
            file=sys.stderr,
        )
        return USAGE_ERROR

    data_bytes = _read(args.data)
    data = load_dataset(data_bytes, args.class_name, args.missing)
    inputs = {"data": dataset_digest(data)}
    network = None
    if args.network:
        net_bytes = _read(args.network)
        network = load_network(net_bytes)
        inputs["network"] = network_digest(network)

    specs = []
    for name in names:
        if name == "original":
            specs.append(OriginalSpec(network, args.pseudocount))
        elif name == "expertbayes":
            config = RefinementConfig(
                iterations=args.iterations,
                seed=args.seed,
                positive_state=args.positive,
                threshold=args.threshold,
                pseudocount=args.pseudocount,
            )
            specs.append(ExpertBayesSpec(network, config))
        elif name == "k2":
            specs.append(K2Spec(K2Config(max_parents=args.max_parents), args.pseudocount))
        else:
            specs.append(TanSpec(args.pseudocount))

    plan = make_folds(data, args.folds, args.seed)
    report = cross_validate(
        specs,
        data,
        plan,
        DEFAULT_THRESHOLDS,
        positive_state=args.positive,
        cci_threshold=args.threshold,
    )
    doc = eval_report_document(report, inputs)
    _write(args.out, canonical_json(doc))

    # Plain-text PR table for external plotting.
    print("learner\tthreshold\tprecision\trecall\ttp\tfp\tfn\ttn")
    for lr in report.learners:
        for p in lr.pr_points:
            prec = "" if p.precision is None else f"{p.precision:.6f}"
            print(
                f"{lr.name}\t{p.threshold:g}\t{prec}\t{p.recall:.6f}"
                f"\t{p.tp}\t{p.fp}\t{p.fn}\t{p.tn}"
            )
    for lr in report.learners:
        print(f"macro_cci\t{lr.name}\t{lr.macro_cci:.6f}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.storage_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "refine": cmd_refine,
        "learn": cmd_learn,
        "eval": cmd_eval,
        "serve": cmd_serve,
    }[args.command]
    try:
        return handler(args)
    except ExpertBayesError as e:
        print(f"expertbayes {args.command}: {e}", file=sys.stderr)
        return DATA_ERROR
    except OSError as e:
        print(f"expertbayes {args.command}: {e}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
