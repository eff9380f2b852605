"""Command-line entry points: regret experiments, estimator benchmark,
and the live session service.

Failures exit nonzero and print a single JSON object {"error": ...} to
stderr so callers can parse them.
"""

import argparse
import json
import sys


def _cmd_bench(args):
    from prefbo.harness import ExperimentConfig, run_regret_experiment

    with open(args.config) as fh:
        cfg = ExperimentConfig.from_json(fh.read())
    run_regret_experiment(cfg, workers=args.workers, out_dir=args.out)
    return 0


def _cmd_estimators(args):
    from prefbo.harness import run_estimator_benchmark

    run_estimator_benchmark(args.function, dimension=args.dim,
                            n_duels=args.duels, trials=args.trials,
                            seed_base=args.seed,
                            out_dir=args.out or "results")
    return 0


def _cmd_serve(args):
    import uvicorn

    from prefbo.service import create_app

    app = create_app(session_dir=args.session_dir, seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="prefbo",
        description="Preferential Bayesian optimization from pairwise duels")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a regret experiment grid")
    bench.add_argument("--config", required=True, help="experiment JSON file")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--out", default=None, help="output directory")
    bench.set_defaults(func=_cmd_bench)

    est = sub.add_parser("estimators",
                         help="estimator accuracy benchmark (CSV output)")
    est.add_argument("--function", required=True)
    est.add_argument("--dim", type=int, default=None)
    est.add_argument("--duels", type=int, default=50)
    est.add_argument("--trials", type=int, default=10)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--out", default=None)
    est.set_defaults(func=_cmd_estimators)

    serve = sub.add_parser("serve", help="run the duel session service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--session-dir", default=None,
                       help="directory for per-session JSONL logs")
    serve.add_argument("--seed", type=int, default=None)
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": str(exc),
                          "type": type(exc).__name__}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
