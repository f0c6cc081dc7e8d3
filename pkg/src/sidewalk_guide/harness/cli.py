"""Command-line entry points: train, evaluate, replay, serve."""

from __future__ import annotations

import argparse
import sys


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="sidewalk-guide")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train an obstacle-avoidance agent")
    p_train.add_argument("--algo", required=True,
                         choices=["qlearning", "sarsa", "dqn", "reinforce"])
    p_train.add_argument("--scenario", required=True)
    p_train.add_argument("--episodes", type=int, required=True)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", required=True)
    p_train.add_argument("--record", help="write an episode log for replay")

    p_eval = sub.add_parser("evaluate", help="run a frozen policy and measure detections")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--scenario", required=True)
    p_eval.add_argument("--episodes", type=int, required=True)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", required=True)
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.add_argument("--record", help="write an episode log for replay")

    p_replay = sub.add_parser("replay", help="re-simulate a recorded episode log")
    p_replay.add_argument("--log", required=True)

    p_serve = sub.add_parser("serve", help="run the interactive session gateway")
    p_serve.add_argument("--scenarios", required=True, help="directory of scenario files")
    p_serve.add_argument("--nlu", required=True)
    p_serve.add_argument("--domain", required=True)
    p_serve.add_argument("--checkpoint", default=None)
    p_serve.add_argument("--listen", default="127.0.0.1:8750")
    p_serve.add_argument("--log", required=True, help="analytics event log path")

    args = parser.parse_args(argv)
    if args.command == "train":
        return _cmd_train(args)
    if args.command == "evaluate":
        return _cmd_evaluate(args)
    if args.command == "replay":
        return _cmd_replay(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return 2


def _cmd_train(args) -> int:
    from .train import train
    _, curve, records = train(args.algo, args.scenario, args.episodes, args.seed,
                              out_dir=args.out, record_path=args.record)
    last = curve.returns[-min(50, len(curve.returns)):]
    mean_last = sum(last) / len(last)
    print(f"trained {args.algo}: {args.episodes} episodes, "
          f"mean return (last {len(last)}) = {mean_last:.1f}")
    print(f"outputs in {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    from .evaluate import evaluate
    result = evaluate(args.checkpoint, args.scenario, args.episodes, args.seed,
                      out_dir=args.out, workers=args.workers, record_path=args.record)
    for kind in sorted(result.detection_pct):
        print(f"{kind}: {result.detection_pct[kind]:.1f}%")
    for kind in result.absent_kinds:
        print(f"{kind}: not-present")
    print(f"table average: {result.table_average:.2f}%  "
          f"goal rate: {100 * result.goal_rate:.1f}%")
    return 0


def _cmd_replay(args) -> int:
    from .replay import LogParseError, ReplayDivergence, replay
    try:
        report = replay(args.log)
    except (LogParseError, ReplayDivergence) as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 1
    print(f"replay ok: {report.episodes} episodes, {report.steps} steps verified")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from ..gateway.app import make_app
    from ..gateway.core import Gateway, GatewayConfig

    host, _, port = args.listen.rpartition(":")
    gateway = Gateway(GatewayConfig(
        scenarios_dir=args.scenarios,
        nlu_path=args.nlu,
        domain_path=args.domain,
        checkpoint_path=args.checkpoint,
        analytics_log=args.log,
    ))
    app = make_app(gateway)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
