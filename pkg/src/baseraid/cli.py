"""Command-line front door for the headless workflows.

One binary, subcommand style:

    baseraid init-model   create a fresh white/black model pair
    baseraid selfplay     a CC self-play session between two models
    baseraid tutor        a minimax-white vs learning-black session
    baseraid compare      the two-session cross-pairing comparison
    baseraid tournament   memoryless / synthesis / roundrobin tournaments
    baseraid report       render or export stored experiment results
    baseraid serve        run the human-teaching HTTP service

Every command accepts --seed wherever randomness exists and writes its
artifacts under a per-run output directory.  A JSON config file can stand
in for flags (--config run.json); explicitly given flags win on conflict.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .agents import AgentSpec, LeafEval
from .game import Color, GameConfig
from .model import NumericFailureError, TdParams, init_network
from .runner import SessionSpec, derive_seed, run_cc_session
from .store import (
    ExperimentRecord,
    ExperimentStore,
    StoreError,
    find_player_pairs,
    load_model,
    save_model,
)
from .tournament import (
    MODE_MEMORYLESS,
    MODE_ROUND_ROBIN,
    MODE_SYNTHESIS,
    PlayerEntry,
    TournamentSpec,
    compare_players,
    render_report,
    report_to_csv,
    run_memoryless_elimination,
    run_round_robin,
    run_synthesis_elimination,
    summarize,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="run seed")
    parser.add_argument("--config", type=str, default=None, metavar="FILE",
                        help="JSON file of flag values; explicit flags win")


def _add_board(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=8, help="board side length")
    parser.add_argument("--a", type=int, default=2, help="base side length")
    parser.add_argument("--beta", type=int, default=10, help="pawns per player")
    parser.add_argument("--max-plies", type=int, default=1000, help="draw cap in plies")


def _add_learning(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--exploit-prob", type=float, default=0.9,
                        help="probability of the greedy move (the complement "
                             "of the usual exploration rate)")
    parser.add_argument("--learning-rate", type=float, default=0.01, help="TD step size")
    parser.add_argument("--trace-decay", type=float, default=0.5,
                        help="eligibility-trace decay per step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="baseraid",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "init-model",
        help="create a fresh white/black model pair",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    _add_board(p)
    p.add_argument("--scale", type=float, default=0.01, help="init weight half-range")
    p.add_argument("--out", required=True, metavar="PREFIX",
                   help="write PREFIX.white.json and PREFIX.black.json")
    _add_common(p)

    p = sub.add_parser(
        "selfplay",
        help="run a CC self-play session between two models",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--white", required=True, help="white model file")
    p.add_argument("--black", required=True, help="black model file")
    p.add_argument("--games", type=int, default=1000, help="games in the session")
    p.add_argument("--no-learn-white", action="store_true", help="freeze the white net")
    p.add_argument("--no-learn-black", action="store_true", help="freeze the black net")
    p.add_argument("--name", default="player",
                   help="output pair name (<name>.white.json / <name>.black.json)")
    p.add_argument("--out", required=True, help="run output directory")
    p.add_argument("--store", default=None, help="experiment store directory "
                   "(default: <out>/store)")
    p.add_argument("--run-id", default=None, help="record id (default: derived)")
    _add_learning(p)
    _add_common(p)

    p = sub.add_parser(
        "tutor",
        help="minimax white tutor vs the learning black model",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--white", required=True, help="white model file (learns passively)")
    p.add_argument("--black", required=True, help="black model file (learns)")
    p.add_argument("--lookahead", type=int, default=1,
                   help="odd minimax depth (1, 3, 5, 7, 9, ...)")
    p.add_argument("--games", type=int, default=1000, help="games in the session")
    p.add_argument("--material-weight", type=float, default=10.0, help="tutor leaf weight")
    p.add_argument("--progress-weight", type=float, default=1.0, help="tutor leaf weight")
    p.add_argument("--name", default="player",
                   help="output pair name (<name>.white.json / <name>.black.json)")
    p.add_argument("--out", required=True, help="run output directory")
    p.add_argument("--store", default=None, help="experiment store directory")
    p.add_argument("--run-id", default=None, help="record id (default: derived)")
    _add_learning(p)
    _add_common(p)

    p = sub.add_parser(
        "compare",
        help="cross-pair two players over two CC sessions",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--x", required=True, metavar="PREFIX", help="first player prefix")
    p.add_argument("--y", required=True, metavar="PREFIX", help="second player prefix")
    p.add_argument("--games", type=int, default=1000, help="games per session")
    p.add_argument("--evolve", action="store_true",
                   help="also write the match-evolved models")
    p.add_argument("--out", required=True, help="run output directory")
    p.add_argument("--store", default=None, help="experiment store directory")
    p.add_argument("--run-id", default=None, help="record id (default: derived)")
    _add_learning(p)
    _add_common(p)

    p = sub.add_parser(
        "tournament",
        help="run a tournament over a directory of model pairs",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--mode", required=True,
                   choices=[MODE_MEMORYLESS, MODE_SYNTHESIS, MODE_ROUND_ROBIN])
    p.add_argument("--entrants", required=True, metavar="DIR",
                   help="directory of <name>.white.json/<name>.black.json pairs")
    p.add_argument("--games", type=int, default=1000, help="games per session")
    p.add_argument("--parallel", type=int, default=1,
                   help="concurrent matches (memoryless and roundrobin)")
    p.add_argument("--comprehensive-threshold", type=float, default=0.65,
                   help="collective share that flags a comprehensive win")
    p.add_argument("--out", required=True, help="run output directory")
    p.add_argument("--store", default=None, help="experiment store directory")
    p.add_argument("--run-id", default=None, help="record id (default: derived)")
    _add_learning(p)
    _add_common(p)

    p = sub.add_parser(
        "report",
        help="render or export stored experiment results",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--store", required=True, help="experiment store directory")
    p.add_argument("--run-id", default=None, help="only this run")
    p.add_argument("--stage", default=None, help="only this stage kind")
    p.add_argument("--csv", default=None, metavar="FILE", help="also export CSV")
    _add_common(p)

    p = sub.add_parser(
        "serve",
        help="run the human-teaching HTTP service",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8000, help="bind port")
    p.add_argument("--data-dir", default="baseraid-data",
                   help="session and model storage directory")
    p.add_argument("--ui", default=None, metavar="DIR",
                   help="static directory with the browser client")
    _add_common(p)

    return parser


class ConfigFileError(ValueError):
    pass


def _merge_config_file(parser, args, argv) -> argparse.Namespace:
    """Fill unset flags from --config; flags given on the command line win."""
    if getattr(args, "config", None) is None:
        return args
    with open(args.config, encoding="utf-8") as fh:
        values = json.load(fh)
    explicit = set()
    sub = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    subparser = sub.choices[args.command]
    for action in subparser._actions:
        for option in action.option_strings:
            if any(arg == option or arg.startswith(option + "=") for arg in argv):
                explicit.add(action.dest)
    for key, value in values.items():
        dest = key.replace("-", "_")
        if dest not in vars(args):
            raise ConfigFileError(f"config file sets unknown flag {key!r}")
        if dest not in explicit:
            setattr(args, dest, value)
    return args


def _io_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_IO


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _td(args) -> TdParams:
    return TdParams(
        trace_decay=args.trace_decay,
        learning_rate=args.learning_rate,
    )


def _write_session_outputs(args, result, white_path, black_path, stage, inputs):
    """Persist models, reports, and the experiment record for one session."""
    os.makedirs(args.out, exist_ok=True)
    out_ids = []
    for net, path in ((result.white_net, white_path), (result.black_net, black_path)):
        if net is not None:
            out_ids.append(save_model(net, result.spec.config, path, parents=inputs))
    store = ExperimentStore(args.store or os.path.join(args.out, "store"))
    run_id = args.run_id or f"{stage}-{derive_seed(args.seed, result.spec.games):016x}"
    record = ExperimentRecord(
        run_id=run_id,
        stage=stage,
        spec=result.spec.to_dict(),
        games=[r.to_dict() for r in result.records],
        aggregates=result.stats,
        input_models=list(inputs),
        output_models=out_ids,
    )
    store.record(record)
    lines = [
        f"run {run_id}: {result.stats['games']} games",
        f"  white wins {result.stats['white_wins']}"
        f" (avg winner moves {result.stats['avg_winner_moves_white']})",
        f"  black wins {result.stats['black_wins']}"
        f" (avg winner moves {result.stats['avg_winner_moves_black']})",
        f"  draws {result.stats['draws']}",
        f"  aggregates hash {record.aggregates_hash}",
    ]
    text = "\n".join(lines)
    with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_init_model(args) -> int:
    try:
        config = GameConfig(n=args.n, a=args.a, beta=args.beta, max_plies=args.max_plies)
    except ValueError as exc:
        return _usage_error(str(exc))
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    for color, name, tag in ((Color.WHITE, "white", 1), (Color.BLACK, "black", 2)):
        net = init_network(config, color, seed=derive_seed(args.seed, tag), init_weight_scale=args.scale)
        path = f"{args.out}.{name}.json"
        mid = save_model(net, config, path)
        print(f"wrote {path} ({mid[:12]})")
    return EXIT_OK


def _load_pair(prefix: str):
    white = load_model(prefix + ".white.json")
    black = load_model(prefix + ".black.json")
    if white.config != black.config:
        raise StoreError(f"{prefix}: white and black disagree on the board configuration")
    return white, black


def cmd_selfplay(args) -> int:
    white = load_model(args.white)
    black = load_model(args.black)
    if white.config != black.config:
        return _usage_error("the two models use different board configurations")
    spec = SessionSpec(
        config=white.config,
        white=AgentSpec(exploit_prob=args.exploit_prob),
        black=AgentSpec(exploit_prob=args.exploit_prob),
        games=args.games,
        learn_white=not args.no_learn_white,
        learn_black=not args.no_learn_black,
        run_seed=args.seed,
        td=_td(args),
    )
    result = run_cc_session(spec, white.net, black.net)
    return _write_session_outputs(
        args,
        result,
        os.path.join(args.out, f"{args.name}.white.json"),
        os.path.join(args.out, f"{args.name}.black.json"),
        "selfplay",
        [white.id, black.id],
    )


def cmd_tutor(args) -> int:
    if args.lookahead < 1 or args.lookahead % 2 == 0:
        return _usage_error("--lookahead must be an odd depth >= 1")
    white = load_model(args.white)
    black = load_model(args.black)
    if white.config != black.config:
        return _usage_error("the two models use different board configurations")
    spec = SessionSpec(
        config=white.config,
        white=AgentSpec(kind="minimax", lookahead=args.lookahead),
        black=AgentSpec(exploit_prob=args.exploit_prob),
        games=args.games,
        run_seed=args.seed,
        td=_td(args),
        leaf=LeafEval(
            material_weight=args.material_weight, progress_weight=args.progress_weight
        ),
    )
    result = run_cc_session(spec, white.net, black.net)
    return _write_session_outputs(
        args,
        result,
        os.path.join(args.out, f"{args.name}.white.json"),
        os.path.join(args.out, f"{args.name}.black.json"),
        "tutor",
        [white.id, black.id],
    )


def cmd_compare(args) -> int:
    xw, xb = _load_pair(args.x)
    yw, yb = _load_pair(args.y)
    x_name = os.path.basename(args.x)
    y_name = os.path.basename(args.y)
    x = PlayerEntry(x_name, xw.config, xw.net, xb.net)
    y = PlayerEntry(y_name, yw.config, yw.net, yb.net)
    result, evolved = compare_players(
        x, y, games=args.games, seed=args.seed, evolve=args.evolve,
        td=_td(args), agent=AgentSpec(exploit_prob=args.exploit_prob),
    )
    os.makedirs(args.out, exist_ok=True)
    rows = summarize([result])
    text = render_report(rows)
    print(text)
    print(f"winner: {result.winner_id or 'tie'}")
    with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(text + f"\nwinner: {result.winner_id or 'tie'}\n")
    with open(os.path.join(args.out, "report.csv"), "w", encoding="utf-8") as fh:
        fh.write(report_to_csv(rows))
    out_ids = []
    if evolved is not None:
        for entry in evolved.values():
            for net, name in ((entry.white_net, "white"), (entry.black_net, "black")):
                out_ids.append(
                    save_model(
                        net, entry.config,
                        os.path.join(args.out, f"{entry.id}.{name}.json"),
                    )
                )
    store = ExperimentStore(args.store or os.path.join(args.out, "store"))
    run_id = args.run_id or f"compare-{derive_seed(args.seed, args.games):016x}"
    store.record(
        ExperimentRecord(
            run_id=run_id,
            stage="compare",
            spec={
                "x": x_name, "y": y_name, "games": args.games, "seed": args.seed,
                "evolve": bool(args.evolve),
            },
            games=[],
            aggregates=result.to_dict(),
            input_models=[xw.id, xb.id, yw.id, yb.id],
            output_models=out_ids,
        )
    )
    return EXIT_OK


def cmd_tournament(args) -> int:
    pairs = find_player_pairs(args.entrants)
    if len(pairs) < 2:
        return _usage_error(
            f"need at least two complete model pairs in {args.entrants!r}, found {len(pairs)}"
        )
    entries = []
    for name, paths in pairs.items():
        white = load_model(paths["white"])
        black = load_model(paths["black"])
        entries.append(PlayerEntry(name, white.config, white.net, black.net))
    spec = TournamentSpec(
        mode=args.mode,
        entrants=tuple(entries),
        games_per_session=args.games,
        seed=args.seed,
        td=_td(args),
        agent=AgentSpec(exploit_prob=args.exploit_prob),
        comprehensive_threshold=args.comprehensive_threshold,
    )
    os.makedirs(args.out, exist_ok=True)
    state_dir = os.path.join(args.out, "bracket")
    if args.mode == MODE_ROUND_ROBIN:
        rr = run_round_robin(spec, parallel=args.parallel)
        matches = rr.matches
        standings_rows = [r.to_dict() for r in rr.standings]
        with open(os.path.join(args.out, "standings.json"), "w", encoding="utf-8") as fh:
            json.dump(standings_rows, fh, indent=1)
        print("standings:")
        for row in rr.standings:
            print(f"  {row.id}: {row.match_wins} match wins, "
                  f"{row.collective_wins} collective game wins")
        champion = None
        aggregates = {"standings": standings_rows}
    else:
        runner = (
            run_memoryless_elimination if args.mode == MODE_MEMORYLESS
            else run_synthesis_elimination
        )
        result = runner(spec, state_dir=state_dir, parallel=args.parallel)
        matches = [m.result for m in result.matches]
        champion = result.champion
        for name, net in (("white", champion.white_net), ("black", champion.black_net)):
            save_model(
                net, champion.config,
                os.path.join(args.out, f"champion_{champion.id}.{name}.json"),
            )
        print(f"champion: {champion.id}")
        aggregates = {
            "champion": champion.id,
            "byes": result.byes,
            "rounds": [[m.to_dict() for m in rnd] for rnd in result.rounds],
        }
    rows = summarize(matches, comprehensive_threshold=args.comprehensive_threshold)
    text = render_report(rows)
    print(text)
    with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    with open(os.path.join(args.out, "report.csv"), "w", encoding="utf-8") as fh:
        fh.write(report_to_csv(rows))
    store = ExperimentStore(args.store or os.path.join(args.out, "store"))
    run_id = args.run_id or f"tournament-{derive_seed(args.seed, len(entries)):016x}"
    store.record(
        ExperimentRecord(
            run_id=run_id,
            stage="tournament",
            spec={
                "mode": args.mode,
                "entrants": sorted(pairs),
                "games_per_session": args.games,
                "seed": args.seed,
            },
            games=[],
            aggregates=aggregates,
        )
    )
    return EXIT_OK


def cmd_report(args) -> int:
    store = ExperimentStore(args.store)
    records = store.query(run_id=args.run_id, stage=args.stage)
    if not records:
        print("no matching records")
        return EXIT_OK
    lines = []
    for record in records:
        lines.append(f"run {record.run_id} [{record.stage}] finished {record.finished_at}")
        for key, value in sorted(record.aggregates.items()):
            if isinstance(value, (int, float, str)) or value is None:
                lines.append(f"  {key}: {value}")
        lines.append(f"  spec hash {record.spec_hash}")
        lines.append(f"  aggregates hash {record.aggregates_hash}")
    print("\n".join(lines))
    if args.csv:
        import csv as _csv

        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["run_id", "stage", "key", "value"])
            for record in records:
                for key, value in sorted(record.aggregates.items()):
                    if isinstance(value, (int, float, str)) or value is None:
                        writer.writerow([record.run_id, record.stage, key, value])
        print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, ui_dir=args.ui, default_seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


COMMANDS = {
    "init-model": cmd_init_model,
    "selfplay": cmd_selfplay,
    "tutor": cmd_tutor,
    "compare": cmd_compare,
    "tournament": cmd_tournament,
    "report": cmd_report,
    "serve": cmd_serve,
}


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config_file(parser, args, argv)
        return COMMANDS[args.command](args)
    except ConfigFileError as exc:
        return _usage_error(str(exc))
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FileNotFoundError as exc:
        return _io_error(str(exc))
    except OSError as exc:
        return _io_error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
