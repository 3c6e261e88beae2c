"""Command line entry points: run a server, run scripted bots, export logs.

Installed as ``miboard-server``, ``miboard-bots``, and ``miboard-export``.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bots import ScenarioError, run_scenario
from .core import RulesConfig
from .errors import MiBoardError
from .persistence import export_csv, load_corpus
from .server import GameServer, serve

log = logging.getLogger("miboard")


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


def _load_rules(path: Optional[str]) -> RulesConfig:
    if path is None:
        return RulesConfig()
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return RulesConfig.from_dict(data)


# -- miboard-server -----------------------------------------------------------


def server_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="miboard-server",
        description="Run the game server on a websocket port.",
    )
    parser.add_argument(
        "--host", default=os.environ.get("MIBOARD_HOST", "127.0.0.1"),
        help="interface to bind (default 127.0.0.1, env MIBOARD_HOST)",
    )
    parser.add_argument(
        "--port", type=int,
        default=int(os.environ.get("MIBOARD_PORT", "8765")),
        help="port to listen on (default 8765, env MIBOARD_PORT)",
    )
    parser.add_argument(
        "--corpus", default=os.environ.get("MIBOARD_CORPUS", "corpus"),
        help="text corpus: a JSON file or a directory of them "
             "(default ./corpus, env MIBOARD_CORPUS)",
    )
    parser.add_argument(
        "--log-dir", default=os.environ.get("MIBOARD_LOG_DIR", "game-logs"),
        help="directory for per-game event logs "
             "(default ./game-logs, env MIBOARD_LOG_DIR)",
    )
    parser.add_argument(
        "--config", default=None,
        help="JSON file of rule overrides (same keys as the config "
             "broadcast in game_started)",
    )
    parser.add_argument(
        "--seed", type=int, default=None,
        help="seed the server for reproducible games; also enables the "
             "virtual clock and the clock_advance test command",
    )
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    try:
        rules = _load_rules(args.config)
        corpus = load_corpus(args.corpus)
    except (OSError, json.JSONDecodeError, MiBoardError) as exc:
        print(f"miboard-server: {exc}", file=sys.stderr)
        return 2

    log_dir = Path(args.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    server = GameServer(rules, corpus, log_dir, seed=args.seed)

    async def main() -> None:
        ws_server = await serve(server, host=args.host, port=args.port)
        mode = f"seeded ({args.seed}, virtual clock)" if args.seed is not None \
            else "wall clock"
        log.info(
            "listening on ws://%s:%d | %d texts | logs in %s | %s",
            args.host, args.port, len(corpus), log_dir, mode,
        )
        await ws_server.serve_forever()

    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        log.info("shutting down")
    return 0


# -- miboard-bots -------------------------------------------------------------


def bots_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="miboard-bots",
        description="Run a scripted table of bot players against a server.",
    )
    parser.add_argument(
        "--server", required=True, help="server URL, e.g. ws://127.0.0.1:8765"
    )
    parser.add_argument(
        "--script", required=True,
        help="scenario script: JSON with a 'bots' list of {name, policy}",
    )
    parser.add_argument(
        "--seed", type=int, required=True,
        help="seed for bot-side choices (phrasing); the game's randomness "
             "is the server's",
    )
    parser.add_argument(
        "--out", required=True,
        help="directory for per-bot JSONL transcripts",
    )
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)

    try:
        result = run_scenario(args.script, args.server, args.seed, args.out)
    except ScenarioError as exc:
        print(f"miboard-bots: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"miboard-bots: {exc}", file=sys.stderr)
        return 2

    summary = {
        "game_id": result.game_id,
        "players": result.players,
        "winner": result.winner,
        "totals": result.totals,
        "turns": result.turns,
        "aborted": result.aborted,
        "first_outcomes": result.first_outcomes,
        "transcripts": [str(p) for p in result.transcripts],
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


# -- miboard-export -----------------------------------------------------------


def export_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="miboard-export",
        description="Flatten a game's event log into a CSV for analysis.",
    )
    parser.add_argument("--log", required=True, help="event log (JSONL) to read")
    parser.add_argument("--csv", required=True, help="CSV file to write")
    args = parser.parse_args(argv)

    try:
        rows = export_csv(args.log, args.csv)
    except (OSError, MiBoardError) as exc:
        print(f"miboard-export: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {rows} rows to {args.csv}")
    return 0
