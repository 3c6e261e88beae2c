"""Shared fixtures: an in-thread websocket server for socket-level tests."""

from __future__ import annotations

import asyncio
import threading
from dataclasses import dataclass
from pathlib import Path

import pytest

from miboard.core import RulesConfig
from miboard.persistence import load_corpus
from miboard.server import GameServer, serve

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"


@dataclass
class LiveServer:
    """A running websocket server plus the handles tests need."""

    url: str
    server: GameServer
    log_dir: Path


class _ServerThread:
    def __init__(self, rules, corpus, log_dir: Path, seed):
        self.log_dir = log_dir
        self.ready = threading.Event()
        self.url: str = ""
        self.server = GameServer(rules, corpus, log_dir, seed=seed)
        self.loop: asyncio.AbstractEventLoop | None = None
        self.thread = threading.Thread(target=self._run, daemon=True)

    def _run(self) -> None:
        loop = asyncio.new_event_loop()
        self.loop = loop
        asyncio.set_event_loop(loop)
        ws_server = loop.run_until_complete(serve(self.server, port=0))
        port = ws_server.sockets[0].getsockname()[1]
        self.url = f"ws://127.0.0.1:{port}"
        self.ready.set()
        try:
            loop.run_forever()
        finally:
            ws_server.close()
            loop.run_until_complete(ws_server.wait_closed())
            loop.close()

    def start(self) -> LiveServer:
        self.thread.start()
        assert self.ready.wait(timeout=10), "server thread did not come up"
        return LiveServer(url=self.url, server=self.server, log_dir=self.log_dir)

    def stop(self) -> None:
        if self.loop is not None:
            self.loop.call_soon_threadsafe(self.loop.stop)
        self.thread.join(timeout=10)


@pytest.fixture
def live_server_factory(tmp_path):
    """Start seeded websocket servers on ephemeral ports; stopped on teardown."""
    threads: list[_ServerThread] = []
    counter = [0]

    def start(seed=2026, rules: RulesConfig | None = None, corpus=None,
              log_dir: Path | None = None) -> LiveServer:
        counter[0] += 1
        directory = log_dir or tmp_path / f"logs-{counter[0]}"
        directory.mkdir(parents=True, exist_ok=True)
        thread = _ServerThread(
            rules or RulesConfig(),
            corpus if corpus is not None else load_corpus(CORPUS_DIR),
            directory,
            seed,
        )
        threads.append(thread)
        return thread.start()

    yield start
    for thread in threads:
        thread.stop()
