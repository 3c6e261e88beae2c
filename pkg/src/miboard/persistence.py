"""Corpus loading and append-only event logging with verified replay.

Every applied game command becomes one JSON line in ``<game_id>.log``.
The first record of a log is a synthetic ``game_started`` record embedding
the players, seed, config, and full text, which makes a log file fully
self-contained: replay needs nothing but the file and the rules engine.

Each record carries the hash of the state *after* its command. Replay
re-applies the commands from the embedded seed and compares hashes record
by record, so the first divergence is pinpointed by sequence number.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from .core import (
    DEFAULT_TAXONOMIES,
    REASON_OTHER,
    GameState,
    RulesConfig,
    Strategy,
    TextDocument,
    apply_command,
    new_game,
    parse_taxonomies,
    state_hash,
)
from .errors import (
    CorruptLog,
    EmptyCorpus,
    HashMismatch,
    MiBoardError,
    SchemaError,
)

GAME_STARTED = "game_started"
GAME_ABORTED = "game_aborted"

#: Log records that frame the game rather than drive the rules engine.
_MARKER_CODES = frozenset({GAME_STARTED, GAME_ABORTED})


# -- corpus ------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusEntry:
    """One practice text plus its optional taxonomy overrides."""

    text: TextDocument
    taxonomies: dict[Strategy, tuple[str, ...]] = field(default_factory=dict)
    source: str = "<memory>"
    provenance: dict[str, Any] = field(default_factory=dict)

    def effective_taxonomies(self) -> dict[Strategy, tuple[str, ...]]:
        """Per-strategy reason lists with defaults filled in, so every
        strategy always has a taxonomy regardless of what the file set."""
        merged = dict(DEFAULT_TAXONOMIES)
        merged.update(self.taxonomies)
        return merged

    def rules_for(self, base: RulesConfig) -> RulesConfig:
        """The rules a game on this text should run under."""
        if not self.taxonomies:
            return base
        return base.with_taxonomies(self.taxonomies)


def _parse_corpus_file(path: Path) -> CorpusEntry:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    except OSError as exc:
        raise SchemaError(str(path), f"unreadable: {exc}") from None
    if not isinstance(raw, dict):
        raise SchemaError(str(path), "top level must be an object")
    for key in ("id", "sentences", "targets"):
        if key not in raw:
            raise SchemaError(str(path), f"missing required field {key!r}")
    try:
        text = TextDocument.from_dict(raw)
        text.validate()
    except MiBoardError as exc:
        raise SchemaError(str(path), str(exc)) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(str(path), f"bad text fields: {exc}") from None
    taxonomies: dict[Strategy, tuple[str, ...]] = {}
    if "taxonomies" in raw:
        if not isinstance(raw["taxonomies"], dict):
            raise SchemaError(str(path), "taxonomies must be an object")
        try:
            taxonomies = parse_taxonomies(raw["taxonomies"])
        except SchemaError as exc:
            raise SchemaError(str(path), exc.reason) from None
        for strategy, reasons in taxonomies.items():
            if len(set(reasons)) != len(reasons):
                raise SchemaError(
                    str(path), f"duplicate reasons for {strategy.value}"
                )
            if REASON_OTHER not in reasons:
                taxonomies[strategy] = reasons + (REASON_OTHER,)
    provenance = raw.get("provenance", {})
    if not isinstance(provenance, dict):
        raise SchemaError(str(path), "provenance must be an object")
    return CorpusEntry(
        text=text, taxonomies=taxonomies, source=str(path), provenance=provenance
    )


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    """Load every ``*.json`` text under ``path`` (a directory or a single
    file). Invalid entries raise SchemaError naming the offending file;
    an empty corpus raises EmptyCorpus. Entries are returned sorted by
    text id so random picks are reproducible across hosts."""
    root = Path(path)
    if root.is_file():
        files = [root]
    else:
        files = sorted(root.glob("*.json"))
    entries = [_parse_corpus_file(f) for f in files]
    if not entries:
        raise EmptyCorpus(str(path))
    ids = [e.text.id for e in entries]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise SchemaError(str(path), f"duplicate text id(s): {dupes}")
    return sorted(entries, key=lambda e: e.text.id)


def pick_random_text(corpus: list[CorpusEntry], rng: random.Random) -> CorpusEntry:
    """Uniform pick over the corpus using the caller's seeded stream."""
    if not corpus:
        raise EmptyCorpus("no entries to pick from")
    return corpus[rng.randrange(len(corpus))]


# -- event records --------------------------------------------------------

@dataclass(frozen=True)
class EventRecord:
    seq: int
    wall_time: float
    game_id: str
    room_id: str
    actor: str
    code: str
    payload: dict[str, Any]
    post_state_hash: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "wall_time": self.wall_time,
            "game_id": self.game_id,
            "room_id": self.room_id,
            "actor": self.actor,
            "code": self.code,
            "payload": self.payload,
            "post_state_hash": self.post_state_hash,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EventRecord":
        return cls(
            seq=int(d["seq"]),
            wall_time=float(d["wall_time"]),
            game_id=str(d["game_id"]),
            room_id=str(d["room_id"]),
            actor=str(d["actor"]),
            code=str(d["code"]),
            payload=dict(d["payload"]),
            post_state_hash=str(d["post_state_hash"]),
        )


def encode_record(record: EventRecord) -> str:
    return json.dumps(record.to_dict(), sort_keys=True, separators=(",", ":"))


class EventLog:
    """Append-only writer for one game's records.

    The hosting layer appends a record *before* broadcasting the frames it
    describes (write-ahead ordering), so a crash can lose an outbound
    frame but never an applied command."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        existing = read_log(self.path) if self.path.exists() else []
        self._fh = open(self.path, "a", encoding="utf-8")
        self._next_seq = existing[-1].seq + 1 if existing else 1

    @property
    def next_seq(self) -> int:
        return self._next_seq

    def append(self, record: EventRecord) -> None:
        if record.seq != self._next_seq:
            raise CorruptLog(record.seq, f"expected seq {self._next_seq}")
        self._fh.write(encode_record(record) + "\n")
        self._fh.flush()
        self._next_seq += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def game_started_record(
    state: GameState,
    room_id: str,
    wall_time: float,
    player_names: dict[str, str],
) -> EventRecord:
    """The self-contained opening record embedding everything replay needs."""
    return EventRecord(
        seq=1,
        wall_time=wall_time,
        game_id=state.game_id,
        room_id=room_id,
        actor="server",
        code=GAME_STARTED,
        payload={
            "players": [[p.id, player_names.get(p.id, p.name)] for p in state.players],
            "seed": state.seed,
            "config": state.config.to_dict(),
            "text": state.text.to_dict(),
        },
        post_state_hash=state_hash(state),
    )


def read_log(path: str | Path) -> list[EventRecord]:
    """Parse a log file into records; bad lines raise CorruptLog with the
    failing sequence position (1-based line number)."""
    records: list[EventRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                record = EventRecord.from_dict(obj)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorruptLog(lineno, f"unparseable record: {exc}") from None
            records.append(record)
    return records


def replay(records: Iterable[EventRecord]) -> GameState:
    """Fold a record sequence through the rules engine, verifying the
    post-state hash of every record. Returns the final state."""
    it = iter(records)
    try:
        head = next(it)
    except StopIteration:
        raise CorruptLog(0, "empty log") from None
    if head.code != GAME_STARTED:
        raise CorruptLog(head.seq, f"log must open with {GAME_STARTED}, got {head.code}")
    try:
        players = [(str(pid), str(name)) for pid, name in head.payload["players"]]
        config = RulesConfig.from_dict(head.payload["config"])
        text = TextDocument.from_dict(head.payload["text"])
        seed = int(head.payload["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptLog(head.seq, f"bad {GAME_STARTED} payload: {exc}") from None
    state = new_game(players, text, config, seed, game_id=head.game_id)
    actual = state_hash(state)
    if actual != head.post_state_hash:
        raise HashMismatch(head.seq, head.post_state_hash, actual)

    expected_seq = head.seq
    for record in it:
        expected_seq += 1
        if record.seq != expected_seq:
            raise CorruptLog(record.seq, f"sequence gap: expected {expected_seq}")
        if record.code == GAME_ABORTED:
            break
        try:
            apply_command(state, record.actor, record.code, record.payload)
        except MiBoardError as exc:
            raise CorruptLog(record.seq, f"command failed on replay: {exc}") from None
        actual = state_hash(state)
        if actual != record.post_state_hash:
            raise HashMismatch(record.seq, record.post_state_hash, actual)
    return state


def replay_file(path: str | Path) -> GameState:
    return replay(read_log(path))


# -- export ------------------------------------------------------------------

CSV_COLUMNS = (
    "seq",
    "wall_time",
    "game_id",
    "room_id",
    "actor",
    "code",
    "payload",
    "post_state_hash",
)


def export_csv(log_path: str | Path, csv_path: str | Path) -> int:
    """Flatten a log into one CSV row per record (payload as compact JSON).
    Returns the number of rows written."""
    records = read_log(log_path)
    out = Path(csv_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(
                (
                    r.seq,
                    r.wall_time,
                    r.game_id,
                    r.room_id,
                    r.actor,
                    r.code,
                    json.dumps(r.payload, sort_keys=True, separators=(",", ":")),
                    r.post_state_hash,
                )
            )
    return len(records)
