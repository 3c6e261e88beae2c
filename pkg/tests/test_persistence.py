"""Corpus loading, event logging, verified replay, and CSV export."""

from __future__ import annotations

import csv
import json
import random
from pathlib import Path

import pytest

from miboard.core import RulesConfig, Strategy, new_game, state_hash
from miboard.errors import CorruptLog, EmptyCorpus, HashMismatch, SchemaError
from miboard.persistence import (
    CSV_COLUMNS,
    GAME_ABORTED,
    GAME_STARTED,
    CorpusEntry,
    EventLog,
    EventRecord,
    encode_record,
    export_csv,
    game_started_record,
    load_corpus,
    pick_random_text,
    read_log,
    replay,
    replay_file,
)

from driver import play_random_game
from helpers import make_text

SHIPPED_CORPUS = Path(__file__).resolve().parent.parent / "corpus"


# -- corpus loading ------------------------------------------------------


def test_shipped_corpus_loads():
    entries = load_corpus(SHIPPED_CORPUS)
    assert len(entries) == 4
    ids = [e.text.id for e in entries]
    assert ids == sorted(ids)
    assert "water-ph" in ids
    for entry in entries:
        entry.text.validate()
        assert entry.source.endswith(".json")


def test_load_single_file():
    entries = load_corpus(SHIPPED_CORPUS / "water-ph.json")
    assert len(entries) == 1
    assert len(entries[0].text.sentences) == 4
    assert entries[0].text.targets == (2, 3, 4)
    assert entries[0].text.sentences[0].startswith("Water quality")


def test_every_entry_has_all_six_taxonomies():
    for entry in load_corpus(SHIPPED_CORPUS):
        effective = entry.effective_taxonomies()
        assert set(effective) == set(Strategy)
        for reasons in effective.values():
            assert reasons


def _write(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


def _valid_doc(text_id="t1"):
    return {
        "id": text_id,
        "title": "T",
        "sentences": ["One.", "Two.", "Three.", "Four."],
        "targets": [2, 4],
    }


def test_target_beyond_sentences_rejected(tmp_path):
    doc = _valid_doc()
    doc["targets"] = [5]
    path = _write(tmp_path / "bad.json", doc)
    with pytest.raises(SchemaError) as exc:
        load_corpus(tmp_path)
    assert "bad.json" in exc.value.source


def test_non_increasing_targets_rejected(tmp_path):
    doc = _valid_doc()
    doc["targets"] = [3, 3]
    _write(tmp_path / "bad.json", doc)
    with pytest.raises(SchemaError):
        load_corpus(tmp_path)


def test_invalid_json_names_file_and_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"id": "x",\n  "sentences": [', encoding="utf-8")
    with pytest.raises(SchemaError) as exc:
        load_corpus(tmp_path)
    assert "broken.json" in exc.value.source
    assert "line" in exc.value.reason


def test_missing_required_field_rejected(tmp_path):
    doc = _valid_doc()
    del doc["targets"]
    _write(tmp_path / "bad.json", doc)
    with pytest.raises(SchemaError) as exc:
        load_corpus(tmp_path)
    assert "targets" in exc.value.reason


def test_duplicate_ids_rejected(tmp_path):
    _write(tmp_path / "a.json", _valid_doc("same"))
    _write(tmp_path / "b.json", _valid_doc("same"))
    with pytest.raises(SchemaError) as exc:
        load_corpus(tmp_path)
    assert "same" in exc.value.reason


def test_empty_directory_rejected(tmp_path):
    with pytest.raises(EmptyCorpus):
        load_corpus(tmp_path)


def test_taxonomy_override_parsed(tmp_path):
    doc = _valid_doc()
    doc["taxonomies"] = {"bridging": ["custom_reason"]}
    _write(tmp_path / "t.json", doc)
    entries = load_corpus(tmp_path)
    assert entries[0].taxonomies[Strategy.BRIDGING] == ("custom_reason", "other")
    rules = entries[0].rules_for(RulesConfig())
    assert rules.reasons_for(Strategy.BRIDGING) == ("custom_reason", "other")
    assert rules.reasons_for(Strategy.PREDICTION) == RulesConfig().reasons_for(
        Strategy.PREDICTION
    )


def test_duplicate_reasons_rejected(tmp_path):
    doc = _valid_doc()
    doc["taxonomies"] = {"bridging": ["same", "same"]}
    _write(tmp_path / "t.json", doc)
    with pytest.raises(SchemaError):
        load_corpus(tmp_path)


def test_unknown_taxonomy_strategy_rejected(tmp_path):
    doc = _valid_doc()
    doc["taxonomies"] = {"telepathy": ["read_minds"]}
    _write(tmp_path / "t.json", doc)
    with pytest.raises(SchemaError):
        load_corpus(tmp_path)


def test_pick_random_text_deterministic_and_uniform():
    entries = load_corpus(SHIPPED_CORPUS)
    picks_a = [pick_random_text(entries, random.Random(99)).text.id for _ in range(1)]
    picks_b = [pick_random_text(entries, random.Random(99)).text.id for _ in range(1)]
    assert picks_a == picks_b
    rng = random.Random(7)
    counts = {e.text.id: 0 for e in entries}
    for _ in range(4000):
        counts[pick_random_text(entries, rng).text.id] += 1
    for n in counts.values():
        assert 800 < n < 1200  # E = 1000 per text


def test_pick_from_empty_rejected():
    with pytest.raises(EmptyCorpus):
        pick_random_text([], random.Random(0))


# -- event records and log files -------------------------------------------


def _sample_record(seq=1, code=GAME_STARTED, payload=None, h="ab" * 8) -> EventRecord:
    return EventRecord(
        seq=seq,
        wall_time=12.5,
        game_id="game-1",
        room_id="default-room-1",
        actor="server",
        code=code,
        payload=payload or {},
        post_state_hash=h,
    )


def test_record_round_trip():
    record = _sample_record(payload={"x": [1, 2], "y": None})
    again = EventRecord.from_dict(json.loads(encode_record(record)))
    assert again == record


def test_log_appends_dense_sequence(tmp_path):
    path = tmp_path / "g.log"
    with EventLog(path) as log:
        assert log.next_seq == 1
        log.append(_sample_record(seq=1))
        log.append(_sample_record(seq=2, code="roll_dice"))
        with pytest.raises(CorruptLog):
            log.append(_sample_record(seq=5, code="roll_dice"))
    records = read_log(path)
    assert [r.seq for r in records] == [1, 2]
    assert records[0].wall_time == 12.5


def test_read_log_reports_bad_line(tmp_path):
    path = tmp_path / "g.log"
    path.write_text(
        encode_record(_sample_record(seq=1)) + "\n" + "{not json}\n",
        encoding="utf-8",
    )
    with pytest.raises(CorruptLog) as exc:
        read_log(path)
    assert exc.value.seq == 2


# -- replay ------------------------------------------------------------------


def _game_log_records(seed: int, n: int = 3) -> tuple[list[EventRecord], str]:
    """Play a full random game and wrap it as a log record sequence.

    Returns (records, final state hash)."""
    players = [(f"p{i+1}", f"Bot{i+1}") for i in range(n)]
    initial = new_game(players, make_text(), RulesConfig(), seed)
    opener = game_started_record(
        initial, room_id="default-room-1", wall_time=0.0, player_names=dict(players)
    )
    final_state, commands, hashes = play_random_game(seed, n=n)
    records = [opener]
    for i, ((actor, code, payload), post_hash) in enumerate(zip(commands, hashes)):
        records.append(
            EventRecord(
                seq=i + 2,
                wall_time=float(i + 1),
                game_id=initial.game_id,
                room_id="default-room-1",
                actor=actor,
                code=code,
                payload=payload,
                post_state_hash=post_hash,
            )
        )
    return records, state_hash(final_state)


@pytest.mark.parametrize("seed", [3, 44, 2026])
def test_replay_reproduces_final_state(seed, tmp_path):
    records, final_hash = _game_log_records(seed)
    path = tmp_path / "g.log"
    with EventLog(path) as log:
        for record in records:
            log.append(record)
    replayed = replay_file(path)
    assert state_hash(replayed) == final_hash
    assert replayed.winner is not None


def test_replay_four_players(tmp_path):
    records, final_hash = _game_log_records(17, n=4)
    assert state_hash(replay(records)) == final_hash


def test_replay_detects_tampered_hash():
    records, _ = _game_log_records(5)
    victim = len(records) // 2
    broken = records[victim]
    records[victim] = EventRecord(
        seq=broken.seq,
        wall_time=broken.wall_time,
        game_id=broken.game_id,
        room_id=broken.room_id,
        actor=broken.actor,
        code=broken.code,
        payload=broken.payload,
        post_state_hash="0" * 16,
    )
    with pytest.raises(HashMismatch) as exc:
        replay(records)
    assert exc.value.seq == broken.seq
    assert exc.value.expected == "0" * 16


def test_replay_detects_tampered_payload():
    records, _ = _game_log_records(5)
    index = next(i for i, r in enumerate(records) if r.code == "submit_se")
    victim = records[index]
    tampered = dict(victim.payload)
    tampered["text"] = victim.payload["text"] + " (edited)"
    records[index] = EventRecord(
        seq=victim.seq,
        wall_time=victim.wall_time,
        game_id=victim.game_id,
        room_id=victim.room_id,
        actor=victim.actor,
        code=victim.code,
        payload=tampered,
        post_state_hash=victim.post_state_hash,
    )
    with pytest.raises(HashMismatch) as exc:
        replay(records)
    assert exc.value.seq == victim.seq


def test_replay_requires_opening_record():
    records, _ = _game_log_records(5)
    with pytest.raises(CorruptLog):
        replay(records[1:])


def test_replay_rejects_empty_log(tmp_path):
    path = tmp_path / "empty.log"
    path.write_text("", encoding="utf-8")
    with pytest.raises(CorruptLog) as exc:
        replay_file(path)
    assert exc.value.seq == 0


def test_replay_rejects_sequence_gap():
    records, _ = _game_log_records(5)
    with pytest.raises(CorruptLog) as exc:
        replay(records[:3] + records[4:])
    assert exc.value.seq == records[4].seq


def test_replay_of_opening_record_alone_is_initial_state():
    records, _ = _game_log_records(5)
    replayed = replay(records[:1])
    assert state_hash(replayed) == records[0].post_state_hash
    assert replayed.turn_number == 1
    assert all(p.score == 0 for p in replayed.players)


def test_log_bytes_are_append_only(tmp_path):
    records, _ = _game_log_records(9)
    path = tmp_path / "g.log"
    cut = len(records) // 2
    with EventLog(path) as log:
        for record in records[:cut]:
            log.append(record)
    prefix = path.read_bytes()
    with EventLog(path) as log:
        assert log.next_seq == records[cut].seq
        for record in records[cut:]:
            log.append(record)
    assert path.read_bytes()[: len(prefix)] == prefix
    assert state_hash(replay_file(path)) == records[-1].post_state_hash


def test_replay_stops_at_abort():
    records, _ = _game_log_records(5)
    cut = len(records) // 2
    head = records[:cut]
    abort = EventRecord(
        seq=head[-1].seq + 1,
        wall_time=99.0,
        game_id=head[0].game_id,
        room_id=head[0].room_id,
        actor="server",
        code=GAME_ABORTED,
        payload={"reason": "player_left", "player": "p2"},
        post_state_hash=head[-1].post_state_hash,
    )
    replayed = replay(head + [abort])
    assert state_hash(replayed) == head[-1].post_state_hash


# -- CSV export -----------------------------------------------------------


def test_export_csv_round_trips_every_record(tmp_path):
    records, _ = _game_log_records(11)
    log_path = tmp_path / "g.log"
    with EventLog(log_path) as log:
        for record in records:
            log.append(record)
    csv_path = tmp_path / "g.csv"
    written = export_csv(log_path, csv_path)
    assert written == len(records)

    with open(csv_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == len(records) + 1
    for row, record in zip(rows[1:], records):
        assert int(row[0]) == record.seq
        assert row[5] == record.code
        assert json.loads(row[6]) == record.payload
        assert row[7] == record.post_state_hash
