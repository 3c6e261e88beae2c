"""Room placement, start gating, leave policy, and the concurrency
properties of one zone."""

from __future__ import annotations

import random
import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

from miboard.errors import (
    AlreadyInRoom,
    AlreadyStarted,
    NoSuchRoom,
    NotEnoughPlayers,
    NotMember,
)
from miboard.matchmaking import Matchmaker, Zone


def fake_game_factory(members):
    return {"players": [m.session_id for m in members]}


class TestAutoJoin:
    def test_empty_zone_creates_room(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "Ada")
        assert room.member_ids() == ["s1"]
        assert len(zone.rooms()) == 1

    def test_joins_first_open_room(self):
        zone = Zone("z")
        first = zone.auto_join("s1", "Ada")
        zone.auto_join("s2", "Ben")
        joined = zone.auto_join("s3", "Cam")
        assert joined.room_id == first.room_id
        assert joined.member_ids() == ["s1", "s2", "s3"]

    def test_started_room_skipped(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "Ada")
        zone.auto_join("s2", "Ben")
        zone.auto_join("s3", "Cam")
        zone.start_game(room.room_id, "s1", fake_game_factory)
        other = zone.auto_join("s4", "Dee")
        assert other.room_id != room.room_id
        assert len(zone.room(room.room_id).members) == 3

    def test_full_room_overflows_to_new(self):
        zone = Zone("z")
        first = zone.auto_join("s1", "A")
        for i in range(2, 5):
            zone.auto_join(f"s{i}", "x")
        assert len(zone.room(first.room_id).members) == 4
        fifth = zone.auto_join("s5", "E")
        assert fifth.room_id != first.room_id

    def test_double_join_rejected(self):
        zone = Zone("z")
        zone.auto_join("s1", "Ada")
        with pytest.raises(AlreadyInRoom):
            zone.auto_join("s1", "Ada")

    def test_placement_is_deterministic(self):
        def build():
            zone = Zone("z")
            for i in range(10):
                zone.auto_join(f"s{i}", "x")
            zone.start_game(zone.rooms()[0].room_id, "s0", fake_game_factory)
            placed = zone.auto_join("probe", "P")
            return placed.room_id

        assert build() == build()


class TestStartGame:
    def test_start_with_three(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        zone.auto_join("s3", "C")
        game = zone.start_game(room.room_id, "s1", fake_game_factory)
        assert game["players"] == ["s1", "s2", "s3"]
        assert zone.room(room.room_id).started

    def test_start_with_two_rejected(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        with pytest.raises(NotEnoughPlayers):
            zone.start_game(room.room_id, "s1", fake_game_factory)

    def test_start_twice_rejected(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        zone.auto_join("s3", "C")
        zone.start_game(room.room_id, "s1", fake_game_factory)
        with pytest.raises(AlreadyStarted):
            zone.start_game(room.room_id, "s2", fake_game_factory)

    def test_non_member_cannot_start(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        zone.auto_join("s3", "C")
        zone.auto_join("outsider", "O")  # lands in the same room (4th seat)
        fifth = zone.auto_join("other", "X")  # new room
        with pytest.raises(NotMember):
            zone.start_game(room.room_id, "other", fake_game_factory)

    def test_unknown_room(self):
        zone = Zone("z")
        with pytest.raises(NoSuchRoom):
            zone.start_game("nope", "s1", fake_game_factory)


class TestLeave:
    def test_last_prestart_leaver_deletes_room(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        outcome = zone.leave(room.room_id, "s1")
        assert outcome.room_deleted
        assert not outcome.game_aborted
        assert zone.rooms() == []

    def test_prestart_leave_keeps_others(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        outcome = zone.leave(room.room_id, "s1")
        assert not outcome.room_deleted
        assert outcome.remaining == ("s2",)

    def test_midgame_leave_aborts(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        zone.auto_join("s3", "C")
        zone.start_game(room.room_id, "s1", fake_game_factory)
        outcome = zone.leave(room.room_id, "s2")
        assert outcome.game_aborted
        assert outcome.room_deleted
        assert set(outcome.remaining) == {"s1", "s3"}
        with pytest.raises(NoSuchRoom):
            zone.room(room.room_id)

    def test_non_member_rejected(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        with pytest.raises(NotMember):
            zone.leave(room.room_id, "stranger")

    def test_freed_seat_reusable(self):
        zone = Zone("z")
        room = zone.auto_join("s1", "A")
        zone.auto_join("s2", "B")
        zone.leave(room.room_id, "s1")
        rejoined = zone.auto_join("s1", "A")
        assert rejoined.room_id == room.room_id


class TestMatchmaker:
    def test_zones_are_isolated(self):
        mm = Matchmaker(("east", "west"))
        east_room = mm.zone("east").auto_join("s1", "A")
        west_room = mm.zone("west").auto_join("s1", "A")  # same id, other zone
        assert east_room.room_id != west_room.room_id

    def test_zone_created_on_demand(self):
        mm = Matchmaker()
        mm.zone("fresh").auto_join("s1", "A")
        assert "fresh" in mm.zone_ids()


def assert_zone_invariants(zone: Zone, started_sizes: dict[str, int]):
    seen: dict[str, str] = {}
    for room in zone.rooms():
        assert len(room.members) <= 4, f"{room.room_id} overfull"
        if room.started:
            assert 3 <= len(room.members) <= 4
            if room.room_id in started_sizes:
                assert len(room.members) == started_sizes[room.room_id], (
                    "started room changed size"
                )
        for sid in room.member_ids():
            assert sid not in seen, f"{sid} in {seen[sid]} and {room.room_id}"
            seen[sid] = room.room_id


class TestConcurrency:
    def test_hundred_concurrent_joins(self):
        zone = Zone("storm")
        with ThreadPoolExecutor(max_workers=16) as pool:
            rooms = list(
                pool.map(lambda i: zone.auto_join(f"s{i}", f"P{i}"), range(100))
            )
        assert_zone_invariants(zone, {})
        total = sum(len(r.members) for r in zone.rooms())
        assert total == 100

    def test_join_start_races(self):
        """Joins racing a start: the started room must never grow, and
        every session ends up in exactly one room."""
        rng = random.Random(7)
        for round_no in range(20):
            zone = Zone(f"race{round_no}")
            seeds = [zone.auto_join(f"seed{i}", "x") for i in range(3)]
            room_id = seeds[0].room_id
            started_sizes: dict[str, int] = {}
            start_barrier = threading.Barrier(9)

            def starter():
                start_barrier.wait()
                try:
                    zone.start_game(room_id, "seed0", fake_game_factory)
                    started_sizes[room_id] = len(zone.room(room_id).members)
                except Exception:
                    pass

            def joiner(i):
                start_barrier.wait()
                zone.auto_join(f"late{i}", "x")

            threads = [threading.Thread(target=starter)] + [
                threading.Thread(target=joiner, args=(i,)) for i in range(8)
            ]
            rng.shuffle(threads)
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            # the start may have seen 3 or 4 members depending on the race,
            # but whichever size it saw is frozen from then on
            room = zone.room(room_id)
            assert room.started
            assert len(room.members) == started_sizes[room_id]
            assert_zone_invariants(zone, started_sizes)
