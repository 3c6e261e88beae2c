"""Zones and rooms: placement of connecting players into 3-4 player games.

Auto-join policy: a joining player lands in the oldest room that has not
started and has space; if none exists a new room is created. Starting a
room closes it to further joins forever.

All membership changes for one zone run under a single lock, which makes
join, start and leave atomic with respect to each other: a racing fourth
join and a start cannot interleave into a started 5-member room.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .errors import (
    AlreadyInRoom,
    AlreadyStarted,
    NoSuchRoom,
    NotEnoughPlayers,
    NotMember,
)

ROOM_CAPACITY = 4
ROOM_QUORUM = 3


@dataclass
class Member:
    session_id: str
    name: str


@dataclass
class Room:
    room_id: str
    zone_id: str
    created_seq: int
    members: list[Member] = field(default_factory=list)
    started: bool = False
    game: Any = None  # opaque to matchmaking; owned by the hosting layer

    def member_ids(self) -> list[str]:
        return [m.session_id for m in self.members]

    def has_member(self, session_id: str) -> bool:
        return any(m.session_id == session_id for m in self.members)


@dataclass(frozen=True)
class LeaveOutcome:
    room_id: str
    room_deleted: bool
    game_aborted: bool
    remaining: tuple[str, ...]


class Zone:
    """One matchmaking pool. All public methods are thread-safe."""

    def __init__(self, zone_id: str = "main"):
        self.zone_id = zone_id
        self._lock = threading.Lock()
        self._rooms: dict[str, Room] = {}
        self._counter = 0

    # -- queries (snapshots) ---------------------------------------------

    def rooms(self) -> list[Room]:
        """Rooms in creation order (the auto-join search order)."""
        with self._lock:
            return sorted(self._rooms.values(), key=lambda r: (r.created_seq, r.room_id))

    def room(self, room_id: str) -> Room:
        with self._lock:
            try:
                return self._rooms[room_id]
            except KeyError:
                raise NoSuchRoom(room_id) from None

    def room_of(self, session_id: str) -> Optional[Room]:
        with self._lock:
            return self._room_of_locked(session_id)

    def _room_of_locked(self, session_id: str) -> Optional[Room]:
        for room in self._rooms.values():
            if room.has_member(session_id):
                return room
        return None

    # -- mutations ---------------------------------------------------------

    def auto_join(self, session_id: str, name: str) -> Room:
        """Place the session in the first joinable room, creating one if
        necessary. 'First' means oldest by creation, then room_id."""
        with self._lock:
            if self._room_of_locked(session_id) is not None:
                raise AlreadyInRoom(session_id)
            for room in sorted(
                self._rooms.values(), key=lambda r: (r.created_seq, r.room_id)
            ):
                if not room.started and len(room.members) < ROOM_CAPACITY:
                    room.members.append(Member(session_id, name))
                    return room
            self._counter += 1
            room = Room(
                room_id=f"{self.zone_id}-room-{self._counter}",
                zone_id=self.zone_id,
                created_seq=self._counter,
            )
            room.members.append(Member(session_id, name))
            self._rooms[room.room_id] = room
            return room

    def start_game(
        self,
        room_id: str,
        initiator: str,
        game_factory: Callable[[list[Member]], Any],
    ) -> Any:
        """Mark the room started and build its game via the injected
        factory. Runs under the zone lock, so a concurrent join can land
        either before the start (and be part of the game) or after (and be
        routed to another room) but never half-way."""
        with self._lock:
            room = self._rooms.get(room_id)
            if room is None:
                raise NoSuchRoom(room_id)
            if room.started:
                raise AlreadyStarted(room_id)
            if not room.has_member(initiator):
                raise NotMember(f"{initiator} not in {room_id}")
            if len(room.members) < ROOM_QUORUM:
                raise NotEnoughPlayers(
                    f"{len(room.members)} present, need {ROOM_QUORUM}"
                )
            game = game_factory(list(room.members))
            room.game = game
            room.started = True
            return game

    def leave(self, room_id: str, session_id: str) -> LeaveOutcome:
        """Remove a member. Pre-start: plain removal, empty rooms are
        garbage-collected. Post-start: the room is torn down and the caller
        is told to abort the game."""
        with self._lock:
            room = self._rooms.get(room_id)
            if room is None:
                raise NoSuchRoom(room_id)
            if not room.has_member(session_id):
                raise NotMember(f"{session_id} not in {room_id}")
            room.members = [m for m in room.members if m.session_id != session_id]
            remaining = tuple(m.session_id for m in room.members)
            if room.started:
                del self._rooms[room_id]
                return LeaveOutcome(
                    room_id=room_id,
                    room_deleted=True,
                    game_aborted=True,
                    remaining=remaining,
                )
            if not room.members:
                del self._rooms[room_id]
                return LeaveOutcome(
                    room_id=room_id, room_deleted=True, game_aborted=False, remaining=()
                )
            return LeaveOutcome(
                room_id=room_id,
                room_deleted=False,
                game_aborted=False,
                remaining=remaining,
            )

    def drop_room(self, room_id: str) -> None:
        """Delete a room outright (game over teardown). Missing is fine."""
        with self._lock:
            self._rooms.pop(room_id, None)


class Matchmaker:
    """Registry of zones; one default zone unless configured otherwise."""

    def __init__(self, zone_ids: tuple[str, ...] = ("main",)):
        self._lock = threading.Lock()
        self._zones: dict[str, Zone] = {zid: Zone(zid) for zid in zone_ids}

    def zone(self, zone_id: str = "main") -> Zone:
        with self._lock:
            if zone_id not in self._zones:
                self._zones[zone_id] = Zone(zone_id)
            return self._zones[zone_id]

    def zone_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._zones)
