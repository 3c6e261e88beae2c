"""The network service: sessions, rooms, per-room game instances.

Single-threaded core: every inbound event (one decoded frame, one timer
firing) is processed to completion synchronously, so commands for one
room apply in one total order with no locks held across I/O. Outbound
frames are appended per session to an outbox; the transport layer drains
outboxes asynchronously, preserving enqueue order per connection.

Write-ahead ordering: an applied command is appended to the game's event
log before any frame describing it is enqueued.
"""

from __future__ import annotations

import asyncio
import itertools
import random
import secrets
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .clock import Clock, Timer, VirtualClock, WallClock
from .core import (
    CLIENT_COMMANDS,
    GameState,
    Phase,
    PowerKind,
    RulesConfig,
    Strategy,
    apply_command,
    new_game,
    state_hash,
    visible_text,
)
from .errors import MiBoardError, NotReader, ProtocolError
from .matchmaking import Matchmaker, Member
from .persistence import (
    GAME_ABORTED,
    CorpusEntry,
    EventLog,
    EventRecord,
    game_started_record,
    pick_random_text,
)
from .protocol import (
    CLIENT_CODES,
    MAX_FRAME_BYTES,
    WireMessage,
    decode,
    encode,
    gate_chat,
)

DEFAULT_ZONE = "main"

#: Wire codes handled by the session/room layer rather than the rules engine.
_LOBBY_CODES = frozenset({"join_zone", "start_game", "leave_room", "clock_advance"})


class Session:
    """One connected client: identity, room binding, outbound frame queue."""

    def __init__(self, session_id: str):
        self.id = session_id
        self.name: Optional[str] = None
        self.zone_id: Optional[str] = None
        self.room_id: Optional[str] = None
        self.seq = 0
        self.outbox: deque[str] = deque()
        self.notify: Callable[[], None] = lambda: None

    def bind(self, zone_id: str, room_id: str, name: str) -> None:
        self.zone_id = zone_id
        self.room_id = room_id
        self.name = name
        self.seq = 0  # sequence numbers restart with each room binding

    def unbind(self) -> None:
        self.room_id = None


@dataclass
class GameRuntime:
    """Server-side envelope around one live GameState."""

    room_id: str
    zone_id: str
    state: GameState
    log: EventLog
    names: dict[str, str]
    discussion_timer: Optional[Timer] = None
    last_waiting: Optional[tuple[str, tuple[str, ...]]] = None


class GameServer:
    """Transport-agnostic server core.

    ``handle_raw`` is the single inbound entry point; the websocket layer
    (``serve``) feeds it frames and drains session outboxes. Tests drive
    it directly without sockets.
    """

    def __init__(
        self,
        rules: RulesConfig,
        corpus: list[CorpusEntry],
        log_dir: str | Path,
        seed: Optional[int] = None,
        clock: Optional[Clock] = None,
    ):
        if not corpus:
            raise ValueError("server needs a non-empty corpus")
        self.rules = rules
        self.corpus = corpus
        self.log_dir = Path(log_dir)
        self.test_mode = seed is not None
        self.rng: random.Random = (
            random.Random(seed) if self.test_mode else random.SystemRandom()
        )
        if clock is not None:
            self.clock = clock
        else:
            self.clock = VirtualClock() if self.test_mode else WallClock()
        self.matchmaker = Matchmaker(zone_ids=(DEFAULT_ZONE,))
        self.sessions: dict[str, Session] = {}
        self.games: dict[str, GameRuntime] = {}
        self._session_counter = itertools.count(1)

    # -- session lifecycle -------------------------------------------------

    def connect(self) -> Session:
        if self.test_mode:
            session_id = f"s{next(self._session_counter)}"
        else:
            session_id = secrets.token_hex(8)
        session = Session(session_id)
        self.sessions[session_id] = session
        return session

    def disconnect(self, session_id: str) -> None:
        """Connection gone: treated as leaving whatever the session was in."""
        session = self.sessions.pop(session_id, None)
        if session is None:
            return
        if session.room_id is not None:
            self._leave_current_room(session)

    # -- inbound -----------------------------------------------------------

    def handle_raw(self, session_id: str, frame: bytes | str) -> None:
        session = self.sessions.get(session_id)
        if session is None:
            return
        try:
            msg = decode(frame)
        except ProtocolError as exc:
            self._reject(session, None, exc.code, str(exc))
            return
        self.handle_message(session_id, msg)

    def handle_message(self, session_id: str, msg: WireMessage) -> None:
        session = self.sessions.get(session_id)
        if session is None:
            return
        if msg.kind == "chat":
            self._handle_chat(session, msg.payload)
            return
        code = msg.code
        assert code is not None  # decode guarantees it for control frames
        if code not in CLIENT_CODES:
            self._reject(session, code, "not_a_client_command",
                         "only clients-to-server codes are accepted")
            return
        if code == "join_zone":
            self._join_zone(session, msg.payload)
        elif code == "start_game":
            self._start_game(session)
        elif code == "leave_room":
            self._leave_room(session)
        elif code == "clock_advance":
            self._clock_advance(session, msg.payload)
        else:
            self._game_command(session, code, msg.payload)

    # -- outbound helpers ----------------------------------------------------

    def _enqueue(
        self,
        session: Session,
        kind: str,
        code: Optional[str],
        payload: dict[str, Any],
        game_id: Optional[str] = None,
        sender: str = "server",
        to: Optional[str] = None,
    ) -> None:
        session.seq += 1
        frame = encode(
            WireMessage(
                kind=kind,
                code=code,
                game_id=game_id,
                seq=session.seq,
                sender=sender,
                to=to,
                payload=payload,
            )
        )
        session.outbox.append(frame)
        session.notify()

    def _private(
        self,
        session_id: str,
        code: str,
        payload: dict[str, Any],
        game_id: Optional[str] = None,
    ) -> None:
        session = self.sessions.get(session_id)
        if session is not None:
            self._enqueue(session, "control", code, payload, game_id, to=session_id)

    def _reject(
        self,
        session: Session,
        command: Optional[str],
        reason: str,
        detail: Optional[str] = None,
    ) -> None:
        self._enqueue(
            session,
            "control",
            "rejected",
            {"command": command, "reason": reason, "detail": detail},
            to=session.id,
        )

    def _broadcast_room(
        self,
        member_ids: list[str],
        code: str,
        payload: dict[str, Any],
        game_id: Optional[str] = None,
    ) -> None:
        for member_id in member_ids:
            session = self.sessions.get(member_id)
            if session is not None:
                self._enqueue(session, "control", code, payload, game_id)

    def _broadcast(self, runtime: GameRuntime, code: str, payload: dict[str, Any]) -> None:
        self._broadcast_room(
            list(runtime.names), code, payload, game_id=runtime.state.game_id
        )

    def _broadcast_chat(
        self,
        member_ids: list[str],
        sender: Session,
        text: str,
        scope: str,
        remaining: Optional[int] = None,
        game_id: Optional[str] = None,
    ) -> None:
        payload: dict[str, Any] = {
            "text": text,
            "sender_name": sender.name or sender.id,
            "scope": scope,
        }
        if remaining is not None:
            payload["remaining"] = remaining
        for member_id in member_ids:
            session = self.sessions.get(member_id)
            if session is not None:
                self._enqueue(
                    session, "chat", None, payload, game_id, sender=sender.id
                )

    # -- lobby commands ------------------------------------------------------

    def _join_zone(self, session: Session, payload: dict[str, Any]) -> None:
        if session.room_id is not None:
            self._reject(session, "join_zone", "already_in_room",
                         f"already in {session.room_id}")
            return
        name = payload["name"].strip()
        if not name:
            self._reject(session, "join_zone", "invalid_argument", "empty name")
            return
        zone_id = payload.get("zone", DEFAULT_ZONE)
        zone = self.matchmaker.zone(zone_id)
        try:
            room = zone.auto_join(session.id, name)
        except MiBoardError as exc:
            self._reject(session, "join_zone", exc.code, str(exc))
            return
        session.bind(zone_id, room.room_id, name)
        members = [{"id": m.session_id, "name": m.name} for m in room.members]
        self._private(
            session.id,
            "room_joined",
            {
                "room_id": room.room_id,
                "zone": zone_id,
                "session_id": session.id,
                "members": members,
            },
        )
        self._broadcast_room(
            room.member_ids(),
            "roster_update",
            {"room_id": room.room_id, "members": members, "started": room.started},
        )

    def _start_game(self, session: Session) -> None:
        if session.room_id is None or session.zone_id is None:
            self._reject(session, "start_game", "no_such_room", "join a zone first")
            return
        zone = self.matchmaker.zone(session.zone_id)
        room_id = session.room_id

        def factory(members: list[Member]) -> GameState:
            entry = pick_random_text(self.corpus, self.rng)
            seed = self.rng.getrandbits(64)
            players = [(m.session_id, m.name) for m in members]
            return new_game(players, entry.text, entry.rules_for(self.rules), seed)

        try:
            state = zone.start_game(room_id, session.id, factory)
        except MiBoardError as exc:
            self._reject(session, "start_game", exc.code, str(exc))
            return

        names = {p.id: p.name for p in state.players}
        log = EventLog(self.log_dir / f"{state.game_id}.log")
        runtime = GameRuntime(
            room_id=room_id,
            zone_id=session.zone_id,
            state=state,
            log=log,
            names=names,
        )
        self.games[room_id] = runtime
        log.append(
            game_started_record(
                state, room_id=room_id, wall_time=self.clock.now(), player_names=names
            )
        )
        self._broadcast(
            runtime,
            "game_started",
            {
                "game_id": state.game_id,
                "players": [{"id": p.id, "name": p.name} for p in state.players],
                "reader": state.reader.id,
                "config": state.config.to_dict(),
            },
        )
        self._pump(runtime)
        self._flush_waiting(runtime)

    def _leave_room(self, session: Session) -> None:
        if session.room_id is None:
            self._reject(session, "leave_room", "not_member", "not in a room")
            return
        self._leave_current_room(session)

    def _leave_current_room(self, session: Session) -> None:
        assert session.zone_id is not None and session.room_id is not None
        zone = self.matchmaker.zone(session.zone_id)
        room_id = session.room_id
        try:
            outcome = zone.leave(room_id, session.id)
        except MiBoardError:
            session.unbind()
            return
        session.unbind()
        runtime = self.games.pop(room_id, None)
        if outcome.game_aborted and runtime is not None:
            self._abort_game(runtime, leaver=session.id)
        elif not outcome.room_deleted:
            room = zone.room(room_id)
            members = [{"id": m.session_id, "name": m.name} for m in room.members]
            self._broadcast_room(
                room.member_ids(),
                "roster_update",
                {"room_id": room_id, "members": members, "started": room.started},
            )

    def _abort_game(self, runtime: GameRuntime, leaver: str) -> None:
        self._cancel_discussion_timer(runtime)
        record = EventRecord(
            seq=runtime.log.next_seq,
            wall_time=self.clock.now(),
            game_id=runtime.state.game_id,
            room_id=runtime.room_id,
            actor="server",
            code=GAME_ABORTED,
            payload={"reason": "player_left", "player": leaver},
            post_state_hash=state_hash(runtime.state),
        )
        runtime.log.append(record)
        runtime.log.close()
        survivors = [pid for pid in runtime.names if pid != leaver]
        self._broadcast_room(
            survivors,
            "game_aborted",
            {"reason": "player_left", "player": leaver},
            game_id=runtime.state.game_id,
        )
        for pid in survivors:
            session = self.sessions.get(pid)
            if session is not None:
                session.unbind()

    def _clock_advance(self, session: Session, payload: dict[str, Any]) -> None:
        if not self.test_mode or not isinstance(self.clock, VirtualClock):
            self._reject(session, "clock_advance", "not_test_mode",
                         "virtual clock is enabled only when the server is seeded")
            return
        seconds = payload["seconds"]
        if seconds < 0:
            self._reject(session, "clock_advance", "invalid_argument",
                         "cannot advance backwards")
            return
        self.clock.advance(float(seconds))
        self._private(
            session.id,
            "clock_advanced",
            {"seconds": float(seconds), "virtual_now": self.clock.now()},
        )

    # -- chat -----------------------------------------------------------------

    def _handle_chat(self, session: Session, payload: dict[str, Any]) -> None:
        text = payload["text"]
        if session.room_id is None or session.zone_id is None:
            self._reject(session, None, "not_member", "join a zone to chat")
            return
        runtime = self.games.get(session.room_id)
        if runtime is None:
            # pre-game room: lobby chat, always allowed
            room = self.matchmaker.zone(session.zone_id).room_of(session.id)
            if room is None:
                self._reject(session, None, "not_member", "room is gone")
                return
            self._broadcast_chat(room.member_ids(), session, text, scope="lobby")
            return
        state = runtime.state
        if state.phase is Phase.DISCUSSION:
            # counted as a discussion contribution, same as discussion_send
            self._game_command(session, "discussion_send", {"text": text})
            return
        decision = gate_chat(state.phase, is_reader=(state.reader.id == session.id))
        if not decision.allowed:
            self._reject(session, None, "chat_denied", decision.reason)
            return
        self._broadcast_chat(
            list(runtime.names),
            session,
            text,
            scope=decision.scope or "idle",
            game_id=state.game_id,
        )

    # -- game commands ---------------------------------------------------------

    def _game_command(self, session: Session, code: str, payload: dict[str, Any]) -> None:
        runtime = (
            self.games.get(session.room_id) if session.room_id is not None else None
        )
        if runtime is None:
            self._reject(session, code, "no_such_game", "no live game for this session")
            return
        state = runtime.state
        phase_before = state.phase
        try:
            result = apply_command(state, session.id, code, payload)
        except NotReader as exc:
            self._reject(session, code, "not_your_turn", str(exc))
            return
        except MiBoardError as exc:
            self._reject(session, code, exc.code, str(exc))
            return
        self._log(runtime, session.id, code, payload)
        self._emit_command_frames(runtime, session.id, code, payload, result)
        self._transition_frames(runtime, phase_before)
        self._pump(runtime)
        if runtime.room_id in self.games:
            self._flush_waiting(runtime)

    def _log(self, runtime: GameRuntime, actor: str, code: str, payload: dict) -> None:
        runtime.log.append(
            EventRecord(
                seq=runtime.log.next_seq,
                wall_time=self.clock.now(),
                game_id=runtime.state.game_id,
                room_id=runtime.room_id,
                actor=actor,
                code=code,
                payload=payload,
                post_state_hash=state_hash(runtime.state),
            )
        )

    def _apply_server(
        self, runtime: GameRuntime, actor: str, code: str, payload: dict
    ) -> Any:
        """Apply a server-injected command, honoring write-ahead ordering."""
        result = apply_command(runtime.state, actor, code, payload)
        self._log(runtime, actor, code, payload)
        return result

    def _emit_command_frames(
        self,
        runtime: GameRuntime,
        actor: str,
        code: str,
        payload: dict[str, Any],
        result: Any,
    ) -> None:
        state = runtime.state
        if code in ("reroll_strategy", "reroll_value"):
            assert state.task is not None
            self._private(
                actor,
                "task_assigned",
                {**state.task.to_dict(), "score": state.player_by_id(actor).score},
                game_id=state.game_id,
            )
        elif code == "discussion_send":
            # delivered as chat so transcripts keep human text separate
            session = self.sessions.get(actor)
            if session is not None:
                self._broadcast_chat(
                    list(runtime.names),
                    session,
                    payload["text"],
                    scope="discussion",
                    remaining=result,
                    game_id=state.game_id,
                )
        elif code == "use_power":
            target = payload.get("target")
            self._broadcast(
                runtime,
                "power_card_played",
                {"player": actor, "kind": payload["kind"], "target": target},
            )
            if payload["kind"] == PowerKind.FREEZE.value:
                self._broadcast(
                    runtime,
                    "player_frozen",
                    {"player": target, "by": actor},
                )
        elif code == "roll_dice":
            self._broadcast(
                runtime,
                "dice_result",
                {"player": actor, "dice": list(result.dice), "total": result.total},
            )
            self._broadcast(
                runtime,
                "token_moved",
                {
                    "player": actor,
                    "position_before": result.position_before,
                    "position_after": result.position_after,
                    "cause": "roll",
                },
            )
        elif code == "draw_event":
            self._broadcast(
                runtime,
                "event_card_drawn",
                {
                    "player": actor,
                    "kind": result.card.kind.value,
                    "amount": result.card.amount,
                    "power_granted": result.power_granted is not None,
                },
            )
            if result.position_after != result.position_before:
                self._broadcast(
                    runtime,
                    "token_moved",
                    {
                        "player": actor,
                        "position_before": result.position_before,
                        "position_after": result.position_after,
                        "cause": "event",
                    },
                )
            if result.power_granted is not None:
                self._private(
                    actor,
                    "power_card_granted",
                    {"kind": result.power_granted.kind.value},
                    game_id=state.game_id,
                )

    def _transition_frames(self, runtime: GameRuntime, phase_before: Phase) -> None:
        state = runtime.state
        if state.phase is phase_before:
            return
        if phase_before is Phase.DISCUSSION:
            self._cancel_discussion_timer(runtime)
        self._broadcast(
            runtime,
            "phase_changed",
            {
                "phase": state.phase.value,
                "turn_number": state.turn_number,
                "reader": state.reader.id,
            },
        )
        if state.phase is Phase.IDENTIFICATION:
            assert state.self_explanation is not None
            self._broadcast(
                runtime,
                "se_broadcast",
                {"reader": state.reader.id, "text": state.self_explanation},
            )
        elif state.phase is Phase.FIRST_SUMMARY:
            self._broadcast(
                runtime,
                "arguments_revealed",
                {
                    "arguments": {
                        pid: arg.to_dict() for pid, arg in state.first_votes.items()
                    }
                },
            )
        elif state.phase is Phase.DISCUSSION:
            self._broadcast(
                runtime,
                "discussion_opened",
                {
                    "limit": state.config.discussion_message_limit,
                    "time_limit_s": state.config.discussion_time_limit_s,
                },
            )
            self._arm_discussion_timer(runtime)
        elif state.phase is Phase.REVOTE:
            self._broadcast(
                runtime,
                "revote_opened",
                {"strategies": [s.value for s in Strategy]},
            )

    # -- discussion timer ------------------------------------------------------

    def _arm_discussion_timer(self, runtime: GameRuntime) -> None:
        self._cancel_discussion_timer(runtime)
        room_id = runtime.room_id
        runtime.discussion_timer = self.clock.call_later(
            runtime.state.config.discussion_time_limit_s,
            lambda: self._on_discussion_timeout(room_id),
        )

    def _cancel_discussion_timer(self, runtime: GameRuntime) -> None:
        if runtime.discussion_timer is not None:
            runtime.discussion_timer.cancel()
            runtime.discussion_timer = None

    def _on_discussion_timeout(self, room_id: str) -> None:
        runtime = self.games.get(room_id)
        if runtime is None or runtime.state.phase is not Phase.DISCUSSION:
            return
        runtime.discussion_timer = None
        phase_before = runtime.state.phase
        self._apply_server(runtime, "server", "discussion_timeout", {})
        self._transition_frames(runtime, phase_before)
        self._pump(runtime)
        if room_id in self.games:
            self._flush_waiting(runtime)

    # -- transient-phase pump ----------------------------------------------------

    def _pump(self, runtime: GameRuntime) -> None:
        """Run server-owned phases until the game waits on a player."""
        state = runtime.state
        while True:
            phase = state.phase
            if phase is Phase.TURN_START:
                if state.reveal_cursor > len(state.text.targets):
                    entry = self._next_text(state.text.id)
                    phase_before = state.phase
                    self._apply_server(
                        runtime,
                        "server",
                        "replace_text",
                        {"text": entry.text.to_dict()},
                    )
                    self._transition_frames(runtime, phase_before)
                vt = visible_text(state)
                self._broadcast(
                    runtime,
                    "text_reveal",
                    {
                        "text_id": state.text.id,
                        "title": state.text.title,
                        "sentences": list(vt.sentences),
                        "target_index": vt.target_index,
                        "turn_number": state.turn_number,
                    },
                )
                reader = state.reader.id
                phase_before = state.phase
                self._apply_server(runtime, reader, "draw_task", {})
                assert state.task is not None
                self._private(
                    reader,
                    "task_assigned",
                    {
                        **state.task.to_dict(),
                        "score": state.player_by_id(reader).score,
                    },
                    game_id=state.game_id,
                )
                self._transition_frames(runtime, phase_before)
            elif phase is Phase.FIRST_SUMMARY:
                phase_before = state.phase
                result = self._apply_server(runtime, "server", "score_first_vote", {})
                unanimous = result.outcome.value == "unanimous"
                assert state.task is not None
                self._broadcast(
                    runtime,
                    "score_update",
                    {
                        "stage": "first_vote",
                        "outcome": result.outcome.value,
                        "accepted": [result.accepted.value] if result.accepted else [],
                        "deltas": dict(result.deltas),
                        "totals": {p.id: p.score for p in state.players},
                        "task": state.task.to_dict() if unanimous else None,
                    },
                )
                self._transition_frames(runtime, phase_before)
            elif phase is Phase.FINAL_SUMMARY:
                phase_before = state.phase
                result = self._apply_server(runtime, "server", "score_revote", {})
                assert state.task is not None
                self._broadcast(
                    runtime,
                    "score_update",
                    {
                        "stage": "revote",
                        "outcome": None,
                        "accepted": [s.value for s in result.accepted],
                        "deltas": dict(result.deltas),
                        "totals": {p.id: p.score for p in state.players},
                        "task": state.task.to_dict(),
                        "acceptance_points": dict(result.acceptance_points),
                        "convince_points": dict(result.convince_points),
                        "revotes": {
                            pid: sorted(s.value for s in votes)
                            for pid, votes in state.revotes.items()
                        },
                    },
                )
                self._transition_frames(runtime, phase_before)
            elif phase is Phase.WIN_CHECK:
                phase_before = state.phase
                result = self._apply_server(runtime, "server", "check_win", {})
                self._transition_frames(runtime, phase_before)
                if result.winner is not None:
                    self._broadcast(
                        runtime,
                        "game_over",
                        {
                            "winner": result.winner,
                            "totals": {p.id: p.score for p in state.players},
                            "turns": state.turn_number,
                        },
                    )
                    self._end_game(runtime)
                    return
            else:
                return

    def _next_text(self, current_id: str) -> CorpusEntry:
        """Pick the replacement text: uniform over the other corpus entries,
        falling back to the current one for a single-text corpus."""
        others = [e for e in self.corpus if e.text.id != current_id]
        if not others:
            return self.corpus[0]
        return pick_random_text(others, self.rng)

    def _end_game(self, runtime: GameRuntime) -> None:
        self._cancel_discussion_timer(runtime)
        runtime.log.close()
        self.games.pop(runtime.room_id, None)
        self.matchmaker.zone(runtime.zone_id).drop_room(runtime.room_id)
        for pid in runtime.names:
            session = self.sessions.get(pid)
            if session is not None and session.room_id == runtime.room_id:
                session.unbind()

    # -- waiting banner --------------------------------------------------------

    def _pending(self, state: GameState) -> list[str]:
        phase = state.phase
        reader = state.reader.id
        if phase is Phase.READER_COMPOSE:
            return [reader]
        if phase is Phase.IDENTIFICATION:
            # the reader votes on their own self-explanation too
            return [
                pid for pid in state.player_ids() if pid not in state.first_votes
            ]
        if phase is Phase.DISCUSSION:
            assert state.discussion is not None
            d = state.discussion
            limit = state.config.discussion_message_limit
            return [
                pid
                for pid in state.player_ids()
                if pid not in d.forfeited and d.contributions.get(pid, 0) < limit
            ]
        if phase is Phase.REVOTE:
            return [pid for pid in state.player_ids() if pid not in state.revotes]
        if phase in (Phase.POWER_CARD_WINDOW, Phase.DICE_ROLL, Phase.EVENT_CARD_DRAW):
            return [reader]
        return []

    def _flush_waiting(self, runtime: GameRuntime) -> None:
        state = runtime.state
        snapshot = (state.phase.value, tuple(self._pending(state)))
        if snapshot == runtime.last_waiting:
            return
        runtime.last_waiting = snapshot
        self._broadcast(
            runtime,
            "waiting_on",
            {"phase": snapshot[0], "pending": list(snapshot[1])},
        )


# -- websocket transport --------------------------------------------------


async def serve(
    server: GameServer,
    host: str = "127.0.0.1",
    port: int = 8765,
    ping_interval: Optional[float] = 15.0,
    ping_timeout: Optional[float] = 30.0,
):
    """Run the websocket front end; returns the listening server object."""
    import websockets.asyncio.server as ws

    async def drain(session: Session, connection) -> None:
        event = asyncio.Event()
        session.notify = event.set
        try:
            while True:
                await event.wait()
                event.clear()
                while session.outbox:
                    await connection.send(session.outbox.popleft())
        except Exception:
            pass

    async def handler(connection) -> None:
        session = server.connect()
        sender = asyncio.create_task(drain(session, connection))
        try:
            async for frame in connection:
                server.handle_raw(session.id, frame)
                # give the drain task a chance to flush between frames
                await asyncio.sleep(0)
        finally:
            server.disconnect(session.id)
            # flush anything still queued before tearing down
            try:
                while session.outbox:
                    await connection.send(session.outbox.popleft())
            except Exception:
                pass
            sender.cancel()

    return await ws.serve(
        handler,
        host,
        port,
        ping_interval=ping_interval,
        ping_timeout=ping_timeout,
        max_size=MAX_FRAME_BYTES + 64,
    )
