"""Wire protocol: framing, envelope, message catalog, chat gating.

One frame carries one JSON object, prefixed by its byte length in ASCII
decimal plus a newline::

    <decimal byte length>\\n{"kind":"control","code":...,"payload":{...},...}

The envelope separates machine traffic (``kind: "control"``, always with a
``code`` from the catalog) from human chat (``kind: "chat"``, never with a
code). docs/protocol.md is the human-readable rendering of the catalog
defined here; this module is what the server, bots, and tests actually
run.

Decoding is total: any input, including arbitrary bytes, either yields a
valid :class:`WireMessage` or raises a :class:`~miboard.errors.ProtocolError`
subclass. Nothing else escapes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .core import Phase
from .errors import (
    MalformedMessage,
    PayloadSchemaViolation,
    UnknownCode,
)

PROTOCOL_VERSION = 1

#: Upper bound on one frame's body, in bytes. Keeps a hostile client from
#: asking the server to buffer unbounded input.
MAX_FRAME_BYTES = 1_000_000

_ENVELOPE_KEYS = frozenset({"v", "kind", "code", "game_id", "seq", "sender", "to", "payload"})


@dataclass(frozen=True)
class WireMessage:
    """One decoded frame.

    ``seq`` is assigned by the server per connection: dense, starting at 1,
    over every frame that connection is sent within its current room
    binding. Client-sent frames carry no seq. ``to`` names the recipient on
    private frames; broadcast frames leave it None.
    """

    kind: str  # "control" | "chat"
    code: Optional[str] = None
    game_id: Optional[str] = None
    seq: Optional[int] = None
    sender: Optional[str] = None
    to: Optional[str] = None
    payload: dict[str, Any] = field(default_factory=dict)


# -- payload schema mini-language -----------------------------------------

class _Field:
    def __init__(self, check: Callable[[Any], bool], describe: str, required: bool = True):
        self.check = check
        self.describe = describe
        self.required = required


def _is_str(x):
    return isinstance(x, str)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_bool(x):
    return isinstance(x, bool)


def _is_null(x):
    return x is None


def _opt(check):
    return lambda x: x is None or check(x)


def _list_of(check):
    return lambda x: isinstance(x, list) and all(check(v) for v in x)


def _map_of(check):
    return lambda x: (
        isinstance(x, dict)
        and all(isinstance(k, str) for k in x)
        and all(check(v) for v in x.values())
    )


def _is_span(x):
    return (
        isinstance(x, dict)
        and set(x) == {"start", "end"}
        and _is_int(x["start"])
        and _is_int(x["end"])
    )


def _is_argument(x):
    if not isinstance(x, dict):
        return False
    if not set(x) <= {"strategy", "reasons", "span", "freetext"}:
        return False
    return (
        _is_str(x.get("strategy"))
        and _list_of(_is_str)(x.get("reasons", []))
        and _opt(_is_span)(x.get("span"))
        and _opt(_is_str)(x.get("freetext"))
    )


def _is_member(x):
    return (
        isinstance(x, dict)
        and set(x) <= {"id", "name", "score"}
        and _is_str(x.get("id"))
        and _is_str(x.get("name"))
        and _opt(_is_int)(x.get("score"))
    )


def _is_task(x):
    return (
        isinstance(x, dict)
        and set(x) <= {"strategy", "value", "strategy_rerolls", "value_rerolls"}
        and _is_str(x.get("strategy"))
        and _is_int(x.get("value"))
    )


def _any_json(x):
    return True


STR = _Field(_is_str, "string")
INT = _Field(_is_int, "integer")
NUM = _Field(_is_num, "number")
BOOL = _Field(_is_bool, "boolean")
STR_OR_NULL = _Field(_opt(_is_str), "string or null")
INT_OR_NULL = _Field(_opt(_is_int), "integer or null")
STR_LIST = _Field(_list_of(_is_str), "list of strings")
INT_LIST = _Field(_list_of(_is_int), "list of integers")
INT_MAP = _Field(_map_of(_is_int), "map of string to integer")


def _optional(f: _Field) -> _Field:
    return _Field(f.check, f.describe, required=False)


# -- catalog ---------------------------------------------------------------

#: Control codes a client may send, with their payload schemas.
CLIENT_CODES: dict[str, dict[str, _Field]] = {
    "join_zone": {"name": STR, "zone": _optional(STR)},
    "start_game": {},
    "leave_room": {},
    "reroll_strategy": {},
    "reroll_value": {},
    "submit_se": {"text": STR},
    "submit_argument": {
        "strategy": STR,
        "reasons": STR_LIST,
        "span": _Field(_opt(_is_span), "span object or null", required=False),
        "freetext": _optional(STR_OR_NULL),
    },
    "discussion_send": {"text": STR},
    "discussion_pass": {},
    "revote_submit": {"strategies": STR_LIST},
    "use_power": {"kind": STR, "target": _optional(STR_OR_NULL)},
    "skip_power": {},
    "roll_dice": {},
    "draw_event": {},
    # test-mode only: advance the server's virtual clock
    "clock_advance": {"seconds": NUM},
}

#: Control codes the server sends. "private" marks frames only ever
#: delivered to one recipient (the 'to' field is set on them).
SERVER_CODES: dict[str, dict[str, _Field]] = {
    "room_joined": {
        "room_id": STR,
        "zone": STR,
        "session_id": STR,
        "members": _Field(_list_of(_is_member), "list of member objects"),
    },
    "roster_update": {
        "room_id": STR,
        "members": _Field(_list_of(_is_member), "list of member objects"),
        "started": BOOL,
    },
    "game_started": {
        "game_id": STR,
        "players": _Field(_list_of(_is_member), "list of member objects"),
        "reader": STR,
        "config": _Field(_any_json, "config summary object"),
    },
    "phase_changed": {"phase": STR, "turn_number": INT, "reader": STR},
    "text_reveal": {
        "text_id": STR,
        "title": STR,
        "sentences": STR_LIST,
        "target_index": INT,
        "turn_number": INT,
    },
    "task_assigned": {  # private to the reader
        "strategy": STR,
        "value": INT,
        "strategy_rerolls": INT,
        "value_rerolls": INT,
        "score": INT,
    },
    "se_broadcast": {"reader": STR, "text": STR},
    "arguments_revealed": {
        "arguments": _Field(_map_of(_is_argument), "map of player to argument"),
    },
    "score_update": {
        "stage": STR,  # "first_vote" | "revote"
        "outcome": STR_OR_NULL,  # "unanimous" | "disagreement" | null
        "accepted": STR_LIST,
        "deltas": INT_MAP,
        "totals": INT_MAP,
        "task": _Field(_opt(_is_task), "task object or null"),
        "acceptance_points": _optional(INT_MAP),
        "convince_points": _optional(INT_MAP),
        "revotes": _Field(_opt(_map_of(_list_of(_is_str))),
                          "map of player to strategy list, or null",
                          required=False),
    },
    "discussion_opened": {"limit": INT, "time_limit_s": NUM},
    "revote_opened": {"strategies": STR_LIST},
    "dice_result": {"player": STR, "dice": INT_LIST, "total": INT},
    "token_moved": {
        "player": STR,
        "position_before": INT,
        "position_after": INT,
        "cause": STR,  # "roll" | "event"
    },
    "event_card_drawn": {
        "player": STR,
        "kind": STR,
        "amount": INT,
        "power_granted": BOOL,
    },
    "power_card_granted": {"kind": STR},  # private to the drawing player
    "power_card_played": {"player": STR, "kind": STR, "target": STR_OR_NULL},
    "player_frozen": {"player": STR, "by": STR},
    "waiting_on": {"phase": STR, "pending": STR_LIST},
    "game_over": {"winner": STR, "totals": INT_MAP, "turns": INT},
    "game_aborted": {"reason": STR, "player": STR_OR_NULL},
    "rejected": {  # private to the offending sender
        "command": STR_OR_NULL,
        "reason": STR,
        "detail": STR_OR_NULL,
    },
    "clock_advanced": {"seconds": NUM, "virtual_now": NUM},  # private, test mode
}

#: Chat payload schema. Client-sent chat carries only text; delivered chat
#: adds attribution and routing data filled in by the server.
CHAT_FIELDS: dict[str, _Field] = {
    "text": STR,
    "sender_name": _optional(STR),
    "scope": _optional(STR),  # "lobby" | "idle" | "discussion"
    "remaining": _optional(INT_OR_NULL),
}

ALL_CODES: dict[str, dict[str, _Field]] = {**CLIENT_CODES, **SERVER_CODES}

#: Server frames only ever addressed to a single recipient.
PRIVATE_CODES = frozenset({
    "room_joined",
    "task_assigned",
    "power_card_granted",
    "rejected",
    "clock_advanced",
})


def validate_payload(code: Optional[str], kind: str, payload: Any) -> None:
    """Check a payload against its schema; raises PayloadSchemaViolation."""
    if not isinstance(payload, dict):
        raise PayloadSchemaViolation("payload must be an object")
    if kind == "chat":
        schema = CHAT_FIELDS
        label = "chat"
    else:
        assert code is not None
        schema = ALL_CODES[code]
        label = code
    extra = set(payload) - set(schema)
    if extra:
        raise PayloadSchemaViolation(
            f"{label}: unexpected field(s) {sorted(extra)}"
        )
    for name, spec in schema.items():
        if name not in payload:
            if spec.required:
                raise PayloadSchemaViolation(f"{label}: missing field {name!r}")
            continue
        if not spec.check(payload[name]):
            raise PayloadSchemaViolation(
                f"{label}: field {name!r} must be {spec.describe}"
            )


# -- framing ----------------------------------------------------------------

def encode(msg: WireMessage) -> bytes:
    """Serialize and frame a message, validating it first so an invalid
    frame can never leave this process."""
    if msg.kind not in ("control", "chat"):
        raise MalformedMessage(f"unknown kind {msg.kind!r}")
    if msg.kind == "control":
        if not isinstance(msg.code, str):
            raise MalformedMessage("control frame needs a code")
        if msg.code not in ALL_CODES:
            raise UnknownCode(msg.code)
    elif msg.code is not None:
        raise MalformedMessage("chat frames carry no code")
    validate_payload(msg.code, msg.kind, msg.payload)

    envelope: dict[str, Any] = {"v": PROTOCOL_VERSION, "kind": msg.kind}
    if msg.code is not None:
        envelope["code"] = msg.code
    for key in ("game_id", "seq", "sender", "to"):
        value = getattr(msg, key)
        if value is not None:
            envelope[key] = value
    envelope["payload"] = msg.payload
    body = json.dumps(envelope, sort_keys=True, separators=(",", ":")).encode("utf-8")
    if len(body) > MAX_FRAME_BYTES:
        raise MalformedMessage(f"frame body {len(body)} bytes exceeds limit")
    return str(len(body)).encode("ascii") + b"\n" + body


def decode(frame: bytes | str) -> WireMessage:
    """Parse one frame. Total: raises only ProtocolError subclasses."""
    if isinstance(frame, str):
        data = frame.encode("utf-8", errors="surrogatepass")
    elif isinstance(frame, (bytes, bytearray)):
        data = bytes(frame)
    else:
        raise MalformedMessage(f"frame must be bytes or str, got {type(frame).__name__}")

    newline = data.find(b"\n", 0, 9)
    if newline < 1:
        raise MalformedMessage("missing length header")
    header = data[:newline]
    if not header.isdigit():
        raise MalformedMessage(f"bad length header {header[:16]!r}")
    length = int(header)
    if length > MAX_FRAME_BYTES:
        raise MalformedMessage(f"declared body of {length} bytes exceeds limit")
    body = data[newline + 1:]
    if len(body) != length:
        raise MalformedMessage(
            f"length header says {length} bytes, body has {len(body)}"
        )
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedMessage(f"body is not valid JSON: {exc}") from None

    if not isinstance(obj, dict):
        raise MalformedMessage("envelope must be an object")
    extra = set(obj) - _ENVELOPE_KEYS
    if extra:
        raise MalformedMessage(f"unexpected envelope field(s) {sorted(extra)}")
    if obj.get("v") != PROTOCOL_VERSION:
        raise MalformedMessage(f"unsupported protocol version {obj.get('v')!r}")
    kind = obj.get("kind")
    if kind not in ("control", "chat"):
        raise MalformedMessage(f"unknown kind {kind!r}")

    code = obj.get("code")
    if kind == "control":
        if not isinstance(code, str):
            raise MalformedMessage("control frame needs a string code")
        if code not in ALL_CODES:
            raise UnknownCode(code)
    elif code is not None:
        raise MalformedMessage("chat frames carry no code")

    for key in ("game_id", "sender", "to"):
        if key in obj and not isinstance(obj[key], str):
            raise MalformedMessage(f"{key} must be a string")
    seq = obj.get("seq")
    if seq is not None and (not isinstance(seq, int) or isinstance(seq, bool) or seq < 0):
        raise MalformedMessage("seq must be a non-negative integer")

    payload = obj.get("payload", {})
    validate_payload(code, kind, payload)

    return WireMessage(
        kind=kind,
        code=code,
        game_id=obj.get("game_id"),
        seq=seq,
        sender=obj.get("sender"),
        to=obj.get("to"),
        payload=payload,
    )


# -- chat gating --------------------------------------------------------------

@dataclass(frozen=True)
class GateDecision:
    allowed: bool
    scope: Optional[str] = None  # "lobby" | "idle" | "discussion"
    reason: Optional[str] = None


def gate_chat(
    phase: Optional[Phase],
    is_reader: bool,
    may_contribute: bool = True,
) -> GateDecision:
    """Decide whether a chat message is deliverable right now.

    ``phase`` is None in the lobby (no live game). ``may_contribute`` is
    the caller's statement that the sender is within the discussion
    contribution rules (not forfeited, under the message cap); it only
    matters during the Discussion phase.

    Total function: always returns a decision, never raises.
    """
    if phase is None:
        return GateDecision(True, scope="lobby")
    if phase is Phase.DISCUSSION:
        if may_contribute:
            return GateDecision(True, scope="discussion")
        return GateDecision(False, reason="discussion contributions exhausted")
    if phase is Phase.READER_COMPOSE and not is_reader:
        return GateDecision(True, scope="idle")
    if phase is Phase.READER_COMPOSE:
        return GateDecision(False, reason="the reader is composing, not idle")
    return GateDecision(False, reason=f"chat is closed during {phase.value}")
