"""Read-only projections of game state: hashes and per-role views.

The views are the only sanctioned way to show state to a client, and they
enforce the reveal rules: sealed submissions (arguments, revotes) and the
reader's task stay hidden until the phase that discloses them.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Optional

from ..errors import TextExhausted
from .engine import visible_text
from .types import GameState, Phase

# Phases in which the respective secret has been revealed to everyone.
_TASK_PUBLIC_PHASES = frozenset({
    Phase.POWER_CARD_WINDOW,
    Phase.DICE_ROLL,
    Phase.EVENT_CARD_DRAW,
    Phase.WIN_CHECK,
    Phase.GAME_OVER,
})
_ARGUMENTS_SEALED_PHASES = frozenset({
    Phase.TURN_START,
    Phase.READER_COMPOSE,
    Phase.IDENTIFICATION,
})
_REVOTES_SEALED_PHASES = _ARGUMENTS_SEALED_PHASES | frozenset({
    Phase.FIRST_SUMMARY,
    Phase.DISCUSSION,
    Phase.REVOTE,
})


def canonical_state(state: GameState) -> dict[str, Any]:
    """The canonical serializable form of the state (RNG excluded)."""
    return state.to_dict()


def state_hash(state: GameState) -> str:
    """Short stable digest of the canonical state; the replay check
    compares these, so any drift in rules or serialization shows up as a
    mismatch at the first divergent command."""
    blob = json.dumps(canonical_state(state), sort_keys=True, separators=(",", ":"))
    return hashlib.blake2b(blob.encode("utf-8"), digest_size=8).hexdigest()


def public_view(state: GameState) -> dict[str, Any]:
    """Everything every player may see right now."""
    try:
        vt = visible_text(state)
        text_view: Optional[dict[str, Any]] = {
            "text_id": state.text.id,
            "title": state.text.title,
            "sentences": list(vt.sentences),
            "target_index": vt.target_index,
        }
    except TextExhausted:
        text_view = None

    view: dict[str, Any] = {
        "game_id": state.game_id,
        "phase": state.phase.value,
        "turn_number": state.turn_number,
        "reader": state.reader.id,
        "players": [
            {"id": p.id, "name": p.name, "score": p.score} for p in state.players
        ],
        "tokens": dict(sorted(state.board.tokens.items())),
        "frozen": sorted(pid for pid, f in state.frozen.items() if f),
        "path_length": state.board.path_length,
        "held_power_counts": {
            pid: len(cards)
            for pid, cards in sorted(state.board.held_powers.items())
        },
        "text": text_view,
        "self_explanation": (
            state.self_explanation
            if state.phase not in (Phase.TURN_START, Phase.READER_COMPOSE)
            else None
        ),
        "submitted_arguments": sorted(state.first_votes),
        "submitted_revotes": sorted(state.revotes),
        "winner": state.winner,
    }
    if state.task is not None and state.phase in _TASK_PUBLIC_PHASES:
        view["task"] = state.task.to_dict()
    else:
        view["task"] = None
    if state.first_votes and state.phase not in _ARGUMENTS_SEALED_PHASES:
        view["arguments"] = {
            pid: arg.to_dict() for pid, arg in sorted(state.first_votes.items())
        }
    else:
        view["arguments"] = None
    if state.revotes and state.phase not in _REVOTES_SEALED_PHASES:
        view["revotes"] = {
            pid: sorted(s.value for s in sel)
            for pid, sel in sorted(state.revotes.items())
        }
    else:
        view["revotes"] = None
    if state.discussion is not None and state.phase is Phase.DISCUSSION:
        view["discussion"] = {
            "contributions": dict(sorted(state.discussion.contributions.items())),
            "forfeited": sorted(state.discussion.forfeited),
            "limit": state.config.discussion_message_limit,
        }
    else:
        view["discussion"] = None
    return view


def view_for(state: GameState, player_id: str) -> dict[str, Any]:
    """The public view plus the player's own private data: their task (if
    reader), held power cards, and their own sealed submissions."""
    view = public_view(state)
    private: dict[str, Any] = {
        "held_powers": [
            c.kind.value for c in state.board.held_powers.get(player_id, [])
        ],
    }
    if player_id == state.reader.id and state.task is not None:
        private["task"] = state.task.to_dict()
    own_arg = state.first_votes.get(player_id)
    if own_arg is not None:
        private["own_argument"] = own_arg.to_dict()
    own_revote = state.revotes.get(player_id)
    if own_revote is not None:
        private["own_revote"] = sorted(s.value for s in own_revote)
    view["private"] = private
    return view
