"""Domain types for the game core.

Everything here is plain data. The rules that mutate it live in
:mod:`miboard.core.engine`; serialization helpers live alongside the types
so the state hash, the event log, and client views all share one canonical
dictionary form.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Optional

from ..errors import InvalidText


class Strategy(str, enum.Enum):
    """The five assignable reading strategies plus the Other escape hatch.

    Other can be *voted* during identification but is never assigned as a
    task strategy."""

    BRIDGING = "bridging"
    COMPREHENSION_MONITORING = "comprehension_monitoring"
    ELABORATION = "elaboration"
    PARAPHRASING = "paraphrasing"
    PREDICTION = "prediction"
    OTHER = "other"


#: Strategies that may appear on a task assignment (Other excluded).
TASK_STRATEGIES: tuple[Strategy, ...] = tuple(
    s for s in Strategy if s is not Strategy.OTHER
)


class Phase(str, enum.Enum):
    TURN_START = "turn_start"
    READER_COMPOSE = "reader_compose"
    IDENTIFICATION = "identification"
    FIRST_SUMMARY = "first_summary"
    DISCUSSION = "discussion"
    REVOTE = "revote"
    FINAL_SUMMARY = "final_summary"
    POWER_CARD_WINDOW = "power_card_window"
    DICE_ROLL = "dice_roll"
    EVENT_CARD_DRAW = "event_card_draw"
    WIN_CHECK = "win_check"
    GAME_OVER = "game_over"


class EventKind(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    DRAW_POWER = "draw_power"


@dataclass(frozen=True)
class EventCard:
    """Board deck card: move the token or grant a power card draw."""

    kind: EventKind
    amount: int = 0  # 1..3 for forward/backward, 0 for draw_power

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "amount": self.amount}

    @classmethod
    def from_dict(cls, d: dict) -> "EventCard":
        return cls(kind=EventKind(d["kind"]), amount=int(d.get("amount", 0)))


class PowerKind(str, enum.Enum):
    EXTRA_TURN = "extra_turn"
    ROLL_TWO_DICE = "roll_two_dice"
    FREEZE = "freeze"


@dataclass(frozen=True)
class PowerCard:
    """Held card granting a special action; freeze targets are chosen at
    play time, not printed on the card."""

    kind: PowerKind

    def to_dict(self) -> dict:
        return {"kind": self.kind.value}

    @classmethod
    def from_dict(cls, d: dict) -> "PowerCard":
        return cls(kind=PowerKind(d["kind"]))


@dataclass(frozen=True)
class Span:
    """Half-open character interval [start, end) into the self-explanation."""

    start: int
    end: int

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end}

    @classmethod
    def from_dict(cls, d: dict) -> "Span":
        return cls(start=int(d["start"]), end=int(d["end"]))


@dataclass(frozen=True)
class Argument:
    """A player's structured strategy identification.

    ``reasons`` are codes from the taxonomy bound to ``strategy``;
    ``span`` highlights where in the SE the strategy shows up; ``freetext``
    carries the free-form justification required whenever the strategy or
    any selected reason is Other."""

    strategy: Strategy
    reasons: tuple[str, ...]
    span: Optional[Span] = None
    freetext: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "reasons": list(self.reasons),
            "span": self.span.to_dict() if self.span else None,
            "freetext": self.freetext,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Argument":
        span = d.get("span")
        return cls(
            strategy=Strategy(d["strategy"]),
            reasons=tuple(d.get("reasons", ())),
            span=Span.from_dict(span) if span else None,
            freetext=d.get("freetext"),
        )


@dataclass(frozen=True)
class TaskAssignment:
    """The reader's secret (strategy, point value) pair for the turn."""

    strategy: Strategy
    value: int
    strategy_rerolls: int = 0
    value_rerolls: int = 0

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "value": self.value,
            "strategy_rerolls": self.strategy_rerolls,
            "value_rerolls": self.value_rerolls,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskAssignment":
        return cls(
            strategy=Strategy(d["strategy"]),
            value=int(d["value"]),
            strategy_rerolls=int(d.get("strategy_rerolls", 0)),
            value_rerolls=int(d.get("value_rerolls", 0)),
        )


@dataclass(frozen=True)
class TextDocument:
    """A practice text with 1-based target sentence indices.

    Targets drive the reveal schedule: on the n-th reader turn all
    sentences up to and including the n-th target are visible."""

    id: str
    title: str
    sentences: tuple[str, ...]
    targets: tuple[int, ...]

    def validate(self) -> None:
        if not self.sentences:
            raise InvalidText("text has no sentences")
        if not self.targets:
            raise InvalidText("text has no target sentences")
        if list(self.targets) != sorted(set(self.targets)):
            raise InvalidText("targets must be strictly increasing")
        if self.targets[0] < 1 or self.targets[-1] > len(self.sentences):
            raise InvalidText(
                f"target out of range 1..{len(self.sentences)}: {self.targets}"
            )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "sentences": list(self.sentences),
            "targets": list(self.targets),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TextDocument":
        return cls(
            id=str(d["id"]),
            title=str(d.get("title", d["id"])),
            sentences=tuple(str(s) for s in d["sentences"]),
            targets=tuple(int(t) for t in d["targets"]),
        )


@dataclass
class Player:
    id: str
    name: str
    score: int = 0

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "score": self.score}


@dataclass
class Board:
    """Token positions plus both card decks with their discard piles."""

    path_length: int
    tokens: dict[str, int]
    event_deck: list[EventCard]
    event_discard: list[EventCard]
    power_deck: list[PowerCard]
    power_discard: list[PowerCard]
    held_powers: dict[str, list[PowerCard]]

    def to_dict(self) -> dict:
        return {
            "path_length": self.path_length,
            "tokens": dict(sorted(self.tokens.items())),
            "event_deck": [c.to_dict() for c in self.event_deck],
            "event_discard": [c.to_dict() for c in self.event_discard],
            "power_deck": [c.to_dict() for c in self.power_deck],
            "power_discard": [c.to_dict() for c in self.power_discard],
            "held_powers": {
                pid: [c.to_dict() for c in cards]
                for pid, cards in sorted(self.held_powers.items())
            },
        }


@dataclass
class DiscussionState:
    """Per-player contribution bookkeeping for one discussion session."""

    contributions: dict[str, int]
    forfeited: set[str] = field(default_factory=set)
    timed_out: bool = False

    def to_dict(self) -> dict:
        return {
            "contributions": dict(sorted(self.contributions.items())),
            "forfeited": sorted(self.forfeited),
            "timed_out": self.timed_out,
        }


class VoteOutcome(str, enum.Enum):
    UNANIMOUS = "unanimous"
    DISAGREEMENT = "disagreement"


@dataclass
class GameState:
    """Authoritative state of one game instance.

    Mutated only by the operations in :mod:`miboard.core.engine`. The
    ``rng`` is part of the state (one seeded stream per game) but excluded
    from equality and serialization; replaying the command log from
    ``seed`` reproduces it exactly.
    """

    game_id: str
    seed: int
    players: list[Player]
    reader_index: int
    frozen: dict[str, bool]
    phase: Phase
    board: Board
    text: TextDocument
    reveal_cursor: int  # 1-based index into text.targets for the current turn
    turn_number: int
    task: Optional[TaskAssignment]
    self_explanation: Optional[str]
    first_votes: dict[str, Argument]
    revotes: dict[str, frozenset[Strategy]]
    discussion: Optional[DiscussionState]
    extra_turn_pending: bool
    two_dice_armed: bool
    winner: Optional[str]
    config: "RulesConfig"
    rng: random.Random = field(compare=False, repr=False, default_factory=random.Random)

    # -- canonical serialization ----------------------------------------

    def to_dict(self) -> dict:
        """Canonical dictionary form: field order fixed, dict keys sorted.

        This is the serialization the 64-bit state hash is computed over;
        the rng's internal state is deliberately not part of it."""
        return {
            "game_id": self.game_id,
            "seed": self.seed,
            "players": [p.to_dict() for p in self.players],
            "reader_index": self.reader_index,
            "frozen": dict(sorted(self.frozen.items())),
            "phase": self.phase.value,
            "board": self.board.to_dict(),
            "text": self.text.to_dict(),
            "reveal_cursor": self.reveal_cursor,
            "turn_number": self.turn_number,
            "task": self.task.to_dict() if self.task else None,
            "self_explanation": self.self_explanation,
            "first_votes": {
                pid: arg.to_dict() for pid, arg in sorted(self.first_votes.items())
            },
            "revotes": {
                pid: sorted(s.value for s in strategies)
                for pid, strategies in sorted(self.revotes.items())
            },
            "discussion": self.discussion.to_dict() if self.discussion else None,
            "extra_turn_pending": self.extra_turn_pending,
            "two_dice_armed": self.two_dice_armed,
            "winner": self.winner,
            "config": self.config.to_dict(),
        }

    # -- helpers ----------------------------------------------------------

    @property
    def reader(self) -> Player:
        return self.players[self.reader_index]

    def player_ids(self) -> list[str]:
        return [p.id for p in self.players]

    def player_by_id(self, player_id: str) -> Optional[Player]:
        for p in self.players:
            if p.id == player_id:
                return p
        return None


# -- operation results --------------------------------------------------

@dataclass(frozen=True)
class VisibleText:
    """Sentences revealed so far plus the current target's 1-based index."""

    sentences: tuple[str, ...]
    target_index: int


@dataclass(frozen=True)
class FirstVoteResult:
    deltas: dict[str, int]
    outcome: VoteOutcome
    accepted: Optional[Strategy]


@dataclass(frozen=True)
class RevoteResult:
    deltas: dict[str, int]
    accepted: tuple[Strategy, ...]
    acceptance_points: dict[str, int]
    convince_points: dict[str, int]


@dataclass(frozen=True)
class RollResult:
    dice: tuple[int, ...]
    total: int
    position_before: int
    position_after: int


@dataclass(frozen=True)
class EventDrawResult:
    card: EventCard
    position_before: int
    position_after: int
    power_granted: Optional[PowerCard]


@dataclass(frozen=True)
class AdvanceResult:
    winner: Optional[str]
    next_reader: Optional[str]
    skipped: tuple[str, ...]
    extra_turn_used: bool
