"""Rules configuration: every tunable the engine consults.

Defaults reproduce the standard rule set: point values {12,14,16,18,20},
reroll costs 10/5, five discussion contributions, 120 s discussion limit,
a 30-square path, a 120-card event deck and a 20-card power deck.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import SchemaError
from .types import EventCard, EventKind, PowerCard, PowerKind, Strategy

#: Reason code usable under every strategy; selecting it requires freetext
#: and lifts the span requirement.
REASON_OTHER = "other"

#: Default reason taxonomies, one list of codes per strategy. Deployments
#: override these via the rules config file or per-text corpus entries.
DEFAULT_TAXONOMIES: dict[Strategy, tuple[str, ...]] = {
    Strategy.BRIDGING: (
        "linked_to_specific_sentence",
        "linked_with_previous_idea",
        "linked_to_global_theme",
        REASON_OTHER,
    ),
    Strategy.COMPREHENSION_MONITORING: (
        "noted_understanding",
        "noted_confusion",
        "flagged_unfamiliar_term",
        REASON_OTHER,
    ),
    Strategy.ELABORATION: (
        "linked_to_prior_knowledge",
        "added_outside_example",
        "drew_personal_connection",
        REASON_OTHER,
    ),
    Strategy.PARAPHRASING: (
        "restated_in_own_words",
        "simplified_wording",
        "condensed_the_sentence",
        REASON_OTHER,
    ),
    Strategy.PREDICTION: (
        "guessed_next_possible_sentence",
        "guessed_possible_event",
        "anticipated_upcoming_topic",
        REASON_OTHER,
    ),
    Strategy.OTHER: (REASON_OTHER,),
}


@dataclass(frozen=True)
class DeckConfig:
    """Card counts for both decks.

    ``forward``/``backward`` give counts for displacements 1, 2 and 3."""

    forward: tuple[int, int, int] = (18, 18, 18)
    backward: tuple[int, int, int] = (18, 18, 18)
    draw_power: int = 12
    extra_turn: int = 7
    roll_two_dice: int = 7
    freeze: int = 6

    def event_composition(self) -> list[EventCard]:
        """Unshuffled event deck in fixed composition order."""
        cards: list[EventCard] = []
        for amount, count in zip((1, 2, 3), self.forward):
            cards.extend([EventCard(EventKind.FORWARD, amount)] * count)
        for amount, count in zip((1, 2, 3), self.backward):
            cards.extend([EventCard(EventKind.BACKWARD, amount)] * count)
        cards.extend([EventCard(EventKind.DRAW_POWER)] * self.draw_power)
        return cards

    def power_composition(self) -> list[PowerCard]:
        """Unshuffled power deck in fixed composition order."""
        return (
            [PowerCard(PowerKind.EXTRA_TURN)] * self.extra_turn
            + [PowerCard(PowerKind.ROLL_TWO_DICE)] * self.roll_two_dice
            + [PowerCard(PowerKind.FREEZE)] * self.freeze
        )

    def to_dict(self) -> dict:
        return {
            "forward": list(self.forward),
            "backward": list(self.backward),
            "draw_power": self.draw_power,
            "extra_turn": self.extra_turn,
            "roll_two_dice": self.roll_two_dice,
            "freeze": self.freeze,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeckConfig":
        kwargs = {}
        for key in ("forward", "backward"):
            if key in d:
                counts = tuple(int(c) for c in d[key])
                if len(counts) != 3 or any(c < 0 for c in counts):
                    raise SchemaError("decks", f"{key} needs 3 non-negative counts")
                kwargs[key] = counts
        for key in ("draw_power", "extra_turn", "roll_two_dice", "freeze"):
            if key in d:
                kwargs[key] = int(d[key])
        return cls(**kwargs)


@dataclass(frozen=True)
class RulesConfig:
    path_length: int = 30
    point_values: tuple[int, ...] = (12, 14, 16, 18, 20)
    strategy_reroll_cost: int = 10
    value_reroll_cost: int = 5
    discussion_message_limit: int = 5
    discussion_time_limit_s: float = 120.0
    unanimity_bonus: int = 5
    off_task_award: int = 5
    convince_bonus: int = 5
    decks: DeckConfig = DeckConfig()
    # Ambiguity knobs: whether the revote re-awards acceptance points on the
    # first-round schedule, and whether every first-round owner of an adopted
    # strategy collects the convince bonus (False: only the earliest owner
    # in player order).
    revote_acceptance_points: bool = True
    convince_pays_every_owner: bool = True
    taxonomies: dict[Strategy, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_TAXONOMIES)
    )

    def reasons_for(self, strategy: Strategy) -> tuple[str, ...]:
        return self.taxonomies.get(strategy, (REASON_OTHER,))

    def with_taxonomies(self, taxonomies: dict[Strategy, tuple[str, ...]]) -> "RulesConfig":
        """Copy of this config with per-text taxonomies merged over defaults."""
        merged = dict(self.taxonomies)
        merged.update(taxonomies)
        return replace(self, taxonomies=merged)

    def to_dict(self) -> dict:
        return {
            "path_length": self.path_length,
            "point_values": list(self.point_values),
            "strategy_reroll_cost": self.strategy_reroll_cost,
            "value_reroll_cost": self.value_reroll_cost,
            "discussion_message_limit": self.discussion_message_limit,
            "discussion_time_limit_s": self.discussion_time_limit_s,
            "unanimity_bonus": self.unanimity_bonus,
            "off_task_award": self.off_task_award,
            "convince_bonus": self.convince_bonus,
            "decks": self.decks.to_dict(),
            "revote_acceptance_points": self.revote_acceptance_points,
            "convince_pays_every_owner": self.convince_pays_every_owner,
            "taxonomies": {
                strategy.value: list(reasons)
                for strategy, reasons in sorted(self.taxonomies.items())
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RulesConfig":
        kwargs: dict = {}
        for key in (
            "path_length",
            "strategy_reroll_cost",
            "value_reroll_cost",
            "discussion_message_limit",
            "unanimity_bonus",
            "off_task_award",
            "convince_bonus",
        ):
            if key in d:
                kwargs[key] = int(d[key])
        if "point_values" in d:
            values = tuple(int(v) for v in d["point_values"])
            if not values:
                raise SchemaError("rules", "point_values must be non-empty")
            kwargs["point_values"] = values
        if "discussion_time_limit_s" in d:
            kwargs["discussion_time_limit_s"] = float(d["discussion_time_limit_s"])
        if "decks" in d:
            kwargs["decks"] = DeckConfig.from_dict(d["decks"])
        for key in ("revote_acceptance_points", "convince_pays_every_owner"):
            if key in d:
                kwargs[key] = bool(d[key])
        if "taxonomies" in d:
            kwargs["taxonomies"] = parse_taxonomies(d["taxonomies"])
        config = cls(**kwargs)
        if config.path_length < 1:
            raise SchemaError("rules", "path_length must be positive")
        if config.discussion_message_limit < 1:
            raise SchemaError("rules", "discussion_message_limit must be positive")
        if config.discussion_time_limit_s <= 0:
            raise SchemaError("rules", "discussion_time_limit_s must be positive")
        if config.strategy_reroll_cost < 0 or config.value_reroll_cost < 0:
            raise SchemaError("rules", "reroll costs cannot be negative")
        if any(v < 1 for v in config.point_values):
            raise SchemaError("rules", "point values must be positive")
        return config


def parse_taxonomies(raw: dict) -> dict[Strategy, tuple[str, ...]]:
    """Parse a {strategy: [reason codes]} mapping, validating completeness
    of each entry but not requiring all six strategies to be present."""
    taxonomies: dict[Strategy, tuple[str, ...]] = {}
    for key, reasons in raw.items():
        try:
            strategy = Strategy(key)
        except ValueError:
            raise SchemaError("taxonomies", f"unknown strategy {key!r}") from None
        codes = tuple(str(r) for r in reasons)
        if not codes:
            raise SchemaError("taxonomies", f"{key} has an empty reason list")
        taxonomies[strategy] = codes
    return taxonomies
