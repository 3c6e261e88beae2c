"""Pure, deterministic game rules: no I/O, no clocks, no sockets.

Everything a game needs lives behind :func:`new_game` plus the operation
functions in :mod:`miboard.core.engine`; hosting layers talk to it through
:func:`apply_command` so that live play and log replay share one code path.
"""

from .config import (
    DEFAULT_TAXONOMIES,
    REASON_OTHER,
    DeckConfig,
    RulesConfig,
    parse_taxonomies,
)
from .engine import (
    ALL_COMMANDS,
    CLIENT_COMMANDS,
    SERVER_COMMANDS,
    apply_command,
    check_win_and_advance,
    discussion_timeout,
    draw_event_card,
    draw_task,
    new_game,
    pass_discussion,
    post_discussion_message,
    replace_text,
    reroll_strategy,
    reroll_value,
    roll_and_move,
    score_first_vote,
    score_revote,
    skip_power,
    submit_argument,
    submit_revote,
    submit_self_explanation,
    use_power_card,
    validate_argument,
    visible_text,
)
from .types import (
    AdvanceResult,
    Argument,
    Board,
    DiscussionState,
    EventCard,
    EventDrawResult,
    EventKind,
    FirstVoteResult,
    GameState,
    Phase,
    Player,
    PowerCard,
    PowerKind,
    RevoteResult,
    RollResult,
    Span,
    Strategy,
    TASK_STRATEGIES,
    TaskAssignment,
    TextDocument,
    VisibleText,
    VoteOutcome,
)
from .views import canonical_state, public_view, state_hash, view_for

__all__ = [
    "ALL_COMMANDS",
    "CLIENT_COMMANDS",
    "DEFAULT_TAXONOMIES",
    "REASON_OTHER",
    "SERVER_COMMANDS",
    "TASK_STRATEGIES",
    "AdvanceResult",
    "Argument",
    "Board",
    "DeckConfig",
    "DiscussionState",
    "EventCard",
    "EventDrawResult",
    "EventKind",
    "FirstVoteResult",
    "GameState",
    "Phase",
    "Player",
    "PowerCard",
    "PowerKind",
    "RevoteResult",
    "RollResult",
    "RulesConfig",
    "parse_taxonomies",
    "Span",
    "Strategy",
    "TaskAssignment",
    "TextDocument",
    "VisibleText",
    "VoteOutcome",
    "apply_command",
    "canonical_state",
    "check_win_and_advance",
    "discussion_timeout",
    "draw_event_card",
    "draw_task",
    "new_game",
    "pass_discussion",
    "post_discussion_message",
    "public_view",
    "replace_text",
    "reroll_strategy",
    "reroll_value",
    "roll_and_move",
    "score_first_vote",
    "score_revote",
    "skip_power",
    "state_hash",
    "submit_argument",
    "submit_revote",
    "submit_self_explanation",
    "use_power_card",
    "validate_argument",
    "view_for",
]
