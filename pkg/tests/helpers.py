"""Shared builders and phase-drivers for the test suite."""

from __future__ import annotations

from typing import Optional, Sequence

from miboard.core import (
    Argument,
    GameState,
    Phase,
    RulesConfig,
    Span,
    Strategy,
    TaskAssignment,
    TextDocument,
    check_win_and_advance,
    draw_event_card,
    draw_task,
    new_game,
    roll_and_move,
    score_first_vote,
    skip_power,
    submit_argument,
    submit_self_explanation,
)

SENTENCES = (
    "Water quality is evaluated using pH values for many reasons.",
    "For example, if the pH of your tap water is too high, it might "
    "indicate that calcium or magnesium deposits are forming in and may "
    "clog your water pipes.",
    "On the other hand, if the pH is too low, the water may be corroding "
    "your pipes.",
    "The pH of water is important to life.",
    "Most aquatic organisms tolerate only a narrow band of pH values.",
    "Because of this, pH is monitored wherever water quality matters.",
)

PLAYERS3 = (("p1", "Ada"), ("p2", "Ben"), ("p3", "Cam"))
PLAYERS4 = PLAYERS3 + (("p4", "Dee"),)


def make_text(
    n_sentences: int = 6,
    targets: Sequence[int] = (3, 5, 6),
    text_id: str = "water-ph",
) -> TextDocument:
    return TextDocument(
        id=text_id,
        title="Water and pH",
        sentences=SENTENCES[:n_sentences],
        targets=tuple(targets),
    )


def make_game(
    seed: int = 42,
    n: int = 3,
    config: Optional[RulesConfig] = None,
    targets: Sequence[int] = (3, 5, 6),
) -> GameState:
    players = PLAYERS3 if n == 3 else PLAYERS4
    return new_game(players, make_text(targets=targets), config or RulesConfig(), seed)


def make_argument(
    state: GameState, strategy: Strategy, freetext: Optional[str] = None
) -> Argument:
    """A minimal valid argument for the given strategy against the current
    self-explanation."""
    reasons = state.config.reasons_for(strategy)
    reason = reasons[0]
    se_len = len(state.self_explanation or "")
    needs_free = strategy is Strategy.OTHER or reason == "other"
    return Argument(
        strategy=strategy,
        reasons=(reason,),
        span=None if reason == "other" else Span(0, min(4, se_len)),
        freetext=freetext or ("because I say so" if needs_free else None),
    )


def to_identification(state: GameState, se: str = "I heard about pH in chemistry class.") -> None:
    """Drive TurnStart -> Identification for the current reader."""
    draw_task(state, state.reader.id)
    submit_self_explanation(state, state.reader.id, se)


def set_task(state: GameState, strategy: Strategy, value: int) -> None:
    """White-box: pin the task after drawing so votes can be scripted."""
    state.task = TaskAssignment(strategy=strategy, value=value)


def submit_all_arguments(state: GameState, picks: dict[str, Strategy]) -> None:
    for pid, strategy in picks.items():
        submit_argument(state, pid, make_argument(state, strategy))


def play_unanimous_round(state: GameState, pick: Optional[Strategy] = None):
    """Drive one full round where everyone votes the same strategy,
    skipping the power window. Returns (vote_result, advance_result)."""
    to_identification(state)
    assert state.task is not None
    chosen = pick or state.task.strategy
    submit_all_arguments(state, {pid: chosen for pid in state.player_ids()})
    vote = score_first_vote(state)
    reader = state.reader.id
    skip_power(state, reader)
    roll_and_move(state, reader)
    draw_event_card(state, reader)
    adv = check_win_and_advance(state)
    return vote, adv


def play_to_game_over(state: GameState, max_rounds: int = 200) -> int:
    """Unanimous rounds until someone wins; returns the number of rounds."""
    rounds = 0
    while state.phase is not Phase.GAME_OVER:
        if rounds >= max_rounds:
            raise AssertionError("game did not finish")
        if state.reveal_cursor > len(state.text.targets):
            from miboard.core import replace_text

            replace_text(state, make_text(text_id=f"cont-{rounds}"))
        play_unanimous_round(state)
        rounds += 1
    return rounds
