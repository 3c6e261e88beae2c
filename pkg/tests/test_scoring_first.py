"""First (single-select) vote scoring against the independent oracle."""

from __future__ import annotations

import itertools

import pytest

from miboard.core import (
    Phase,
    Strategy,
    VoteOutcome,
    score_first_vote,
    submit_argument,
)
from miboard.errors import MissingArguments, WrongPhase

from helpers import make_argument, make_game, set_task, to_identification
from oracles import first_vote_oracle


def drive_first_vote(picks, task_strategy, task_value, n=3, seed=7):
    """Build a game, pin the task, submit the given picks, score."""
    state = make_game(seed=seed, n=n)
    to_identification(state)
    set_task(state, task_strategy, task_value)
    ids = state.player_ids()
    for pid, strategy in zip(ids, picks):
        submit_argument(state, pid, make_argument(state, strategy))
    result = score_first_vote(state)
    return state, result


class TestUnanimous:
    def test_all_pick_specified_value_20(self):
        state, result = drive_first_vote(
            [Strategy.PREDICTION] * 3, Strategy.PREDICTION, 20
        )
        reader = state.reader.id
        assert result.outcome is VoteOutcome.UNANIMOUS
        assert result.deltas[reader] == 25
        for pid in state.player_ids():
            if pid != reader:
                assert result.deltas[pid] == 15
        assert state.phase is Phase.POWER_CARD_WINDOW

    def test_all_pick_non_specified(self):
        state, result = drive_first_vote(
            [Strategy.ELABORATION] * 3, Strategy.PREDICTION, 16
        )
        assert result.outcome is VoteOutcome.UNANIMOUS
        assert all(d == 10 for d in result.deltas.values())

    def test_half_points_floor(self):
        # Odd value exercises the floor; only possible via custom config.
        state, result = drive_first_vote(
            [Strategy.BRIDGING] * 3, Strategy.BRIDGING, 13
        )
        reader = state.reader.id
        assert result.deltas[reader] == 18  # 13 + 5
        for pid in state.player_ids():
            if pid != reader:
                assert result.deltas[pid] == 11  # floor(13/2)=6, +5

    def test_unanimous_other_counts_as_non_specified(self):
        state, result = drive_first_vote(
            [Strategy.OTHER] * 3, Strategy.PREDICTION, 20
        )
        assert result.outcome is VoteOutcome.UNANIMOUS
        assert all(d == 10 for d in result.deltas.values())

    def test_scores_applied_to_players(self):
        state, result = drive_first_vote(
            [Strategy.PREDICTION] * 3, Strategy.PREDICTION, 12
        )
        for player in state.players:
            assert player.score == result.deltas[player.id]


class TestDisagreement:
    def test_any_disagreement_scores_nothing(self):
        state, result = drive_first_vote(
            [Strategy.PREDICTION, Strategy.PREDICTION, Strategy.BRIDGING],
            Strategy.PREDICTION,
            20,
        )
        assert result.outcome is VoteOutcome.DISAGREEMENT
        assert all(d == 0 for d in result.deltas.values())
        assert state.phase is Phase.DISCUSSION
        assert all(p.score == 0 for p in state.players)

    def test_discussion_counters_initialized(self):
        state, _ = drive_first_vote(
            [Strategy.PREDICTION, Strategy.BRIDGING, Strategy.OTHER],
            Strategy.PREDICTION,
            14,
        )
        assert state.discussion is not None
        assert state.discussion.contributions == {pid: 0 for pid in state.player_ids()}

    def test_majority_without_unanimity_still_scores_nothing(self):
        # 3 of 4 agreeing is a strict majority but not unanimity.
        state, result = drive_first_vote(
            [Strategy.BRIDGING] * 3 + [Strategy.PREDICTION],
            Strategy.BRIDGING,
            20,
            n=4,
        )
        assert result.outcome is VoteOutcome.DISAGREEMENT
        assert all(d == 0 for d in result.deltas.values())


class TestGuards:
    def test_wrong_phase(self):
        state = make_game()
        with pytest.raises(WrongPhase):
            score_first_vote(state)

    def test_missing_arguments(self):
        state = make_game()
        to_identification(state)
        submit_argument(state, "p1", make_argument(state, Strategy.BRIDGING))
        state.phase = Phase.FIRST_SUMMARY  # white-box: force early scoring
        with pytest.raises(MissingArguments):
            score_first_vote(state)


class TestOracleEquivalence:
    """Exhaustive n=3 sweep here; the timed n=3 and n=4 sweeps live in the
    acceptance suite."""

    def test_all_three_player_tables(self):
        state = make_game(seed=11)
        to_identification(state)
        ids = state.player_ids()
        reader = state.reader.id
        for table in itertools.product(list(Strategy), repeat=3):
            for task_strategy in (Strategy.PREDICTION, Strategy.BRIDGING):
                for value in (12, 20):
                    set_task(state, task_strategy, value)
                    state.phase = Phase.FIRST_SUMMARY
                    state.first_votes = {
                        pid: make_argument(state, s) for pid, s in zip(ids, table)
                    }
                    for p in state.players:
                        p.score = 0
                    result = score_first_vote(state)
                    expected, outcome = first_vote_oracle(
                        {pid: s.value for pid, s in zip(ids, table)},
                        reader,
                        task_strategy.value,
                        value,
                    )
                    assert result.deltas == expected, (table, task_strategy, value)
                    assert result.outcome.value == outcome
