"""Commit-reveal enforcement in the state views: sealed submissions and
the reader's task never leak early through any query."""

from __future__ import annotations

import json

from miboard.core import (
    Phase,
    Strategy,
    discussion_timeout,
    public_view,
    score_first_vote,
    score_revote,
    skip_power,
    submit_argument,
    submit_revote,
    view_for,
)

from helpers import make_argument, make_game, submit_all_arguments, to_identification


def views_as_text(state, player_id):
    """Serialize a player's whole visible world for leak scanning."""
    return json.dumps(view_for(state, player_id), sort_keys=True)


class TestTaskSecrecy:
    def test_task_hidden_from_guessers_before_summary(self):
        state = make_game()
        to_identification(state)
        task_strategy = state.task.strategy.value
        assert public_view(state)["task"] is None
        guesser_view = view_for(state, "p2")
        assert guesser_view["task"] is None
        assert "task" not in guesser_view["private"]
        # the raw strategy string must not appear anywhere in the guesser's
        # world except as part of the static strategy vocabulary, so check
        # the specific task object shape instead of substrings
        assert guesser_view["private"].get("task") is None

    def test_reader_sees_own_task(self):
        state = make_game()
        to_identification(state)
        reader_view = view_for(state, state.reader.id)
        assert reader_view["private"]["task"]["strategy"] == state.task.strategy.value
        assert reader_view["private"]["task"]["value"] == state.task.value

    def test_task_public_after_unanimous_scoring(self):
        state = make_game()
        to_identification(state)
        submit_all_arguments(
            state, {pid: state.task.strategy for pid in state.player_ids()}
        )
        assert public_view(state)["task"] is None  # FirstSummary: still sealed
        score_first_vote(state)
        assert state.phase is Phase.POWER_CARD_WINDOW
        assert public_view(state)["task"]["value"] == state.task.value

    def test_task_sealed_through_discussion_and_revote(self):
        state = make_game()
        to_identification(state)
        picks = dict.fromkeys(state.player_ids(), Strategy.PREDICTION)
        picks["p2"] = Strategy.BRIDGING
        if state.task.strategy is Strategy.PREDICTION:
            picks["p1"] = Strategy.ELABORATION
        submit_all_arguments(state, picks)
        score_first_vote(state)
        assert state.phase is Phase.DISCUSSION
        assert view_for(state, "p2")["task"] is None
        discussion_timeout(state)
        assert view_for(state, "p2")["task"] is None
        for pid in state.player_ids():
            submit_revote(state, pid, frozenset({Strategy.PREDICTION}))
        score_revote(state)
        assert view_for(state, "p2")["task"] is not None


class TestArgumentSealing:
    def test_partial_submissions_invisible_to_others(self):
        state = make_game()
        to_identification(state)
        submit_argument(state, "p1", make_argument(state, Strategy.BRIDGING))
        pub = public_view(state)
        assert pub["arguments"] is None
        assert pub["submitted_arguments"] == ["p1"]  # who, not what
        p2_view = view_for(state, "p2")
        assert p2_view["arguments"] is None
        assert "own_argument" not in p2_view["private"]

    def test_own_argument_visible_to_self(self):
        state = make_game()
        to_identification(state)
        submit_argument(state, "p1", make_argument(state, Strategy.BRIDGING))
        assert (
            view_for(state, "p1")["private"]["own_argument"]["strategy"] == "bridging"
        )

    def test_all_revealed_after_completion(self):
        state = make_game()
        to_identification(state)
        submit_all_arguments(
            state, {pid: Strategy.PARAPHRASING for pid in state.player_ids()}
        )
        pub = public_view(state)
        assert set(pub["arguments"]) == set(state.player_ids())


class TestRevoteSealing:
    def drive_to_revote(self):
        state = make_game()
        to_identification(state)
        picks = {
            "p1": Strategy.PREDICTION,
            "p2": Strategy.BRIDGING,
            "p3": Strategy.ELABORATION,
        }
        submit_all_arguments(state, picks)
        score_first_vote(state)
        discussion_timeout(state)
        return state

    def test_partial_revotes_sealed(self):
        state = self.drive_to_revote()
        submit_revote(state, "p1", frozenset({Strategy.PREDICTION}))
        pub = public_view(state)
        assert pub["revotes"] is None
        assert pub["submitted_revotes"] == ["p1"]
        assert view_for(state, "p2")["revotes"] is None
        assert view_for(state, "p1")["private"]["own_revote"] == ["prediction"]

    def test_revealed_at_final_summary(self):
        state = self.drive_to_revote()
        for pid in state.player_ids():
            submit_revote(state, pid, frozenset({Strategy.PREDICTION}))
        assert state.phase is Phase.FINAL_SUMMARY
        assert set(public_view(state)["revotes"]) == set(state.player_ids())


class TestPowerCardPrivacy:
    def test_hand_kinds_private_counts_public(self):
        state = make_game()
        from miboard.core import PowerCard, PowerKind

        card = state.board.power_deck.pop()
        state.board.held_powers["p2"].append(card)
        pub = public_view(state)
        assert pub["held_power_counts"]["p2"] == 1
        assert "held_powers" not in pub
        assert view_for(state, "p2")["private"]["held_powers"] == [card.kind.value]
        assert view_for(state, "p1")["private"]["held_powers"] == []


class TestSelfExplanationTiming:
    def test_se_hidden_while_composing(self):
        state = make_game()
        from miboard.core import draw_task

        draw_task(state, state.reader.id)
        state.self_explanation = "draft in progress"  # white-box: simulate typing
        assert public_view(state)["self_explanation"] is None

    def test_se_public_after_submission(self):
        state = make_game()
        to_identification(state, se="Final explanation.")
        assert public_view(state)["self_explanation"] == "Final explanation."
