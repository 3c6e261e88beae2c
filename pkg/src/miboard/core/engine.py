"""Game rules: every state transition of one game instance.

All operations are synchronous, deterministic and free of I/O. Each takes
the :class:`~miboard.core.types.GameState` first, validates phase and
actor, mutates the state in place and returns a result object where the
operation produces data beyond the state itself.

Randomness contract: one ``random.Random`` (CPython's Mersenne Twister,
stable across platforms) seeded per game. Draws consume the stream in a
fixed order so replaying the command log from the seed is exact:

1. at construction: event deck shuffle, then power deck shuffle;
2. per command, in application order: task draw (strategy, then value),
   each reroll (one draw), each die, and deck reshuffles at the moment a
   draw finds the deck empty.
"""

from __future__ import annotations

import random
from dataclasses import replace
from typing import Optional, Sequence

from ..errors import (
    AlreadySubmitted,
    CardNotHeld,
    ContributionLimitReached,
    EmptySelection,
    EmptySelfExplanation,
    Forfeited,
    InvalidArgument,
    InvalidFreezeTarget,
    InvalidPlayerCount,
    MissingArguments,
    MissingRevotes,
    NotInGame,
    NotReader,
    TextExhausted,
    UnknownCommand,
    WrongPhase,
)
from .config import REASON_OTHER, RulesConfig
from .types import (
    AdvanceResult,
    Argument,
    Board,
    DiscussionState,
    EventDrawResult,
    EventKind,
    FirstVoteResult,
    GameState,
    Phase,
    Player,
    PowerKind,
    RevoteResult,
    RollResult,
    Strategy,
    TASK_STRATEGIES,
    TaskAssignment,
    TextDocument,
    VisibleText,
    VoteOutcome,
)

DIE_FACES = 6


# -- guards -------------------------------------------------------------

def _require_phase(state: GameState, *phases: Phase) -> None:
    if state.phase not in phases:
        raise WrongPhase(f"expected {', '.join(p.value for p in phases)}, in {state.phase.value}")


def _require_reader(state: GameState, player_id: str) -> Player:
    if state.player_by_id(player_id) is None:
        raise NotInGame(player_id)
    if player_id != state.reader.id:
        raise NotReader(f"{player_id} is not the reader")
    return state.reader


def _require_player(state: GameState, player_id: str) -> Player:
    player = state.player_by_id(player_id)
    if player is None:
        raise NotInGame(player_id)
    return player


# -- construction -------------------------------------------------------

def new_game(
    players: Sequence[tuple[str, str]],
    text: TextDocument,
    config: RulesConfig,
    seed: int,
    game_id: Optional[str] = None,
) -> GameState:
    """Build the initial state: shuffled decks, zero scores, tokens at 0.

    ``players`` is an ordered sequence of (id, display name); order fixes
    the reader rotation, starting at index 0.
    """
    if not 3 <= len(players) <= 4:
        raise InvalidPlayerCount(f"need 3 or 4 players, got {len(players)}")
    ids = [pid for pid, _ in players]
    if len(set(ids)) != len(ids):
        raise InvalidPlayerCount("duplicate player ids")
    text.validate()

    rng = random.Random(seed)
    event_deck = config.decks.event_composition()
    rng.shuffle(event_deck)
    power_deck = config.decks.power_composition()
    rng.shuffle(power_deck)

    board = Board(
        path_length=config.path_length,
        tokens={pid: 0 for pid in ids},
        event_deck=event_deck,
        event_discard=[],
        power_deck=power_deck,
        power_discard=[],
        held_powers={pid: [] for pid in ids},
    )
    return GameState(
        game_id=game_id or f"game-{seed:x}",
        seed=seed,
        players=[Player(id=pid, name=name) for pid, name in players],
        reader_index=0,
        frozen={pid: False for pid in ids},
        phase=Phase.TURN_START,
        board=board,
        text=text,
        reveal_cursor=1,
        turn_number=1,
        task=None,
        self_explanation=None,
        first_votes={},
        revotes={},
        discussion=None,
        extra_turn_pending=False,
        two_dice_armed=False,
        winner=None,
        config=config,
        rng=rng,
    )


# -- text reveal --------------------------------------------------------

def visible_text(state: GameState) -> VisibleText:
    """Sentences revealed for the current turn: everything up to and
    including the current target sentence."""
    targets = state.text.targets
    if state.reveal_cursor > len(targets):
        raise TextExhausted(
            f"{state.text.id}: all {len(targets)} targets consumed"
        )
    target = targets[state.reveal_cursor - 1]
    return VisibleText(sentences=state.text.sentences[:target], target_index=target)


def replace_text(state: GameState, text: TextDocument) -> None:
    """Install a continuation text once the current one is exhausted and
    restart the reveal cursor at its first target."""
    _require_phase(state, Phase.TURN_START)
    text.validate()
    state.text = text
    state.reveal_cursor = 1


# -- reader turn: task and self-explanation -----------------------------

def draw_task(state: GameState, player_id: str) -> TaskAssignment:
    """Assign the reader a uniformly drawn (strategy, value) pair, the
    digital equivalent of drawing a task card."""
    _require_phase(state, Phase.TURN_START)
    _require_reader(state, player_id)
    if state.reveal_cursor > len(state.text.targets):
        raise TextExhausted(state.text.id)
    strategy = state.rng.choice(TASK_STRATEGIES)
    value = state.rng.choice(state.config.point_values)
    state.task = TaskAssignment(strategy=strategy, value=value)
    state.phase = Phase.READER_COMPOSE
    return state.task


def reroll_strategy(state: GameState, player_id: str) -> TaskAssignment:
    """Swap the assigned strategy for a different one, at a cost.

    The resample excludes the current strategy, and the cost applies even
    if it drives the score negative."""
    _require_phase(state, Phase.READER_COMPOSE)
    reader = _require_reader(state, player_id)
    assert state.task is not None
    options = [s for s in TASK_STRATEGIES if s is not state.task.strategy]
    strategy = state.rng.choice(options)
    reader.score -= state.config.strategy_reroll_cost
    state.task = replace(
        state.task, strategy=strategy, strategy_rerolls=state.task.strategy_rerolls + 1
    )
    return state.task


def reroll_value(state: GameState, player_id: str) -> TaskAssignment:
    """Swap the assigned point value for a different one, at a cost."""
    _require_phase(state, Phase.READER_COMPOSE)
    reader = _require_reader(state, player_id)
    assert state.task is not None
    options = [v for v in state.config.point_values if v != state.task.value]
    value = state.rng.choice(options)
    reader.score -= state.config.value_reroll_cost
    state.task = replace(
        state.task, value=value, value_rerolls=state.task.value_rerolls + 1
    )
    return state.task


def submit_self_explanation(state: GameState, player_id: str, text: str) -> None:
    _require_phase(state, Phase.READER_COMPOSE)
    _require_reader(state, player_id)
    if not text or not text.strip():
        raise EmptySelfExplanation()
    state.self_explanation = text
    state.phase = Phase.IDENTIFICATION


# -- identification (first, single-select vote) -------------------------

def validate_argument(arg: Argument, se_text: str, config: RulesConfig) -> None:
    """Check an argument against the strategy's reason taxonomy and the
    bounds of the self-explanation string."""
    if not isinstance(arg.strategy, Strategy):
        raise InvalidArgument(f"unknown strategy {arg.strategy!r}")
    if not arg.reasons:
        raise InvalidArgument("at least one reason is required")
    allowed = config.reasons_for(arg.strategy)
    for reason in arg.reasons:
        if reason not in allowed:
            raise InvalidArgument(
                f"reason {reason!r} not in the {arg.strategy.value} taxonomy"
            )
    needs_freetext = arg.strategy is Strategy.OTHER or REASON_OTHER in arg.reasons
    if needs_freetext and not (arg.freetext and arg.freetext.strip()):
        raise InvalidArgument("freetext required when strategy or reason is Other")
    only_other_reasons = all(r == REASON_OTHER for r in arg.reasons)
    if arg.span is None:
        if not only_other_reasons:
            raise InvalidArgument("span highlight required for this reason")
    else:
        if not (0 <= arg.span.start <= arg.span.end <= len(se_text)):
            raise InvalidArgument(
                f"span [{arg.span.start}, {arg.span.end}) out of bounds for "
                f"SE of length {len(se_text)}"
            )


def submit_argument(state: GameState, player_id: str, arg: Argument) -> bool:
    """Record a sealed argument; returns True when this submission was the
    last one and the phase moved to the first summary.

    Arguments stay hidden from the other players until everyone has
    submitted (commit-reveal)."""
    _require_phase(state, Phase.IDENTIFICATION)
    _require_player(state, player_id)
    if player_id in state.first_votes:
        raise AlreadySubmitted(player_id)
    assert state.self_explanation is not None
    validate_argument(arg, state.self_explanation, state.config)
    state.first_votes[player_id] = arg
    if len(state.first_votes) == len(state.players):
        state.phase = Phase.FIRST_SUMMARY
        return True
    return False


def score_first_vote(state: GameState) -> FirstVoteResult:
    """Score the single-select vote.

    Points are awarded only on unanimity: the reader earns the task value
    if the common pick is the specified strategy (a guesser earns half,
    rounded down), everyone earns the flat award if it is some other
    strategy, and everyone earns the unanimity bonus on top. Any
    disagreement defers all scoring to the revote and opens a discussion.
    """
    _require_phase(state, Phase.FIRST_SUMMARY)
    ids = state.player_ids()
    if set(state.first_votes) != set(ids):
        raise MissingArguments(f"have {len(state.first_votes)} of {len(ids)}")
    assert state.task is not None
    cfg = state.config
    deltas = {pid: 0 for pid in ids}
    picks = {pid: arg.strategy for pid, arg in state.first_votes.items()}

    if len(set(picks.values())) == 1:
        common = picks[ids[0]]
        for pid in ids:
            if common is state.task.strategy:
                if pid == state.reader.id:
                    deltas[pid] += state.task.value
                else:
                    deltas[pid] += state.task.value // 2
            else:
                deltas[pid] += cfg.off_task_award
            deltas[pid] += cfg.unanimity_bonus
        for player in state.players:
            player.score += deltas[player.id]
        state.phase = Phase.POWER_CARD_WINDOW
        return FirstVoteResult(deltas=deltas, outcome=VoteOutcome.UNANIMOUS, accepted=common)

    state.discussion = DiscussionState(contributions={pid: 0 for pid in ids})
    state.phase = Phase.DISCUSSION
    return FirstVoteResult(deltas=deltas, outcome=VoteOutcome.DISAGREEMENT, accepted=None)


# -- discussion ---------------------------------------------------------

def _discussion_finished(state: GameState) -> bool:
    assert state.discussion is not None
    limit = state.config.discussion_message_limit
    return all(
        state.discussion.contributions[pid] >= limit
        or pid in state.discussion.forfeited
        for pid in state.player_ids()
    )


def post_discussion_message(state: GameState, player_id: str, text: str) -> int:
    """Count one discussion contribution; returns how many the player has
    left. Hitting the limit for every player closes the discussion."""
    _require_phase(state, Phase.DISCUSSION)
    _require_player(state, player_id)
    assert state.discussion is not None
    if player_id in state.discussion.forfeited:
        raise Forfeited(player_id)
    limit = state.config.discussion_message_limit
    if state.discussion.contributions[player_id] >= limit:
        raise ContributionLimitReached(f"{player_id} already sent {limit}")
    state.discussion.contributions[player_id] += 1
    if _discussion_finished(state):
        state.phase = Phase.REVOTE
    return limit - state.discussion.contributions[player_id]


def pass_discussion(state: GameState, player_id: str) -> None:
    """Forfeit the player's remaining contributions; idempotent."""
    _require_phase(state, Phase.DISCUSSION)
    _require_player(state, player_id)
    assert state.discussion is not None
    state.discussion.forfeited.add(player_id)
    if _discussion_finished(state):
        state.phase = Phase.REVOTE


def discussion_timeout(state: GameState) -> None:
    """Close the discussion because the time limit elapsed. The clock is
    owned by the hosting layer; the core only ever sees this command."""
    _require_phase(state, Phase.DISCUSSION)
    assert state.discussion is not None
    state.discussion.timed_out = True
    state.phase = Phase.REVOTE


# -- revote (multi-select) ----------------------------------------------

def submit_revote(state: GameState, player_id: str, strategies: frozenset[Strategy]) -> bool:
    """Record a sealed multi-select revote; returns True when complete."""
    _require_phase(state, Phase.REVOTE)
    _require_player(state, player_id)
    if player_id in state.revotes:
        raise AlreadySubmitted(player_id)
    if not strategies:
        raise EmptySelection()
    for s in strategies:
        if not isinstance(s, Strategy):
            raise InvalidArgument(f"unknown strategy {s!r}")
    state.revotes[player_id] = frozenset(strategies)
    if len(state.revotes) == len(state.players):
        state.phase = Phase.FINAL_SUMMARY
        return True
    return False


def score_revote(state: GameState) -> RevoteResult:
    """Score the multi-select revote.

    A strategy is accepted when a strict majority of players included it.
    Acceptance points follow the first-round schedule (reader: full value
    on the specified strategy he selected; guesser: half; anyone: the flat
    award for an accepted non-specified pick). On top of that, a player
    earns the convince bonus for each opponent who adopted that player's
    first-round strategy after originally picking something different.
    """
    _require_phase(state, Phase.FINAL_SUMMARY)
    ids = state.player_ids()
    if set(state.revotes) != set(ids):
        raise MissingRevotes(f"have {len(state.revotes)} of {len(ids)}")
    assert state.task is not None
    cfg = state.config
    n = len(ids)

    accepted = tuple(
        s for s in Strategy
        if sum(1 for pid in ids if s in state.revotes[pid]) * 2 > n
    )

    acceptance_points = {pid: 0 for pid in ids}
    if cfg.revote_acceptance_points:
        for s in accepted:
            for pid in ids:
                if s not in state.revotes[pid]:
                    continue
                if s is state.task.strategy:
                    if pid == state.reader.id:
                        acceptance_points[pid] += state.task.value
                    else:
                        acceptance_points[pid] += state.task.value // 2
                else:
                    acceptance_points[pid] += cfg.off_task_award

    first_pick = {pid: state.first_votes[pid].strategy for pid in ids}
    convince_points = {pid: 0 for pid in ids}
    for adopter in ids:
        adopted = {
            s for s in state.revotes[adopter] if s is not first_pick[adopter]
        }
        for s in adopted:
            owners = [pid for pid in ids if pid != adopter and first_pick[pid] is s]
            if not owners:
                continue
            if cfg.convince_pays_every_owner:
                for owner in owners:
                    convince_points[owner] += cfg.convince_bonus
            else:
                convince_points[owners[0]] += cfg.convince_bonus

    deltas = {
        pid: acceptance_points[pid] + convince_points[pid] for pid in ids
    }
    for player in state.players:
        player.score += deltas[player.id]
    state.phase = Phase.POWER_CARD_WINDOW
    return RevoteResult(
        deltas=deltas,
        accepted=accepted,
        acceptance_points=acceptance_points,
        convince_points=convince_points,
    )


# -- power cards, dice, events ------------------------------------------

def use_power_card(
    state: GameState,
    player_id: str,
    kind: PowerKind,
    target: Optional[str] = None,
) -> None:
    """Play one held power card. The reader may play several before
    skipping; the card always moves to the power discard."""
    _require_phase(state, Phase.POWER_CARD_WINDOW)
    _require_reader(state, player_id)
    hand = state.board.held_powers[player_id]
    card = next((c for c in hand if c.kind is kind), None)
    if card is None:
        raise CardNotHeld(kind.value)
    if kind is PowerKind.FREEZE:
        if target is None or target == player_id or state.player_by_id(target) is None:
            raise InvalidFreezeTarget(repr(target))
        state.frozen[target] = True
    elif kind is PowerKind.EXTRA_TURN:
        state.extra_turn_pending = True
    elif kind is PowerKind.ROLL_TWO_DICE:
        state.two_dice_armed = True
    hand.remove(card)
    state.board.power_discard.append(card)


def skip_power(state: GameState, player_id: str) -> None:
    _require_phase(state, Phase.POWER_CARD_WINDOW)
    _require_reader(state, player_id)
    state.phase = Phase.DICE_ROLL


def roll_and_move(state: GameState, player_id: str) -> RollResult:
    """Roll one die (or two, if armed) and advance the reader's token,
    clamped at the end of the path."""
    _require_phase(state, Phase.DICE_ROLL)
    _require_reader(state, player_id)
    count = 2 if state.two_dice_armed else 1
    dice = tuple(state.rng.randint(1, DIE_FACES) for _ in range(count))
    state.two_dice_armed = False
    before = state.board.tokens[player_id]
    after = min(before + sum(dice), state.board.path_length)
    state.board.tokens[player_id] = after
    state.phase = Phase.EVENT_CARD_DRAW
    return RollResult(dice=dice, total=sum(dice), position_before=before, position_after=after)


def draw_event_card(state: GameState, player_id: str) -> EventDrawResult:
    """Draw and apply the top event card.

    Movement is clamped to the board and never chains into another event
    draw. An empty deck is rebuilt by deterministically reshuffling the
    discard pile; the same applies to the power deck on a power draw.
    """
    _require_phase(state, Phase.EVENT_CARD_DRAW)
    _require_reader(state, player_id)
    board = state.board
    if not board.event_deck:
        board.event_deck = board.event_discard
        board.event_discard = []
        state.rng.shuffle(board.event_deck)
    card = board.event_deck.pop(0)

    before = board.tokens[player_id]
    after = before
    power = None
    if card.kind is EventKind.FORWARD:
        after = min(before + card.amount, board.path_length)
    elif card.kind is EventKind.BACKWARD:
        after = max(before - card.amount, 0)
    else:
        if not board.power_deck:
            board.power_deck = board.power_discard
            board.power_discard = []
            state.rng.shuffle(board.power_deck)
        if board.power_deck:  # every power card may be in players' hands
            power = board.power_deck.pop(0)
            board.held_powers[player_id].append(power)
    board.tokens[player_id] = after
    board.event_discard.append(card)
    state.phase = Phase.WIN_CHECK
    return EventDrawResult(
        card=card, position_before=before, position_after=after, power_granted=power
    )


def check_win_and_advance(state: GameState) -> AdvanceResult:
    """End the game if a token reached the end of the path; otherwise hand
    the turn to the next reader, honoring extra turns and consuming
    pending freezes by skipping over their owners."""
    _require_phase(state, Phase.WIN_CHECK)
    for player in state.players:
        if state.board.tokens[player.id] >= state.board.path_length:
            state.winner = player.id
            state.phase = Phase.GAME_OVER
            return AdvanceResult(
                winner=player.id, next_reader=None, skipped=(), extra_turn_used=False
            )

    skipped: list[str] = []
    extra = state.extra_turn_pending
    if extra:
        state.extra_turn_pending = False
    else:
        n = len(state.players)
        i = (state.reader_index + 1) % n
        guard = 0
        while state.frozen[state.players[i].id] and guard < n:
            state.frozen[state.players[i].id] = False
            skipped.append(state.players[i].id)
            i = (i + 1) % n
            guard += 1
        state.reader_index = i

    state.turn_number += 1
    state.reveal_cursor += 1
    state.task = None
    state.self_explanation = None
    state.first_votes = {}
    state.revotes = {}
    state.discussion = None
    state.two_dice_armed = False
    state.phase = Phase.TURN_START
    return AdvanceResult(
        winner=None,
        next_reader=state.reader.id,
        skipped=tuple(skipped),
        extra_turn_used=extra,
    )


# -- command routing ----------------------------------------------------

#: Commands a client may issue over the wire, mapped 1:1 onto operations.
CLIENT_COMMANDS = frozenset({
    "reroll_strategy",
    "reroll_value",
    "submit_se",
    "submit_argument",
    "discussion_send",
    "discussion_pass",
    "revote_submit",
    "use_power",
    "skip_power",
    "roll_dice",
    "draw_event",
})

#: Commands injected by the hosting layer (auto-steps, the discussion
#: clock, text continuation). Logged with actor "server" except draw_task,
#: which is recorded against the reader it assigns to.
SERVER_COMMANDS = frozenset({
    "draw_task",
    "score_first_vote",
    "score_revote",
    "check_win",
    "discussion_timeout",
    "replace_text",
})

ALL_COMMANDS = CLIENT_COMMANDS | SERVER_COMMANDS


def _str_field(payload: dict, key: str) -> str:
    value = payload[key]
    if not isinstance(value, str):
        raise InvalidArgument(f"{key} must be a string, got {type(value).__name__}")
    return value


def apply_command(state: GameState, actor: str, code: str, payload: dict):
    """Apply one logged or wire-delivered command to the state.

    This is the single entry point the server and the replay fold share,
    which is what makes the event log authoritative. Payloads follow the
    wire schemas documented in docs/protocol.md.
    """
    try:
        if code == "draw_task":
            return draw_task(state, actor)
        if code == "reroll_strategy":
            return reroll_strategy(state, actor)
        if code == "reroll_value":
            return reroll_value(state, actor)
        if code == "submit_se":
            return submit_self_explanation(state, actor, _str_field(payload, "text"))
        if code == "submit_argument":
            return submit_argument(state, actor, Argument.from_dict(payload))
        if code == "discussion_send":
            return post_discussion_message(state, actor, _str_field(payload, "text"))
        if code == "discussion_pass":
            return pass_discussion(state, actor)
        if code == "revote_submit":
            return submit_revote(
                state, actor, frozenset(Strategy(s) for s in payload["strategies"])
            )
        if code == "use_power":
            return use_power_card(
                state, actor, PowerKind(payload["kind"]), payload.get("target")
            )
        if code == "skip_power":
            return skip_power(state, actor)
        if code == "roll_dice":
            return roll_and_move(state, actor)
        if code == "draw_event":
            return draw_event_card(state, actor)
        if code == "score_first_vote":
            return score_first_vote(state)
        if code == "score_revote":
            return score_revote(state)
        if code == "check_win":
            return check_win_and_advance(state)
        if code == "discussion_timeout":
            return discussion_timeout(state)
        if code == "replace_text":
            return replace_text(state, TextDocument.from_dict(payload["text"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgument(f"bad payload for {code}: {exc}") from exc
    raise UnknownCommand(code)
