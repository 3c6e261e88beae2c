"""Exception hierarchy shared across the package.

Every error carries a stable ``code`` string that is safe to put on the
wire (``rejected`` frames) and into event logs.
"""

from __future__ import annotations


class MiBoardError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# -- game core ---------------------------------------------------------------

class GameError(MiBoardError):
    code = "game_error"


class WrongPhase(GameError):
    code = "wrong_phase"


class NotReader(GameError):
    code = "not_reader"


class NotInGame(GameError):
    code = "not_in_game"


class InvalidPlayerCount(GameError):
    code = "invalid_player_count"


class InvalidText(GameError):
    code = "invalid_text"


class TextExhausted(GameError):
    """All target sentences of the current text have been consumed.

    The hosting layer is expected to install a continuation text."""

    code = "text_exhausted"


class EmptySelfExplanation(GameError):
    code = "empty_self_explanation"


class AlreadySubmitted(GameError):
    code = "already_submitted"


class InvalidArgument(GameError):
    code = "invalid_argument"


class MissingArguments(GameError):
    code = "missing_arguments"


class EmptySelection(GameError):
    code = "empty_selection"


class MissingRevotes(GameError):
    code = "missing_revotes"


class ContributionLimitReached(GameError):
    code = "contribution_limit_reached"


class Forfeited(GameError):
    code = "forfeited"


class CardNotHeld(GameError):
    code = "card_not_held"


class InvalidFreezeTarget(GameError):
    code = "invalid_freeze_target"


class UnknownCommand(GameError):
    code = "unknown_command"


# -- matchmaking -------------------------------------------------------------

class MatchmakingError(MiBoardError):
    code = "matchmaking_error"


class AlreadyInRoom(MatchmakingError):
    code = "already_in_room"


class NotEnoughPlayers(MatchmakingError):
    code = "not_enough_players"


class AlreadyStarted(MatchmakingError):
    code = "already_started"


class NotMember(MatchmakingError):
    code = "not_member"


class NoSuchRoom(MatchmakingError):
    code = "no_such_room"


# -- protocol ----------------------------------------------------------------

class ProtocolError(MiBoardError):
    code = "protocol_error"


class MalformedMessage(ProtocolError):
    code = "malformed_message"


class UnknownCode(ProtocolError):
    code = "unknown_code"


class PayloadSchemaViolation(ProtocolError):
    code = "payload_schema_violation"


# -- server ------------------------------------------------------------------

class NotYourTurn(MiBoardError):
    code = "not_your_turn"


class NoSuchGame(MiBoardError):
    code = "no_such_game"


# -- persistence -------------------------------------------------------------

class PersistenceError(MiBoardError):
    code = "persistence_error"


class EmptyCorpus(PersistenceError):
    code = "empty_corpus"


class SchemaError(PersistenceError):
    code = "schema_error"

    def __init__(self, source: str, reason: str):
        super().__init__(f"{source}: {reason}")
        self.source = source
        self.reason = reason


class CorruptLog(PersistenceError):
    code = "corrupt_log"

    def __init__(self, seq: int, reason: str = ""):
        super().__init__(f"record {seq}: {reason}" if reason else f"record {seq}")
        self.seq = seq


class HashMismatch(PersistenceError):
    code = "hash_mismatch"

    def __init__(self, seq: int, expected: str, actual: str):
        super().__init__(f"record {seq}: logged {expected}, replayed {actual}")
        self.seq = seq
        self.expected = expected
        self.actual = actual
