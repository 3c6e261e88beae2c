"""Scripted player clients that exercise a running server end to end.

Bots speak only the public wire protocol over a websocket; they never
import server internals. Turn-taking is serialized through the server's
``waiting_on`` frames: a bot acts only while its id heads the pending
list, so every scenario sends commands in one deterministic order and a
seeded server produces byte-identical event logs run after run.

Each bot writes a JSONL transcript (one envelope per line, tagged with
direction) and audits the frames it sees; a violated expectation raises
:class:`AssertionFailed` naming the step, and a stalled exchange raises
:class:`Timeout`.
"""

from __future__ import annotations

import asyncio
import json
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from websockets.asyncio.client import connect
from websockets.exceptions import ConnectionClosed

from .protocol import MAX_FRAME_BYTES, WireMessage, decode, encode

__all__ = [
    "AssertionFailed",
    "BotSpec",
    "POLICIES",
    "ScenarioError",
    "ScenarioResult",
    "Timeout",
    "load_script",
    "run_scenario",
]


class ScenarioError(Exception):
    """A scenario could not complete as scripted."""

    def __init__(self, step: str, detail: str = ""):
        self.step = step
        self.detail = detail
        super().__init__(f"{step}: {detail}" if detail else step)


class AssertionFailed(ScenarioError):
    """A bot observed a frame that contradicts its policy's expectations."""


class Timeout(ScenarioError):
    """A bot waited too long for the next frame."""


#: Policy names accepted in scenario scripts.
POLICIES = ("always_agree", "always_disagree", "argue_then_pass", "leave_at_turn")

#: Fixed, pairwise-distinct picks for the disagreeing policies, by seat.
_DISTINCT_PICKS = ("bridging", "elaboration", "prediction", "paraphrasing")

_TAG = re.compile(r"^\[([a-z_]+)\]")

_ARGUE_TEMPLATES = (
    "{name} still thinks it was {pick}.",
    "{name} heard {pick} in that explanation.",
    "For {name} this reads as {pick}.",
)


@dataclass(frozen=True)
class BotSpec:
    """One seat in a scenario script."""

    name: str
    policy: str
    leave_at_turn: Optional[int] = None

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BotSpec":
        policy = d.get("policy", "always_agree")
        if policy not in POLICIES:
            raise ScenarioError("script", f"unknown policy {policy!r}")
        leave = d.get("leave_at_turn")
        if policy == "leave_at_turn" and leave is None:
            raise ScenarioError("script", "leave_at_turn policy needs a turn number")
        return cls(name=d["name"], policy=policy,
                   leave_at_turn=None if leave is None else int(leave))


@dataclass
class ScenarioResult:
    """What a finished scenario observed, aggregated across bots."""

    game_id: Optional[str]
    players: list[str]
    winner: Optional[str]
    totals: dict[str, int]
    turns: int
    aborted: Optional[dict[str, Any]]
    transcripts: list[Path]
    first_outcomes: list[str]
    revote_accepted: list[list[str]]
    reader_tasks: list[dict[str, Any]]


def load_script(path: str | Path) -> dict[str, Any]:
    """Read a scenario script (JSON: bots list plus optional knobs)."""
    with open(path, encoding="utf-8") as fh:
        script = json.load(fh)
    if not isinstance(script, dict) or "bots" not in script:
        raise ScenarioError("script", "expected an object with a 'bots' list")
    return script


class _Bot:
    """One websocket client driven entirely by received frames."""

    def __init__(self, index: int, spec: BotSpec, url: str, out_dir: Path,
                 recv_timeout: float, seed: int):
        self.index = index
        self.spec = spec
        self.url = url
        self.recv_timeout = recv_timeout
        self.rng = random.Random(seed * 1_000_003 + index)
        self.transcript_path = out_dir / f"bot-{index}-{spec.name}.jsonl"
        self._transcript = self.transcript_path.open("w", encoding="utf-8")
        self._ws = None

        # mirrors of public frames, never of server internals
        self.session_id: Optional[str] = None
        self.game_id: Optional[str] = None
        self.players: list[str] = []
        self.taxonomies: dict[str, list[str]] = {}
        self.unanimity_bonus = 0
        self.turn_number = 0
        self.task: Optional[dict[str, Any]] = None
        self.se_text: Optional[str] = None
        self.se_tag: Optional[str] = None
        self.spoke_this_turn = False
        self.left = False
        self.scores: dict[str, int] = {}
        self.first_outcomes: list[str] = []
        self.revote_accepted: list[list[str]] = []
        self.reader_tasks: list[dict[str, Any]] = []
        self.game_over: Optional[dict[str, Any]] = None
        self.aborted: Optional[dict[str, Any]] = None

    # -- transport --------------------------------------------------------

    async def connect_and_join(self) -> None:
        self._ws = await connect(self.url, max_size=MAX_FRAME_BYTES + 64)
        await self.command("join_zone", {"name": self.spec.name})
        while True:
            msg = await self._recv("join")
            if msg.code == "room_joined":
                self.session_id = msg.payload["session_id"]
                return

    async def command(self, code: str, payload: Optional[dict[str, Any]] = None) -> None:
        msg = WireMessage(kind="control", code=code, payload=payload or {})
        assert self._ws is not None
        await self._ws.send(encode(msg))
        self._transcribe("send", msg)

    async def _recv(self, step: str) -> WireMessage:
        assert self._ws is not None
        try:
            raw = await asyncio.wait_for(self._ws.recv(), timeout=self.recv_timeout)
        except asyncio.TimeoutError:
            raise Timeout(step, f"{self.spec.name} saw no frame for "
                                f"{self.recv_timeout:.0f}s") from None
        except ConnectionClosed as exc:
            raise ScenarioError(step, f"server closed the connection: {exc}") from None
        msg = decode(raw)
        self._transcribe("recv", msg)
        return msg

    def _transcribe(self, direction: str, msg: WireMessage) -> None:
        envelope: dict[str, Any] = {"v": 1, "kind": msg.kind}
        for key in ("code", "game_id", "seq", "sender", "to"):
            value = getattr(msg, key)
            if value is not None:
                envelope[key] = value
        envelope["payload"] = msg.payload
        self._transcript.write(
            json.dumps({"dir": direction, "frame": envelope},
                       separators=(",", ":"), sort_keys=True) + "\n"
        )
        self._transcript.flush()

    async def close(self) -> None:
        self._transcript.close()
        if self._ws is not None:
            await self._ws.close()

    # -- main loop ----------------------------------------------------------

    async def play(self) -> None:
        while self.game_over is None and self.aborted is None and not self.left:
            msg = await self._recv(f"turn {self.turn_number}")
            await self._handle(msg)

    async def _handle(self, msg: WireMessage) -> None:
        if msg.kind == "chat":
            return
        code = msg.code
        payload = msg.payload
        if code == "game_started":
            self.game_id = payload["game_id"]
            self.players = [p["id"] for p in payload["players"]]
            config = payload["config"]
            self.taxonomies = dict(config["taxonomies"])
            self.unanimity_bonus = config["unanimity_bonus"]
            self.scores = {pid: 0 for pid in self.players}
        elif code == "text_reveal":
            self.turn_number = payload["turn_number"]
            self.task = None
            self.se_text = None
            self.se_tag = None
            self.spoke_this_turn = False
            if self.spec.leave_at_turn == self.turn_number:
                await self.command("leave_room")
                self.left = True
        elif code == "task_assigned":
            self.task = payload
            self.reader_tasks.append(
                {"turn": self.turn_number, "reader": self.session_id,
                 "strategy": payload["strategy"], "value": payload["value"]}
            )
        elif code == "se_broadcast":
            self.se_text = payload["text"]
            match = _TAG.match(payload["text"])
            self.se_tag = match.group(1) if match else None
        elif code == "discussion_opened":
            if self._silent_in_discussion() and self.index == 0:
                # nobody here will speak or pass; burn the clock instead
                await self.command(
                    "clock_advance", {"seconds": payload["time_limit_s"]}
                )
        elif code == "score_update":
            self._audit_score(payload)
        elif code == "waiting_on":
            await self._maybe_act(payload)
        elif code == "game_over":
            self.game_over = payload
        elif code == "game_aborted":
            self.aborted = payload
        elif code == "rejected":
            raise AssertionFailed(
                f"turn {self.turn_number}",
                f"{self.spec.name}'s {payload.get('command')} was rejected: "
                f"{payload.get('reason')} ({payload.get('detail')})",
            )

    # -- policy ---------------------------------------------------------------

    def _silent_in_discussion(self) -> bool:
        return self.spec.policy == "always_disagree"

    def _pick(self) -> str:
        """The strategy this bot names in votes."""
        if self.spec.policy in ("always_disagree", "argue_then_pass"):
            return _DISTINCT_PICKS[self.index % len(_DISTINCT_PICKS)]
        if self.task is not None:  # I am the reader and know the assignment
            return self.task["strategy"]
        if self.se_tag is None:
            raise AssertionFailed(
                f"turn {self.turn_number}",
                f"{self.spec.name} must vote but saw no tagged self-explanation",
            )
        return self.se_tag

    def _se_text(self) -> str:
        assert self.task is not None
        strategy = self.task["strategy"]
        if self.spec.policy in ("always_disagree", "argue_then_pass"):
            # untagged: guessers are scripted to vote their fixed picks anyway
            return "I will just restate the sentence in my own words."
        spoken = strategy.replace("_", " ")
        return f"[{strategy}] I am using {spoken} to explain this sentence."

    def _argument(self, strategy: str) -> dict[str, Any]:
        reasons = self.taxonomies.get(strategy) or ["other"]
        reason = reasons[0]
        se_len = len(self.se_text or "")
        needs_freetext = reason == "other" or strategy == "other"
        return {
            "strategy": strategy,
            "reasons": [reason],
            "span": None if reason == "other" else {"start": 0, "end": min(4, se_len)},
            "freetext": "scripted rationale" if needs_freetext else None,
        }

    async def _maybe_act(self, payload: dict[str, Any]) -> None:
        if self.left:
            return
        pending = payload["pending"]
        if not pending or pending[0] != self.session_id:
            return
        phase = payload["phase"]
        if phase == "reader_compose":
            await self.command("submit_se", {"text": self._se_text()})
        elif phase == "identification":
            await self.command("submit_argument", self._argument(self._pick()))
        elif phase == "discussion":
            if self._silent_in_discussion():
                return  # seat 0 already scheduled the timeout
            if self.spec.policy == "argue_then_pass" and not self.spoke_this_turn:
                self.spoke_this_turn = True
                text = self.rng.choice(_ARGUE_TEMPLATES).format(
                    name=self.spec.name, pick=self._pick()
                )
                await self.command("discussion_send", {"text": text})
            # pass immediately: contributing alone does not shrink the
            # pending list, so no further waiting_on frame would arrive
            await self.command("discussion_pass")
        elif phase == "revote":
            await self.command("revote_submit", {"strategies": [self._pick()]})
        elif phase == "power_card_window":
            await self.command("skip_power")
        elif phase == "dice_roll":
            await self.command("roll_dice")
        elif phase == "event_card_draw":
            await self.command("draw_event")

    # -- audits -----------------------------------------------------------------

    def _audit_score(self, payload: dict[str, Any]) -> None:
        stage = payload["stage"]
        step = f"turn {self.turn_number} {stage}"
        if stage == "first_vote":
            outcome = payload["outcome"]
            self.first_outcomes.append(outcome)
            if self.spec.policy in ("always_agree", "leave_at_turn"):
                if outcome != "unanimous":
                    raise AssertionFailed(step, f"expected unanimity, got {outcome}")
                task = payload["task"]
                mine = payload["deltas"][self.session_id]
                was_reader = self.task is not None  # only the reader holds one
                base = task["value"] if was_reader else task["value"] // 2
                expected = base + self.unanimity_bonus
                if mine != expected:
                    raise AssertionFailed(
                        step, f"my delta {mine}, closed form says {expected}"
                    )
            elif outcome != "disagreement":
                raise AssertionFailed(step, f"expected disagreement, got {outcome}")
        elif stage == "revote":
            self.revote_accepted.append(list(payload["accepted"]))
            if self.spec.policy in ("always_disagree", "argue_then_pass"):
                if payload["accepted"]:
                    raise AssertionFailed(
                        step,
                        f"distinct singleton revotes cannot carry a majority, "
                        f"yet {payload['accepted']} was accepted",
                    )
        for pid, delta in payload["deltas"].items():
            self.scores[pid] = self.scores.get(pid, 0) + delta
        for pid, total in payload["totals"].items():
            if self.scores.get(pid) != total:
                raise AssertionFailed(
                    step, f"running total for {pid} is {self.scores.get(pid)}, "
                          f"server says {total}"
                )


async def _run_async(script: dict[str, Any], server: str, seed: int,
                     out_dir: Path) -> ScenarioResult:
    specs = [BotSpec.from_dict(d) for d in script["bots"]]
    if not 3 <= len(specs) <= 4:
        raise ScenarioError("script", f"need 3 or 4 bots, got {len(specs)}")
    recv_timeout = float(script.get("recv_timeout_s", 20.0))
    out_dir.mkdir(parents=True, exist_ok=True)

    bots = [
        _Bot(i, spec, server, out_dir, recv_timeout, seed)
        for i, spec in enumerate(specs)
    ]
    try:
        # join one at a time so seats and player order are reproducible
        for bot in bots:
            await bot.connect_and_join()
        await bots[0].command("start_game")
        tasks = [asyncio.create_task(bot.play(), name=bot.spec.name) for bot in bots]
        done, still_running = await asyncio.wait(
            tasks, return_when=asyncio.FIRST_EXCEPTION
        )
        for task in still_running:
            task.cancel()
        await asyncio.gather(*still_running, return_exceptions=True)
        for task in done:
            if task.exception() is not None:
                raise task.exception()  # type: ignore[misc]
    finally:
        for bot in bots:
            await bot.close()

    finished = next((b for b in bots if b.game_over is not None), None)
    aborted = next((b.aborted for b in bots if b.aborted is not None), None)
    longest = max(bots, key=lambda b: len(b.first_outcomes))
    return ScenarioResult(
        game_id=bots[0].game_id,
        players=list(bots[0].players),
        winner=finished.game_over["winner"] if finished else None,
        totals=dict(finished.game_over["totals"]) if finished else {},
        turns=finished.game_over["turns"] if finished else longest.turn_number,
        aborted=aborted,
        transcripts=[b.transcript_path for b in bots],
        first_outcomes=list(longest.first_outcomes),
        revote_accepted=list(longest.revote_accepted),
        reader_tasks=sorted(
            (t for b in bots for t in b.reader_tasks), key=lambda t: t["turn"]
        ),
    )


def run_scenario(script: dict[str, Any] | str | Path, server: str, seed: int,
                 out_dir: str | Path) -> ScenarioResult:
    """Run one scripted game against ``server`` (a ws:// URL) and return
    what the bots observed. ``seed`` fixes bot-side phrasing choices.
    Raises ScenarioError subclasses on violated expectations or stalls."""
    if not isinstance(script, dict):
        script = load_script(script)
    return asyncio.run(_run_async(script, server, seed, Path(out_dir)))
