// Client view state: a pure fold over the server's frame stream.
//
// Everything the screens render lives in ClientView, and every field of it
// (except `you.draft`, which holds unsent form input) is derived from
// received frames alone. foldFrame(view, frame) never mutates its input and
// never consults a clock, the DOM, or randomness, so replaying a recorded
// frame transcript reproduces the identical view.

import type { Envelope } from "./protocol.js";
import type {
  ArgumentPick,
  ChatMessage,
  ConfigSummary,
  DiceOutcome,
  EventOutcome,
  Member,
  RevealedTask,
  ScoreSummary,
  TaskCard,
  TextState,
} from "./types.js";

export type ConnectionStage = "lobby" | "room" | "ingame" | "over" | "aborted";

export interface Notice {
  command: string | null;
  reason: string;
  detail: string | null;
}

export interface DiscussionState {
  limit: number;
  timeLimitS: number;
  messages: ChatMessage[];
  /** Messages left per player id, from the server's chat attribution. */
  remaining: Record<string, number>;
}

export interface PrivateState {
  task: TaskCard | null;
  powers: string[];
  /** Unsent form input (never wire-derived; foldFrame leaves it alone). */
  draft: string;
}

export interface ClientView {
  stage: ConnectionStage;
  sessionId: string | null;
  roomId: string | null;
  zone: string | null;
  roster: Member[];
  gameId: string | null;
  players: Member[];
  config: ConfigSummary | null;
  phase: string | null;
  turnNumber: number;
  reader: string | null;
  text: TextState | null;
  se: { reader: string; text: string } | null;
  argumentsRevealed: Record<string, ArgumentPick> | null;
  scores: Record<string, number>;
  tokens: Record<string, number>;
  lastScore: ScoreSummary | null;
  revealedTask: RevealedTask | null;
  discussion: DiscussionState | null;
  revoteStrategies: string[] | null;
  dice: DiceOutcome | null;
  lastEvent: EventOutcome | null;
  lastPower: { player: string; kind: string; target: string | null } | null;
  frozen: Record<string, string>;
  waitingOn: { phase: string; pending: string[] } | null;
  gameOver: { winner: string; totals: Record<string, number>; turns: number } | null;
  aborted: { reason: string; player: string | null } | null;
  chat: ChatMessage[];
  notices: Notice[];
  lastSeq: number | null;
  seqGap: boolean;
  you: PrivateState;
}

const CHAT_LOG_CAP = 200;
const NOTICE_CAP = 20;

export function initialView(): ClientView {
  return {
    stage: "lobby",
    sessionId: null,
    roomId: null,
    zone: null,
    roster: [],
    gameId: null,
    players: [],
    config: null,
    phase: null,
    turnNumber: 0,
    reader: null,
    text: null,
    se: null,
    argumentsRevealed: null,
    scores: {},
    tokens: {},
    lastScore: null,
    revealedTask: null,
    discussion: null,
    revoteStrategies: null,
    dice: null,
    lastEvent: null,
    lastPower: null,
    frozen: {},
    waitingOn: null,
    gameOver: null,
    aborted: null,
    chat: [],
    notices: [],
    lastSeq: null,
    seqGap: false,
    you: { task: null, powers: [], draft: "" },
  };
}

export function playerName(view: ClientView, id: string): string {
  const member =
    view.players.find((m) => m.id === id) ?? view.roster.find((m) => m.id === id);
  return member ? member.name : id;
}

/** Fold one received frame into the view. Returns a new view. */
export function foldFrame(view: ClientView, env: Envelope): ClientView {
  const next: ClientView = structuredClone(view);
  if (env.seq !== null) {
    if (next.lastSeq !== null && env.seq !== next.lastSeq + 1) {
      next.seqGap = true;
    }
    next.lastSeq = env.seq;
  }
  if (env.kind === "chat") {
    foldChat(next, env);
    return next;
  }
  switch (env.code) {
    case "room_joined": {
      const p = env.payload;
      next.stage = "room";
      next.sessionId = str(p.session_id);
      next.roomId = str(p.room_id);
      next.zone = str(p.zone);
      next.roster = members(p.members);
      next.lastSeq = env.seq; // seq restarts on (re)binding into a room
      next.seqGap = false;
      break;
    }
    case "roster_update":
      next.roster = members(env.payload.members);
      break;
    case "game_started": {
      const p = env.payload;
      next.stage = "ingame";
      next.gameId = str(p.game_id);
      next.players = members(p.players);
      next.reader = str(p.reader);
      next.config = p.config as unknown as ConfigSummary;
      next.scores = {};
      next.tokens = {};
      for (const m of next.players) {
        next.scores[m.id] = 0;
        next.tokens[m.id] = 0;
      }
      break;
    }
    case "phase_changed": {
      const p = env.payload;
      next.phase = str(p.phase);
      next.turnNumber = int(p.turn_number);
      next.reader = str(p.reader);
      if (next.phase === "turn_start") {
        clearTurnState(next);
      }
      break;
    }
    case "text_reveal": {
      const p = env.payload;
      next.text = {
        textId: str(p.text_id),
        title: str(p.title),
        sentences: strList(p.sentences),
        targetIndex: int(p.target_index),
      };
      next.turnNumber = int(p.turn_number);
      break;
    }
    case "task_assigned": {
      const p = env.payload;
      next.you.task = {
        strategy: str(p.strategy),
        value: int(p.value),
        strategy_rerolls: int(p.strategy_rerolls),
        value_rerolls: int(p.value_rerolls),
        score: int(p.score),
      };
      if (next.sessionId !== null) {
        next.scores[next.sessionId] = int(p.score);
      }
      break;
    }
    case "se_broadcast":
      next.se = { reader: str(env.payload.reader), text: str(env.payload.text) };
      break;
    case "arguments_revealed":
      next.argumentsRevealed = env.payload.arguments as Record<string, ArgumentPick>;
      break;
    case "score_update": {
      const p = env.payload;
      next.lastScore = {
        stage: str(p.stage) as "first_vote" | "revote",
        outcome: (p.outcome as string | null) ?? null,
        accepted: strList(p.accepted),
        deltas: intMap(p.deltas),
        totals: intMap(p.totals),
        task: (p.task as RevealedTask | null) ?? null,
        acceptancePoints: p.acceptance_points ? intMap(p.acceptance_points) : null,
        convincePoints: p.convince_points ? intMap(p.convince_points) : null,
        revotes: (p.revotes as Record<string, string[]> | null) ?? null,
      };
      next.scores = intMap(p.totals);
      if (next.lastScore.task) {
        next.revealedTask = next.lastScore.task;
      }
      break;
    }
    case "discussion_opened": {
      const p = env.payload;
      const remaining: Record<string, number> = {};
      for (const m of next.players) {
        remaining[m.id] = int(p.limit);
      }
      next.discussion = {
        limit: int(p.limit),
        timeLimitS: num(p.time_limit_s),
        messages: [],
        remaining,
      };
      break;
    }
    case "revote_opened":
      next.revoteStrategies = strList(env.payload.strategies);
      break;
    case "dice_result": {
      const p = env.payload;
      next.dice = { player: str(p.player), dice: intList(p.dice), total: int(p.total) };
      break;
    }
    case "token_moved": {
      const p = env.payload;
      next.tokens[str(p.player)] = int(p.position_after);
      break;
    }
    case "event_card_drawn": {
      const p = env.payload;
      next.lastEvent = {
        player: str(p.player),
        kind: str(p.kind),
        amount: int(p.amount),
        powerGranted: bool(p.power_granted),
      };
      break;
    }
    case "power_card_granted":
      next.you.powers.push(str(env.payload.kind));
      break;
    case "power_card_played": {
      const p = env.payload;
      next.lastPower = {
        player: str(p.player),
        kind: str(p.kind),
        target: (p.target as string | null) ?? null,
      };
      if (str(p.player) === next.sessionId) {
        const idx = next.you.powers.indexOf(str(p.kind));
        if (idx >= 0) {
          next.you.powers.splice(idx, 1);
        }
      }
      break;
    }
    case "player_frozen":
      next.frozen[str(env.payload.player)] = str(env.payload.by);
      break;
    case "waiting_on":
      next.waitingOn = {
        phase: str(env.payload.phase),
        pending: strList(env.payload.pending),
      };
      break;
    case "game_over": {
      const p = env.payload;
      next.stage = "over";
      next.gameOver = {
        winner: str(p.winner),
        totals: intMap(p.totals),
        turns: int(p.turns),
      };
      next.scores = intMap(p.totals);
      next.waitingOn = null;
      break;
    }
    case "game_aborted":
      next.stage = "aborted";
      next.aborted = {
        reason: str(env.payload.reason),
        player: (env.payload.player as string | null) ?? null,
      };
      next.waitingOn = null;
      break;
    case "rejected":
      next.notices.push({
        command: (env.payload.command as string | null) ?? null,
        reason: str(env.payload.reason),
        detail: (env.payload.detail as string | null) ?? null,
      });
      if (next.notices.length > NOTICE_CAP) {
        next.notices.splice(0, next.notices.length - NOTICE_CAP);
      }
      break;
    case "clock_advanced":
      break; // test-harness frame; nothing to show
    default:
      break; // unknown to the fold: render nothing rather than break the session
  }
  return next;
}

function clearTurnState(next: ClientView): void {
  next.se = null;
  next.argumentsRevealed = null;
  next.lastScore = null;
  next.revealedTask = null;
  next.discussion = null;
  next.revoteStrategies = null;
  next.dice = null;
  next.lastEvent = null;
  next.lastPower = null;
  next.frozen = {};
  next.you.task = null;
}

function foldChat(next: ClientView, env: Envelope): void {
  const p = env.payload;
  const msg: ChatMessage = {
    sender: env.sender ?? "",
    senderName: (p.sender_name as string | undefined) ?? env.sender ?? "",
    scope: (p.scope as string | undefined) ?? "lobby",
    text: str(p.text),
    remaining: typeof p.remaining === "number" ? p.remaining : null,
  };
  if (msg.scope === "discussion" && next.discussion) {
    next.discussion.messages.push(msg);
    if (msg.remaining !== null && msg.sender) {
      next.discussion.remaining[msg.sender] = msg.remaining;
    }
  } else {
    next.chat.push(msg);
    if (next.chat.length > CHAT_LOG_CAP) {
      next.chat.splice(0, next.chat.length - CHAT_LOG_CAP);
    }
  }
}

// -- narrow unknown payload fields, defensively ----------------------------

function str(x: unknown): string {
  return typeof x === "string" ? x : "";
}

function int(x: unknown): number {
  return typeof x === "number" && Number.isInteger(x) ? x : 0;
}

function num(x: unknown): number {
  return typeof x === "number" ? x : 0;
}

function bool(x: unknown): boolean {
  return x === true;
}

function strList(x: unknown): string[] {
  return Array.isArray(x) ? x.filter((v): v is string => typeof v === "string") : [];
}

function members(x: unknown): Member[] {
  if (!Array.isArray(x)) {
    return [];
  }
  return x
    .filter(
      (m): m is { id: string; name: string } =>
        typeof m === "object" &&
        m !== null &&
        typeof (m as Record<string, unknown>).id === "string" &&
        typeof (m as Record<string, unknown>).name === "string",
    )
    .map((m) => ({ id: m.id, name: m.name }));
}

function intList(x: unknown): number[] {
  return Array.isArray(x) ? x.filter((v): v is number => typeof v === "number") : [];
}

function intMap(x: unknown): Record<string, number> {
  const out: Record<string, number> = {};
  if (typeof x === "object" && x !== null && !Array.isArray(x)) {
    for (const [k, v] of Object.entries(x as Record<string, unknown>)) {
      if (typeof v === "number") {
        out[k] = v;
      }
    }
  }
  return out;
}
