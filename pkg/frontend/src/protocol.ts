// Wire protocol: length-prefixed JSON framing and the message catalog.
//
// One frame is a single JSON envelope prefixed by its UTF-8 byte length in
// ASCII decimal and a newline:
//
//   <decimal byte length>\n{"kind":"control","code":...,"payload":{...}}
//
// This mirrors the server's codec exactly; docs/protocol.md in the server
// repo is the normative catalog. Decoding is total: any string either
// yields an Envelope or throws ProtocolError.

export const PROTOCOL_VERSION = 1;
export const MAX_FRAME_BYTES = 1_000_000;

export type Kind = "control" | "chat";

export interface Envelope {
  kind: Kind;
  code: string | null;
  game_id: string | null;
  seq: number | null;
  sender: string | null;
  to: string | null;
  payload: Record<string, unknown>;
  v: number;
}

export class ProtocolError extends Error {}

export const CLIENT_CODES: ReadonlySet<string> = new Set([
  "join_zone",
  "start_game",
  "leave_room",
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
  "clock_advance",
]);

export const SERVER_CODES: ReadonlySet<string> = new Set([
  "room_joined",
  "roster_update",
  "game_started",
  "phase_changed",
  "text_reveal",
  "task_assigned",
  "se_broadcast",
  "arguments_revealed",
  "score_update",
  "discussion_opened",
  "revote_opened",
  "dice_result",
  "token_moved",
  "event_card_drawn",
  "power_card_granted",
  "power_card_played",
  "player_frozen",
  "waiting_on",
  "game_over",
  "game_aborted",
  "rejected",
  "clock_advanced",
]);

const ENVELOPE_KEYS = new Set(["v", "kind", "code", "game_id", "seq", "sender", "to", "payload"]);

const encoder = new TextEncoder();
const decoder = new TextDecoder("utf-8", { fatal: true });

/** Build one client->server frame, ready to hand to WebSocket.send(). */
export function encodeFrame(code: string, payload: Record<string, unknown> = {}): string {
  if (!CLIENT_CODES.has(code)) {
    throw new ProtocolError(`not a client code: ${code}`);
  }
  return pack({ kind: "control", code, payload, v: PROTOCOL_VERSION });
}

/** Build one outgoing chat frame. */
export function encodeChat(text: string): string {
  return pack({ kind: "chat", payload: { text }, v: PROTOCOL_VERSION });
}

function pack(body: Record<string, unknown>): string {
  const json = JSON.stringify(sortedKeys(body));
  const bytes = encoder.encode(json).length;
  if (bytes > MAX_FRAME_BYTES) {
    throw new ProtocolError(`frame body of ${bytes} bytes exceeds limit`);
  }
  return `${bytes}\n${json}`;
}

function sortedKeys(obj: Record<string, unknown>): Record<string, unknown> {
  const out: Record<string, unknown> = {};
  for (const key of Object.keys(obj).sort()) {
    out[key] = obj[key];
  }
  return out;
}

/** Parse one frame off the wire. Throws ProtocolError on anything invalid. */
export function decodeFrame(data: string | ArrayBuffer): Envelope {
  let text: string;
  if (typeof data === "string") {
    text = data;
  } else {
    try {
      text = decoder.decode(data);
    } catch {
      throw new ProtocolError("frame is not valid UTF-8");
    }
  }
  const nl = text.indexOf("\n");
  if (nl < 0) {
    throw new ProtocolError("missing length prefix");
  }
  const prefix = text.slice(0, nl);
  if (!/^[0-9]{1,7}$/.test(prefix)) {
    throw new ProtocolError(`bad length prefix: ${JSON.stringify(prefix.slice(0, 32))}`);
  }
  const declared = parseInt(prefix, 10);
  if (declared > MAX_FRAME_BYTES) {
    throw new ProtocolError(`declared length ${declared} exceeds limit`);
  }
  const body = text.slice(nl + 1);
  const actual = encoder.encode(body).length;
  if (actual !== declared) {
    throw new ProtocolError(`declared ${declared} bytes but body is ${actual}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(body);
  } catch {
    throw new ProtocolError("body is not valid JSON");
  }
  return validateEnvelope(parsed);
}

function validateEnvelope(obj: unknown): Envelope {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolError("envelope must be a JSON object");
  }
  const rec = obj as Record<string, unknown>;
  for (const key of Object.keys(rec)) {
    if (!ENVELOPE_KEYS.has(key)) {
      throw new ProtocolError(`unknown envelope key: ${key}`);
    }
  }
  if (rec.v !== PROTOCOL_VERSION) {
    throw new ProtocolError(`unsupported protocol version: ${String(rec.v)}`);
  }
  const kind = rec.kind;
  if (kind !== "control" && kind !== "chat") {
    throw new ProtocolError(`unknown kind: ${String(kind)}`);
  }
  const code = rec.code ?? null;
  if (kind === "chat") {
    if (code !== null) {
      throw new ProtocolError("chat frames carry no code");
    }
  } else {
    if (typeof code !== "string") {
      throw new ProtocolError("control frames require a code");
    }
    if (!CLIENT_CODES.has(code) && !SERVER_CODES.has(code)) {
      throw new ProtocolError(`unknown code: ${code}`);
    }
  }
  const payload = rec.payload ?? {};
  if (typeof payload !== "object" || payload === null || Array.isArray(payload)) {
    throw new ProtocolError("payload must be an object");
  }
  const seq = rec.seq ?? null;
  if (seq !== null && (typeof seq !== "number" || !Number.isInteger(seq) || seq < 0)) {
    throw new ProtocolError("seq must be a non-negative integer");
  }
  for (const field of ["game_id", "sender", "to"] as const) {
    const val = rec[field] ?? null;
    if (val !== null && typeof val !== "string") {
      throw new ProtocolError(`${field} must be a string or null`);
    }
  }
  return {
    kind,
    code: code as string | null,
    game_id: (rec.game_id as string | undefined) ?? null,
    seq: seq as number | null,
    sender: (rec.sender as string | undefined) ?? null,
    to: (rec.to as string | undefined) ?? null,
    payload: payload as Record<string, unknown>,
    v: PROTOCOL_VERSION,
  };
}
