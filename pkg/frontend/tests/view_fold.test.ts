// The view layer is a pure fold over received frames. These tests replay
// two recorded bot games (one all-unanimous, one that crosses discussion
// and revote every round) through the fold, headlessly, and pin the result:
//   - the final view matches a stored snapshot byte for byte
//   - no private field (the task card, sealed votes) ever appears in a
//     guesser's view before the server reveals it
//   - folding is deterministic and never mutates its input

import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";

import { decodeFrame } from "../src/protocol.js";
import type { Envelope } from "../src/protocol.js";
import { foldFrame, initialView } from "../src/view.js";
import type { ClientView } from "../src/view.js";

function receivedFrames(fixture: string): Envelope[] {
  const raw = readFileSync(new URL(`./fixtures/${fixture}`, import.meta.url), "utf-8");
  const frames: Envelope[] = [];
  for (const line of raw.trim().split("\n")) {
    const rec = JSON.parse(line) as { dir: string; frame: Record<string, unknown> };
    if (rec.dir !== "recv") {
      continue;
    }
    const body = JSON.stringify(rec.frame);
    frames.push(decodeFrame(`${new TextEncoder().encode(body).length}\n${body}`));
  }
  return frames;
}

function foldAll(frames: Envelope[]): ClientView {
  let view = initialView();
  for (const env of frames) {
    view = foldFrame(view, env);
  }
  return view;
}

function controlEnv(code: string, payload: Record<string, unknown>, extra: Partial<Envelope> = {}): Envelope {
  return {
    kind: "control",
    code,
    game_id: null,
    seq: null,
    sender: "server",
    to: null,
    payload,
    v: 1,
    ...extra,
  };
}

const AGREE = receivedFrames("agree_grace.jsonl");
const ARGUE = receivedFrames("argue_ada.jsonl");

describe("golden transcripts", () => {
  it("folds the unanimous game to the stored snapshot", async () => {
    const final = foldAll(AGREE);
    await expect(JSON.stringify(final, null, 2)).toMatchFileSnapshot(
      "fixtures/golden_agree_view.json",
    );
  });

  it("folds the discussion-and-revote game to the stored snapshot", async () => {
    const final = foldAll(ARGUE);
    await expect(JSON.stringify(final, null, 2)).toMatchFileSnapshot(
      "fixtures/golden_argue_view.json",
    );
  });

  it("lands on the recorded outcome of the unanimous game", () => {
    const final = foldAll(AGREE);
    expect(final.stage).toBe("over");
    expect(final.sessionId).toBe("s2");
    expect(final.gameOver).toEqual({
      winner: "s1",
      totals: { s1: 252, s2: 242, s3: 254 },
      turns: 16,
    });
    expect(final.scores).toEqual({ s1: 252, s2: 242, s3: 254 });
    expect(final.players.map((m) => m.name)).toEqual(["Ada", "Grace", "Alan"]);
    expect(final.seqGap).toBe(false);
  });

  it("lands on the recorded outcome of the contested game", () => {
    const final = foldAll(ARGUE);
    expect(final.stage).toBe("over");
    expect(final.gameOver?.turns).toBe(19);
    // nobody ever converged, so nobody ever scored
    expect(Object.values(final.gameOver!.totals)).toEqual([0, 0, 0]);
    expect(final.seqGap).toBe(false);
  });
});

describe("privacy", () => {
  it("a guesser's view never holds a task card outside their own turn", () => {
    let view = initialView();
    for (const env of AGREE) {
      view = foldFrame(view, env);
      if (view.you.task !== null) {
        // the only way to know the card is to be the reader it was dealt to
        expect(view.reader).toBe(view.sessionId);
      }
    }
  });

  it("votes stay sealed while identification is open", () => {
    for (const frames of [AGREE, ARGUE]) {
      let view = initialView();
      for (const env of frames) {
        view = foldFrame(view, env);
        if (view.phase === "identification") {
          expect(view.argumentsRevealed).toBeNull();
          expect(view.revealedTask).toBeNull();
        }
      }
    }
  });

  it("the task stays hidden through discussion and revote", () => {
    let view = initialView();
    let sawDiscussion = 0;
    for (const env of ARGUE) {
      view = foldFrame(view, env);
      if (view.phase === "discussion" || view.phase === "revote") {
        sawDiscussion += 1;
        expect(view.revealedTask).toBeNull();
        if (view.reader !== view.sessionId) {
          expect(view.you.task).toBeNull();
        }
      }
    }
    expect(sawDiscussion).toBeGreaterThan(0);
  });

  it("a task reveal only ever arrives with a score update", () => {
    for (const frames of [AGREE, ARGUE]) {
      let view = initialView();
      for (const env of frames) {
        view = foldFrame(view, env);
        if (view.revealedTask !== null) {
          expect(view.lastScore).not.toBeNull();
          expect(view.lastScore!.task).toEqual(view.revealedTask);
        }
      }
    }
  });
});

describe("fold purity", () => {
  it("is deterministic: two folds of the same stream agree exactly", () => {
    expect(JSON.stringify(foldAll(AGREE))).toBe(JSON.stringify(foldAll(AGREE)));
    expect(JSON.stringify(foldAll(ARGUE))).toBe(JSON.stringify(foldAll(ARGUE)));
  });

  it("never mutates the view it was given", () => {
    let view = initialView();
    for (const [i, env] of AGREE.entries()) {
      if (i % 17 === 0) {
        const before = JSON.stringify(view);
        foldFrame(view, env);
        expect(JSON.stringify(view)).toBe(before);
      }
      view = foldFrame(view, env);
    }
  });
});

describe("frames outside the recorded games", () => {
  function inGameView(): ClientView {
    let view = initialView();
    view = foldFrame(
      view,
      controlEnv("room_joined", {
        room_id: "r1",
        zone: "main",
        session_id: "s1",
        members: [{ id: "s1", name: "Ada" }],
      }, { seq: 1, to: "s1" }),
    );
    view = foldFrame(
      view,
      controlEnv("game_started", {
        game_id: "g1",
        players: [
          { id: "s1", name: "Ada" },
          { id: "s2", name: "Grace" },
          { id: "s3", name: "Alan" },
        ],
        reader: "s1",
        config: { path_length: 30, taxonomies: {} },
      }),
    );
    return view;
  }

  it("tracks a granted power until the server confirms it was played", () => {
    let view = inGameView();
    view = foldFrame(view, controlEnv("power_card_granted", { kind: "freeze" }, { to: "s1" }));
    expect(view.you.powers).toEqual(["freeze"]);
    view = foldFrame(view, controlEnv("power_card_played", { player: "s1", kind: "freeze", target: "s2" }));
    expect(view.you.powers).toEqual([]);
    expect(view.lastPower).toEqual({ player: "s1", kind: "freeze", target: "s2" });
  });

  it("keeps another player's played power out of this hand", () => {
    let view = inGameView();
    view = foldFrame(view, controlEnv("power_card_granted", { kind: "extra_turn" }, { to: "s1" }));
    view = foldFrame(view, controlEnv("power_card_played", { player: "s3", kind: "extra_turn", target: null }));
    expect(view.you.powers).toEqual(["extra_turn"]);
  });

  it("marks frozen players and clears the mark at the next turn", () => {
    let view = inGameView();
    view = foldFrame(view, controlEnv("player_frozen", { player: "s2", by: "s1" }));
    expect(view.frozen).toEqual({ s2: "s1" });
    view = foldFrame(view, controlEnv("phase_changed", { phase: "turn_start", turn_number: 2, reader: "s2" }));
    expect(view.frozen).toEqual({});
  });

  it("turns rejections into capped, non-blocking notices", () => {
    let view = inGameView();
    for (let i = 0; i < 25; i++) {
      view = foldFrame(
        view,
        controlEnv("rejected", { command: "roll_dice", reason: "not_your_turn", detail: `n${i}` }, { to: "s1" }),
      );
    }
    expect(view.notices.length).toBe(20);
    expect(view.notices[view.notices.length - 1]!.detail).toBe("n24");
  });

  it("flags a sequence gap but recovers the baseline on a room rebind", () => {
    let view = inGameView();
    view = foldFrame(view, controlEnv("waiting_on", { phase: "dice_roll", pending: ["s1"] }, { seq: 2 }));
    expect(view.seqGap).toBe(false);
    view = foldFrame(view, controlEnv("waiting_on", { phase: "dice_roll", pending: ["s1"] }, { seq: 5 }));
    expect(view.seqGap).toBe(true);
    view = foldFrame(
      view,
      controlEnv("room_joined", {
        room_id: "r2",
        zone: "main",
        session_id: "s1",
        members: [{ id: "s1", name: "Ada" }],
      }, { seq: 1, to: "s1" }),
    );
    expect(view.seqGap).toBe(false);
    expect(view.lastSeq).toBe(1);
  });

  it("routes an abort to the aborted stage", () => {
    let view = inGameView();
    view = foldFrame(view, controlEnv("game_aborted", { reason: "player_left", player: "s3" }));
    expect(view.stage).toBe("aborted");
    expect(view.aborted).toEqual({ reason: "player_left", player: "s3" });
    expect(view.waitingOn).toBeNull();
  });

  it("keeps lobby chat in the dock log with a cap", () => {
    let view = inGameView();
    for (let i = 0; i < 210; i++) {
      view = foldFrame(view, {
        kind: "chat",
        code: null,
        game_id: null,
        seq: null,
        sender: "s2",
        to: null,
        payload: { text: `m${i}`, sender_name: "Grace", scope: "idle" },
        v: 1,
      });
    }
    expect(view.chat.length).toBe(200);
    expect(view.chat[view.chat.length - 1]!.text).toBe("m209");
    expect(view.discussion).toBeNull();
  });
});
