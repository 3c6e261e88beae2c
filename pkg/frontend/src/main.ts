// Entry point: read config from the URL, connect, fold frames, render.
//
//   index.html?server=ws://localhost:8765/ws&name=Ada
//
// Missing parameters fall back to a small join form.

import { Connection } from "./net.js";
import { foldFrame, initialView } from "./view.js";
import type { ClientView } from "./view.js";
import { render } from "./screens.js";
import type { Actions } from "./screens.js";

function defaultServer(): string {
  const proto = window.location.protocol === "https:" ? "wss" : "ws";
  const host = window.location.hostname || "localhost";
  return `${proto}://${host}:8765/ws`;
}

function start(root: HTMLElement, server: string, name: string): void {
  let view: ClientView = initialView();

  const conn = new Connection(server, {
    onFrame: (env) => {
      view = foldFrame(view, env);
      if (env.kind === "control" && (env.code === "se_broadcast" || env.code === "game_over")) {
        view.you.draft = ""; // the composed text was delivered or the game ended
      }
      render(view, root, actions);
    },
    onClose: (reason) => {
      if (view.stage !== "over" && view.stage !== "aborted") {
        root.innerHTML = `<header><h1>MiBoard</h1></header><p class="notice">Disconnected: ${reason}</p>`;
      }
    },
    onError: (message) => {
      console.error(message);
    },
  });

  const actions: Actions = {
    startGame: () => conn.send("start_game"),
    leaveRoom: () => conn.send("leave_room"),
    rerollStrategy: () => conn.send("reroll_strategy"),
    rerollValue: () => conn.send("reroll_value"),
    submitSe: (text) => conn.send("submit_se", { text }),
    submitArgument: (arg) =>
      conn.send("submit_argument", {
        strategy: arg.strategy,
        reasons: arg.reasons,
        span: arg.span,
        freetext: arg.freetext,
      }),
    discussionSend: (text) => conn.send("discussion_send", { text }),
    discussionPass: () => conn.send("discussion_pass"),
    revoteSubmit: (strategies) => conn.send("revote_submit", { strategies }),
    usePower: (kind, target) => conn.send("use_power", { kind, target }),
    skipPower: () => conn.send("skip_power"),
    rollDice: () => conn.send("roll_dice"),
    drawEvent: () => conn.send("draw_event"),
    sendChat: (text) => conn.sendChat(text),
    setDraft: (text) => {
      view.you.draft = text;
    },
  };

  conn.whenOpen(() => conn.send("join_zone", { name }));
  render(view, root, actions);
}

function joinForm(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  root.innerHTML = `
    <header><h1>MiBoard</h1></header>
    <form id="join-form" class="join-form">
      <label>Server <input id="jf-server" type="text" value="${params.get("server") ?? defaultServer()}"></label>
      <label>Name <input id="jf-name" type="text" value="${params.get("name") ?? ""}" placeholder="your display name"></label>
      <button type="submit">Join</button>
    </form>
  `;
  const form = root.querySelector<HTMLFormElement>("#join-form")!;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const server = root.querySelector<HTMLInputElement>("#jf-server")!.value.trim();
    const name = root.querySelector<HTMLInputElement>("#jf-name")!.value.trim();
    if (server && name) {
      const url = new URL(window.location.href);
      url.searchParams.set("server", server);
      url.searchParams.set("name", name);
      window.history.replaceState(null, "", url.toString());
      start(root, server, name);
    }
  });
}

const root = document.getElementById("app");
if (root) {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server");
  const name = params.get("name");
  if (server && name) {
    start(root, server, name);
  } else {
    joinForm(root);
  }
}
