// Phase-keyed screens over a persistent board.
//
// One render(view, root, actions) call rebuilds the page from the current
// ClientView. The board, roster, phase indicator, and waiting-on banner are
// always visible; the active panel is chosen by phase and role. Controls
// are enabled only when the server's waiting_on list names this player, so
// every enabled button corresponds to a command the server would accept;
// nothing renders optimistically.

import type { ClientView } from "./view.js";
import { playerName } from "./view.js";
import type { Span } from "./types.js";
import { strategyLabel, TASK_STRATEGIES, VOTE_STRATEGIES } from "./types.js";

export interface Actions {
  startGame(): void;
  leaveRoom(): void;
  rerollStrategy(): void;
  rerollValue(): void;
  submitSe(text: string): void;
  submitArgument(arg: {
    strategy: string;
    reasons: string[];
    span: Span | null;
    freetext: string | null;
  }): void;
  discussionSend(text: string): void;
  discussionPass(): void;
  revoteSubmit(strategies: string[]): void;
  usePower(kind: string, target: string | null): void;
  skipPower(): void;
  rollDice(): void;
  drawEvent(): void;
  sendChat(text: string): void;
  setDraft(text: string): void;
}

// Cascading-menu state for the argument builder: strategy, then reasons,
// then span highlight. Transient input state, reset each turn.
interface CmbState {
  turn: number;
  stage: "revote" | "first";
  strategy: string | null;
  reasons: Set<string>;
  span: Span | null;
  freetext: string;
}

let cmb: CmbState = { turn: 0, stage: "first", strategy: null, reasons: new Set(), span: null, freetext: "" };
const revoteChecked = new Set<string>();
let revoteTurn = 0;

function cmbFor(view: ClientView, stage: "first" | "revote"): CmbState {
  if (cmb.turn !== view.turnNumber || cmb.stage !== stage) {
    cmb = { turn: view.turnNumber, stage, strategy: null, reasons: new Set(), span: null, freetext: "" };
  }
  return cmb;
}

export function render(view: ClientView, root: HTMLElement, actions: Actions): void {
  root.innerHTML = `
    <header>
      <h1>MiBoard</h1>
      ${phaseIndicator(view)}
      ${waitingBanner(view)}
    </header>
    ${noticeBar(view)}
    <main>
      <section class="board-pane">${view.stage === "ingame" || view.stage === "over" ? boardPanel(view) : ""}${rosterPanel(view)}</section>
      <section class="screen-pane" id="screen-pane"></section>
    </main>
    <footer id="chat-dock"></footer>
  `;
  const pane = root.querySelector<HTMLElement>("#screen-pane")!;
  renderScreen(view, pane, actions);
  renderChatDock(view, root.querySelector<HTMLElement>("#chat-dock")!, actions);
}

function phaseIndicator(view: ClientView): string {
  const label =
    view.stage === "lobby" ? "connecting" :
    view.stage === "room" ? "waiting room" :
    view.stage === "over" ? "game over" :
    view.stage === "aborted" ? "game aborted" :
    (view.phase ?? "starting").replace(/_/g, " ");
  const turn = view.turnNumber > 0 && view.stage === "ingame" ? ` · turn ${view.turnNumber}` : "";
  return `<span class="phase-chip">${esc(label)}${turn}</span>`;
}

function waitingBanner(view: ClientView): string {
  if (!view.waitingOn || view.stage !== "ingame") {
    return "";
  }
  const names = view.waitingOn.pending.map((id) => esc(playerName(view, id)));
  if (names.length === 0) {
    return "";
  }
  const me = view.sessionId;
  const highlight = me !== null && view.waitingOn.pending.includes(me) ? " your-move" : "";
  return `<span class="waiting-banner${highlight}">waiting on: ${names.join(", ")}</span>`;
}

function noticeBar(view: ClientView): string {
  if (view.notices.length === 0) {
    return "";
  }
  const latest = view.notices[view.notices.length - 1]!;
  const detail = latest.detail ? ` — ${esc(latest.detail)}` : "";
  return `<div class="notice">${esc(latest.command ?? "command")} rejected: ${esc(latest.reason)}${detail}</div>`;
}

// -- persistent board -------------------------------------------------------

function boardPanel(view: ClientView): string {
  const length = view.config?.path_length ?? 30;
  const byCell = new Map<number, string[]>();
  for (const m of view.players) {
    const pos = Math.min(view.tokens[m.id] ?? 0, length);
    const cell = byCell.get(pos) ?? [];
    cell.push(m.name.charAt(0).toUpperCase());
    byCell.set(pos, cell);
  }
  let cells = "";
  for (let i = 0; i <= length; i++) {
    const tokens = (byCell.get(i) ?? [])
      .map((ch, n) => `<span class="token token-${n}">${esc(ch)}</span>`)
      .join("");
    const cls = i === length ? "cell finish" : "cell";
    cells += `<div class="${cls}" title="${i}">${tokens}</div>`;
  }
  return `<div class="board">${cells}</div>`;
}

function rosterPanel(view: ClientView): string {
  const inGame = view.players.length > 0;
  const people = inGame ? view.players : view.roster;
  if (people.length === 0) {
    return "";
  }
  const rows = people
    .map((m) => {
      const score = inGame ? `<td class="score">${view.scores[m.id] ?? 0}</td>` : "";
      const marks = [
        m.id === view.sessionId ? "you" : "",
        inGame && m.id === view.reader ? "reader" : "",
        view.frozen[m.id] ? "frozen" : "",
      ].filter(Boolean).join(", ");
      return `<tr><td>${esc(m.name)}</td>${score}<td class="marks">${marks}</td></tr>`;
    })
    .join("");
  return `<table class="roster"><tbody>${rows}</tbody></table>`;
}

// -- phase screens -----------------------------------------------------------

function renderScreen(view: ClientView, pane: HTMLElement, actions: Actions): void {
  if (view.stage === "lobby") {
    pane.innerHTML = `<p class="hint">Connecting to the server…</p>`;
    return;
  }
  if (view.stage === "room") {
    renderWaitingRoom(view, pane, actions);
    return;
  }
  if (view.stage === "over") {
    renderGameOver(view, pane);
    return;
  }
  if (view.stage === "aborted") {
    const who = view.aborted?.player ? esc(playerName(view, view.aborted.player)) : "a player";
    pane.innerHTML = `<h2>Game aborted</h2><p>${who} left the game (${esc(view.aborted?.reason ?? "unknown")}).</p>`;
    return;
  }
  switch (view.phase) {
    case "reader_compose":
      renderCompose(view, pane, actions);
      break;
    case "identification":
      renderIdentification(view, pane, actions);
      break;
    case "first_summary":
    case "final_summary":
      renderSummary(view, pane);
      break;
    case "discussion":
      renderDiscussion(view, pane, actions);
      break;
    case "revote":
      renderRevote(view, pane, actions);
      break;
    case "power_card_window":
      renderPowerWindow(view, pane, actions);
      break;
    case "dice_roll":
      renderDiceRoll(view, pane, actions);
      break;
    case "event_card_draw":
      renderEventDraw(view, pane, actions);
      break;
    default:
      pane.innerHTML = `${textPanel(view)}<p class="hint">Starting the next turn…</p>`;
      break;
  }
}

function renderWaitingRoom(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const count = view.roster.length;
  pane.innerHTML = `
    <h2>Waiting room</h2>
    <p>${count} player${count === 1 ? "" : "s"} seated. A game needs 3 or 4.</p>
    <button id="start-btn" ${count >= 3 ? "" : "disabled"}>Start game</button>
    <button id="leave-btn">Leave</button>
  `;
  pane.querySelector("#start-btn")?.addEventListener("click", () => actions.startGame());
  pane.querySelector("#leave-btn")?.addEventListener("click", () => actions.leaveRoom());
}

function renderGameOver(view: ClientView, pane: HTMLElement): void {
  const over = view.gameOver;
  if (!over) {
    pane.innerHTML = "<h2>Game over</h2>";
    return;
  }
  const rows = Object.entries(over.totals)
    .sort((a, b) => b[1] - a[1])
    .map(([id, pts]) => `<tr><td>${esc(playerName(view, id))}</td><td>${pts}</td></tr>`)
    .join("");
  pane.innerHTML = `
    <h2>${esc(playerName(view, over.winner))} wins!</h2>
    <p>${over.turns} turns played.</p>
    <table class="totals"><tbody>${rows}</tbody></table>
  `;
}

function textPanel(view: ClientView): string {
  if (!view.text) {
    return "";
  }
  const sentences = view.text.sentences
    .map((s, i) => {
      const cls = i === view.text!.targetIndex - 1 ? "sentence target" : "sentence";
      return `<span class="${cls}">${esc(s)}</span>`;
    })
    .join(" ");
  return `<div class="text-panel"><h3>${esc(view.text.title)}</h3><p>${sentences}</p></div>`;
}

function myTurn(view: ClientView): boolean {
  return (
    view.sessionId !== null &&
    view.waitingOn !== null &&
    view.waitingOn.pending.includes(view.sessionId)
  );
}

function renderCompose(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const me = view.sessionId;
  const reading = view.reader !== null ? esc(playerName(view, view.reader)) : "the reader";
  if (me !== view.reader) {
    pane.innerHTML = `
      ${textPanel(view)}
      <p class="hint">${reading} is composing a self-explanation of the highlighted sentence. Chat below while you wait.</p>
    `;
    return;
  }
  const task = view.you.task;
  const cfg = view.config;
  const canAct = myTurn(view);
  const taskCard = task
    ? `<div class="task-card">
         <div class="task-strategy">${esc(strategyLabel(task.strategy))}</div>
         <div class="task-value">${task.value} points</div>
       </div>
       <div class="reroll-row">
         <button id="reroll-strategy" ${canAct ? "" : "disabled"}>Redraw strategy (−${cfg?.strategy_reroll_cost ?? 10})</button>
         <button id="reroll-value" ${canAct ? "" : "disabled"}>Redraw value (−${cfg?.value_reroll_cost ?? 5})</button>
       </div>`
    : `<p class="hint">Waiting for your task card…</p>`;
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Your turn to explain</h2>
    ${taskCard}
    <textarea id="se-input" rows="4" placeholder="Explain the highlighted sentence using your assigned strategy…">${esc(view.you.draft)}</textarea>
    <button id="se-submit" ${canAct ? "" : "disabled"}>Submit</button>
  `;
  const input = pane.querySelector<HTMLTextAreaElement>("#se-input")!;
  input.addEventListener("input", () => actions.setDraft(input.value));
  pane.querySelector("#reroll-strategy")?.addEventListener("click", () => actions.rerollStrategy());
  pane.querySelector("#reroll-value")?.addEventListener("click", () => actions.rerollValue());
  pane.querySelector("#se-submit")?.addEventListener("click", () => {
    if (input.value.trim().length > 0) {
      actions.submitSe(input.value);
    }
  });
}

function renderIdentification(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const state = cmbFor(view, "first");
  const canAct = myTurn(view);
  const seText = view.se?.text ?? "";
  const seBy = view.se !== null ? esc(playerName(view, view.se.reader)) : "the reader";

  const strategyButtons = VOTE_STRATEGIES
    .map((s) => {
      const on = state.strategy === s ? " selected" : "";
      return `<button class="cmb-strategy${on}" data-strategy="${s}">${esc(strategyLabel(s))}</button>`;
    })
    .join("");

  let reasonsBlock = "";
  let spanBlock = "";
  let freetextBlock = "";
  if (state.strategy !== null) {
    const reasons = view.config?.taxonomies[state.strategy] ?? [];
    if (reasons.length > 0) {
      const boxes = reasons
        .map((r) => {
          const checked = state.reasons.has(r) ? "checked" : "";
          return `<label class="reason"><input type="checkbox" data-reason="${esc(r)}" ${checked}> ${esc(r.replace(/_/g, " "))}</label>`;
        })
        .join("");
      reasonsBlock = `<div class="cmb-reasons"><h4>Why? Pick at least one:</h4>${boxes}</div>`;
    }
    if (state.strategy === "other") {
      freetextBlock = `
        <div class="cmb-freetext">
          <h4>Describe what you heard:</h4>
          <input id="cmb-freetext" type="text" value="${esc(state.freetext)}" placeholder="None of the five strategies fit because…">
        </div>`;
    } else if (state.reasons.size > 0) {
      const marked = state.span
        ? esc(seText.slice(0, state.span.start)) +
          `<mark>${esc(seText.slice(state.span.start, state.span.end))}</mark>` +
          esc(seText.slice(state.span.end))
        : esc(seText);
      spanBlock = `
        <div class="cmb-span">
          <h4>Select the part of the explanation that shows it:</h4>
          <div id="span-source" class="span-source">${marked}</div>
          <span class="hint">${state.span ? `chars ${state.span.start}–${state.span.end}` : "drag to highlight (optional)"}</span>
        </div>`;
    }
  }

  const ready =
    state.strategy !== null &&
    (state.strategy === "other"
      ? state.freetext.trim().length > 0
      : state.reasons.size > 0);

  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Which strategy did ${seBy} use?</h2>
    <blockquote class="se-quote">${esc(seText)}</blockquote>
    <div class="cmb">${strategyButtons}</div>
    ${reasonsBlock}
    ${freetextBlock}
    ${spanBlock}
    <button id="cmb-submit" ${ready && canAct ? "" : "disabled"}>Submit identification</button>
    ${canAct ? "" : `<p class="hint">Your identification is in. Waiting for the others…</p>`}
  `;

  for (const btn of pane.querySelectorAll<HTMLButtonElement>(".cmb-strategy")) {
    btn.addEventListener("click", () => {
      const s = btn.dataset.strategy!;
      if (state.strategy !== s) {
        state.strategy = s;
        state.reasons.clear();
        state.span = null;
        state.freetext = "";
      }
      renderIdentification(view, pane, actions);
    });
  }
  for (const box of pane.querySelectorAll<HTMLInputElement>("input[data-reason]")) {
    box.addEventListener("change", () => {
      const r = box.dataset.reason!;
      if (box.checked) {
        state.reasons.add(r);
      } else {
        state.reasons.delete(r);
      }
      renderIdentification(view, pane, actions);
    });
  }
  const freetext = pane.querySelector<HTMLInputElement>("#cmb-freetext");
  freetext?.addEventListener("input", () => {
    state.freetext = freetext.value;
    const submit = pane.querySelector<HTMLButtonElement>("#cmb-submit");
    if (submit) {
      submit.disabled = !(state.freetext.trim().length > 0 && canAct);
    }
  });
  const source = pane.querySelector<HTMLElement>("#span-source");
  source?.addEventListener("mouseup", () => {
    const span = selectionOffsets(source, seText);
    if (span) {
      state.span = span;
      renderIdentification(view, pane, actions);
    }
  });
  pane.querySelector("#cmb-submit")?.addEventListener("click", () => {
    if (!ready || state.strategy === null) {
      return;
    }
    actions.submitArgument({
      strategy: state.strategy,
      reasons: [...state.reasons],
      span: state.strategy === "other" ? null : state.span,
      freetext: state.strategy === "other" ? state.freetext.trim() : null,
    });
  });
}

/** Map the current text selection inside `container` to offsets in `text`. */
function selectionOffsets(container: HTMLElement, text: string): Span | null {
  const sel = window.getSelection();
  if (!sel || sel.rangeCount === 0 || sel.isCollapsed) {
    return null;
  }
  const range = sel.getRangeAt(0);
  if (!container.contains(range.startContainer) || !container.contains(range.endContainer)) {
    return null;
  }
  const selected = sel.toString();
  const start = text.indexOf(selected);
  if (selected.length === 0 || start < 0) {
    return null;
  }
  return { start, end: start + selected.length };
}

function renderSummary(view: ClientView, pane: HTMLElement): void {
  const score = view.lastScore;
  const args = view.argumentsRevealed ?? {};
  const rows = view.players
    .map((m) => {
      const pick = args[m.id];
      const strategy = pick ? strategyLabel(pick.strategy) : "—";
      const reasons = pick ? pick.reasons.map((r) => r.replace(/_/g, " ")).join("; ") : "";
      const revote = score?.revotes?.[m.id]?.map(strategyLabel).join(", ") ?? "";
      const delta = score?.deltas[m.id] ?? 0;
      const deltaCell = delta === 0 ? "±0" : delta > 0 ? `+${delta}` : `${delta}`;
      return `<tr>
        <td>${esc(m.name)}</td>
        <td>${esc(strategy)}</td>
        <td class="reasons">${esc(reasons)}</td>
        ${score?.stage === "revote" ? `<td>${esc(revote)}</td>` : ""}
        <td class="delta">${deltaCell}</td>
      </tr>`;
    })
    .join("");
  const outcome =
    score === null ? "Votes are in." :
    score.outcome === "unanimous" ? "Unanimous!" :
    score.outcome === "disagreement" ? "Disagreement — discussion opens." :
    score.stage === "revote" ? revoteHeadline(score.accepted) : "";
  const task = view.revealedTask
    ? `<p class="task-reveal">The card was <strong>${esc(strategyLabel(view.revealedTask.strategy))}</strong> for ${view.revealedTask.value} points.</p>`
    : `<p class="task-reveal hidden-task">The task card stays hidden for now.</p>`;
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Round summary</h2>
    <p class="outcome">${esc(outcome)}</p>
    ${task}
    <table class="summary"><thead><tr>
      <th>player</th><th>picked</th><th>reasons</th>${score?.stage === "revote" ? "<th>revote</th>" : ""}<th>points</th>
    </tr></thead><tbody>${rows}</tbody></table>
    <p class="hint">The next step starts automatically.</p>
  `;
}

function revoteHeadline(accepted: string[]): string {
  if (accepted.length === 0) {
    return "No strategy won a majority.";
  }
  return `Accepted: ${accepted.map(strategyLabel).join(", ")}.`;
}

function renderDiscussion(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const d = view.discussion;
  const me = view.sessionId;
  const mine = me !== null ? d?.remaining[me] ?? 0 : 0;
  const limit = d?.limit ?? 0;
  const used = limit - mine;
  const messages = (d?.messages ?? [])
    .map((m) => `<div class="msg"><strong>${esc(m.senderName)}:</strong> ${esc(m.text)}</div>`)
    .join("");
  const stillIn = myTurn(view);
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Discussion</h2>
    <p class="hint">The vote split. Make your case, then pass. ${formatSeconds(d?.timeLimitS)} on the clock.</p>
    <div class="discussion-log">${messages || `<p class="hint">No arguments yet.</p>`}</div>
    <div class="counter">your messages: ${used}/${limit}</div>
    <div class="discussion-controls">
      <input id="disc-input" type="text" ${stillIn && mine > 0 ? "" : "disabled"} placeholder="Argue for what you heard…">
      <button id="disc-send" ${stillIn && mine > 0 ? "" : "disabled"}>Send</button>
      ${stillIn ? `<button id="disc-pass">Pass</button>` : `<span class="hint">You passed.</span>`}
    </div>
  `;
  const input = pane.querySelector<HTMLInputElement>("#disc-input")!;
  const send = (): void => {
    if (input.value.trim().length > 0) {
      actions.discussionSend(input.value);
      input.value = "";
    }
  };
  pane.querySelector("#disc-send")?.addEventListener("click", send);
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") {
      send();
    }
  });
  pane.querySelector("#disc-pass")?.addEventListener("click", () => actions.discussionPass());
}

function renderRevote(view: ClientView, pane: HTMLElement, actions: Actions): void {
  if (revoteTurn !== view.turnNumber) {
    revoteTurn = view.turnNumber;
    revoteChecked.clear();
  }
  const options = view.revoteStrategies ?? [...VOTE_STRATEGIES];
  const canAct = myTurn(view);
  const boxes = options
    .map((s) => {
      const checked = revoteChecked.has(s) ? "checked" : "";
      return `<label class="reason"><input type="checkbox" data-revote="${s}" ${checked}> ${esc(strategyLabel(s))}</label>`;
    })
    .join("");
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Revote</h2>
    <p class="hint">Select every strategy you now think applies.</p>
    <div class="revote-boxes">${boxes}</div>
    <button id="revote-submit" ${canAct && revoteChecked.size > 0 ? "" : "disabled"}>Submit revote</button>
    ${canAct ? "" : `<p class="hint">Your revote is in. Waiting for the others…</p>`}
  `;
  for (const box of pane.querySelectorAll<HTMLInputElement>("input[data-revote]")) {
    box.addEventListener("change", () => {
      const s = box.dataset.revote!;
      if (box.checked) {
        revoteChecked.add(s);
      } else {
        revoteChecked.delete(s);
      }
      const submit = pane.querySelector<HTMLButtonElement>("#revote-submit");
      if (submit) {
        submit.disabled = !(canAct && revoteChecked.size > 0);
      }
    });
  }
  pane.querySelector("#revote-submit")?.addEventListener("click", () => {
    if (revoteChecked.size > 0) {
      actions.revoteSubmit([...revoteChecked]);
    }
  });
}

function renderPowerWindow(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const canAct = myTurn(view);
  const powers = view.you.powers;
  const others = view.players.filter((m) => m.id !== view.sessionId);
  const cards = powers
    .map((kind, i) => {
      const target =
        kind === "freeze"
          ? `<select data-target-for="${i}">${others.map((m) => `<option value="${m.id}">${esc(m.name)}</option>`).join("")}</select>`
          : "";
      return `<div class="power-card">
        <span>${esc(kind.replace(/_/g, " "))}</span>
        ${target}
        <button data-use="${i}" data-kind="${esc(kind)}" ${canAct ? "" : "disabled"}>Play</button>
      </div>`;
    })
    .join("");
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Power cards</h2>
    ${powers.length > 0 ? cards : `<p class="hint">You hold no power cards.</p>`}
    <button id="skip-power" ${canAct ? "" : "disabled"}>Continue without playing</button>
  `;
  for (const btn of pane.querySelectorAll<HTMLButtonElement>("button[data-use]")) {
    btn.addEventListener("click", () => {
      const kind = btn.dataset.kind!;
      const select = pane.querySelector<HTMLSelectElement>(`select[data-target-for="${btn.dataset.use}"]`);
      actions.usePower(kind, select ? select.value : null);
    });
  }
  pane.querySelector("#skip-power")?.addEventListener("click", () => actions.skipPower());
}

function renderDiceRoll(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const canAct = myTurn(view);
  const last = view.dice
    ? `<p class="dice-result">${esc(playerName(view, view.dice.player))} rolled ${view.dice.dice.join(" + ")} = ${view.dice.total}.</p>`
    : "";
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Roll the dice</h2>
    ${last}
    <button id="roll-btn" ${canAct ? "" : "disabled"}>Roll</button>
    ${canAct ? "" : `<p class="hint">Waiting for the roll…</p>`}
  `;
  pane.querySelector("#roll-btn")?.addEventListener("click", () => actions.rollDice());
}

function renderEventDraw(view: ClientView, pane: HTMLElement, actions: Actions): void {
  const canAct = myTurn(view);
  // the draw happens after the roll; without a dice result this turn the
  // server would reject it, so the button mirrors that gate
  const rolled = view.dice !== null;
  const last = view.lastEvent
    ? `<p class="event-result">${esc(playerName(view, view.lastEvent.player))} drew <strong>${esc(view.lastEvent.kind.replace(/_/g, " "))}</strong>${view.lastEvent.amount !== 0 ? ` (${view.lastEvent.amount > 0 ? "+" : ""}${view.lastEvent.amount})` : ""}${view.lastEvent.powerGranted ? " — a power card!" : ""}.</p>`
    : "";
  pane.innerHTML = `
    ${textPanel(view)}
    <h2>Draw an event card</h2>
    ${view.dice ? `<p class="dice-result">You rolled ${view.dice.total}.</p>` : ""}
    ${last}
    <button id="draw-btn" ${canAct && rolled ? "" : "disabled"}>Draw</button>
    ${canAct ? "" : `<p class="hint">Waiting for the draw…</p>`}
  `;
  pane.querySelector("#draw-btn")?.addEventListener("click", () => actions.drawEvent());
}

// -- chat dock ---------------------------------------------------------------

function chatAllowed(view: ClientView): "lobby" | "idle" | null {
  if (view.stage === "room") {
    return "lobby";
  }
  if (view.stage !== "ingame") {
    return null;
  }
  if (view.phase === "reader_compose" && view.sessionId !== view.reader) {
    return "idle";
  }
  return null;
}

function renderChatDock(view: ClientView, dock: HTMLElement, actions: Actions): void {
  const scope = chatAllowed(view);
  const log = view.chat
    .slice(-30)
    .map((m) => `<div class="msg"><strong>${esc(m.senderName)}:</strong> ${esc(m.text)}</div>`)
    .join("");
  if (scope === null && view.chat.length === 0) {
    dock.innerHTML = "";
    return;
  }
  dock.innerHTML = `
    <div class="chat-log">${log}</div>
    ${scope !== null ? `
      <div class="chat-controls">
        <input id="chat-input" type="text" placeholder="${scope === "lobby" ? "Chat with the table…" : "Idle chat while the reader writes…"}">
        <button id="chat-send">Send</button>
      </div>` : ""}
  `;
  const input = dock.querySelector<HTMLInputElement>("#chat-input");
  if (input) {
    const send = (): void => {
      if (input.value.trim().length > 0) {
        actions.sendChat(input.value);
        input.value = "";
      }
    };
    dock.querySelector("#chat-send")?.addEventListener("click", send);
    input.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        send();
      }
    });
  }
}

// -- helpers -----------------------------------------------------------------

function formatSeconds(s: number | undefined): string {
  if (s === undefined) {
    return "";
  }
  return s >= 60 ? `${Math.round(s / 60)} min` : `${s} s`;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
