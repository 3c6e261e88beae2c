// WebSocket connection: decodes frames, hands envelopes to one callback.

import { decodeFrame, encodeChat, encodeFrame, ProtocolError } from "./protocol.js";
import type { Envelope } from "./protocol.js";

export interface ConnectionEvents {
  onFrame: (env: Envelope) => void;
  onClose: (reason: string) => void;
  onError: (message: string) => void;
}

export class Connection {
  private ws: WebSocket;
  private events: ConnectionEvents;

  constructor(url: string, events: ConnectionEvents) {
    this.events = events;
    this.ws = new WebSocket(url);
    this.ws.binaryType = "arraybuffer";
    this.ws.onmessage = (ev: MessageEvent) => {
      let env: Envelope;
      try {
        env = decodeFrame(ev.data as string | ArrayBuffer);
      } catch (err) {
        if (err instanceof ProtocolError) {
          this.events.onError(`bad frame from server: ${err.message}`);
          return;
        }
        throw err;
      }
      this.events.onFrame(env);
    };
    this.ws.onclose = (ev: CloseEvent) => {
      this.events.onClose(ev.reason || `connection closed (${ev.code})`);
    };
    this.ws.onerror = () => {
      this.events.onError("websocket error");
    };
  }

  whenOpen(fn: () => void): void {
    if (this.ws.readyState === WebSocket.OPEN) {
      fn();
    } else {
      this.ws.addEventListener("open", fn, { once: true });
    }
  }

  send(code: string, payload: Record<string, unknown> = {}): void {
    this.ws.send(encodeFrame(code, payload));
  }

  sendChat(text: string): void {
    this.ws.send(encodeChat(text));
  }

  close(): void {
    this.ws.close();
  }
}
