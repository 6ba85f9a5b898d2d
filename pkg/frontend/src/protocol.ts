/**
 * Wire protocol client: request/reply correlation over one WebSocket.
 *
 * Every client message carries a fresh `req` id; the server answers
 * with one or more events tagged with the same id and closes the
 * exchange with `{"ev": "done"}`. Events are surfaced to an observer
 * as they arrive (outputs stream during a reaction) and each request
 * resolves with the full event list once done.
 */

export type ClientOp =
  | "open"
  | "edit_cell"
  | "run_cell"
  | "plan"
  | "react"
  | "set_policy"
  | "reset";

export interface ServerEvent {
  req: number;
  ev: string;
  [key: string]: unknown;
}

export interface OutputEvent extends ServerEvent {
  ev: "output";
  cell: string;
  text: string;
  failed?: boolean;
}

export interface AnalysisEvent extends ServerEvent {
  ev: "analysis";
  stale: string[];
  plan: string[];
  blocked?: boolean;
  error?: string;
}

export interface LintEvent extends ServerEvent {
  ev: "lint";
  violations: { kind: string; cells: string[]; name: string; message: string }[];
}

export interface DigestEvent extends ServerEvent {
  ev: "state_digest";
  digest: string;
  fs?: Record<string, string>;
}

/** Minimal transport so the client works over a browser WebSocket, a
 * node `ws` socket, or a scripted fake in tests. */
export interface Transport {
  send(text: string): void;
  onMessage(handler: (text: string) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

interface Pending {
  events: ServerEvent[];
  resolve: (events: ServerEvent[]) => void;
  reject: (err: Error) => void;
}

export class ProtocolClient {
  private nextReq = 1;
  private pending = new Map<number, Pending>();
  private observer: ((event: ServerEvent) => void) | null = null;
  private closed = false;

  constructor(private transport: Transport) {
    transport.onMessage((text) => this.dispatch(text));
    transport.onClose(() => this.abortAll());
  }

  /** Observe every event as it arrives, before request resolution. */
  observe(handler: (event: ServerEvent) => void): void {
    this.observer = handler;
  }

  request(op: ClientOp, fields: Record<string, unknown> = {}): Promise<ServerEvent[]> {
    if (this.closed) {
      return Promise.reject(new Error("connection closed"));
    }
    const req = this.nextReq++;
    const promise = new Promise<ServerEvent[]>((resolve, reject) => {
      this.pending.set(req, { events: [], resolve, reject });
    });
    this.transport.send(JSON.stringify({ req, op, ...fields }));
    return promise;
  }

  close(): void {
    this.transport.close();
  }

  private dispatch(text: string): void {
    const event = JSON.parse(text) as ServerEvent;
    const entry = this.pending.get(event.req);
    if (event.ev === "done") {
      if (entry) {
        this.pending.delete(event.req);
        entry.resolve(entry.events);
      }
      return;
    }
    if (this.observer) {
      this.observer(event);
    }
    if (entry) {
      entry.events.push(event);
    }
  }

  private abortAll(): void {
    this.closed = true;
    for (const entry of this.pending.values()) {
      entry.reject(new Error("connection closed"));
    }
    this.pending.clear();
  }
}
