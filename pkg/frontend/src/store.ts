/**
 * Session state machine behind the notebook UI.
 *
 * The store never computes plans locally: every highlight mirrors the
 * server's latest analysis reply, and a reaction walks exactly the
 * plan's cells through queued -> running -> clean in plan order.
 */

import {
  AnalysisEvent,
  DigestEvent,
  LintEvent,
  OutputEvent,
  ProtocolClient,
  ServerEvent,
  Transport,
} from "./protocol.js";

export type CellStatus =
  | "clean"
  | "stale"
  | "queued"
  | "running"
  | "errored"
  | "lint-blocked";

export interface CellView {
  id: string;
  buffer: string;
  output: string;
  status: CellStatus;
  /** 1-based position in the pending plan, shown as a badge. */
  badge: number | null;
}

export interface SessionView {
  connection: "connecting" | "open" | "closed";
  sessionId: string | null;
  policy: string;
  granularity: string;
  cells: CellView[];
  pendingPlan: string[];
  lintBanner: string | null;
  reactEnabled: boolean;
  fsPanel: Record<string, string>;
  digest: string | null;
  eventLog: string[];
}

export interface NotebookDoc {
  cells: { id: string; source: string }[];
}

function freshView(): SessionView {
  return {
    connection: "connecting",
    sessionId: null,
    policy: "dynamic",
    granularity: "coarse",
    cells: [],
    pendingPlan: [],
    lintBanner: null,
    reactEnabled: false,
    fsPanel: {},
    digest: null,
    eventLog: [],
  };
}

export class SessionStore {
  view: SessionView = freshView();
  private client: ProtocolClient;
  private listeners: (() => void)[] = [];

  constructor(transport: Transport) {
    this.client = new ProtocolClient(transport);
    this.client.observe((event) => this.onEvent(event));
  }

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private cell(id: string): CellView | undefined {
    return this.view.cells.find((c) => c.id === id);
  }

  private log(line: string): void {
    this.view.eventLog.push(line);
  }

  // -- outgoing operations --

  async open(notebook: NotebookDoc, policy = "dynamic", granularity = "coarse"): Promise<void> {
    this.view = freshView();
    this.view.policy = policy;
    this.view.granularity = granularity;
    this.view.cells = notebook.cells.map((c) => ({
      id: c.id,
      buffer: c.source,
      output: "",
      status: "clean" as CellStatus,
      badge: null,
    }));
    await this.client.request("open", { notebook, policy, granularity });
    this.view.connection = "open";
    this.notify();
  }

  async editCell(id: string, source: string): Promise<void> {
    const cell = this.cell(id);
    if (!cell) {
      throw new Error(`unknown cell: ${id}`);
    }
    cell.buffer = source;
    await this.client.request("edit_cell", { cell: id, source });
    this.notify();
  }

  async setPolicy(policy: string, granularity?: string): Promise<void> {
    this.view.policy = policy;
    if (granularity) {
      this.view.granularity = granularity;
    }
    await this.client.request("set_policy", {
      policy,
      granularity: this.view.granularity,
    });
    this.notify();
  }

  async react(): Promise<void> {
    if (!this.view.reactEnabled) {
      return;
    }
    for (const id of this.view.pendingPlan) {
      const cell = this.cell(id);
      if (cell) {
        cell.status = "queued";
      }
    }
    const first = this.cell(this.view.pendingPlan[0] ?? "");
    if (first) {
      first.status = "running";
    }
    this.notify();
    await this.client.request("react");
    this.notify();
  }

  async runCell(id: string): Promise<void> {
    await this.client.request("run_cell", { cell: id });
    this.notify();
  }

  async reset(): Promise<void> {
    await this.client.request("reset");
    for (const cell of this.view.cells) {
      cell.status = "clean";
      cell.badge = null;
    }
    this.view.pendingPlan = [];
    this.view.lintBanner = null;
    this.view.reactEnabled = false;
    this.notify();
  }

  disconnect(): void {
    this.view.connection = "closed";
    this.client.close();
    this.notify();
  }

  // -- incoming events --

  private onEvent(event: ServerEvent): void {
    switch (event.ev) {
      case "session":
        this.view.sessionId = String(event.session);
        break;
      case "output":
        this.onOutput(event as OutputEvent);
        break;
      case "analysis":
        this.onAnalysis(event as AnalysisEvent);
        break;
      case "lint":
        this.onLint(event as LintEvent);
        break;
      case "state_digest": {
        const digest = event as DigestEvent;
        this.view.digest = digest.digest;
        if (digest.fs) {
          this.view.fsPanel = digest.fs;
        }
        break;
      }
      case "error":
        this.log(`error: ${String(event.message)}`);
        break;
    }
    this.notify();
  }

  private onOutput(event: OutputEvent): void {
    const cell = this.cell(event.cell);
    if (!cell) {
      return;
    }
    cell.output = event.text;
    cell.status = event.failed ? "errored" : "clean";
    cell.badge = null;
    // march the next planned cell into "running"
    const plan = this.view.pendingPlan;
    const index = plan.indexOf(event.cell);
    if (index >= 0 && index + 1 < plan.length) {
      const next = this.cell(plan[index + 1]);
      if (next && next.status === "queued") {
        next.status = "running";
      }
    }
  }

  private onAnalysis(event: AnalysisEvent): void {
    // the pending plan mirrors the reply verbatim; stale markings and
    // badges come only from here
    this.view.pendingPlan = [...event.plan];
    if (event.blocked) {
      // a lint event set banner and cell flags; keep them
      this.view.reactEnabled = false;
      return;
    }
    this.view.lintBanner = null;
    for (const cell of this.view.cells) {
      if (cell.status === "stale" || cell.status === "lint-blocked") {
        cell.status = "clean";
      }
      cell.badge = null;
    }
    event.plan.forEach((id, i) => {
      const cell = this.cell(id);
      if (cell) {
        cell.status = "stale";
        cell.badge = i + 1;
      }
    });
    this.view.reactEnabled = event.plan.length > 0 && !event.blocked;
    if (event.error) {
      this.log(event.error);
    }
  }

  private onLint(event: LintEvent): void {
    this.view.lintBanner = event.violations
      .map((v) => `${v.kind}: ${v.message}`)
      .join("\n");
    this.view.reactEnabled = false;
    for (const violation of event.violations) {
      for (const id of violation.cells) {
        const cell = this.cell(id);
        if (cell) {
          cell.status = "lint-blocked";
        }
      }
    }
    this.log(`lint: ${event.violations.length} violation(s)`);
  }
}
