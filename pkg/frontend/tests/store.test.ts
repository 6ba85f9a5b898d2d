import { describe, expect, it } from "vitest";

import { Transport } from "../src/protocol.js";
import { NotebookDoc, SessionStore } from "../src/store.js";

const MAP_APPEND: NotebookDoc = {
  cells: [
    { id: "c1", source: 'x = {"a": [], "b": []}' },
    { id: "c2", source: 'x["a"].append(1)' },
    { id: "c3", source: "z = 123" },
    { id: "c4", source: "print(x)" },
  ],
};

type Responder = (msg: Record<string, unknown>) => Record<string, unknown>[];

/** Scripted server: maps each op to the events it should emit. */
class FakeServer {
  transport: Transport;
  sent: Record<string, unknown>[] = [];
  private handler: (text: string) => void = () => undefined;

  constructor(private responders: Record<string, Responder>) {
    this.transport = {
      send: (text) => {
        const msg = JSON.parse(text) as Record<string, unknown>;
        this.sent.push(msg);
        const responder = this.responders[String(msg.op)];
        const events = responder ? responder(msg) : [];
        for (const event of events) {
          this.emit({ req: msg.req, ...event });
        }
        this.emit({ req: msg.req, ev: "done" });
      },
      onMessage: (h) => {
        this.handler = h;
      },
      onClose: () => undefined,
      close: () => undefined,
    };
  }

  emit(event: Record<string, unknown>): void {
    queueMicrotask(() => this.handler(JSON.stringify(event)));
  }
}

const openEvents: Responder = () => [
  { ev: "session", session: "s1" },
  { ev: "output", cell: "c1", text: "", failed: false },
  { ev: "output", cell: "c2", text: "", failed: false },
  { ev: "output", cell: "c3", text: "", failed: false },
  { ev: "output", cell: "c4", text: '{"a": [1], "b": []}\n', failed: false },
  { ev: "analysis", stale: [], plan: [] },
  { ev: "state_digest", digest: "d0", fs: {} },
];

describe("SessionStore", () => {
  it("opens a session and records outputs", async () => {
    const server = new FakeServer({ open: openEvents });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "dynamic");
    expect(store.view.sessionId).toBe("s1");
    expect(store.view.cells.map((c) => c.status)).toEqual([
      "clean",
      "clean",
      "clean",
      "clean",
    ]);
    expect(store.view.cells[3].output).toBe('{"a": [1], "b": []}\n');
    expect(store.view.digest).toBe("d0");
  });

  it("highlights exactly the analysis reply, never a local guess", async () => {
    const server = new FakeServer({
      open: openEvents,
      edit_cell: () => [{ ev: "analysis", stale: ["c1", "c2", "c4"], plan: ["c1", "c2", "c4"] }],
    });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "dynamic");
    await store.editCell("c2", 'x["b"].append(1)');
    const statuses = Object.fromEntries(
      store.view.cells.map((c) => [c.id, c.status])
    );
    expect(statuses).toEqual({
      c1: "stale",
      c2: "stale",
      c3: "clean",
      c4: "stale",
    });
    expect(store.view.cells.map((c) => c.badge)).toEqual([1, 2, null, 3]);
    expect(store.view.pendingPlan).toEqual(["c1", "c2", "c4"]);
    expect(store.view.reactEnabled).toBe(true);
  });

  it("an identical edit yields an empty plan and no highlights", async () => {
    const server = new FakeServer({
      open: openEvents,
      edit_cell: () => [{ ev: "analysis", stale: [], plan: [] }],
    });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "dynamic");
    await store.editCell("c2", 'x["a"].append(1)');
    expect(store.view.cells.every((c) => c.status === "clean")).toBe(true);
    expect(store.view.reactEnabled).toBe(false);
  });

  it("react walks plan cells queued -> running -> clean in plan order", async () => {
    const seen: string[][] = [];
    const server = new FakeServer({
      open: openEvents,
      edit_cell: () => [
        { ev: "analysis", stale: ["c1", "c2", "c4"], plan: ["c1", "c2", "c4"] },
      ],
      react: () => [
        { ev: "output", cell: "c1", text: "", failed: false },
        { ev: "output", cell: "c2", text: "", failed: false },
        { ev: "output", cell: "c4", text: '{"a": [], "b": [1]}\n', failed: false },
        { ev: "analysis", stale: [], plan: [] },
        { ev: "state_digest", digest: "d1", fs: {} },
      ],
    });
    const store = new SessionStore(server.transport);
    store.subscribe(() => {
      seen.push(store.view.cells.map((c) => c.status));
    });
    await store.open(MAP_APPEND, "dynamic");
    await store.editCell("c2", 'x["b"].append(1)');
    await store.react();
    // after the first output c1 is clean and c2 is running
    expect(seen).toContainEqual(["running", "queued", "clean", "queued"]);
    expect(seen).toContainEqual(["clean", "running", "clean", "queued"]);
    expect(seen).toContainEqual(["clean", "clean", "clean", "running"]);
    expect(store.view.cells.every((c) => c.status === "clean")).toBe(true);
    expect(store.view.cells[3].output).toBe('{"a": [], "b": [1]}\n');
    expect(store.view.digest).toBe("d1");
  });

  it("lint replies block React and flag the offending cells", async () => {
    const server = new FakeServer({
      open: openEvents,
      edit_cell: () => [
        {
          ev: "lint",
          violations: [
            { kind: "Redefinition", cells: ["c1", "c3"], name: "a", message: "a bound twice" },
          ],
        },
        { ev: "analysis", stale: [], plan: [], blocked: true },
      ],
    });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "static");
    await store.editCell("c2", "b = 8");
    expect(store.view.lintBanner).toContain("Redefinition");
    expect(store.view.reactEnabled).toBe(false);
    expect(store.view.cells[0].status).toBe("lint-blocked");
  });

  it("failed outputs mark the cell errored", async () => {
    const server = new FakeServer({
      open: openEvents,
      run_cell: () => [
        { ev: "output", cell: "c3", text: "Error: undefined name: q\n", failed: true },
        { ev: "state_digest", digest: "d2", fs: {} },
      ],
    });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "dynamic");
    await store.runCell("c3");
    expect(store.view.cells[2].status).toBe("errored");
  });

  it("server errors land in the event log", async () => {
    const server = new FakeServer({
      open: openEvents,
      edit_cell: () => [{ ev: "error", message: "unknown cell: zz" }],
    });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "dynamic");
    await store.editCell("c1", "a = 1");
    expect(store.view.eventLog.some((l) => l.includes("unknown cell"))).toBe(true);
  });

  it("policy switch re-requests analysis for the same dirty state", async () => {
    const requested: string[] = [];
    const server = new FakeServer({
      open: openEvents,
      edit_cell: () => [
        { ev: "analysis", stale: ["c2", "c3", "c4"], plan: ["c2", "c3", "c4"] },
      ],
      set_policy: (msg) => {
        requested.push(String(msg.policy));
        return [{ ev: "analysis", stale: ["c1", "c2", "c4"], plan: ["c1", "c2", "c4"] }];
      },
    });
    const store = new SessionStore(server.transport);
    await store.open(MAP_APPEND, "run-subsequent");
    await store.editCell("c2", 'x["b"].append(1)');
    expect(store.view.pendingPlan).toEqual(["c2", "c3", "c4"]);
    await store.setPolicy("dynamic");
    expect(requested).toEqual(["dynamic"]);
    expect(store.view.pendingPlan).toEqual(["c1", "c2", "c4"]);
    expect(store.view.cells.map((c) => c.badge)).toEqual([1, 2, null, 3]);
  });
});
