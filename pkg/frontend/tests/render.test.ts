import { describe, expect, it } from "vitest";

import { renderNotebook } from "../src/render.js";
import { SessionView } from "../src/store.js";

function view(overrides: Partial<SessionView> = {}): SessionView {
  return {
    connection: "open",
    sessionId: "s1",
    policy: "dynamic",
    granularity: "coarse",
    cells: [
      { id: "c1", buffer: "a = 1", output: "", status: "clean", badge: null },
      { id: "c2", buffer: "print(a)", output: "1\n", status: "clean", badge: null },
    ],
    pendingPlan: [],
    lintBanner: null,
    reactEnabled: false,
    fsPanel: {},
    digest: "abcdef0123456789",
    eventLog: [],
    ...overrides,
  };
}

describe("renderNotebook", () => {
  it("renders cells in spatial order with outputs", () => {
    const html = renderNotebook(view());
    expect(html.indexOf('data-cell="c1"')).toBeLessThan(
      html.indexOf('data-cell="c2"')
    );
    expect(html).toContain("<pre class=\"output\">1\n</pre>");
  });

  it("highlights stale cells with plan badges in order", () => {
    const html = renderNotebook(
      view({
        cells: [
          { id: "c1", buffer: "a = 1", output: "", status: "stale", badge: 1 },
          { id: "c2", buffer: "b = a", output: "", status: "stale", badge: 2 },
          { id: "c3", buffer: "z = 0", output: "", status: "clean", badge: null },
        ],
        pendingPlan: ["c1", "c2"],
        reactEnabled: true,
      })
    );
    expect(html.match(/status-stale/g)?.length).toBe(2);
    expect(html).toContain('<span class="badge">1</span>');
    expect(html).toContain('<span class="badge">2</span>');
    expect(html).toContain('<button id="react">React</button>');
  });

  it("no highlights when the plan is empty", () => {
    const html = renderNotebook(view());
    expect(html).not.toContain("status-stale");
    expect(html).not.toContain('<span class="badge">');
    expect(html).toContain('<button id="react" disabled>React</button>');
  });

  it("lint banner and blocked cells are visible and React disabled", () => {
    const html = renderNotebook(
      view({
        lintBanner: "Redefinition: name 'a' is bound by more than one cell",
        reactEnabled: false,
        cells: [
          { id: "c1", buffer: "a = 1", output: "", status: "lint-blocked", badge: null },
        ],
      })
    );
    expect(html).toContain("banner lint");
    expect(html).toContain("Redefinition");
    expect(html).toContain("status-lint-blocked");
    expect(html).toContain('<button id="react" disabled>React</button>');
  });

  it("escapes sources and shows the reconnect banner when closed", () => {
    const html = renderNotebook(
      view({
        connection: "closed",
        cells: [
          {
            id: "c1",
            buffer: 'print("<b>")',
            output: "<b>\n",
            status: "clean",
            badge: null,
          },
        ],
      })
    );
    expect(html).toContain("banner reconnect");
    expect(html).not.toContain("<b>\n");
    expect(html).toContain("&lt;b&gt;");
  });

  it("renders the filesystem panel", () => {
    const html = renderNotebook(view({ fsPanel: { "log.txt": "alpha\n" } }));
    expect(html).toContain("log.txt");
    expect(html).toContain("alpha");
  });
});
