/**
 * Pure HTML rendering of a SessionView; the DOM glue in app.ts only
 * swaps innerHTML and rebinds handlers, so everything visible is
 * testable as a string.
 */

import { SessionView } from "./store.js";

const POLICIES = ["rerun-all", "run-subsequent", "static", "dynamic"];

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderNotebook(view: SessionView): string {
  const parts: string[] = [];
  if (view.connection === "closed") {
    parts.push('<div class="banner reconnect">Connection lost - reload to reconnect.</div>');
  }
  parts.push('<header class="toolbar">');
  parts.push('<label>policy <select id="policy">');
  for (const policy of POLICIES) {
    const selected = policy === view.policy ? " selected" : "";
    parts.push(`<option value="${policy}"${selected}>${policy}</option>`);
  }
  parts.push("</select></label>");
  const disabled = view.reactEnabled ? "" : " disabled";
  parts.push(`<button id="react"${disabled}>React</button>`);
  parts.push('<button id="reset">Restart &amp; run all</button>');
  if (view.digest) {
    parts.push(`<span class="digest" title="state digest">${view.digest.slice(0, 12)}</span>`);
  }
  parts.push("</header>");
  if (view.lintBanner) {
    parts.push(
      `<div class="banner lint">${escapeHtml(view.lintBanner).replace(/\n/g, "<br>")}</div>`
    );
  }
  parts.push('<main class="cells">');
  for (const cell of view.cells) {
    parts.push(`<section class="cell status-${cell.status}" data-cell="${cell.id}">`);
    parts.push('<div class="gutter">');
    parts.push(`<span class="cell-id">${cell.id}</span>`);
    if (cell.badge !== null) {
      parts.push(`<span class="badge">${cell.badge}</span>`);
    }
    parts.push(`<span class="status">${cell.status}</span>`);
    parts.push("</div>");
    parts.push(
      `<textarea class="editor" data-cell="${cell.id}" rows="${
        cell.buffer.split("\n").length
      }">${escapeHtml(cell.buffer)}</textarea>`
    );
    if (cell.output) {
      parts.push(`<pre class="output">${escapeHtml(cell.output)}</pre>`);
    }
    parts.push("</section>");
  }
  parts.push("</main>");
  const paths = Object.keys(view.fsPanel);
  parts.push('<aside class="fs-panel"><h3>filesystem</h3>');
  if (paths.length === 0) {
    parts.push('<p class="empty">(empty)</p>');
  } else {
    for (const path of paths) {
      parts.push(
        `<details><summary>${escapeHtml(path)}</summary><pre>${escapeHtml(
          view.fsPanel[path]
        )}</pre></details>`
      );
    }
  }
  parts.push("</aside>");
  parts.push('<aside class="event-log"><h3>events</h3><ul>');
  for (const line of view.eventLog.slice(-8)) {
    parts.push(`<li>${escapeHtml(line)}</li>`);
  }
  parts.push("</ul></aside>");
  return parts.join("");
}
