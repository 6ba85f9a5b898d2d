/**
 * Browser entry point: one WebSocket to the session server, a
 * SessionStore, and innerHTML rendering with delegated events.
 */

import { Transport } from "./protocol.js";
import { NotebookDoc, SessionStore } from "./store.js";
import { renderNotebook } from "./render.js";

const SAMPLE: NotebookDoc = {
  cells: [
    { id: "c1", source: 'x = {"a": [], "b": []}' },
    { id: "c2", source: 'x["a"].append(1)' },
    { id: "c3", source: "z = 123" },
    { id: "c4", source: "print(x)" },
  ],
};

function browserTransport(url: string): Transport {
  const socket = new WebSocket(url);
  let messageHandler: (text: string) => void = () => undefined;
  let closeHandler: () => void = () => undefined;
  const ready = new Promise<void>((resolve, reject) => {
    socket.onopen = () => resolve();
    socket.onerror = () => reject(new Error("websocket error"));
  });
  socket.onmessage = (event) => messageHandler(String(event.data));
  socket.onclose = () => closeHandler();
  return {
    send(text: string): void {
      void ready.then(() => socket.send(text));
    },
    onMessage(handler): void {
      messageHandler = handler;
    },
    onClose(handler): void {
      closeHandler = handler;
    },
    close(): void {
      socket.close();
    },
  };
}

function mount(root: HTMLElement, store: SessionStore): void {
  const redraw = () => {
    root.innerHTML = renderNotebook(store.view);
  };
  store.subscribe(redraw);
  root.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "policy") {
      void store.setPolicy((target as HTMLSelectElement).value);
    }
    if (target.classList.contains("editor")) {
      const textarea = target as HTMLTextAreaElement;
      const id = textarea.dataset.cell;
      if (id) {
        void store.editCell(id, textarea.value);
      }
    }
  });
  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "react") {
      void store.react();
    }
    if (target.id === "reset") {
      void store.reset();
    }
  });
  redraw();
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const transport = browserTransport(`${scheme}://${location.host}/ws`);
  const store = new SessionStore(transport);
  mount(root, store);
  void store.open(SAMPLE, "dynamic");
}

if (typeof document !== "undefined") {
  boot();
}
