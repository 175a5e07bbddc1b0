/** Browser bootstrap: restore the session in localStorage or offer the
 * start panel, then hand control to GameApp. */

import { SessionClient } from "./api.js";
import { GameApp, type AppElements } from "./app.js";
import type { PlayerColor } from "./types.js";

const STORAGE_KEY = "baseraid-session-id";

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id} in the page`);
  return found;
}

async function boot(): Promise<void> {
  const client = new SessionClient("");
  const elements: AppElements = {
    board: el("board"),
    dashboard: el("dashboard"),
    message: el("message"),
    banner: el("banner"),
  };
  const app = new GameApp(client, elements);
  const startPanel = el("start-panel");
  const gamePanel = el("game-panel");

  async function showGame(sessionId: string): Promise<void> {
    localStorage.setItem(STORAGE_KEY, sessionId);
    startPanel.classList.add("hidden");
    gamePanel.classList.remove("hidden");
    app.startPolling();
  }

  function showStart(): void {
    localStorage.removeItem(STORAGE_KEY);
    app.stopPolling();
    gamePanel.classList.add("hidden");
    startPanel.classList.remove("hidden");
  }

  el("new-session-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const color = (el("pick-color") as HTMLSelectElement).value as PlayerColor;
    const games = parseInt((el("pick-games") as HTMLInputElement).value, 10) || 40;
    void app
      .create({ human_color: color, games })
      .then((sessionId) => showGame(sessionId))
      .catch((error) => app.showError(error));
  });

  el("leave-session").addEventListener("click", () => showStart());

  const existing = localStorage.getItem(STORAGE_KEY);
  if (existing) {
    try {
      await app.attach(existing);
      await showGame(existing);
      return;
    } catch {
      // stale id: fall through to the start panel
    }
  }
  showStart();
}

void boot();
