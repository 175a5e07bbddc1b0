/** End-to-end: the real DOM client against the real service.
 *
 * A scripted "human" completes a two-game teaching session entirely through
 * the click UI; the server rejects an illegal move with a visible message;
 * model checkpoints appear after every finished game; and rebuilding the
 * page mid-game restores the exact position from the server alone.
 */

import { existsSync, readdirSync } from "node:fs";
import { join } from "node:path";

import { Window } from "happy-dom";
import { afterAll, beforeAll, describe, expect, inject, it } from "vitest";

import { SessionClient } from "../src/api.js";
import { GameApp } from "../src/app.js";
import type { MoveJson } from "../src/types.js";
import { baseCell, boardSnapshot, mountShell, square } from "./helpers.js";

const baseUrl = inject("e2eBaseUrl");
const dataDir = inject("e2eDataDir");

let dom: Window;

beforeAll(() => {
  dom = new Window();
  (globalThis as any).document = dom.document;
  (globalThis as any).HTMLElement = dom.HTMLElement;
});

afterAll(() => {
  dom.close();
});

function newApp() {
  const elements = mountShell(dom.document as unknown as Document);
  const app = new GameApp(new SessionClient(baseUrl), elements);
  return { app, elements };
}

/** Play the first legal move through real clicks and await the submit. */
async function clickMove(app: GameApp, elements: ReturnType<typeof mountShell>) {
  const view = app.view!;
  const move: MoveJson = view.legal_moves[0];
  if (move.kind === "exit-base") {
    baseCell(elements.board, view.human_color).click();
  } else {
    square(elements.board, move.from!.col, move.from!.row).click();
  }
  expect(app.highlights().has(`${move.to.col},${move.to.row}`)).toBe(true);
  square(elements.board, move.to.col, move.to.row).click();
  await app.inflight;
}

describe("two-game teaching session through the browser client", () => {
  it("runs start to finish with server-side learning artifacts", async () => {
    const { app, elements } = newApp();
    const sessionId = await app.create({
      human_color: "white",
      games: 2,
      n: 5,
      a: 1,
      beta: 3,
      max_plies: 40,
      seed: 424242,
    });
    expect(app.view!.games_planned).toBe(2);
    expect(elements.board.querySelectorAll(".square").length).toBe(23);

    let sawIllegalRejection = false;
    let refreshChecked = false;
    let checkpointsSeen = 0;

    for (let step = 0; step < 200 && app.view!.session_status === "live"; step++) {
      // once per session: try to drive a pawn backward; the server must say
      // no, name the rule, and leave the board exactly as it was
      if (!sawIllegalRejection) {
        const pawn = app.view!.cells.find((c) => c.color === "white");
        if (pawn && pawn.col > 0 && pawn.row > 0) {
          const backward: MoveJson = {
            kind: "step",
            from: { col: pawn.col, row: pawn.row },
            to: { col: pawn.col - 1, row: pawn.row - 1 },
          };
          const before = boardSnapshot(elements.board);
          const plyBefore = app.view!.ply;
          await app.submitMove(backward);
          expect(elements.message.textContent).toMatch(
            /Backward moves are not allowed|one square at a time|outside the board|occupied/,
          );
          expect(boardSnapshot(elements.board)).toBe(before);
          expect(app.view!.ply).toBe(plyBefore);
          sawIllegalRejection = true;
        }
      }

      // once per session, mid-game: a fresh page restores the position
      if (!refreshChecked && app.view!.ply > 2 && app.view!.game_index === 0) {
        const current = boardSnapshot(elements.board);
        const fresh = newApp();
        await fresh.app.attach(sessionId);
        expect(boardSnapshot(fresh.elements.board)).toBe(current);
        expect(fresh.app.view!.ply).toBe(app.view!.ply);
        refreshChecked = true;
      }

      const gamesBefore = app.view!.game_index;
      await clickMove(app, elements);
      if (app.view!.game_index > gamesBefore || app.view!.session_status !== "live") {
        // a game just finished: its checkpoint files must exist already
        const finished = app.view!.records.length;
        const ckptDir = join(dataDir, "sessions", sessionId, "checkpoints");
        expect(existsSync(ckptDir)).toBe(true);
        const files = readdirSync(ckptDir);
        for (let g = 0; g < finished; g++) {
          const tag = String(g).padStart(4, "0");
          expect(files).toContain(`game_${tag}.white.json`);
          expect(files).toContain(`game_${tag}.black.json`);
        }
        checkpointsSeen = finished;
      }
    }

    expect(app.view!.session_status).toBe("complete");
    expect(app.view!.records.length).toBe(2);
    expect(checkpointsSeen).toBe(2);
    expect(sawIllegalRejection).toBe(true);
    expect(refreshChecked).toBe(true);
    expect(elements.dashboard.textContent).toContain("Session complete");
    expect(elements.dashboard.querySelectorAll("table.results tr").length).toBe(3);
  }, 180_000);

  it("rejects out-of-session moves with a mapped message", async () => {
    const { app, elements } = newApp();
    await app.create({ human_color: "white", games: 1, n: 5, a: 1, beta: 3, max_plies: 4, seed: 7 });
    // drive to completion (max 2 own moves under the tiny ply cap)
    for (let i = 0; i < 4 && app.view!.session_status === "live"; i++) {
      await clickMove(app, elements);
    }
    expect(app.view!.session_status).toBe("complete");
    await app.submitMove({ kind: "exit-base", from: null, to: { col: 1, row: 0 } });
    expect(elements.message.textContent).toMatch(/finished/);
  });
});
