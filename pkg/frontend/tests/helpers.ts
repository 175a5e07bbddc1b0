/** Shared fixtures: a minimal DOM shell and BoardView factories. */

import type { AppElements } from "../src/app.js";
import type { BoardView, MoveJson } from "../src/types.js";

export function mountShell(doc: Document = document): AppElements {
  doc.body.innerHTML = `
    <div id="banner" class="hidden"></div>
    <div id="message" class="hidden"></div>
    <div id="board"></div>
    <div id="dashboard"></div>
  `;
  const get = (id: string) => doc.getElementById(id) as HTMLElement;
  return {
    board: get("board"),
    dashboard: get("dashboard"),
    message: get("message"),
    banner: get("banner"),
  };
}

/** A 5x5 board (1x1 bases) with white to move and two exit moves, mirroring
 * the service's opening view. */
export function openingView(overrides: Partial<BoardView> = {}): BoardView {
  return {
    session_id: "test-session",
    session_status: "live",
    game_index: 0,
    games_planned: 2,
    human_color: "white",
    computer_color: "black",
    config: { n: 5, a: 1, beta: 3, max_plies: 60 },
    cells: [],
    white_reserve: 3,
    black_reserve: 3,
    to_move: "white",
    ply: 0,
    game_status: "ongoing",
    human_to_move: true,
    computer_thinking: false,
    legal_moves: [
      { kind: "exit-base", from: null, to: { col: 1, row: 0 } },
      { kind: "exit-base", from: null, to: { col: 0, row: 1 } },
    ],
    last_move: null,
    move_counts: { white: 0, black: 0 },
    tally: { white_wins: 0, black_wins: 0, draws: 0 },
    records: [],
    ...overrides,
  };
}

export function midgameView(overrides: Partial<BoardView> = {}): BoardView {
  return openingView({
    cells: [
      { col: 2, row: 1, color: "white" },
      { col: 3, row: 3, color: "black" },
    ],
    white_reserve: 2,
    black_reserve: 2,
    ply: 2,
    legal_moves: [
      { kind: "exit-base", from: null, to: { col: 1, row: 0 } },
      { kind: "exit-base", from: null, to: { col: 0, row: 1 } },
      { kind: "step", from: { col: 2, row: 1 }, to: { col: 3, row: 1 } },
      { kind: "step", from: { col: 2, row: 1 }, to: { col: 2, row: 2 } },
    ],
    last_move: { kind: "step", from: { col: 3, row: 4 }, to: { col: 3, row: 3 } },
    move_counts: { white: 1, black: 1 },
    ...overrides,
  });
}

export function square(board: HTMLElement, col: number, row: number): HTMLElement {
  const found = board.querySelector(`[data-col="${col}"][data-row="${row}"]`);
  if (!found) throw new Error(`no square (${col},${row}) rendered`);
  return found as HTMLElement;
}

export function baseCell(board: HTMLElement, color: string): HTMLElement {
  const found = board.querySelector(`[data-base="${color}"]`);
  if (!found) throw new Error(`no ${color} base rendered`);
  return found as HTMLElement;
}

export function boardSnapshot(board: HTMLElement): string {
  // occupied squares plus reserves; ignores selection/highlight classes
  const parts: string[] = [];
  for (const el of Array.from(board.querySelectorAll(".square"))) {
    const pawn = el.querySelector(".pawn");
    if (pawn) {
      parts.push(
        `${(el as HTMLElement).dataset.col},${(el as HTMLElement).dataset.row}:` +
          (pawn.classList.contains("pawn-white") ? "w" : "b"),
      );
    }
  }
  for (const el of Array.from(board.querySelectorAll(".base"))) {
    parts.push(`base-${(el as HTMLElement).dataset.base}:${el.textContent}`);
  }
  return parts.sort().join(";");
}

export function exitMove(col: number, row: number): MoveJson {
  return { kind: "exit-base", from: null, to: { col, row } };
}
