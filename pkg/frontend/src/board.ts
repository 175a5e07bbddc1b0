/** DOM rendering of the board: an n x n CSS grid with the two a x a bases
 * merged into single cells showing their pawn reserves.  The renderer never
 * decides legality itself; highlights come from the server's legal-move list
 * filtered by the current selection. */

import type { BoardView, CoordJson, MoveJson, PlayerColor } from "./types.js";

export interface Selection {
  /** a selected on-board pawn, or "base" when the own base is selected */
  source: CoordJson | "base" | null;
}

export interface BoardHandlers {
  onCellClick(col: number, row: number): void;
  onBaseClick(color: PlayerColor): void;
}

export function cellKey(col: number, row: number): string {
  return `${col},${row}`;
}

function isInBase(view: BoardView, col: number, row: number): PlayerColor | null {
  const { n, a } = view.config;
  if (col < a && row < a) return "white";
  if (col >= n - a && row >= n - a) return "black";
  return null;
}

/** Destinations the selected pawn (or base) may move to, straight from the
 * server's legal-move list. */
export function highlightedDestinations(
  view: BoardView,
  selection: Selection,
): Set<string> {
  const out = new Set<string>();
  if (selection.source === null) return out;
  for (const move of view.legal_moves) {
    if (selection.source === "base") {
      if (move.kind === "exit-base") out.add(cellKey(move.to.col, move.to.row));
    } else if (
      move.kind === "step" &&
      move.from !== null &&
      move.from.col === selection.source.col &&
      move.from.row === selection.source.row
    ) {
      out.add(cellKey(move.to.col, move.to.row));
    }
  }
  return out;
}

/** The move a destination click stands for, if the click is on a highlighted
 * square; null otherwise (such clicks are no-ops). */
export function moveForDestination(
  view: BoardView,
  selection: Selection,
  col: number,
  row: number,
): MoveJson | null {
  if (selection.source === null) return null;
  for (const move of view.legal_moves) {
    if (move.to.col !== col || move.to.row !== row) continue;
    if (selection.source === "base") {
      if (move.kind === "exit-base") return move;
    } else if (
      move.kind === "step" &&
      move.from !== null &&
      move.from.col === selection.source.col &&
      move.from.row === selection.source.row
    ) {
      return move;
    }
  }
  return null;
}

export function renderBoard(
  container: HTMLElement,
  view: BoardView,
  selection: Selection,
  handlers: BoardHandlers,
): void {
  const { n, a } = view.config;
  container.innerHTML = "";
  container.classList.add("board");
  container.style.gridTemplateColumns = `repeat(${n}, var(--square))`;
  container.style.gridTemplateRows = `repeat(${n}, var(--square))`;

  const occupied = new Map<string, PlayerColor>();
  for (const cell of view.cells) {
    occupied.set(cellKey(cell.col, cell.row), cell.color);
  }
  const highlights = highlightedDestinations(view, selection);
  const lastFrom =
    view.last_move && view.last_move.from
      ? cellKey(view.last_move.from.col, view.last_move.from.row)
      : null;
  const lastTo = view.last_move ? cellKey(view.last_move.to.col, view.last_move.to.row) : null;

  // merged base cells: one element spanning the a x a corner each
  for (const color of ["white", "black"] as PlayerColor[]) {
    const base = document.createElement("div");
    base.className = `base base-${color}`;
    base.dataset.base = color;
    const reserve = color === "white" ? view.white_reserve : view.black_reserve;
    base.textContent = String(reserve);
    base.title = `${color} base: ${reserve} pawns in reserve`;
    // grid rows count from the top; board rows from the bottom
    if (color === "white") {
      base.style.gridArea = `${n - a + 1} / 1 / ${n + 1} / ${a + 1}`;
    } else {
      base.style.gridArea = `1 / ${n - a + 1} / ${a + 1} / ${n + 1}`;
    }
    if (color === view.human_color && reserve > 0) {
      base.classList.add("selectable");
    }
    if (selection.source === "base" && color === view.human_color) {
      base.classList.add("selected");
    }
    base.addEventListener("click", () => handlers.onBaseClick(color));
    container.appendChild(base);
  }

  for (let row = n - 1; row >= 0; row--) {
    for (let col = 0; col < n; col++) {
      if (isInBase(view, col, row)) continue;
      const square = document.createElement("div");
      const key = cellKey(col, row);
      square.className = "square";
      square.dataset.col = String(col);
      square.dataset.row = String(row);
      square.style.gridArea = `${n - row} / ${col + 1}`;
      const pawn = occupied.get(key);
      if (pawn) {
        const piece = document.createElement("div");
        piece.className = `pawn pawn-${pawn}`;
        square.appendChild(piece);
      }
      if (highlights.has(key)) square.classList.add("highlight");
      if (key === lastFrom || key === lastTo) square.classList.add("last-move");
      if (
        selection.source !== null &&
        selection.source !== "base" &&
        selection.source.col === col &&
        selection.source.row === row
      ) {
        square.classList.add("selected");
      }
      square.addEventListener("click", () => handlers.onCellClick(col, row));
      container.appendChild(square);
    }
  }
}
