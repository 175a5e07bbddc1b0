/** Session progress panel: game counter, running tally, move counts, and the
 * per-game results table once the session is complete. */

import type { BoardView, GameRecordJson } from "./types.js";

function describeWinner(record: GameRecordJson, humanColor: string): string {
  if (record.winner === "draw") return "draw";
  return record.winner === humanColor ? "you" : "computer";
}

export function renderDashboard(container: HTMLElement, view: BoardView): void {
  container.innerHTML = "";

  const heading = document.createElement("h2");
  if (view.session_status === "complete") {
    heading.textContent = `Session complete: ${view.games_planned} games played`;
  } else if (view.session_status === "aborted") {
    heading.textContent = "Session aborted";
  } else {
    heading.textContent = `Game ${view.game_index + 1} of ${view.games_planned}`;
  }
  container.appendChild(heading);

  const tally = document.createElement("p");
  tally.className = "tally";
  const human = view.human_color;
  const humanWins = human === "white" ? view.tally.white_wins : view.tally.black_wins;
  const computerWins = human === "white" ? view.tally.black_wins : view.tally.white_wins;
  tally.textContent =
    `you ${humanWins} - ${computerWins} computer` +
    (view.tally.draws ? ` (${view.tally.draws} drawn)` : "");
  container.appendChild(tally);

  if (view.session_status === "live") {
    const counters = document.createElement("p");
    counters.className = "move-counts";
    counters.textContent =
      `moves this game: white ${view.move_counts.white}, ` +
      `black ${view.move_counts.black} (ply ${view.ply})`;
    container.appendChild(counters);

    const turn = document.createElement("p");
    turn.className = "turn";
    turn.textContent = view.human_to_move
      ? `your move (${view.human_color})`
      : "computer is moving...";
    container.appendChild(turn);
  }

  if (view.records.length > 0) {
    const table = document.createElement("table");
    table.className = "results";
    const head = table.insertRow();
    for (const label of ["game", "winner", "your moves", "plies"]) {
      const cell = document.createElement("th");
      cell.textContent = label;
      head.appendChild(cell);
    }
    for (const record of view.records) {
      const row = table.insertRow();
      const humanMoves =
        view.human_color === "white" ? record.white_moves : record.black_moves;
      row.insertCell().textContent = String(record.game_index + 1);
      row.insertCell().textContent = describeWinner(record, view.human_color);
      row.insertCell().textContent = String(humanMoves);
      row.insertCell().textContent = String(record.plies);
    }
    container.appendChild(table);
  }
}
