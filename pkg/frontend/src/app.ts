/** The client application: a stateless-on-the-server, click-click move UI.
 *
 * All state worth keeping lives on the server; the client holds only the
 * latest view, the current selection, and a transient banner.  Re-creating
 * the app with the same session id (a page refresh) restores the exact
 * position from get_state alone.  Clicks can only ever submit moves taken
 * from the server's legal-move list; everything else is a no-op.
 */

import { ApiError, type SessionApi } from "./api.js";
import {
  cellKey,
  highlightedDestinations,
  moveForDestination,
  renderBoard,
  type Selection,
} from "./board.js";
import { renderDashboard } from "./dashboard.js";
import { describeError } from "./errors.js";
import type { BoardView, GameRecordJson, MoveJson, PlayerColor } from "./types.js";

export interface AppElements {
  board: HTMLElement;
  dashboard: HTMLElement;
  message: HTMLElement;
  banner: HTMLElement;
}

export class GameApp {
  view: BoardView | null = null;
  selection: Selection = { source: null };
  inflight: Promise<void> | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: SessionApi,
    private readonly elements: AppElements,
    readonly pollMs = 2000,
  ) {}

  /** Attach to an existing session and render it. */
  async attach(sessionId: string): Promise<void> {
    this.setView(await this.client.getState(sessionId));
  }

  async create(options: Parameters<SessionApi["createSession"]>[0]): Promise<string> {
    const view = await this.client.createSession(options);
    this.setView(view);
    return view.session_id;
  }

  startPolling(): void {
    if (this.pollTimer !== null) return;
    this.pollTimer = setInterval(() => {
      void this.refresh();
    }, this.pollMs);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  async refresh(): Promise<void> {
    if (this.view === null) return;
    try {
      const latest = await this.client.getState(this.view.session_id);
      if (latest.ply !== this.view.ply || latest.session_status !== this.view.session_status
          || latest.game_index !== this.view.game_index) {
        this.selection = { source: null };
        this.setView(latest);
      }
    } catch (error) {
      this.showError(error);
    }
  }

  setView(view: BoardView): void {
    this.view = view;
    this.render();
  }

  /** Click on the own base: select it as the move source (if it has pawns). */
  onBaseClick(color: PlayerColor): void {
    const view = this.view;
    if (!view || !view.human_to_move || color !== view.human_color) return;
    const reserve = color === "white" ? view.white_reserve : view.black_reserve;
    if (reserve === 0) return;
    this.selection = { source: this.selection.source === "base" ? null : "base" };
    this.render();
  }

  /** Click on a square: select an own pawn, or move to a highlighted square. */
  onCellClick(col: number, row: number): void {
    const view = this.view;
    if (!view || !view.human_to_move) return;
    const move = moveForDestination(view, this.selection, col, row);
    if (move !== null) {
      this.inflight = this.submitMove(move);
      return;
    }
    const pawnHere = view.cells.find(
      (c) => c.col === col && c.row === row && c.color === view.human_color,
    );
    if (pawnHere) {
      const already =
        this.selection.source !== null &&
        this.selection.source !== "base" &&
        this.selection.source.col === col &&
        this.selection.source.row === row;
      this.selection = { source: already ? null : { col, row } };
      this.render();
    }
    // anything else: a no-op by design
  }

  /** Submit a move; the server has the last word and its rejection is shown
   * inline while the board and selection stay put. */
  async submitMove(move: MoveJson): Promise<void> {
    const view = this.view;
    if (!view) return;
    try {
      const after = await this.client.submitMove(view.session_id, move);
      this.selection = { source: null };
      this.clearMessage();
      this.setView(after);
      this.showFinishedGames(after);
    } catch (error) {
      this.showError(error);
      this.render(); // board unchanged, selection preserved
    }
  }

  private showFinishedGames(view: BoardView): void {
    const finished: GameRecordJson[] = view.finished_games ?? [];
    if (view.session_status === "complete") {
      this.showBanner("Session complete. Thanks for teaching!");
    } else if (finished.length > 0) {
      const last = finished[finished.length - 1];
      const text =
        last.winner === "draw"
          ? `Game ${last.game_index + 1} ended in a draw.`
          : last.winner === view.human_color
            ? `You won game ${last.game_index + 1}!`
            : `The computer won game ${last.game_index + 1}.`;
      this.showBanner(`${text} Next game is ready.`);
    }
  }

  showBanner(text: string): void {
    this.elements.banner.textContent = text;
    this.elements.banner.classList.toggle("hidden", text === "");
  }

  showError(error: unknown): void {
    const text =
      error instanceof ApiError
        ? describeError(error.code, error.message)
        : error instanceof Error
          ? error.message
          : String(error);
    this.elements.message.textContent = text;
    this.elements.message.classList.remove("hidden");
  }

  clearMessage(): void {
    this.elements.message.textContent = "";
    this.elements.message.classList.add("hidden");
  }

  render(): void {
    const view = this.view;
    if (!view) return;
    renderBoard(this.elements.board, view, this.selection, {
      onCellClick: (col, row) => this.onCellClick(col, row),
      onBaseClick: (color) => this.onBaseClick(color),
    });
    renderDashboard(this.elements.dashboard, view);
    if (view.session_status !== "live") {
      const summary =
        view.session_status === "complete"
          ? view.game_status === "draw"
            ? "Final game drawn."
            : `Final game won by ${view.game_status.replace("-won", "")}.`
          : "";
      if (summary) this.showBanner(`Session complete. ${summary}`);
    }
  }

  /** test hook: the squares the current selection may move to */
  highlights(): Set<string> {
    return this.view ? highlightedDestinations(this.view, this.selection) : new Set();
  }
}

export { cellKey };
