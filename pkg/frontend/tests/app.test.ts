import { describe, expect, it } from "vitest";

import { ApiError, type SessionApi } from "../src/api.js";
import { GameApp } from "../src/app.js";
import type { BoardView, MoveJson } from "../src/types.js";
import {
  baseCell,
  boardSnapshot,
  midgameView,
  mountShell,
  openingView,
  square,
} from "./helpers.js";

class FakeClient implements SessionApi {
  submitted: MoveJson[] = [];
  nextView: BoardView | null = null;
  failWith: ApiError | null = null;

  constructor(public view: BoardView) {}

  async createSession(): Promise<BoardView> {
    return this.view;
  }

  async getState(): Promise<BoardView> {
    return this.view;
  }

  async submitMove(_id: string, move: MoveJson): Promise<BoardView> {
    if (this.failWith) {
      const error = this.failWith;
      this.failWith = null;
      throw error;
    }
    this.submitted.push(move);
    this.view = this.nextView ?? this.view;
    return this.view;
  }

  async abortSession(): Promise<BoardView> {
    return this.view;
  }
}

function makeApp(view: BoardView) {
  const elements = mountShell();
  const client = new FakeClient(view);
  const app = new GameApp(client, elements);
  app.setView(view);
  return { app, client, elements };
}

describe("click-click move selection", () => {
  it("clicking an own pawn selects it and shows its destinations", () => {
    const { app, elements } = makeApp(midgameView());
    square(elements.board, 2, 1).click();
    expect(app.selection.source).toEqual({ col: 2, row: 1 });
    expect(app.highlights()).toEqual(new Set(["3,1", "2,2"]));
    expect(square(elements.board, 3, 1).classList.contains("highlight")).toBe(true);
  });

  it("selecting the base highlights the exit squares", () => {
    const { app, elements } = makeApp(openingView());
    baseCell(elements.board, "white").click();
    expect(app.selection.source).toBe("base");
    expect(app.highlights()).toEqual(new Set(["1,0", "0,1"]));
  });

  it("clicking a highlighted square submits exactly that server move", async () => {
    const { app, client, elements } = makeApp(midgameView());
    square(elements.board, 2, 1).click();
    square(elements.board, 3, 1).click();
    await app.inflight;
    expect(client.submitted).toEqual([
      { kind: "step", from: { col: 2, row: 1 }, to: { col: 3, row: 1 } },
    ]);
  });

  it("clicking a non-highlighted square is a no-op", async () => {
    const { app, client, elements } = makeApp(midgameView());
    square(elements.board, 2, 1).click();
    square(elements.board, 2, 0).click(); // backward: not in the server's list
    await app.inflight;
    expect(client.submitted).toEqual([]);
    expect(app.selection.source).toEqual({ col: 2, row: 1 }); // selection kept
  });

  it("never reacts when it is not the human's turn", () => {
    const { app, elements } = makeApp(midgameView({ human_to_move: false }));
    square(elements.board, 2, 1).click();
    expect(app.selection.source).toBeNull();
  });

  it("a second click on the selected pawn clears the selection", () => {
    const { app, elements } = makeApp(midgameView());
    square(elements.board, 2, 1).click();
    square(elements.board, 2, 1).click();
    expect(app.selection.source).toBeNull();
  });
});

describe("server rejections", () => {
  it("shows the rule message inline and leaves the board untouched", async () => {
    const { app, client, elements } = makeApp(midgameView());
    const before = boardSnapshot(elements.board);
    client.failWith = new ApiError(400, "distance-decrease", "nope");
    await app.submitMove({ kind: "step", from: { col: 2, row: 1 }, to: { col: 2, row: 0 } });
    expect(elements.message.textContent).toMatch(/Backward moves are not allowed/);
    expect(elements.message.classList.contains("hidden")).toBe(false);
    expect(boardSnapshot(elements.board)).toBe(before);
  });

  it("renders unknown codes through the fallback", async () => {
    const { app, client, elements } = makeApp(midgameView());
    client.failWith = new ApiError(409, "mystery", "strange server mood");
    await app.submitMove({ kind: "step", from: { col: 2, row: 1 }, to: { col: 3, row: 1 } });
    expect(elements.message.textContent).toBe("strange server mood");
  });
});

describe("progress dashboard", () => {
  it("shows game k of n with the running tally", () => {
    const { elements } = makeApp(
      midgameView({
        game_index: 6,
        games_planned: 40,
        tally: { white_wins: 4, black_wins: 2, draws: 0 },
        records: [],
      }),
    );
    expect(elements.dashboard.textContent).toContain("Game 7 of 40");
    expect(elements.dashboard.textContent).toContain("you 4 - 2 computer");
  });

  it("lists every finished game when the session completes", () => {
    const records = Array.from({ length: 3 }, (_, i) => ({
      game_index: i,
      winner: i % 2 === 0 ? ("white" as const) : ("black" as const),
      plies: 20 + i,
      white_moves: 10,
      black_moves: 10 + i,
      white_pawns_lost: 0,
      black_pawns_lost: 1,
      duration: 1.5,
    }));
    const { elements } = makeApp(
      midgameView({
        session_status: "complete",
        games_planned: 3,
        game_index: 3,
        human_to_move: false,
        legal_moves: [],
        records,
      }),
    );
    expect(elements.dashboard.textContent).toContain("Session complete");
    expect(elements.dashboard.querySelectorAll("table.results tr").length).toBe(4);
  });

  it("announces a finished game from the move response", async () => {
    const view = midgameView();
    const { app, client, elements } = makeApp(view);
    client.nextView = midgameView({
      game_index: 1,
      finished_games: [
        {
          game_index: 0,
          winner: "white",
          plies: 21,
          white_moves: 11,
          black_moves: 10,
          white_pawns_lost: 0,
          black_pawns_lost: 2,
          duration: 9.1,
        },
      ],
      tally: { white_wins: 1, black_wins: 0, draws: 0 },
    });
    await app.submitMove(view.legal_moves[0]);
    expect(elements.banner.textContent).toContain("You won game 1");
  });
});
