/** Wire types mirroring the teaching service's documented JSON schema. */

export interface CoordJson {
  col: number;
  row: number;
}

export type MoveKind = "exit-base" | "step";

export interface MoveJson {
  kind: MoveKind;
  from: CoordJson | null;
  to: CoordJson;
}

export type PlayerColor = "white" | "black";
export type GameStatus = "ongoing" | "white-won" | "black-won" | "draw";
export type SessionStatus = "live" | "complete" | "aborted";

export interface CellJson {
  col: number;
  row: number;
  color: PlayerColor;
}

export interface GameRecordJson {
  game_index: number;
  winner: PlayerColor | "draw";
  plies: number;
  white_moves: number;
  black_moves: number;
  white_pawns_lost: number;
  black_pawns_lost: number;
  duration: number;
}

export interface BoardView {
  session_id: string;
  session_status: SessionStatus;
  game_index: number;
  games_planned: number;
  human_color: PlayerColor;
  computer_color: PlayerColor;
  config: { n: number; a: number; beta: number; max_plies: number };
  cells: CellJson[];
  white_reserve: number;
  black_reserve: number;
  to_move: PlayerColor;
  ply: number;
  game_status: GameStatus;
  human_to_move: boolean;
  computer_thinking: boolean;
  legal_moves: MoveJson[];
  last_move: MoveJson | null;
  move_counts: { white: number; black: number };
  tally: { white_wins: number; black_wins: number; draws: number };
  records: GameRecordJson[];
  accepted_move?: MoveJson | null;
  computer_reply?: MoveJson | null;
  finished_games?: GameRecordJson[];
}

export interface CreateSessionOptions {
  human_color?: PlayerColor;
  games?: number;
  n?: number;
  a?: number;
  beta?: number;
  max_plies?: number;
  exploit_prob?: number;
  seed?: number;
}

/** Every error code the service documents; the UI must know them all. */
export const RULE_CODES = [
  "game-over",
  "wrong-turn",
  "not-own-pawn",
  "no-reserve",
  "not-adjacent",
  "occupied-destination",
  "distance-decrease",
  "off-board",
  "unknown-session",
  "out-of-turn",
  "session-over",
  "busy",
  "bad-request",
] as const;

export type RuleCode = (typeof RULE_CODES)[number];
