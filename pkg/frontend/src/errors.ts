/** Human-readable renderings of the service's error codes.
 *
 * The Record type forces a message for every known code; `describeError`
 * still degrades gracefully if the server ever sends something new.
 */

import type { RuleCode } from "./types.js";

export const RULE_MESSAGES: Record<RuleCode, string> = {
  "game-over": "The game is already over.",
  "wrong-turn": "That pawn is not yours to move.",
  "not-own-pawn": "There is no pawn of yours on that square.",
  "no-reserve": "Your base has no pawns left to bring out.",
  "not-adjacent": "Pawns move one square at a time, horizontally or vertically.",
  "occupied-destination": "That square is occupied.",
  "distance-decrease": "Backward moves are not allowed: a pawn may never move closer to its own base.",
  "off-board": "That square is outside the board.",
  "unknown-session": "This session no longer exists on the server.",
  "out-of-turn": "It is not your turn.",
  "session-over": "This teaching session has finished.",
  busy: "The server is still processing your previous move.",
  "bad-request": "The server could not understand that request.",
};

export function describeError(code: string, fallback?: string): string {
  const known = (RULE_MESSAGES as Record<string, string>)[code];
  return known ?? fallback ?? `Move rejected (${code}).`;
}
