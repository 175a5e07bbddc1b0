"""A walk through the board game's rules.

Two players race pawns from their corner bases across an n x n board; the
first pawn to enter the opponent's base wins.  Run this script to watch the
rules fire one by one: exits, the no-backward-steps constraint, trapped-pawn
losses, and the base seal.
"""

from baseraid.game import (
    Color,
    Coord,
    GameConfig,
    IllegalMoveError,
    Move,
    MoveKind,
    apply_move,
    distance_from_base,
    initial_state,
    legal_moves,
    make_position,
)

config = GameConfig()  # 8x8 board, 2x2 bases, 10 pawns each
state = initial_state(config)

print("A fresh game. Every pawn still sits in its base:")
print(state, "\n")

print("White's only options are the four squares next to its base:")
for move in legal_moves(state):
    print("  ", move)

state, _ = apply_move(state, legal_moves(state)[0])
print("\nWhite exits a pawn to (2,0). Distance from base:",
      distance_from_base(config, Color.WHITE, Coord(2, 0)))

print("\nBackward moves are illegal: a pawn may never decrease its")
print("Chebyshev distance from its own base.")
s = make_position(config, white=[(4, 2)], black=[(5, 5)], white_base=1, black_base=1)
try:
    apply_move(s, Move(MoveKind.STEP, Coord(4, 2), Coord(3, 2)))
except IllegalMoveError as exc:
    print(f"  (4,2)->(3,2) rejected: [{exc.rule}] {exc}")

print("\nA pawn with no legal move is lost, and one move can trap several:")
s = make_position(
    config,
    white=[(0, 2), (0, 6), (1, 4)],
    black=[(0, 3), (0, 5)],
    white_base=0,
    black_base=1,
)
print(s)
after, events = apply_move(s, Move(MoveKind.STEP, Coord(1, 4), Coord(0, 4)))
print(f"\nwhite plays (1,4)->(0,4): black loses {events.black_pawns_lost} pawns at once")
print(after)

print("\nThe base seal: when no square next to a base is free, the pawns")
print("still inside are lost too.")
s = make_position(
    config,
    white=[(5, 5)],
    black=[(2, 0), (2, 1), (0, 2), (1, 3)],
    white_base=5,
    black_base=0,
    to_move=Color.BLACK,
)
after, events = apply_move(s, Move(MoveKind.STEP, Coord(1, 3), Coord(1, 2)))
print(f"black plugs the last exit: white loses its {events.white_pawns_lost} reserve pawns")

print("\nAnd the win itself: stepping into the enemy base ends the game.")
s = make_position(config, white=[(5, 6)], black=[(3, 3)], white_base=1, black_base=1)
after, events = apply_move(s, Move(MoveKind.STEP, Coord(5, 6), Coord(6, 6)))
print(f"white enters at (6,6): status={after.status.value}, "
      f"entered_enemy_base={events.entered_enemy_base}")
