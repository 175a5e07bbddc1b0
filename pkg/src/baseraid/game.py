"""Rules engine for Base Raid, a two-player strategy game on an n x n board.

Each player owns an a x a base in one corner (white lower-left, black
upper-right) and starts with ``beta`` pawns inside it.  Pawns leave the
base onto an orthogonally adjacent free square, then step one square at a
time, never decreasing their Chebyshev distance from their own base.  A
player wins by moving any pawn into the opponent's base.  A pawn with no
legal step is lost (several can be lost on one move), a base whose every
adjacent square is blocked loses all pawns still inside it, and a player
with no pawns left loses.  Games that reach the ply cap are drawn.

States are immutable values; every operation here is a pure function, so
states can be shared freely between threads and replayed exactly.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterator, Optional

EMPTY = 0
BASE_MARK = 3  # cells belonging to either base; never hold an on-board pawn


class Color(IntEnum):
    """Pawn / player colour. Values double as cell bytes in the occupancy grid."""

    WHITE = 1
    BLACK = 2

    @property
    def opponent(self) -> "Color":
        return Color(3 - self.value)


class GameStatus(Enum):
    ONGOING = "ongoing"
    WHITE_WON = "white-won"
    BLACK_WON = "black-won"
    DRAW = "draw"  # ply cap reached

    @property
    def is_terminal(self) -> bool:
        return self is not GameStatus.ONGOING


class MoveKind(Enum):
    EXIT_BASE = "exit-base"
    STEP = "step"


# Machine-readable rule codes attached to IllegalMoveError.
RULE_GAME_OVER = "game-over"
RULE_WRONG_TURN = "wrong-turn"
RULE_NOT_OWN_PAWN = "not-own-pawn"
RULE_NO_RESERVE = "no-reserve"
RULE_NOT_ADJACENT = "not-adjacent"
RULE_OCCUPIED = "occupied-destination"
RULE_DISTANCE_DECREASE = "distance-decrease"
RULE_OFF_BOARD = "off-board"

RULE_CODES = (
    RULE_GAME_OVER,
    RULE_WRONG_TURN,
    RULE_NOT_OWN_PAWN,
    RULE_NO_RESERVE,
    RULE_NOT_ADJACENT,
    RULE_OCCUPIED,
    RULE_DISTANCE_DECREASE,
    RULE_OFF_BOARD,
)


class IllegalMoveError(ValueError):
    """A move that violates the rules; ``rule`` names the violated rule."""

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class PositionError(ValueError):
    """A hand-built position that the engine could never reach."""


@dataclass(frozen=True)
class GameConfig:
    """Board geometry and game-length parameters.

    n: board side length, a: base side length, beta: pawns per player.
    Requires n >= 2a + 1 so the two bases do not touch.
    """

    n: int = 8
    a: int = 2
    beta: int = 10
    max_plies: int = 1000

    def __post_init__(self) -> None:
        if self.a < 1:
            raise ValueError("base side length must be >= 1")
        if self.n < 2 * self.a + 1:
            raise ValueError("board side must be >= 2a + 1")
        if self.beta < 1:
            raise ValueError("each player needs at least one pawn")
        if self.max_plies < 1:
            raise ValueError("ply cap must be >= 1")

    @property
    def cell_count(self) -> int:
        """Number of non-base cells."""
        return self.n * self.n - 2 * self.a * self.a


class Coord(tuple):
    """Board coordinate (col, row), origin at the lower-left corner."""

    __slots__ = ()

    def __new__(cls, col: int, row: int):
        return tuple.__new__(cls, (col, row))

    @property
    def col(self) -> int:
        return self[0]

    @property
    def row(self) -> int:
        return self[1]

    def __repr__(self) -> str:
        return f"({self[0]},{self[1]})"


@dataclass(frozen=True)
class Move:
    """A single pawn move: either out of the home base or a one-square step."""

    kind: MoveKind
    source: Optional[Coord]  # None for exit-base moves
    dest: Coord

    def __repr__(self) -> str:
        src = "base" if self.source is None else repr(self.source)
        return f"Move({self.kind.value} {src}->{self.dest!r})"


@dataclass(frozen=True)
class MoveEvents:
    """Pawn losses and base-entry flag produced by one applied move."""

    white_pawns_lost: int = 0
    black_pawns_lost: int = 0
    entered_enemy_base: bool = False

    def pawns_lost(self, color: Color) -> int:
        return self.white_pawns_lost if color is Color.WHITE else self.black_pawns_lost


_NO_EVENTS = MoveEvents()  # immutable, shared by every eventless move


class _Geometry:
    """Precomputed lookup tables for one (n, a) board shape.

    The ``*_v`` attributes are indexed by raw cell byte (1 white, 2 black)
    so the hot paths never construct enum values.
    """

    __slots__ = (
        "n",
        "n_cells",
        "empty_cells",
        "base_cells",
        "exit_cells",
        "exit_sets",
        "neighbors",
        "dist",
        "feature_order",
        "dist_v",
        "enemy_base_v",
        "exit_cells_v",
    )

    def __init__(self, n: int, a: int):
        self.n = n
        self.n_cells = n * n
        white_base = frozenset(
            r * n + c for c in range(a) for r in range(a)
        )
        black_base = frozenset(
            r * n + c for c in range(n - a, n) for r in range(n - a, n)
        )
        self.base_cells = {Color.WHITE: white_base, Color.BLACK: black_base}

        template = bytearray(self.n_cells)
        for i in white_base | black_base:
            template[i] = BASE_MARK
        self.empty_cells = bytes(template)

        # Cells orthogonally adjacent to each base region, row-major order.
        def adjacent_to(base: frozenset) -> tuple:
            out = []
            for i in range(self.n_cells):
                if i in base:
                    continue
                c, r = i % n, i // n
                for dc, dr in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                    j = (r + dr) * n + (c + dc)
                    if 0 <= c + dc < n and 0 <= r + dr < n and j in base:
                        out.append(i)
                        break
            return tuple(out)

        self.exit_cells = {
            Color.WHITE: adjacent_to(white_base),
            Color.BLACK: adjacent_to(black_base),
        }
        self.exit_sets = {
            color: frozenset(cells) for color, cells in self.exit_cells.items()
        }

        nbrs = []
        for i in range(self.n_cells):
            c, r = i % n, i // n
            cell_nbrs = []
            if r > 0:
                cell_nbrs.append(i - n)
            if c > 0:
                cell_nbrs.append(i - 1)
            if c < n - 1:
                cell_nbrs.append(i + 1)
            if r < n - 1:
                cell_nbrs.append(i + n)
            nbrs.append(tuple(cell_nbrs))  # ascending index = row-major order
        self.neighbors = tuple(nbrs)

        # Chebyshev distance from each cell to the nearest own-base cell.
        def distances(base: frozenset) -> tuple:
            return tuple(
                min(
                    max(abs(i % n - b % n), abs(i // n - b // n))
                    for b in base
                )
                for i in range(self.n_cells)
            )

        self.dist = {
            Color.WHITE: distances(white_base),
            Color.BLACK: distances(black_base),
        }

        # Non-base cells in row-major order; the feature layout used by the
        # value-network encoder.
        self.feature_order = tuple(
            i
            for i in range(self.n_cells)
            if i not in white_base and i not in black_base
        )

        self.dist_v = (None, self.dist[Color.WHITE], self.dist[Color.BLACK])
        self.enemy_base_v = (None, black_base, white_base)
        self.exit_cells_v = (
            None,
            self.exit_cells[Color.WHITE],
            self.exit_cells[Color.BLACK],
        )


@functools.lru_cache(maxsize=None)
def geometry(n: int, a: int) -> _Geometry:
    return _Geometry(n, a)


@dataclass(frozen=True, slots=True)
class BoardState:
    """Immutable game position.

    ``cells`` is a row-major byte grid over all n*n squares: 0 empty,
    1 white pawn, 2 black pawn, 3 base square (base squares never hold
    on-board pawns; base occupancy lives in the reserve counters).
    """

    config: GameConfig
    cells: bytes
    white_base: int
    black_base: int
    to_move: Color
    ply: int
    status: GameStatus

    @property
    def geom(self) -> _Geometry:
        return geometry(self.config.n, self.config.a)

    def base_count(self, color: Color) -> int:
        return self.white_base if color is Color.WHITE else self.black_base

    def board_pawns(self, color: Color) -> int:
        return self.cells.count(color.value)

    def total_pawns(self, color: Color) -> int:
        return self.board_pawns(color) + self.base_count(color)

    def pawn_at(self, coord: Coord) -> Optional[Color]:
        v = self.cells[coord[1] * self.config.n + coord[0]]
        return Color(v) if v in (1, 2) else None

    def occupied(self) -> Iterator[tuple[Coord, Color]]:
        n = self.config.n
        for i, v in enumerate(self.cells):
            if v == 1 or v == 2:
                yield Coord(i % n, i // n), Color(v)

    def is_base_cell(self, color: Color, coord: Coord) -> bool:
        return coord[1] * self.config.n + coord[0] in self.geom.base_cells[color]

    def __str__(self) -> str:
        return format_board(self)


def initial_state(config: GameConfig) -> BoardState:
    """Fresh game: every pawn in its base, white to move."""
    geom = geometry(config.n, config.a)
    return BoardState(
        config=config,
        cells=geom.empty_cells,
        white_base=config.beta,
        black_base=config.beta,
        to_move=Color.WHITE,
        ply=0,
        status=GameStatus.ONGOING,
    )


def distance_from_base(config: GameConfig, color: Color, cell: Coord) -> int:
    """Chebyshev distance to the nearest cell of ``color``'s base (0 inside it)."""
    n = config.n
    if not (0 <= cell[0] < n and 0 <= cell[1] < n):
        raise ValueError(f"cell {cell!r} outside the {n}x{n} board")
    return geometry(config.n, config.a).dist[color][cell[1] * n + cell[0]]


# --- internal integer-move layer -------------------------------------------
#
# Hot paths (move generation, after-state evaluation) work on flat cell
# indices: a move is (from_index, to_index) with from_index == -1 for
# exit-base moves.  The public API converts at the boundary.

_EXIT = -1


def _legal_int_moves(state: BoardState) -> list[tuple[int, int]]:
    """All legal moves as index pairs, in the canonical deterministic order:
    exit-base moves first (destination row-major), then step moves ordered by
    (source, destination) row-major."""
    if state.status.is_terminal:
        return []
    geom = state.geom
    cells = state.cells
    own = state.to_move.value
    moves: list[tuple[int, int]] = []

    if (state.white_base if own == 1 else state.black_base) > 0:
        for e in geom.exit_cells_v[own]:
            if cells[e] == EMPTY:
                moves.append((_EXIT, e))

    dist = geom.dist_v[own]
    enemy_base = geom.enemy_base_v[own]
    nbrs = geom.neighbors
    for i in range(geom.n_cells):
        if cells[i] != own:
            continue
        di = dist[i]
        for j in nbrs[i]:
            v = cells[j]
            if v == EMPTY:
                if dist[j] >= di:
                    moves.append((i, j))
            elif v == BASE_MARK and j in enemy_base:
                moves.append((i, j))
    return moves


def _pawn_can_move_v(cells, i: int, geom: _Geometry, v: int) -> bool:
    """Whether the on-board pawn (cell byte ``v``) at index ``i`` can move."""
    dist = geom.dist_v[v]
    enemy_base = geom.enemy_base_v[v]
    di = dist[i]
    for j in geom.neighbors[i]:
        w = cells[j]
        if w == EMPTY:
            if dist[j] >= di:
                return True
        elif w == BASE_MARK and j in enemy_base:
            return True
    return False


def _pawn_can_move(cells, i: int, geom: _Geometry, color: Color) -> bool:
    return _pawn_can_move_v(cells, i, geom, color.value)


_OPPONENT = {Color.WHITE: Color.BLACK, Color.BLACK: Color.WHITE}


def _apply_int(state: BoardState, frm: int, to: int) -> tuple[BoardState, MoveEvents]:
    """Apply a move known to be legal.  See apply_move for the public path."""
    geom = state.geom
    config = state.config
    mover = state.to_move
    own = mover.value
    cells = bytearray(state.cells)
    white_base = state.white_base
    black_base = state.black_base

    if frm == _EXIT:
        if own == 1:
            white_base -= 1
        else:
            black_base -= 1
    else:
        cells[frm] = EMPTY

    if to in geom.enemy_base_v[own]:
        # Entering the enemy base ends the game at once; the pawn leaves the
        # grid (base squares hold no on-board pawns).
        status = GameStatus.WHITE_WON if own == 1 else GameStatus.BLACK_WON
        new = BoardState(
            config=config,
            cells=bytes(cells),
            white_base=white_base,
            black_base=black_base,
            to_move=_OPPONENT[mover],
            ply=state.ply + 1,
            status=status,
        )
        return new, MoveEvents(entered_enemy_base=True)

    cells[to] = own

    # Trapped-pawn sweep: one simultaneous pass over the post-move position.
    # Engine-produced positions never contain an already-trapped pawn, so only
    # the moved pawn and the pawns next to the filled square can be newly
    # trapped; everything else kept its escape squares (removals only free
    # cells, never block them).
    white_lost = 0
    black_lost = 0
    trapped = None
    if not _pawn_can_move_v(cells, to, geom, own):
        trapped = [to]
    for j in geom.neighbors[to]:
        v = cells[j]
        if (v == 1 or v == 2) and not _pawn_can_move_v(cells, j, geom, v):
            if trapped is None:
                trapped = [j]
            else:
                trapped.append(j)
    if trapped is not None:
        for i in trapped:
            if cells[i] == 1:
                white_lost += 1
            else:
                black_lost += 1
            cells[i] = EMPTY

    # Base seal: a base with no free adjacent square loses its reserve.
    if white_base > 0 and all(cells[e] != EMPTY for e in geom.exit_cells_v[1]):
        white_lost += white_base
        white_base = 0
    if black_base > 0 and all(cells[e] != EMPTY for e in geom.exit_cells_v[2]):
        black_lost += black_base
        black_base = 0

    white_total = white_base + cells.count(1)
    black_total = black_base + cells.count(2)
    own_total, opp_total = (
        (white_total, black_total) if own == 1 else (black_total, white_total)
    )
    ply = state.ply + 1
    if opp_total == 0:
        # Checked before the mover's own count: if one move wiped out both
        # sides at once, the mover forced the collapse and prevails.
        status = GameStatus.WHITE_WON if own == 1 else GameStatus.BLACK_WON
    elif own_total == 0:
        status = GameStatus.BLACK_WON if own == 1 else GameStatus.WHITE_WON
    elif ply >= config.max_plies:
        status = GameStatus.DRAW
    else:
        status = GameStatus.ONGOING

    new = BoardState(
        config=config,
        cells=bytes(cells),
        white_base=white_base,
        black_base=black_base,
        to_move=_OPPONENT[mover],
        ply=ply,
        status=status,
    )
    if white_lost == 0 and black_lost == 0:
        return new, _NO_EVENTS
    return new, MoveEvents(white_pawns_lost=white_lost, black_pawns_lost=black_lost)


def _to_public(state: BoardState, move: tuple[int, int]) -> Move:
    n = state.config.n
    frm, to = move
    dest = Coord(to % n, to // n)
    if frm == _EXIT:
        return Move(MoveKind.EXIT_BASE, None, dest)
    return Move(MoveKind.STEP, Coord(frm % n, frm // n), dest)


def legal_moves(state: BoardState) -> list[Move]:
    """Every legal move for the side to move; empty on terminal states."""
    return [_to_public(state, m) for m in _legal_int_moves(state)]


def _validate(state: BoardState, move: Move) -> tuple[int, int]:
    """Check ``move`` against the rules; return its index form."""
    if state.status.is_terminal:
        raise IllegalMoveError(RULE_GAME_OVER, "the game is over")
    n = state.config.n
    geom = state.geom
    mover = state.to_move
    dc, dr = move.dest
    if not (0 <= dc < n and 0 <= dr < n):
        raise IllegalMoveError(RULE_OFF_BOARD, f"destination {move.dest!r} is off the board")
    to = dr * n + dc

    if move.kind is MoveKind.EXIT_BASE:
        if move.source is not None:
            raise IllegalMoveError(
                RULE_NOT_OWN_PAWN, "exit-base moves take no source square"
            )
        if state.base_count(mover) == 0:
            raise IllegalMoveError(RULE_NO_RESERVE, "no pawns left in the base")
        if to not in geom.exit_sets[mover]:
            raise IllegalMoveError(
                RULE_NOT_ADJACENT, f"{move.dest!r} is not adjacent to your base"
            )
        if state.cells[to] != EMPTY:
            raise IllegalMoveError(RULE_OCCUPIED, f"{move.dest!r} is occupied")
        return _EXIT, to

    if move.source is None:
        raise IllegalMoveError(RULE_NOT_OWN_PAWN, "step moves need a source square")
    sc, sr = move.source
    if not (0 <= sc < n and 0 <= sr < n):
        raise IllegalMoveError(RULE_OFF_BOARD, f"source {move.source!r} is off the board")
    frm = sr * n + sc
    v = state.cells[frm]
    if v == EMPTY or v == BASE_MARK:
        raise IllegalMoveError(
            RULE_NOT_OWN_PAWN, f"no pawn of yours on {move.source!r}"
        )
    if v != mover.value:
        raise IllegalMoveError(
            RULE_WRONG_TURN, f"the pawn on {move.source!r} is not yours to move"
        )
    if to not in geom.neighbors[frm]:
        raise IllegalMoveError(
            RULE_NOT_ADJACENT,
            f"{move.dest!r} is not orthogonally adjacent to {move.source!r}",
        )
    tv = state.cells[to]
    if tv == BASE_MARK:
        if to in geom.base_cells[mover.opponent]:
            return frm, to  # winning entry
        raise IllegalMoveError(
            RULE_DISTANCE_DECREASE, "cannot step back into your own base"
        )
    if tv != EMPTY:
        raise IllegalMoveError(RULE_OCCUPIED, f"{move.dest!r} is occupied")
    dist = geom.dist[mover]
    if dist[to] < dist[frm]:
        raise IllegalMoveError(
            RULE_DISTANCE_DECREASE,
            f"step {move.source!r}->{move.dest!r} decreases the distance from your base",
        )
    return frm, to


def apply_move(state: BoardState, move: Move) -> tuple[BoardState, MoveEvents]:
    """Validate and apply ``move``, returning the new state and its events.

    Raises IllegalMoveError (with a machine-readable ``rule``) for anything
    the rules forbid, including moves on finished games.
    """
    frm, to = _validate(state, move)
    return _apply_int(state, frm, to)


def make_position(
    config: GameConfig,
    *,
    white: list[tuple[int, int]] = (),
    black: list[tuple[int, int]] = (),
    white_base: int = 0,
    black_base: int = 0,
    to_move: Color = Color.WHITE,
    ply: int = 0,
) -> BoardState:
    """Build a mid-game position for tests and demos.

    Rejects positions the engine could never produce: pawns on base squares,
    doubled-up squares, more than ``beta`` pawns per side, already-trapped
    pawns, an already-sealed non-empty base, or a side wiped out.
    """
    geom = geometry(config.n, config.a)
    cells = bytearray(geom.empty_cells)
    for color, coords, base in (
        (Color.WHITE, white, white_base),
        (Color.BLACK, black, black_base),
    ):
        if not 0 <= base <= config.beta:
            raise PositionError(f"{color.name} base reserve out of range")
        if len(coords) + base > config.beta:
            raise PositionError(f"{color.name} has more than beta pawns")
        for col, row in coords:
            if not (0 <= col < config.n and 0 <= row < config.n):
                raise PositionError(f"({col},{row}) is off the board")
            i = row * config.n + col
            if cells[i] == BASE_MARK:
                raise PositionError(f"({col},{row}) is a base square")
            if cells[i] != EMPTY:
                raise PositionError(f"({col},{row}) holds two pawns")
            cells[i] = color.value
    frozen = bytes(cells)
    for i, v in enumerate(frozen):
        if v in (1, 2) and not _pawn_can_move(frozen, i, geom, Color(v)):
            raise PositionError(
                f"pawn on ({i % config.n},{i // config.n}) is already trapped"
            )
    for color, base in ((Color.WHITE, white_base), (Color.BLACK, black_base)):
        if base > 0 and all(frozen[e] != EMPTY for e in geom.exit_cells[color]):
            raise PositionError(f"{color.name} base is already sealed")
    if not 0 <= ply < config.max_plies:
        raise PositionError("ply must lie below the cap")
    state = BoardState(
        config=config,
        cells=frozen,
        white_base=white_base,
        black_base=black_base,
        to_move=to_move,
        ply=ply,
        status=GameStatus.ONGOING,
    )
    for color in (Color.WHITE, Color.BLACK):
        if state.total_pawns(color) == 0:
            raise PositionError(f"{color.name} has no pawns at all")
    return state


def format_board(state: BoardState) -> str:
    """ASCII rendering, row n-1 on top so white's base sits lower-left."""
    n = state.config.n
    chars = {EMPTY: ".", Color.WHITE.value: "W", Color.BLACK.value: "B"}
    lines = [
        f"black reserve {state.black_base}   to move: {state.to_move.name.lower()}"
        f"   ply {state.ply}   {state.status.value}"
    ]
    for row in range(n - 1, -1, -1):
        cells = []
        for col in range(n):
            v = state.cells[row * n + col]
            if v == BASE_MARK:
                cells.append("b" if state.is_base_cell(Color.BLACK, Coord(col, row)) else "w")
            else:
                cells.append(chars[v])
        lines.append(f"{row:2d} " + " ".join(cells))
    lines.append("   " + " ".join(f"{c:d}" for c in range(n)))
    lines.append(f"white reserve {state.white_base}")
    return "\n".join(lines)
