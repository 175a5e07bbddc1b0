"""Independent reference implementations used to cross-check the engine.

Everything here is written against the rules directly, with naive data
structures (coordinate dicts, explicit loops over base squares) and no reuse
of the engine's internals, so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np

from baseraid.game import (
    BoardState,
    Color,
    Coord,
    GameConfig,
    GameStatus,
    Move,
    MoveKind,
    initial_state,
    legal_moves,
    apply_move,
)

ORTHO = ((0, 1), (0, -1), (1, 0), (-1, 0))


def base_squares(config: GameConfig, color: Color) -> set[tuple[int, int]]:
    n, a = config.n, config.a
    if color is Color.WHITE:
        return {(c, r) for c in range(a) for r in range(a)}
    return {(c, r) for c in range(n - a, n) for r in range(n - a, n)}


def naive_distance(config: GameConfig, color: Color, cell: tuple[int, int]) -> int:
    return min(
        max(abs(cell[0] - bc), abs(cell[1] - br))
        for bc, br in base_squares(config, color)
    )


def board_dict(state: BoardState) -> dict[tuple[int, int], Color]:
    return {tuple(coord): color for coord, color in state.occupied()}


def on_board(config: GameConfig, cell: tuple[int, int]) -> bool:
    return 0 <= cell[0] < config.n and 0 <= cell[1] < config.n


def naive_legal_moves(state: BoardState) -> set[tuple]:
    """All legal moves by brute enumeration of every square/direction pair.

    Returns normalized tuples ("exit", dest) / ("step", src, dest).
    """
    if state.status is not GameStatus.ONGOING:
        return set()
    config = state.config
    mover = state.to_move
    board = board_dict(state)
    own_base = base_squares(config, mover)
    enemy_base = base_squares(config, mover.opponent)
    all_base = own_base | enemy_base
    moves: set[tuple] = set()

    if state.base_count(mover) > 0:
        for col in range(config.n):
            for row in range(config.n):
                cell = (col, row)
                if cell in all_base or cell in board:
                    continue
                touches_own_base = any(
                    on_board(config, (col + dc, row + dr))
                    and (col + dc, row + dr) in own_base
                    for dc, dr in ORTHO
                )
                if touches_own_base:
                    moves.add(("exit", cell))

    for src, color in board.items():
        if color is not mover:
            continue
        for dc, dr in ORTHO:
            dest = (src[0] + dc, src[1] + dr)
            if not on_board(config, dest):
                continue
            if dest in enemy_base:
                moves.add(("step", src, dest))
                continue
            if dest in own_base or dest in board:
                continue
            if naive_distance(config, mover, dest) >= naive_distance(config, mover, src):
                moves.add(("step", src, dest))
    return moves


def normalize_move(move: Move) -> tuple:
    if move.kind is MoveKind.EXIT_BASE:
        return ("exit", tuple(move.dest))
    return ("step", tuple(move.source), tuple(move.dest))


def denormalize_move(move: tuple) -> Move:
    if move[0] == "exit":
        return Move(MoveKind.EXIT_BASE, None, Coord(*move[1]))
    return Move(MoveKind.STEP, Coord(*move[1]), Coord(*move[2]))


def _pawn_movable(config, board, base_count_irrelevant, cell, color) -> bool:
    enemy_base = base_squares(config, color.opponent)
    own_base = base_squares(config, color)
    for dc, dr in ORTHO:
        dest = (cell[0] + dc, cell[1] + dr)
        if not on_board(config, dest):
            continue
        if dest in enemy_base:
            return True
        if dest in own_base or dest in board:
            continue
        if naive_distance(config, color, dest) >= naive_distance(config, color, cell):
            return True
    return False


def naive_apply(state: BoardState, move: tuple):
    """Apply a normalized move with a full sweep over every pawn.

    Returns (board dict, reserves dict, losses dict, status) for comparison
    against the engine's incremental implementation.
    """
    config = state.config
    mover = state.to_move
    board = board_dict(state)
    reserves = {Color.WHITE: state.white_base, Color.BLACK: state.black_base}
    losses = {Color.WHITE: 0, Color.BLACK: 0}
    enemy_base = base_squares(config, mover.opponent)

    if move[0] == "exit":
        reserves[mover] -= 1
        dest = move[1]
    else:
        dest = move[2]
        del board[move[1]]

    if dest in enemy_base:
        status = GameStatus.WHITE_WON if mover is Color.WHITE else GameStatus.BLACK_WON
        return board, reserves, losses, status

    board[dest] = mover

    # Simultaneous full sweep: evaluate every pawn of both colors against the
    # post-move position, then remove all trapped ones together.
    trapped = [
        cell
        for cell, color in board.items()
        if not _pawn_movable(config, board, None, cell, color)
    ]
    for cell in trapped:
        losses[board[cell]] += 1
        del board[cell]

    for color in (Color.WHITE, Color.BLACK):
        if reserves[color] == 0:
            continue
        base = base_squares(config, color)
        frees = False
        for col in range(config.n):
            for row in range(config.n):
                cell = (col, row)
                if cell in base or cell in base_squares(config, color.opponent):
                    continue
                if cell in board:
                    continue
                if any(
                    on_board(config, (col + dc, row + dr))
                    and (col + dc, row + dr) in base
                    for dc, dr in ORTHO
                ):
                    frees = True
        if not frees:
            losses[color] += reserves[color]
            reserves[color] = 0

    totals = {
        c: reserves[c] + sum(1 for v in board.values() if v is c)
        for c in (Color.WHITE, Color.BLACK)
    }
    if totals[mover.opponent] == 0:
        status = GameStatus.WHITE_WON if mover is Color.WHITE else GameStatus.BLACK_WON
    elif totals[mover] == 0:
        status = GameStatus.BLACK_WON if mover is Color.WHITE else GameStatus.WHITE_WON
    elif state.ply + 1 >= config.max_plies:
        status = GameStatus.DRAW
    else:
        status = GameStatus.ONGOING
    return board, reserves, losses, status


def random_playout_states(
    config: GameConfig, games: int, seed: int, sample_every: int = 3
):
    """States visited by uniform-random play; all reachable by construction."""
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(games):
        state = initial_state(config)
        while state.status is GameStatus.ONGOING:
            moves = legal_moves(state)
            move = moves[int(rng.integers(len(moves)))]
            state, _ = apply_move(state, move)
            if state.status is GameStatus.ONGOING and rng.integers(sample_every) == 0:
                states.append(state)
    return states


def shortest_win_plies(config: GameConfig) -> int:
    """Fewest white moves to enter the black base on an empty board (BFS)."""
    from collections import deque

    own_base = base_squares(config, Color.WHITE)
    enemy_base = base_squares(config, Color.BLACK)
    starts = []
    for col in range(config.n):
        for row in range(config.n):
            cell = (col, row)
            if cell in own_base or cell in enemy_base:
                continue
            if any(
                on_board(config, (col + dc, row + dr))
                and (col + dc, row + dr) in own_base
                for dc, dr in ORTHO
            ):
                starts.append(cell)
    queue = deque((cell, 1) for cell in starts)  # 1 move spent exiting
    seen = set(starts)
    while queue:
        cell, moves = queue.popleft()
        for dc, dr in ORTHO:
            dest = (cell[0] + dc, cell[1] + dr)
            if not on_board(config, dest):
                continue
            if dest in enemy_base:
                return moves + 1
            if dest in own_base or dest in seen:
                continue
            if naive_distance(config, Color.WHITE, dest) >= naive_distance(
                config, Color.WHITE, cell
            ):
                seen.add(dest)
                queue.append((dest, moves + 1))
    raise AssertionError("no path to the enemy base")


def finite_difference_grads(net, x: np.ndarray, h: float = 1e-5):
    """Central-difference gradient of the network output w.r.t. every
    parameter, computed through the forward pass alone."""
    def output(n):
        return n.value(x)

    grads = {}
    for name in ("w_ih", "b_h", "w_ho"):
        arr = getattr(net, name)
        g = np.zeros_like(arr)
        flat = arr.reshape(-1)
        gf = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = output(net)
            flat[i] = orig - h
            down = output(net)
            flat[i] = orig
            gf[i] = (up - down) / (2 * h)
        grads[name] = g
    orig = net.b_o
    net.b_o = orig + h
    up = output(net)
    net.b_o = orig - h
    down = output(net)
    net.b_o = orig
    grads["b_o"] = (up - down) / (2 * h)
    return grads


def max_relative_gradient_error(net, x: np.ndarray) -> float:
    """Worst relative disagreement between analytic and numeric gradients."""
    analytic = net.forward_grad(x)[1]
    numeric = finite_difference_grads(net, x)
    worst = 0.0
    for name in ("w_ih", "b_h", "w_ho", "b_o"):
        a = np.asarray(getattr(analytic, name), dtype=float)
        n = np.asarray(numeric[name], dtype=float)
        denom = np.maximum(np.abs(n), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def negamax_value(state, depth: int, weights) -> float:
    """Unpruned negamax value from the perspective of the side to move.

    Terminal scores carry the same depth preference as the agent's search:
    a win with d plies of budget left scores WIN_SCORE * (d + 1).
    """
    from baseraid.agents import WIN_SCORE, leaf_eval

    if state.status is not GameStatus.ONGOING:
        if state.status is GameStatus.DRAW:
            return 0.0
        mover_won = (state.status is GameStatus.WHITE_WON) == (
            state.to_move is Color.WHITE
        )
        score = WIN_SCORE * (depth + 1)
        return score if mover_won else -score
    if depth == 0:
        return leaf_eval(state, state.to_move, weights)
    best = float("-inf")
    for move in legal_moves(state):
        child, _ = apply_move(state, move)
        best = max(best, -negamax_value(child, depth - 1, weights))
    return best


def unpruned_best_move(state, depth: int, weights):
    """First maximizer over the canonical move order, no pruning at all."""
    best = float("-inf")
    best_move = None
    for move in legal_moves(state):
        child, _ = apply_move(state, move)
        value = -negamax_value(child, depth - 1, weights)
        if value > best:
            best = value
            best_move = move
    return best_move, best


def mirror_state(state):
    """Rotate the board 180 degrees and swap colours; the same game with the
    players' roles exchanged."""
    from baseraid.game import make_position

    n = state.config.n
    white, black = [], []
    for coord, color in state.occupied():
        flipped = (n - 1 - coord[0], n - 1 - coord[1])
        (black if color is Color.WHITE else white).append(flipped)
    return make_position(
        state.config,
        white=white,
        black=black,
        white_base=state.black_base,
        black_base=state.white_base,
        to_move=state.to_move.opponent,
        ply=state.ply,
    )
