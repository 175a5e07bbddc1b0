"""Move-selection policies: the learning player, a uniform-random baseline,
and the fixed-depth minimax tutor.

The learner follows the workbench's exploit-heavy convention: with
probability ``exploit_prob`` (0.9 by default) it plays the move whose
after-state the value network scores highest, otherwise it plays a uniform
random legal move.  Note that ``exploit_prob`` is the probability of the
GREEDY branch; it is the complement of the usual epsilon-greedy exploration
rate, so keep the inversion in mind when configuring runs.

The minimax tutor searches the full tree to exactly ``lookahead`` plies with
an odd lookahead 2k+1, i.e. k+1 of its own moves and k opponent replies.
Its move choice is deterministic: ties resolve to the first move in the
engine's canonical ordering (exit moves first, then steps by row-major
source and destination), and alpha-beta pruning is arranged so it always
returns that same move.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .game import (
    BoardState,
    Color,
    GameStatus,
    Move,
    _apply_int,
    _legal_int_moves,
    _to_public,
)
from .model import NumericFailureError, ValueNetwork, _encoder, feature_dim

WIN_SCORE = 10_000.0

KIND_LEARNER = "learner"
KIND_RANDOM = "random"
KIND_MINIMAX = "minimax"
KIND_HUMAN = "human-proxy"
AGENT_KINDS = (KIND_LEARNER, KIND_RANDOM, KIND_MINIMAX, KIND_HUMAN)


@dataclass(frozen=True)
class AgentSpec:
    """How one side picks its moves."""

    kind: str = KIND_LEARNER
    exploit_prob: float = 0.9  # learner only: probability of the greedy move
    lookahead: Optional[int] = None  # minimax only: odd ply depth
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if not 0.0 <= self.exploit_prob <= 1.0:
            raise ValueError("exploit_prob must lie in [0, 1]")
        if self.kind == KIND_MINIMAX:
            if self.lookahead is None or self.lookahead < 1 or self.lookahead % 2 == 0:
                raise ValueError("minimax lookahead must be an odd depth >= 1")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "exploit_prob": self.exploit_prob,
            "lookahead": self.lookahead,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AgentSpec":
        return cls(
            kind=d.get("kind", KIND_LEARNER),
            exploit_prob=d.get("exploit_prob", 0.9),
            lookahead=d.get("lookahead"),
            seed=d.get("seed"),
        )


@dataclass(frozen=True)
class LeafEval:
    """Leaf heuristic for the tutor: pawn material first, then accumulated
    progress toward the enemy base.  Progress sums every on-board pawn's
    advancement, (n-1) minus its Chebyshev distance to the enemy base region,
    so a blocked pawn never flattens the gradient: some pawn can usually
    still improve.  (A home-distance metric saturates at the far edge and
    strands a 1-ply tutor.)"""

    material_weight: float = 10.0
    progress_weight: float = 1.0


def _advancement(state: BoardState, color: Color) -> int:
    """Summed advancement of ``color``'s on-board pawns toward the enemy base."""
    geom = state.geom
    # distance to the enemy base equals the opponent's home-distance table
    dist = geom.dist[color.opponent]
    reach = state.config.n - 1
    cells = state.cells
    v = color.value
    total = 0
    for i in range(geom.n_cells):
        if cells[i] == v:
            total += reach - dist[i]
    return total


def leaf_eval(state: BoardState, perspective: Color, weights: LeafEval = LeafEval()) -> float:
    """Heuristic score of ``state`` for ``perspective``; terminal states
    dominate every heuristic value."""
    status = state.status
    if status is not GameStatus.ONGOING:
        if status is GameStatus.DRAW:
            return 0.0
        won = (status is GameStatus.WHITE_WON) == (perspective is Color.WHITE)
        return WIN_SCORE if won else -WIN_SCORE
    me, other = perspective, perspective.opponent
    material = state.total_pawns(me) - state.total_pawns(other)
    progress = _advancement(state, me) - _advancement(state, other)
    return weights.material_weight * material + weights.progress_weight * progress


def evaluate_after_states(
    state: BoardState, moves: list[tuple[int, int]], net: ValueNetwork
) -> np.ndarray:
    """Network values of every move's after-state, seen by the mover."""
    dim = feature_dim(state.config)
    if dim != net.input_dim:
        raise ValueError(
            f"network expects {net.input_dim} inputs but this board encodes to {dim}"
        )
    mover = state.to_move
    enc = _encoder(state.config.n, state.config.a)
    n_cells = dim - 10
    boards = []
    entered = []
    reserves = []
    for frm, to in moves:
        after, events = _apply_int(state, frm, to)
        boards.append(after.cells)
        entered.append(events.entered_enemy_base)
        reserves.append(min(after.base_count(mover), 9))
    grids = np.frombuffer(b"".join(boards), dtype=np.uint8).reshape(len(moves), -1)
    xs = np.empty((len(moves), dim))
    xs[:, :n_cells] = enc.lut[mover][grids[:, enc.cell_order]]
    xs[:, n_cells] = entered
    xs[:, n_cells + 1 :] = enc.thresholds[reserves]
    values = net.values(xs)
    if not np.isfinite(values).all():
        raise NumericFailureError("the value network produced non-finite outputs")
    return values


def select_move_learner(
    state: BoardState, net: ValueNetwork, spec: AgentSpec, rng: np.random.Generator
) -> Move:
    """Exploit-or-explore choice over the legal moves; value ties break
    uniformly at random from the agent's own generator."""
    moves = _legal_int_moves(state)
    if not moves:
        raise ValueError("no legal moves: the state should already be terminal")
    if len(moves) == 1:
        return _to_public(state, moves[0])
    if rng.random() >= spec.exploit_prob:
        return _to_public(state, moves[int(rng.integers(len(moves)))])
    values = evaluate_after_states(state, moves, net)
    ties = np.flatnonzero(values == values.max())
    pick = int(ties[0]) if len(ties) == 1 else int(ties[int(rng.integers(len(ties)))])
    return _to_public(state, moves[pick])


def select_move_random(state: BoardState, rng: np.random.Generator) -> Move:
    """Uniform draw over the legal moves."""
    moves = _legal_int_moves(state)
    if not moves:
        raise ValueError("no legal moves: the state should already be terminal")
    return _to_public(state, moves[int(rng.integers(len(moves)))])


def _terminal_score(state: BoardState, root: Color, depth_left: int) -> float:
    """Terminal nodes outrank every heuristic; nearer wins (which leave more
    depth unsearched) outrank later ones, and later losses beat earlier ones."""
    if state.status is GameStatus.DRAW:
        return 0.0
    won = (state.status is GameStatus.WHITE_WON) == (root is Color.WHITE)
    magnitude = WIN_SCORE * (depth_left + 1)
    return magnitude if won else -magnitude


def _search(
    state: BoardState,
    depth: int,
    alpha: float,
    beta: float,
    root: Color,
    weights: LeafEval,
    audit: Optional[dict],
) -> float:
    if state.status is not GameStatus.ONGOING:
        return _terminal_score(state, root, depth)
    if depth == 0:
        return leaf_eval(state, root, weights)
    if audit is not None:
        key = (state.to_move, depth)
        audit[key] = audit.get(key, 0) + 1
    maximizing = state.to_move is root
    best = -np.inf if maximizing else np.inf
    for frm, to in _legal_int_moves(state):
        child, _ = _apply_int(state, frm, to)
        score = _search(child, depth - 1, alpha, beta, root, weights, audit)
        if maximizing:
            if score > best:
                best = score
                if best > alpha:
                    alpha = best
        else:
            if score < best:
                best = score
                if best < beta:
                    beta = best
        if alpha >= beta:
            break
    return best


def select_move_minimax(
    state: BoardState,
    lookahead: int,
    weights: LeafEval = LeafEval(),
    audit: Optional[dict] = None,
) -> Move:
    """Best move by full-width minimax to exactly ``lookahead`` plies.

    ``audit``, when given, collects (side to move, remaining depth) -> count
    of expanded interior nodes, for instrumentation.
    """
    if lookahead < 1 or lookahead % 2 == 0:
        raise ValueError("lookahead must be an odd depth >= 1")
    moves = _legal_int_moves(state)
    if not moves:
        raise ValueError("no legal moves: the state should already be terminal")
    root = state.to_move
    if audit is not None:
        key = (root, lookahead)
        audit[key] = audit.get(key, 0) + 1
    best_move = None
    best = -np.inf
    for frm, to in moves:
        child, _ = _apply_int(state, frm, to)
        score = _search(child, lookahead - 1, best, np.inf, root, weights, audit)
        if score > best:
            best = score
            best_move = (frm, to)
    return _to_public(state, best_move)


def minimax_root_value(
    state: BoardState, lookahead: int, weights: LeafEval = LeafEval()
) -> float:
    """Root minimax value under the same scoring as select_move_minimax."""
    if state.status is not GameStatus.ONGOING:
        return _terminal_score(state, state.to_move, lookahead)
    return _search(state, lookahead, -np.inf, np.inf, state.to_move, weights, None)
