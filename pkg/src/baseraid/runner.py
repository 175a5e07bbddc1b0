"""Game and session drivers: single games, CC self-play sessions, and the
step-wise human-vs-computer session used by the teaching service.

Rewards follow the workbench's scheme: +100 for a win, -100 for a loss, 0
for a draw, and for any change in pawn numbers the per-move pawn swing
scaled linearly into [-100, 100] for each player.  Every applied move
yields a reward for BOTH colours; a colour's network consumes its rewards
accumulated since its own previous move when it takes its next TD step, so
losses inflicted during the opponent's move are not dropped.

Each colour's network learns along its own after-state chain: after one of
its moves the network is updated from the value of its previous after-state
towards reward plus the value of the new one.  At the end of a game the
final after-state of each colour (for the mover: the terminal position it
just produced, base-entry bit included) is pulled towards the terminal
target: 1 for a win, 0 for a loss, 0.5 for a draw.  Traces reset at every
game start; the networks themselves persist and keep evolving across a
session.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .agents import (
    KIND_LEARNER,
    KIND_MINIMAX,
    KIND_RANDOM,
    AgentSpec,
    LeafEval,
    select_move_learner,
    select_move_minimax,
    select_move_random,
)
from .game import (
    BoardState,
    Color,
    GameConfig,
    GameStatus,
    IllegalMoveError,
    Move,
    MoveEvents,
    apply_move,
    initial_state,
    legal_moves,
)
from .model import (
    EligibilityTraces,
    NumericFailureError,
    TdParams,
    ValueNetwork,
    encode_features,
    step_value_reward,
    td_update,
    terminal_value_target,
)

WHITE, BLACK, DRAW = "white", "black", "draw"


class ProtocolError(RuntimeError):
    """An agent broke the game protocol (e.g. returned an illegal move)."""


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed derived from integer components."""
    return int(np.random.SeedSequence(tuple(parts)).generate_state(1, np.uint64)[0])


def game_rng(run_seed: int, game_index: int, color: Color) -> np.random.Generator:
    """The per-game, per-colour generator; a pure function of its arguments."""
    return np.random.default_rng(
        np.random.SeedSequence((run_seed, game_index, int(color.value)))
    )


def compute_reward(
    events: MoveEvents, status: GameStatus, perspective: Color, beta: int
) -> float:
    """Reward on [-100, 100] that one applied move earns ``perspective``."""
    if status is not GameStatus.ONGOING:
        if status is GameStatus.DRAW:
            return 0.0
        won = (status is GameStatus.WHITE_WON) == (perspective is Color.WHITE)
        return 100.0 if won else -100.0
    own = events.pawns_lost(perspective)
    other = events.pawns_lost(perspective.opponent)
    return max(-100.0, min(100.0, 100.0 * (other - own) / beta))


@dataclass
class GameRecord:
    """Outcome and counters of one finished game."""

    game_index: int
    winner: str  # "white" | "black" | "draw"
    plies: int
    white_moves: int
    black_moves: int
    white_pawns_lost: int
    black_pawns_lost: int
    duration: float

    def to_dict(self) -> dict:
        return {
            "game_index": self.game_index,
            "winner": self.winner,
            "plies": self.plies,
            "white_moves": self.white_moves,
            "black_moves": self.black_moves,
            "white_pawns_lost": self.white_pawns_lost,
            "black_pawns_lost": self.black_pawns_lost,
            "duration": self.duration,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GameRecord":
        return cls(**d)


@dataclass(frozen=True)
class SessionSpec:
    """A computer-vs-computer session of ``games`` sequential games."""

    config: GameConfig = GameConfig()
    white: AgentSpec = AgentSpec()
    black: AgentSpec = AgentSpec()
    games: int = 1000
    learn_white: bool = True
    learn_black: bool = True
    run_seed: int = 0
    td: TdParams = TdParams()
    leaf: LeafEval = LeafEval()  # minimax agents only

    def __post_init__(self):
        if self.games < 1:
            raise ValueError("a session needs at least one game")
        if self.run_seed < 0:
            raise ValueError("run_seed must be non-negative")

    def to_dict(self) -> dict:
        return {
            "config": {
                "n": self.config.n,
                "a": self.config.a,
                "beta": self.config.beta,
                "max_plies": self.config.max_plies,
            },
            "white": self.white.to_dict(),
            "black": self.black.to_dict(),
            "games": self.games,
            "learn_white": self.learn_white,
            "learn_black": self.learn_black,
            "run_seed": self.run_seed,
            "td": {
                "trace_decay": self.td.trace_decay,
                "discount": self.td.discount,
                "learning_rate": self.td.learning_rate,
                "init_weight_scale": self.td.init_weight_scale,
            },
            "leaf": {
                "material_weight": self.leaf.material_weight,
                "progress_weight": self.leaf.progress_weight,
            },
        }


class _Chain:
    """One colour's learning state inside a single game."""

    __slots__ = ("traces", "x_prev", "pending")

    def __init__(self, net: ValueNetwork):
        self.traces = EligibilityTraces(net)
        self.x_prev: Optional[np.ndarray] = None
        self.pending = 0.0


class GameLearning:
    """Applies the per-move TD updates for the colours that are learning."""

    def __init__(
        self,
        config: GameConfig,
        nets: dict,
        learn: dict,
        td: TdParams,
    ):
        self.config = config
        self.nets = nets
        self.td = td
        self.chains = {
            color: _Chain(nets[color]) if learn.get(color) and nets.get(color) else None
            for color in Color
        }

    def after_move(self, mover: Color, new_state: BoardState, events: MoveEvents) -> None:
        status = new_state.status
        beta = self.config.beta
        terminal = status is not GameStatus.ONGOING

        for color in Color:
            chain = self.chains[color]
            if chain is not None and not terminal:
                chain.pending += compute_reward(events, status, color, beta)

        chain = self.chains[mover]
        if not terminal:
            if chain is None:
                return
            net = self.nets[mover]
            x_new = encode_features(new_state, mover, False)
            if chain.x_prev is not None:
                v_prev, grads = net.forward_grad(chain.x_prev)
                v_next = net.value(x_new)
                td_update(
                    net,
                    chain.traces,
                    self.td,
                    v_prev=v_prev,
                    v_next=v_next,
                    reward=step_value_reward(chain.pending),
                    grad_prev=grads,
                )
            chain.pending = 0.0
            chain.x_prev = x_new
            return

        # Terminal: the mover's chain absorbs the final after-state (with its
        # base-entry bit) and every learning colour is pulled to its target.
        if chain is not None:
            chain.x_prev = encode_features(new_state, mover, events.entered_enemy_base)
        for color in Color:
            chain = self.chains[color]
            if chain is None or chain.x_prev is None:
                continue
            net = self.nets[color]
            v_last, grads = net.forward_grad(chain.x_prev)
            target = terminal_value_target(compute_reward(events, status, color, beta))
            td_update(
                net,
                chain.traces,
                self.td,
                v_prev=v_last,
                v_next=0.0,
                reward=target,
                grad_prev=grads,
            )

    def finish_game(self) -> None:
        for color in Color:
            if self.chains[color] is not None:
                self.nets[color].games_trained += 1


def _selector(
    spec: AgentSpec,
    net: Optional[ValueNetwork],
    rng: np.random.Generator,
    leaf: LeafEval,
) -> Callable[[BoardState], Move]:
    if spec.kind == KIND_LEARNER:
        if net is None:
            raise ValueError("a learner agent needs a value network")
        return lambda state: select_move_learner(state, net, spec, rng)
    if spec.kind == KIND_RANDOM:
        return lambda state: select_move_random(state, rng)
    if spec.kind == KIND_MINIMAX:
        return lambda state: select_move_minimax(state, spec.lookahead, leaf)
    raise ValueError(f"agent kind {spec.kind!r} cannot drive a CC game")


def play_game(
    spec: SessionSpec,
    white_net: Optional[ValueNetwork],
    black_net: Optional[ValueNetwork],
    game_index: int = 0,
) -> GameRecord:
    """Play one game of the session; the networks are updated in place."""
    nets = {Color.WHITE: white_net, Color.BLACK: black_net}
    learn = {Color.WHITE: spec.learn_white, Color.BLACK: spec.learn_black}
    selectors = {
        Color.WHITE: _selector(
            spec.white, white_net, game_rng(spec.run_seed, game_index, Color.WHITE), spec.leaf
        ),
        Color.BLACK: _selector(
            spec.black, black_net, game_rng(spec.run_seed, game_index, Color.BLACK), spec.leaf
        ),
    }
    learning = GameLearning(spec.config, nets, learn, spec.td)
    return _drive_game(spec.config, selectors, learning, game_index)


def _drive_game(
    config: GameConfig,
    selectors: dict,
    learning: GameLearning,
    game_index: int,
) -> GameRecord:
    start = time.perf_counter()
    state = initial_state(config)
    moves = {Color.WHITE: 0, Color.BLACK: 0}
    losses = {Color.WHITE: 0, Color.BLACK: 0}
    while state.status is GameStatus.ONGOING:
        mover = state.to_move
        move = selectors[mover](state)
        try:
            new_state, events = apply_move(state, move)
        except IllegalMoveError as exc:
            raise ProtocolError(
                f"{mover.name.lower()} agent returned an illegal move: {exc}"
            ) from exc
        moves[mover] += 1
        losses[Color.WHITE] += events.white_pawns_lost
        losses[Color.BLACK] += events.black_pawns_lost
        learning.after_move(mover, new_state, events)
        state = new_state
    learning.finish_game()
    winner = {
        GameStatus.WHITE_WON: WHITE,
        GameStatus.BLACK_WON: BLACK,
        GameStatus.DRAW: DRAW,
    }[state.status]
    return GameRecord(
        game_index=game_index,
        winner=winner,
        plies=state.ply,
        white_moves=moves[Color.WHITE],
        black_moves=moves[Color.BLACK],
        white_pawns_lost=losses[Color.WHITE],
        black_pawns_lost=losses[Color.BLACK],
        duration=time.perf_counter() - start,
    )


def aggregate_records(records: list) -> dict:
    """The four-cell reporting shape (wins and average winner moves per side)
    plus draw and game counts."""
    white_wins = [r for r in records if r.winner == WHITE]
    black_wins = [r for r in records if r.winner == BLACK]
    draws = sum(1 for r in records if r.winner == DRAW)

    def avg(values):
        return round(sum(values) / len(values), 1) if values else None

    return {
        "games": len(records),
        "white_wins": len(white_wins),
        "black_wins": len(black_wins),
        "draws": draws,
        "avg_winner_moves_white": avg([r.white_moves for r in white_wins]),
        "avg_winner_moves_black": avg([r.black_moves for r in black_wins]),
    }


@dataclass
class SessionResult:
    spec: SessionSpec
    records: list
    stats: dict
    white_net: Optional[ValueNetwork]
    black_net: Optional[ValueNetwork]


def run_cc_session(
    spec: SessionSpec,
    white_net: Optional[ValueNetwork],
    black_net: Optional[ValueNetwork],
    on_game: Optional[Callable[[GameRecord], None]] = None,
) -> SessionResult:
    """Play ``spec.games`` sequential games; networks evolve across games and
    traces reset at each game start.  On a numeric failure the exception
    carries the records of the games already finished."""
    records: list = []
    for index in range(spec.games):
        try:
            record = play_game(spec, white_net, black_net, game_index=index)
        except NumericFailureError as exc:
            exc.partial_records = records
            raise
        records.append(record)
        if on_game is not None:
            on_game(record)
    return SessionResult(
        spec=spec,
        records=records,
        stats=aggregate_records(records),
        white_net=white_net,
        black_net=black_net,
    )


# --- step-wise human-vs-computer sessions -----------------------------------


SESSION_LIVE = "live"
SESSION_COMPLETE = "complete"
SESSION_ABORTED = "aborted"


@dataclass
class HcStep:
    """What one accepted human move produced."""

    human_move: Move
    computer_move: Optional[Move]
    finished_records: list
    session_status: str


class HcSession:
    """A human teaching session: the human plays one colour, the computer the
    other, learning stays on for both networks, and games restart
    automatically until the planned count is reached.

    One mutation at a time: callers must serialize play_human_move.
    """

    def __init__(
        self,
        config: GameConfig,
        human_color: Color,
        games_planned: int,
        white_net: ValueNetwork,
        black_net: ValueNetwork,
        td: TdParams = TdParams(),
        computer: AgentSpec = AgentSpec(kind=KIND_LEARNER),
        session_seed: int = 0,
        on_game_complete: Optional[Callable[[GameRecord], None]] = None,
        completed_records: Optional[list] = None,
        status: str = SESSION_LIVE,
    ):
        if games_planned < 1:
            raise ValueError("a session needs at least one game")
        self.config = config
        self.human_color = human_color
        self.computer_color = human_color.opponent
        self.games_planned = games_planned
        self.nets = {Color.WHITE: white_net, Color.BLACK: black_net}
        self.td = td
        self.computer_spec = computer
        self.session_seed = session_seed
        self.on_game_complete = on_game_complete
        self.records: list = list(completed_records) if completed_records else []
        self.transcripts: list = []  # one list of moves per finished game
        self.game_index = len(self.records)
        self.status = status
        if self.status == SESSION_LIVE and self.game_index >= games_planned:
            self.status = SESSION_COMPLETE
        self.state: BoardState = initial_state(config)
        self.last_move: Optional[Move] = None
        self._current_transcript: list = []
        self._reset_board()
        if self.status == SESSION_LIVE:
            self._advance_computer([])

    @classmethod
    def resume(
        cls,
        *,
        completed_records: list,
        status: str = SESSION_LIVE,
        **kwargs,
    ) -> "HcSession":
        """Rebuild a session at its last completed-game boundary; the next
        game replays deterministically from the per-game seeds."""
        return cls(completed_records=completed_records, status=status, **kwargs)

    # -- internals ----------------------------------------------------------

    def _reset_board(self) -> None:
        self.state = initial_state(self.config)
        self.last_move = None
        self._current_transcript = []
        self._learning = GameLearning(
            self.config,
            self.nets,
            {Color.WHITE: True, Color.BLACK: True},
            self.td,
        )
        self._computer_rng = game_rng(
            self.session_seed, self.game_index, self.computer_color
        )
        self._started = time.perf_counter()
        self._moves = {Color.WHITE: 0, Color.BLACK: 0}
        self._losses = {Color.WHITE: 0, Color.BLACK: 0}

    def _advance_computer(self, finished: list) -> None:
        """Let the computer move for as long as it is its turn, opening fresh
        games after each one it finishes."""
        while self.status == SESSION_LIVE and self.state.to_move is self.computer_color:
            self._computer_move()
            if self.state.status is not GameStatus.ONGOING:
                finished.append(self._finish_game())

    def _apply(self, mover: Color, move: Move) -> None:
        new_state, events = apply_move(self.state, move)
        self._moves[mover] += 1
        self._losses[Color.WHITE] += events.white_pawns_lost
        self._losses[Color.BLACK] += events.black_pawns_lost
        self._current_transcript.append(move)
        self._learning.after_move(mover, new_state, events)
        self.state = new_state
        self.last_move = move

    def _computer_move(self) -> Move:
        move = select_move_learner(
            self.state,
            self.nets[self.computer_color],
            self.computer_spec,
            self._computer_rng,
        )
        self._apply(self.computer_color, move)
        return move

    def _finish_game(self) -> GameRecord:
        self._learning.finish_game()
        winner = {
            GameStatus.WHITE_WON: WHITE,
            GameStatus.BLACK_WON: BLACK,
            GameStatus.DRAW: DRAW,
        }[self.state.status]
        record = GameRecord(
            game_index=self.game_index,
            winner=winner,
            plies=self.state.ply,
            white_moves=self._moves[Color.WHITE],
            black_moves=self._moves[Color.BLACK],
            white_pawns_lost=self._losses[Color.WHITE],
            black_pawns_lost=self._losses[Color.BLACK],
            duration=time.perf_counter() - self._started,
        )
        self.records.append(record)
        self.transcripts.append(list(self._current_transcript))
        if self.on_game_complete is not None:
            self.on_game_complete(record)
        self.game_index += 1
        if self.game_index >= self.games_planned:
            self.status = SESSION_COMPLETE
        else:
            self._reset_board()
        return record

    # -- public surface -----------------------------------------------------

    @property
    def move_counts(self) -> dict:
        return dict(self._moves)

    @property
    def human_to_move(self) -> bool:
        return (
            self.status == SESSION_LIVE
            and self.state.status is GameStatus.ONGOING
            and self.state.to_move is self.human_color
        )

    def human_legal_moves(self) -> list:
        return legal_moves(self.state) if self.human_to_move else []

    def play_human_move(self, move: Move) -> HcStep:
        """Validate and apply the human's move, learn from it, and let the
        computer reply; finished games auto-advance.  Illegal moves raise
        IllegalMoveError and leave everything untouched."""
        if self.status != SESSION_LIVE:
            raise ProtocolError(f"session is {self.status}")
        if self.state.to_move is not self.human_color:
            raise ProtocolError("it is not the human's turn")
        finished: list = []
        self._apply(self.human_color, move)  # raises IllegalMoveError untouched
        computer_move = None
        if self.state.status is not GameStatus.ONGOING:
            finished.append(self._finish_game())
        else:
            computer_move = self._computer_move()
            if self.state.status is not GameStatus.ONGOING:
                finished.append(self._finish_game())
        # if the computer opens the next game(s), play those moves now
        self._advance_computer(finished)
        return HcStep(move, computer_move, finished, self.status)

    def abort(self) -> None:
        """Stop the session; the unfinished game leaves no record and no
        terminal learning signal."""
        if self.status == SESSION_LIVE:
            self.status = SESSION_ABORTED
