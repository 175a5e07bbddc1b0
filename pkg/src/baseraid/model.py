"""Value networks over board after-states, trained online by TD(lambda).

Each colour owns a small two-layer logistic network that maps an encoded
after-state to the probability of winning from it.  The input layout is:
one entry per non-base square in row-major order (+1 own pawn, -1 opponent
pawn, 0 empty, seen from the owner's perspective), one bit flagging that the
scored move entered the enemy base, and nine bits flagging whether the own
reserve still holds at least 1..9 pawns.  For an n x n board with a x a
bases that is n^2 - 2a^2 + 10 inputs; the hidden layer has half as many
units and there is a single output unit.

Updates use accumulating eligibility traces with decay 0.5 by default, so a
credit or penalty is halved for every step it travels backwards.  Rewards
arrive on a [-100, 100] scale and are mapped onto the network's (0, 1) value
scale: terminal rewards through (r + 100) / 200 (win -> 1, loss -> 0,
draw -> 0.5) and intermediate rewards through r / 200, which leaves the
plain value difference untouched when nothing happened.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .game import BoardState, Color, GameConfig, geometry


class NumericFailureError(RuntimeError):
    """A TD update produced a non-finite quantity; the run must stop."""


def feature_dim(config: GameConfig) -> int:
    return config.n * config.n - 2 * config.a * config.a + 10


_N_TAIL = 10  # base-entry bit + 9 reserve-threshold bits


class _Encoder:
    """Vectorized feature extraction tables for one board shape."""

    def __init__(self, n: int, a: int):
        geom = geometry(n, a)
        self.dim = n * n - 2 * a * a + _N_TAIL
        self.cell_order = np.asarray(geom.feature_order, dtype=np.intp)
        # cells bytes are 0 empty / 1 white / 2 black / 3 base; base cells are
        # excluded by cell_order, so index 3 is never hit.
        self.lut = {
            Color.WHITE: np.array([0.0, 1.0, -1.0, 0.0]),
            Color.BLACK: np.array([0.0, -1.0, 1.0, 0.0]),
        }
        # thresholds[r, k-1] = 1.0 iff reserve r >= k, for k = 1..9
        reserve = np.arange(10)[:, None]
        self.thresholds = (reserve >= np.arange(1, 10)[None, :]).astype(float)


@functools.lru_cache(maxsize=None)
def _encoder(n: int, a: int) -> _Encoder:
    return _Encoder(n, a)


def encode_into(
    out: np.ndarray, state: BoardState, perspective: Color, entered_enemy_base: bool
) -> None:
    enc = _encoder(state.config.n, state.config.a)
    cells = np.frombuffer(state.cells, dtype=np.uint8)
    n_cells = enc.dim - _N_TAIL
    out[:n_cells] = enc.lut[perspective][cells[enc.cell_order]]
    out[n_cells] = 1.0 if entered_enemy_base else 0.0
    out[n_cells + 1 :] = enc.thresholds[min(state.base_count(perspective), 9)]


def encode_features(
    state: BoardState, perspective: Color, entered_enemy_base: bool = False
) -> np.ndarray:
    """Feature vector of ``state`` as seen by ``perspective``."""
    out = np.empty(feature_dim(state.config))
    encode_into(out, state, perspective, entered_enemy_base)
    return out


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class Gradients:
    """d(output) / d(parameter) for one forward pass."""

    w_ih: np.ndarray
    b_h: np.ndarray
    w_ho: np.ndarray
    b_o: float


class ValueNetwork:
    """Two-layer logistic network owned by one colour.

    Parameters are float64 throughout; ``copy`` gives an independent snapshot
    and two networks compare equal exactly when their bytes match.
    """

    __slots__ = ("color", "input_dim", "hidden_dim", "w_ih", "b_h", "w_ho", "b_o", "games_trained")

    def __init__(self, color, input_dim, hidden_dim, w_ih, b_h, w_ho, b_o, games_trained=0):
        self.color = color
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.w_ih = w_ih
        self.b_h = b_h
        self.w_ho = w_ho
        self.b_o = b_o
        self.games_trained = games_trained

    def _check(self, x: np.ndarray) -> None:
        if x.shape[-1] != self.input_dim:
            raise ValueError(
                f"input of length {x.shape[-1]} fed to a {self.input_dim}-input network"
            )

    def forward(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """Output value in (0,1) plus the hidden activations for the backward pass."""
        self._check(x)
        hidden = _sigmoid(self.w_ih @ x + self.b_h)
        value = _sigmoid(float(self.w_ho @ hidden) + self.b_o)
        return float(value), hidden

    def value(self, x: np.ndarray) -> float:
        return self.forward(x)[0]

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Batched outputs for a (k, input_dim) matrix of inputs."""
        self._check(xs)
        hidden = _sigmoid(xs @ self.w_ih.T + self.b_h)
        return _sigmoid(hidden @ self.w_ho + self.b_o)

    def gradients(self, x: np.ndarray, value: float, hidden: np.ndarray) -> Gradients:
        s = value * (1.0 - value)
        g_bh = s * self.w_ho * hidden * (1.0 - hidden)
        return Gradients(
            w_ih=np.outer(g_bh, x),
            b_h=g_bh,
            w_ho=s * hidden,
            b_o=s,
        )

    def forward_grad(self, x: np.ndarray) -> tuple[float, Gradients]:
        value, hidden = self.forward(x)
        return value, self.gradients(x, value, hidden)

    def copy(self) -> "ValueNetwork":
        return ValueNetwork(
            self.color,
            self.input_dim,
            self.hidden_dim,
            self.w_ih.copy(),
            self.b_h.copy(),
            self.w_ho.copy(),
            self.b_o,
            self.games_trained,
        )

    def params_bytes(self) -> bytes:
        """Exact byte image of all parameters (little-endian float64)."""
        parts = [
            self.w_ih.astype("<f8", copy=False).tobytes(),
            self.b_h.astype("<f8", copy=False).tobytes(),
            self.w_ho.astype("<f8", copy=False).tobytes(),
            np.float64(self.b_o).astype("<f8").tobytes(),
        ]
        return b"".join(parts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ValueNetwork)
            and self.color == other.color
            and self.input_dim == other.input_dim
            and self.params_bytes() == other.params_bytes()
        )

    def all_finite(self) -> bool:
        return bool(
            np.isfinite(self.w_ih).all()
            and np.isfinite(self.b_h).all()
            and np.isfinite(self.w_ho).all()
            and np.isfinite(self.b_o)
        )


def init_network(config: GameConfig, color: Color, seed: int, init_weight_scale: float = 0.01) -> ValueNetwork:
    """Fresh network with small uniform weights, so every position starts out
    scored close to the indifferent value 0.5."""
    dim = feature_dim(config)
    hidden = dim // 2
    rng = np.random.default_rng(seed)
    s = init_weight_scale
    return ValueNetwork(
        color=color,
        input_dim=dim,
        hidden_dim=hidden,
        w_ih=rng.uniform(-s, s, size=(hidden, dim)),
        b_h=rng.uniform(-s, s, size=hidden),
        w_ho=rng.uniform(-s, s, size=hidden),
        b_o=float(rng.uniform(-s, s)),
    )


@dataclass(frozen=True)
class TdParams:
    """Learning hyperparameters.

    ``trace_decay`` halves backward credit per step at its default 0.5;
    the episodic setting keeps ``discount`` at 1.
    """

    trace_decay: float = 0.5
    discount: float = 1.0
    learning_rate: float = 0.01
    init_weight_scale: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.trace_decay <= 1.0:
            raise ValueError("trace_decay must lie in [0, 1]")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.discount != 1.0:
            raise ValueError("the game is episodic; discount is fixed at 1")


class EligibilityTraces:
    """Per-parameter accumulators, zeroed at the start of every game."""

    __slots__ = ("w_ih", "b_h", "w_ho", "b_o")

    def __init__(self, net: ValueNetwork):
        self.w_ih = np.zeros_like(net.w_ih)
        self.b_h = np.zeros_like(net.b_h)
        self.w_ho = np.zeros_like(net.w_ho)
        self.b_o = 0.0

    def reset(self) -> None:
        self.w_ih[:] = 0.0
        self.b_h[:] = 0.0
        self.w_ho[:] = 0.0
        self.b_o = 0.0

    def is_zero(self) -> bool:
        return (
            not self.w_ih.any()
            and not self.b_h.any()
            and not self.w_ho.any()
            and self.b_o == 0.0
        )


def terminal_value_target(reward: float) -> float:
    """Map a terminal reward on [-100, 100] onto the (0, 1) value scale."""
    return (reward + 100.0) / 200.0


def step_value_reward(reward: float) -> float:
    """Map an intermediate reward onto value units (pure rescaling)."""
    return reward / 200.0


def td_update(
    net: ValueNetwork,
    traces: EligibilityTraces,
    params: TdParams,
    v_prev: float,
    v_next: float,
    reward: float,
    grad_prev: Gradients,
) -> float:
    """One TD step: fold grad_prev into the decayed traces, then move every
    parameter along its trace by the TD error.  ``reward`` is already on the
    value scale.  Returns the TD error."""
    lam = params.trace_decay
    traces.w_ih *= lam
    traces.w_ih += grad_prev.w_ih
    traces.b_h *= lam
    traces.b_h += grad_prev.b_h
    traces.w_ho *= lam
    traces.w_ho += grad_prev.w_ho
    traces.b_o = lam * traces.b_o + grad_prev.b_o

    delta = reward + params.discount * v_next - v_prev
    if not np.isfinite(delta):
        raise NumericFailureError(f"non-finite TD error {delta!r}")
    if delta != 0.0:
        step = params.learning_rate * delta
        net.w_ih += step * traces.w_ih
        net.b_h += step * traces.b_h
        net.w_ho += step * traces.w_ho
        net.b_o += step * traces.b_o
    return delta
