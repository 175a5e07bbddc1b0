"""Session-driver tests: rewards, determinism, learning isolation, and the
step-wise human session."""

import numpy as np
import pytest

from baseraid.agents import AgentSpec
from baseraid.game import (
    Color,
    GameConfig,
    GameStatus,
    IllegalMoveError,
    Move,
    MoveEvents,
    MoveKind,
    apply_move,
    initial_state,
)
from baseraid.model import init_network
from baseraid.runner import (
    HcSession,
    ProtocolError,
    SessionSpec,
    compute_reward,
    derive_seed,
    play_game,
    run_cc_session,
)

CFG = GameConfig()
FAST = GameConfig(n=5, a=1, beta=3, max_plies=80)


def fresh_nets(config, seed=0):
    return (
        init_network(config, Color.WHITE, seed=derive_seed(seed, 1)),
        init_network(config, Color.BLACK, seed=derive_seed(seed, 2)),
    )


def record_key(record):
    """Everything in a record except the wall-clock duration."""
    d = record.to_dict()
    d.pop("duration")
    return d


class TestComputeReward:
    def test_terminal_rewards(self):
        ev = MoveEvents(entered_enemy_base=True)
        assert compute_reward(ev, GameStatus.WHITE_WON, Color.WHITE, 10) == 100.0
        assert compute_reward(ev, GameStatus.WHITE_WON, Color.BLACK, 10) == -100.0
        assert compute_reward(ev, GameStatus.DRAW, Color.WHITE, 10) == 0.0

    def test_no_change_means_zero(self):
        assert compute_reward(MoveEvents(), GameStatus.ONGOING, Color.WHITE, 10) == 0.0

    def test_pawn_difference_scaling(self):
        ev = MoveEvents(white_pawns_lost=0, black_pawns_lost=2)
        assert compute_reward(ev, GameStatus.ONGOING, Color.WHITE, 10) == 20.0
        assert compute_reward(ev, GameStatus.ONGOING, Color.BLACK, 10) == -20.0

    def test_bounds_hold_for_any_events(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            ev = MoveEvents(
                white_pawns_lost=int(rng.integers(0, 11)),
                black_pawns_lost=int(rng.integers(0, 11)),
            )
            r = compute_reward(ev, GameStatus.ONGOING, Color.WHITE, 10)
            assert -100.0 <= r <= 100.0


class TestPlayGame:
    def test_deterministic_replay(self):
        spec = SessionSpec(config=FAST, games=1, run_seed=5)
        w1, b1 = fresh_nets(FAST, seed=1)
        w2, b2 = fresh_nets(FAST, seed=1)
        r1 = play_game(spec, w1, b1, game_index=0)
        r2 = play_game(spec, w2, b2, game_index=0)
        assert record_key(r1) == record_key(r2)
        assert w1.params_bytes() == w2.params_bytes()
        assert b1.params_bytes() == b2.params_bytes()

    def test_record_accounting(self):
        spec = SessionSpec(config=FAST, games=1, run_seed=6)
        w, b = fresh_nets(FAST, seed=2)
        record = play_game(spec, w, b)
        assert record.white_moves + record.black_moves == record.plies
        assert record.winner in ("white", "black", "draw")

    def test_learner_requires_network(self):
        spec = SessionSpec(config=FAST, games=1)
        with pytest.raises(ValueError):
            play_game(spec, None, None)

    def test_minimax_one_crushes_random(self):
        # measured baseline: 100/100 wins for the one-ply searcher
        spec = SessionSpec(
            config=CFG,
            white=AgentSpec(kind="minimax", lookahead=1),
            black=AgentSpec(kind="random"),
            games=100,
            learn_white=False,
            learn_black=False,
            run_seed=7,
        )
        result = run_cc_session(spec, None, None)
        assert result.stats["white_wins"] >= 95

    def test_draw_at_cap(self):
        config = GameConfig(n=5, a=1, beta=3, max_plies=4)
        spec = SessionSpec(config=config, games=1, run_seed=8)
        w, b = fresh_nets(config, seed=3)
        record = play_game(spec, w, b)
        assert record.winner == "draw"
        assert record.plies == 4


class TestCcSession:
    def test_accounting_sums_to_games(self):
        spec = SessionSpec(config=FAST, games=12, run_seed=9)
        w, b = fresh_nets(FAST, seed=4)
        result = run_cc_session(spec, w, b)
        s = result.stats
        assert s["white_wins"] + s["black_wins"] + s["draws"] == 12
        assert len(result.records) == 12
        assert [r.game_index for r in result.records] == list(range(12))

    def test_session_equals_sequential_games(self):
        # traces reset per game and per-game seeds depend only on
        # (run_seed, game index), so a session is exactly its games in order
        spec = SessionSpec(config=FAST, games=3, run_seed=10)
        w1, b1 = fresh_nets(FAST, seed=5)
        run_cc_session(spec, w1, b1)
        w2, b2 = fresh_nets(FAST, seed=5)
        for index in range(3):
            play_game(spec, w2, b2, game_index=index)
        assert w1.params_bytes() == w2.params_bytes()
        assert b1.params_bytes() == b2.params_bytes()

    def test_rerun_is_bit_identical(self):
        spec = SessionSpec(config=FAST, games=10, run_seed=11)
        w1, b1 = fresh_nets(FAST, seed=6)
        r1 = run_cc_session(spec, w1, b1)
        w2, b2 = fresh_nets(FAST, seed=6)
        r2 = run_cc_session(spec, w2, b2)
        assert r1.stats == r2.stats
        assert w1.params_bytes() == w2.params_bytes()
        assert b1.params_bytes() == b2.params_bytes()

    def test_learning_isolation(self):
        spec = SessionSpec(config=FAST, games=6, run_seed=12, learn_white=False)
        w, b = fresh_nets(FAST, seed=7)
        before_w = w.params_bytes()
        before_b = b.params_bytes()
        run_cc_session(spec, w, b)
        assert w.params_bytes() == before_w  # frozen colour untouched
        assert b.params_bytes() != before_b
        assert w.games_trained == 0 and b.games_trained == 6

    def test_learning_changes_both_nets_in_tutored_play(self):
        # the scripted white tutor still trains the white network passively
        spec = SessionSpec(
            config=FAST,
            white=AgentSpec(kind="minimax", lookahead=1),
            games=4,
            run_seed=13,
        )
        w, b = fresh_nets(FAST, seed=8)
        before_w = w.params_bytes()
        run_cc_session(spec, w, b)
        assert w.params_bytes() != before_w

    def test_games_trained_counts_sessions(self):
        spec = SessionSpec(config=FAST, games=5, run_seed=14)
        w, b = fresh_nets(FAST, seed=9)
        run_cc_session(spec, w, b)
        assert w.games_trained == 5 and b.games_trained == 5

    def test_aggregate_shape(self):
        spec = SessionSpec(config=FAST, games=8, run_seed=15)
        w, b = fresh_nets(FAST, seed=10)
        result = run_cc_session(spec, w, b)
        assert set(result.stats) == {
            "games",
            "white_wins",
            "black_wins",
            "draws",
            "avg_winner_moves_white",
            "avg_winner_moves_black",
        }

    def test_aggregates_rederivable_from_records(self):
        spec = SessionSpec(config=FAST, games=8, run_seed=16)
        w, b = fresh_nets(FAST, seed=11)
        result = run_cc_session(spec, w, b)
        white_wins = [r for r in result.records if r.winner == "white"]
        assert result.stats["white_wins"] == len(white_wins)
        if white_wins:
            assert result.stats["avg_winner_moves_white"] == pytest.approx(
                round(sum(r.white_moves for r in white_wins) / len(white_wins), 1)
            )


class TestDeriveSeed:
    def test_stable_and_distinct(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
        assert derive_seed(1, 2, 3) != derive_seed(1, 2, 4)
        assert derive_seed(0) >= 0


def scripted_session(config=FAST, games=2, human=Color.WHITE, seed=0, **kwargs):
    w, b = fresh_nets(config, seed=seed)
    return HcSession(
        config,
        human_color=human,
        games_planned=games,
        white_net=w,
        black_net=b,
        session_seed=seed,
        **kwargs,
    )


def play_session_through(session, pick=0):
    """Drive the human side with the first legal move until completion."""
    while session.status == "live":
        move = session.human_legal_moves()[pick]
        session.play_human_move(move)
    return session


class TestHcSession:
    def test_two_game_session_completes(self):
        session = play_session_through(scripted_session(games=2))
        assert session.status == "complete"
        assert len(session.records) == 2
        assert [r.game_index for r in session.records] == [0, 1]

    def test_networks_survive_across_games(self):
        session = scripted_session(games=2)
        w = session.nets[Color.WHITE]
        first_bytes = None
        while session.status == "live":
            step = session.play_human_move(session.human_legal_moves()[0])
            if step.finished_records and first_bytes is None:
                first_bytes = w.params_bytes()
        assert w.params_bytes() != first_bytes  # game 2 kept training the same net
        assert w.games_trained == 2

    def test_illegal_move_rejected_without_side_effects(self):
        session = scripted_session(games=1)
        state_before = session.state
        nets_before = (
            session.nets[Color.WHITE].params_bytes(),
            session.nets[Color.BLACK].params_bytes(),
        )
        bad = Move(MoveKind.STEP, None, session.human_legal_moves()[0].dest)
        bad = Move(MoveKind.STEP, bad.dest, bad.dest)  # not adjacent to itself
        with pytest.raises(IllegalMoveError):
            session.play_human_move(bad)
        assert session.state == state_before
        assert (
            session.nets[Color.WHITE].params_bytes(),
            session.nets[Color.BLACK].params_bytes(),
        ) == nets_before

    def test_out_of_turn_rejected(self):
        session = scripted_session(games=1, human=Color.WHITE)
        from baseraid.game import make_position

        # force a position where it is the computer's turn
        session.state = make_position(
            FAST, white=[(2, 2)], black=[(2, 3)], white_base=1, black_base=1,
            to_move=Color.BLACK,
        )
        with pytest.raises(ProtocolError):
            session.play_human_move(Move(MoveKind.STEP, (2, 2), (3, 2)))

    def test_computer_opens_when_human_is_black(self):
        session = scripted_session(games=1, human=Color.BLACK)
        assert session.state.ply == 1  # computer (white) already moved
        assert session.human_to_move

    def test_checkpoint_callback_fires_per_game(self):
        seen = []
        session = scripted_session(
            games=2, on_game_complete=lambda record: seen.append(record.game_index)
        )
        play_session_through(session)
        assert seen == [0, 1]

    def test_transcripts_replay_to_recorded_outcomes(self):
        session = play_session_through(scripted_session(games=2, seed=3))
        assert len(session.transcripts) == 2
        for transcript, record in zip(session.transcripts, session.records):
            state = initial_state(session.config)
            for move in transcript:
                state, _ = apply_move(state, move)
            assert state.status is not GameStatus.ONGOING
            assert state.ply == record.plies
            winner = {
                GameStatus.WHITE_WON: "white",
                GameStatus.BLACK_WON: "black",
                GameStatus.DRAW: "draw",
            }[state.status]
            assert winner == record.winner

    def test_abort_leaves_no_partial_record(self):
        session = scripted_session(games=3)
        first = session.human_legal_moves()[0]
        session.play_human_move(first)
        records_before = len(session.records)
        session.abort()
        assert session.status == "aborted"
        assert len(session.records) == records_before
        with pytest.raises(ProtocolError):
            session.play_human_move(first)

    def test_deterministic_given_script_and_seed(self):
        s1 = play_session_through(scripted_session(games=2, seed=4))
        s2 = play_session_through(scripted_session(games=2, seed=4))
        assert [record_key(r) for r in s1.records] == [record_key(r) for r in s2.records]
        assert (
            s1.nets[Color.WHITE].params_bytes() == s2.nets[Color.WHITE].params_bytes()
        )


class TestNumericFailure:
    def test_abort_preserves_partial_records(self):
        from baseraid.model import NumericFailureError

        spec = SessionSpec(config=FAST, games=10, run_seed=44)
        w, b = fresh_nets(FAST, seed=44)

        def sabotage(record):
            # corrupt a weight after the third game; the next update blows up
            if record.game_index == 2:
                w.b_o = float("nan")

        with pytest.raises(NumericFailureError) as exc:
            run_cc_session(spec, w, b, on_game=sabotage)
        assert len(exc.value.partial_records) == 3
        assert [r.game_index for r in exc.value.partial_records] == [0, 1, 2]


class TestProtocolViolations:
    def test_agent_returning_illegal_move_aborts(self):
        from baseraid.game import Coord
        from baseraid.model import TdParams
        from baseraid.runner import GameLearning, _drive_game

        def rogue(state):
            # an exit to a square nowhere near the base
            return Move(MoveKind.EXIT_BASE, None, Coord(4, 4))

        nets = {Color.WHITE: None, Color.BLACK: None}
        learning = GameLearning(
            FAST, nets, {Color.WHITE: False, Color.BLACK: False}, TdParams()
        )
        with pytest.raises(ProtocolError):
            _drive_game(FAST, {Color.WHITE: rogue, Color.BLACK: rogue}, learning, 0)


class TestFortyGameProtocol:
    def test_forty_consecutive_games_with_checkpoint_per_game(self):
        # the full teaching protocol: networks initialized once before game 1,
        # never reset mid-session, one record and one checkpoint per game
        checkpoints = []
        session = scripted_session(
            config=GameConfig(n=5, a=1, beta=3, max_plies=60),
            games=40,
            seed=17,
            on_game_complete=lambda record: checkpoints.append(record.game_index),
        )
        first_nets = (
            session.nets[Color.WHITE].params_bytes(),
            session.nets[Color.BLACK].params_bytes(),
        )
        play_session_through(session)
        assert session.status == "complete"
        assert len(session.records) == 40
        assert [r.game_index for r in session.records] == list(range(40))
        assert checkpoints == list(range(40))
        assert session.nets[Color.WHITE].games_trained == 40
        # the same network objects kept evolving throughout
        assert (
            session.nets[Color.WHITE].params_bytes(),
            session.nets[Color.BLACK].params_bytes(),
        ) != first_nets
