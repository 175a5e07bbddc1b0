"""The minimax tutor and the pendulum effect.

A scripted fixed-depth searcher plays white and crushes the learning black
player, game after game.  But black is learning from the beatings, and the
white network learns passively from the tutor's own moves.  When the tutor
steps aside and the two networks play each other, black comes out on top:
the tutor's pressure taught black far more than it taught white.
"""

from baseraid.agents import AgentSpec
from baseraid.game import Color, GameConfig
from baseraid.model import TdParams, init_network
from baseraid.runner import SessionSpec, run_cc_session

config = GameConfig(n=5, a=1, beta=3, max_plies=80)
white = init_network(config, Color.WHITE, seed=11)
black = init_network(config, Color.BLACK, seed=12)

print("stage 1: a depth-3 minimax tutor plays white for 150 games")
td = TdParams(learning_rate=0.05)  # hot rate: this is a quick small-board demo
tutor_spec = SessionSpec(
    config=config,
    white=AgentSpec(kind="minimax", lookahead=3),
    black=AgentSpec(),  # the learning player
    games=150,
    run_seed=21,
    td=td,
)
tutored = run_cc_session(tutor_spec, white, black)
s = tutored.stats
print(f"  tutor wins {s['white_wins']}/{s['games']} "
      f"(avg {s['avg_winner_moves_white']} moves per win)\n")

print("stage 2: the tutor leaves; the two learned networks play 100 games")
free_spec = SessionSpec(config=config, games=100, run_seed=22, td=td)
free = run_cc_session(free_spec, white, black)
s = free.stats
decided = s["white_wins"] + s["black_wins"]
print(f"  white {s['white_wins']} / black {s['black_wins']} / draws {s['draws']}")
if decided:
    print(f"  black's share of decided games: {s['black_wins'] / decided:.2f}")
print("\nThe pendulum: training black by beating it leaves black dominant "
      "once the tutor is gone.")
