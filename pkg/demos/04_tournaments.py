"""Comparing players and running tournaments.

A "player" is a white/black network pair trained as a unit.  Players are
compared by two cross-pairing sessions (my white against your black, then
the reverse) and the collective game count decides the match.  On top of
that sit three tournament modes: memory-less elimination (winners keep their
original networks), synthesis elimination (winners carry their match-evolved
networks forward), and a round robin.
"""

from baseraid.game import Color, GameConfig
from baseraid.model import init_network
from baseraid.runner import derive_seed
from baseraid.tournament import (
    PlayerEntry,
    TournamentSpec,
    compare_players,
    render_report,
    run_memoryless_elimination,
    run_round_robin,
    run_synthesis_elimination,
    summarize,
)

config = GameConfig(n=5, a=1, beta=3, max_plies=80)


def player(name, seed):
    return PlayerEntry(
        id=name,
        config=config,
        white_net=init_network(config, Color.WHITE, seed=derive_seed(seed, 1)),
        black_net=init_network(config, Color.BLACK, seed=derive_seed(seed, 2)),
    )


print("one match: two cross-pairing sessions, collective score decides")
result, _ = compare_players(player("alpha", 1), player("beta", 2), games=30, seed=5)
print(render_report(summarize([result])))
print(f"collective: alpha {result.x_collective}, beta {result.y_collective} "
      f"-> winner {result.winner_id or 'tie'}\n")

entrants = tuple(player(name, seed) for seed, name in enumerate(["a", "b", "c", "d", "e"], 1))

print("memory-less elimination (5 entrants -> 3 byes, 3 rounds):")
spec = TournamentSpec(mode="memoryless", entrants=entrants, games_per_session=10, seed=9)
memoryless = run_memoryless_elimination(spec)
print(f"  byes: {memoryless.byes}")
for i, rnd in enumerate(memoryless.rounds):
    games = [f"{m.result.x_id} vs {m.result.y_id} -> {m.winner_id}" for m in rnd]
    print(f"  round {i}: {', '.join(games)}")
champ = memoryless.champion
same = champ.white_net.params_bytes() == entrants[[e.id for e in entrants].index(champ.id)].white_net.params_bytes()
print(f"  champion {champ.id}; networks identical to its entry snapshot: {same}\n")

print("synthesis elimination: the champion carries every match's learning")
spec = TournamentSpec(mode="synthesis", entrants=entrants, games_per_session=10, seed=9)
synthesis = run_synthesis_elimination(spec)
champ = synthesis.champion
changed = champ.white_net.params_bytes() != entrants[[e.id for e in entrants].index(champ.id)].white_net.params_bytes()
print(f"  champion {champ.id}; networks evolved during the bracket: {changed}\n")

print("round robin (every pair meets once):")
spec = TournamentSpec(mode="roundrobin", entrants=entrants[:3], games_per_session=10, seed=9)
rr = run_round_robin(spec)
for row in rr.standings:
    print(f"  {row.id}: {row.match_wins} match wins, {row.collective_wins} game wins")
