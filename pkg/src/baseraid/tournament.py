"""Player comparison and tournaments.

A "player" is a pair of networks, one per colour, trained as a unit.  Two
players X and Y are compared by two cross-pairing sessions in a fixed
order: first X's white against Y's black, then Y's white against X's black.
Each pairing is a full CC session with learning on.  X's collective score
is the games its two components won; the higher collective score wins the
match, ties go to the side whose wins took fewer moves on average, and a
further tie is declared a tie.

Three tournament modes build on that match:

* memory-less elimination: winners advance but always re-enter the next
  round with their original entry networks; whatever the match taught the
  networks is discarded.
* synthesis elimination: winners advance with their networks exactly as
  the match's two sessions left them, so the champion's networks blend
  every opponent met along the way.
* round robin: every unordered pair plays one memory-less match; standings
  order by match wins, then collective game wins.

Session seeds depend on the match seed and the participating networks'
roles, never on argument order, so swapping X and Y relabels a match
without changing any game.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .agents import AgentSpec
from .game import GameConfig
from .model import TdParams, ValueNetwork
from .runner import SessionSpec, aggregate_records, derive_seed, run_cc_session

MODE_MEMORYLESS = "memoryless"
MODE_SYNTHESIS = "synthesis"
MODE_ROUND_ROBIN = "roundrobin"
MODES = (MODE_MEMORYLESS, MODE_SYNTHESIS, MODE_ROUND_ROBIN)

COMPREHENSIVE_THRESHOLD = 0.65


@dataclass
class PlayerEntry:
    """One tournament entrant: an id plus its white and black networks."""

    id: str
    config: GameConfig
    white_net: ValueNetwork
    black_net: ValueNetwork

    def snapshot(self) -> "PlayerEntry":
        return PlayerEntry(
            self.id, self.config, self.white_net.copy(), self.black_net.copy()
        )


@dataclass
class PairingResult:
    """One CC session between a white and a black component."""

    white_id: str
    black_id: str
    games: int
    white_wins: int
    black_wins: int
    draws: int
    avg_winner_moves_white: Optional[float]
    avg_winner_moves_black: Optional[float]

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class MatchResult:
    """Both cross-pairings plus the collective verdict."""

    x_id: str
    y_id: str
    games_per_session: int
    first: PairingResult  # W_x vs B_y
    second: PairingResult  # W_y vs B_x
    x_collective: int
    y_collective: int
    winner_id: Optional[str]  # None on a dead tie

    def to_dict(self) -> dict:
        return {
            "x_id": self.x_id,
            "y_id": self.y_id,
            "games_per_session": self.games_per_session,
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "x_collective": self.x_collective,
            "y_collective": self.y_collective,
            "winner_id": self.winner_id,
        }


@dataclass(frozen=True)
class TournamentSpec:
    mode: str
    entrants: tuple
    games_per_session: int = 1000
    seed: int = 0
    td: TdParams = TdParams()
    agent: AgentSpec = AgentSpec()
    comprehensive_threshold: float = COMPREHENSIVE_THRESHOLD

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown tournament mode {self.mode!r}")
        if len(self.entrants) < 1:
            raise ValueError("a tournament needs entrants")
        ids = [e.id for e in self.entrants]
        if len(set(ids)) != len(ids):
            raise ValueError("entrant ids must be unique")


def _id_hash(entry_id: str) -> int:
    return int.from_bytes(hashlib.sha256(entry_id.encode()).digest()[:8], "big")


def _pairing_stats(white_id: str, black_id: str, records: list) -> PairingResult:
    agg = aggregate_records(records)
    return PairingResult(
        white_id=white_id,
        black_id=black_id,
        games=agg["games"],
        white_wins=agg["white_wins"],
        black_wins=agg["black_wins"],
        draws=agg["draws"],
        avg_winner_moves_white=agg["avg_winner_moves_white"],
        avg_winner_moves_black=agg["avg_winner_moves_black"],
    )


def decide_match(
    x_id: str,
    y_id: str,
    games: int,
    first: PairingResult,
    second: PairingResult,
) -> MatchResult:
    """Collective scoring over the two pairings; draws count for nobody."""
    x_collective = first.white_wins + second.black_wins
    y_collective = first.black_wins + second.white_wins

    def combined_avg(wins_first, avg_first, wins_second, avg_second):
        total = wins_first + wins_second
        if total == 0:
            return None
        moves = (wins_first * (avg_first or 0.0)) + (wins_second * (avg_second or 0.0))
        return moves / total

    if x_collective > y_collective:
        winner = x_id
    elif y_collective > x_collective:
        winner = y_id
    else:
        x_avg = combined_avg(
            first.white_wins, first.avg_winner_moves_white,
            second.black_wins, second.avg_winner_moves_black,
        )
        y_avg = combined_avg(
            first.black_wins, first.avg_winner_moves_black,
            second.white_wins, second.avg_winner_moves_white,
        )
        if x_avg is None or y_avg is None or x_avg == y_avg:
            winner = None
        else:
            winner = x_id if x_avg < y_avg else y_id
    return MatchResult(
        x_id=x_id,
        y_id=y_id,
        games_per_session=games,
        first=first,
        second=second,
        x_collective=x_collective,
        y_collective=y_collective,
        winner_id=winner,
    )


def compare_players(
    x: PlayerEntry,
    y: PlayerEntry,
    games: int,
    seed: int,
    evolve: bool = False,
    td: TdParams = TdParams(),
    agent: AgentSpec = AgentSpec(),
) -> tuple[MatchResult, Optional[dict]]:
    """Run the two cross-pairing sessions and score them collectively.

    The sessions run on copies of the entry networks.  With ``evolve`` the
    copies keep learning across the match and are returned so a synthesis
    tournament can advance them; otherwise the in-match learning is thrown
    away and only the result remains.
    """
    if x.config != y.config:
        raise ValueError("players must share one board configuration")
    w_x, b_x = x.white_net.copy(), x.black_net.copy()
    w_y, b_y = y.white_net.copy(), y.black_net.copy()

    def session(white_entry, white_net, black_entry, black_net):
        run_seed = derive_seed(seed, _id_hash(white_entry.id), _id_hash(black_entry.id))
        spec = SessionSpec(
            config=x.config,
            white=agent,
            black=agent,
            games=games,
            run_seed=run_seed,
            td=td,
        )
        result = run_cc_session(spec, white_net, black_net)
        return _pairing_stats(white_entry.id, black_entry.id, result.records)

    first = session(x, w_x, y, b_y)
    second = session(y, w_y, x, b_x)
    result = decide_match(x.id, y.id, games, first, second)
    evolved = None
    if evolve:
        evolved = {
            x.id: PlayerEntry(x.id, x.config, w_x, b_x),
            y.id: PlayerEntry(y.id, y.config, w_y, b_y),
        }
    return result, evolved


@dataclass
class BracketMatch:
    round_index: int
    result: MatchResult
    winner_id: str

    def to_dict(self) -> dict:
        return {
            "round_index": self.round_index,
            "result": self.result.to_dict(),
            "winner_id": self.winner_id,
        }


@dataclass
class TournamentResult:
    mode: str
    rounds: list  # list of rounds, each a list of BracketMatch
    byes: list  # ids granted a first-round bye
    champion: PlayerEntry
    standings: Optional[list] = None  # round robin only

    @property
    def matches(self) -> list:
        return [m for rnd in self.rounds for m in rnd]


def bracket_layout(count: int) -> tuple[int, int, int]:
    """(slot count, byes, rounds) of a single-elimination bracket."""
    slots = 1
    rounds = 0
    while slots < count:
        slots *= 2
        rounds += 1
    return slots, slots - count, rounds


def _match_seed(spec: TournamentSpec, round_index: int, position: int) -> int:
    return derive_seed(spec.seed, round_index, position)


def _resolve_tie(result: MatchResult, x: PlayerEntry, y: PlayerEntry, spec, rnd, pos) -> str:
    if result.winner_id is not None:
        return result.winner_id
    # dead ties are broken deterministically from the tournament seed
    return x.id if _match_seed(spec, rnd, pos) % 2 == 0 else y.id


def _run_elimination(
    spec: TournamentSpec,
    keep_evolved: bool,
    state_dir: Optional[str] = None,
    parallel: int = 1,
) -> TournamentResult:
    entries = {e.id: (e if keep_evolved else e.snapshot()) for e in spec.entrants}
    originals = {e.id: e for e in spec.entrants}
    slots, byes, total_rounds = bracket_layout(len(spec.entrants))
    order = [e.id for e in spec.entrants]
    bye_ids = order[:byes]
    field_ids = order[byes:]
    resume = _load_bracket_state(state_dir, spec)
    rounds: list = []

    def play_match(round_index, position, x_id, y_id):
        """One match; matches within a round touch disjoint networks, so they
        may run concurrently.  Results are applied in position order."""
        if keep_evolved:
            return compare_players(
                entries[x_id], entries[y_id], spec.games_per_session,
                _match_seed(spec, round_index, position),
                evolve=True, td=spec.td, agent=spec.agent,
            )
        # every match starts from the original entry snapshot
        result, _ = compare_players(
            originals[x_id].snapshot(), originals[y_id].snapshot(),
            spec.games_per_session,
            _match_seed(spec, round_index, position),
            evolve=False, td=spec.td, agent=spec.agent,
        )
        return result, None

    current = list(field_ids)
    carried = list(bye_ids)
    round_index = 0
    while len(current) + len(carried) > 1:
        this_round: list = []
        next_up: list = []
        pairs = [(current[i], current[i + 1]) for i in range(0, len(current) - 1, 2)]
        if len(current) % 2 == 1:
            carried.append(current[-1])
        pending = [
            (position, pair)
            for position, pair in enumerate(pairs)
            if resume.get((round_index, position)) is None
        ]
        if parallel > 1 and len(pending) > 1:
            with ThreadPoolExecutor(max_workers=parallel) as pool:
                played = dict(
                    zip(
                        (pos for pos, _ in pending),
                        pool.map(
                            lambda item: play_match(round_index, item[0], *item[1]),
                            pending,
                        ),
                    )
                )
        else:
            played = {
                pos: play_match(round_index, pos, *pair) for pos, pair in pending
            }
        for position, (x_id, y_id) in enumerate(pairs):
            known = resume.get((round_index, position))
            if known is not None:
                winner_id = known["winner_id"]
                result = _match_result_from_dict(known["result"])
                if keep_evolved:
                    entries[x_id] = _load_evolved(state_dir, round_index, position, x_id, originals[x_id])
                    entries[y_id] = _load_evolved(state_dir, round_index, position, y_id, originals[y_id])
            else:
                result, evolved = played[position]
                if evolved is not None:
                    entries[x_id] = evolved[x_id]
                    entries[y_id] = evolved[y_id]
                winner_id = _resolve_tie(result, entries[x_id], entries[y_id], spec, round_index, position)
                _save_bracket_match(
                    state_dir, spec, round_index, position, result, winner_id,
                    entries if keep_evolved else None, (x_id, y_id),
                )
            this_round.append(BracketMatch(round_index, result, winner_id))
            next_up.append(winner_id)
        rounds.append(this_round)
        current = carried + next_up
        carried = []
        round_index += 1

    champion_id = current[0] if current else carried[0]
    champion = entries[champion_id] if keep_evolved else originals[champion_id]
    return TournamentResult(
        mode=spec.mode, rounds=rounds, byes=list(bye_ids), champion=champion
    )


def run_memoryless_elimination(
    spec: TournamentSpec, state_dir: Optional[str] = None, parallel: int = 1
) -> TournamentResult:
    """Single elimination where advancing players always re-use their entry
    networks; in-match learning is discarded after each match."""
    if spec.mode != MODE_MEMORYLESS:
        raise ValueError("spec.mode must be 'memoryless'")
    return _run_elimination(spec, keep_evolved=False, state_dir=state_dir, parallel=parallel)


def run_synthesis_elimination(
    spec: TournamentSpec, state_dir: Optional[str] = None, parallel: int = 1
) -> TournamentResult:
    """Single elimination where winners advance with their match-evolved
    networks; matches in one round touch disjoint networks and may run
    concurrently.  The champion is the synthesized player."""
    if spec.mode != MODE_SYNTHESIS:
        raise ValueError("spec.mode must be 'synthesis'")
    return _run_elimination(spec, keep_evolved=True, state_dir=state_dir, parallel=parallel)


@dataclass
class StandingRow:
    id: str
    match_wins: int
    collective_wins: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RoundRobinResult:
    matches: list
    standings: list


def run_round_robin(
    spec: TournamentSpec, parallel: int = 1, state_dir: Optional[str] = None
) -> RoundRobinResult:
    """Every unordered pair plays one memory-less match."""
    if spec.mode != MODE_ROUND_ROBIN:
        raise ValueError("spec.mode must be 'roundrobin'")
    entrants = list(spec.entrants)
    pairs = [
        (i, j) for i in range(len(entrants)) for j in range(i + 1, len(entrants))
    ]

    def play(position_pair):
        position, (i, j) = position_pair
        x, y = entrants[i].snapshot(), entrants[j].snapshot()
        result, _ = compare_players(
            x, y, spec.games_per_session, _match_seed(spec, 0, position),
            evolve=False, td=spec.td, agent=spec.agent,
        )
        return result

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(play, enumerate(pairs)))
    else:
        results = [play(item) for item in enumerate(pairs)]

    wins: dict = {e.id: 0 for e in entrants}
    collective: dict = {e.id: 0 for e in entrants}
    for result in results:
        collective[result.x_id] += result.x_collective
        collective[result.y_id] += result.y_collective
        if result.winner_id is not None:
            wins[result.winner_id] += 1
    standings = sorted(
        (StandingRow(e.id, wins[e.id], collective[e.id]) for e in entrants),
        key=lambda row: (-row.match_wins, -row.collective_wins, row.id),
    )
    return RoundRobinResult(matches=results, standings=standings)


# --- bracket persistence for resumption -------------------------------------


def _bracket_state_path(state_dir: str) -> str:
    return os.path.join(state_dir, "bracket.json")


def _spec_fingerprint(spec: TournamentSpec) -> str:
    payload = {
        "mode": spec.mode,
        "entrants": [e.id for e in spec.entrants],
        "games_per_session": spec.games_per_session,
        "seed": spec.seed,
    }
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()


def _load_bracket_state(state_dir: Optional[str], spec: TournamentSpec) -> dict:
    if state_dir is None:
        return {}
    path = _bracket_state_path(state_dir)
    if not os.path.exists(path):
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("fingerprint") != _spec_fingerprint(spec):
        return {}
    return {
        (m["round_index"], m["position"]): m for m in data.get("matches", [])
    }


def _save_bracket_match(
    state_dir: Optional[str],
    spec: TournamentSpec,
    round_index: int,
    position: int,
    result: MatchResult,
    winner_id: str,
    evolved_entries: Optional[dict],
    pair_ids: tuple,
) -> None:
    if state_dir is None:
        return
    from .store import save_model  # local import: store depends on nothing here

    os.makedirs(state_dir, exist_ok=True)
    path = _bracket_state_path(state_dir)
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if data.get("fingerprint") != _spec_fingerprint(spec):
            data = {"fingerprint": _spec_fingerprint(spec), "matches": []}
    else:
        data = {"fingerprint": _spec_fingerprint(spec), "matches": []}
    data["matches"].append(
        {
            "round_index": round_index,
            "position": position,
            "winner_id": winner_id,
            "result": result.to_dict(),
        }
    )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1)
    if evolved_entries is not None:
        for entry_id in pair_ids:
            entry = evolved_entries[entry_id]
            for color_name, net in (("white", entry.white_net), ("black", entry.black_net)):
                save_model(
                    net,
                    entry.config,
                    os.path.join(
                        state_dir, f"r{round_index}_m{position}_{entry_id}.{color_name}.json"
                    ),
                )


def _load_evolved(
    state_dir: str, round_index: int, position: int, entry_id: str, original: PlayerEntry
) -> PlayerEntry:
    from .store import load_model

    nets = {}
    for color_name in ("white", "black"):
        path = os.path.join(
            state_dir, f"r{round_index}_m{position}_{entry_id}.{color_name}.json"
        )
        nets[color_name] = load_model(path).net
    return PlayerEntry(entry_id, original.config, nets["white"], nets["black"])


def _match_result_from_dict(d: dict) -> MatchResult:
    return MatchResult(
        x_id=d["x_id"],
        y_id=d["y_id"],
        games_per_session=d["games_per_session"],
        first=PairingResult(**d["first"]),
        second=PairingResult(**d["second"]),
        x_collective=d["x_collective"],
        y_collective=d["y_collective"],
        winner_id=d["winner_id"],
    )


# --- reporting ---------------------------------------------------------------


@dataclass
class ReportRow:
    """The eight-cell comparison schema: per pairing the games won by each
    side and the average move count of each side's wins."""

    match_label: str
    pairing: str
    white_wins: int
    black_wins: int
    draws: int
    avg_moves_white: Optional[float]
    avg_moves_black: Optional[float]
    comprehensive: bool


def summarize(
    results: list, comprehensive_threshold: float = COMPREHENSIVE_THRESHOLD
) -> list:
    """Report rows for a list of MatchResults: two rows per match, flagged
    comprehensive when the winner's collective share clears the threshold."""
    rows: list = []
    for result in results:
        total_games = 2 * result.games_per_session
        winner_score = max(result.x_collective, result.y_collective)
        comprehensive = (
            result.winner_id is not None
            and total_games > 0
            and winner_score / total_games >= comprehensive_threshold
        )
        label = f"{result.x_id} vs {result.y_id}"
        for pairing in (result.first, result.second):
            rows.append(
                ReportRow(
                    match_label=label,
                    pairing=f"W_{pairing.white_id} vs B_{pairing.black_id}",
                    white_wins=pairing.white_wins,
                    black_wins=pairing.black_wins,
                    draws=pairing.draws,
                    avg_moves_white=pairing.avg_winner_moves_white,
                    avg_moves_black=pairing.avg_winner_moves_black,
                    comprehensive=comprehensive,
                )
            )
    return rows


def render_report(rows: list) -> str:
    """Aligned text table over the eight-cell schema."""
    def fmt(value):
        return "-" if value is None else (f"{value:.0f}" if isinstance(value, float) else str(value))

    header = (
        f"{'pairing':<28} {'won(W)':>7} {'won(B)':>7} {'draws':>6} "
        f"{'avg moves(W)':>13} {'avg moves(B)':>13}  note"
    )
    lines = [header, "-" * len(header)]
    last_label = None
    for row in rows:
        if row.match_label != last_label:
            lines.append(f"[{row.match_label}]")
            last_label = row.match_label
        note = "comprehensive" if row.comprehensive else ""
        lines.append(
            f"{row.pairing:<28} {row.white_wins:>7} {row.black_wins:>7} {row.draws:>6} "
            f"{fmt(row.avg_moves_white):>13} {fmt(row.avg_moves_black):>13}  {note}"
        )
    return "\n".join(lines)


def report_to_csv(rows: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        [
            "match",
            "pairing",
            "white_wins",
            "black_wins",
            "draws",
            "avg_moves_white",
            "avg_moves_black",
            "comprehensive",
        ]
    )
    for row in rows:
        writer.writerow(
            [
                row.match_label,
                row.pairing,
                row.white_wins,
                row.black_wins,
                row.draws,
                "" if row.avg_moves_white is None else row.avg_moves_white,
                "" if row.avg_moves_black is None else row.avg_moves_black,
                row.comprehensive,
            ]
        )
    return buf.getvalue()
