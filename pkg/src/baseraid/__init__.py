"""Base Raid workbench: game rules, TD-trained value networks, scripted
tutors, tournaments, an experiment store, and a human-teaching service.

The usual entry points:

    from baseraid.game import GameConfig, initial_state, legal_moves, apply_move
    from baseraid.model import init_network, TdParams
    from baseraid.runner import SessionSpec, run_cc_session, HcSession
    from baseraid.tournament import compare_players, TournamentSpec
    from baseraid.store import save_model, load_model, ExperimentStore
"""

__version__ = "0.1.0"
