"""Generalized sabotage games: a traveler against budget-limited mobile saboteurs."""
from .arena import REACH, SAFE, KnowledgeArena, KnowledgeVertex, build_arena, buchi_target
from .errors import (ArenaTooLarge, IllegalMove, ParseError, SabotageError, SpaceBoundExceeded,
                     StrategyIncomplete, UnboundedBudget, UnsupportedSemantics, ValidationError)
from .model import (ADJACENT, BUCHI, FULL, INF, NONE, REACHABILITY, Configuration, Saboteur,
                    SabotageGame, bundled, initial_configuration, legal_saboteur_moves,
                    legal_traveler_moves, load_scenario, make_game, observe, save_scenario, step)
from .solver import (Solution, Strategy, oracle_minimax, replay, solve, solve_buchi,
                     solve_local, solve_reachability)
from .subsetgame import build_saboteur_arena, solve_dense, winner_with_initial_marks

__version__ = "0.1.0"
