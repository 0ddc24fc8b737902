"""Chess engine whose evaluation and search parameters are tuned by genetic algorithms."""

__version__ = "0.1.0"

from .board import Move, Position, legal_moves, parse_fen, starting_position, to_fen  # noqa: E402
from .evaluation import REFERENCE_PARAMS, EvalParams, evaluate  # noqa: E402
from .genome import Chromosome, GAConfig, Organism  # noqa: E402
from .search import PLAIN_PARAMS, TABLE2_PARAMS, Searcher, SearchLimits, SearchParams, search  # noqa: E402
from .arena import Engine, TimeControl, expected_score, play_game, play_match, rating_difference  # noqa: E402
from .estimators import CoevolutionTrainer, MoveMatchEvolver, SearchParamEvolver  # noqa: E402

__all__ = [
    "Move", "Position", "legal_moves", "parse_fen", "starting_position", "to_fen",
    "REFERENCE_PARAMS", "EvalParams", "evaluate",
    "Chromosome", "GAConfig", "Organism",
    "PLAIN_PARAMS", "TABLE2_PARAMS", "Searcher", "SearchLimits", "SearchParams", "search",
    "Engine", "TimeControl", "expected_score", "play_game", "play_match", "rating_difference",
    "CoevolutionTrainer", "MoveMatchEvolver", "SearchParamEvolver",
]
