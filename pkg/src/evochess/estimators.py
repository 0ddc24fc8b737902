"""scikit-learn style wrappers around the three learning phases.

The estimators follow the usual conventions: constructor arguments are
stored unchanged, learned state ends in an underscore, ``fit`` returns
``self``.  ``X`` holds positions (``Position`` objects or FEN strings) or
test cases (``TestCase`` objects or EPD lines); ``y`` holds moves.

>>> est = MoveMatchEvolver(generations=5, random_state=1).fit(positions, moves)  # doctest: +SKIP
>>> est.score(holdout_positions, holdout_moves)  # doctest: +SKIP
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .arena import Engine, TimeControl
from .board import legal_moves
from .evaluation import REFERENCE_PARAMS
from .evolve import (
    ArenaSettings, FeatureTensor, TrainingSet, run_coevolution, run_eval_evolution,
    run_search_evolution, solve_suite,
)
from .genome import Organism, encode_eval
from .search import PLAIN_PARAMS
from .validation import check_eval_params, check_ga_config, check_moves, check_positions, check_suite


class MoveMatchEvolver(BaseEstimator):
    """Evolve evaluation weights so that a 1-ply search picks the recorded moves.

    After ``fit``, ``params_`` holds the best weights, ``report_`` the
    per-generation log and ``train_score_`` the match rate on the
    training data.
    """

    def __init__(self, population_size=100, crossover_rate=0.75, mutation_rate=0.005,
                 generations=200, selection="proportional", elitism_count=1, random_state=None):
        self.population_size = population_size
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.generations = generations
        self.selection = selection
        self.elitism_count = elitism_count
        self.random_state = random_state

    def fit(self, X, y):
        config = check_ga_config(self)
        positions = check_positions(X)
        training = TrainingSet(positions, check_moves(positions, y), {"source": "fit"})
        self.report_ = run_eval_evolution(training, config)
        self.params_ = self.report_.best_organism.decoded
        self.train_score_ = self._match_rate(training.tensor, self.params_)
        self.n_features_in_ = len(self.params_)
        return self

    def predict(self, X):
        """The 1-ply move chosen in each position (array of ``Move``)."""
        check_is_fitted(self, "params_")
        positions = check_positions(X)
        tensor = FeatureTensor(positions, [_first_legal(p) for p in positions])
        idx = tensor.choices(self.params_.weights)
        return _move_array(tensor.legal[i][j] for i, j in enumerate(idx))

    def score(self, X, y):
        """Fraction of positions where the 1-ply choice equals ``y``."""
        check_is_fitted(self, "params_")
        positions = check_positions(X)
        return self._match_rate(FeatureTensor(positions, check_moves(positions, y)), self.params_)

    @staticmethod
    def _match_rate(tensor, params) -> float:
        return float(tensor.match_counts(params.weights)) / len(tensor.target)


class CoevolutionTrainer(BaseEstimator):
    """Coevolve a population of evaluation weight sets by round-robin play.

    ``fit(X)`` takes the seed weight sets (``EvalParams`` or 35-value
    sequences); the population size equals ``len(X)``.  ``book`` is a
    list of openings as returned by :func:`evochess.arena.read_book` and
    must cover every game of a generation.
    """

    def __init__(self, book=None, nodes=300, depth=None, time_base=None, time_increment=0.0,
                 games_per_pair=4, max_plies=None, crossover_rate=0.75, mutation_rate=0.005,
                 generations=50, selection="rank", elitism_count=1, random_state=None, n_jobs=1):
        self.book = book
        self.nodes = nodes
        self.depth = depth
        self.time_base = time_base
        self.time_increment = time_increment
        self.games_per_pair = games_per_pair
        self.max_plies = max_plies
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.generations = generations
        self.selection = selection
        self.elitism_count = elitism_count
        self.random_state = random_state
        self.n_jobs = n_jobs

    @property
    def population_size(self):
        return getattr(self, "_n_seeds", 2)

    def fit(self, X, y=None):
        if not self.book:
            raise ValueError("an opening book is required")
        seeds = [check_eval_params(p, f"X[{i}]") for i, p in enumerate(X)]
        if len(seeds) < 2:
            raise ValueError("coevolution needs at least two seed weight sets")
        self._n_seeds = len(seeds)
        config = check_ga_config(self)
        tc = TimeControl(self.time_base, self.time_increment) if self.time_base else None
        settings = ArenaSettings(book=list(self.book), nodes=self.nodes, depth=self.depth, time_control=tc,
                                 games_per_pair=self.games_per_pair, max_plies=self.max_plies,
                                 jobs=self.n_jobs)
        self.report_ = run_coevolution([Organism(encode_eval(p)) for p in seeds], settings, config)
        self.params_ = self.report_.best_organism.decoded
        return self

    def predict(self, X):
        """Moves the best organism plays in each position under the node/depth limit."""
        check_is_fitted(self, "params_")
        engine = Engine(self.params_, PLAIN_PARAMS, "best", nodes=self.nodes or None,
                        depth=self.depth or (None if self.nodes else 3))
        return _move_array(engine.choose(p).best_move for p in check_positions(X))

    def score(self, X, y):
        """Fraction of positions where :meth:`predict` agrees with ``y``."""
        positions = check_positions(X)
        moves = check_moves(positions, y)
        got = self.predict(positions)
        return float(np.mean([g.same_as(m) for g, m in zip(got, moves)]))


class SearchParamEvolver(BaseEstimator):
    """Evolve selective-search parameters to solve a test suite in few nodes.

    ``fit(X)`` takes the suite; ``params_`` is the best record found,
    ``baseline_nodes_`` the all-off total and ``nodes_`` the best total.
    ``score`` is one minus the capped node total as a fraction of the
    budget, so higher is better and an all-unsolved suite scores 0.
    """

    def __init__(self, eval_params=REFERENCE_PARAMS, node_cap=3000, population_size=10,
                 crossover_rate=0.75, mutation_rate=0.05, generations=50, selection="proportional",
                 elitism_count=1, include_baseline=True, random_state=None, n_jobs=1):
        self.eval_params = eval_params
        self.node_cap = node_cap
        self.population_size = population_size
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.generations = generations
        self.selection = selection
        self.elitism_count = elitism_count
        self.include_baseline = include_baseline
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        if int(self.node_cap) <= 0:
            raise ValueError("node_cap must be positive")
        suite = check_suite(X)
        config = check_ga_config(self)
        ep = check_eval_params(self.eval_params)
        self.report_ = run_search_evolution(suite, ep, int(self.node_cap), config,
                                            include_baseline=self.include_baseline, jobs=self.n_jobs)
        self.params_ = self.report_.best_organism.decoded
        self.nodes_ = self.report_.fitness.total(self.params_)
        self.baseline_nodes_ = self.report_.fitness.total(PLAIN_PARAMS)
        return self

    def predict(self, X):
        """Nodes needed per position (``node_cap`` when unsolved)."""
        check_is_fitted(self, "params_")
        suite = check_suite(X)
        rows = solve_suite(suite, check_eval_params(self.eval_params), self.params_, int(self.node_cap))
        return np.array([n for _, _, n in rows], dtype=np.int64)

    def score(self, X, y=None):
        nodes = self.predict(X)
        return 1.0 - float(nodes.sum()) / (len(nodes) * int(self.node_cap))


def _first_legal(pos):
    moves = legal_moves(pos)
    if not moves:
        raise ValueError("position has no legal moves")
    return moves[0]


def _move_array(moves) -> np.ndarray:
    # np.array would unpack the Move tuples into a 2-D array
    moves = list(moves)
    out = np.empty(len(moves), dtype=object)
    for i, m in enumerate(moves):
        out[i] = m
    return out
