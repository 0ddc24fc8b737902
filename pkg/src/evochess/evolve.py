"""The three learning phases.

1. Evaluation weights evolve to agree with strong players' move choices,
   using a 1-ply search (static evaluation after each legal move).
2. The winners of several phase-1 runs coevolve by playing each other.
3. Selective-search parameters evolve to solve a tactical suite with as few
   nodes as possible.

Phase-1 fitness is computed from precomputed feature tensors: for each
training position the feature vectors of all positions reachable in one
move are stored once, so scoring an organism is a single matrix product.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arena import Engine, GameRecord, run_games
from .board import Move, Position, apply_move, legal_moves
from .evaluation import N_PARAMS, EvalParams, Evaluator, eval_features
from .genome import (
    EVAL, SEARCH, Checkpoint, Chromosome, GAConfig, Organism, assign_fitness, best_of,
    encode_search, make_rng, next_generation, random_population, rng_from_state,
)
from .notation import Game
from .search import (
    EXTENSION_FIELDS, MAX_EXTENSION, PLAIN_PARAMS, NodeCache, Searcher, SearchParams,
    search_nodes_to_solution, solve_case,
)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# training data

@dataclass
class TrainingSet:
    """Positions paired with the move played by the eventual winner."""

    positions: list[Position]
    moves: list[Move]
    provenance: dict = field(default_factory=dict)
    _tensor: "FeatureTensor | None" = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.positions) != len(self.moves):
            raise ValueError("positions and moves differ in length")
        for i, (p, m) in enumerate(zip(self.positions, self.moves)):
            if m not in legal_moves(p):
                raise ValueError(f"pair {i}: move {m.uci()} is not legal")

    def __len__(self):
        return len(self.positions)

    def keys(self) -> set[int]:
        return {p.key for p in self.positions}

    @property
    def tensor(self) -> "FeatureTensor":
        if self._tensor is None:
            self._tensor = FeatureTensor(self.positions, self.moves)
        return self._tensor


def _eligible_plies(game: Game, skip_plies: int, min_remaining: int) -> list[int]:
    winner = game.winner
    if not winner:
        return []
    n = len(game.moves)
    side = game.initial.turn
    out = []
    for i in range(skip_plies, n - min_remaining):
        mover = side if i % 2 == 0 else -side
        if mover == winner:
            out.append(i)
    return out


def build_training_sets(games: Sequence[Game], sizes: Sequence[int], rng: np.random.Generator,
                        skip_plies: int = 12, min_remaining: int = 10) -> list[TrainingSet]:
    """Draw disjoint training sets, one position from each chosen game.

    Only decisive games take part and the side to move is always the
    eventual winner.  The first ``skip_plies`` plies and the last
    ``min_remaining`` plies of each game are never sampled.  Games are drawn
    without replacement across all requested sets, so the sets share no game
    (and, apart from transpositions, no position; a position seen in an
    earlier set is skipped).
    """
    eligible = [(gi, plies) for gi, g in enumerate(games)
                if (plies := _eligible_plies(g, skip_plies, min_remaining))]
    total = sum(sizes)
    if total > len(eligible):
        raise ValueError(f"need {total} decisive games with sampleable positions, corpus has {len(eligible)}")
    order = rng.permutation(len(eligible))
    sets = []
    seen: set[int] = set()
    cursor = 0
    for size in sizes:
        positions, moves, sources = [], [], []
        while len(positions) < size:
            if cursor >= len(order):
                raise ValueError("ran out of games while avoiding repeated positions")
            gi, plies = eligible[order[cursor]]
            cursor += 1
            ply = plies[int(rng.integers(len(plies)))]
            game = games[gi]
            pos = game.initial
            for m in game.moves[:ply]:
                pos = apply_move(pos, m)
            if pos.key in seen:
                continue
            seen.add(pos.key)
            positions.append(pos)
            moves.append(game.moves[ply])
            sources.append((gi, ply))
        sets.append(TrainingSet(positions, moves, {
            "games": len(games), "skip_plies": skip_plies, "min_remaining": min_remaining,
            "sources": sources}))
    return sets


def build_training_set(games: Sequence[Game], n: int, rng: np.random.Generator, **kw) -> TrainingSet:
    return build_training_sets(games, [n], rng, **kw)[0]


# ---------------------------------------------------------------------------
# phase 1: move matching

class FeatureTensor:
    """Mover-perspective feature vectors of every 1-ply successor.

    ``features[i, j]`` belongs to legal move ``j`` (generation order) of
    position ``i``; rows past the move count are padding.  ``target[i]`` is
    the index of the recorded move.
    """

    def __init__(self, positions: Sequence[Position], moves: Sequence[Move]):
        n = len(positions)
        legal = [legal_moves(p) for p in positions]
        width = max((len(m) for m in legal), default=1)
        self.features = np.zeros((n, width, N_PARAMS), dtype=np.int64)
        self.mask = np.zeros((n, width), dtype=bool)
        self.target = np.zeros(n, dtype=np.int64)
        for i, (p, ms, best) in enumerate(zip(positions, legal, moves)):
            for j, m in enumerate(ms):
                # eval_features is white-minus-black; scale to the mover's view
                self.features[i, j] = np.asarray(eval_features(apply_move(p, m)), dtype=np.int64) * p.turn
            self.mask[i, :len(ms)] = True
            self.target[i] = ms.index(best)
        self.legal = legal

    def choices(self, weights: np.ndarray) -> np.ndarray:
        """Index of the 1-ply choice per position, for one or many weight vectors.

        ``weights`` has shape ``(35,)`` or ``(k, 35)``; the result has shape
        ``(n,)`` or ``(k, n)``.  Ties go to the earliest move.
        """
        w = np.asarray(weights, dtype=np.int64)
        single = w.ndim == 1
        w2 = w[None, :] if single else w
        scores = np.einsum("nmf,kf->knm", self.features, w2)
        scores = np.where(self.mask[None], scores, np.iinfo(np.int64).min)
        idx = scores.argmax(axis=2)
        return idx[0] if single else idx

    def match_counts(self, weights: np.ndarray) -> np.ndarray:
        idx = self.choices(weights)
        return (idx == self.target).sum(axis=-1)


def move_match_count(params: EvalParams, training: TrainingSet) -> int:
    return int(training.tensor.match_counts(params.weights))


def move_match_fitness(chromosome: Chromosome | EvalParams, training: TrainingSet) -> int:
    """Square of the number of positions whose recorded move the organism picks."""
    params = chromosome.decode() if isinstance(chromosome, Chromosome) else chromosome
    c = move_match_count(params, training)
    return c * c


def holdout_match_rate(organism: Organism | EvalParams, holdout: TrainingSet,
                       training: TrainingSet | None = None) -> float:
    """Match rate on positions unseen in training.

    Raises ``ValueError`` if ``training`` is given and shares a position
    with ``holdout``.
    """
    if len(holdout) == 0:
        raise ValueError("empty holdout set")
    if training is not None and training.keys() & holdout.keys():
        raise ValueError("holdout set overlaps the training set")
    params = organism.decoded if isinstance(organism, Organism) else organism
    return move_match_count(params, holdout) / len(holdout)


def one_ply_move(pos: Position, params: EvalParams) -> Move:
    """The 1-ply choice: best static score after the move, first on ties."""
    moves = legal_moves(pos)
    if not moves:
        raise ValueError("no legal moves")
    ev = Evaluator(params)
    best, best_score = None, None
    for m in moves:
        s = -ev(apply_move(pos, m))
        if best_score is None or s > best_score:
            best, best_score = m, s
    return best


# ---------------------------------------------------------------------------
# generic GA driver

@dataclass
class PhaseReport:
    """Per-generation statistics of one evolutionary run.

    ``best`` and ``mean`` are in selection-fitness units; ``raw_best`` holds
    a phase-specific raw figure (match count, total nodes or points) for the
    best organism and ``raw_mean`` its population mean.
    """

    kind: str
    best: list[float] = field(default_factory=list)
    mean: list[float] = field(default_factory=list)
    raw_best: list[float] = field(default_factory=list)
    raw_mean: list[float] = field(default_factory=list)
    best_organism: Organism | None = None
    population: list[Organism] = field(default_factory=list)
    wall_clock: float = 0.0
    games_per_generation: list[int] = field(default_factory=list)

    def log_lines(self) -> list[str]:
        return [f"{g} {b:.10g} {m:.10g} {r:.10g} {rm:.10g}" for g, (b, m, r, rm) in
                enumerate(zip(self.best, self.mean, self.raw_best, self.raw_mean))]

    def log_text(self, header: Sequence[str] = ()) -> str:
        lines = [f"# {h}" for h in header] + ["# generation best mean raw_best raw_mean"] + self.log_lines()
        return "\n".join(lines) + "\n"


CheckpointFn = Callable[[Checkpoint], None]


def run_ga(kind: str, config: GAConfig, fitness_fn, raw_fn=None, initial=None,
           resume: Checkpoint | None = None, checkpoint_fn: CheckpointFn | None = None,
           on_generation=None) -> PhaseReport:
    """Evolve a population for ``config.generations`` generations.

    ``fitness_fn`` maps a list of new organisms to selection fitness values.
    ``initial`` is a population or a callable building one from the run's
    generator (random chromosomes by default).
    ``raw_fn(organism)`` gives the figure logged as ``raw_best`` (defaults to
    the fitness).  A checkpoint is emitted after every generation and a run
    resumed from one follows the same trajectory as an uninterrupted run.
    """
    start = time.monotonic()
    raw_fn = raw_fn or (lambda o: o.fitness)
    report = PhaseReport(kind)
    if resume is not None:
        if resume.kind != kind:
            raise ValueError(f"checkpoint holds {resume.kind} genomes, expected {kind}")
        rng = rng_from_state(resume.rng_state)
        pop = resume.population
        gen = resume.generation
        hist = resume.extra.get("history", [])
        _restore_history(report, hist)
        assign_fitness(pop, fitness_fn)
    else:
        rng = make_rng(config.random_seed)
        if initial is None:
            pop = random_population(kind, config.population_size, rng)
        elif callable(initial):
            pop = initial(rng)
        else:
            pop = list(initial)
        if len(pop) != config.population_size:
            raise ValueError(f"initial population has {len(pop)} organisms, config says {config.population_size}")
        gen = 0
        assign_fitness(pop, fitness_fn)
        _record(report, pop, raw_fn)
        _emit(checkpoint_fn, kind, gen, pop, rng, config, report)
        if on_generation:
            on_generation(gen, report)
    while gen < config.generations:
        pop = next_generation(pop, config, fitness_fn, rng)
        gen += 1
        _record(report, pop, raw_fn)
        _emit(checkpoint_fn, kind, gen, pop, rng, config, report)
        if on_generation:
            on_generation(gen, report)
    report.population = pop
    report.best_organism = best_of(pop)
    report.wall_clock = time.monotonic() - start
    return report


def _restore_history(report: PhaseReport, history) -> None:
    for b, m, r, rm in history:
        report.best.append(b)
        report.mean.append(m)
        report.raw_best.append(r)
        report.raw_mean.append(rm)


def _record(report: PhaseReport, pop: list[Organism], raw_fn) -> None:
    fit = [o.fitness for o in pop]
    b = best_of(pop)
    report.best.append(float(b.fitness))
    report.mean.append(float(np.mean(fit)))
    report.raw_best.append(float(raw_fn(b)))
    report.raw_mean.append(float(np.mean([raw_fn(o) for o in pop])))


def _emit(checkpoint_fn, kind, gen, pop, rng, config, report):
    if checkpoint_fn is None:
        return
    history = [list(t) for t in zip(report.best, report.mean, report.raw_best, report.raw_mean)]
    checkpoint_fn(Checkpoint(kind, gen, pop, rng.bit_generator.state, config, config.random_seed,
                             {"history": history}))


# ---------------------------------------------------------------------------
# phase 1 driver

PHASE1_CONFIG = GAConfig(population_size=100, crossover_rate=0.75, mutation_rate=0.005,
                         generations=200, selection="proportional", elitism_count=1)


def run_eval_evolution(training: TrainingSet, config: GAConfig = PHASE1_CONFIG, **kw) -> PhaseReport:
    """Phase 1: fitness is the squared move-match count on ``training``."""
    tensor = training.tensor

    def fitness(orgs):
        counts = tensor.match_counts(np.stack([o.decoded.weights for o in orgs]))
        return [float(c) ** 2 for c in counts]

    return run_ga(EVAL, config, fitness, raw_fn=lambda o: round(o.fitness ** 0.5), **kw)


# ---------------------------------------------------------------------------
# phase 2: coevolution

COEVOLUTION_CONFIG = GAConfig(population_size=10, crossover_rate=0.75, mutation_rate=0.005,
                              generations=50, selection="rank", elitism_count=1)


@dataclass
class ArenaSettings:
    """How coevolution games are played.

    ``nodes`` / ``depth`` give reproducible games; ``time_control`` plays on
    the clock instead.  ``games_per_pair`` must be even (colors balance).
    """

    book: list
    nodes: int | None = None
    depth: int | None = None
    time_control: object = None
    games_per_pair: int = 4
    max_plies: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.games_per_pair <= 0 or self.games_per_pair % 2:
            raise ValueError("games_per_pair must be a positive even number")
        if self.nodes is None and self.depth is None and self.time_control is None:
            raise ValueError("arena settings need a node, depth or time limit")


def round_robin(population: Sequence[Organism], settings: ArenaSettings) -> tuple[list[float], list[GameRecord]]:
    """Every pair plays ``games_per_pair`` games, half with each color.

    Game ``k`` of the generation opens with book line ``k``.  Returns the
    points per organism (win 1, draw 1/2) and the game records.
    """
    n = len(population)
    engines = [Engine(o.decoded, PLAIN_PARAMS, name=f"org{i}", nodes=settings.nodes, depth=settings.depth)
               for i, o in enumerate(population)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    total_games = len(pairs) * settings.games_per_pair
    if len(settings.book) < total_games:
        raise ValueError(f"opening book exhausted: {len(settings.book)} lines for {total_games} games")
    specs, colors = [], []
    k = 0
    for i, j in pairs:
        for t in range(settings.games_per_pair):
            w, b = (i, j) if t % 2 == 0 else (j, i)
            specs.append((engines[w], engines[b], settings.time_control, settings.book[k], settings.max_plies))
            colors.append((w, b))
            k += 1
    games = run_games(specs, settings.jobs)
    points = [0.0] * n
    for (w, b), g in zip(colors, games):
        points[w] += g.score_for(True)
        points[b] += g.score_for(False)
    return points, games


def run_coevolution(seeds: Sequence[Organism], settings: ArenaSettings,
                    config: GAConfig = COEVOLUTION_CONFIG, on_generation=None,
                    resume: Checkpoint | None = None, checkpoint_fn: CheckpointFn | None = None) -> PhaseReport:
    """Phase 2: fitness is the points scored in a full round robin.

    Fitness is relative to the current population, so every generation
    (including carried-over elites) is re-scored.  The best of the last
    scored generation is reported.
    """
    if len(seeds) != config.population_size:
        raise ValueError(f"coevolution needs {config.population_size} organisms, got {len(seeds)}")
    if any(o.kind != EVAL for o in seeds):
        raise ValueError("coevolution works on evaluation genomes")
    start = time.monotonic()
    report = PhaseReport(EVAL)
    if resume is not None:
        rng = rng_from_state(resume.rng_state)
        pop = [Organism(o.chromosome) for o in resume.population]
        gen = resume.generation
        _restore_history(report, resume.extra.get("history", []))
    else:
        rng = make_rng(config.random_seed)
        pop = [Organism(o.chromosome) for o in seeds]
        gen = 0
    while True:
        points, games = round_robin(pop, settings)
        for o, p in zip(pop, points):
            o.fitness = p
        report.games_per_generation.append(len(games))
        _record(report, pop, lambda o: o.fitness)
        if on_generation:
            on_generation(gen, report, pop, games)
        if gen >= config.generations:
            break
        pop = next_generation(pop, config, None, rng)
        gen += 1
        # carried-over elites are re-scored against the new population
        pop = [Organism(o.chromosome) for o in pop]
        _emit(checkpoint_fn, EVAL, gen, pop, rng, config, report)
    report.population = pop
    report.best_organism = best_of(pop)
    report.wall_clock = time.monotonic() - start
    return report


# ---------------------------------------------------------------------------
# phase 3: search parameters

PHASE3_CONFIG = GAConfig(population_size=10, crossover_rate=0.75, mutation_rate=0.05,
                         generations=50, selection="proportional", elitism_count=1)


def canonical_search_params(sp: SearchParams) -> SearchParams:
    """Behaviourally equivalent record with unused fields zeroed.

    Two records with the same canonical form produce identical searches,
    which lets fitness results be shared between them.
    """
    d = {n: getattr(sp, n) for n in sp.__dataclass_fields__}
    if not sp.null_move_use:
        for n in ("null_move_reduction", "null_move_adaptivity_use", "null_move_adaptivity_depth",
                  "mate_threat_ext"):
            d[n] = 0
    elif not sp.null_move_adaptivity_use:
        d["null_move_adaptivity_depth"] = 0
    for depth in (1, 2, 3):
        if depth > sp.futility_depth:
            d[f"futility_threshold_d{depth}"] = 0
    if not (sp.multi_cut_use and sp.multi_cut_cut_num and sp.multi_cut_move_num):
        for n in ("multi_cut_use", "multi_cut_reduction", "multi_cut_depth", "multi_cut_move_num",
                  "multi_cut_cut_num"):
            d[n] = 0
    for n in EXTENSION_FIELDS:
        d[n] = min(d[n], MAX_EXTENSION)
    return SearchParams(**d)


class NodeCountFitness:
    """Total nodes to solve a suite, memoised per canonical parameter record.

    The evaluation weights are frozen, so one evaluator and one node cache
    serve every organism.
    """

    def __init__(self, suite: Sequence, eval_params: EvalParams, node_cap: int):
        if not suite:
            raise ValueError("empty test suite")
        if node_cap <= 0:
            raise ValueError("node_cap must be positive")
        self.suite = list(suite)
        self.eval_params = eval_params
        self.node_cap = node_cap
        self.evaluator = Evaluator(eval_params)
        self.node_cache = NodeCache()
        self.memo: dict[SearchParams, tuple[int, ...]] = {}

    @property
    def budget(self) -> int:
        return len(self.suite) * self.node_cap

    def per_position(self, sp: SearchParams) -> tuple[int, ...]:
        key = canonical_search_params(sp)
        hit = self.memo.get(key)
        if hit is None:
            searcher = Searcher(self.eval_params, key, self.evaluator, self.node_cache)
            hit = tuple(search_nodes_to_solution(case, self.eval_params, key, self.node_cap, searcher)
                        for case in self.suite)
            self.memo[key] = hit
        return hit

    def total(self, sp: SearchParams) -> int:
        return sum(self.per_position(sp))

    def __call__(self, organisms: Sequence[Organism]) -> list[float]:
        return [float(self.budget - self.total(o.decoded)) for o in organisms]


def node_count_fitness(chromosome: Chromosome | SearchParams, suite: Sequence, node_cap: int,
                       eval_params: EvalParams) -> int:
    """Total nodes over ``suite`` (lower is better); unsolved positions cost ``node_cap``."""
    sp = chromosome.decode() if isinstance(chromosome, Chromosome) else chromosome
    return NodeCountFitness(suite, eval_params, node_cap).total(sp)


def _per_position_job(args):
    suite, eval_params, node_cap, sp = args
    return NodeCountFitness(suite, eval_params, node_cap).per_position(sp)


class ParallelNodeCountFitness(NodeCountFitness):
    """Same values as :class:`NodeCountFitness`, organisms spread over processes."""

    def __init__(self, suite, eval_params, node_cap, jobs: int):
        super().__init__(suite, eval_params, node_cap)
        self.jobs = jobs

    def __call__(self, organisms):
        keys = [canonical_search_params(o.decoded) for o in organisms]
        todo = sorted({k for k in keys if k not in self.memo}, key=lambda k: k.values)
        if todo:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                rows = list(pool.map(_per_position_job,
                                     [(self.suite, self.eval_params, self.node_cap, k) for k in todo]))
            self.memo.update(zip(todo, rows))
        return [float(self.budget - sum(self.memo[k])) for k in keys]


def run_search_evolution(suite: Sequence, eval_params: EvalParams, node_cap: int,
                         config: GAConfig = PHASE3_CONFIG, include_baseline: bool = True,
                         jobs: int = 1, **kw) -> PhaseReport:
    """Phase 3: minimise total nodes to solve ``suite``.

    Selection fitness is ``len(suite) * node_cap - total``.  With
    ``include_baseline`` the all-off record replaces the first member of
    the initial population.  ``raw_best`` logs the best total node count.
    """
    fit = (ParallelNodeCountFitness(suite, eval_params, node_cap, jobs) if jobs > 1
           else NodeCountFitness(suite, eval_params, node_cap))
    if include_baseline and kw.get("resume") is None:
        def initial(rng):
            pop = random_population(SEARCH, config.population_size, rng)
            pop[0] = Organism(encode_search(PLAIN_PARAMS))
            return pop
        kw["initial"] = initial
    report = run_ga(SEARCH, config, fit, raw_fn=lambda o: fit.budget - o.fitness, **kw)
    report.fitness = fit
    return report


def solve_suite(suite: Sequence, eval_params: EvalParams, search_params: SearchParams,
                node_cap: int) -> list[tuple[str, bool, int]]:
    """``(id, solved, nodes)`` per test case, ``nodes`` being the cap when unsolved.

    A case is solved once an iteration's best move is a listed solution,
    even if that iteration ended exactly at the cap.
    """
    if node_cap <= 0:
        raise ValueError("node_cap must be positive")
    searcher = Searcher(eval_params, search_params)
    rows = []
    for i, case in enumerate(suite):
        solved, nodes = solve_case(case, searcher, node_cap)
        rows.append((case.id or str(i + 1), solved, nodes))
    return rows
