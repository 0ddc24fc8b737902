"""Command-line entry point: ``evochess <command> ...``.

Commands::

    evolve-eval    evolve evaluation weights on a PGN corpus (1-ply move matching)
    coevolve       coevolve evaluation parameter files by round-robin play
    evolve-search  evolve search parameters on an EPD suite (node counts)
    bench          solve an EPD suite and report nodes per position
    match          play two engine configurations against each other
    uci            speak UCI on stdin/stdout

Exit status: 0 success, 2 bad configuration, 3 unreadable or invalid input,
4 failure while running.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import __version__
from .arena import Engine, TimeControl, play_match, read_book
from .board import ChessError
from .evaluation import REFERENCE_PARAMS, EvalParams
from .evolve import (
    COEVOLUTION_CONFIG, PHASE1_CONFIG, PHASE3_CONFIG, ArenaSettings,
    build_training_sets, holdout_match_rate, move_match_count, run_coevolution,
    run_eval_evolution, run_search_evolution, solve_suite,
)
from .genome import EVAL, SEARCH, GAConfig, Organism, encode_eval, make_rng, read_checkpoint, write_checkpoint
from .notation import read_epd, read_pgn
from .search import PLAIN_PARAMS, TABLE2_PARAMS, SearchParams

log = logging.getLogger("evochess")

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_RUNTIME = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# run configuration

@dataclass
class RunConfig:
    """Everything that determines a run, serialisable as ``key = value`` text."""

    phase: str = ""
    corpus: str = ""
    suite: str = ""
    book: str = ""
    eval_params: str = ""
    seeds: list[str] = field(default_factory=list)
    train_size: int = 500
    holdout_size: int = 0
    node_cap: int = 3000
    nodes: int = 0
    depth: int = 0
    time_base: float = 0.0
    time_increment: float = 0.0
    games_per_pair: int = 4
    max_plies: int = 0
    ga: GAConfig = field(default_factory=GAConfig)

    RUN_KEYS = ("corpus", "suite", "book", "eval_params", "seeds", "train_size", "holdout_size",
                "node_cap", "nodes", "depth", "time_base", "time_increment", "games_per_pair", "max_plies")

    def to_text(self) -> str:
        lines = [f"phase = {self.phase}"]
        for k in self.RUN_KEYS:
            v = getattr(self, k)
            lines.append(f"{k} = {' '.join(v) if isinstance(v, list) else v}")
        lines += self.ga.to_text().splitlines()
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def header(self) -> list[str]:
        return [f"evochess {__version__} {self.phase}", f"config_hash = {self.digest()}",
                f"seed = {self.ga.random_seed}"]


_GA_KEYS = {f.name for f in fields(GAConfig)}
_RUN_TYPES = {f.name: f.type for f in fields(RunConfig)}


def parse_config_text(text: str, cfg: RunConfig) -> RunConfig:
    ga_lines = []
    run = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (p.strip() for p in line.partition("="))
        if not sep:
            raise ConfigError(f"config line {n}: expected 'key = value'")
        if key in _GA_KEYS:
            ga_lines.append(f"{key} = {value}")
        elif key in RunConfig.RUN_KEYS:
            run[key] = _convert(key, value)
        elif key == "phase":
            continue
        else:
            raise ConfigError(f"config line {n}: unknown key {key!r}")
    try:
        ga = GAConfig.from_text("\n".join(ga_lines), cfg.ga)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return replace(cfg, ga=ga, **run)


def _convert(key, value):
    t = _RUN_TYPES[key]
    try:
        if t == "int":
            return int(value)
        if t == "float":
            return float(value)
        if t.startswith("list"):
            return value.split()
        return value
    except ValueError:
        raise ConfigError(f"bad value {value!r} for {key}") from None


_PHASE_DEFAULTS = {"evolve-eval": PHASE1_CONFIG, "coevolve": COEVOLUTION_CONFIG, "evolve-search": PHASE3_CONFIG}


def build_config(args) -> RunConfig:
    cfg = RunConfig(phase=args.command, ga=_PHASE_DEFAULTS[args.command])
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        cfg = parse_config_text(text, cfg)
    run_over = {k: getattr(args, k) for k in RunConfig.RUN_KEYS if getattr(args, k, None) not in (None, [])}
    ga_over = {k: getattr(args, k) for k in _GA_KEYS if getattr(args, k, None) is not None}
    try:
        ga = cfg.ga.replace(**ga_over)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg = replace(cfg, ga=ga, **run_over)
    for k in ("train_size", "node_cap"):
        if getattr(cfg, k) <= 0:
            raise ConfigError(f"{k} must be positive")
    for k in ("holdout_size", "nodes", "depth", "max_plies"):
        if getattr(cfg, k) < 0:
            raise ConfigError(f"{k} must be non-negative")
    return cfg


# ---------------------------------------------------------------------------
# helpers

def _need_file(path: str, what: str) -> Path:
    if not path:
        raise ConfigError(f"no {what} given")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} not found: {path}")
    return p


def _load_eval(path: str) -> EvalParams:
    if not path:
        return REFERENCE_PARAMS
    try:
        return EvalParams.load(_need_file(path, "evaluation parameter file"))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_search(path: str, default: SearchParams = TABLE2_PARAMS) -> SearchParams:
    if not path:
        return default
    if path in ("plain", "off"):
        return PLAIN_PARAMS
    if path in ("table2", "default"):
        return TABLE2_PARAMS
    try:
        return SearchParams.load(_need_file(path, "search parameter file"))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_suite(path: str):
    try:
        suite = read_epd(_need_file(path, "EPD suite"))
    except ChessError as exc:
        raise InputError(str(exc)) from None
    if not suite:
        raise InputError(f"{path}: suite is empty")
    return suite


def _load_book(path: str):
    try:
        book = read_book(_need_file(path, "opening book"))
    except ChessError as exc:
        raise InputError(str(exc)) from None
    if not book:
        raise InputError(f"{path}: opening book is empty")
    return book


def _prepare_out(cfg: RunConfig, out: str, resume: bool) -> tuple[Path, object]:
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    ckpt_path = d / "checkpoint.txt"
    resume_from = None
    if resume:
        if not ckpt_path.is_file():
            raise InputError(f"nothing to resume: {ckpt_path} missing")
        kind = SEARCH if cfg.phase == "evolve-search" else EVAL
        try:
            resume_from = read_checkpoint(ckpt_path, kind)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        if resume_from.extra.get("run_hash") != cfg.digest():
            raise ConfigError("checkpoint was written by a run with a different configuration")
    (d / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
    return d, resume_from


def _checkpointer(cfg: RunConfig, d: Path):
    def save(ck):
        ck.extra["run_hash"] = cfg.digest()
        tmp = d / "checkpoint.tmp"
        write_checkpoint(tmp, ck)
        os.replace(tmp, d / "checkpoint.txt")
        write_checkpoint(d / f"checkpoint-{ck.generation:04d}.txt", ck)
    return save


def _progress(gen, report, *_):
    log.info("generation %d best %.6g mean %.6g raw %.6g", gen, report.best[-1], report.mean[-1], report.raw_best[-1])


# ---------------------------------------------------------------------------
# commands

def cmd_evolve_eval(args) -> int:
    cfg = build_config(args)
    games, diags = read_pgn(_need_file(cfg.corpus, "PGN corpus"))
    for d in diags:
        log.warning("corpus game %d skipped: %s", d.index, d.message)
    if not games:
        raise InputError(f"{cfg.corpus}: no readable games")
    sizes = [cfg.train_size] + ([cfg.holdout_size] if cfg.holdout_size else [])
    try:
        sets = build_training_sets(games, sizes, make_rng(cfg.ga.random_seed))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    training = sets[0]
    out, resume = _prepare_out(cfg, args.out, args.resume)
    report = run_eval_evolution(training, cfg.ga, resume=resume, checkpoint_fn=_checkpointer(cfg, out),
                                on_generation=_progress)
    best = report.best_organism.decoded
    train_rate = move_match_count(best, training) / len(training)
    lines = [f"train_rate = {train_rate:.6f}"]
    if len(sets) > 1:
        lines.append(f"holdout_rate = {holdout_match_rate(best, sets[1], training):.6f}")
    (out / "phase1.log").write_text(report.log_text(cfg.header() + lines), encoding="utf-8")
    best.save(out / "best.eval", header="\n".join(cfg.header()))
    print(" ".join(lines))
    return EXIT_OK


def cmd_coevolve(args) -> int:
    cfg = build_config(args)
    if not cfg.seeds:
        raise ConfigError("coevolve needs --seeds parameter files")
    seeds = [Organism(encode_eval(_load_eval(p))) for p in cfg.seeds]
    if len(seeds) != cfg.ga.population_size:
        cfg = replace(cfg, ga=cfg.ga.replace(population_size=len(seeds)))
    tc = TimeControl(cfg.time_base, cfg.time_increment) if cfg.time_base else None
    if not (cfg.nodes or cfg.depth or tc):
        raise ConfigError("coevolve needs --nodes, --depth or --time-base")
    settings = ArenaSettings(book=_load_book(cfg.book), nodes=cfg.nodes or None, depth=cfg.depth or None,
                             time_control=tc, games_per_pair=cfg.games_per_pair,
                             max_plies=cfg.max_plies or None, jobs=args.jobs)
    out, resume = _prepare_out(cfg, args.out, args.resume)
    report = run_coevolution(seeds, settings, cfg.ga, on_generation=_progress, resume=resume,
                             checkpoint_fn=_checkpointer(cfg, out))
    (out / "coevolution.log").write_text(report.log_text(cfg.header()), encoding="utf-8")
    report.best_organism.decoded.save(out / "best.eval", header="\n".join(cfg.header()))
    print(f"games_per_generation = {report.games_per_generation[-1]}")
    return EXIT_OK


def cmd_evolve_search(args) -> int:
    cfg = build_config(args)
    suite = _load_suite(cfg.suite)
    params = _load_eval(cfg.eval_params)
    out, resume = _prepare_out(cfg, args.out, args.resume)
    report = run_search_evolution(suite, params, cfg.node_cap, cfg.ga, jobs=args.jobs, resume=resume,
                                  checkpoint_fn=_checkpointer(cfg, out), on_generation=_progress)
    baseline = report.fitness.total(PLAIN_PARAMS)
    lines = [f"baseline_nodes = {baseline}", f"best_nodes = {int(report.raw_best[-1])}"]
    (out / "phase3.log").write_text(report.log_text(cfg.header() + lines), encoding="utf-8")
    report.best_organism.decoded.save(out / "best.search", header="\n".join(cfg.header()))
    print(" ".join(lines))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.nodes <= 0:
        raise ConfigError("--nodes must be positive")
    suite = _load_suite(args.suite)
    ep = _load_eval(args.eval_params)
    sp = _load_search(args.search_params)
    rows = solve_suite(suite, ep, sp, args.nodes)
    for name, ok, n in rows:
        print(f"{name} {'solved' if ok else 'unsolved'} {n}")
    summary = {"positions": len(rows), "solved": sum(ok for _, ok, _ in rows),
               "total_nodes": sum(n for _, _, n in rows), "node_cap": args.nodes}
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_match(args) -> int:
    if args.games <= 0:
        raise ConfigError("--games must be positive")
    tc = TimeControl(args.time_base, args.time_increment) if args.time_base else None
    if not (args.nodes or args.depth or tc):
        raise ConfigError("match needs --nodes, --depth or --time-base")
    a = Engine(_load_eval(args.a_eval), _load_search(args.a_search), "A",
               nodes=args.nodes or None, depth=args.depth or None)
    b = Engine(_load_eval(args.b_eval), _load_search(args.b_search, PLAIN_PARAMS), "B",
               nodes=args.nodes or None, depth=args.depth or None)
    book = _load_book(args.book)
    try:
        rec = play_match(a, b, args.games, tc, book, max_plies=args.max_plies or None, jobs=args.jobs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.pgn:
        Path(args.pgn).write_text(rec.to_pgn(), encoding="utf-8")
    w, d, lost = rec.wins_draws_losses()
    print(f"# A: +{w} ={d} -{lost}")
    print(rec.summary())
    return EXIT_OK


def cmd_uci(args) -> int:
    from .uci import main as uci_main
    return uci_main(_load_eval(args.eval_params), _load_search(args.search_params))


# ---------------------------------------------------------------------------
# argument parsing

def _add_ga(p):
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--population-size", dest="population_size", type=int)
    g.add_argument("--generations", type=int)
    g.add_argument("--crossover-rate", dest="crossover_rate", type=float)
    g.add_argument("--mutation-rate", dest="mutation_rate", type=float)
    g.add_argument("--selection", choices=("proportional", "rank"))
    g.add_argument("--elitism-count", dest="elitism_count", type=int)
    g.add_argument("--seed", dest="random_seed", type=int)


def _add_run(p):
    p.add_argument("--config", help="key = value file (command-line flags win)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--resume", action="store_true", help="continue from OUT/checkpoint.txt")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="evochess", description="Evolve chess evaluation and search parameters.")
    ap.add_argument("--version", action="version", version=f"evochess {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve-eval", help="phase 1: evolve evaluation weights on a PGN corpus")
    p.add_argument("--corpus")
    p.add_argument("--train-size", dest="train_size", type=int)
    p.add_argument("--holdout-size", dest="holdout_size", type=int)
    _add_run(p)
    _add_ga(p)

    p = sub.add_parser("coevolve", help="phase 2: coevolve evaluation parameter files")
    p.add_argument("--seeds", nargs="+", default=[], help="evaluation parameter files")
    p.add_argument("--book")
    p.add_argument("--nodes", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--time-base", dest="time_base", type=float, help="ms per side")
    p.add_argument("--time-increment", dest="time_increment", type=float)
    p.add_argument("--games-per-pair", dest="games_per_pair", type=int)
    p.add_argument("--max-plies", dest="max_plies", type=int)
    _add_run(p)
    _add_ga(p)

    p = sub.add_parser("evolve-search", help="phase 3: evolve search parameters on an EPD suite")
    p.add_argument("--suite")
    p.add_argument("--eval-params", dest="eval_params")
    p.add_argument("--node-cap", dest="node_cap", type=int)
    _add_run(p)
    _add_ga(p)

    p = sub.add_parser("bench", help="nodes to solve each position of an EPD suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--eval-params", dest="eval_params", default="")
    p.add_argument("--search-params", dest="search_params", default="",
                   help="file, or 'plain' / 'table2' (default)")
    p.add_argument("--nodes", type=int, default=3000, help="node cap per position")

    p = sub.add_parser("match", help="play engine A against engine B")
    p.add_argument("--a-eval", default="")
    p.add_argument("--a-search", default="", help="file, 'plain' or 'table2' (default)")
    p.add_argument("--b-eval", default="")
    p.add_argument("--b-search", default="plain", help="file, 'plain' (default) or 'table2'")
    p.add_argument("--games", type=int, default=50)
    p.add_argument("--book", required=True)
    p.add_argument("--nodes", type=int, default=0, help="node limit per move")
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--time-base", dest="time_base", type=float, default=0.0, help="ms per side")
    p.add_argument("--time-increment", dest="time_increment", type=float, default=0.0)
    p.add_argument("--max-plies", dest="max_plies", type=int, default=0)
    p.add_argument("--pgn", help="write the games here")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("uci", help="run as a UCI engine")
    p.add_argument("--eval-params", dest="eval_params", default="")
    p.add_argument("--search-params", dest="search_params", default="")
    return ap


COMMANDS = {"evolve-eval": cmd_evolve_eval, "coevolve": cmd_coevolve, "evolve-search": cmd_evolve_search,
            "bench": cmd_bench, "match": cmd_match, "uci": cmd_uci}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"evochess: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"evochess: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        print("evochess: interrupted", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - report, do not trace back at the user
        log.debug("failure", exc_info=True)
        print(f"evochess: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
