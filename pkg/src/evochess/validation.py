"""Input checking shared by the estimator front end."""
from __future__ import annotations

import numbers
from typing import Iterable, Sequence

from .board import ChessError, Move, Position, legal_moves, parse_fen, parse_uci
from .evaluation import EvalParams
from .genome import GAConfig
from .notation import TestCase, parse_epd, parse_san


def check_positions(X) -> list[Position]:
    """Positions from ``Position`` objects or FEN strings.

    Raises ``ValueError`` for an empty input or an unparsable FEN and
    ``TypeError`` for anything else.
    """
    if isinstance(X, (str, Position)):
        raise TypeError("expected a sequence of positions, got a single item")
    out = []
    for i, x in enumerate(_as_list(X, "X")):
        if isinstance(x, Position):
            out.append(x)
        elif isinstance(x, str):
            try:
                out.append(parse_fen(x))
            except ChessError as exc:
                raise ValueError(f"X[{i}]: {exc}") from None
        else:
            raise TypeError(f"X[{i}]: expected Position or FEN string, got {type(x).__name__}")
    return out


def check_moves(positions: Sequence[Position], y) -> list[Move]:
    """Legal moves paired with ``positions``; strings may be UCI or SAN."""
    ys = _as_list(y, "y")
    if len(ys) != len(positions):
        raise ValueError(f"X has {len(positions)} positions but y has {len(ys)} moves")
    out = []
    for i, (pos, m) in enumerate(zip(positions, ys)):
        try:
            if isinstance(m, str):
                try:
                    mv = parse_uci(pos, m)
                except ChessError:
                    mv = parse_san(pos, m)
            elif isinstance(m, Move):
                mv = m
            else:
                raise TypeError(f"y[{i}]: expected Move or move string, got {type(m).__name__}")
        except ChessError as exc:
            raise ValueError(f"y[{i}]: {exc}") from None
        if not any(mv.same_as(lm) for lm in legal_moves(pos)):
            raise ValueError(f"y[{i}]: {mv.uci()} is not legal in the paired position")
        out.append(next(lm for lm in legal_moves(pos) if mv.same_as(lm)))
    return out


def check_suite(X) -> list[TestCase]:
    """Test cases from ``TestCase`` objects or EPD lines carrying ``bm``."""
    out = []
    for i, x in enumerate(_as_list(X, "X")):
        if isinstance(x, TestCase):
            out.append(x)
        elif isinstance(x, str):
            try:
                out.append(parse_epd(x))
            except ChessError as exc:
                raise ValueError(f"X[{i}]: {exc}") from None
        else:
            raise TypeError(f"X[{i}]: expected TestCase or EPD string, got {type(x).__name__}")
    return out


def check_eval_params(params, name: str = "eval_params") -> EvalParams:
    if isinstance(params, EvalParams):
        return params
    try:
        return EvalParams(params)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name}: {exc}") from None


def check_ga_config(est) -> GAConfig:
    """Build a ``GAConfig`` from an estimator's hyper-parameters."""
    seed = est.random_state
    if seed is None:
        seed = 0
    if not isinstance(seed, numbers.Integral) or isinstance(seed, bool):
        raise TypeError("random_state must be an int or None")
    return GAConfig(population_size=_int(est.population_size, "population_size"),
                    crossover_rate=float(est.crossover_rate), mutation_rate=float(est.mutation_rate),
                    generations=_int(est.generations, "generations"), selection=est.selection,
                    elitism_count=_int(est.elitism_count, "elitism_count"), random_seed=int(seed))


def _int(v, name):
    if not isinstance(v, numbers.Integral) or isinstance(v, bool):
        raise TypeError(f"{name} must be an int, got {type(v).__name__}")
    return int(v)


def _as_list(X, name) -> list:
    if X is None:
        raise ValueError(f"{name} is None")
    if not isinstance(X, Iterable):
        raise TypeError(f"{name} must be a sequence")
    xs = list(X)
    if not xs:
        raise ValueError(f"{name} is empty")
    return xs
