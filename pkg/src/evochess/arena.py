"""Engine-vs-engine games, matches and Elo arithmetic."""
from __future__ import annotations

import logging
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .board import (
    STARTING_FEN, ChessError, Move, Position, apply_move, insufficient_material, legal_moves,
    parse_fen, parse_uci,
)
from .evaluation import EvalParams
from .notation import BLACK_WIN, DRAW, WHITE_WIN, Game, game_to_pgn, parse_san
from .search import PLAIN_PARAMS, Searcher, SearchLimits, SearchParams

log = logging.getLogger(__name__)

WIN, LOSS, DRAWN = 1.0, 0.0, 0.5


def expected_score(rating_difference: float) -> float:
    """Expected winning rate of the side rated ``rating_difference`` higher."""
    return 1.0 / (10.0 ** (-rating_difference / 400.0) + 1.0)


def rating_difference(winning_rate: float) -> float:
    """Rating difference implied by a winning rate; infinite at 0 and 1."""
    if not 0.0 <= winning_rate <= 1.0:
        raise ValueError(f"winning rate {winning_rate} outside [0, 1]")
    if winning_rate == 0.0:
        return -math.inf
    if winning_rate == 1.0:
        return math.inf
    return -400.0 * math.log10(1.0 / winning_rate - 1.0) + 0.0  # no negative zero


@dataclass(frozen=True)
class TimeControl:
    """Base time per side and increment, in milliseconds."""

    base: float
    increment: float = 0.0

    def __post_init__(self):
        if self.base <= 0:
            raise ValueError("base time must be positive")
        if self.increment < 0:
            raise ValueError("increment must be non-negative")

    def budget(self, remaining: float) -> float:
        """Milliseconds to spend on the next move."""
        return min(remaining / 30.0 + self.increment, remaining / 4.0)


class Engine:
    """A playing configuration: evaluation weights plus search controls.

    With ``nodes`` (or ``depth``) set, every move is searched under that
    limit and games are reproducible; otherwise the game clock decides.
    """

    def __init__(self, eval_params: EvalParams, search_params: SearchParams = PLAIN_PARAMS,
                 name: str = "engine", nodes: int | None = None, depth: int | None = None):
        self.eval_params = eval_params
        self.search_params = search_params
        self.name = name
        self.nodes = nodes
        self.depth = depth
        self._searcher = None

    def __repr__(self):
        return f"Engine({self.name!r}, nodes={self.nodes}, depth={self.depth})"

    def __getstate__(self):
        d = dict(self.__dict__)
        d["_searcher"] = None
        return d

    @property
    def searcher(self) -> Searcher:
        if self._searcher is None:
            self._searcher = Searcher(self.eval_params, self.search_params)
        return self._searcher

    def limits(self, budget_ms: float | None) -> SearchLimits:
        if self.nodes is None and self.depth is None and budget_ms is None:
            raise ValueError(f"{self.name}: no node, depth or time limit available")
        return SearchLimits(max_nodes=self.nodes, max_depth=self.depth,
                            max_time=None if budget_ms is None else max(budget_ms, 1.0))

    def choose(self, pos: Position, history=(), budget_ms: float | None = None):
        return self.searcher.search(pos, self.limits(budget_ms), history=history)


@dataclass
class GameRecord:
    white: str
    black: str
    initial: Position
    moves: list[Move]
    result: str
    reason: str
    opening_plies: int = 0
    nodes: dict = field(default_factory=dict)

    def score_for(self, name_is_white: bool) -> float:
        if self.result == DRAW:
            return DRAWN
        white_won = self.result == WHITE_WIN
        return WIN if white_won == name_is_white else LOSS

    def to_game(self) -> Game:
        headers = {"White": self.white, "Black": self.black, "Termination": self.reason}
        return Game(moves=list(self.moves), result=self.result, initial=self.initial, headers=headers)


def _game_over(pos: Position, rep_counts: dict[int, int], plies: int, max_plies: int | None):
    if not legal_moves(pos):
        if pos.in_check():
            return (BLACK_WIN if pos.turn == 1 else WHITE_WIN), "checkmate"
        return DRAW, "stalemate"
    if insufficient_material(pos):
        return DRAW, "insufficient material"
    if rep_counts.get(pos.repetition_key(), 0) >= 3:
        return DRAW, "threefold repetition"
    if pos.halfmove >= 100:
        return DRAW, "fifty-move rule"
    if max_plies is not None and plies >= max_plies:
        return DRAW, "ply limit"
    return None


def play_game(white: Engine, black: Engine, time_control: TimeControl | None = None,
              opening: tuple[Position, list[Move]] | list[Move] | None = None,
              max_plies: int | None = None) -> GameRecord:
    """Play one game after the given opening moves.

    Without a ``time_control`` both engines must carry a node or depth limit;
    such games are fully deterministic.  With a clock, a side whose clock
    runs out loses with reason ``"flag"``.  An illegal move from an engine
    forfeits the game.  ``max_plies`` optionally caps the game length,
    counting opening moves; the game is then scored a draw.
    """
    if opening is None:
        initial, book_moves = parse_fen(STARTING_FEN), []
    elif isinstance(opening, tuple):
        initial, book_moves = opening
    else:
        initial, book_moves = parse_fen(STARTING_FEN), list(opening)
    pos = initial
    moves: list[Move] = []
    rep_counts: dict[int, int] = {pos.repetition_key(): 1}
    history = [pos.key]
    for m in book_moves:
        pos = apply_move(pos, _legal_or_raise(pos, m))
        moves.append(m)
        rk = pos.repetition_key()
        rep_counts[rk] = rep_counts.get(rk, 0) + 1
        history.append(pos.key)
    clocks = {1: time_control.base, -1: time_control.base} if time_control else None
    engines = {1: white, -1: black}
    nodes = {white.name: 0, black.name: 0} if white.name != black.name else {white.name: 0}
    while True:
        over = _game_over(pos, rep_counts, len(moves), max_plies)
        if over:
            result, reason = over
            break
        side = pos.turn
        engine = engines[side]
        budget = time_control.budget(clocks[side]) if clocks else None
        start = time.monotonic()
        res = engine.choose(pos, history[:-1], budget)
        if clocks:
            clocks[side] -= (time.monotonic() - start) * 1000.0
            if clocks[side] < 0:
                result, reason = (BLACK_WIN if side == 1 else WHITE_WIN), "flag"
                break
            clocks[side] += time_control.increment
        nodes[engine.name] = nodes.get(engine.name, 0) + res.nodes
        try:
            m = _legal_or_raise(pos, res.best_move)
        except ChessError as exc:
            log.warning("%s played an illegal move: %s", engine.name, exc)
            result, reason = (BLACK_WIN if side == 1 else WHITE_WIN), "illegal move"
            break
        pos = apply_move(pos, m)
        moves.append(m)
        rk = pos.repetition_key()
        rep_counts[rk] = rep_counts.get(rk, 0) + 1
        history.append(pos.key)
    return GameRecord(white.name, black.name, initial, moves, result, reason, len(book_moves), nodes)


def _legal_or_raise(pos: Position, m: Move) -> Move:
    for lm in legal_moves(pos):
        if lm.from_sq == m.from_sq and lm.to_sq == m.to_sq and lm.promotion == m.promotion:
            return lm
    raise ChessError(f"illegal move {m.uci()}")


@dataclass
class MatchRecord:
    name_a: str
    name_b: str
    games: list[GameRecord]
    a_is_white: list[bool]

    @property
    def games_played(self) -> int:
        return len(self.games)

    @property
    def points_a(self) -> float:
        return sum(g.score_for(w) for g, w in zip(self.games, self.a_is_white))

    @property
    def points_b(self) -> float:
        return self.games_played - self.points_a

    @property
    def win_rate(self) -> float:
        return self.points_a / self.games_played if self.games else float("nan")

    def wins_draws_losses(self) -> tuple[int, int, int]:
        scores = [g.score_for(w) for g, w in zip(self.games, self.a_is_white)]
        return scores.count(WIN), scores.count(DRAWN), scores.count(LOSS)

    def summary(self) -> str:
        """``points_A points_B W% RD`` with RD in Elo from A's side."""
        rd = rating_difference(self.win_rate)
        rd_text = f"{rd:+.1f}" if math.isfinite(rd) else ("+inf" if rd > 0 else "-inf")
        return f"{self.points_a:g} {self.points_b:g} {100 * self.win_rate:.1f}% {rd_text}"

    def to_pgn(self, event: str = "match") -> str:
        out = []
        for k, g in enumerate(self.games, 1):
            game = g.to_game()
            game.headers.update({"Event": event, "Round": str(k)})
            out.append(game_to_pgn(game))
        return "\n".join(out)


# ---------------------------------------------------------------------------
# opening books

_MOVE_NUMBER = re.compile(r"^\d+\.+")


def parse_book_line(line: str) -> tuple[Position, list[Move]]:
    """One opening: a FEN/EPD position, or a SAN/UCI move list from the start.

    Move numbers (``1.``, ``3...``) and a trailing result token are ignored.
    """
    text = line.split("#", 1)[0].strip()
    if not text:
        raise ChessError("empty opening line")
    if "/" in text.split()[0]:
        parts = text.split()
        fen = " ".join(parts[:6]) if len(parts) >= 6 and parts[4].isdigit() else " ".join(parts[:4])
        return parse_fen(fen), []
    pos = parse_fen(STARTING_FEN)
    moves = []
    for tok in text.split():
        tok = _MOVE_NUMBER.sub("", tok)
        if not tok or tok in ("1-0", "0-1", "1/2-1/2", "*"):
            continue
        try:
            m = parse_uci(pos, tok)
        except ChessError:
            m = parse_san(pos, tok)
        moves.append(m)
        pos = apply_move(pos, m)
    return parse_fen(STARTING_FEN), moves


def read_book(path) -> list[tuple[Position, list[Move]]]:
    book = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.split("#", 1)[0].strip():
                continue
            try:
                book.append(parse_book_line(line))
            except ChessError as exc:
                raise ChessError(f"{path}:{n}: {exc}") from None
    return book


# ---------------------------------------------------------------------------
# matches

def _play_job(args):
    return play_game(*args)


def run_games(jobs_spec: list[tuple], jobs: int = 1) -> list[GameRecord]:
    """Play ``(white, black, time_control, opening, max_plies)`` tuples.

    With ``jobs > 1`` games run in worker processes; results keep input order.
    """
    if jobs <= 1 or len(jobs_spec) <= 1:
        return [play_game(*spec) for spec in jobs_spec]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_play_job, jobs_spec, chunksize=max(1, len(jobs_spec) // (4 * jobs))))


def play_match(engine_a: Engine, engine_b: Engine, games: int, time_control: TimeControl | None,
               book: list, max_plies: int | None = None, jobs: int = 1) -> MatchRecord:
    """Play ``games`` games, A taking white in even-numbered games (0-based).

    Game ``k`` starts from book line ``k``; the book must hold at least
    ``games`` lines.
    """
    if games <= 0:
        raise ValueError("games must be positive")
    if len(book) < games:
        raise ValueError(f"opening book exhausted: {len(book)} lines for {games} games")
    if engine_a.name == engine_b.name:
        raise ValueError("engines need distinct names")
    specs = []
    a_white = []
    for k in range(games):
        w = k % 2 == 0
        a_white.append(w)
        white, black = (engine_a, engine_b) if w else (engine_b, engine_a)
        specs.append((white, black, time_control, book[k], max_plies))
    return MatchRecord(engine_a.name, engine_b.name, run_games(specs, jobs), a_white)
