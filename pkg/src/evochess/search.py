"""Iterative-deepening alpha-beta with parameterised selective search.

Depth is measured in units, four units to the ply, so extensions can be
fractional.  A node whose remaining depth falls below one full ply drops into
quiescence search.  Node accounting is exact: the counter advances once for
every call of the main recursive search with at least one ply left, and once
for every quiescence node (horizon calls are counted as quiescence nodes
only).  A search never counts more nodes than its ``max_nodes`` limit.

Move ordering at every node is fixed: the move from the previous iteration's
principal variation (when the node lies on it), then captures by MVV-LVA
(victim kind descending, attacker kind ascending, generation order among
equals), then every other move in generation order.  There is no
transposition table.  Two caches, keyed by Zobrist key, hold per-position
facts (legal moves, check status) and static evaluations; they change speed
only, never results.
"""
from __future__ import annotations

import threading
import time
from dataclasses import asdict, dataclass, fields
from typing import Iterable

from .board import (
    BISHOP, CAPTURE, EN_PASSANT, KNIGHT, PAWN, QUEEN, ROOK, ChessError, Move, Position,
    apply_move, legal_moves, make_null_move, noisy_moves,
)
from .evaluation import EvalParams, Evaluator

ONE_PLY = 4
MATE = 100_000
MATE_BOUND = MATE - 1000
INFINITY = MATE + 1
MAX_PLY = 128
MAX_ITERATIONS = 64
MAX_EXTENSION = ONE_PLY

# (name, bits, maximum value accepted by SearchParams)
SEARCH_FIELDS = (
    ("null_move_use", 1, 1),
    ("null_move_reduction", 3, 7),
    ("null_move_adaptivity_use", 1, 1),
    ("null_move_adaptivity_depth", 3, 7),
    ("futility_depth", 2, 3),
    ("futility_threshold_d1", 10, 1023),
    ("futility_threshold_d2", 10, 1023),
    ("futility_threshold_d3", 10, 1023),
    ("multi_cut_use", 1, 1),
    ("multi_cut_reduction", 3, 7),
    ("multi_cut_depth", 3, 7),
    ("multi_cut_move_num", 5, 31),
    ("multi_cut_cut_num", 3, 7),
    ("check_ext", 3, 7),
    ("one_reply_ext", 3, 7),
    ("recapture_ext", 3, 7),
    ("passed_pawn_ext", 3, 7),
    ("mate_threat_ext", 3, 7),
)
EXTENSION_FIELDS = ("check_ext", "one_reply_ext", "recapture_ext", "passed_pawn_ext", "mate_threat_ext")


@dataclass(frozen=True)
class SearchParams:
    """The eighteen selective-search controls.

    Extension fields accept the full 3-bit range 0-7 so that every search
    chromosome decodes to a valid record; the search itself never extends a
    single move by more than one ply (4 units).
    """

    null_move_use: int = 0
    null_move_reduction: int = 0
    null_move_adaptivity_use: int = 0
    null_move_adaptivity_depth: int = 0
    futility_depth: int = 0
    futility_threshold_d1: int = 0
    futility_threshold_d2: int = 0
    futility_threshold_d3: int = 0
    multi_cut_use: int = 0
    multi_cut_reduction: int = 0
    multi_cut_depth: int = 0
    multi_cut_move_num: int = 0
    multi_cut_cut_num: int = 0
    check_ext: int = 0
    one_reply_ext: int = 0
    recapture_ext: int = 0
    passed_pawn_ext: int = 0
    mate_threat_ext: int = 0

    def __post_init__(self):
        for name, _, hi in SEARCH_FIELDS:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError(f"{name} must be an int, got {v!r}")
            if not 0 <= v <= hi:
                raise ValueError(f"{name}={v} outside 0..{hi}")

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def replace(self, **changes) -> "SearchParams":
        d = asdict(self)
        d.update(changes)
        return SearchParams(**d)

    @property
    def selective(self) -> bool:
        """True if any pruning or extension mechanism is active."""
        return bool(self.null_move_use or self.futility_depth or self.multi_cut_use
                    or any(getattr(self, n) for n in EXTENSION_FIELDS))

    def to_text(self, header: str | None = None) -> str:
        lines = [f"# {h}" for h in (header.splitlines() if header else [])]
        lines += [f"{name} {getattr(self, name)}" for name, _, _ in SEARCH_FIELDS]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SearchParams":
        vals = {}
        known = {n for n, _, _ in SEARCH_FIELDS}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace("=", " ").split()
            if len(parts) != 2 or parts[0] not in known:
                raise ValueError(f"line {n}: expected '<name> <value>', got {line!r}")
            if parts[0] in vals:
                raise ValueError(f"line {n}: duplicate {parts[0]}")
            try:
                vals[parts[0]] = int(parts[1])
            except ValueError:
                raise ValueError(f"line {n}: bad integer {parts[1]!r}") from None
        missing = known - vals.keys()
        if missing:
            raise ValueError(f"missing search parameters: {sorted(missing)}")
        return cls(**vals)

    def save(self, path, header: str | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text(header))

    @classmethod
    def load(cls, path) -> "SearchParams":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


PLAIN_PARAMS = SearchParams()
TABLE2_PARAMS = SearchParams(
    null_move_use=1, null_move_reduction=4, null_move_adaptivity_use=1,
    null_move_adaptivity_depth=6, futility_depth=3, futility_threshold_d1=112,
    futility_threshold_d2=227, futility_threshold_d3=506, multi_cut_use=1,
    multi_cut_reduction=4, multi_cut_depth=6, multi_cut_move_num=15, multi_cut_cut_num=3,
    check_ext=4, one_reply_ext=4, recapture_ext=2, passed_pawn_ext=3, mate_threat_ext=2,
)


@dataclass(frozen=True)
class SearchLimits:
    max_nodes: int | None = None
    max_depth: int | None = None
    max_time: float | None = None  # milliseconds

    def __post_init__(self):
        if self.max_nodes is None and self.max_depth is None and self.max_time is None:
            raise ValueError("SearchLimits needs at least one limit")
        for name in ("max_nodes", "max_depth", "max_time"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class SearchResult:
    best_move: Move
    score: int
    nodes: int
    depth_completed: int
    principal_variation: list[Move]

    def __str__(self):
        pv = " ".join(m.uci() for m in self.principal_variation)
        return (f"bestmove {self.best_move.uci()} score {self.score} depth {self.depth_completed} "
                f"nodes {self.nodes} pv {pv}")


class SearchAborted(Exception):
    """Raised inside the tree when a node, time or stop limit is hit."""


def _order(board, moves):
    """Captures by MVV-LVA first, then the rest in generation order."""
    caps = []
    rest = []
    for i, m in enumerate(moves):
        if m.flags & (CAPTURE | EN_PASSANT):
            victim = PAWN if m.flags & EN_PASSANT else -board[m.to_sq] if board[m.to_sq] < 0 else board[m.to_sq]
            caps.append((-victim, abs(board[m.from_sq]), i, m))
        else:
            rest.append(m)
    caps.sort()
    return tuple(c[3] for c in caps), tuple(rest)


class NodeCache:
    """Per-position facts shared between searches, keyed by Zobrist key.

    ``facts`` gives ``(legal, in_check, ordered, noisy)``: the legal moves in
    generation order, the check flag, the legal moves in search order and the
    quiescence moves (captures, then non-capture promotions).  ``qfacts``
    gives ``(in_check, moves)`` for quiescence nodes, generating only noisy
    moves when the side to move is not in check.
    """

    def __init__(self, max_entries: int = 200_000):
        self.max_entries = max_entries
        self._d: dict[int, tuple] = {}
        self._q: dict[int, tuple] = {}

    def __len__(self):
        return len(self._d) + len(self._q)

    def clear(self):
        self._d.clear()
        self._q.clear()

    def facts(self, pos: Position):
        d = self._d
        f = d.get(pos.key)
        if f is None:
            legal = tuple(legal_moves(pos))
            caps, rest = _order(pos.board, legal)
            f = (legal, pos.in_check(), caps + rest, caps + tuple(m for m in rest if m.promotion))
            if len(d) >= self.max_entries:
                d.clear()
            d[pos.key] = f
        else:
            pos._legal = f[0]
            pos._in_check = f[1]
        return f

    def qfacts(self, pos: Position):
        key = pos.key
        f = self._d.get(key)
        if f is not None:
            return (True, f[2]) if f[1] else (False, f[3])
        q = self._q.get(key)
        if q is None:
            if pos.in_check():
                return True, self.facts(pos)[2]
            caps, rest = _order(pos.board, noisy_moves(pos))
            q = (False, caps + rest)
            if len(self._q) >= self.max_entries:
                self._q.clear()
            self._q[key] = q
        return q


def _has_non_pawn_material(board, color) -> bool:
    for p in board:
        if p * color in (KNIGHT, BISHOP, ROOK, QUEEN):
            return True
    return False


def _is_passed_push(board, m: Move, color: int) -> bool:
    """Pawn arriving on its seventh rank with no enemy pawn in front."""
    if board[m.from_sq] != PAWN * color or m.promotion:
        return False
    rank = m.to_sq >> 3
    if rank != (6 if color == 1 else 1):
        return False
    f = m.to_sq & 7
    ahead = m.to_sq + 8 * color
    enemy_pawn = -PAWN * color
    for df in (-1, 0, 1):
        ff = f + df
        if 0 <= ff < 8 and board[(ahead & ~7) | ff] == enemy_pawn:
            return False
    return True


class Searcher:
    """One search instance (single-threaded).

    Several searchers may share ``node_cache`` and ``evaluator`` objects when
    they run in the same thread (for instance across the organisms of one
    phase-3 generation); the caches hold pure functions of the position.
    """

    def __init__(self, eval_params: EvalParams, search_params: SearchParams = PLAIN_PARAMS,
                 evaluator: Evaluator | None = None, node_cache: NodeCache | None = None):
        if evaluator is not None and evaluator.params != eval_params:
            raise ValueError("evaluator was built for different EvalParams")
        self.eval_params = eval_params
        self.params = search_params
        self.evaluator = evaluator or Evaluator(eval_params)
        self.cache = node_cache or NodeCache()
        sp = search_params
        self._thresholds = (0, sp.futility_threshold_d1, sp.futility_threshold_d2, sp.futility_threshold_d3)
        self._ext = {n: min(getattr(sp, n), MAX_EXTENSION) for n in EXTENSION_FIELDS}
        self._extensions_on = any(self._ext.values())
        self.nodes = 0
        self.trace = None  # optional list collecting (ply, depth_units) of full-width nodes

    # ------------------------------------------------------------------
    def search(self, pos: Position, limits: SearchLimits, history: Iterable[int] = (),
               stop: threading.Event | None = None, on_iteration=None) -> SearchResult:
        """Iterative deepening from depth 1.

        ``history`` holds Zobrist keys of earlier game positions (repetition
        detection).  ``on_iteration(result)`` is called after every completed
        iteration and may return True to stop the search early.
        """
        root_facts = self.cache.facts(pos)
        if not root_facts[0]:
            raise ChessError("search called on a position with no legal moves")
        self.nodes = 0
        self._max_nodes = limits.max_nodes if limits.max_nodes is not None else float("inf")
        self._deadline = None if limits.max_time is None else time.monotonic() + limits.max_time / 1000.0
        self._stop = stop
        self._rep: dict[int, int] = {}
        for k in history:
            self._rep[k] = self._rep.get(k, 0) + 1
        max_depth = min(limits.max_depth or MAX_ITERATIONS, MAX_ITERATIONS)
        result = SearchResult(root_facts[2][0], 0, 0, 0, [root_facts[2][0]])
        self._prev_pv: list[Move] = []
        for depth in range(1, max_depth + 1):
            self._iter_depth = depth
            self._pv_table = [[] for _ in range(MAX_PLY + 2)]
            try:
                score = self._root(pos, depth * ONE_PLY)
            except SearchAborted:
                break
            pv = list(self._pv_table[0])
            result = SearchResult(pv[0], score, self.nodes, depth, pv)
            self._prev_pv = pv
            if on_iteration is not None and on_iteration(result):
                break
            if (self._stop is not None and self._stop.is_set()) or \
                    (self._deadline is not None and time.monotonic() >= self._deadline):
                break
        result.nodes = self.nodes
        return result

    # ------------------------------------------------------------------
    def _count(self):
        if self.nodes >= self._max_nodes:
            raise SearchAborted
        self.nodes += 1
        if not self.nodes & 255:
            if self._deadline is not None and time.monotonic() >= self._deadline:
                raise SearchAborted
            if self._stop is not None and self._stop.is_set():
                raise SearchAborted

    def _ordered(self, facts, ply, on_pv):
        """Ordered moves plus the PV move to follow (or None)."""
        moves = facts[2]
        if on_pv and ply < len(self._prev_pv):
            pm = self._prev_pv[ply]
            if pm in moves:
                return (pm,) + tuple(m for m in moves if m != pm), pm
        return moves, None

    def _root(self, pos: Position, depth: int) -> int:
        self._count()
        facts = self.cache.facts(pos)
        moves, first = self._ordered(facts, 0, True)
        best = -INFINITY
        alpha, beta = -INFINITY, INFINITY
        self._rep[pos.key] = self._rep.get(pos.key, 0) + 1
        try:
            for m in moves:
                child = apply_move(pos, m)
                ext = self._extension(pos, facts, m, child, None, 0)
                score = -self._negamax(child, depth - ONE_PLY + ext, -beta, -max(alpha, best), 1,
                                       m == first, m, m.to_sq if m.flags & (CAPTURE | EN_PASSANT) else None)
                if score > best:
                    best = score
                    self._pv_table[0] = [m] + self._pv_table[1]
        finally:
            self._release(pos.key)
        return best

    def _release(self, key):
        c = self._rep[key] - 1
        if c:
            self._rep[key] = c
        else:
            del self._rep[key]

    def _extension(self, pos, facts, m, child, prev_capture_sq, ply) -> int:
        if not self._extensions_on or ply >= 2 * self._iter_depth:
            return 0
        e = self._ext
        ext = 0
        if e["check_ext"] and child.in_check():
            ext += e["check_ext"]
        if e["one_reply_ext"] and len(facts[0]) == 1:
            ext += e["one_reply_ext"]
        if e["recapture_ext"] and prev_capture_sq is not None and m.to_sq == prev_capture_sq \
                and m.flags & (CAPTURE | EN_PASSANT):
            ext += e["recapture_ext"]
        if e["passed_pawn_ext"] and _is_passed_push(pos.board, m, pos.turn):
            ext += e["passed_pawn_ext"]
        return ext if ext < MAX_EXTENSION else MAX_EXTENSION

    def _negamax(self, pos: Position, depth: int, alpha: int, beta: int, ply: int,
                 on_pv: bool, last_move: Move | None, last_capture_sq: int | None,
                 null_ok: bool = True) -> int:
        if depth < ONE_PLY or ply >= MAX_PLY:
            self._pv_table[ply] = []
            return self._quiesce(pos, alpha, beta, ply)
        self._count()
        self._pv_table[ply] = []
        if pos.halfmove >= 100 or pos.key in self._rep:
            return 0
        if self.trace is not None:
            self.trace.append((ply, depth))
        facts = self.cache.facts(pos)
        legal, in_check = facts[0], facts[1]
        if not legal:
            return -MATE + ply if in_check else 0
        sp = self.params
        pv_node = beta - alpha > 1
        static = None
        plies = depth // ONE_PLY

        # null move
        if sp.null_move_use and null_ok and not in_check:
            r = sp.null_move_reduction if (sp.null_move_adaptivity_use and plies > sp.null_move_adaptivity_depth) \
                else max(1, sp.null_move_reduction - 1)
            if plies >= sp.null_move_reduction and _has_non_pawn_material(pos.board, pos.turn):
                static = self.evaluator(pos)
                if static >= beta:
                    child = make_null_move(pos)
                    self._rep[pos.key] = 1
                    try:
                        score = -self._negamax(child, depth - ONE_PLY - r * ONE_PLY, -beta, -beta + 1,
                                               ply + 1, False, None, None, False)
                    finally:
                        del self._rep[pos.key]
                    if score >= beta:
                        return beta if score >= MATE_BOUND else score
                    if score <= -MATE_BOUND and self._ext["mate_threat_ext"] and ply < 2 * self._iter_depth:
                        depth += self._ext["mate_threat_ext"]
                        plies = depth // ONE_PLY

        moves, first = self._ordered(facts, ply, on_pv)

        # multi-cut
        if (sp.multi_cut_use and not pv_node and not in_check and sp.multi_cut_cut_num >= 1
                and sp.multi_cut_move_num >= 1 and plies >= sp.multi_cut_depth):
            cuts = 0
            reduced = depth - ONE_PLY - sp.multi_cut_reduction * ONE_PLY
            self._rep[pos.key] = 1
            try:
                for m in moves[:sp.multi_cut_move_num]:
                    child = apply_move(pos, m)
                    score = -self._negamax(child, reduced, -beta, -beta + 1, ply + 1, False, m,
                                           m.to_sq if m.flags & (CAPTURE | EN_PASSANT) else None)
                    if score >= beta:
                        cuts += 1
                        if cuts >= sp.multi_cut_cut_num:
                            return beta
            finally:
                del self._rep[pos.key]

        # futility
        futile = False
        if 1 <= plies <= 3 and plies <= sp.futility_depth and not in_check:
            if static is None:
                static = self.evaluator(pos)
            margin = static + self._thresholds[plies]
            futile = margin <= alpha

        best = -INFINITY
        pv_table = self._pv_table
        self._rep[pos.key] = 1
        try:
            for m in moves:
                child = apply_move(pos, m)
                is_capture = m.flags & (CAPTURE | EN_PASSANT)
                if futile and not is_capture and not m.promotion and not child.in_check():
                    continue
                ext = self._extension(pos, facts, m, child, last_capture_sq, ply)
                score = -self._negamax(child, depth - ONE_PLY + ext, -beta, -max(alpha, best), ply + 1,
                                       m == first, m, m.to_sq if is_capture else None)
                if score > best:
                    best = score
                    pv_table[ply] = [m] + pv_table[ply + 1]
                    if score >= beta:
                        break
        finally:
            del self._rep[pos.key]
        if best == -INFINITY:
            # every move was futility-pruned: return the bound that justified it
            return margin
        return best

    def _quiesce(self, pos: Position, alpha: int, beta: int, ply: int) -> int:
        self._count()
        check, moves = self.cache.qfacts(pos)
        if check:
            if not moves:
                return -MATE + ply
            best = -INFINITY
        else:
            best = self.evaluator(pos)
            if best >= beta or ply >= MAX_PLY:
                return best
        for m in moves:
            score = -self._quiesce(apply_move(pos, m), -beta, -max(alpha, best), ply + 1)
            if score > best:
                best = score
                if score >= beta:
                    break
        if best == -INFINITY:
            return -MATE + ply
        return best


def search(pos: Position, eval_params: EvalParams, search_params: SearchParams = PLAIN_PARAMS,
           limits: SearchLimits | None = None, **kw) -> SearchResult:
    """Convenience wrapper building a fresh :class:`Searcher`."""
    if limits is None:
        raise ValueError("search needs SearchLimits")
    return Searcher(eval_params, search_params).search(pos, limits, **kw)


def solve_case(case, searcher: Searcher, node_cap: int) -> tuple[bool, int]:
    """``(solved, nodes)``: cumulative nodes until an iteration's best move is
    a listed solution, or ``(False, node_cap)`` when the cap (or the
    iteration limit) comes first.
    """
    if node_cap <= 0:
        raise ValueError("node_cap must be positive")
    found = []

    def check(res):
        if case.is_solution(res.best_move):
            found.append(res.nodes)
            return True
        return False

    searcher.search(case.position, SearchLimits(max_nodes=node_cap), on_iteration=check)
    return (True, found[0]) if found else (False, node_cap)


def search_nodes_to_solution(case, eval_params: EvalParams, search_params: SearchParams,
                             node_cap: int, searcher: Searcher | None = None) -> int:
    """Nodes :func:`solve_case` reports (``node_cap`` when unsolved)."""
    return solve_case(case, searcher or Searcher(eval_params, search_params), node_cap)[1]
