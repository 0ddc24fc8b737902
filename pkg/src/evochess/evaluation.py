"""Static evaluation under a 35-weight parameter vector.

Every term is a weight times an integer feature count, so a position's
score is ``features(pos) . weights``.  :func:`eval_features` returns the
white-minus-black feature vector; penalties enter it with a negative sign so
that all weights stay non-negative.

Feature definitions (applied to each color, ranks relative to that color,
0-based so a pawn's start rank is 1):

* ``PAWN_ADVANCE_A/B`` -- sum of (rank - 1) over pawns on files a-c,f-h (A)
  and d-e (B).
* ``PASSED_PAWN_MULT`` -- sum of rank over passed pawns (no enemy pawn ahead
  on the same or adjacent files).
* ``DOUBLED_PAWN_PENALTY`` -- extra pawns per file; ``ISOLATED`` -- pawns with
  no friendly pawn on adjacent files; ``BACKWARD`` -- non-isolated pawns with
  no friendly adjacent pawn level or behind, whose stop square is attacked by
  an enemy pawn.
* ``WEAK_SQUARE_PENALTY`` -- squares on own ranks 2-4 that no friendly pawn
  can ever attack.
* ``PASSED_PAWN_ENEMY_KING_DIST`` -- Chebyshev distance from the enemy king
  to each passed pawn.
* ``KNIGHT_SQ_MULT`` -- :data:`KNIGHT_TABLE` value (0-4) per knight;
  ``KNIGHT_OUTPOST_MULT`` -- the same table value for knights on ranks 3-5
  that are pawn-defended and cannot be attacked by enemy pawns.
* ``*_MOBILITY`` -- pseudo-legal target squares (empty or enemy).
* ``BISHOP_PAIR`` -- 1 with two or more bishops.
* Rook terms: same file as the enemy king; adjacent file (the ``ABGH``
  variant replaces it when the enemy king is on a, b, g or h); own 7th rank;
  two rooks seeing each other; on the file of an own passed pawn and behind
  it; open file; semi-open file; semi-open file whose enemy pawn is isolated
  or backward; ``ROOK_COLUMN_MULT`` times (7 - file distance to enemy king).
* King shield, per file of the king and its neighbours: a friendly pawn one
  rank ahead is fine, two ranks ahead costs ``KING_FRIENDLY_PAWN_ADVANCED1``,
  otherwise ``KING_NO_FRIENDLY_PAWN`` (king file) or ``..._ADJ``.  Files with
  no enemy pawn at all earn ``KING_NO_ENEMY_PAWN`` / ``..._ADJ``.
* ``KING_PRESSURE_MULT`` -- number of (piece, enemy-king-zone square) attack
  pairs, the zone being the king square and its neighbours; a bonus for the
  attacker is the same thing as a penalty for the defender.
"""
from __future__ import annotations

from operator import mul, sub
from pathlib import Path

import numpy as np

from .board import (
    BISHOP, BISHOP_RAYS, KING, KING_TARGETS, KNIGHT, KNIGHT_TARGETS, PAWN, PAWN_ATTACKS,
    QUEEN, QUEEN_RAYS, ROOK, ROOK_RAYS, WHITE, Position,
)

PARAM_NAMES = (
    "PAWN_VALUE", "KNIGHT_VALUE", "BISHOP_VALUE", "ROOK_VALUE", "QUEEN_VALUE",
    "PAWN_ADVANCE_A", "PAWN_ADVANCE_B", "PASSED_PAWN_MULT", "DOUBLED_PAWN_PENALTY",
    "ISOLATED_PAWN_PENALTY", "BACKWARD_PAWN_PENALTY", "WEAK_SQUARE_PENALTY",
    "PASSED_PAWN_ENEMY_KING_DIST", "KNIGHT_SQ_MULT", "KNIGHT_OUTPOST_MULT",
    "BISHOP_MOBILITY", "BISHOP_PAIR", "ROOK_ATTACK_KING_FILE", "ROOK_ATTACK_KING_ADJ_FILE",
    "ROOK_ATTACK_KING_ADJ_FILE_ABGH", "ROOK_7TH_RANK", "ROOK_CONNECTED", "ROOK_MOBILITY",
    "ROOK_BEHIND_PASSED_PAWN", "ROOK_OPEN_FILE", "ROOK_SEMI_OPEN_FILE",
    "ROOK_ATCK_WEAK_PAWN_OPEN_COLUMN", "ROOK_COLUMN_MULT", "QUEEN_MOBILITY",
    "KING_NO_FRIENDLY_PAWN", "KING_NO_FRIENDLY_PAWN_ADJ", "KING_FRIENDLY_PAWN_ADVANCED1",
    "KING_NO_ENEMY_PAWN", "KING_NO_ENEMY_PAWN_ADJ", "KING_PRESSURE_MULT",
)
N_PARAMS = len(PARAM_NAMES)
MATERIAL_NAMES = PARAM_NAMES[:5]
PAWN_VALUE = 100

(I_PAWN, I_KNIGHT, I_BISHOP, I_ROOK, I_QUEEN, I_ADV_A, I_ADV_B, I_PASSED, I_DOUBLED,
 I_ISOLATED, I_BACKWARD, I_WEAK, I_PP_KDIST, I_KNIGHT_SQ, I_OUTPOST, I_B_MOB, I_B_PAIR,
 I_R_KFILE, I_R_KADJ, I_R_KADJ_ABGH, I_R_7TH, I_R_CONN, I_R_MOB, I_R_BEHIND_PP,
 I_R_OPEN, I_R_SEMI, I_R_WEAK_PAWN, I_R_COLUMN, I_Q_MOB, I_K_NO_PAWN, I_K_NO_PAWN_ADJ,
 I_K_ADV1, I_K_NO_ENEMY, I_K_NO_ENEMY_ADJ, I_K_PRESSURE) = range(N_PARAMS)

# centricity 0..4: distance from the nearest edge file plus nearest edge rank, capped
KNIGHT_TABLE = tuple(min(4, min(sq & 7, 7 - (sq & 7)) + min(sq >> 3, 7 - (sq >> 3))) for sq in range(64))
KING_ZONE = tuple(frozenset(KING_TARGETS[sq] + (sq,)) for sq in range(64))

_MATERIAL_INDEX = {PAWN: I_PAWN, KNIGHT: I_KNIGHT, BISHOP: I_BISHOP, ROOK: I_ROOK, QUEEN: I_QUEEN}


class EvalParams:
    """The 35 evaluation weights, ``PAWN_VALUE`` pinned at 100.

    Index by name (``params["ROOK_VALUE"]``) or use :attr:`weights` for the
    numpy vector in :data:`PARAM_NAMES` order.
    """

    __slots__ = ("_values",)

    def __init__(self, values=None, **named):
        if values is None:
            vals = dict.fromkeys(PARAM_NAMES, 0)
        elif isinstance(values, dict):
            vals = dict.fromkeys(PARAM_NAMES, 0)
            vals.update(values)
        else:
            values = list(values)
            if len(values) != N_PARAMS:
                raise ValueError(f"expected {N_PARAMS} values, got {len(values)}")
            vals = dict(zip(PARAM_NAMES, values))
        vals.update(named)
        vals.setdefault("PAWN_VALUE", PAWN_VALUE)
        unknown = set(vals) - set(PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown evaluation parameters: {sorted(unknown)}")
        if vals["PAWN_VALUE"] != PAWN_VALUE:
            raise ValueError("PAWN_VALUE is fixed at 100")
        out = []
        for name in PARAM_NAMES:
            v = vals[name]
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            out.append(int(v))
        self._values = tuple(out)

    def __getitem__(self, name: str) -> int:
        return self._values[PARAM_NAMES.index(name)]

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return N_PARAMS

    def __eq__(self, other):
        return isinstance(other, EvalParams) and self._values == other._values

    def __hash__(self):
        return hash(self._values)

    def __repr__(self):
        return f"EvalParams({dict(self.items())})"

    def items(self):
        return zip(PARAM_NAMES, self._values)

    def replace(self, **changes) -> "EvalParams":
        vals = dict(self.items())
        vals.update(changes)
        return EvalParams(vals)

    @property
    def values(self) -> tuple[int, ...]:
        return self._values

    @property
    def weights(self) -> np.ndarray:
        return np.array(self._values, dtype=np.int64)

    # text format: one "NAME value" per line -------------------------------
    def to_text(self, header: str | None = None) -> str:
        lines = [f"# {ln}" for ln in header.splitlines()] if header else []
        lines += [f"{name:<34} {v:>5}" for name, v in self.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EvalParams":
        vals = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {n}: expected 'NAME value', got {line!r}")
            name, value = parts
            if name not in PARAM_NAMES:
                raise ValueError(f"line {n}: unknown parameter {name!r}")
            vals[name] = int(value)
        missing = [nm for nm in PARAM_NAMES if nm not in vals]
        if missing:
            raise ValueError(f"missing parameters: {missing}")
        return cls(vals)

    def save(self, path, header: str | None = None) -> None:
        Path(path).write_text(self.to_text(header))

    @classmethod
    def load(cls, path) -> "EvalParams":
        return cls.from_text(Path(path).read_text())


# Values reported for the best evolved organism (averaged over ten runs).
REFERENCE_PARAMS = EvalParams(dict(zip(PARAM_NAMES, (
    100, 521, 572, 824, 1710, 3, 6, 10, 14, 8, 3, 5, 7, 6, 9, 4, 28, 51, 8, 26, 30, 6, 4,
    40, 27, 11, 15, 6, 2, 35, 10, 6, 17, 9, 4))))


# ---------------------------------------------------------------------------

def _pawn_structure(white, own, enemy):
    """Pawn-only terms for one color (cached by the caller).

    ``own[file]`` / ``enemy[file]`` hold pawn ranks relative to the color.
    Returns the seven pawn counts, the passed pawns as ``(file, absolute
    rank)``, the most advanced passed rank per file, the enemy files whose
    pawns count as weak, and the per-file maximum enemy rank on adjacent files.
    """
    own_min = [min(r) if r else 8 for r in own]
    en_max = [max(r) if r else -1 for r in enemy]
    own_adj_min = [min(own_min[f - 1] if f > 0 else 8, own_min[f + 1] if f < 7 else 8) for f in range(8)]
    en_near_max = [max(en_max[f], en_max[f - 1] if f > 0 else -1, en_max[f + 1] if f < 7 else -1)
                   for f in range(8)]
    en_adj_max = tuple(max(en_max[f - 1] if f > 0 else -1, en_max[f + 1] if f < 7 else -1) for f in range(8))

    adv_a = adv_b = passed = doubled = isolated = backward = weak = 0
    passed_pawns = []
    passed_files = {}
    weak_enemy_files = set()
    for file in range(8):
        ranks = own[file]
        adj_min = own_adj_min[file]
        weak_here = (adj_min if adj_min < 4 else 4) - 1
        if weak_here > 0:
            weak += weak_here
        er = enemy[file]
        if er:
            if en_adj_max[file] < 0:
                weak_enemy_files.add(file)
            else:
                left = own[file - 1] if file > 0 else ()
                right = own[file + 1] if file < 7 else ()
                for r in er:
                    # enemy pawns advance toward lower relative ranks
                    if en_adj_max[file] < r and (r - 2 in left or r - 2 in right):
                        weak_enemy_files.add(file)
                        break
        if not ranks:
            continue
        n = len(ranks)
        if n > 1:
            doubled += n - 1
        is_isolated = adj_min == 8
        near_max = en_near_max[file]
        central = file == 3 or file == 4
        for r in ranks:
            if central:
                adv_b += r - 1
            else:
                adv_a += r - 1
            if is_isolated:
                isolated += 1
            elif adj_min > r:
                stop = r + 2
                if (file > 0 and stop in enemy[file - 1]) or (file < 7 and stop in enemy[file + 1]):
                    backward += 1
            if near_max <= r:
                passed += r
                passed_pawns.append((file, r if white else 7 - r))
                if passed_files.get(file, -1) < r:
                    passed_files[file] = r
    return ((adv_a, adv_b, passed, doubled, isolated, backward, weak), tuple(passed_pawns),
            passed_files, frozenset(weak_enemy_files), en_adj_max)


def _side_features(board, color, own, enemy, pieces, own_king, enemy_king, structure):
    """Feature counts for one color (penalties negative, no material).

    ``own[file]`` / ``enemy[file]`` hold pawn ranks relative to ``color``;
    ``pieces`` lists ``(square, kind)`` for the color's N, B, R, Q;
    ``structure`` is this color's :func:`_pawn_structure` result.
    """
    white = color == WHITE
    ekf, ekr = enemy_king & 7, enemy_king >> 3
    zone = KING_ZONE[enemy_king]
    counts, passed_pawns, passed_files, weak_enemy_files, en_adj_max = structure
    adv_a, adv_b, passed, doubled, isolated, backward, weak = counts
    kdist = 0
    for file, rank in passed_pawns:
        df = ekf - file
        dr = ekr - rank
        if df < 0:
            df = -df
        if dr < 0:
            dr = -dr
        kdist += df if df > dr else dr

    knight_sq = outpost = b_mob = r_mob = q_mob = pressure = 0
    r_kfile = r_kadj = r_kadj_abgh = r_7th = r_conn = r_behind = r_open = r_semi = 0
    r_weak = r_column = 0
    bishops = 0
    rooks = []
    own_pawn = PAWN * color
    enemy_pawn_attacks = PAWN_ATTACKS[-color]
    for sq, kind in pieces:
        file = sq & 7
        if kind == KNIGHT:
            knight_sq += KNIGHT_TABLE[sq]
            for t in KNIGHT_TARGETS[sq]:
                if t in zone:
                    pressure += 1
            rr = (sq >> 3) if white else 7 - (sq >> 3)
            if 3 <= rr <= 5 and en_adj_max[file] <= rr:
                for t in enemy_pawn_attacks[sq]:
                    if board[t] == own_pawn:
                        outpost += KNIGHT_TABLE[sq]
                        break
            continue
        rays = BISHOP_RAYS[sq] if kind == BISHOP else ROOK_RAYS[sq] if kind == ROOK else QUEEN_RAYS[sq]
        mob = 0
        for ray in rays:
            for t in ray:
                q = board[t]
                if t in zone:
                    pressure += 1
                if not q:
                    mob += 1
                    continue
                if q * color < 0:
                    mob += 1
                break
        if kind == BISHOP:
            bishops += 1
            b_mob += mob
        elif kind == QUEEN:
            q_mob += mob
        else:
            r_mob += mob
            rooks.append(sq)
            dist = file - ekf if file >= ekf else ekf - file
            if dist == 0:
                r_kfile += 1
            elif dist == 1:
                if ekf <= 1 or ekf >= 6:
                    r_kadj_abgh += 1
                else:
                    r_kadj += 1
            r_column += 7 - dist
            rr = (sq >> 3) if white else 7 - (sq >> 3)
            if rr == 6:
                r_7th += 1
            if not own[file]:
                if enemy[file]:
                    r_semi += 1
                    if file in weak_enemy_files:
                        r_weak += 1
                else:
                    r_open += 1
            if rr < passed_files.get(file, -1):
                r_behind += 1
    # pawns attacking the enemy king zone: only possible within two files
    pawn_attacks = PAWN_ATTACKS[color]
    for file in range(max(0, ekf - 2), min(7, ekf + 2) + 1):
        for r in own[file]:
            for t in pawn_attacks[file + 8 * (r if white else 7 - r)]:
                if t in zone:
                    pressure += 1
    if len(rooks) > 1:
        for i in range(len(rooks)):
            for j in range(i + 1, len(rooks)):
                if _sees(board, rooks[i], rooks[j]):
                    r_conn += 1

    k_no_pawn = k_no_pawn_adj = k_adv1 = k_no_enemy = k_no_enemy_adj = 0
    kf = own_king & 7
    kr = (own_king >> 3) if white else 7 - (own_king >> 3)
    for file in (kf - 1, kf, kf + 1):
        if file < 0 or file > 7:
            continue
        ranks = own[file]
        if kr + 1 in ranks:
            pass
        elif kr + 2 in ranks:
            k_adv1 += 1
        elif file == kf:
            k_no_pawn += 1
        else:
            k_no_pawn_adj += 1
        if not enemy[file]:
            if file == kf:
                k_no_enemy += 1
            else:
                k_no_enemy_adj += 1

    return (0, 0, 0, 0, 0, adv_a, adv_b, passed, -doubled, -isolated, -backward, -weak, kdist,
            knight_sq, outpost, b_mob, 1 if bishops >= 2 else 0, r_kfile, r_kadj, r_kadj_abgh,
            r_7th, r_conn, r_mob, r_behind, r_open, r_semi, r_weak, r_column, q_mob,
            -k_no_pawn, -k_no_pawn_adj, -k_adv1, k_no_enemy, k_no_enemy_adj, pressure)


def _sees(board, a, b):
    if a & 7 == b & 7:
        step = 8
    elif a >> 3 == b >> 3:
        step = 1
    else:
        return False
    lo, hi = min(a, b), max(a, b)
    return all(board[t] == 0 for t in range(lo + step, hi, step))


# Pawn-structure terms depend on pawn placement alone, which changes rarely
# inside a search tree.  The memo holds pure values, so sharing it between
# threads can at worst duplicate work.
_PAWN_CACHE: dict[tuple, tuple] = {}
_PAWN_CACHE_SIZE = 50_000


def eval_features(pos: Position) -> list[int]:
    """White-minus-black feature counts, in :data:`PARAM_NAMES` order."""
    board = pos.board
    wp = [[], [], [], [], [], [], [], []]   # white pawn ranks, white-relative
    bp = [[], [], [], [], [], [], [], []]   # black pawn ranks, black-relative
    wpieces = []
    bpieces = []
    pawn_key = []
    counts = [0, 0, 0, 0, 0, 0, 0]
    for sq, p in enumerate(board):
        if not p:
            continue
        if p > 0:
            counts[p] += 1
            if p == PAWN:
                wp[sq & 7].append(sq >> 3)
                pawn_key.append(sq)
            elif p != KING:
                wpieces.append((sq, p))
        else:
            counts[-p] -= 1
            if p == -PAWN:
                bp[sq & 7].append(7 - (sq >> 3))
                pawn_key.append(sq + 64)
            elif p != -KING:
                bpieces.append((sq, -p))
    # the other side's pawn ranks seen from each color
    bp_w = [[7 - r for r in ranks] for ranks in bp]
    wp_b = [[7 - r for r in ranks] for ranks in wp]
    pawn_key = tuple(pawn_key)
    structures = _PAWN_CACHE.get(pawn_key)
    if structures is None:
        structures = (_pawn_structure(True, wp, bp_w), _pawn_structure(False, bp, wp_b))
        if len(_PAWN_CACHE) >= _PAWN_CACHE_SIZE:
            _PAWN_CACHE.clear()
        _PAWN_CACHE[pawn_key] = structures
    wk, bk = pos.kings
    w = _side_features(board, WHITE, wp, bp_w, wpieces, wk, bk, structures[0])
    b = _side_features(board, -WHITE, bp, wp_b, bpieces, bk, wk, structures[1])
    f = list(map(sub, w, b))
    f[I_PAWN], f[I_KNIGHT], f[I_BISHOP], f[I_ROOK], f[I_QUEEN] = counts[1:6]
    return f


def evaluate(pos: Position, params: EvalParams) -> int:
    """Centipawn score from the side to move's point of view."""
    return pos.turn * sum(map(mul, eval_features(pos), params.values))


def material_count(pos: Position, params: EvalParams) -> int:
    """Material balance, white's point of view."""
    v = params.values
    total = 0
    for p in pos.board:
        if p and p != KING and p != -KING:
            total += v[_MATERIAL_INDEX[abs(p)]] if p > 0 else -v[_MATERIAL_INDEX[-p]]
    return total


class Evaluator:
    """Cached evaluation for one parameter set.

    The cache is keyed by the position's Zobrist key and only saves time; it
    never changes a score.
    """

    def __init__(self, params: EvalParams, cache_size: int = 1 << 20):
        self.params = params
        self._w = params.values
        self._cache: dict[int, int] = {}
        self.cache_size = cache_size

    def __call__(self, pos: Position) -> int:
        key = pos.key
        cache = self._cache
        white_score = cache.get(key)
        if white_score is None:
            white_score = sum(map(mul, eval_features(pos), self._w))
            if len(cache) >= self.cache_size:
                cache.clear()
            cache[key] = white_score
        return pos.turn * white_score
