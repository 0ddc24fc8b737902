"""Board representation, legal move generation and FEN.

Squares are 0..63 with a1 = 0, b1 = 1, ..., h8 = 63.  Pieces are small
integers, positive for white and negative for black::

    PAWN=1 KNIGHT=2 BISHOP=3 ROOK=4 QUEEN=5 KING=6

A :class:`Position` is immutable; :func:`make_move` returns a new one.
:func:`legal_moves` returns moves ordered by from-square, then to-square,
then promotion piece (Q, R, B, N).
"""
from __future__ import annotations

import random
from typing import Iterator, NamedTuple

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6
WHITE, BLACK = 1, -1

PIECE_SYMBOLS = ".pnbrqk"
FILE_NAMES = "abcdefgh"

CASTLE_WK, CASTLE_WQ, CASTLE_BK, CASTLE_BQ = 1, 2, 4, 8

# move flags
CAPTURE = 1
EN_PASSANT = 2
CASTLE = 4
DOUBLE_PUSH = 8

STARTING_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"


class ChessError(ValueError):
    """Malformed or illegal chess input."""


class IllegalMoveError(ChessError):
    pass


def square_name(sq: int) -> str:
    return FILE_NAMES[sq & 7] + str((sq >> 3) + 1)


def parse_square(name: str) -> int:
    if len(name) != 2 or name[0] not in FILE_NAMES or name[1] not in "12345678":
        raise ChessError(f"bad square {name!r}")
    return FILE_NAMES.index(name[0]) + 8 * (int(name[1]) - 1)


class Move(NamedTuple):
    from_sq: int
    to_sq: int
    promotion: int = 0
    flags: int = 0

    @property
    def is_capture(self) -> bool:
        return bool(self.flags & CAPTURE)

    def uci(self) -> str:
        s = square_name(self.from_sq) + square_name(self.to_sq)
        if self.promotion:
            s += PIECE_SYMBOLS[self.promotion]
        return s

    def same_as(self, other: "Move") -> bool:
        """Compare by squares and promotion only (ignores flags)."""
        return (self.from_sq, self.to_sq, self.promotion) == (other.from_sq, other.to_sq, other.promotion)

    def __str__(self) -> str:
        return self.uci()


# ---------------------------------------------------------------------------
# precomputed geometry

def _step_targets(deltas):
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        out = []
        for df, dr in deltas:
            nf, nr = f + df, r + dr
            if 0 <= nf < 8 and 0 <= nr < 8:
                out.append(nf + 8 * nr)
        table.append(tuple(sorted(out)))
    return tuple(table)


def _rays(deltas):
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        rays = []
        for df, dr in deltas:
            ray = []
            nf, nr = f + df, r + dr
            while 0 <= nf < 8 and 0 <= nr < 8:
                ray.append(nf + 8 * nr)
                nf += df
                nr += dr
            if ray:
                rays.append(tuple(ray))
        table.append(tuple(rays))
    return tuple(table)


KNIGHT_DELTAS = ((1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2))
KING_DELTAS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
ROOK_DIRS = ((0, 1), (0, -1), (1, 0), (-1, 0))
BISHOP_DIRS = ((1, 1), (-1, 1), (1, -1), (-1, -1))

KNIGHT_TARGETS = _step_targets(KNIGHT_DELTAS)
KING_TARGETS = _step_targets(KING_DELTAS)
ROOK_RAYS = _rays(ROOK_DIRS)
BISHOP_RAYS = _rays(BISHOP_DIRS)
QUEEN_RAYS = tuple(ROOK_RAYS[sq] + BISHOP_RAYS[sq] for sq in range(64))
# squares attacked by a pawn of the given color standing on sq
PAWN_ATTACKS = {
    WHITE: _step_targets(((-1, 1), (1, 1))),
    BLACK: _step_targets(((-1, -1), (1, -1))),
}
# squares from which a pawn of the given color would attack sq
PAWN_ATTACKERS = {WHITE: PAWN_ATTACKS[BLACK], BLACK: PAWN_ATTACKS[WHITE]}

_zrng = random.Random(0x5EED)
ZOBRIST_PIECE = {p: tuple(_zrng.getrandbits(64) for _ in range(64))
                 for p in (1, 2, 3, 4, 5, 6, -1, -2, -3, -4, -5, -6)}
ZOBRIST_BLACK = _zrng.getrandbits(64)
ZOBRIST_CASTLE = tuple(_zrng.getrandbits(64) for _ in range(16))
ZOBRIST_EP = tuple(_zrng.getrandbits(64) for _ in range(8))

# castling-right bits cleared when a piece moves from/to a square
_CASTLE_MASK = [15] * 64
_CASTLE_MASK[4] = 15 & ~(CASTLE_WK | CASTLE_WQ)
_CASTLE_MASK[0] = 15 & ~CASTLE_WQ
_CASTLE_MASK[7] = 15 & ~CASTLE_WK
_CASTLE_MASK[60] = 15 & ~(CASTLE_BK | CASTLE_BQ)
_CASTLE_MASK[56] = 15 & ~CASTLE_BQ
_CASTLE_MASK[63] = 15 & ~CASTLE_BK
CASTLE_MASK = tuple(_CASTLE_MASK)

PROMOTION_PIECES = (QUEEN, ROOK, BISHOP, KNIGHT)


class Position:
    """Immutable chess position.

    ``board`` is a 64-tuple of signed piece codes; ``turn`` is ``WHITE`` (1)
    or ``BLACK`` (-1); ``castling`` is a bitmask of ``CASTLE_*``; ``ep`` is
    the en-passant target square or ``None``.
    """

    __slots__ = ("board", "turn", "castling", "ep", "halfmove", "fullmove",
                 "kings", "key", "_in_check", "_legal")

    def __init__(self, board, turn, castling, ep, halfmove, fullmove, kings=None, key=None):
        self.board = board
        self.turn = turn
        self.castling = castling
        self.ep = ep
        self.halfmove = halfmove
        self.fullmove = fullmove
        if kings is None:
            kings = (board.index(KING), board.index(-KING))
        self.kings = kings
        if key is None:
            key = _compute_key(board, turn, castling, ep)
        self.key = key
        self._in_check = None
        self._legal = None

    # value semantics -----------------------------------------------------
    def _fields(self):
        return (self.board, self.turn, self.castling, self.ep, self.halfmove, self.fullmove)

    def __eq__(self, other):
        return isinstance(other, Position) and self._fields() == other._fields()

    def __hash__(self):
        return hash(self._fields())

    def __repr__(self):
        return f"Position({to_fen(self)!r})"

    # convenience -----------------------------------------------------------
    @property
    def king_square(self) -> int:
        return self.kings[0] if self.turn == WHITE else self.kings[1]

    def in_check(self) -> bool:
        if self._in_check is None:
            self._in_check = is_attacked(self.board, self.king_square, -self.turn)
        return self._in_check

    def piece_at(self, sq: int) -> int:
        return self.board[sq]

    def repetition_key(self) -> int:
        """Hash of placement, side, castling and *capturable* en-passant square."""
        if self.ep is None:
            return self.key
        pawn = PAWN * self.turn
        for s in PAWN_ATTACKERS[self.turn][self.ep]:
            if self.board[s] == pawn:
                return self.key
        return self.key ^ ZOBRIST_EP[self.ep & 7]

    def __str__(self):
        rows = []
        for r in range(7, -1, -1):
            row = []
            for f in range(8):
                p = self.board[8 * r + f]
                c = PIECE_SYMBOLS[abs(p)]
                row.append(c.upper() if p > 0 else c)
            rows.append(" ".join(row))
        return "\n".join(rows)


def _compute_key(board, turn, castling, ep):
    k = 0
    for sq, p in enumerate(board):
        if p:
            k ^= ZOBRIST_PIECE[p][sq]
    if turn == BLACK:
        k ^= ZOBRIST_BLACK
    k ^= ZOBRIST_CASTLE[castling]
    if ep is not None:
        k ^= ZOBRIST_EP[ep & 7]
    return k


# ---------------------------------------------------------------------------
# attacks

def is_attacked(board, sq: int, by: int) -> bool:
    """True if any piece of color ``by`` attacks ``sq``."""
    for s in PAWN_ATTACKERS[by][sq]:
        if board[s] == PAWN * by:
            return True
    n = KNIGHT * by
    for s in KNIGHT_TARGETS[sq]:
        if board[s] == n:
            return True
    k = KING * by
    for s in KING_TARGETS[sq]:
        if board[s] == k:
            return True
    r, q, b = ROOK * by, QUEEN * by, BISHOP * by
    for ray in ROOK_RAYS[sq]:
        for s in ray:
            p = board[s]
            if p:
                if p == r or p == q:
                    return True
                break
    for ray in BISHOP_RAYS[sq]:
        for s in ray:
            p = board[s]
            if p:
                if p == b or p == q:
                    return True
                break
    return False


def attackers(board, sq: int, by: int) -> list[int]:
    """Squares of pieces of color ``by`` attacking ``sq``."""
    out = [s for s in PAWN_ATTACKERS[by][sq] if board[s] == PAWN * by]
    out += [s for s in KNIGHT_TARGETS[sq] if board[s] == KNIGHT * by]
    out += [s for s in KING_TARGETS[sq] if board[s] == KING * by]
    for rays, kind in ((ROOK_RAYS[sq], ROOK), (BISHOP_RAYS[sq], BISHOP)):
        for ray in rays:
            for s in ray:
                p = board[s]
                if p:
                    if p == kind * by or p == QUEEN * by:
                        out.append(s)
                    break
    return out


def _pins(board, ksq, us):
    """Map pinned square -> set of squares it may still move to."""
    pins = {}
    them = -us
    for rays, kind in ((ROOK_RAYS[ksq], ROOK), (BISHOP_RAYS[ksq], BISHOP)):
        for ray in rays:
            own = -1
            for i, s in enumerate(ray):
                p = board[s]
                if not p:
                    continue
                if own < 0:
                    if p * us > 0:
                        own = i
                        continue
                    break
                if p == kind * them or p == QUEEN * them:
                    pins[ray[own]] = frozenset(ray[:i + 1])
                break
    return pins


# ---------------------------------------------------------------------------
# move generation

# interned move objects: index (from << 6) | to
_QUIET = tuple(Move(f, t, 0, 0) for f in range(64) for t in range(64))
_CAPT = tuple(Move(f, t, 0, CAPTURE) for f in range(64) for t in range(64))


def _pawn_targets(board, sq, us, ep, push, start_rank, quiet):
    tgt = []
    to = sq + push
    if quiet or (to >> 3) in (0, 7):
        if not board[to]:
            tgt.append((to, 0))
            if quiet and sq >> 3 == start_rank and not board[to + push]:
                tgt.append((to + push, DOUBLE_PUSH))
    for t in PAWN_ATTACKS[us][sq]:
        if t == ep:
            tgt.append((t, EN_PASSANT | CAPTURE))
        elif board[t] * us < 0:
            tgt.append((t, CAPTURE))
    if len(tgt) > 1:
        tgt.sort()
    return tgt


def _pseudo_moves(pos: Position, quiet: bool = True) -> list[Move]:
    """Pseudo-legal moves in generation order.

    With ``quiet=False`` only captures (including en passant) and promotions
    are produced, still in generation order.
    """
    board = pos.board
    us = pos.turn
    moves = []
    add = moves.append
    extend = moves.extend
    if us == WHITE:
        push, start_rank, promo_rank = 8, 1, 7
    else:
        push, start_rank, promo_rank = -8, 6, 0
    ep = pos.ep
    quiet_tab, capt_tab = _QUIET, _CAPT
    for sq, p in enumerate(board):
        p *= us
        if p <= 0:
            continue
        base = sq << 6
        if p == PAWN:
            for t, fl in _pawn_targets(board, sq, us, ep, push, start_rank, quiet):
                if t >> 3 == promo_rank:
                    for pr in PROMOTION_PIECES:
                        add(Move(sq, t, pr, fl))
                elif fl == CAPTURE:
                    add(capt_tab[base | t])
                elif fl:
                    add(Move(sq, t, 0, fl))
                else:
                    add(quiet_tab[base | t])
        elif p == KNIGHT or p == KING:
            table = KNIGHT_TARGETS if p == KNIGHT else KING_TARGETS
            tg = []
            for t in table[sq]:
                q = board[t] * us
                if q == 0:
                    if quiet:
                        tg.append(quiet_tab[base | t])
                elif q < 0:
                    tg.append(capt_tab[base | t])
            if p == KING and quiet:
                extra = _castle_moves(pos, sq)
                if extra:
                    tg.extend(extra)
                    tg.sort()
            extend(tg)
        else:
            rays = BISHOP_RAYS[sq] if p == BISHOP else ROOK_RAYS[sq] if p == ROOK else QUEEN_RAYS[sq]
            tg = []
            for ray in rays:
                for t in ray:
                    q = board[t]
                    if not q:
                        if quiet:
                            tg.append(quiet_tab[base | t])
                    else:
                        if q * us < 0:
                            tg.append(capt_tab[base | t])
                        break
            tg.sort()
            extend(tg)
    return moves


def _castle_moves(pos, ksq):
    board, us, rights = pos.board, pos.turn, pos.castling
    out = []
    if us == WHITE:
        if ksq != 4:
            return out
        k_side, q_side, rook = CASTLE_WK, CASTLE_WQ, ROOK
    else:
        if ksq != 60:
            return out
        k_side, q_side, rook = CASTLE_BK, CASTLE_BQ, -ROOK
    if not rights & (k_side | q_side) or pos.in_check():
        return out
    them = -us
    if rights & k_side and board[ksq + 3] == rook and not board[ksq + 1] and not board[ksq + 2]:
        if not is_attacked(board, ksq + 1, them) and not is_attacked(board, ksq + 2, them):
            out.append(Move(ksq, ksq + 2, 0, CASTLE))
    if (rights & q_side and board[ksq - 4] == rook and not board[ksq - 1]
            and not board[ksq - 2] and not board[ksq - 3]):
        if not is_attacked(board, ksq - 1, them) and not is_attacked(board, ksq - 2, them):
            out.append(Move(ksq, ksq - 2, 0, CASTLE))
    return out


def _leaves_king_safe(pos, m):
    board = list(pos.board)
    us = pos.turn
    p = board[m.from_sq]
    board[m.to_sq] = p
    board[m.from_sq] = 0
    if m.flags & EN_PASSANT:
        board[m.to_sq - 8 * us] = 0
    ksq = m.to_sq if p * us == KING else pos.king_square
    return not is_attacked(board, ksq, -us)


def _filter_legal(pos: Position, pseudo: list[Move]) -> list[Move]:
    us = pos.turn
    ksq = pos.king_square
    board = pos.board
    if pos.in_check():
        return [m for m in pseudo if _leaves_king_safe(pos, m)]
    pins = _pins(board, ksq, us)
    legal = []
    stripped = None
    for m in pseudo:
        f = m.from_sq
        if f == ksq:
            if m.flags & CASTLE:
                legal.append(m)
                continue
            if stripped is None:
                stripped = list(board)
                stripped[ksq] = 0
            if not is_attacked(stripped, m.to_sq, -us):
                legal.append(m)
        elif m.flags & EN_PASSANT:
            if _leaves_king_safe(pos, m):
                legal.append(m)
        elif f in pins:
            if m.to_sq in pins[f]:
                legal.append(m)
        else:
            legal.append(m)
    return legal


def legal_moves(pos: Position) -> list[Move]:
    """All legal moves, ordered by (from-square, to-square, promotion Q/R/B/N)."""
    if pos._legal is not None:
        return list(pos._legal)
    legal = _filter_legal(pos, _pseudo_moves(pos))
    pos._legal = tuple(legal)
    return legal


def noisy_moves(pos: Position) -> list[Move]:
    """Legal captures and promotions, in generation order."""
    if pos._legal is not None:
        return [m for m in pos._legal if m.flags & (CAPTURE | EN_PASSANT) or m.promotion]
    return _filter_legal(pos, _pseudo_moves(pos, quiet=False))


def has_legal_move(pos: Position) -> bool:
    return bool(legal_moves(pos))


def apply_move(pos: Position, m: Move) -> Position:
    """Make ``m`` without checking legality (internal fast path)."""
    board = list(pos.board)
    us = pos.turn
    f, t = m.from_sq, m.to_sq
    p = board[f]
    captured = board[t]
    key = pos.key ^ ZOBRIST_BLACK ^ ZOBRIST_CASTLE[pos.castling]
    if pos.ep is not None:
        key ^= ZOBRIST_EP[pos.ep & 7]
    zp = ZOBRIST_PIECE
    key ^= zp[p][f]
    if captured:
        key ^= zp[captured][t]
    board[f] = 0
    new_p = p
    if m.promotion:
        new_p = m.promotion * us
    board[t] = new_p
    key ^= zp[new_p][t]
    ep = None
    kings = pos.kings
    kind = p * us
    if kind == PAWN:
        if m.flags & EN_PASSANT:
            cap_sq = t - 8 * us
            key ^= zp[board[cap_sq]][cap_sq]
            board[cap_sq] = 0
        elif m.flags & DOUBLE_PUSH:
            ep = (f + t) >> 1
            key ^= ZOBRIST_EP[ep & 7]
    elif kind == KING:
        kings = (t, kings[1]) if us == WHITE else (kings[0], t)
        if m.flags & CASTLE:
            if t > f:
                rf, rt = f + 3, f + 1
            else:
                rf, rt = f - 4, f - 1
            rook = board[rf]
            board[rf] = 0
            board[rt] = rook
            key ^= zp[rook][rf] ^ zp[rook][rt]
    castling = pos.castling & CASTLE_MASK[f] & CASTLE_MASK[t]
    key ^= ZOBRIST_CASTLE[castling]
    halfmove = 0 if (kind == PAWN or captured or m.flags & EN_PASSANT) else pos.halfmove + 1
    fullmove = pos.fullmove + (1 if us == BLACK else 0)
    return Position(tuple(board), -us, castling, ep, halfmove, fullmove, kings, key)


def make_move(pos: Position, m: Move) -> Position:
    """Return the position after the legal move ``m``.

    Raises :class:`IllegalMoveError` if ``m`` is not legal in ``pos``.  Moves
    are matched on squares and promotion, so flags may be omitted.
    """
    for lm in legal_moves(pos):
        if lm.from_sq == m.from_sq and lm.to_sq == m.to_sq and lm.promotion == m.promotion:
            return apply_move(pos, lm)
    raise IllegalMoveError(f"illegal move {m.uci()} in {to_fen(pos)}")


def make_null_move(pos: Position) -> Position:
    key = pos.key ^ ZOBRIST_BLACK
    if pos.ep is not None:
        key ^= ZOBRIST_EP[pos.ep & 7]
    return Position(pos.board, -pos.turn, pos.castling, None, pos.halfmove + 1,
                    pos.fullmove + (1 if pos.turn == BLACK else 0), pos.kings, key)


def parse_uci(pos: Position, text: str) -> Move:
    """Resolve a UCI move string (e.g. ``e7e8q``) against the legal moves."""
    text = text.strip()
    if len(text) not in (4, 5):
        raise ChessError(f"bad UCI move {text!r}")
    f, t = parse_square(text[:2]), parse_square(text[2:4])
    promo = 0
    if len(text) == 5:
        if text[4].lower() not in "nbrq":
            raise ChessError(f"bad promotion in {text!r}")
        promo = PIECE_SYMBOLS.index(text[4].lower())
    for m in legal_moves(pos):
        if m.from_sq == f and m.to_sq == t and m.promotion == promo:
            return m
    raise IllegalMoveError(f"illegal move {text} in {to_fen(pos)}")


def gives_check(pos: Position, m: Move) -> bool:
    return apply_move(pos, m).in_check()


def perft(pos: Position, depth: int) -> int:
    """Leaf count of the legal move tree of the given depth."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = _legal_uncached(pos)
    if depth == 1:
        return len(moves)
    return sum(perft(apply_move(pos, m), depth - 1) for m in moves)


def _legal_uncached(pos):
    # perft visits each position once; skip the memo to save memory
    moves = legal_moves(pos)
    pos._legal = None
    return moves


def insufficient_material(pos: Position) -> bool:
    """K vs K, K+minor vs K, or K+B vs K+B with same-colored bishops."""
    minors = []
    for sq, p in enumerate(pos.board):
        kind = abs(p)
        if kind in (PAWN, ROOK, QUEEN):
            return False
        if kind in (KNIGHT, BISHOP):
            minors.append((sq, p))
    if len(minors) <= 1:
        return True
    if all(abs(p) == BISHOP for _, p in minors):
        colors = {((sq & 7) + (sq >> 3)) & 1 for sq, _ in minors}
        return len(colors) == 1
    return False


def mirror(pos: Position) -> Position:
    """Swap colors and flip the board vertically."""
    board = [0] * 64
    for sq, p in enumerate(pos.board):
        if p:
            board[sq ^ 56] = -p
    c = pos.castling
    castling = ((c & 3) << 2) | ((c >> 2) & 3)
    ep = None if pos.ep is None else pos.ep ^ 56
    return Position(tuple(board), -pos.turn, castling, ep, pos.halfmove, pos.fullmove)


def iter_pieces(pos: Position, color: int) -> Iterator[tuple[int, int]]:
    for sq, p in enumerate(pos.board):
        if p * color > 0:
            yield sq, abs(p)


# ---------------------------------------------------------------------------
# FEN

_FEN_PIECES = {"P": PAWN, "N": KNIGHT, "B": BISHOP, "R": ROOK, "Q": QUEEN, "K": KING}


def parse_fen(text: str) -> Position:
    """Parse a six-field FEN string.

    Four-field input (as found in EPD) is accepted with clocks ``0 1``.
    Raises :class:`ChessError` on malformed fields or illegal placement.
    """
    fields = text.split()
    if len(fields) == 4:
        fields += ["0", "1"]
    if len(fields) != 6:
        raise ChessError(f"FEN needs 6 fields, got {len(fields)}: {text!r}")
    placement, side, castle, ep_field, half, full = fields
    rows = placement.split("/")
    if len(rows) != 8:
        raise ChessError(f"FEN placement needs 8 ranks: {placement!r}")
    board = [0] * 64
    for i, row in enumerate(rows):
        r = 7 - i
        f = 0
        for ch in row:
            if ch.isdigit():
                f += int(ch)
            elif ch.upper() in _FEN_PIECES:
                if f > 7:
                    raise ChessError(f"rank overflow in {row!r}")
                kind = _FEN_PIECES[ch.upper()]
                board[8 * r + f] = kind if ch.isupper() else -kind
                f += 1
            else:
                raise ChessError(f"bad FEN character {ch!r}")
        if f != 8:
            raise ChessError(f"rank {row!r} does not have 8 files")
    if board.count(KING) != 1 or board.count(-KING) != 1:
        raise ChessError("each side needs exactly one king")
    for sq in list(range(8)) + list(range(56, 64)):
        if abs(board[sq]) == PAWN:
            raise ChessError("pawn on first or last rank")
    if side not in ("w", "b"):
        raise ChessError(f"bad side to move {side!r}")
    turn = WHITE if side == "w" else BLACK
    castling = 0
    if castle != "-":
        for ch in castle:
            bit = {"K": CASTLE_WK, "Q": CASTLE_WQ, "k": CASTLE_BK, "q": CASTLE_BQ}.get(ch)
            if bit is None:
                raise ChessError(f"bad castling field {castle!r}")
            castling |= bit
    # drop rights whose king/rook are not on their origin squares
    if board[4] != KING:
        castling &= ~(CASTLE_WK | CASTLE_WQ)
    if board[7] != ROOK:
        castling &= ~CASTLE_WK
    if board[0] != ROOK:
        castling &= ~CASTLE_WQ
    if board[60] != -KING:
        castling &= ~(CASTLE_BK | CASTLE_BQ)
    if board[63] != -ROOK:
        castling &= ~CASTLE_BK
    if board[56] != -ROOK:
        castling &= ~CASTLE_BQ
    ep = None
    if ep_field != "-":
        ep = parse_square(ep_field)
        want_rank = 5 if turn == WHITE else 2
        pawn_sq = ep - 8 * turn
        if ep >> 3 != want_rank or board[pawn_sq] != -PAWN * turn or board[ep] or board[ep + 8 * turn]:
            raise ChessError(f"inconsistent en-passant square {ep_field}")
    try:
        halfmove, fullmove = int(half), int(full)
    except ValueError:
        raise ChessError(f"bad move counters {half!r} {full!r}") from None
    if halfmove < 0 or fullmove < 1:
        raise ChessError("move counters out of range")
    pos = Position(tuple(board), turn, castling, ep, halfmove, fullmove)
    them_king = pos.kings[1] if turn == WHITE else pos.kings[0]
    if is_attacked(pos.board, them_king, turn):
        raise ChessError("side not to move is in check")
    return pos


def to_fen(pos: Position) -> str:
    rows = []
    for r in range(7, -1, -1):
        row, empty = "", 0
        for f in range(8):
            p = pos.board[8 * r + f]
            if not p:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            c = PIECE_SYMBOLS[abs(p)]
            row += c.upper() if p > 0 else c
        if empty:
            row += str(empty)
        rows.append(row)
    castle = "".join(ch for bit, ch in ((CASTLE_WK, "K"), (CASTLE_WQ, "Q"), (CASTLE_BK, "k"),
                                        (CASTLE_BQ, "q")) if pos.castling & bit) or "-"
    ep = square_name(pos.ep) if pos.ep is not None else "-"
    side = "w" if pos.turn == WHITE else "b"
    return f"{'/'.join(rows)} {side} {castle} {ep} {pos.halfmove} {pos.fullmove}"


def starting_position() -> Position:
    return parse_fen(STARTING_FEN)
