"""Independent brute-force move generator used to freeze perft counts.

Deliberately shares no code with ``evochess.board``: it uses a 0x88 board,
copies the whole board for every move and tests legality by asking whether
the mover's king is attacked afterwards.  Slow, simple, easy to audit.

    python3 -m tests.oracles.naive_movegen 5      # prints perft 1..5
"""
from __future__ import annotations

import sys

KNIGHT = (33, 31, 18, 14, -14, -18, -31, -33)
KING = (1, -1, 16, -16, 15, 17, -15, -17)
ROOK = (1, -1, 16, -16)
BISHOP = (15, 17, -15, -17)


def sq(name: str) -> int:
    return (int(name[1]) - 1) * 16 + "abcdefgh".index(name[0])


class State:
    """board: dict square -> piece letter (upper = white)."""

    def __init__(self, fen: str):
        placement, side, castling, ep = fen.split()[:4]
        self.board = {}
        for r, row in enumerate(placement.split("/")):
            f = 0
            for ch in row:
                if ch.isdigit():
                    f += int(ch)
                else:
                    self.board[(7 - r) * 16 + f] = ch
                    f += 1
        self.white = side == "w"
        self.castling = "" if castling == "-" else castling
        self.ep = None if ep == "-" else sq(ep)

    def copy(self) -> "State":
        s = State.__new__(State)
        s.board = dict(self.board)
        s.white, s.castling, s.ep = self.white, self.castling, self.ep
        return s


def own(piece: str, white: bool) -> bool:
    return piece.isupper() == white


def attacked(st: State, target: int, by_white: bool) -> bool:
    b = st.board
    for s, p in b.items():
        if own(p, by_white) is False:
            continue
        kind = p.upper()
        d = target - s
        if kind == "P":
            fwd = 16 if by_white else -16
            if d in (fwd - 1, fwd + 1):
                return True
        elif kind == "N":
            if d in KNIGHT:
                return True
        elif kind == "K":
            if d in KING:
                return True
        else:
            dirs = {"R": ROOK, "B": BISHOP, "Q": ROOK + BISHOP}[kind]
            for step in dirs:
                t = s + step
                while not t & 0x88:
                    if t == target:
                        return True
                    if t in b:
                        break
                    t += step
    return False


def king_square(st: State, white: bool) -> int:
    k = "K" if white else "k"
    return next(s for s, p in st.board.items() if p == k)


def pseudo(st: State):
    """Yield (from, to, promotion letter or '') for the side to move."""
    b, w = st.board, st.white
    for s, p in list(b.items()):
        if not own(p, w):
            continue
        kind = p.upper()
        if kind == "P":
            fwd = 16 if w else -16
            start = 1 if w else 6
            last = 7 if w else 0
            t = s + fwd
            if not t & 0x88 and t not in b:
                yield from _promos(s, t, last)
                if s // 16 == start and t + fwd not in b:
                    yield s, t + fwd, ""
            for c in (fwd - 1, fwd + 1):
                t = s + c
                if t & 0x88:
                    continue
                if (t in b and not own(b[t], w)) or t == st.ep:
                    yield from _promos(s, t, last)
        elif kind in "NK":
            for step in KNIGHT if kind == "N" else KING:
                t = s + step
                if not t & 0x88 and (t not in b or not own(b[t], w)):
                    yield s, t, ""
        else:
            for step in {"R": ROOK, "B": BISHOP, "Q": ROOK + BISHOP}[kind]:
                t = s + step
                while not t & 0x88:
                    if t in b:
                        if not own(b[t], w):
                            yield s, t, ""
                        break
                    yield s, t, ""
                    t += step
    # castling
    rank = 0 if w else 0x70
    rights = ("K", "Q") if w else ("k", "q")
    if rights[0] in st.castling and all(rank + f not in b for f in (5, 6)) \
            and not any(attacked(st, rank + f, not w) for f in (4, 5, 6)):
        yield rank + 4, rank + 6, ""
    if rights[1] in st.castling and all(rank + f not in b for f in (1, 2, 3)) \
            and not any(attacked(st, rank + f, not w) for f in (4, 3, 2)):
        yield rank + 4, rank + 2, ""


def _promos(s, t, last):
    if t // 16 == last:
        for q in "qrbn":
            yield s, t, q
    else:
        yield s, t, ""


def play(st: State, mv) -> State:
    s, t, promo = mv
    n = st.copy()
    b = n.board
    p = b.pop(s)
    kind = p.upper()
    if kind == "P" and t == st.ep:
        del b[t - (16 if st.white else -16)]
    if kind == "K" and abs(t - s) == 2:
        rank = s & 0x70
        if t > s:
            b[rank + 5] = b.pop(rank + 7)
        else:
            b[rank + 3] = b.pop(rank + 0)
    b[t] = (promo.upper() if st.white else promo) if promo else p
    n.ep = (s + t) // 2 if kind == "P" and abs(t - s) == 32 else None
    lost = ""
    for square, letter in ((0x04, "KQ"), (0x74, "kq"), (0x00, "Q"), (0x07, "K"), (0x70, "q"), (0x77, "k")):
        if s == square or t == square:
            lost += letter
    n.castling = "".join(c for c in st.castling if c not in lost)
    n.white = not st.white
    return n


def legal(st: State):
    out = []
    for mv in pseudo(st):
        n = play(st, mv)
        if not attacked(n, king_square(n, st.white), n.white):
            out.append((mv, n))
    return out


def perft(st: State, depth: int) -> int:
    if depth == 0:
        return 1
    moves = legal(st)
    if depth == 1:
        return len(moves)
    return sum(perft(n, depth - 1) for _, n in moves)


START = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

if __name__ == "__main__":
    top = int(sys.argv[1]) if len(sys.argv) > 1 else 4
    fen = sys.argv[2] if len(sys.argv) > 2 else START
    for d in range(1, top + 1):
        print(d, perft(State(fen), d), flush=True)
