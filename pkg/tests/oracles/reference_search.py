"""Textbook fail-soft alpha-beta used as an oracle for the engine's search.

Deliberately naive: plies instead of fractional units, no caches, moves
regenerated and re-sorted at every node.  It follows the documented
conventions of the real search (iterative deepening with PV move first,
captures MVV-LVA, then the rest in generation order; quiescence over captures
and promotions with stand-pat, all evasions when in check; node counted once
per full-width node and once per quiescence node; repetition and fifty-move
draws at full-width nodes).
"""
from evochess.board import CAPTURE, EN_PASSANT, PAWN, apply_move, legal_moves
from evochess.evaluation import evaluate

MATE = 100_000


def _is_capture(m):
    return bool(m.flags & (CAPTURE | EN_PASSANT))


def _victim(pos, m):
    return PAWN if m.flags & EN_PASSANT else abs(pos.board[m.to_sq])


def ordered(pos, moves, pv_move=None):
    caps = [m for m in moves if _is_capture(m)]
    caps = sorted(caps, key=lambda m: (-_victim(pos, m), abs(pos.board[m.from_sq])))  # stable sort
    rest = [m for m in moves if not _is_capture(m)]
    out = caps + rest
    if pv_move is not None and pv_move in out:
        out.remove(pv_move)
        out.insert(0, pv_move)
    return out


class ReferenceAlphaBeta:
    def __init__(self, params):
        self.params = params
        self.nodes = 0

    def quiesce(self, pos, alpha, beta, ply):
        self.nodes += 1
        moves = legal_moves(pos)
        if pos.in_check():
            if not moves:
                return -MATE + ply
            best = -MATE - 1
            candidates = ordered(pos, moves)
        else:
            best = evaluate(pos, self.params)
            if best >= beta:
                return best
            candidates = ordered(pos, [m for m in moves if _is_capture(m) or m.promotion])
        for m in candidates:
            score = -self.quiesce(apply_move(pos, m), -beta, -max(alpha, best), ply + 1)
            if score > best:
                best = score
                if score >= beta:
                    break
        return best

    def alphabeta(self, pos, depth, alpha, beta, ply, path, pv_line):
        if depth == 0:
            return self.quiesce(pos, alpha, beta, ply), []
        self.nodes += 1
        if ply > 0 and (pos.halfmove >= 100 or pos.key in path):
            return 0, []
        moves = legal_moves(pos)
        if not moves:
            return (-MATE + ply if pos.in_check() else 0), []
        pv_move = pv_line[0] if pv_line else None
        best, best_line = -MATE - 1, []
        path = path | {pos.key}
        for m in ordered(pos, moves, pv_move):
            follow = pv_line[1:] if m == pv_move else []
            score, line = self.alphabeta(apply_move(pos, m), depth - 1, -beta, -max(alpha, best),
                                         ply + 1, path, follow)
            score = -score
            if score > best:
                best, best_line = score, [m] + line
                if score >= beta:
                    break
        return best, best_line

    def search(self, pos, depth, history=()):
        """Iterative deepening to ``depth``; returns (best_move, score, nodes)."""
        self.nodes = 0
        pv = []
        score = None
        for d in range(1, depth + 1):
            score, pv = self.alphabeta(pos, d, -MATE - 1, MATE + 1, 0, frozenset(history), pv)
        return pv[0], score, self.nodes
