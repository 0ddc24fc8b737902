"""Straightforward feature extraction kept as an oracle for the optimized one."""
from evochess.board import (
    BISHOP, BISHOP_RAYS, KING, KNIGHT, KNIGHT_TARGETS, PAWN, PAWN_ATTACKS,
    QUEEN, QUEEN_RAYS, ROOK, ROOK_RAYS, WHITE,
)
from evochess.evaluation import *  # noqa: F401,F403
from evochess.evaluation import (
    I_ADV_A, I_ADV_B, I_PASSED, I_DOUBLED,
    I_ISOLATED, I_BACKWARD, I_WEAK, I_PP_KDIST, I_KNIGHT_SQ, I_OUTPOST, I_B_MOB, I_B_PAIR,
    I_R_KFILE, I_R_KADJ, I_R_KADJ_ABGH, I_R_7TH, I_R_CONN, I_R_MOB, I_R_BEHIND_PP,
    I_R_OPEN, I_R_SEMI, I_R_WEAK_PAWN, I_R_COLUMN, I_Q_MOB, I_K_NO_PAWN, I_K_NO_PAWN_ADJ,
    I_K_ADV1, I_K_NO_ENEMY, I_K_NO_ENEMY_ADJ, I_K_PRESSURE, KING_ZONE, KNIGHT_TABLE,
    N_PARAMS, _MATERIAL_INDEX,
)


def _side_features(board, color, pawn_ranks, enemy_ranks, own_king, enemy_king, f):
    """Accumulate ``color``'s features into ``f`` with sign ``color``.

    ``pawn_ranks[file]`` / ``enemy_ranks[file]`` hold pawn ranks relative to
    ``color``.
    """
    s = color
    white = color == WHITE
    ekf, ekr = enemy_king & 7, enemy_king >> 3
    zone = KING_ZONE[enemy_king]

    # pawns -----------------------------------------------------------------
    passed_files = {}
    weak_enemy_pawn_files = set()
    for file in range(8):
        ranks = pawn_ranks[file]
        if not ranks:
            continue
        if len(ranks) > 1:
            f[I_DOUBLED] -= s * (len(ranks) - 1)
        left = pawn_ranks[file - 1] if file > 0 else ()
        right = pawn_ranks[file + 1] if file < 7 else ()
        eleft = enemy_ranks[file - 1] if file > 0 else ()
        eright = enemy_ranks[file + 1] if file < 7 else ()
        ecenter = enemy_ranks[file]
        isolated = not left and not right
        for r in ranks:
            adv = r - 1
            if file in (3, 4):
                f[I_ADV_B] += s * adv
            else:
                f[I_ADV_A] += s * adv
            if isolated:
                f[I_ISOLATED] -= s
            else:
                supported = any(x <= r for x in left) or any(x <= r for x in right)
                if not supported and (r + 2 in eleft or r + 2 in eright):
                    f[I_BACKWARD] -= s
            if (all(x <= r for x in ecenter) and all(x <= r for x in eleft)
                    and all(x <= r for x in eright)):
                f[I_PASSED] += s * r
                sq = file + 8 * (r if white else 7 - r)
                f[I_PP_KDIST] += s * max(abs(ekf - file), abs(ekr - (sq >> 3)))
                passed_files[file] = max(r, passed_files.get(file, -1))

    # weak squares: own ranks 2..4 that no friendly pawn can ever attack
    for file in range(8):
        lo = 8
        if file > 0 and pawn_ranks[file - 1]:
            lo = min(pawn_ranks[file - 1])
        if file < 7 and pawn_ranks[file + 1]:
            lo = min(lo, min(pawn_ranks[file + 1]))
        weak = min(4, lo) - 1
        if weak > 0:
            f[I_WEAK] -= s * weak
        # enemy pawns on this file that are isolated or backward (seen from us)
        er = enemy_ranks[file]
        if er:
            eleft = enemy_ranks[file - 1] if file > 0 else ()
            eright = enemy_ranks[file + 1] if file < 7 else ()
            if not eleft and not eright:
                weak_enemy_pawn_files.add(file)
            else:
                left = pawn_ranks[file - 1] if file > 0 else ()
                right = pawn_ranks[file + 1] if file < 7 else ()
                for r in er:
                    # enemy pawn moves toward lower relative ranks
                    if not (any(x >= r for x in eleft) or any(x >= r for x in eright)) and (
                            r - 2 in left or r - 2 in right):
                        weak_enemy_pawn_files.add(file)
                        break

    # pieces ---------------------------------------------------------------
    bishops = 0
    rooks = []
    own = s
    for sq in range(64):
        p = board[sq] * own
        if p <= 0 or p == PAWN or p == KING:
            if p == PAWN:
                for t in PAWN_ATTACKS[color][sq]:
                    if t in zone:
                        f[I_K_PRESSURE] += s
            continue
        rr = (sq >> 3) if white else 7 - (sq >> 3)
        file = sq & 7
        if p == KNIGHT:
            f[I_KNIGHT_SQ] += s * KNIGHT_TABLE[sq]
            for t in KNIGHT_TARGETS[sq]:
                if t in zone:
                    f[I_K_PRESSURE] += s
            if 3 <= rr <= 5:
                defended = any(board[t] == PAWN * own for t in PAWN_ATTACKS[-color][sq])
                if defended:
                    left = enemy_ranks[file - 1] if file > 0 else ()
                    right = enemy_ranks[file + 1] if file < 7 else ()
                    if not any(x > rr for x in left) and not any(x > rr for x in right):
                        f[I_OUTPOST] += s * KNIGHT_TABLE[sq]
            continue
        rays = BISHOP_RAYS[sq] if p == BISHOP else ROOK_RAYS[sq] if p == ROOK else QUEEN_RAYS[sq]
        mob = 0
        for ray in rays:
            for t in ray:
                q = board[t]
                if t in zone:
                    f[I_K_PRESSURE] += s
                if q == 0:
                    mob += 1
                    continue
                if q * own < 0:
                    mob += 1
                break
        if p == BISHOP:
            bishops += 1
            f[I_B_MOB] += s * mob
        elif p == QUEEN:
            f[I_Q_MOB] += s * mob
        else:
            f[I_R_MOB] += s * mob
            rooks.append(sq)
            dist = abs(file - ekf)
            if dist == 0:
                f[I_R_KFILE] += s
            elif dist == 1:
                if ekf in (0, 1, 6, 7):
                    f[I_R_KADJ_ABGH] += s
                else:
                    f[I_R_KADJ] += s
            f[I_R_COLUMN] += s * (7 - dist)
            if rr == 6:
                f[I_R_7TH] += s
            if not pawn_ranks[file]:
                if enemy_ranks[file]:
                    f[I_R_SEMI] += s
                    if file in weak_enemy_pawn_files:
                        f[I_R_WEAK_PAWN] += s
                else:
                    f[I_R_OPEN] += s
            if file in passed_files and rr < passed_files[file]:
                f[I_R_BEHIND_PP] += s
    if bishops >= 2:
        f[I_B_PAIR] += s
    for i in range(len(rooks)):
        for j in range(i + 1, len(rooks)):
            if _sees(board, rooks[i], rooks[j]):
                f[I_R_CONN] += s

    # king shield / storm -------------------------------------------------
    kf = own_king & 7
    kr = (own_king >> 3) if white else 7 - (own_king >> 3)
    for file in (kf - 1, kf, kf + 1):
        if not 0 <= file < 8:
            continue
        ranks = pawn_ranks[file]
        if kr + 1 in ranks:
            pass
        elif kr + 2 in ranks:
            f[I_K_ADV1] -= s
        elif file == kf:
            f[I_K_NO_PAWN] -= s
        else:
            f[I_K_NO_PAWN_ADJ] -= s
        if not enemy_ranks[file]:
            if file == kf:
                f[I_K_NO_ENEMY] += s
            else:
                f[I_K_NO_ENEMY_ADJ] += s


def _sees(board, a, b):
    if a & 7 == b & 7:
        step = 8
    elif a >> 3 == b >> 3:
        step = 1
    else:
        return False
    lo, hi = min(a, b), max(a, b)
    return all(board[t] == 0 for t in range(lo + step, hi, step))


def reference_features(pos):
    """White-minus-black feature counts, in :data:`PARAM_NAMES` order."""
    board = pos.board
    f = [0] * N_PARAMS
    wp = [[] for _ in range(8)]   # white pawn ranks, white-relative
    bp = [[] for _ in range(8)]   # black pawn ranks, black-relative
    for sq, p in enumerate(board):
        if not p:
            continue
        kind = p if p > 0 else -p
        if kind != KING:
            f[_MATERIAL_INDEX[kind]] += 1 if p > 0 else -1
        if kind == PAWN:
            if p > 0:
                wp[sq & 7].append(sq >> 3)
            else:
                bp[sq & 7].append(7 - (sq >> 3))
    # the other side's ranks seen from each color
    bp_as_white = [[7 - r for r in ranks] for ranks in bp]
    wp_as_black = [[7 - r for r in ranks] for ranks in wp]
    wk, bk = pos.kings
    _side_features(board, WHITE, wp, bp_as_white, wk, bk, f)
    _side_features(board, -WHITE, bp, wp_as_black, bk, wk, f)
    return f


