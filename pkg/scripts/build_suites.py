"""Build the opening book and the two EPD/FEN suites under data/ from the corpus.

    python scripts/build_suites.py --engine "node .../stockfish-18-lite-single.js"

openings.txt     distinct first-8-ply lines of the corpus games, in corpus order
equivalence.fen  positions whose depth-5 plain search stays cheap (for the
                 search-versus-reference check)
tactics.epd      positions where the UCI engine sees one move clearly ahead of
                 the second best, which a depth-1 search misses and which our
                 own search can find with a generous node budget

Everything is derived from a fixed seed, so the output is reproducible given
the same corpus and engine binary.
"""
import argparse
import random
import shlex
import subprocess
import sys
import time

from evochess.board import apply_move, legal_moves, parse_uci, to_fen
from evochess.evaluation import REFERENCE_PARAMS
from evochess.notation import TestCase, read_pgn, to_epd, to_san
from evochess.search import PLAIN_PARAMS, TABLE2_PARAMS, Searcher, SearchLimits


def positions_of(game):
    pos = game.initial
    for ply, m in enumerate(game.moves):
        yield ply, pos, m
        pos = apply_move(pos, m)


def build_openings(games, plies, count):
    seen, lines = set(), []
    for g in games:
        if len(g.moves) < plies + 10:
            continue
        key = tuple(m.uci() for m in g.moves[:plies])
        if key in seen:
            continue
        seen.add(key)
        sans = []
        for _, pos, m in positions_of(g):
            if len(sans) == plies:
                break
            sans.append(to_san(pos, m))
        lines.append(" ".join(sans))
        if len(lines) == count:
            break
    return lines


def build_equivalence(games, rng, count, max_nodes, max_pieces=14):
    picked = []
    order = list(range(len(games)))
    rng.shuffle(order)
    for gi in order * 3:
        g = games[gi]
        if len(g.moves) < 30:
            continue
        ply = rng.randrange(20, len(g.moves) - 5)
        pos = list(positions_of(g))[ply][1]
        if sum(1 for p in pos.board if p) > max_pieces:
            continue
        res = Searcher(REFERENCE_PARAMS, PLAIN_PARAMS).search(pos, SearchLimits(max_depth=5, max_nodes=max_nodes))
        if res.depth_completed == 5:
            picked.append(to_fen(pos))
            print(f"equivalence {len(picked)}: {res.nodes} nodes", file=sys.stderr)
            if len(picked) == count:
                break
    return picked


class Uci:
    def __init__(self, command):
        self.proc = subprocess.Popen(shlex.split(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     text=True, bufsize=1)
        self.send("uci")
        self.until("uciok")
        self.send("setoption name MultiPV value 2")
        self.send("isready")
        self.until("readyok")

    def send(self, line):
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()

    def until(self, prefix):
        out = []
        for line in self.proc.stdout:
            out.append(line.strip())
            if line.startswith(prefix):
                return out
        raise RuntimeError("engine exited")

    def top_two(self, fen, nodes):
        """{multipv: (score_cp, move)} from the last report of each line."""
        self.send(f"position fen {fen}")
        self.send(f"go nodes {nodes}")
        best = {}
        for line in self.until("bestmove"):
            tok = line.split()
            if "multipv" not in tok or "score" not in tok or " pv " not in line:
                continue
            k = int(tok[tok.index("multipv") + 1])
            i = tok.index("score")
            val = int(tok[i + 2])
            cp = val if tok[i + 1] == "cp" else (30000 - abs(val)) * (1 if val > 0 else -1)
            best[k] = (cp, tok[tok.index("pv") + 1])
        return best

    def close(self):
        self.send("quit")
        self.proc.wait(timeout=10)


def build_tactics(games, engine, rng, count, margin, sf_nodes, our_nodes):
    candidates = [(gi, ply) for gi, g in enumerate(games) for ply in range(14, len(g.moves) - 4, 2)]
    rng.shuffle(candidates)
    cases, seen = [], set()
    for tried, (gi, ply) in enumerate(candidates, 1):
        pos = games[gi].positions()[ply]
        if len(legal_moves(pos)) < 4 or pos.key in seen:
            continue
        lines = engine.top_two(to_fen(pos), sf_nodes)
        if 1 not in lines or 2 not in lines:
            continue
        (s1, m1), (s2, _) = lines[1], lines[2]
        if s1 - s2 < margin or abs(s1) > 800 or s1 < -100:
            continue
        move = parse_uci(pos, m1)
        shallow = Searcher(REFERENCE_PARAMS, PLAIN_PARAMS).search(pos, SearchLimits(max_depth=1))
        if shallow.best_move == move:
            continue  # a depth-1 search already sees it
        found = False
        for params in (PLAIN_PARAMS, TABLE2_PARAMS):
            res = Searcher(REFERENCE_PARAMS, params).search(pos, SearchLimits(max_nodes=our_nodes))
            if res.best_move == move:
                found = True
                break
        if not found:
            continue
        seen.add(pos.key)
        case = TestCase(pos, (move,), f"t{len(cases) + 1:03d}")
        cases.append(to_epd(case) + f' c0 "game {gi + 1} ply {ply} margin {s1 - s2}";')
        print(f"tactics {len(cases)}/{tried}: {to_san(pos, move)} margin {s1 - s2}", file=sys.stderr, flush=True)
        if len(cases) == count:
            break
    return cases


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--corpus", default="data/games.pgn")
    ap.add_argument("--engine", help="UCI engine command for the tactics suite")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--only", choices=("openings", "equivalence", "tactics"))
    ap.add_argument("--margin", type=int, default=150, help="centipawns between first and second line")
    ap.add_argument("--sf-nodes", type=int, default=25_000)
    ap.add_argument("--our-nodes", type=int, default=8_000)
    args = ap.parse_args()
    games, _ = read_pgn(args.corpus)
    t0 = time.time()
    if args.only in (None, "openings"):
        lines = build_openings(games, 8, 240)
        with open("data/openings.txt", "w") as fh:
            fh.write("# distinct first-8-ply lines from data/games.pgn\n")
            fh.write("\n".join(lines) + "\n")
        print(f"openings: {len(lines)}", file=sys.stderr)
    if args.only in (None, "equivalence"):
        fens = build_equivalence(games, random.Random(args.seed), 50, 12_000)
        with open("data/equivalence.fen", "w") as fh:
            fh.write("\n".join(fens) + "\n")
    if args.only in (None, "tactics"):
        if not args.engine:
            ap.error("--engine is required for the tactics suite")
        eng = Uci(args.engine)
        try:
            cases = build_tactics(games, eng, random.Random(args.seed + 1), 100, args.margin,
                                  args.sf_nodes, args.our_nodes)
        finally:
            eng.close()
        with open("data/tactics.epd", "w") as fh:
            fh.write("\n".join(cases) + "\n")
    print(f"done in {time.time() - t0:.0f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
