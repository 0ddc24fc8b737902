"""Generate a machine-game corpus with a UCI engine (used to build data/games.pgn).

Each game pairs a full-strength side against a handicapped side (lower
"Skill Level"), so most games are decisive while the winner's moves come
from a strong searcher.  Output is JSON lines: {"moves": [...uci], "result",
"white", "black", "round"}; convert with scripts/corpus_to_pgn.py.

    python scripts/gen_corpus.py --engine "node .../stockfish-18-lite-single.js" \
        --games 1400 --out /tmp/games.jsonl
"""
import argparse
import json
import random
import shlex
import subprocess


class UciEngine:
    def __init__(self, command):
        self.proc = subprocess.Popen(shlex.split(command), stdin=subprocess.PIPE,
                                     stdout=subprocess.PIPE, text=True, bufsize=1)
        self.send("uci")
        self.read_until("uciok")

    def send(self, line):
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()

    def read_until(self, prefix):
        lines = []
        while True:
            line = self.proc.stdout.readline()
            if not line:
                raise RuntimeError("engine exited")
            lines.append(line.rstrip("\n"))
            if line.startswith(prefix):
                return lines

    def ready(self):
        self.send("isready")
        self.read_until("readyok")

    def legal_moves(self, moves):
        self.send("position startpos moves " + " ".join(moves) if moves else "position startpos")
        self.send("go perft 1")
        out = self.read_until("Nodes searched")
        return [ln.split(":")[0] for ln in out if ":" in ln and not ln.startswith(("info", "Nodes"))]

    def go(self, moves, nodes, skill):
        self.send(f"setoption name Skill Level value {skill}")
        self.send("position startpos moves " + " ".join(moves) if moves else "position startpos")
        self.send(f"go nodes {nodes}")
        out = self.read_until("bestmove")
        score = None
        for ln in out:
            toks = ln.split()
            if "score" in toks:
                i = toks.index("score")
                kind, val = toks[i + 1], int(toks[i + 2])
                score = val if kind == "cp" else (100000 - abs(val)) * (1 if val > 0 else -1)
                if kind == "mate" and val == 0:
                    score = -100000
        best = out[-1].split()[1]
        return best, score

    def close(self):
        self.send("quit")
        self.proc.wait(timeout=10)


def play(engine, rng, nodes, max_plies=300):
    strong_white = rng.random() < 0.5
    weak_skill = rng.choice([3, 5, 7, 9, 11, 13])
    moves = []
    for _ in range(2):
        moves.append(rng.choice(engine.legal_moves(moves)))
    streak = {True: 0, False: 0}
    result = "1/2-1/2"
    while len(moves) < max_plies:
        white_to_move = len(moves) % 2 == 0
        strong = white_to_move == strong_white
        best, score = engine.go(moves, nodes if strong else nodes // 2, 20 if strong else weak_skill)
        if best == "(none)":
            if score == -100000:
                result = "0-1" if white_to_move else "1-0"
            break
        # resign adjudication: a side seeing >= +800cp for 4 own moves in a row wins
        if score is not None and score >= 800:
            streak[white_to_move] += 1
            if streak[white_to_move] >= 4:
                result = "1-0" if white_to_move else "0-1"
                break
        else:
            streak[white_to_move] = 0
        moves.append(best)
    names = ("SF-full", f"SF-skill{weak_skill}")
    white, black = names if strong_white else names[::-1]
    return {"moves": moves, "result": result, "white": white, "black": black}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--engine", required=True)
    ap.add_argument("--games", type=int, default=1400)
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=2014)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    engine = UciEngine(args.engine)
    engine.ready()
    with open(args.out, "a") as fh:
        for k in range(args.games):
            engine.send("ucinewgame")
            engine.ready()
            game = play(engine, rng, args.nodes)
            game["round"] = k + 1
            fh.write(json.dumps(game) + "\n")
            fh.flush()
    engine.close()


if __name__ == "__main__":
    main()
