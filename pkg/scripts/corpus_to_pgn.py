"""Convert gen_corpus.py JSON lines into a PGN file.

    python scripts/corpus_to_pgn.py /tmp/games.jsonl data/games.pgn
"""
import argparse
import json

from evochess.board import parse_uci, starting_position, apply_move
from evochess.notation import Game, game_to_pgn


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("src")
    ap.add_argument("dst")
    ap.add_argument("--event", default="engine corpus")
    args = ap.parse_args()
    n = 0
    with open(args.src) as fh, open(args.dst, "w") as out:
        for line in fh:
            rec = json.loads(line)
            pos = starting_position()
            moves = []
            for tok in rec["moves"]:
                m = parse_uci(pos, tok)
                moves.append(m)
                pos = apply_move(pos, m)
            headers = {"Event": args.event, "Round": str(rec["round"]),
                       "White": rec["white"], "Black": rec["black"]}
            out.write(game_to_pgn(Game(moves=moves, result=rec["result"], headers=headers)))
            out.write("\n")
            n += 1
    print(f"wrote {n} games to {args.dst}")


if __name__ == "__main__":
    main()
