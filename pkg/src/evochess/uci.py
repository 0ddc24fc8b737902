"""A small UCI front end for the engine."""
from __future__ import annotations

import sys
import threading
from typing import TextIO

from .board import STARTING_FEN, ChessError, apply_move, parse_fen, parse_uci
from .evaluation import REFERENCE_PARAMS, EvalParams
from .search import MATE, MATE_BOUND, TABLE2_PARAMS, Searcher, SearchLimits, SearchParams

ENGINE_NAME = "evochess"


def format_score(score: int) -> str:
    if abs(score) >= MATE_BOUND:
        moves = (MATE - abs(score) + 1) // 2
        return f"mate {moves if score > 0 else -moves}"
    return f"cp {score}"


class UciEngine:
    """Line-oriented UCI loop.

    Searches run in a worker thread so that ``stop`` (or ``quit``) can end
    them; the engine always answers a ``go`` with ``bestmove``.  Malformed
    input produces an ``info string`` diagnostic and never ends the loop.
    """

    def __init__(self, out: TextIO = sys.stdout, eval_params: EvalParams = REFERENCE_PARAMS,
                 search_params: SearchParams = TABLE2_PARAMS):
        self.out = out
        self.eval_params = eval_params
        self.search_params = search_params
        self.position = parse_fen(STARTING_FEN)
        self.history: list[int] = []
        self._thread: threading.Thread | None = None
        self._stop = threading.Event()
        self._lock = threading.Lock()
        self._searcher = None

    def send(self, line: str) -> None:
        with self._lock:
            self.out.write(line + "\n")
            self.out.flush()

    def run(self, stream: TextIO = sys.stdin) -> None:
        for line in stream:
            if not self.handle(line):
                break
        self._join()

    def handle(self, line: str) -> bool:
        """Process one command; returns False on ``quit``."""
        parts = line.strip().split()
        if not parts:
            return True
        cmd, args = parts[0], parts[1:]
        try:
            if cmd == "uci":
                self.send(f"id name {ENGINE_NAME}")
                self.send("id author evochess")
                self.send("option name EvalParams type string default <builtin>")
                self.send("option name SearchParams type string default <builtin>")
                self.send("uciok")
            elif cmd == "isready":
                self.send("readyok")
            elif cmd == "ucinewgame":
                self._join()
                self.position = parse_fen(STARTING_FEN)
                self.history = []
                self._searcher = None
            elif cmd == "setoption":
                self._setoption(args)
            elif cmd == "position":
                self._join()
                self._set_position(args)
            elif cmd == "go":
                self._go(args)
            elif cmd == "stop":
                self._stop.set()
                self._join()
            elif cmd == "quit":
                self._stop.set()
                self._join()
                return False
            else:
                self.send(f"info string unknown command {cmd}")
        except (ChessError, ValueError, OSError) as exc:
            self.send(f"info string error: {exc}")
        return True

    # ------------------------------------------------------------------
    def _setoption(self, args):
        text = " ".join(args)
        if not text.startswith("name ") or " value " not in text:
            raise ValueError("expected 'setoption name <id> value <x>'")
        name, value = text[5:].split(" value ", 1)
        name, value = name.strip().lower(), value.strip()
        if name == "evalparams":
            self.eval_params = EvalParams.load(value)
        elif name == "searchparams":
            self.search_params = SearchParams.load(value)
        else:
            raise ValueError(f"unknown option {name}")
        self._searcher = None

    def _set_position(self, args):
        if not args:
            raise ValueError("position needs 'startpos' or 'fen'")
        if args[0] == "startpos":
            pos, rest = parse_fen(STARTING_FEN), args[1:]
        elif args[0] == "fen":
            if "moves" in args:
                i = args.index("moves")
                fen, rest = args[1:i], args[i:]
            else:
                fen, rest = args[1:], []
            pos = parse_fen(" ".join(fen))
        else:
            raise ValueError(f"bad position command {' '.join(args)}")
        history = []
        if rest:
            if rest[0] != "moves":
                raise ValueError("expected 'moves'")
            for tok in rest[1:]:
                history.append(pos.key)
                pos = apply_move(pos, parse_uci(pos, tok))
        self.position, self.history = pos, history

    def _limits(self, args) -> SearchLimits:
        opts = {}
        it = iter(args)
        for a in it:
            if a == "infinite":
                opts[a] = True
            elif a in ("depth", "nodes", "movetime", "wtime", "btime", "winc", "binc", "movestogo"):
                try:
                    opts[a] = int(next(it))
                except (StopIteration, ValueError):
                    raise ValueError(f"go {a} needs an integer") from None
        depth, nodes, ms = opts.get("depth"), opts.get("nodes"), opts.get("movetime")
        if ms is None and not opts.get("infinite"):
            clock = opts.get("wtime" if self.position.turn == 1 else "btime")
            if clock is not None:
                inc = opts.get("winc" if self.position.turn == 1 else "binc", 0)
                togo = opts.get("movestogo", 30)
                ms = max(1, min(clock / max(togo, 1) + inc, clock / 4))
        if depth is None and nodes is None and ms is None:
            # infinite (or bare go): run until stopped
            depth = 64
        return SearchLimits(max_nodes=nodes, max_depth=depth, max_time=ms)

    def _go(self, args):
        self._join()
        limits = self._limits(args)
        if self._searcher is None:
            self._searcher = Searcher(self.eval_params, self.search_params)
        self._stop.clear()
        pos, history = self.position, list(self.history)

        def work():
            def report(res):
                pv = " ".join(m.uci() for m in res.principal_variation)
                self.send(f"info depth {res.depth_completed} score {format_score(res.score)} nodes {res.nodes} pv {pv}")
            try:
                res = self._searcher.search(pos, limits, history=history, stop=self._stop, on_iteration=report)
                self.send(f"bestmove {res.best_move.uci()}")
            except ChessError:
                self.send("bestmove 0000")

        self._thread = threading.Thread(target=work, daemon=True)
        self._thread.start()

    def _join(self):
        if self._thread is not None:
            self._thread.join()
            self._thread = None


def main(eval_params: EvalParams = REFERENCE_PARAMS, search_params: SearchParams = TABLE2_PARAMS) -> int:
    UciEngine(sys.stdout, eval_params, search_params).run(sys.stdin)
    return 0
