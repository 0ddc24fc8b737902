"""SAN moves, PGN games and EPD test positions."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from .board import (
    BISHOP, CASTLE, KING, KNIGHT, PAWN, PIECE_SYMBOLS, QUEEN, ROOK, STARTING_FEN,
    ChessError, IllegalMoveError, Move, Position, apply_move, legal_moves, parse_fen,
    parse_square, parse_uci, square_name, to_fen,
)

log = logging.getLogger(__name__)

WHITE_WIN, BLACK_WIN, DRAW, UNKNOWN = "1-0", "0-1", "1/2-1/2", "*"
RESULTS = (WHITE_WIN, BLACK_WIN, DRAW, UNKNOWN)

_SAN_PIECES = {"N": KNIGHT, "B": BISHOP, "R": ROOK, "Q": QUEEN, "K": KING}
_SAN_RE = re.compile(r"^([NBRQK])?([a-h])?([1-8])?(x)?([a-h][1-8])(=?[NBRQnbrq])?$")


def to_san(pos: Position, m: Move) -> str:
    """Standard algebraic notation including check/mate suffix."""
    board = pos.board
    kind = abs(board[m.from_sq])
    if m.flags & CASTLE:
        san = "O-O" if m.to_sq > m.from_sq else "O-O-O"
    else:
        capture = bool(board[m.to_sq]) or kind == PAWN and (m.from_sq & 7) != (m.to_sq & 7)
        if kind == PAWN:
            san = square_name(m.from_sq)[0] + "x" if capture else ""
            san += square_name(m.to_sq)
            if m.promotion:
                san += "=" + PIECE_SYMBOLS[m.promotion].upper()
        else:
            san = PIECE_SYMBOLS[kind].upper()
            rivals = [o.from_sq for o in legal_moves(pos)
                      if o.to_sq == m.to_sq and o.from_sq != m.from_sq and abs(board[o.from_sq]) == kind]
            if rivals:
                same_file = any((r & 7) == (m.from_sq & 7) for r in rivals)
                same_rank = any((r >> 3) == (m.from_sq >> 3) for r in rivals)
                name = square_name(m.from_sq)
                if not same_file:
                    san += name[0]
                elif not same_rank:
                    san += name[1]
                else:
                    san += name
            if capture:
                san += "x"
            san += square_name(m.to_sq)
    after = apply_move(pos, m)
    if after.in_check():
        san += "#" if not legal_moves(after) else "+"
    return san


def parse_san(pos: Position, text: str) -> Move:
    """Resolve a SAN token against ``legal_moves``.

    Raises :class:`ChessError` when the token is malformed, matches no legal
    move, or is ambiguous.
    """
    token = text.strip().rstrip("+#!?")
    if token in ("O-O", "0-0", "O-O-O", "0-0-0"):
        long = token.count("-") == 2
        for m in legal_moves(pos):
            if m.flags & CASTLE and (m.to_sq < m.from_sq) == long:
                return m
        raise IllegalMoveError(f"castling {text!r} not legal in {to_fen(pos)}")
    mt = _SAN_RE.match(token)
    if not mt:
        # some exports use long algebraic / UCI in movetext
        try:
            return parse_uci(pos, token)
        except ChessError:
            raise ChessError(f"unparseable SAN {text!r}") from None
    piece, from_file, from_rank, _, dest, promo = mt.groups()
    kind = _SAN_PIECES[piece] if piece else PAWN
    to_sq = parse_square(dest)
    promotion = _SAN_PIECES[promo.lstrip("=").upper()] if promo else 0
    matches = []
    for m in legal_moves(pos):
        if m.to_sq != to_sq or abs(pos.board[m.from_sq]) != kind or m.promotion != promotion:
            continue
        if from_file and "abcdefgh".index(from_file) != (m.from_sq & 7):
            continue
        if from_rank and int(from_rank) - 1 != (m.from_sq >> 3):
            continue
        matches.append(m)
    if not matches:
        raise IllegalMoveError(f"no legal move matches {text!r} in {to_fen(pos)}")
    if len(matches) > 1:
        raise ChessError(f"ambiguous SAN {text!r} in {to_fen(pos)}")
    return matches[0]


# ---------------------------------------------------------------------------
# PGN

@dataclass
class Game:
    moves: list[Move] = field(default_factory=list)
    result: str = UNKNOWN
    initial: Position = field(default_factory=lambda: parse_fen(STARTING_FEN))
    headers: dict[str, str] = field(default_factory=dict)

    def positions(self) -> list[Position]:
        """Positions before each move, plus the final position."""
        out = [self.initial]
        for m in self.moves:
            out.append(apply_move(out[-1], m))
        return out

    @property
    def winner(self) -> int:
        """+1 white, -1 black, 0 otherwise."""
        return {WHITE_WIN: 1, BLACK_WIN: -1}.get(self.result, 0)


@dataclass
class PgnDiagnostic:
    index: int
    message: str


_TAG_RE = re.compile(r'^\[(\w+)\s+"((?:[^"\\]|\\.)*)"\]\s*$')
_TOKEN_RE = re.compile(r"""
    (?P<comment>\{[^}]*\}|;[^\n]*)
  | (?P<nag>\$\d+)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<result>1-0|0-1|1/2-1/2|\*)
  | (?P<number>\d+\.+)
  | (?P<move>[^\s{}();$]+)
""", re.VERBOSE)


def _split_games(lines: Iterable[str]) -> Iterator[tuple[list[str], list[str]]]:
    tags: list[str] = []
    text: list[str] = []
    for raw in lines:
        line = raw.lstrip("﻿").rstrip("\r\n")
        if line.startswith("%"):
            continue
        if line.startswith("["):
            if text:
                yield tags, text
                tags, text = [], []
            tags.append(line)
        elif line.strip():
            text.append(line)
    if tags or text:
        yield tags, text


def _parse_one(tags: list[str], text: list[str]) -> Game:
    headers = {}
    for t in tags:
        mt = _TAG_RE.match(t.strip())
        if not mt:
            raise ChessError(f"bad tag line {t!r}")
        headers[mt.group(1)] = mt.group(2).replace('\\"', '"')
    initial = parse_fen(headers["FEN"]) if "FEN" in headers else parse_fen(STARTING_FEN)
    pos = initial
    moves: list[Move] = []
    result = headers.get("Result", UNKNOWN)
    depth = 0
    for mt in _TOKEN_RE.finditer("\n".join(text)):
        kind = mt.lastgroup
        tok = mt.group(kind)
        if kind == "open":
            depth += 1
        elif kind == "close":
            depth -= 1
            if depth < 0:
                raise ChessError("unbalanced ')' in movetext")
        elif depth or kind in ("comment", "nag", "number"):
            continue
        elif kind == "result":
            result = tok
        else:
            m = parse_san(pos, tok)
            moves.append(m)
            pos = apply_move(pos, m)
    if depth:
        raise ChessError("unbalanced '(' in movetext")
    if result not in RESULTS:
        result = UNKNOWN
    return Game(moves=moves, result=result, initial=initial, headers=headers)


def iter_pgn(stream: TextIO | Iterable[str], diagnostics: list[PgnDiagnostic] | None = None) -> Iterator[Game]:
    """Yield games from PGN text; corrupt games are skipped and reported.

    Each skipped game appends a :class:`PgnDiagnostic` to ``diagnostics``
    (when given) and is logged at WARNING level.
    """
    for i, (tags, text) in enumerate(_split_games(stream)):
        try:
            yield _parse_one(tags, text)
        except (ChessError, KeyError) as exc:
            log.warning("skipping PGN game %d: %s", i + 1, exc)
            if diagnostics is not None:
                diagnostics.append(PgnDiagnostic(i + 1, str(exc)))


def parse_pgn(stream: TextIO | Iterable[str] | str) -> tuple[list[Game], list[PgnDiagnostic]]:
    """Parse every game; returns ``(games, diagnostics)``."""
    if isinstance(stream, str):
        stream = stream.splitlines()
    diags: list[PgnDiagnostic] = []
    games = list(iter_pgn(stream, diags))
    return games, diags


def read_pgn(path) -> tuple[list[Game], list[PgnDiagnostic]]:
    with open(path, encoding="utf-8-sig") as fh:
        return parse_pgn(fh)


def game_to_pgn(game: Game) -> str:
    headers = dict(game.headers)
    headers["Result"] = game.result
    for k in ("Event", "Site", "Date", "Round", "White", "Black"):
        headers.setdefault(k, "?")
    if game.initial != parse_fen(STARTING_FEN):
        headers["SetUp"] = "1"
        headers["FEN"] = to_fen(game.initial)
    order = ["Event", "Site", "Date", "Round", "White", "Black", "Result"]
    keys = order + sorted(k for k in headers if k not in order)
    out = [f'[{k} "{headers[k]}"]' for k in keys]
    out.append("")
    tokens = []
    pos = game.initial
    for i, m in enumerate(game.moves):
        if pos.turn == 1:
            tokens.append(f"{pos.fullmove}.")
        elif i == 0:
            tokens.append(f"{pos.fullmove}...")
        tokens.append(to_san(pos, m))
        pos = apply_move(pos, m)
    tokens.append(game.result)
    line = ""
    for tok in tokens:
        if len(line) + len(tok) + 1 > 79:
            out.append(line)
            line = tok
        else:
            line = f"{line} {tok}" if line else tok
    out.append(line)
    out.append("")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# EPD

@dataclass
class TestCase:
    position: Position
    best_moves: tuple[Move, ...]
    id: str = ""

    __test__ = False  # not a pytest class

    def is_solution(self, m: Move) -> bool:
        return any(m.same_as(b) for b in self.best_moves)


def _epd_operations(text: str) -> dict[str, str]:
    ops = {}
    for chunk in re.findall(r'(?:[^;"]|"[^"]*")+', text):
        chunk = chunk.strip()
        if not chunk:
            continue
        opcode, _, operand = chunk.partition(" ")
        ops[opcode] = operand.strip()
    return ops


def parse_epd(line: str) -> TestCase:
    """Parse an EPD line with a ``bm`` opcode (and optional ``id``).

    Clock fields are taken from ``hmvc``/``fmvn`` opcodes, or from two bare
    integers after the placement fields (six-field FEN style).
    """
    fields = line.strip().split(None, 4)
    if len(fields) < 4:
        raise ChessError(f"EPD needs four position fields: {line!r}")
    rest = fields[4] if len(fields) > 4 else ""
    hmvc, fmvn = "0", "1"
    clocks = re.match(r"(\d+)\s+(\d+)(?:\s+|$)", rest)
    if clocks:
        hmvc, fmvn = clocks.groups()
        rest = rest[clocks.end():]
    ops = _epd_operations(rest)
    hmvc, fmvn = ops.get("hmvc", hmvc), ops.get("fmvn", fmvn)
    pos = parse_fen(" ".join(fields[:4] + [hmvc, fmvn]))
    if not ops.get("bm"):
        raise ChessError(f"EPD line has no bm opcode: {line!r}")
    best = tuple(parse_san(pos, tok) for tok in ops["bm"].split())
    return TestCase(pos, best, ops.get("id", "").strip('"'))


def read_epd(path) -> list[TestCase]:
    cases = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                cases.append(parse_epd(line))
            except ChessError as exc:
                raise ChessError(f"{path}:{n}: {exc}") from None
    return cases


def to_epd(case: TestCase) -> str:
    fen = " ".join(to_fen(case.position).split()[:4])
    bm = " ".join(to_san(case.position, m) for m in case.best_moves)
    out = f"{fen} bm {bm};"
    if case.id:
        out += f' id "{case.id}";'
    return out
