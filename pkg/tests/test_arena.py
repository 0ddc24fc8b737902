import math

import pytest
from hypothesis import given, strategies as st

from evochess.arena import (
    Engine, GameRecord, MatchRecord, TimeControl, expected_score, parse_book_line, play_game,
    play_match, rating_difference, read_book,
)
from evochess.board import ChessError, parse_fen, starting_position
from evochess.evaluation import REFERENCE_PARAMS
from evochess.notation import BLACK_WIN, DRAW, WHITE_WIN, parse_pgn
from evochess.search import PLAIN_PARAMS, TABLE2_PARAMS


@pytest.mark.parametrize("w,rd", [(0.600, 70.4), (0.605, 74.1), (0.615, 81.4)])
def test_published_rating_pairs(w, rd):
    assert rating_difference(w) == pytest.approx(rd, abs=0.05)
    assert expected_score(rd) == pytest.approx(w, abs=5e-4)


@given(st.floats(-400, 400, allow_nan=False))
def test_inverse_identity(rd):
    assert rating_difference(expected_score(rd)) == pytest.approx(rd, abs=1e-9)


def test_rating_extremes():
    assert expected_score(0) == 0.5
    assert rating_difference(1.0) == math.inf and rating_difference(0.0) == -math.inf
    with pytest.raises(ValueError):
        rating_difference(1.2)


def test_time_budget():
    tc = TimeControl(300_000, 0)
    assert tc.budget(300_000) == pytest.approx(10_000)
    assert TimeControl(1000, 500).budget(1000) == pytest.approx(250)  # capped at a quarter
    with pytest.raises(ValueError):
        TimeControl(0)


def test_book_parsing(tmp_path):
    pos, moves = parse_book_line("1. e4 e5 2. Nf3 Nc6 3. Bb5 *")
    assert pos == starting_position() and [m.uci() for m in moves] == ["e2e4", "e7e5", "g1f3", "b8c6", "f1b5"]
    pos, moves = parse_book_line("d2d4 g8f6")
    assert len(moves) == 2
    pos, moves = parse_book_line("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
    assert moves == [] and pos == parse_fen("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1")
    with pytest.raises(ChessError):
        parse_book_line("1. e4 e4")
    path = tmp_path / "book.txt"
    path.write_text("# openings\ne4 e5\n\nd4 d5  # queen pawn\n")
    assert len(read_book(path)) == 2
    path.write_text("e4 e5\nNf6 Nf6\n")
    with pytest.raises(ChessError, match="book.txt:2"):
        read_book(path)


def engines(nodes=60):
    return (Engine(REFERENCE_PARAMS, TABLE2_PARAMS, "A", nodes=nodes),
            Engine(REFERENCE_PARAMS, PLAIN_PARAMS, "B", nodes=nodes))


def test_play_game_deterministic_and_terminates():
    a, b = engines()
    g1 = play_game(a, b, opening=parse_book_line("e4 e5 Nf3")[1], max_plies=40)
    g2 = play_game(a, b, opening=parse_book_line("e4 e5 Nf3")[1], max_plies=40)
    assert g1.moves == g2.moves and g1.result == g2.result
    assert g1.opening_plies == 3 and len(g1.moves) <= 40
    assert g1.result in (WHITE_WIN, BLACK_WIN, DRAW)


def test_game_from_mate_and_stalemate():
    a, b = engines()
    mated = play_game(a, b, opening=(parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3"), []))
    assert (mated.result, mated.reason) == (BLACK_WIN, "checkmate")
    stale = play_game(a, b, opening=(parse_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1"), []))
    assert (stale.result, stale.reason) == (DRAW, "stalemate")
    bare = play_game(a, b, opening=(parse_fen("7k/8/6K1/8/8/8/8/8 w - - 0 1"), []))
    assert bare.reason == "insufficient material"


def test_clocked_game_and_flag():
    a = Engine(REFERENCE_PARAMS, PLAIN_PARAMS, "A")
    b = Engine(REFERENCE_PARAMS, PLAIN_PARAMS, "B")
    g = play_game(a, b, TimeControl(0.5), max_plies=20)
    assert g.reason == "flag" and g.result == BLACK_WIN  # white's clock runs out first


class Cheater(Engine):
    def choose(self, pos, history=(), budget_ms=None):
        res = super().choose(pos, history, budget_ms)
        res.best_move = res.best_move._replace(to_sq=(res.best_move.to_sq + 24) % 64)
        return res


def test_illegal_move_forfeits():
    cheat = Cheater(REFERENCE_PARAMS, PLAIN_PARAMS, "C", nodes=10)
    honest = Engine(REFERENCE_PARAMS, PLAIN_PARAMS, "H", nodes=10)
    g = play_game(cheat, honest)
    assert g.reason == "illegal move" and g.result == BLACK_WIN


def test_engine_without_limit():
    with pytest.raises(ValueError):
        Engine(REFERENCE_PARAMS).choose(starting_position())


def test_match_bookkeeping_and_pgn():
    a, b = engines(40)
    book = [parse_book_line(line) for line in ("e4 e5", "d4 d5", "c4 e5", "Nf3 d5")]
    rec = play_match(a, b, 4, None, book, max_plies=16)
    assert rec.a_is_white == [True, False, True, False]
    assert rec.points_a + rec.points_b == 4
    w, d, lost = rec.wins_draws_losses()
    assert w + d + lost == 4 and w + d / 2 == rec.points_a
    summary = rec.summary().split()
    assert float(summary[0]) == rec.points_a and summary[2] == f"{100 * rec.win_rate:.1f}%"
    games, diags = parse_pgn(rec.to_pgn())
    assert not diags and [g.moves for g in games] == [g.moves for g in rec.games]
    with pytest.raises(ValueError, match="exhausted"):
        play_match(a, b, 5, None, book)
    with pytest.raises(ValueError):
        play_match(a, b, 0, None, book)


def test_summary_rd_matches_rating_difference():
    g = GameRecord("A", "B", starting_position(), [], WHITE_WIN, "checkmate")
    d = GameRecord("A", "B", starting_position(), [], DRAW, "ply limit")
    rec = MatchRecord("A", "B", [g, g, d, g, g], [True, False, True, True, False])
    # A: win, loss, draw, win, loss -> 2.5 / 5
    assert rec.points_a == 2.5 and rec.summary() == "2.5 2.5 50.0% +0.0"
    rec = MatchRecord("A", "B", [g], [True])
    assert rec.summary().endswith("+inf")


def test_parallel_games_match_serial():
    a, b = engines(30)
    book = [parse_book_line(line) for line in ("e4 e5", "d4 d5")]
    serial = play_match(a, b, 2, None, book, max_plies=10, jobs=1)
    parallel = play_match(a, b, 2, None, book, max_plies=10, jobs=2)
    assert [g.moves for g in serial.games] == [g.moves for g in parallel.games]
