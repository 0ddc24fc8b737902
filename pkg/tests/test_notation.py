import pytest
from hypothesis import given, settings, strategies as st

from evochess.board import ChessError, legal_moves, parse_fen, parse_uci, starting_position
from evochess.notation import (
    BLACK_WIN, DRAW, WHITE_WIN, Game, game_to_pgn, parse_epd, parse_pgn, parse_san, to_epd, to_san,
)
from tests.test_board import random_walk

SAMPLE = """[Event "test"]
[White "A"]
[Black "B"]
[Result "1-0"]

1. e4 {king pawn} e5 2. Nf3 Nc6 (2... d6 3. d4) 3. Bb5 $1 a6 4. Ba4 Nf6 5. O-O Be7 1-0

[Event "broken"]
[Result "0-1"]

1. e4 e5 2. Ke3?? Qh4 0-1

[Event "third"]
[Result "1/2-1/2"]

1. d4 d5 1/2-1/2
"""


def test_parse_pgn_skips_corrupt_game_with_diagnostic():
    games, diags = parse_pgn(SAMPLE)
    assert [g.result for g in games] == [WHITE_WIN, DRAW]
    assert len(games[0].moves) == 10
    assert games[0].headers["White"] == "A"
    assert len(diags) == 1 and diags[0].index == 2


def test_winner():
    games, _ = parse_pgn(SAMPLE)
    assert games[0].winner == 1 and games[1].winner == 0
    assert Game(result=BLACK_WIN).winner == -1


def test_san_disambiguation_and_suffixes():
    pos = parse_fen("4k3/8/8/8/8/8/4K3/R6R w - - 0 1")
    assert to_san(pos, parse_uci(pos, "a1d1")) == "Rad1"
    stacked = parse_fen("4k3/8/8/R7/8/8/4K3/R7 w - - 0 1")
    assert to_san(stacked, parse_uci(stacked, "a1a3")) == "R1a3"
    castle = parse_fen("4k3/8/8/8/8/8/8/R3K2R w KQ - 0 1")
    assert to_san(castle, parse_uci(castle, "e1g1")) == "O-O"
    mate = parse_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1")
    assert to_san(mate, parse_uci(mate, "a1a8")) == "Ra8#"
    promo = parse_fen("8/P7/8/8/8/8/8/k6K w - - 0 1")
    assert to_san(promo, parse_uci(promo, "a7a8n")) == "a8=N"


def test_parse_san_errors():
    pos = starting_position()
    with pytest.raises(ChessError):
        parse_san(pos, "Qh5")
    with pytest.raises(ChessError):
        parse_san(pos, "hello")
    knights = parse_fen("4k3/8/8/8/8/8/8/1N2KN2 w - - 0 1")
    with pytest.raises(ChessError, match="ambiguous"):
        parse_san(knights, "Nd2")


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 100))
def test_san_round_trip(seed, plies):
    pos = random_walk(seed, plies)
    for m in legal_moves(pos):
        assert parse_san(pos, to_san(pos, m)) == m


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 60))
def test_pgn_round_trip(seed, plies):
    import random
    rng = random.Random(seed)
    pos = starting_position()
    moves = []
    for _ in range(plies):
        legal = legal_moves(pos)
        if not legal:
            break
        m = rng.choice(legal)
        moves.append(m)
        from evochess.board import apply_move
        pos = apply_move(pos, m)
    game = Game(moves=moves, result=DRAW, headers={"Event": "rt"})
    games, diags = parse_pgn(game_to_pgn(game))
    assert not diags and games[0].moves == moves and games[0].result == DRAW


def test_pgn_with_fen_start():
    start = parse_fen("4k3/8/8/8/8/8/4P3/4K3 b - - 0 7")
    game = Game(moves=[parse_uci(start, "e8d7")], result=WHITE_WIN, initial=start)
    text = game_to_pgn(game)
    assert '[FEN "4k3/8/8/8/8/8/4P3/4K3 b - - 0 7"]' in text and "7... Kd7" in text
    back = parse_pgn(text)[0][0]
    assert back.initial == start and back.moves == game.moves


def test_epd_parse_and_write():
    case = parse_epd('r1bqkbnr/pppp1ppp/2n5/4p3/4P3/5N2/PPPP1PPP/RNBQKB1R w KQkq - bm Bb5 Bc4; id "t1";')
    assert case.id == "t1" and [m.uci() for m in case.best_moves] == ["f1b5", "f1c4"]
    assert case.is_solution(parse_uci(case.position, "f1c4"))
    assert not case.is_solution(parse_uci(case.position, "d2d4"))
    again = parse_epd(to_epd(case))
    assert again.position == case.position and again.best_moves == case.best_moves


@pytest.mark.parametrize("line", ["8/8/8 w - -", "4k3/8/8/8/8/8/8/4K3 w - - id \"x\";",
                                  "4k3/8/8/8/8/8/8/4K3 w - - bm Qa1;"])
def test_bad_epd(line):
    with pytest.raises(ChessError):
        parse_epd(line)
