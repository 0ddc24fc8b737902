import pytest
from hypothesis import given, settings, strategies as st

from evochess.board import mirror, parse_fen, starting_position
from evochess.evaluation import (
    N_PARAMS, PARAM_NAMES, REFERENCE_PARAMS, EvalParams, Evaluator, eval_features, evaluate,
    material_count,
)
from tests.oracles.reference_eval import reference_features
from tests.test_board import random_walk

IDX = {name: i for i, name in enumerate(PARAM_NAMES)}


def test_param_names():
    assert N_PARAMS == 35 and PARAM_NAMES[0] == "PAWN_VALUE"
    assert len(set(PARAM_NAMES)) == 35


def test_reference_values():
    assert REFERENCE_PARAMS["PAWN_VALUE"] == 100
    assert REFERENCE_PARAMS["KNIGHT_VALUE"] == 521
    assert REFERENCE_PARAMS["QUEEN_VALUE"] == 1710
    assert REFERENCE_PARAMS["KING_PRESSURE_MULT"] == 4


def test_params_validation():
    with pytest.raises(ValueError):
        EvalParams([1] * 34)
    with pytest.raises(ValueError):
        REFERENCE_PARAMS.replace(PAWN_VALUE=90)
    with pytest.raises(ValueError):
        REFERENCE_PARAMS.replace(BISHOP_PAIR=-1)
    with pytest.raises(ValueError):
        REFERENCE_PARAMS.replace(NOT_A_PARAM=1)


def test_text_round_trip(tmp_path):
    path = tmp_path / "p.eval"
    REFERENCE_PARAMS.save(path, header="seed = 1")
    assert path.read_text().startswith("# seed = 1\n")
    assert EvalParams.load(path) == REFERENCE_PARAMS
    with pytest.raises(ValueError):
        EvalParams.from_text("PAWN_VALUE 100\n")


def test_start_position_is_balanced():
    assert eval_features(starting_position()) == [0] * N_PARAMS
    assert evaluate(starting_position(), REFERENCE_PARAMS) == 0


def test_hand_counted_pawn_terms():
    # white: pawns a2 a3 (doubled, isolated, passed), d4; black: pawn e7
    pos = parse_fen("4k3/4p3/8/8/3P4/P7/P7/4K3 w - - 0 1")
    f = eval_features(pos)
    assert f[IDX["PAWN_VALUE"]] == 3 - 1
    assert f[IDX["DOUBLED_PAWN_PENALTY"]] == -1
    # a2, a3 and d4 have no neighbours; so has e7
    assert f[IDX["ISOLATED_PAWN_PENALTY"]] == -3 + 1
    # a-file pawns advance 0 and 1 rank; d4 advances 2; e7 has not moved
    assert f[IDX["PAWN_ADVANCE_A"]] == 1
    assert f[IDX["PAWN_ADVANCE_B"]] == 2


def test_material_count_white_view():
    pos = parse_fen("4k3/8/8/8/8/8/8/3QK3 b - - 0 1")
    assert material_count(pos, REFERENCE_PARAMS) == 1710
    assert evaluate(pos, REFERENCE_PARAMS) < 0  # black to move, a queen down


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 140))
def test_features_match_reference_oracle(seed, plies):
    pos = random_walk(seed, plies)
    assert eval_features(pos) == reference_features(pos)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 140))
def test_color_symmetry(seed, plies):
    pos = random_walk(seed, plies)
    assert eval_features(mirror(pos)) == [-x for x in eval_features(pos)]
    assert evaluate(mirror(pos), REFERENCE_PARAMS) == evaluate(pos, REFERENCE_PARAMS)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 140))
def test_evaluator_cache_is_transparent(seed, plies):
    pos = random_walk(seed, plies)
    ev = Evaluator(REFERENCE_PARAMS, cache_size=2)
    assert ev(pos) == evaluate(pos, REFERENCE_PARAMS) == ev(pos)
