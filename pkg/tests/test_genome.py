import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evochess.evaluation import REFERENCE_PARAMS
from evochess.genome import (
    EVAL, EVAL_BITS, SEARCH, SEARCH_BITS, Checkpoint, Chromosome, GAConfig, Organism, best_of,
    decode_eval, decode_search, encode_eval, encode_search, gray_field, gray_value, make_rng,
    mutate, next_generation, proportional_probabilities, rank_probabilities, read_checkpoint,
    rng_from_state, uniform_crossover, write_checkpoint,
)
from evochess.search import PLAIN_PARAMS, TABLE2_PARAMS


def orgs(fitness, kind=EVAL, seed=0):
    rng = make_rng(seed)
    return [Organism(Chromosome.random(kind, rng), f) for f in fitness]


def test_gray_known_values():
    assert [gray_field(v, 3) for v in range(4)] == [[0, 0, 0], [0, 0, 1], [0, 1, 1], [0, 1, 0]]
    assert gray_field(7, 3) == [1, 0, 0]


@given(st.integers(1, 16).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1))))
def test_gray_round_trip_and_adjacency(wv):
    width, value = wv
    bits = gray_field(value, width)
    assert gray_value(bits) == value
    if value + 1 < (1 << width):
        assert sum(a != b for a, b in zip(bits, gray_field(value + 1, width))) == 1


def test_gray_field_range():
    with pytest.raises(ValueError):
        gray_field(8, 3)
    with pytest.raises(ValueError):
        gray_field(-1, 3)


def test_widths():
    assert EVAL_BITS == 4 * 11 + 30 * 6 == 224
    assert SEARCH_BITS == 70


def test_published_values_round_trip():
    assert decode_eval(encode_eval(REFERENCE_PARAMS)) == REFERENCE_PARAMS
    assert decode_search(encode_search(TABLE2_PARAMS)) == TABLE2_PARAMS
    assert decode_search(Chromosome([0] * SEARCH_BITS, SEARCH)) == PLAIN_PARAMS


def test_out_of_range_value_rejected():
    with pytest.raises(ValueError, match="BISHOP_PAIR"):
        encode_eval(REFERENCE_PARAMS.replace(BISHOP_PAIR=64))


@settings(max_examples=200)
@given(st.sampled_from([EVAL, SEARCH]), st.integers(0, 2**32))
def test_chromosome_round_trip(kind, seed):
    c = Chromosome.random(kind, make_rng(seed))
    params = c.decode()
    again = encode_eval(params) if kind == EVAL else encode_search(params)
    assert again == c
    assert Chromosome.from_hex(c.hex(), kind) == c


def test_chromosome_validation():
    with pytest.raises(ValueError):
        Chromosome([0] * 10, EVAL)
    with pytest.raises(ValueError):
        Chromosome([2] * SEARCH_BITS, SEARCH)
    with pytest.raises(ValueError):
        Chromosome([0] * SEARCH_BITS, "other")
    c = Chromosome([0] * SEARCH_BITS, SEARCH)
    with pytest.raises(ValueError):
        c.bits[0] = 1
    with pytest.raises(ValueError):
        Chromosome.from_hex("f" * 18, SEARCH)  # padding bits set


def test_crossover_conserves_bits():
    rng = make_rng(4)
    a, b = Chromosome.random(EVAL, rng), Chromosome.random(EVAL, rng)
    ca, cb = uniform_crossover(a, b, 1.0, rng)
    assert np.array_equal(ca.bits + cb.bits, a.bits + b.bits)
    differ = int((a.bits != b.bits).sum())
    changed = int((ca.bits != a.bits).sum())
    assert 0.3 * differ < changed < 0.7 * differ
    same = uniform_crossover(a, b, 0.0, rng)
    assert same == (a, b)


def test_mutation_rate_statistics():
    rng = make_rng(5)
    c = Chromosome([0] * EVAL_BITS, EVAL)
    flips = sum(int(mutate(c, 0.05, rng).bits.sum()) for _ in range(400))
    expected = 400 * EVAL_BITS * 0.05
    assert abs(flips - expected) < 4 * np.sqrt(expected)
    assert mutate(c, 0.0, rng) is c
    with pytest.raises(ValueError):
        mutate(c, 1.5, rng)


def test_proportional_probabilities():
    p = proportional_probabilities(orgs([1, 3, 0, 4]))
    assert np.allclose(p, [0.125, 0.375, 0, 0.5])
    assert np.allclose(proportional_probabilities(orgs([0, 0])), [0.5, 0.5])
    with pytest.raises(ValueError):
        proportional_probabilities(orgs([1, None]))
    with pytest.raises(ValueError):
        proportional_probabilities(orgs([1, -1]))


def test_rank_probabilities_linear_and_tie_order():
    p = rank_probabilities(orgs([10, 1000, 5]))
    # ranks: 5 worst, 10 middle, 1000 best; pressure 1.5
    assert np.allclose(p, [1 / 3, 1.5 / 3, 0.5 / 3])
    tied = rank_probabilities(orgs([7, 7, 7]))
    assert tied[0] > tied[1] > tied[2]
    assert np.isclose(tied.sum(), 1.0)


def test_best_of_prefers_earliest():
    pop = orgs([3, 5, 5])
    assert best_of(pop) is pop[1]


def test_elitism_keeps_incumbent():
    cfg = GAConfig(population_size=6, generations=1, selection="rank", elitism_count=1, mutation_rate=0.5)
    pop = orgs([1, 2, 9, 3, 4, 5])
    rng = make_rng(0)
    nxt = next_generation(pop, cfg, lambda os: [0.0] * len(os), rng)
    assert len(nxt) == 6
    assert nxt[0].chromosome == pop[2].chromosome and nxt[0].fitness == 9


def test_next_generation_is_seed_deterministic():
    cfg = GAConfig(population_size=8, elitism_count=2)

    def run(seed):
        pop = orgs(range(8), seed=1)
        fit = lambda os: [float(o.chromosome.bits.sum()) for o in os]  # noqa: E731
        return [o.chromosome.hex() for o in next_generation(pop, cfg, fit, make_rng(seed))]

    assert run(3) == run(3)
    assert run(3) != run(4)


def test_ga_config_text_and_validation():
    cfg = GAConfig(population_size=20, selection="rank", random_seed=9)
    assert GAConfig.from_text(cfg.to_text()) == cfg
    assert GAConfig.from_text("generations = 7", cfg) == cfg.replace(generations=7)
    assert cfg.digest() != cfg.replace(random_seed=8).digest()
    for bad in ({"population_size": 1}, {"mutation_rate": 2.0}, {"selection": "tournament"},
                {"elitism_count": 0}, {"elitism_count": 20}):
        with pytest.raises(ValueError):
            cfg.replace(**bad)
    with pytest.raises(ValueError):
        GAConfig.from_text("colour = blue")


def test_checkpoint_round_trip(tmp_path):
    cfg = GAConfig(population_size=4, random_seed=11)
    rng = make_rng(11)
    pop = [Organism(Chromosome.random(SEARCH, rng), f) for f in (1.5, None, 0.0, 3.0)]
    rng.random(5)
    ck = Checkpoint(SEARCH, 3, pop, rng.bit_generator.state, cfg, 11, {"history": [[1, 2, 3, 4]]})
    path = tmp_path / "ck.txt"
    write_checkpoint(path, ck)
    back = read_checkpoint(path, SEARCH)
    assert back.generation == 3 and back.seed == 11 and back.config == cfg
    assert [o.chromosome for o in back.population] == [o.chromosome for o in pop]
    assert [o.fitness for o in back.population] == [1.5, None, 0.0, 3.0]
    assert rng_from_state(back.rng_state).random() == rng.random()
    with pytest.raises(ValueError, match="expected evaluation"):
        read_checkpoint(path, EVAL)
    tampered = path.read_text().replace("# config random_seed = 11", "# config random_seed = 12")
    path.write_text(tampered)
    with pytest.raises(ValueError, match="hash"):
        read_checkpoint(path)
