"""Gray-coded bit-string genomes and the genetic operators that act on them.

Evaluation genomes are 224 bits: the four piece values (knight, bishop,
rook, queen) take 11 bits each and the remaining 30 weights 6 bits each, in
:data:`~evochess.evaluation.PARAM_NAMES` order; the pawn value is fixed and
not encoded.  Search genomes are 70 bits laid out as
:data:`~evochess.search.SEARCH_FIELDS`.  Every field is stored in reflected
binary Gray code, most significant bit first.

All randomness comes from one ``numpy.random.Generator`` passed explicitly.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields as dc_fields
from typing import Callable, Sequence

import numpy as np

from .evaluation import PARAM_NAMES, PAWN_VALUE, EvalParams
from .search import SEARCH_FIELDS, SearchParams

EVAL = "evaluation"
SEARCH = "search"
KINDS = (EVAL, SEARCH)

# (name, width) per encoded field
EVAL_LAYOUT = tuple((name, 11 if i < 5 else 6) for i, name in enumerate(PARAM_NAMES) if i > 0)
SEARCH_LAYOUT = tuple((name, width) for name, width, _ in SEARCH_FIELDS)
LAYOUTS = {EVAL: EVAL_LAYOUT, SEARCH: SEARCH_LAYOUT}
LENGTHS = {k: sum(w for _, w in v) for k, v in LAYOUTS.items()}
EVAL_BITS = LENGTHS[EVAL]
SEARCH_BITS = LENGTHS[SEARCH]


def gray_field(value: int, width: int) -> list[int]:
    """Gray code of ``value`` as ``width`` bits, most significant first."""
    if width <= 0:
        raise ValueError("width must be positive")
    if not 0 <= value < (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    g = value ^ (value >> 1)
    return [(g >> (width - 1 - i)) & 1 for i in range(width)]


def gray_value(bits: Sequence[int]) -> int:
    """Inverse of :func:`gray_field`."""
    b = 0
    value = 0
    for bit in bits:
        b ^= int(bit)
        value = (value << 1) | b
    return value


class Chromosome:
    """Fixed-length bit string of a given kind (immutable).

    Bits are held in a read-only ``uint8`` numpy array.
    """

    __slots__ = ("kind", "bits")

    def __init__(self, bits, kind: str):
        if kind not in KINDS:
            raise ValueError(f"unknown chromosome kind {kind!r}")
        arr = np.asarray(bits, dtype=np.uint8).copy()
        if arr.ndim != 1 or arr.size != LENGTHS[kind]:
            raise ValueError(f"{kind} chromosome needs {LENGTHS[kind]} bits, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must be 0 or 1")
        arr.setflags(write=False)
        self.kind = kind
        self.bits = arr

    def __len__(self):
        return self.bits.size

    def __eq__(self, other):
        return isinstance(other, Chromosome) and self.kind == other.kind and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.kind, self.bits.tobytes()))

    def __repr__(self):
        return f"Chromosome({self.kind}, {self.hex()})"

    def hex(self) -> str:
        """Bits as hexadecimal, left-aligned and zero-padded to a nibble."""
        n = len(self)
        value = int("".join(map(str, self.bits.tolist())), 2) if n else 0
        pad = (-n) % 4
        return format(value << pad, f"0{(n + pad) // 4}x")

    @classmethod
    def from_hex(cls, text: str, kind: str) -> "Chromosome":
        n = LENGTHS[kind]
        pad = (-n) % 4
        if len(text) != (n + pad) // 4:
            raise ValueError(f"hex string of length {len(text)} does not hold a {kind} chromosome")
        value = int(text, 16)
        if value & ((1 << pad) - 1):
            raise ValueError("padding bits must be zero")
        value >>= pad
        return cls([(value >> (n - 1 - i)) & 1 for i in range(n)], kind)

    @classmethod
    def random(cls, kind: str, rng: np.random.Generator) -> "Chromosome":
        return cls(rng.integers(0, 2, LENGTHS[kind], dtype=np.uint8), kind)

    def decode(self):
        return decode_eval(self) if self.kind == EVAL else decode_search(self)


def _decode_fields(chrom: Chromosome, kind: str) -> dict[str, int]:
    if chrom.kind != kind:
        raise ValueError(f"expected a {kind} chromosome, got {chrom.kind}")
    out = {}
    pos = 0
    bits = chrom.bits.tolist()
    for name, width in LAYOUTS[kind]:
        out[name] = gray_value(bits[pos:pos + width])
        pos += width
    return out


def _encode_fields(values: dict[str, int], kind: str) -> Chromosome:
    bits = []
    for name, width in LAYOUTS[kind]:
        try:
            bits += gray_field(values[name], width)
        except ValueError as exc:
            raise ValueError(f"{name}: {exc}") from None
    return Chromosome(bits, kind)


def decode_eval(chrom: Chromosome) -> EvalParams:
    vals = _decode_fields(chrom, EVAL)
    vals["PAWN_VALUE"] = PAWN_VALUE
    return EvalParams(vals)


def encode_eval(params: EvalParams) -> Chromosome:
    return _encode_fields(dict(params.items()), EVAL)


def decode_search(chrom: Chromosome) -> SearchParams:
    return SearchParams(**_decode_fields(chrom, SEARCH))


def encode_search(params: SearchParams) -> Chromosome:
    return _encode_fields({n: getattr(params, n) for n, _ in SEARCH_LAYOUT}, SEARCH)


@dataclass
class Organism:
    chromosome: Chromosome
    fitness: float | None = None
    decoded: object = field(init=False, repr=False)

    def __post_init__(self):
        self.decoded = self.chromosome.decode()

    @property
    def kind(self) -> str:
        return self.chromosome.kind


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    crossover_rate: float = 0.75
    mutation_rate: float = 0.005
    generations: int = 200
    selection: str = "proportional"
    elitism_count: int = 1
    random_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0.0 <= self.crossover_rate <= 1.0 or not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("rates must lie in [0, 1]")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.selection not in ("proportional", "rank"):
            raise ValueError(f"selection must be 'proportional' or 'rank', got {self.selection!r}")
        if not 1 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must be >= 1 and below population_size")

    def replace(self, **changes) -> "GAConfig":
        d = {f.name: getattr(self, f.name) for f in dc_fields(self)}
        d.update(changes)
        return GAConfig(**d)

    def to_text(self) -> str:
        return "".join(f"{f.name} = {getattr(self, f.name)}\n" for f in dc_fields(self))

    @classmethod
    def from_text(cls, text: str, base: "GAConfig | None" = None) -> "GAConfig":
        """Parse ``key = value`` lines; unspecified keys come from ``base``."""
        types = {f.name: f.type for f in dc_fields(cls)}
        vals = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (part.strip() for part in line.partition("="))
            if not sep or key not in types:
                raise ValueError(f"line {n}: expected 'key = value' with a GAConfig key, got {line!r}")
            conv = {"int": int, "float": float}.get(types[key], str)
            try:
                vals[key] = conv(value)
            except ValueError:
                raise ValueError(f"line {n}: bad value {value!r} for {key}") from None
        return (base or cls()).replace(**vals)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# operators

def uniform_crossover(a: Chromosome, b: Chromosome, rate: float,
                      rng: np.random.Generator) -> tuple[Chromosome, Chromosome]:
    """With probability ``rate`` swap each bit position with probability 0.5."""
    if a.kind != b.kind or len(a) != len(b):
        raise ValueError("parents must have the same kind and length")
    if rng.random() >= rate:
        return a, b
    swap = rng.random(len(a)) < 0.5
    ca = np.where(swap, b.bits, a.bits)
    cb = np.where(swap, a.bits, b.bits)
    return Chromosome(ca, a.kind), Chromosome(cb, a.kind)


def mutate(chrom: Chromosome, rate: float, rng: np.random.Generator) -> Chromosome:
    """Flip each bit independently with probability ``rate``."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("rate must lie in [0, 1]")
    flips = rng.random(len(chrom)) < rate
    if not flips.any():
        return chrom
    return Chromosome(chrom.bits ^ flips.astype(np.uint8), chrom.kind)


def _fitness_array(population: Sequence[Organism]) -> np.ndarray:
    if not population:
        raise ValueError("empty population")
    f = np.array([o.fitness for o in population], dtype=float)
    if np.isnan(f).any():
        raise ValueError("every organism needs a fitness before selection")
    if (f < 0).any():
        raise ValueError("fitness values must be non-negative")
    return f


def proportional_probabilities(population: Sequence[Organism]) -> np.ndarray:
    f = _fitness_array(population)
    total = f.sum()
    if total == 0:
        return np.full(len(f), 1.0 / len(f))
    return f / total


RANK_PRESSURE = 1.5


def rank_probabilities(population: Sequence[Organism], pressure: float = RANK_PRESSURE) -> np.ndarray:
    """Linear ranking: worst gets (2 - s)/n, best s/n.

    Organisms with equal fitness are ordered by index, the earlier one
    ranking higher.
    """
    f = _fitness_array(population)
    n = len(f)
    if n == 1:
        return np.ones(1)
    # rank 0 = worst; ties: later index counts as worse
    order = sorted(range(n), key=lambda i: (f[i], -i))
    probs = np.empty(n)
    for rank, i in enumerate(order):
        probs[i] = (2 - pressure + 2 * (pressure - 1) * rank / (n - 1)) / n
    return probs


def select_proportional(population: Sequence[Organism], rng: np.random.Generator) -> Organism:
    return population[int(rng.choice(len(population), p=proportional_probabilities(population)))]


def select_rank(population: Sequence[Organism], rng: np.random.Generator) -> Organism:
    return population[int(rng.choice(len(population), p=rank_probabilities(population)))]


SELECTORS = {"proportional": select_proportional, "rank": select_rank}

FitnessFn = Callable[[list[Organism]], Sequence[float]]


def random_population(kind: str, size: int, rng: np.random.Generator) -> list[Organism]:
    return [Organism(Chromosome.random(kind, rng)) for _ in range(size)]


def assign_fitness(population: list[Organism], fitness_fn: FitnessFn | None) -> None:
    """Evaluate organisms that have no fitness yet (in one batch).

    With ``fitness_fn=None`` nothing is evaluated; the caller scores the
    population itself (as coevolution does).
    """
    todo = [o for o in population if o.fitness is None]
    if todo and fitness_fn is not None:
        values = list(fitness_fn(todo))
        if len(values) != len(todo):
            raise ValueError("fitness_fn returned the wrong number of values")
        for o, v in zip(todo, values):
            o.fitness = float(v)


def best_of(population: Sequence[Organism]) -> Organism:
    """Fittest organism; the earliest wins ties."""
    return max(enumerate(population), key=lambda t: (t[1].fitness, -t[0]))[1]


def next_generation(population: list[Organism], config: GAConfig, fitness_fn: FitnessFn | None,
                    rng: np.random.Generator) -> list[Organism]:
    """Breed the next population and evaluate its new members.

    The ``elitism_count`` fittest organisms are carried over unchanged (with
    their fitness); the rest come from selection, uniform crossover and
    mutation.  ``fitness_fn`` receives the list of new organisms and returns
    their fitness values.
    """
    assign_fitness(population, fitness_fn)
    ranked = sorted(range(len(population)), key=lambda i: (-population[i].fitness, i))
    children = [Organism(population[i].chromosome, population[i].fitness)
                for i in ranked[:config.elitism_count]]
    select = SELECTORS[config.selection]
    while len(children) < config.population_size:
        a = select(population, rng).chromosome
        b = select(population, rng).chromosome
        ca, cb = uniform_crossover(a, b, config.crossover_rate, rng)
        for c in (ca, cb):
            if len(children) < config.population_size:
                children.append(Organism(mutate(c, config.mutation_rate, rng)))
    assign_fitness(children, fitness_fn)
    return children


# ---------------------------------------------------------------------------
# checkpoints

@dataclass
class Checkpoint:
    kind: str
    generation: int
    population: list[Organism]
    rng_state: dict
    config: GAConfig
    seed: int
    extra: dict = field(default_factory=dict)


def write_checkpoint(path, ckpt: Checkpoint) -> None:
    """Text checkpoint: ``#`` header lines, then ``<hex bits> <fitness>`` rows."""
    lines = [
        f"# kind = {ckpt.kind}",
        f"# generation = {ckpt.generation}",
        f"# seed = {ckpt.seed}",
        f"# config_hash = {ckpt.config.digest()}",
        f"# rng_state = {json.dumps(ckpt.rng_state, sort_keys=True)}",
        f"# extra = {json.dumps(ckpt.extra, sort_keys=True)}",
    ]
    lines += [f"# config {ln}" for ln in ckpt.config.to_text().splitlines()]
    for o in ckpt.population:
        fit = "nan" if o.fitness is None else repr(float(o.fitness))
        lines.append(f"{o.chromosome.hex()} {fit}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_checkpoint(path, kind: str | None = None) -> Checkpoint:
    header: dict[str, str] = {}
    config_lines = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("# config "):
                config_lines.append(line[len("# config "):])
            elif line.startswith("#"):
                key, _, value = line[1:].partition("=")
                header[key.strip()] = value.strip()
            else:
                parts = line.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{n}: expected '<hex> <fitness>'")
                rows.append((n, parts[0], parts[1]))
    try:
        ck_kind = header["kind"]
        generation = int(header["generation"])
        seed = int(header["seed"])
        rng_state = json.loads(header["rng_state"])
        extra = json.loads(header.get("extra", "{}"))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed checkpoint header ({exc})") from None
    if ck_kind not in KINDS:
        raise ValueError(f"{path}: unknown chromosome kind {ck_kind!r}")
    if kind is not None and ck_kind != kind:
        raise ValueError(f"{path}: checkpoint holds {ck_kind} genomes, expected {kind}")
    config = GAConfig.from_text("\n".join(config_lines))
    if header.get("config_hash") != config.digest():
        raise ValueError(f"{path}: config hash mismatch")
    pop = []
    for n, hx, fit in rows:
        try:
            chrom = Chromosome.from_hex(hx, ck_kind)
            fv = float(fit)
        except ValueError as exc:
            raise ValueError(f"{path}:{n}: {exc}") from None
        pop.append(Organism(chrom, None if np.isnan(fv) else fv))
    return Checkpoint(ck_kind, generation, pop, rng_state, config, seed, extra)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def rng_from_state(state: dict) -> np.random.Generator:
    bg = np.random.PCG64()
    bg.state = state
    return np.random.Generator(bg)
