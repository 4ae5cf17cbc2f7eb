"""Random automata and named slowly synchronizing families."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dfa import Dfa

_BIT_GENERATORS = {
    "pcg64": np.random.PCG64,
    "philox": np.random.Philox,
    "sfc64": np.random.SFC64,
}


@dataclass(frozen=True)
class RngSpec:
    """A seed plus the name of a numpy bit generator."""

    seed: int
    algorithm: str = "pcg64"

    def __post_init__(self):
        if self.algorithm not in _BIT_GENERATORS:
            raise ValueError(f"unknown generator {self.algorithm!r}, choose from {sorted(_BIT_GENERATORS)}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(_BIT_GENERATORS[self.algorithm](self.seed))

    def offset(self, index: int) -> "RngSpec":
        return RngSpec((self.seed + index) % (1 << 64), self.algorithm)


def random_dfa(n: int, k: int, rng: RngSpec | np.random.Generator) -> Dfa:
    """Every transition independently uniform on the ``n`` states."""
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    table = gen.integers(0, n, size=(n, k), dtype=np.int64)
    return Dfa(n, k, tuple(map(tuple, table.tolist())))


def cerny(n: int) -> Dfa:
    """Černý automaton C_n: letter 0 sends state 0 to 1, letter 1 rotates."""
    if n < 1:
        raise ValueError("n must be positive")
    merge = [1 if q == 0 and n > 1 else q for q in range(n)]
    shift = [(q + 1) % n for q in range(n)]
    return Dfa.from_columns([merge, shift])


def constant_letter(n: int) -> Dfa:
    """Letter 0 sends everything to state 0, letter 1 is the identity."""
    return Dfa.from_columns([[0] * n, list(range(n))])


FAMILIES: dict[str, Callable[[int], Dfa]] = {
    "cerny": cerny,
    "constant": constant_letter,
}


def register_family(name: str, builder: Callable[[int], Dfa]):
    """Make an extra automaton family available to ``generate``."""
    if name in FAMILIES:
        raise ValueError(f"family {name!r} already registered")
    FAMILIES[name] = builder
