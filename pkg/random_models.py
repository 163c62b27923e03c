"""
Random p-expression DAGs for the property tests.

Models are small enough for the possible-worlds oracle yet exercise every
node kind, shared sub-expressions and impossible evidence.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List

import numpy as np

from src.errors import StatuesError
from src.functions import get_builtin
from src.oracle import count_worlds
from src.pex import (
    Elementary, Node, elementary, func, given, mixture, multi_func, multi_given,
    table, tuple_of,
)
from src.prob import Pmf

MAX_WORLDS = 2048

NUMERIC_BINARY = ['add', 'sub', 'mul', 'min', 'max']
NUMERIC_UNARY = ['neg', 'abs']
COMPARISONS = ['lt', 'le', 'eq', 'ne', 'ge', 'gt']
FUNCTION_CHOICES = ['add', 'sub', 'max', 'min']


@dataclass
class RandomModel:
    root: Node
    numeric: List[Node] = field(default_factory=list)
    boolean: List[Node] = field(default_factory=list)
    elementaries: List[Elementary] = field(default_factory=list)


class ModelBuilder:
    """Grows pools of numeric and boolean nodes, newest nodes on top."""

    def __init__(self, rng: np.random.Generator, max_elementaries: int = 5,
                 max_domain: int = 4, derived: int = 8):
        self.rng = rng
        self.max_elementaries = max_elementaries
        self.max_domain = max_domain
        self.derived = derived
        self.numeric: List[Node] = []
        self.boolean: List[Node] = []
        self.elementaries: List[Elementary] = []
        self.tuples: List[Node] = []

    def pick(self, pool: List[Node]) -> Node:
        # favor recent nodes so graphs get deep, not just wide
        weights = np.arange(1, len(pool) + 1, dtype=float)
        return pool[self.rng.choice(len(pool), p=weights / weights.sum())]

    def weights(self, n: int) -> List[Fraction]:
        return [Fraction(int(w)) for w in self.rng.integers(1, 5, size=n)]

    def numeric_elementary(self) -> Elementary:
        k = int(self.rng.integers(1, self.max_domain + 1))
        values = self.rng.choice(np.arange(-2, 5), size=k, replace=False)
        node = elementary([(int(v), w) for v, w in zip(values, self.weights(k))])
        self.elementaries.append(node)
        return node

    def boolean_elementary(self) -> Elementary:
        p = Fraction(int(self.rng.integers(0, 5)), 4)
        node = elementary([(True, p), (False, 1 - p)])
        self.elementaries.append(node)
        return node

    def build(self) -> RandomModel:
        n = int(self.rng.integers(2, self.max_elementaries + 1))
        for _ in range(n):
            if self.rng.random() < 0.7:
                self.numeric.append(self.numeric_elementary())
            else:
                self.boolean.append(self.boolean_elementary())
        if not self.numeric:
            self.numeric.append(self.numeric_elementary())
        if not self.boolean:
            self.boolean.append(self.numeric_comparison())

        for _ in range(int(self.rng.integers(1, self.derived + 1))):
            self.grow()

        candidates = self.numeric[-3:] + self.boolean[-2:] + self.tuples[-1:]
        root = candidates[self.rng.integers(len(candidates))]
        return RandomModel(root, list(self.numeric), list(self.boolean), list(self.elementaries))

    def numeric_comparison(self) -> Node:
        name = COMPARISONS[self.rng.integers(len(COMPARISONS))]
        return func(name, [self.pick(self.numeric), self.pick(self.numeric)])

    def grow(self):
        kind = self.rng.choice([
            'arith', 'arith', 'unary', 'compare', 'logic', 'tuple', 'given', 'table',
            'multi_given', 'multi_func', 'mixture',
        ])
        grower: Callable[[], None] = getattr(self, f"_grow_{kind}")
        grower()

    def _grow_arith(self):
        name = NUMERIC_BINARY[self.rng.integers(len(NUMERIC_BINARY))]
        self.numeric.append(func(name, [self.pick(self.numeric), self.pick(self.numeric)]))

    def _grow_unary(self):
        name = NUMERIC_UNARY[self.rng.integers(len(NUMERIC_UNARY))]
        self.numeric.append(func(name, [self.pick(self.numeric)]))

    def _grow_compare(self):
        self.boolean.append(self.numeric_comparison())

    def _grow_logic(self):
        roll = self.rng.random()
        if roll < 0.3:
            self.boolean.append(~self.pick(self.boolean))
        elif roll < 0.65:
            self.boolean.append(self.pick(self.boolean) & self.pick(self.boolean))
        else:
            self.boolean.append(self.pick(self.boolean) | self.pick(self.boolean))

    def _grow_tuple(self):
        size = int(self.rng.integers(1, 4))
        items = [self.pick(self.numeric) for _ in range(size)]
        t = tuple_of(items)
        self.tuples.append(t)
        self.numeric.append(t.index(int(self.rng.integers(1, size + 1))))

    def _grow_given(self):
        if self.rng.random() < 0.5:
            self.numeric.append(given(self.pick(self.numeric), self.pick(self.boolean)))
        else:
            self.boolean.append(given(self.pick(self.boolean), self.pick(self.boolean)))

    def _grow_table(self):
        if self.rng.random() < 0.5:
            selector = self.pick(self.boolean)
            self.numeric.append(table(selector, {
                True: self.pick(self.numeric), False: self.pick(self.numeric),
            }))
            return
        selector = self.pick([n for n in self.numeric if isinstance(n, Elementary)])
        branches = {v: self.pick(self.numeric) for v in selector.pmf.values()}
        self.numeric.append(table(selector, branches))

    def _grow_multi_given(self):
        conditions = [self.pick(self.boolean) for _ in range(int(self.rng.integers(1, 4)))]
        self.numeric.append(multi_given(self.pick(self.numeric), conditions))

    def _grow_multi_func(self):
        k = int(self.rng.integers(1, len(FUNCTION_CHOICES) + 1))
        names = self.rng.choice(FUNCTION_CHOICES, size=k, replace=False)
        fnode = elementary([(get_builtin(str(name)), w) for name, w in zip(names, self.weights(k))])
        self.numeric.append(multi_func(fnode, [self.pick(self.numeric), self.pick(self.numeric)]))

    def _grow_mixture(self):
        k = int(self.rng.integers(1, 4))
        if self.rng.random() < 0.7:
            self.numeric.append(mixture([self.pick(self.numeric) for _ in range(k)]))
        else:
            self.boolean.append(mixture([self.pick(self.boolean) for _ in range(k)]))


def random_model(rng: np.random.Generator, max_worlds: int = MAX_WORLDS,
                 attempts: int = 50) -> RandomModel:
    """A random model whose root has at most max_worlds possible worlds."""
    for _ in range(attempts):
        model = ModelBuilder(rng).build()
        if count_worlds(model.root) <= max_worlds:
            return model
    return ModelBuilder(rng, max_elementaries=2, max_domain=2, derived=3).build()


def outcome(compute: Callable[[], Pmf]):
    """Result pmf, or the type of the raised error, for comparing evaluators."""
    try:
        return compute()
    except StatuesError as e:
        return type(e)


__all__ = ['RandomModel', 'ModelBuilder', 'random_model', 'outcome', 'MAX_WORLDS']
