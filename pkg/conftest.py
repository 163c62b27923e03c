"""Shared fixtures: the small models used across the test modules."""

from pathlib import Path
from types import SimpleNamespace

import numpy as np
import pytest

from src.compiler import load_model
from src.config import MODELS_DIR
from src.pex import bern, elementary, func, table, tuple_of, uniform


@pytest.fixture
def models_dir() -> Path:
    return MODELS_DIR


@pytest.fixture
def load_corpus(models_dir):
    """Compile a corpus model by file stem."""
    def _load(stem: str):
        path = models_dir / f"{stem}.prob"
        return load_model(path.read_text(encoding='utf-8'), path.name)
    return _load


@pytest.fixture
def binaries():
    """b1 and b2 of the summing examples, with s = b1 + b2."""
    b1 = elementary({0: '1/3', 1: '2/3'})
    b2 = elementary({0: '3/4', 1: '1/4'})
    return SimpleNamespace(b1=b1, b2=b2, s=b1 + b2)


@pytest.fixture
def dice():
    d1 = uniform(range(1, 7))
    d2 = uniform(range(1, 7))
    return SimpleNamespace(d1=d1, d2=d2, d=d1 + d2)


@pytest.fixture
def rsg():
    """Rain / sprinkler / wet grass network with a measuring device."""
    rain = bern('0.20')
    sprinkler = table(rain, {True: bern('0.01'), False: bern('0.40')})
    grass_wet = table(tuple_of([sprinkler, rain]), {
        (False, False): False,
        (False, True): bern('0.80'),
        (True, False): bern('0.90'),
        (True, True): bern('0.99'),
    })
    measure = table(grass_wet, {
        True: elementary({2: '0.125', 3: '0.375', 4: '0.500'}),
        False: elementary({0: '0.500', 1: '0.375', 2: '0.125'}),
    })
    return SimpleNamespace(rain=rain, sprinkler=sprinkler, grass_wet=grass_wet,
                           measure=measure, norm_measure=(measure - 2) / 2)


@pytest.fixture
def jobs():
    d_a = elementary({3: '0.1', 4: '0.8', 5: '0.1'})
    d_b = elementary({2: '0.5', 3: '0.5'})
    s = elementary({'CONSERVATIVE': '0.6', 'EVOLUTIVE': '0.3', 'DISRUPTIVE': '0.1'})
    d_c = table(s, {
        'CONSERVATIVE': elementary({2: '0.7', 3: '0.3'}),
        'EVOLUTIVE': elementary({3: '0.5', 4: '0.5'}),
        'DISRUPTIVE': elementary({7: '0.2', 8: '0.7', 9: '0.1'}),
    })
    makespan = func('max', [d_a + d_b, d_c])
    efforts = d_a + d_b + d_c
    return SimpleNamespace(d_a=d_a, d_b=d_b, d_c=d_c, s=s, makespan=makespan, efforts=efforts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
