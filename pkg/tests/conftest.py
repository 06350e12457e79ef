import os
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from spldp import lang
from spldp.decompose import program_cfg
from spldp.generate import random_program

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).resolve().parent.parent / "data"

GCD = "while x >= 1 { if x >= y { x = x - y; break } else { y = y - x; continue } }"
SIX_VARS = (DATA / "six_vars.spl").read_text()
DIAMOND_EDGES = [(1, 2), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6), (6, 7), (7, 8)]


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def six_vars_cfg():
    return program_cfg(SIX_VARS)


def diamond_cfg():
    from spldp.decompose import cfg_of
    from spldp.graph import Edge
    from spldp.recognize import recognize

    return cfg_of(recognize(range(1, 9), [Edge(i, a, b) for i, (a, b) in enumerate(DIAMOND_EDGES)]))


def program_corpus(seed: int, count: int, max_vertices: int = 14, **kw):
    rng = random.Random(seed)
    return [random_program(rng, max_vertices, **kw) for _ in range(count)]


def vertex_named(cfg, predicate):
    """The unique vertex satisfying ``predicate(cfg, v)``."""
    found = [v for v in cfg.vertices if predicate(cfg, v)]
    assert len(found) == 1, found
    return found[0]


def if_vertex(cfg):
    """The vertex with two outgoing command edges (the branch point of an if)."""
    return vertex_named(cfg, lambda g, v: len(g.succ[v]) == 2 and v != g.s)
