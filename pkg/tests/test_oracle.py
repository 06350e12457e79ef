import itertools

import pytest

from spldp import oracle, pcsp
from spldp.costs import INF
from spldp.decompose import program_cfg


def exhaustive(inst):
    verts = inst.vertices
    best, arg = INF, None
    for values in itertools.product(*(inst.domains[v] for v in verts)):
        a = dict(zip(verts, values))
        c = pcsp.eval_cost(inst, a)
        if c < best:
            best, arg = c, a
    return best, arg


def test_brute_force_agrees_with_plain_enumeration():
    cfg = program_cfg("while ? { if ? { x = 1 } else { break } }")
    inst = pcsp.PcspInstance(cfg, [0, 1, 2], lambda e, a, b: (3 * a + b + hash(e.id) % 3) % 5,
                             lambda v, a: (v * a) % 2)
    best, arg = oracle.brute_force(inst)
    assert (best, arg) == exhaustive(inst)


def test_first_minimum_wins():
    cfg = program_cfg("x = 1")
    inst = pcsp.PcspInstance(cfg, [0, 1], lambda e, a, b: 0)
    _, arg = oracle.brute_force(inst)
    assert set(arg.values()) == {0}


def test_limit():
    cfg = program_cfg("x = 1; y = 2; z = 3")
    inst = pcsp.PcspInstance(cfg, range(10), lambda e, a, b: 0)
    with pytest.raises(oracle.OracleLimitExceeded):
        oracle.brute_force(inst, limit=1000)


def test_infeasible():
    cfg = program_cfg("x = 1")
    inst = pcsp.PcspInstance(cfg, [0], lambda e, a, b: INF)
    assert oracle.brute_force(inst) == (INF, None)


def test_chunked_enumeration():
    # more assignments than one chunk
    cfg = program_cfg("while ? { x = 1; y = 2 }")
    inst = pcsp.PcspInstance(cfg, range(4), lambda e, a, b: (a - b) % 4, lambda v, a: int(a == 3))
    assert inst.search_space() > oracle.CHUNK
    assert oracle.brute_force(inst)[0] == pcsp.solve(inst).cost
