from amflood.engine import CYCLE, ScenarioConfig, run, termination_time
from amflood.oracle import build_layered
from amflood.scenarios import (
    SIX_NODE_EXTRA_EDGES,
    fifo_config,
    six_node_completions,
    six_node_config,
    six_node_graph,
    six_node_scheme,
)


def matches_example(g):
    scheme = six_node_scheme()
    naive = run(ScenarioConfig(g, "naive", [("v0", 1, "m")], scheme)).outcome
    if naive.kind != CYCLE or (naive.first_round, naive.repeat_round) != (5, 9):
        return False
    if termination_time(run(ScenarioConfig(g, "synaf", [("v0", 1, "m")])), "m") != 4:
        return False
    lg = build_layered(g, "v0", scheme)
    t = run(ScenarioConfig(g, "synafi", [("v0", 1, "m")], scheme), record_snapshots=True)
    dummy_origins = sorted(sorted(c.node for c in lg.originator[d]) for d in lg.dummies)
    return (
        dummy_origins == [["v0"], ["v0"], ["v0", "v5"], ["v1"]]
        and t.snapshots.get((5, "v2", "m")) == {"v1", "v5"}
    )


def test_reconstruction_search():
    fits = [g for g in six_node_completions() if matches_example(g)]
    assert len(fits) == 3
    sparsest = min(fits, key=lambda g: g.m)
    assert sparsest == six_node_graph()
    assert sparsest.m == 5 + len(SIX_NODE_EXTRA_EDGES)


def test_six_node_scheme_has_four_faults():
    assert six_node_scheme().f == 4
    assert six_node_config("synafi").scheme == six_node_scheme()
    assert six_node_config("synafi", blocked=False).scheme.f == 0


def test_fifo_scenario_shape():
    cfg = fifo_config()
    assert cfg.graph.neighbors("w") == {"v0", "u"}
    assert [(b.node, b.round, b.message.id) for b in cfg.broadcasts] == [("v0", 1, "m"), ("v0", 2, "m2")]
    assert not cfg.scheme.is_available("w", 2)
