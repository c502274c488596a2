from amflood.engine import ScenarioConfig
from amflood.graph import load_graph
from amflood.verify import non_terminating, random_instance, run_sweep, verify_config

P3 = load_graph("a b\nb c")


def names(report):
    return {c.name: c.status for c in report.checks}


def test_single_source_synafi_runs_every_check():
    rep = verify_config(ScenarioConfig(P3, "synafi", [("a", 1, "m")], [("b", 2)]))
    assert names(rep) == {
        "bounds": "PASS",
        "send_equivalence": "PASS",
        "m_equals_originator": "PASS",
        "layer_structure": "PASS",
    }
    assert rep.passed


def test_staggered_sources_add_the_extension_check():
    rep = verify_config(ScenarioConfig(P3, "synafi", [("a", 1, "m"), ("c", 2, "m")]))
    assert names(rep)["multisource_equivalence"] == "PASS"
    assert names(rep)["oracle"] == "SKIP"


def test_naive_non_termination_is_not_a_failure():
    from amflood.scenarios import six_node_config

    rep = verify_config(six_node_config("naive"))
    assert names(rep)["bounds"] == "SKIP" and rep.passed


def test_random_instance_is_deterministic():
    a = random_instance(4, (1, 7), (0, 3), 9, "synafi")
    b = random_instance(4, (1, 7), (0, 3), 9, "synafi")
    assert a == b
    assert a.scheme.is_available(a.broadcasts[0].node, 1)


def test_sweep_multi_message():
    for algo in ("multi:smallest", "multi:fair"):
        rep = run_sweep((1, 7), (0, 3), 40, seed=2, algorithm=algo)
        assert rep.passed, rep.to_text()


def test_non_terminating_lists_naive_cycles():
    rep = run_sweep((4, 6), (2, 4), 50, seed=0, algorithm="naive")
    assert non_terminating(rep)
