"""Several messages competing for a channel of capacity b.

Run with ``python demos/multi_message.py``.
"""

from amflood import ScenarioConfig, run
from amflood.graph import expected_forwards, load_graph
from amflood.metrics import analyze

g = load_graph(
    """
    a b
    b c
    c d
    d a
    a c
    c e
    """
)
broadcasts = [("a", 1, 1), ("e", 1, 2), ("b", 2, 3), ("d", 3, 4)]

for policy in ("multi:smallest", "multi:fair"):
    for b in (1, 2):
        trace = run(ScenarioConfig(g, policy, broadcasts, capacity_b=b))
        report = analyze(trace)
        print(f"{policy} b={b}: {trace.outcome.summary()}")
        for mid, r in report.messages.items():
            print(f"  message {mid}: {r.forwards} sends (expected {expected_forwards(g)}), "
                  f"all delivered after {r.delivery_max} rounds, verdict {r.verdict}")
        print("  selection order at c:", trace.selections["c"])
