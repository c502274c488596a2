"""Three algorithms on the six-node example graph with v2 and v3 intermittently blocked.

Run with ``python demos/six_node_example.py``.
"""

from amflood import run, termination_time
from amflood.scenarios import six_node_config, six_node_graph, six_node_scheme


def show(title, config):
    trace = run(config)
    print(f"{title}: {trace.outcome.summary()}")
    for r in sorted({e.round for e in trace.sends()})[:10]:
        hops = ", ".join(f"{e.node}->{e.peer}" for e in trace.sends() if e.round == r)
        print(f"  round {r:2d}: {hops}")
    return trace


g = six_node_graph()
print("edges:", ", ".join(f"{u}-{w}" for u, w in g.sorted_edges()))
print("blocked (node, round):", six_node_scheme().sorted_pairs())
print()

# Without blocking, plain flooding is done after four rounds.
t = show("synaf, always available", six_node_config("synaf", blocked=False))
print("  termination time:", termination_time(t, "m"))
print()

# Deferring blocked sends into one growing sender set never settles down:
# the configuration after round 5 shows up again after round 9.
show("naive deferral", six_node_config("naive"))
print()

# Two parity slots fix it; every edge is used exactly twice (the graph has a triangle).
t = show("synafi", six_node_config("synafi"))
print(f"  sends: {len(t.sends())} = 2 * {g.m} edges, termination time {termination_time(t, 'm')}")
