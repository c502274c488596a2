"""Build the layered graph for a blocked run and check the simulator against it.

Run with ``python demos/layered_oracle.py [out.dot]``; the optional argument
writes the layered graph in DOT format.
"""

import sys

from amflood import run
from amflood.oracle import (
    build_layered,
    check_layer_structure,
    check_m_equals_originator,
    check_send_equivalence,
    layered_to_dot,
)
from amflood.scenarios import six_node_config

config = six_node_config("synafi")
v0 = config.broadcasts[0].node
lg = build_layered(config.graph, v0, config.scheme)

for i, layer in enumerate(lg.layers):
    if not layer:
        continue
    cells = []
    for x in layer:
        origin = ",".join(sorted(str(c) for c in lg.originator[x])) or "-"
        cells.append(f"{x.label()}[{origin}]")
    print(f"layer {i} (round {lg.send_round(i)}): " + "  ".join(cells))
print(f"depth {lg.depth}, {len(lg.dummies)} dummies, {len(lg.edges)} edges")
print()

# Every send of the simulator must be a copy-to-copy edge, and the sender set a
# node holds before sending must match the originator set of its copy.
trace = run(config, record_snapshots=True)
for report in (
    check_send_equivalence(trace, lg),
    check_m_equals_originator(trace, lg),
    check_layer_structure(lg),
):
    print(report.to_text())

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(layered_to_dot(lg))
    print("wrote", sys.argv[1])
