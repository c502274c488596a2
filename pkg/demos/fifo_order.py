"""Blocking can reorder two messages from the same source.

On the path v0 - w - u, v0 sends m in round 1 and m2 in round 2.  If w
cannot send in round 2, m waits for the next round of the same parity
while m2 overtakes it.  Run with ``python demos/fifo_order.py``.
"""

from amflood import run
from amflood.scenarios import fifo_config


def arrivals(trace, node):
    return [(e.round, e.msg) for e in trace.receives() if e.node == node]


for algorithm in ("synafi", "multi:smallest", "multi:fair"):
    for blocked in (False, True):
        trace = run(fifo_config(algorithm, blocked=blocked))
        label = "w blocked in round 2" if blocked else "no blocking"
        print(f"{algorithm:15s} {label:21s} u receives {arrivals(trace, 'u')}")

# Plain flooding simply drops the blocked send, so m never reaches u.
trace = run(fifo_config("synaf"))
print(f"{'synaf':15s} {'w blocked in round 2':21s} u receives {arrivals(trace, 'u')}")
