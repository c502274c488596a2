"""Simulation and proof-oracle toolkit for amnesiac flooding and its
intermittent-channel and bounded-capacity extensions."""

from .algorithms import Message
from .engine import Broadcast, ScenarioConfig, Trace, delivery_time, run, termination_time
from .graph import Graph, load_graph
from .scheme import AvailabilityScheme, random_scheme

__all__ = [
    "AvailabilityScheme",
    "Broadcast",
    "Graph",
    "Message",
    "ScenarioConfig",
    "Trace",
    "delivery_time",
    "load_graph",
    "random_scheme",
    "run",
    "termination_time",
]

__version__ = "0.1.0"
