"""Verification pipeline (engine + oracles + bounds) and random sweeps."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .engine import CYCLE, ROUND_LIMIT, ScenarioConfig, Trace, run
from .graph import diameter, random_connected_graph
from .metrics import BoundReport, analyze
from .oracle import (
    CheckReport,
    build_layered,
    check_layer_structure,
    check_m_equals_originator,
    check_multisource_equivalence,
    check_send_equivalence,
)
from .scheme import random_scheme


@dataclass
class VerifyReport:
    trace: Trace
    checks: list = field(default_factory=list)
    bounds: Optional[BoundReport] = None

    @property
    def passed(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    def to_text(self) -> str:
        lines = [f"outcome: {self.trace.outcome.summary()}"]
        for c in self.checks:
            lines.append(c.to_text())
        if self.bounds is not None:
            lines.append(self.bounds.to_text())
        lines.append(f"verify: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _oracle_applicable(config: ScenarioConfig) -> Optional[str]:
    if len(config.broadcasts) != 1:
        return "oracle checks need a single broadcast of a single message"
    if config.algorithm == "synafi":
        return None
    if config.algorithm == "synaf" and config.scheme.f == 0:
        return None
    return f"no layered-graph oracle for {config.algorithm}"


def verify_config(config: ScenarioConfig, trace: Optional[Trace] = None) -> VerifyReport:
    """Run (or take) a trace and apply every applicable check."""
    if trace is None:
        trace = run(config, record_snapshots=True)
    report = VerifyReport(trace)

    if trace.terminated:
        report.bounds = analyze(trace, config)
        report.checks.append(
            CheckReport("bounds", report.bounds.passed, notes=report.bounds.to_text().splitlines())
        )
    elif config.algorithm == "naive":
        report.checks.append(
            CheckReport("bounds", True, notes=[f"run did not terminate: {trace.outcome.summary()}"], skipped=True)
        )
    else:
        report.checks.append(
            CheckReport("termination", False, [f"run did not terminate: {trace.outcome.summary()}"])
        )

    reason = _oracle_applicable(config)
    if reason is None:
        bc = config.broadcasts[0]
        lg = build_layered(config.graph, bc.node, config.scheme, bc.round)
        report.checks.append(check_send_equivalence(trace, lg))
        if trace.snapshots is not None:
            report.checks.append(check_m_equals_originator(trace, lg))
        else:
            report.checks.append(
                CheckReport("m_equals_originator", True, notes=["skipped: trace carries no snapshots"], skipped=True)
            )
        report.checks.append(check_layer_structure(lg))
    else:
        report.checks.append(CheckReport("oracle", True, notes=[f"skipped: {reason}"], skipped=True))

    ids = config.message_ids()
    if config.algorithm in ("synaf", "synafi") and len(ids) == 1 and len(config.broadcasts) > 1:
        report.checks.append(
            check_multisource_equivalence(
                config.graph,
                [(b.node, b.round) for b in config.broadcasts],
                config.algorithm,
                config.scheme,
                ids[0],
            )
        )
    return report


# -- sweeps ----------------------------------------------------------------


@dataclass
class InstanceResult:
    instance: int
    n: int
    m: int
    f: int
    algorithm: str
    outcome: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return (
            f"instance={self.instance} n={self.n} m={self.m} f={self.f} algo={self.algorithm} "
            f"outcome={self.outcome} verdict={'PASS' if self.passed else 'FAIL'}"
            + (f" {self.detail}" if self.detail else "")
        )


@dataclass
class SweepReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def outcome_counts(self) -> Counter:
        return Counter(r.outcome for r in self.results)

    def to_text(self) -> str:
        lines = [r.line() for r in self.results]
        counts = self.outcome_counts()
        lines.append(
            f"sweep: {'PASS' if self.passed else 'FAIL'} instances={len(self.results)} "
            f"passed={sum(r.passed for r in self.results)}"
            + "".join(f" {k}={v}" for k, v in sorted(counts.items()))
        )
        return "\n".join(lines)


def random_instance(
    instance: int, n_range: tuple, f_range: tuple, seed: int, algorithm: str
) -> ScenarioConfig:
    """Deterministic random scenario number ``instance`` of a sweep."""
    rng = random.Random(f"{seed}:{instance}")
    n = rng.randint(*n_range)
    g = random_connected_graph(n, rng)
    f = rng.randint(*f_range)
    diam = diameter(g)
    if algorithm.startswith("multi:"):
        k = rng.randint(1, 4)
        broadcasts = [(rng.choice(g.nodes), rng.randint(1, 4), j) for j in range(k)]
        origin = None
        b = rng.choice((1, 2))
    else:
        origin = rng.choice(g.nodes)
        broadcasts = [(origin, 1, "m")]
        b = None
    max_round = 2 * diam + 2 * f + 2
    while f > g.n * max_round - (origin is not None):
        max_round += 1
    scheme = random_scheme(g, f, max_round, rng.randrange(2**31), originator=origin)
    return ScenarioConfig(g, algorithm, broadcasts, scheme, capacity_b=b, seed=seed)


def run_sweep(
    n_range: tuple = (1, 7),
    f_range: tuple = (0, 3),
    count: int = 100,
    seed: int = 0,
    algorithm: str = "synafi",
) -> SweepReport:
    results = []
    for i in range(count):
        cfg = random_instance(i, n_range, f_range, seed, algorithm)
        rep = verify_config(cfg)
        failing = [c.name for c in rep.checks if not (c.passed or c.skipped)]
        results.append(
            InstanceResult(
                instance=i,
                n=cfg.graph.n,
                m=cfg.graph.m,
                f=cfg.scheme.f,
                algorithm=algorithm,
                outcome=rep.trace.outcome.kind,
                passed=rep.passed,
                detail=("failed: " + ",".join(failing)) if failing else "",
            )
        )
    results.sort(key=lambda r: r.instance)
    return SweepReport(results)


def non_terminating(report: SweepReport) -> list:
    return [r for r in report.results if r.outcome in (CYCLE, ROUND_LIMIT)]
