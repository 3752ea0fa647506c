"""Problem-agnostic squeaky-wheel engine.

The engine keeps one mutable solution and repeats five phases: analysis
scores every component in [0, 1], selection probabilistically discards
low-fitness components, mutation discards a few survivors at random,
prioritization orders the discarded components worst-first, and
construction repairs the solution by rescheduling them greedily.
``mode="swo"`` runs the classic variant instead: every component is
discarded each iteration and mutation is skipped, so each iteration is a
full prioritized rebuild.

Problem knowledge lives in an adapter object (see :class:`ProblemAdapter`);
:mod:`eswo.driver` and :mod:`eswo.nurse` provide the two shipped adapters.

All randomness flows through a single ``numpy.random.Generator`` per run
(PCG64 via ``default_rng(seed)``), drawn in a fixed phase order: one
selection draw, then one mutation draw per survivor in ascending component
id order, then whatever draws construction needs. Identical inputs, config
and seed therefore reproduce the run bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple, Protocol, Sequence

import numpy as np

from .errors import ConstructionFailure, InvalidConfig

ESWO = "eswo"
SWO = "swo"
MODES = (ESWO, SWO)


class ComponentFitness(NamedTuple):
    """Fitness of one solution component, as produced by analysis."""

    component: int
    value: float


class ProblemAdapter(Protocol):
    """Operations the engine requires of a problem plugin.

    ``analyze`` must return exactly one fitness per component currently in
    the solution, each in [0, 1]. After ``construct_one`` has succeeded for
    every task returned by ``expand``, ``is_complete`` must hold.
    Adapters must not hold hidden global state; one engine run owns one
    mutable solution.
    """

    def analyze(self, solution) -> list[ComponentFitness]: ...

    def remove(self, solution, component: int) -> None: ...

    def expand(self, solution, queue: Sequence[ComponentFitness]) -> Sequence[Any]: ...

    def construct_one(self, solution, task, rng: np.random.Generator) -> None: ...

    def objective(self, solution): ...

    def is_complete(self, solution) -> bool: ...

    def copy_solution(self, solution): ...

    def initial_solution(self, rng: np.random.Generator): ...


@dataclass
class EngineConfig:
    """Run parameters and stopping conditions.

    At least one of ``stop_no_improve``, ``stop_max_iters`` or
    ``stop_on_known_optimum`` must be set. In SWO mode ``mutation_rate``
    and ``selection_offset`` are ignored: every component is removed every
    iteration.
    """

    mode: str = ESWO
    mutation_rate: float = 0.05
    selection_offset: float = 0.3
    stop_no_improve: int | None = 1000
    stop_max_iters: int | None = None
    stop_on_known_optimum: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise InvalidConfig(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if not 0.0 <= self.selection_offset <= 1.0:
            raise InvalidConfig(f"selection_offset must be in [0, 1], got {self.selection_offset}")
        if self.stop_no_improve is None and self.stop_max_iters is None \
                and self.stop_on_known_optimum is None:
            raise InvalidConfig("at least one stopping condition must be set")
        for name in ("stop_no_improve", "stop_max_iters"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InvalidConfig(f"{name} must be a positive integer, got {value}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidConfig(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass
class RunResult:
    """Outcome of one engine run.

    ``objective_trace`` holds one ``(iteration, current, best)`` record per
    iteration, taken after the construction phase; the best column is
    non-increasing. ``best_objective`` always equals the problem objective
    recomputed from ``best_solution``.
    """

    best_objective: Any
    best_solution: Any
    iterations_run: int
    objective_trace: list[tuple[int, Any, Any]] = field(repr=False)
    seed: int = 0
    elapsed: float = 0.0


def select(fitnesses: Iterable[ComponentFitness], selection_offset: float,
           rng: np.random.Generator) -> set[int]:
    """Pick the components to discard this iteration.

    Draws one uniform threshold seed per call and removes every component
    whose fitness falls below (draw - selection_offset); components at or
    above the threshold survive. A fitness of exactly 1 can never be
    selected. With offset 0 this is the bare random-number rule used for
    nurse scheduling.
    """
    threshold = rng.random() - selection_offset
    return {cf.component for cf in fitnesses if cf.value < threshold}


def mutate(survivors: Iterable[int], mutation_rate: float,
           rng: np.random.Generator) -> set[int]:
    """Discard each survivor independently with probability ``mutation_rate``.

    One uniform draw per survivor, taken in ascending component id order so
    the stream is reproducible.
    """
    removed = set()
    for component in sorted(survivors):
        if rng.random() < mutation_rate:
            removed.add(component)
    return removed


def prioritize(removed: Iterable[ComponentFitness]) -> list[ComponentFitness]:
    """Order removed components for reconstruction, worst fitness first.

    Ties break on ascending component id so the queue is a total order.
    """
    queue = sorted(removed, key=lambda cf: (cf.value, cf.component))
    seen = set()
    for cf in queue:
        if cf.component in seen:
            raise ValueError(f"duplicate component {cf.component} in removal queue")
        seen.add(cf.component)
    return queue


def run(adapter: ProblemAdapter, initial, config: EngineConfig,
        rng: np.random.Generator | None = None) -> RunResult:
    """Improve ``initial`` through the analysis/selection/mutation/
    prioritization/construction loop until a stopping condition fires.

    ``initial`` must be complete. The solution object is mutated in place;
    the best complete solution seen is snapshotted and returned. Pass
    ``rng`` only to continue an existing stream (e.g. the one that built
    the initial solution); by default a fresh generator is seeded from the
    config.
    """
    config.validate()
    if not adapter.is_complete(initial):
        raise InvalidConfig("initial solution is not complete")
    if rng is None:
        rng = np.random.default_rng(config.seed)

    start = time.perf_counter()
    solution = initial
    best_objective = adapter.objective(solution)
    best_solution = adapter.copy_solution(solution)
    trace: list[tuple[int, Any, Any]] = []
    since_improve = 0
    iteration = 0

    while True:
        iteration += 1
        fitnesses = adapter.analyze(solution)

        if config.mode == SWO:
            removed = {cf.component for cf in fitnesses}
        else:
            removed = select(fitnesses, config.selection_offset, rng)
            survivors = [cf.component for cf in fitnesses if cf.component not in removed]
            removed |= mutate(survivors, config.mutation_rate, rng)

        queue = prioritize(cf for cf in fitnesses if cf.component in removed)
        for cf in queue:
            adapter.remove(solution, cf.component)
        for task in adapter.expand(solution, queue):
            adapter.construct_one(solution, task, rng)
        if not adapter.is_complete(solution):
            raise ConstructionFailure("construction phase left the solution incomplete")

        current = adapter.objective(solution)
        if current < best_objective:
            best_objective = current
            best_solution = adapter.copy_solution(solution)
            since_improve = 0
        else:
            since_improve += 1
        trace.append((iteration, current, best_objective))

        if config.stop_on_known_optimum is not None \
                and best_objective <= config.stop_on_known_optimum:
            break
        if config.stop_no_improve is not None and since_improve >= config.stop_no_improve:
            break
        if config.stop_max_iters is not None and iteration >= config.stop_max_iters:
            break

    return RunResult(
        best_objective=best_objective,
        best_solution=best_solution,
        iterations_run=iteration,
        objective_trace=trace,
        seed=config.seed,
        elapsed=time.perf_counter() - start,
    )


def solve(adapter: ProblemAdapter, config: EngineConfig) -> RunResult:
    """Build the adapter's initial solution and run the engine on it.

    Initial construction and the engine loop share one RNG stream seeded
    from the config, so a (problem, config) pair fully determines the run.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    initial = adapter.initial_solution(rng)
    return run(adapter, initial, config, rng=rng)
