"""Set-covering driver scheduling.

Components are candidate driver shifts drawn from a fixed pool; a schedule
is complete when every piece of vehicle work is covered by at least one
chosen shift. A shift's fitness is the product of two factors in [0, 1]:

* a structural coefficient, the convex fuzzy aggregate of five shift
  quality criteria (work time, work/paid ratio, piece count, spell count,
  fractional-cover value), and
* an over-cover factor, the fraction of the shift's work minutes that no
  other chosen shift also covers (1 = sole cover, 0 = fully redundant).

The objective charges each chosen shift its paid minutes plus a fixed
2000-minute levy, so fewer shifts always beat cheaper shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .engine import ESWO, ComponentFitness, EngineConfig
from .errors import (
    IncompleteSchedule,
    InvalidBounds,
    NotInSchedule,
    OutOfRange,
    UncoverablePiece,
    ValidationError,
)

SHIFT_LEVY = 2000  # minutes added per chosen shift; prioritizes shift count
DEFAULT_WEIGHTS = (0.20, 0.10, 0.10, 0.20, 0.40)
DEFAULT_K = 2
MAX_SPELLS = 4

_SPELL_SCORES = {1: 0.0, 2: 1.0, 3: 0.5, 4: 0.0}
_LN_001 = math.log(0.01)


@dataclass(frozen=True)
class WorkPiece:
    """One indivisible stretch of vehicle work between relief opportunities."""

    id: int
    work_minutes: int
    vehicle: int = 0


@dataclass(frozen=True)
class Shift:
    """A candidate driver shift: an ordered run of work pieces plus costs.

    ``lp_fraction`` is the shift's value in a fractional cover of the
    instance, if one was supplied; shifts without one score zero on that
    criterion.
    """

    id: int
    paid_minutes: int
    work_minutes: int
    spells: int
    pieces: tuple[int, ...]
    lp_fraction: float | None = None


@dataclass
class DriverInstance:
    """A driver scheduling problem: pieces to cover plus a pool of shifts.

    Validation enforces the model invariants (positive work, non-empty
    piece lists, spell counts 1..4, work <= paid, convex weights, every
    piece coverable). Membership bounds for the quality criteria are the
    min/max over the shift pool; the structural coefficient of every pool
    shift is precomputed since it never depends on the schedule.
    """

    pieces: list[WorkPiece]
    shifts: list[Shift]
    weights: tuple[float, float, float, float, float] = DEFAULT_WEIGHTS

    piece_by_id: dict[int, WorkPiece] = field(init=False, repr=False, compare=False)
    shift_by_id: dict[int, Shift] = field(init=False, repr=False, compare=False)
    covering: dict[int, list[int]] = field(init=False, repr=False, compare=False)
    has_lp: bool = field(init=False, repr=False, compare=False)
    bounds: dict[int, tuple[float, float]] = field(init=False, repr=False, compare=False)
    _f1: dict[int, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.weights = tuple(float(w) for w in self.weights)
        self._validate()
        self._build_tables()

    def _validate(self):
        if len(self.weights) != 5:
            raise ValidationError(f"expected 5 criterion weights, got {len(self.weights)}")
        if any(w < 0 for w in self.weights):
            raise ValidationError(f"criterion weights must be non-negative: {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValidationError(f"criterion weights must sum to 1, got {sum(self.weights)}")

        seen = set()
        for piece in self.pieces:
            if piece.id in seen:
                raise ValidationError(f"duplicate piece id {piece.id}")
            seen.add(piece.id)
            if piece.work_minutes <= 0:
                raise ValidationError(f"piece {piece.id}: work_minutes must be positive")

        shift_ids = set()
        for shift in self.shifts:
            if shift.id in shift_ids:
                raise ValidationError(f"duplicate shift id {shift.id}")
            shift_ids.add(shift.id)
            if not shift.pieces:
                raise ValidationError(f"shift {shift.id}: piece list is empty")
            if len(set(shift.pieces)) != len(shift.pieces):
                raise ValidationError(f"shift {shift.id}: repeated piece ids")
            unknown = [p for p in shift.pieces if p not in seen]
            if unknown:
                raise ValidationError(f"shift {shift.id}: unknown piece ids {unknown}")
            if shift.work_minutes <= 0:
                raise ValidationError(f"shift {shift.id}: work_minutes must be positive")
            if shift.work_minutes > shift.paid_minutes:
                raise ValidationError(
                    f"shift {shift.id}: work_minutes {shift.work_minutes} exceeds "
                    f"paid_minutes {shift.paid_minutes}")
            if not 1 <= shift.spells <= MAX_SPELLS:
                raise ValidationError(f"shift {shift.id}: spells must be 1..{MAX_SPELLS}")
            if shift.lp_fraction is not None and not 0.0 <= shift.lp_fraction <= 1.0:
                raise ValidationError(f"shift {shift.id}: lp_fraction must be in [0, 1]")

        covered = set()
        for shift in self.shifts:
            covered.update(shift.pieces)
        missing = sorted(p.id for p in self.pieces if p.id not in covered)
        if missing:
            raise ValidationError(f"no shift covers piece(s) {missing}")

        lp_values = [s.lp_fraction for s in self.shifts if s.lp_fraction is not None]
        if not lp_values and self.weights[4] >= 1.0 - 1e-12:
            raise ValidationError(
                "all weight is on the fractional-cover criterion but no shift has one")

    def _build_tables(self):
        self.piece_by_id = {p.id: p for p in self.pieces}
        self.shift_by_id = {s.id: s for s in self.shifts}
        self.covering = {p.id: [] for p in self.pieces}
        for shift in self.shifts:
            for pid in shift.pieces:
                self.covering[pid].append(shift.id)
        for lst in self.covering.values():
            lst.sort()

        work = [s.work_minutes for s in self.shifts]
        ratio = [s.work_minutes / s.paid_minutes for s in self.shifts]
        count = [len(s.pieces) for s in self.shifts]
        lp = [s.lp_fraction for s in self.shifts if s.lp_fraction is not None]
        self.has_lp = bool(lp)
        self.bounds = {}
        if self.shifts:
            self.bounds[1] = (float(max(work)), float(min(work)))
            self.bounds[2] = (max(ratio), min(ratio))
            self.bounds[3] = (float(max(count)), float(min(count)))
        if self.has_lp:
            self.bounds[5] = (float(max(lp)), float(min(lp)))
        self._f1 = {s.id: structural_coefficient(s, self) for s in self.shifts}

    def effective_weights(self) -> tuple[float, ...]:
        """Criterion weights actually applied.

        When no shift in the pool carries a fractional-cover value, that
        criterion is uninformative: its weight is redistributed
        proportionally over the other four and the criterion is skipped.
        """
        if self.has_lp:
            return self.weights
        w5 = self.weights[4]
        rest = 1.0 - w5
        return tuple(w / rest for w in self.weights[:4])

    def criterion_bounds(self, criterion: int) -> tuple[float, float]:
        """(max, min) of one raw criterion over the shift pool."""
        return self.bounds[criterion]

    def structural(self, shift_id: int) -> float:
        """Precomputed structural coefficient of one pool shift."""
        return self._f1[shift_id]


class DriverSchedule:
    """A set of chosen shifts plus a per-piece cover count.

    Complete when every piece is covered at least once. The cover counts
    are always recomputable from the chosen set.
    """

    __slots__ = ("instance", "chosen", "cover_count")

    def __init__(self, instance: DriverInstance,
                 chosen: set[int] | None = None):
        self.instance = instance
        self.chosen: set[int] = set()
        self.cover_count: dict[int, int] = {p.id: 0 for p in instance.pieces}
        for sid in sorted(chosen) if chosen else ():
            self.add(sid)

    def add(self, shift_id: int) -> None:
        if shift_id in self.chosen:
            return
        self.chosen.add(shift_id)
        for pid in self.instance.shift_by_id[shift_id].pieces:
            self.cover_count[pid] += 1

    def remove(self, shift_id: int) -> None:
        if shift_id not in self.chosen:
            return
        self.chosen.discard(shift_id)
        for pid in self.instance.shift_by_id[shift_id].pieces:
            self.cover_count[pid] -= 1

    def is_complete(self) -> bool:
        return all(c >= 1 for c in self.cover_count.values())

    def uncovered(self) -> list[int]:
        return [p.id for p in self.instance.pieces if self.cover_count[p.id] == 0]

    def copy(self) -> "DriverSchedule":
        dup = DriverSchedule.__new__(DriverSchedule)
        dup.instance = self.instance
        dup.chosen = set(self.chosen)
        dup.cover_count = dict(self.cover_count)
        return dup

    def __eq__(self, other):
        return isinstance(other, DriverSchedule) and self.chosen == other.chosen

    def __repr__(self):
        return f"DriverSchedule(chosen={sorted(self.chosen)})"


def membership_s_curve(value: float, vmax: float, vmin: float) -> float:
    """Rising S-curve membership: 0 at the pool minimum, 1 at the maximum.

    The value is clamped into [vmin, vmax] first; both branches meet at 0.5
    at the midpoint, so the curve is continuous and non-decreasing.
    """
    if vmax <= vmin:
        raise InvalidBounds(f"need max > min, got max={vmax}, min={vmin}")
    value = min(max(value, vmin), vmax)
    span = vmax - vmin
    if value < (vmax + vmin) / 2.0:
        return 2.0 * ((value - vmin) / span) ** 2
    return 1.0 - 2.0 * ((value - vmax) / span) ** 2


def membership_spells(spells: int) -> float:
    """Desirability of the spell count: two spells is ideal, one or four worst."""
    try:
        return _SPELL_SCORES[spells]
    except KeyError:
        raise OutOfRange(f"spell count must be 1..{MAX_SPELLS}, got {spells}") from None


def membership_lp(value: float | None, vmax: float, vmin: float) -> float:
    """Bell-shaped membership for the fractional-cover criterion.

    Peaks at 1 for the pool maximum and decays to 0.01 at the pool minimum;
    shifts absent from the fractional cover score 0.
    """
    if value is None:
        return 0.0
    if vmax <= vmin:
        raise InvalidBounds(f"need max > min, got max={vmax}, min={vmin}")
    value = min(max(value, vmin), vmax)
    return math.exp(_LN_001 / (vmax - vmin) ** 2 * (value - vmax) ** 2)


def structural_coefficient(shift: Shift, instance: DriverInstance) -> float:
    """Convex fuzzy aggregate of the five shift quality criteria, in [0, 1].

    Criteria whose pool-wide max equals the min are uninformative and score
    1. When the whole pool lacks fractional-cover values the criterion is
    dropped and its weight redistributed (see
    :meth:`DriverInstance.effective_weights`).
    """
    raw = (
        float(shift.work_minutes),
        shift.work_minutes / shift.paid_minutes,
        float(len(shift.pieces)),
    )
    memberships = []
    for criterion, value in zip((1, 2, 3), raw):
        vmax, vmin = instance.bounds[criterion]
        if vmax == vmin:
            memberships.append(1.0)
        else:
            memberships.append(membership_s_curve(value, vmax, vmin))
    memberships.append(membership_spells(shift.spells))
    if instance.has_lp:
        vmax, vmin = instance.bounds[5]
        if vmax == vmin:
            memberships.append(1.0 if shift.lp_fraction is not None else 0.0)
        else:
            memberships.append(membership_lp(shift.lp_fraction, vmax, vmin))
    score = sum(w * m for w, m in zip(instance.effective_weights(), memberships))
    return min(max(score, 0.0), 1.0)


def over_cover_penalty(shift: Shift, schedule: DriverSchedule,
                       instance: DriverInstance) -> float:
    """Work-minute fraction of the shift that no other chosen shift covers.

    1 when the shift is the sole cover of all its pieces, 0 when every
    piece is also covered elsewhere.
    """
    if shift.id not in schedule.chosen:
        raise NotInSchedule(f"shift {shift.id} is not in the schedule")
    total = 0
    alone = 0
    for pid in shift.pieces:
        beta = instance.piece_by_id[pid].work_minutes
        total += beta
        if schedule.cover_count[pid] == 1:
            alone += beta
    return alone / total


def shift_fitness(shift: Shift, schedule: DriverSchedule,
                  instance: DriverInstance) -> float:
    """Fitness of a chosen shift: structural coefficient times over-cover factor."""
    return instance.structural(shift.id) * over_cover_penalty(shift, schedule, instance)


def driver_objective(schedule: DriverSchedule, instance: DriverInstance) -> int:
    """Total paid minutes plus the per-shift levy, over the chosen shifts."""
    if not schedule.is_complete():
        raise IncompleteSchedule(f"pieces uncovered: {schedule.uncovered()}")
    return sum(instance.shift_by_id[sid].paid_minutes + SHIFT_LEVY
               for sid in schedule.chosen)


def expand_to_piece_sequence(queue, schedule: DriverSchedule,
                             instance: DriverInstance) -> list[int]:
    """Map the removal queue of shifts to the ordered pieces needing cover.

    Walks the removed shifts in queue order, emitting each shift's pieces
    in their stored order while skipping pieces still covered by surviving
    shifts and pieces already emitted. Every uncovered piece appears
    exactly once.
    """
    sequence: list[int] = []
    emitted: set[int] = set()
    for entry in queue:
        sid = entry[0] if isinstance(entry, tuple) else entry
        for pid in instance.shift_by_id[sid].pieces:
            if schedule.cover_count[pid] >= 1 or pid in emitted:
                continue
            emitted.add(pid)
            sequence.append(pid)
    return sequence


def _prospective_fitness(shift: Shift, schedule: DriverSchedule,
                         instance: DriverInstance) -> float:
    """Fitness a pool shift would have if added to the current partial schedule."""
    total = 0
    alone = 0
    for pid in shift.pieces:
        beta = instance.piece_by_id[pid].work_minutes
        total += beta
        if schedule.cover_count[pid] == 0:
            alone += beta
    return instance.structural(shift.id) * (alone / total)


def construct_one(schedule: DriverSchedule, piece_id: int, instance: DriverInstance,
                  k: int, rng) -> int:
    """Cover one uncovered piece by adding a shift from its coverage list.

    All pool shifts containing the piece are scored with the same fitness
    form the analysis uses, computed against the current partial schedule;
    one of the k best (fewer if the list is shorter) is chosen uniformly at
    random. Returns the chosen shift id. k=1 degenerates to the argmax with
    ties broken by ascending shift id.
    """
    candidates = instance.covering[piece_id]
    if not candidates:
        raise UncoverablePiece(f"no shift covers piece {piece_id}", task=piece_id)
    scored = sorted(
        ((-_prospective_fitness(instance.shift_by_id[sid], schedule, instance), sid)
         for sid in candidates))
    top = scored[:max(1, k)]
    chosen = top[int(rng.integers(len(top)))][1] if len(top) > 1 else top[0][1]
    schedule.add(chosen)
    return chosen


def remove_redundant(schedule: DriverSchedule, instance: DriverInstance) -> DriverSchedule:
    """Drop shifts whose every piece is covered elsewhere, costliest first.

    Re-checks redundancy after each drop, so of two mutually redundant
    shifts only the costlier one goes. The schedule stays complete.
    Intended as optional post-processing of a final schedule; the search
    itself never calls it.
    """
    while True:
        redundant = [
            sid for sid in schedule.chosen
            if all(schedule.cover_count[pid] > 1
                   for pid in instance.shift_by_id[sid].pieces)
        ]
        if not redundant:
            return schedule
        redundant.sort(key=lambda sid: (-instance.shift_by_id[sid].paid_minutes, sid))
        schedule.remove(redundant[0])


class DriverProblem:
    """Engine adapter: components are chosen shifts, repair tasks are pieces."""

    def __init__(self, instance: DriverInstance, k: int = DEFAULT_K):
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        self.instance = instance
        self.k = k

    def analyze(self, schedule: DriverSchedule) -> list[ComponentFitness]:
        instance = self.instance
        out = []
        for sid in sorted(schedule.chosen):
            shift = instance.shift_by_id[sid]
            out.append(ComponentFitness(sid, shift_fitness(shift, schedule, instance)))
        return out

    def remove(self, schedule: DriverSchedule, component: int) -> None:
        schedule.remove(component)

    def expand(self, schedule: DriverSchedule, queue) -> list[int]:
        return expand_to_piece_sequence(queue, schedule, self.instance)

    def construct_one(self, schedule: DriverSchedule, task: int, rng) -> None:
        if schedule.cover_count[task] >= 1:
            return  # an earlier placement this phase already covered it
        construct_one(schedule, task, self.instance, self.k, rng)

    def objective(self, schedule: DriverSchedule) -> int:
        return driver_objective(schedule, self.instance)

    def is_complete(self, schedule: DriverSchedule) -> bool:
        return schedule.is_complete()

    def copy_solution(self, schedule: DriverSchedule) -> DriverSchedule:
        return schedule.copy()

    def initial_solution(self, rng) -> DriverSchedule:
        """Greedy construction over a uniformly shuffled piece order."""
        schedule = DriverSchedule(self.instance)
        ids = [p.id for p in self.instance.pieces]
        order = rng.permutation(len(ids))
        for idx in order:
            pid = ids[int(idx)]
            if schedule.cover_count[pid] == 0:
                construct_one(schedule, pid, self.instance, self.k, rng)
        return schedule


def default_config(seed: int = 0, mode: str = ESWO) -> EngineConfig:
    """Stock driver-scheduling parameters: offset 0.3, mutation 0.05,
    stop after 1000 iterations without improvement."""
    return EngineConfig(mode=mode, mutation_rate=0.05, selection_offset=0.3,
                        stop_no_improve=1000, seed=seed)
