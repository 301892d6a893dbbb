"""One matching round: priority sort, feasibility-gated preference matrix,
greedy source assignment, and deferral / big-task classification."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .model import Task, SourceNode, WeightsConfig, compute_matching_priority
from .settlement import PriorityLedger


@dataclass(frozen=True)
class PreferenceMatrix:
    """m x n grid of per-pair preference values with identity maps.

    values[j][i] is cycles_per_second_j / cycles_required_i when source j can
    finish task i within both its idle window and the task deadline, else 0.
    Columns are ordered by descending matching priority.
    """

    values: list[list[float]]
    row_ids: list[int]
    col_ids: list[int]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_ids), len(self.col_ids)


@dataclass(frozen=True)
class Assignment:
    task_id: int
    source_id: int
    busy_seconds: float


@dataclass(frozen=True)
class MatchResult:
    """Outcome of one greedy round: per-source leases plus leftovers."""

    assignments: list[Assignment]
    unmatched_task_ids: list[int]
    remaining_idle: dict[int, float] = field(default_factory=dict)


def sort_tasks_by_priority(tasks, ledger: PriorityLedger, weights: WeightsConfig) -> list[Task]:
    """Descending matching-priority order, ties broken by ascending task_id."""
    return sorted(
        tasks,
        key=lambda t: (-compute_matching_priority(t, ledger.balance_of(t.owner_id), weights), t.task_id),
    )


def feasible(source: SourceNode, task: Task) -> bool:
    """True iff the source has enough total cycles and finishes before the deadline."""
    return (
        task.cycles_required <= source.cycles_per_second * source.idle_seconds
        and task.cycles_required / source.cycles_per_second <= task.deadline_s
    )


def build_prefer_matrix(sources: list[SourceNode], ordered_tasks: list[Task]) -> PreferenceMatrix:
    """Build the m x n preference matrix over priority-sorted tasks.

    Empty sources or tasks yield a degenerate matrix that matches nothing.
    """
    values = [
        [src.cycles_per_second / t.cycles_required if feasible(src, t) else 0.0 for t in ordered_tasks]
        for src in sources
    ]
    return PreferenceMatrix(
        values=values,
        row_ids=[s.source_id for s in sources],
        col_ids=[t.task_id for t in ordered_tasks],
    )


def greedy_match(matrix: PreferenceMatrix, sources: list[SourceNode], ordered_tasks: list[Task]) -> MatchResult:
    """Assign each task, in priority order, its best still-free source.

    A chosen source is unavailable for later columns this round; the matrix
    itself is never mutated.  Ties on preference value go to the lowest
    source_id.  Tasks whose column holds no positive value over the free
    sources are unmatched.
    """
    source_by_id = {s.source_id: s for s in sources}
    taken: set[int] = set()
    assignments: list[Assignment] = []
    unmatched: list[int] = []

    for col, task in enumerate(ordered_tasks):
        best_row = -1
        best_val = 0.0
        for row, source_id in enumerate(matrix.row_ids):
            if source_id in taken:
                continue
            val = matrix.values[row][col]
            if val > best_val:
                best_val = val
                best_row = row
            elif val == best_val and val > 0.0 and best_row >= 0 and source_id < matrix.row_ids[best_row]:
                best_row = row
        if best_row < 0:
            unmatched.append(task.task_id)
            continue
        chosen_id = matrix.row_ids[best_row]
        chosen = source_by_id[chosen_id]
        taken.add(chosen_id)
        assignments.append(
            Assignment(
                task_id=task.task_id,
                source_id=chosen_id,
                busy_seconds=task.cycles_required / chosen.cycles_per_second,
            )
        )

    remaining = {
        a.source_id: source_by_id[a.source_id].idle_seconds - a.busy_seconds for a in assignments
    }
    return MatchResult(assignments=assignments, unmatched_task_ids=unmatched, remaining_idle=remaining)


def classify_unmatched(
    unmatched: list[Task], weights: WeightsConfig, step_seconds: float = 0.0
) -> tuple[list[Task], list[Task]]:
    """Split this round's losers into deferred tasks and cloud-bound big tasks.

    Every task's rounds_deferred is incremented.  Tasks hitting the retry
    limit, and tasks whose deadline cannot survive another step's wait,
    escalate immediately; the rest re-enter the queue for the next round.
    """
    deferred: list[Task] = []
    big: list[Task] = []
    for task in unmatched:
        if task.rounds_deferred >= weights.max_rounds_w:
            raise ValueError(
                f"task {task.task_id}: rounds_deferred {task.rounds_deferred} "
                f"already at limit {weights.max_rounds_w}"
            )
        bumped = replace(task, rounds_deferred=task.rounds_deferred + 1)
        if bumped.rounds_deferred >= weights.max_rounds_w or bumped.deadline_s - step_seconds <= 0:
            big.append(bumped)
        else:
            deferred.append(bumped)
    return deferred, big


def full_round(
    tasks, sources: list[SourceNode], ledger: PriorityLedger, weights: WeightsConfig
) -> tuple[list[Task], PreferenceMatrix, MatchResult]:
    """Convenience pipeline: sort, build the matrix, match greedily."""
    ordered = sort_tasks_by_priority(tasks, ledger, weights)
    matrix = build_prefer_matrix(sources, ordered)
    return ordered, matrix, greedy_match(matrix, sources, ordered)
