"""Domain types and the two scalar formulas shared by every other module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Task:
    """One unit of computation demand owned by a device.

    ``deadline_s`` is seconds remaining until the task must complete; it is
    positive at creation and shrinks while the task waits in the queue.
    ``rounds_deferred`` counts matching rounds the task has already failed.
    """

    task_id: int
    owner_id: int
    deadline_s: float
    cycles_required: float
    value: float
    arrival_step: int = 0
    rounds_deferred: int = 0

    def __post_init__(self):
        if self.cycles_required <= 0:
            raise ValueError(f"task {self.task_id}: cycles_required must be > 0")
        if self.value < 0:
            raise ValueError(f"task {self.task_id}: value must be >= 0")
        if self.rounds_deferred < 0:
            raise ValueError(f"task {self.task_id}: rounds_deferred must be >= 0")


@dataclass(frozen=True)
class SourceNode:
    """One idle or semi-idle provider offering compute time."""

    source_id: int
    owner_id: int
    idle_seconds: float
    cycles_per_second: float

    def __post_init__(self):
        if self.cycles_per_second <= 0:
            raise ValueError(f"source {self.source_id}: cycles_per_second must be > 0")
        if self.idle_seconds < 0:
            raise ValueError(f"source {self.source_id}: idle_seconds must be >= 0")

    @property
    def capacity(self) -> float:
        """Total cycles this source can still deliver."""
        return self.cycles_per_second * self.idle_seconds


@dataclass(frozen=True)
class DeviceAccount:
    """Snapshot of one device's priority balance."""

    device_id: int
    priority_balance: float


@dataclass(frozen=True)
class WeightsConfig:
    """Tunable weights and limits for matching, settlement and escalation.

    gamma_t / gamma_p weight the value-per-cycle term and the owner balance in
    the matching priority; gamma_n / gamma_m weight task value and owner
    balance in the settlement amount.  conversion_rate_r converts the weighted
    sum into priority units.  max_rounds_w is the number of failed matching
    rounds before a task escalates to the cloud.  tau_s is the network
    membership latency threshold; it is informational and never simulated.
    """

    gamma_t: float = 0.5
    gamma_p: float = 0.5
    gamma_n: float = 0.5
    gamma_m: float = 0.5
    conversion_rate_r: float = 1.0
    max_rounds_w: int = 3
    tau_s: float = 0.1

    def __post_init__(self):
        for name in ("gamma_t", "gamma_p", "gamma_n", "gamma_m"):
            g = getattr(self, name)
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {g}")
        if self.conversion_rate_r <= 0:
            raise ValueError(f"conversion_rate_r must be > 0, got {self.conversion_rate_r}")
        if self.max_rounds_w < 1:
            raise ValueError(f"max_rounds_w must be >= 1, got {self.max_rounds_w}")


def compute_matching_priority(task: Task, owner_priority: float, weights: WeightsConfig) -> float:
    """Composite priority ordering tasks each round.

    Combines the task's value per required cycle with the accumulated balance
    of its owner: gamma_t * (value / cycles) + gamma_p * balance.
    """
    if task.cycles_required <= 0:
        raise ValueError(f"task {task.task_id}: cycles_required must be > 0")
    return weights.gamma_t * (task.value / task.cycles_required) + weights.gamma_p * owner_priority


def compute_settlement_amount(task: Task, owner_priority: float, weights: WeightsConfig) -> float:
    """Priority amount the receiver owes the provider for one completed lease.

    (gamma_n * value + gamma_m * receiver balance) * conversion_rate_r.
    """
    return (weights.gamma_n * task.value + weights.gamma_m * owner_priority) * weights.conversion_rate_r
