"""Compose the final corpus to target role proportions by token budget.

Role budgets come from the grand total and are not renormalized after a
shortfall; shortfalls are surfaced instead, since targets are soft. Reported
percentages use two-decimal half-up rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping

from pintkit.review import DatasetScore, Selection, select_datasets


class MixError(ValueError):
    pass


@dataclass(frozen=True)
class AvailableDataset:
    role: str
    tokens: int
    score: float = 0.0


@dataclass
class MixPlan:
    allocations: dict[str, int]
    role_totals: dict[str, int]
    grand_total: int
    realized_proportions: dict[str, float]
    shortfalls: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def plan_mix(
    available: Mapping[str, AvailableDataset | tuple],
    targets: Mapping[str, float],
    total: int,
) -> MixPlan:
    """Pick whole datasets per role (best score first) to hit fraction*total."""
    if total < 0:
        raise MixError("total must be >= 0")
    target_sum = sum(targets.values())
    if abs(target_sum - 1.0) > 1e-9:
        raise MixError(f"target proportions sum {target_sum:g} != 1")

    datasets = {
        name: entry if isinstance(entry, AvailableDataset) else AvailableDataset(*entry)
        for name, entry in available.items()
    }
    by_role: dict[str, list[str]] = {}
    for name, entry in datasets.items():
        by_role.setdefault(entry.role, []).append(name)

    allocations: dict[str, int] = {}
    role_totals: dict[str, int] = {}
    shortfalls: dict[str, int] = {}
    warnings: list[str] = []

    for role, fraction in targets.items():
        budget = fraction * total
        role_totals[role] = 0
        if fraction <= 0:
            continue
        members = by_role.get(role, [])
        if not members:
            shortfalls[role] = int(budget)
            warnings.append(f"role {role!r}: no datasets available, short {int(budget)} tokens")
            continue
        scores = [DatasetScore(n, 0, datasets[n].score, {}) for n in members]
        counts = {n: datasets[n].tokens for n in members}
        # round() not ceil(): 0.4 * 100 lands at 40.000000000000006 in float
        # and a soft budget must not inflate by a whole token for that.
        picked: Selection = select_datasets(scores, counts, round(budget))
        allocations.update(picked.allocations)
        role_totals[role] = picked.total_tokens
        if picked.shortfall:
            shortfalls[role] = picked.shortfall
            warnings.append(f"role {role!r}: short {picked.shortfall} tokens of target {int(budget)}")

    grand_total = sum(role_totals.values())
    realized = {
        role: (tokens / grand_total if grand_total else 0.0)
        for role, tokens in role_totals.items()
    }
    return MixPlan(
        allocations=allocations,
        role_totals=role_totals,
        grand_total=grand_total,
        realized_proportions=realized,
        shortfalls=shortfalls,
        warnings=warnings,
    )


def percent(tokens: int, grand_total: int) -> float:
    """100 * tokens / grand_total at two decimals, half-up."""
    if grand_total <= 0:
        raise MixError("grand total must be positive")
    value = Decimal(tokens) * 100 / Decimal(grand_total)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ProportionReport:
    grand_total: int
    per_dataset: dict[str, float]
    per_role: dict[str, float]
    dataset_tokens: dict[str, int] = field(default_factory=dict)
    role_tokens: dict[str, int] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"{'dataset':<40} {'tokens':>18} {'%':>7}"]
        for name, pct in self.per_dataset.items():
            out.append(f"{name:<40} {self.dataset_tokens.get(name, 0):>18} {pct:>7.2f}")
        if self.per_role:
            out.append("-" * 67)
            for role, pct in self.per_role.items():
                out.append(f"{role:<40} {self.role_tokens.get(role, 0):>18} {pct:>7.2f}")
        out.append(f"{'total':<40} {self.grand_total:>18} {100.0:>7.2f}")
        return out


def report_proportions(
    counts: Mapping[str, int],
    roles: Mapping[str, str] | None = None,
) -> ProportionReport:
    """Percentage table per dataset (and per role when a role map is given)."""
    if any(v < 0 for v in counts.values()):
        raise MixError("token counts must be non-negative")
    grand_total = sum(counts.values())
    if grand_total == 0:
        raise MixError("all token counts are zero")
    per_dataset = {name: percent(tokens, grand_total) for name, tokens in counts.items()}
    per_role: dict[str, float] = {}
    role_totals: dict[str, int] = {}
    if roles:
        for name, tokens in counts.items():
            role = roles.get(name, "unassigned")
            role_totals[role] = role_totals.get(role, 0) + tokens
        per_role = {role: percent(tokens, grand_total) for role, tokens in role_totals.items()}
    return ProportionReport(
        grand_total=grand_total,
        per_dataset=per_dataset,
        per_role=per_role,
        dataset_tokens=dict(counts),
        role_tokens=role_totals,
    )
