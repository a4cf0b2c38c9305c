"""The nine classification task suites over the 46-condition catalog."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..lightsim import (ConditionKind, LightCondition, condition_catalog)

TASK_NAMES = ("no-variations", "intensity", "direction", "daylight", "led",
              "daylight-vs-led", "temp-or-direction", "temp-and-direction",
              "multi-illuminant")

EXPECTED_SUBSET_COUNTS = dict(zip(TASK_NAMES, (46, 12, 72, 132, 30, 72, 72, 36, 6)))


class TaskError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSuite:
    name: str
    subsets: tuple[tuple[str, str], ...]  # (train_condition_id, test_condition_id)
    # per-subset scalar parameter difference, when the task has one
    deltas: dict[tuple[str, str], float] = field(default_factory=dict)


def _ordered_pairs(ids):
    return [(a, b) for a in ids for b in ids if a != b]


def build_tasks(catalog: list[LightCondition] | None = None) -> list[TaskSuite]:
    """Construct all nine suites; counts (46, 12, 72, 132, 30, 72, 72, 36, 6)."""
    if catalog is None:
        catalog = condition_catalog()
    by_kind = {}
    for c in catalog:
        by_kind.setdefault(c.kind, []).append(c)
    missing = [k.value for k in ConditionKind if k not in by_kind]
    if missing or len(catalog) != 46:
        raise TaskError(f"incomplete catalog; missing kinds: {missing}")

    params = {c.id: c for c in catalog}
    suites = []

    suites.append(TaskSuite("no-variations",
                            tuple((c.id, c.id) for c in catalog)))

    ints = [c.id for c in by_kind[ConditionKind.INTENSITY]]
    pairs = _ordered_pairs(ints)
    suites.append(TaskSuite("intensity", tuple(pairs),
                            {p: abs(params[p[0]].intensity
                                    - params[p[1]].intensity) * 100 for p in pairs}))

    dirs = [c.id for c in by_kind[ConditionKind.DIRECTION]]
    pairs = _ordered_pairs(dirs)
    suites.append(TaskSuite("direction", tuple(pairs),
                            {p: abs(params[p[0]].theta - params[p[1]].theta)
                             for p in pairs}))

    days = [c.id for c in by_kind[ConditionKind.DAYLIGHT]]
    pairs = _ordered_pairs(days)
    suites.append(TaskSuite("daylight", tuple(pairs),
                            {p: abs(params[p[0]].cct - params[p[1]].cct)
                             for p in pairs}))

    leds = [c.id for c in by_kind[ConditionKind.LED]]
    pairs = _ordered_pairs(leds)
    suites.append(TaskSuite("led", tuple(pairs),
                            {p: abs(params[p[0]].cct - params[p[1]].cct)
                             for p in pairs}))

    # one-way: daylight trains, LED tests
    suites.append(TaskSuite("daylight-vs-led",
                            tuple((d, l) for d in days for l in leds)))

    combos = [c.id for c in by_kind[ConditionKind.COLOR_AND_DIRECTION]]
    suites.append(TaskSuite("temp-or-direction", tuple(_ordered_pairs(combos))))

    both = [(a, b) for a in combos for b in combos
            if params[a].cct != params[b].cct
            and params[a].theta != params[b].theta]
    suites.append(TaskSuite("temp-and-direction", tuple(both)))

    multi = [c.id for c in by_kind[ConditionKind.MULTI_ILLUMINANT]]
    suites.append(TaskSuite("multi-illuminant", tuple(_ordered_pairs(multi))))

    for s in suites:
        assert len(s.subsets) == EXPECTED_SUBSET_COUNTS[s.name], s.name
    return suites


def get_task(name: str) -> TaskSuite:
    for s in build_tasks():
        if s.name == name:
            return s
    raise TaskError(f"unknown task {name!r}; choose from {TASK_NAMES}")
