"""Synthetic-scene metadata and the scene-regularization filter.

Synthetic crowd scenes carry a density-level category (0-8), a capture
time, a weather category (0: clear, 1: clouds, 2: rain, 3: foggy,
4: thunder, 5: overcast, 6: extra sunny), a person count and a
congestion ratio in [0, 1].  Adapting to a given real dataset starts by
keeping only the scenes whose attributes match that dataset's profile;
the six built-in presets below encode those profiles.  All bounds are
inclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgumentError

LEVEL_MIN, LEVEL_MAX = 0, 8
WEATHER_MIN, WEATHER_MAX = 0, 6
MINUTES_PER_DAY = 1440


def parse_time_of_day(text: str) -> int:
    """'HH:MM' -> minutes since midnight."""
    parts = text.strip().split(":")
    if len(parts) != 2:
        raise InvalidArgumentError(f"bad time of day {text!r}, expected HH:MM")
    try:
        hours, minutes = int(parts[0]), int(parts[1])
    except ValueError:
        raise InvalidArgumentError(f"bad time of day {text!r}, expected HH:MM") from None
    if not (0 <= hours < 24 and 0 <= minutes < 60):
        raise InvalidArgumentError(f"time of day {text!r} out of range")
    return hours * 60 + minutes


def format_time_of_day(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


@dataclass(frozen=True)
class SceneMeta:
    """Attributes of one synthetic scene."""

    id: str
    level: int
    time_minutes: int
    weather: int
    count: int
    ratio: float

    def __post_init__(self):
        if not (LEVEL_MIN <= self.level <= LEVEL_MAX):
            raise InvalidArgumentError(f"level {self.level} outside [0, 8]")
        if not (0 <= self.time_minutes < MINUTES_PER_DAY):
            raise InvalidArgumentError(f"time {self.time_minutes} outside [0, 1439]")
        if not (WEATHER_MIN <= self.weather <= WEATHER_MAX):
            raise InvalidArgumentError(f"weather {self.weather} outside [0, 6]")
        if self.count < 0:
            raise InvalidArgumentError("count must be non-negative")
        if not (0.0 <= self.ratio <= 1.0):
            raise InvalidArgumentError(f"ratio {self.ratio} outside [0, 1]")


@dataclass(frozen=True)
class FilterRule:
    """One scene-selection rule; every range is inclusive on both ends."""

    levels: frozenset[int]
    time_range: tuple[int, int]
    weathers: frozenset[int]
    count_range: tuple[int, int]
    ratio_range: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "levels", frozenset(self.levels))
        object.__setattr__(self, "weathers", frozenset(self.weathers))
        if not self.levels or not self.weathers:
            raise InvalidArgumentError("levels and weathers must be nonempty")
        for name in ("time_range", "count_range", "ratio_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidArgumentError(f"{name} start {lo} exceeds end {hi}")

    def accepts(self, meta: SceneMeta) -> bool:
        return (meta.level in self.levels
                and self.time_range[0] <= meta.time_minutes <= self.time_range[1]
                and meta.weather in self.weathers
                and self.count_range[0] <= meta.count <= self.count_range[1]
                and self.ratio_range[0] <= meta.ratio <= self.ratio_range[1])


def _rule(levels, time_span, weathers, counts, ratios) -> FilterRule:
    start, end = time_span.split("-")
    return FilterRule(levels=frozenset(levels),
                      time_range=(parse_time_of_day(start), parse_time_of_day(end)),
                      weathers=frozenset(weathers),
                      count_range=counts,
                      ratio_range=ratios)


_PRESETS = {
    "shta": _rule({4, 5, 6, 7, 8}, "6:00-19:59", {0, 1, 3, 5, 6}, (25, 4000), (0.5, 1.0)),
    "shtb": _rule({1, 2, 3, 4, 5}, "6:00-19:59", {0, 1, 5, 6}, (10, 600), (0.3, 1.0)),
    "worldexpo": _rule({2, 3, 4, 5, 6}, "6:00-18:59", {0, 1, 5, 6}, (0, 1000), (0.0, 1.0)),
    "ucf_qnrf": _rule({4, 5, 6, 7, 8}, "5:00-20:59", {0, 1, 5, 6}, (400, 4000), (0.6, 1.0)),
    "mall": _rule({1, 2, 3, 4}, "8:00-18:59", {0, 1, 5, 6}, (0, 200), (0.0, 1.0)),
    "ucsd": _rule({1, 2, 3, 4}, "8:00-18:59", {0, 1, 5, 6}, (0, 200), (0.0, 1.0)),
}

PRESET_IDS = tuple(sorted(_PRESETS))


def preset_rule(dataset_id: str) -> FilterRule:
    """Built-in selection rule profiling one of the six real datasets."""
    try:
        return _PRESETS[dataset_id.lower()]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown dataset id {dataset_id!r}; known: {', '.join(PRESET_IDS)}"
        ) from None


def filter_scenes(metas, rule: FilterRule) -> list[SceneMeta]:
    """Scenes accepted by ``rule``, in their original order."""
    return [m for m in metas if rule.accepts(m)]
