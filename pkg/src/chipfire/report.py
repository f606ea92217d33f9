"""Structured verification outcomes shared by every checker."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


def failure_record(g, sigma, t0=None, period=None, detail: str = "", **extra) -> dict:
    rec = {
        "graph": g.to_dict(),
        "sigma": list(sigma),
        "t0": t0,
        "T": period,
        "detail": detail,
    }
    rec.update(extra)
    return rec


@dataclass
class VerificationReport:
    """Result of checking one claim over many games.

    ``failures`` holds counterexample records; ``incomplete`` marks a run cut
    short by a budget.  ``stats`` carries claim-specific tallies and
    ``headline`` keys are lifted to the top level of the JSON form.
    """

    claim: str
    parameters: dict = field(default_factory=dict)
    games_checked: int = 0
    failures: list = field(default_factory=list)
    incomplete: bool = False
    incomplete_reasons: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    headline: dict = field(default_factory=dict)
    elapsed_ms: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: "VerificationReport") -> None:
        self.games_checked += other.games_checked
        self.failures.extend(other.failures)
        self.incomplete = self.incomplete or other.incomplete
        self.incomplete_reasons.extend(other.incomplete_reasons)
        _merge_stats(self.stats, other.stats)

    def to_dict(self, timing: bool = True) -> dict:
        d = dict(self.headline)
        d.update({
            "claim": self.claim,
            "parameters": self.parameters,
            "passed": self.passed,
            "games_checked": self.games_checked,
            "failures": self.failures,
            "incomplete": self.incomplete,
        })
        if self.incomplete_reasons:
            d["incomplete_reasons"] = self.incomplete_reasons
        if self.stats:
            d["stats"] = self.stats
        if timing:
            d["elapsed_ms"] = self.elapsed_ms
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _merge_stats(into: dict, other: dict) -> None:
    # integers add, nested dicts merge recursively, anything else keeps the first value
    for k, v in other.items():
        if k not in into:
            into[k] = _copy(v)
        elif isinstance(v, dict) and isinstance(into[k], dict):
            _merge_stats(into[k], v)
        elif isinstance(v, int) and isinstance(into[k], int) and not isinstance(v, bool):
            into[k] += v


def _copy(v):
    if isinstance(v, dict):
        return {k: _copy(x) for k, x in v.items()}
    return v


def bump(stats: dict, *keys, by: int = 1) -> None:
    """Increment a nested counter: ``bump(stats, "periods", "2")``."""
    d = stats
    for k in keys[:-1]:
        d = d.setdefault(k, {})
    d[keys[-1]] = d.get(keys[-1], 0) + by
