"""Exceptions and the shared cost guard."""

from __future__ import annotations

import os

DEFAULT_MAX_COST = 2**20


class FraisseError(Exception):
    """Base class for library errors."""


class FlavorMismatch(FraisseError, ValueError):
    pass


class StructureError(FraisseError, ValueError):
    """A structure, family or file violates its invariants.

    ``offending`` carries the violating tuple when there is one.
    """

    def __init__(self, message: str, offending=None):
        super().__init__(message)
        self.offending = offending


class CostCapExceeded(FraisseError):
    """Raised instead of sampling when an exhaustive scan is too large."""

    def __init__(self, what: str, cost: int, cap: int):
        super().__init__(f"{what}: cost {cost} exceeds cap {cap} (set FORGE_MAX_COST to override)")
        self.cost = cost
        self.cap = cap


def max_cost(default: int = DEFAULT_MAX_COST) -> int:
    value = os.environ.get("FORGE_MAX_COST")
    if value:
        return int(value)
    return default


def guard(what: str, cost: int, default: int = DEFAULT_MAX_COST) -> None:
    cap = max_cost(default)
    if cost > cap:
        raise CostCapExceeded(what, cost, cap)
