"""Verdicts that say how much of an infinite object they depend on."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

# statuses whose truth does not depend on unmaterialized levels or chain nodes
EXACT = frozenset({"exact", "yes", "no", "equal", "differ", "valid", "invalid",
                   "empty", "bijection", "not_bijection", "iso", "not_iso"})


@dataclass(frozen=True)
class Certificate:
    status: str
    depth: int | None = None
    chain: int | None = None
    witness: Any = None

    @property
    def exact(self) -> bool:
        return self.status in EXACT

    @property
    def holds(self) -> bool:
        """Positive verdict, exact or windowed."""
        return self.status not in {"no", "differ", "invalid", "not_bijection", "not_iso"}

    def label(self) -> str:
        if self.status.endswith("_at"):
            return f"{self.status}({self.depth})"
        if self.status == "window":
            return f"window({self.chain}, {self.depth})"
        if self.status == "pruned_to_depth":
            return f"pruned_to_depth({self.depth})"
        return self.status

    def __str__(self):
        if self.witness is not None:
            return f"{self.label()} witness={self.witness!r}"
        return self.label()


def exact(status: str = "exact", witness=None) -> Certificate:
    return Certificate(status, witness=witness)


def at_depth(status: str, depth: int, witness=None) -> Certificate:
    return Certificate(f"{status}_at", depth=depth, witness=witness)


def window(chain: int, depth: int, witness=None) -> Certificate:
    return Certificate("window", depth=depth, chain=chain, witness=witness)


def weakest(certs, chain: int, depth: int) -> Certificate:
    """Combine exactness: exact only if every part is."""
    certs = list(certs)
    if all(c.exact for c in certs):
        return exact()
    return window(chain, depth)
