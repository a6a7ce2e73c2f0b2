"""Connectivity restrictions: the set of permitted (control, target) pairs."""

from __future__ import annotations

from dataclasses import dataclass


class CouplingError(ValueError):
    pass


@dataclass(frozen=True)
class CouplingGraph:
    n: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for c, t in self.pairs:
            if c == t:
                raise CouplingError(f"self-loop on qubit {c}")
            if not (0 <= c < self.n and 0 <= t < self.n):
                raise CouplingError(f"pair ({c}, {t}) out of range for n={self.n}")

    def __contains__(self, pair: tuple[int, int]) -> bool:
        return pair in self.pairs

    def is_complete(self) -> bool:
        return len(self.pairs) == self.n * (self.n - 1)

    def to_text(self) -> str:
        lines = [f"n {self.n}"]
        lines += [f"{c} -> {t}" for c, t in sorted(self.pairs)]
        return "\n".join(lines) + "\n"


def complete(n: int) -> CouplingGraph:
    return CouplingGraph(n, frozenset((i, j) for i in range(n) for j in range(n) if i != j))


def line(n: int) -> CouplingGraph:
    pairs = set()
    for i in range(n - 1):
        pairs.add((i, i + 1))
        pairs.add((i + 1, i))
    return CouplingGraph(n, frozenset(pairs))


def parse_coupling(text: str) -> CouplingGraph:
    """Parse ``n <count>`` followed by ``u v`` (undirected) or ``u -> v`` lines.

    Blank lines and ``#`` comments are ignored.
    """
    n: int | None = None
    pairs: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if n is None:
            parts = body.split()
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise CouplingError(f"line {lineno}: expected 'n <count>', got {raw!r}")
            n = int(parts[1])
            continue
        directed = "->" in body
        parts = body.replace("->", " ").split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise CouplingError(f"line {lineno}: malformed edge {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise CouplingError(f"line {lineno}: self-loop on qubit {u}")
        if u >= n or v >= n:
            raise CouplingError(f"line {lineno}: qubit index out of range for n={n}")
        pairs.add((u, v))
        if not directed:
            pairs.add((v, u))
    if n is None:
        raise CouplingError("missing 'n <count>' header")
    return CouplingGraph(n, frozenset(pairs))
