"""Parity-matrix algebra over GF(2).

A parity matrix is stored column-wise: ``cols[c]`` is an int whose bit ``r``
is the entry in row ``r``, column ``c``. Rows are input parities, columns are
output qubits, so a CNOT(ctrl, tgt) is the column addition
``cols[tgt] ^= cols[ctrl]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

Pair = tuple[int, int]


def rank(cols: Sequence[int]) -> int:
    """Rank over GF(2) of the matrix whose columns are the given bit words."""
    basis: list[int] = []
    for v in cols:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``range(n)``; ``mapping[i]`` is the image of ``i``."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"not a permutation: {self.mapping}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> Permutation:
        m = list(range(n))
        m[a], m[b] = b, a
        return cls(tuple(m))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def __len__(self) -> int:
        return len(self.mapping)

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.mapping))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, p in enumerate(self.mapping):
            inv[p] = i
        return Permutation(tuple(inv))

    def compose(self, other: Permutation) -> Permutation:
        """Return ``self ∘ other``, i.e. apply ``other`` first."""
        if other.n != self.n:
            raise ValueError("permutation size mismatch")
        return Permutation(tuple(self.mapping[other.mapping[i]] for i in range(self.n)))

    def __str__(self) -> str:
        return ", ".join(f"q{i}->q{p}" for i, p in enumerate(self.mapping))


@dataclass(frozen=True)
class ParityMatrix:
    """Full-rank n×n matrix over GF(2), word-packed per column."""

    cols: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.cols)
        if n == 0:
            raise ValueError("parity matrix needs at least one qubit")
        if any(c < 0 or c >> n for c in self.cols):
            raise ValueError("column has bits outside the matrix")
        if rank(self.cols) != n:
            raise ValueError("parity matrix is not full rank over GF(2)")

    @property
    def n(self) -> int:
        return len(self.cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> ParityMatrix:
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        cols = [0] * n
        for r, row in enumerate(rows):
            for c, bit in enumerate(row):
                if bit:
                    cols[c] |= 1 << r
        return cls(tuple(cols))

    def rows(self) -> list[list[int]]:
        return [[(self.cols[c] >> r) & 1 for c in range(self.n)] for r in range(self.n)]

    def bit(self, r: int, c: int) -> int:
        return (self.cols[c] >> r) & 1

    def __str__(self) -> str:
        return "\n".join(" ".join(map(str, row)) for row in self.rows())


def parse_matrix_text(text: str) -> ParityMatrix:
    """Read the ``n N`` header followed by N rows of N bits (spaces optional)."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n" or not head[1].isdigit():
        raise ValueError(f"expected header 'n <count>', got {lines[0]!r}")
    n = int(head[1])
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"expected {n} rows, got {len(body)}")
    rows = []
    for i, ln in enumerate(body):
        bits = ln.split()
        if len(bits) == 1 and n > 1:
            bits = list(bits[0])
        if len(bits) != n or any(b not in ("0", "1") for b in bits):
            raise ValueError(f"row {i}: expected {n} bits, got {ln!r}")
        rows.append([int(b) for b in bits])
    return ParityMatrix.from_rows(rows)


def matrix_text(m: ParityMatrix) -> str:
    return f"n {m.n}\n{m}\n"


def identity(n: int) -> ParityMatrix:
    if n < 1:
        raise ValueError("identity needs n >= 1")
    return ParityMatrix(tuple(1 << i for i in range(n)))


def apply_cnot(m: ParityMatrix, ctrl: int, tgt: int) -> ParityMatrix:
    """Add column ``ctrl`` to column ``tgt`` (CNOT with that control and target)."""
    n = m.n
    if not (0 <= ctrl < n and 0 <= tgt < n):
        raise ValueError(f"qubit index out of range for n={n}: ({ctrl}, {tgt})")
    if ctrl == tgt:
        raise ValueError(f"control equals target: {ctrl}")
    cols = list(m.cols)
    cols[tgt] ^= cols[ctrl]
    return ParityMatrix(tuple(cols))


def fold_columns(cols: Sequence[int], gates: Iterable[Pair]) -> list[int]:
    """Unchecked column-addition replay on raw words; the hot path for replay checks."""
    out = list(cols)
    n = len(out)
    for c, t in gates:
        if c == t or not (0 <= c < n and 0 <= t < n):
            raise ValueError(f"invalid CNOT ({c}, {t}) for n={n}")
        out[t] ^= out[c]
    return out


def from_gate_list(n: int, gates: Iterable[Pair]) -> ParityMatrix:
    return ParityMatrix(tuple(fold_columns(identity(n).cols, gates)))


def permute_columns(m: ParityMatrix, p: Permutation) -> ParityMatrix:
    """Column ``c`` of ``m`` lands at column ``p(c)``."""
    if p.n != m.n:
        raise ValueError(f"size mismatch: matrix {m.n}, permutation {p.n}")
    cols = [0] * m.n
    for c, word in enumerate(m.cols):
        cols[p(c)] = word
    return ParityMatrix(tuple(cols))


def permutation_matrix(p: Permutation) -> ParityMatrix:
    return permute_columns(identity(p.n), p)


def is_full_rank(rows: Sequence[Sequence[int]]) -> bool:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    words = [sum(bit << c for c, bit in enumerate(row) if bit) for row in rows]
    return rank(words) == n


def weak_match(a: ParityMatrix, b: ParityMatrix) -> Permutation | None:
    """Find P with ``permute_columns(a, P) == b``; columns are distinct, so P is unique."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    where = {word: c for c, word in enumerate(b.cols)}
    mapping = []
    for word in a.cols:
        if word not in where:
            return None
        mapping.append(where[word])
    return Permutation(tuple(mapping))


def gauss_synth(m: ParityMatrix) -> list[Pair]:
    """Gaussian-elimination CNOT synthesis. Not optimal; an upper bound for search."""
    n = m.n
    cols = list(m.cols)
    ops: list[Pair] = []

    def add(c: int, t: int) -> None:
        cols[t] ^= cols[c]
        ops.append((c, t))

    for i in range(n):
        bit = 1 << i
        if not cols[i] & bit:
            piv = next((c for c in range(i + 1, n) if cols[c] & bit), None)
            if piv is None:
                raise ValueError("matrix is not full rank")
            add(piv, i)
        for j in range(n):
            if j != i and cols[j] & bit:
                add(i, j)
    # M * E1 ... Em = I, and each elementary op is an involution.
    return ops[::-1]


def random_full_rank(n: int, rng: random.Random, length: int | None = None) -> ParityMatrix:
    """Random element of GL_n(F2) built from a random column-addition sequence."""
    if length is None:
        length = 3 * n * n
    cols = list(identity(n).cols)
    if n == 1:
        return ParityMatrix(tuple(cols))
    for _ in range(length):
        c, t = rng.sample(range(n), 2)
        cols[t] ^= cols[c]
    return ParityMatrix(tuple(cols))


def all_full_rank(n: int) -> list[ParityMatrix]:
    """Enumerate GL_n(F2) by brute force over all column tuples (small n only)."""
    if n > 4:
        raise ValueError("enumeration limited to n <= 4")
    words = range(1, 1 << n)
    out: list[ParityMatrix] = []

    def extend(prefix: list[int]) -> None:
        if len(prefix) == n:
            out.append(ParityMatrix(tuple(prefix)))
            return
        for w in words:
            if rank(prefix + [w]) == len(prefix) + 1:
                extend(prefix + [w])

    extend([])
    return out
