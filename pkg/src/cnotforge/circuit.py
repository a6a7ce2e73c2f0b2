"""Circuit IR: an OpenQASM 2.0 subset, circuit metrics, and CNOT slicing for peephole passes.

Only ``cx`` is structured. Every other statement (one- or multi-qubit gates,
``measure``, ``reset``, ``barrier``) is an opaque passthrough that is kept
verbatim and relabeled when wires are permuted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .gf2 import Pair, ParityMatrix, Permutation, from_gate_list, weak_match

PERM_PREFIX = "// output_permutation:"


class QasmError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None) -> None:
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[str, ...] = ()
    clbits: tuple[tuple[str, int], ...] = ()

    @property
    def is_cnot(self) -> bool:
        return self.name == "cx"

    def relabel(self, p: Permutation) -> Gate:
        return Gate(self.name, tuple(p(q) for q in self.qubits), self.params, self.clbits)


def cx(c: int, t: int) -> Gate:
    return Gate("cx", (c, t))


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    qregs: list[tuple[str, int]] = field(default_factory=list)
    cregs: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.qregs:
            self.qregs = [("q", self.n)]
        if sum(s for _, s in self.qregs) != self.n:
            raise ValueError("register sizes do not add up to n")
        for g in self.gates:
            if any(not 0 <= q < self.n for q in g.qubits):
                raise ValueError(f"gate {g} uses a qubit outside 0..{self.n - 1}")
            if g.is_cnot and (len(g.qubits) != 2 or g.qubits[0] == g.qubits[1] or g.params):
                raise ValueError(f"malformed cx gate {g}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Pair], **kw) -> Circuit:
        return cls(n, [cx(c, t) for c, t in pairs], **kw)

    def with_gates(self, gates: list[Gate]) -> Circuit:
        return Circuit(self.n, list(gates), list(self.qregs), list(self.cregs))

    def cnot_pairs(self) -> list[Pair]:
        return [g.qubits for g in self.gates if g.is_cnot]  # type: ignore[misc]

    def is_cnot_only(self) -> bool:
        return all(g.is_cnot for g in self.gates)

    def parity_matrix(self) -> ParityMatrix:
        if not self.is_cnot_only():
            raise ValueError("parity matrix is only defined for CNOT-only circuits")
        return from_gate_list(self.n, self.cnot_pairs())

    def label(self, q: int) -> str:
        for name, size in self.qregs:
            if q < size:
                return f"{name}[{q}]"
            q -= size
        raise IndexError(q)


# ---------------------------------------------------------------- parsing

_STMT = re.compile(r"[^;{}]*[;{}]", re.S)
_ARG = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\s*\[\s*(\d+)\s*\])?$")
_CALL = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*(.*)$", re.S)


def _strip_comments(text: str) -> str:
    # Blank out comments but keep offsets so error positions stay meaningful.
    return re.sub(r"//[^\n]*", lambda m: " " * len(m.group(0)), text)


def _split_params(s: str) -> tuple[str, ...]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return tuple(out)


def parse_qasm(text: str) -> Circuit:
    """Parse the supported OpenQASM 2.0 subset into a Circuit."""
    src = _strip_comments(text)
    line_starts = [0] + [m.end() for m in re.finditer("\n", src)]

    def pos(offset: int) -> tuple[int, int]:
        lo, hi = 0, len(line_starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if line_starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1, offset - line_starts[lo] + 1

    qregs: list[tuple[str, int]] = []
    cregs: list[tuple[str, int]] = []
    qoff: dict[str, tuple[int, int]] = {}
    csize: dict[str, int] = {}
    gates: list[Gate] = []
    seen_header = False
    consumed = 0

    for m in _STMT.finditer(src):
        raw = m.group(0)
        body = raw[:-1].strip()
        start = m.start() + (len(raw) - len(raw.lstrip()))
        consumed = m.end()
        ln, col = pos(start)
        if raw.endswith(("{", "}")):
            raise QasmError("gate definitions and blocks are not supported", ln, col)
        if not body:
            continue
        head = body.split(None, 1)[0]
        if head == "OPENQASM":
            if body.split()[1:] != ["2.0"]:
                raise QasmError(f"unsupported version: {body}", ln, col)
            seen_header = True
            continue
        if not seen_header:
            raise QasmError("missing 'OPENQASM 2.0;' header", ln, col)
        if head == "include":
            if body.split(None, 1)[1].strip() != '"qelib1.inc"':
                raise QasmError(f"unsupported include: {body}", ln, col)
            continue
        if head in ("if", "gate", "opaque"):
            raise QasmError(f"unsupported statement '{head}'", ln, col)
        if head in ("qreg", "creg"):
            dm = re.fullmatch(r"(qreg|creg)\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]", body)
            if not dm:
                raise QasmError(f"malformed register declaration: {body}", ln, col)
            name, size = dm.group(2), int(dm.group(3))
            if name in qoff or name in csize:
                raise QasmError(f"register '{name}' declared twice", ln, col)
            if head == "qreg":
                qoff[name] = (sum(s for _, s in qregs), size)
                qregs.append((name, size))
            else:
                csize[name] = size
                cregs.append((name, size))
            continue

        def qargs(spec: str) -> list[list[int]]:
            out = []
            for part in [p.strip() for p in spec.split(",")] if spec.strip() else []:
                am = _ARG.match(part)
                if not am or am.group(1) not in qoff:
                    raise QasmError(f"unknown qubit argument '{part}'", ln, col)
                off, size = qoff[am.group(1)]
                if am.group(2) is None:
                    out.append([off + i for i in range(size)])
                else:
                    idx = int(am.group(2))
                    if idx >= size:
                        raise QasmError(f"index {idx} out of range for '{am.group(1)}'", ln, col)
                    out.append([off + idx])
            return out

        if head == "measure":
            mm = re.fullmatch(r"measure\s+(.+?)\s*->\s*(.+)", body, re.S)
            if not mm:
                raise QasmError(f"malformed measure: {body}", ln, col)
            qs = qargs(mm.group(1))
            cm = _ARG.match(mm.group(2).strip())
            if len(qs) != 1 or not cm or cm.group(1) not in csize:
                raise QasmError(f"malformed measure: {body}", ln, col)
            cname = cm.group(1)
            cidx = [int(cm.group(2))] if cm.group(2) is not None else list(range(csize[cname]))
            if len(qs[0]) != len(cidx):
                raise QasmError("measure register sizes differ", ln, col)
            for q, c in zip(qs[0], cidx):
                gates.append(Gate("measure", (q,), (), ((cname, c),)))
            continue
        if head == "barrier":
            qs = sorted({q for arg in qargs(body[len("barrier"):]) for q in arg})
            gates.append(Gate("barrier", tuple(qs)))
            continue

        cm = _CALL.match(body)
        if not cm:
            raise QasmError(f"cannot parse statement: {body}", ln, col)
        name, params, rest = cm.group(1), cm.group(2), cm.group(3)
        if name == "CX":  # the language's builtin spelling
            name = "cx"
        args = qargs(rest)
        if not args:
            raise QasmError(f"gate '{name}' has no qubit arguments", ln, col)
        width = max(len(a) for a in args)
        if any(len(a) not in (1, width) for a in args):
            raise QasmError("register arguments of different sizes", ln, col)
        ptuple = _split_params(params) if params else ()
        for i in range(width):
            qs = tuple(a[0] if len(a) == 1 else a[i] for a in args)
            if len(set(qs)) != len(qs):
                if name == "cx":
                    raise QasmError("cx control equals target", ln, col)
                raise QasmError(f"gate '{name}' repeats a qubit", ln, col)
            if name == "cx" and (len(qs) != 2 or ptuple):
                raise QasmError("cx takes exactly two qubits and no parameters", ln, col)
            gates.append(Gate(name, qs, ptuple))

    tail = src[consumed:].strip()
    if tail:
        ln, col = pos(consumed + (len(src[consumed:]) - len(src[consumed:].lstrip())))
        raise QasmError("statement missing ';'", ln, col)
    if not seen_header:
        raise QasmError("missing 'OPENQASM 2.0;' header", 1, 1)
    n = sum(s for _, s in qregs)
    return Circuit(n, gates, qregs or [("q", 0)], cregs)


def emit_qasm(c: Circuit, output_perm: Permutation | None = None) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    lines += [f"qreg {name}[{size}];" for name, size in c.qregs if size]
    lines += [f"creg {name}[{size}];" for name, size in c.cregs]
    for g in c.gates:
        qs = ",".join(c.label(q) for q in g.qubits)
        if g.name == "measure":
            (cname, cidx), = g.clbits
            lines.append(f"measure {qs} -> {cname}[{cidx}];")
        elif g.params:
            lines.append(f"{g.name}({','.join(g.params)}) {qs};")
        else:
            lines.append(f"{g.name} {qs};")
    if output_perm is not None:
        lines.append(f"{PERM_PREFIX} {output_perm}")
    return "\n".join(lines) + "\n"


def parse_output_permutation(text: str) -> Permutation | None:
    """Read the ``// output_permutation: q0->q0, ...`` comment if present."""
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith(PERM_PREFIX):
            body = line[len(PERM_PREFIX):].strip()
            entries = [e.strip() for e in body.split(",") if e.strip()]
            mapping = {}
            for e in entries:
                m = re.fullmatch(r"q(\d+)\s*->\s*q(\d+)", e)
                if not m:
                    raise QasmError(f"malformed output permutation entry {e!r}")
                mapping[int(m.group(1))] = int(m.group(2))
            if sorted(mapping) != list(range(len(mapping))):
                raise QasmError("output permutation does not cover q0..q(n-1)")
            return Permutation(tuple(mapping[i] for i in range(len(mapping))))
    return None


def swaps_for(perm: Permutation) -> list[Gate]:
    """Trailing swap gates moving logical output ``q`` from wire ``perm(q)`` back to wire ``q``."""
    where = list(perm.mapping)  # logical -> wire
    holder = [0] * perm.n  # wire -> logical
    for q, w in enumerate(where):
        holder[w] = q
    out = []
    for q in range(perm.n):
        w = where[q]
        if w == q:
            continue
        other = holder[q]
        out.append(Gate("swap", (q, w)))
        where[q], where[other] = q, w
        holder[q], holder[w] = q, other
    return out


def absorb_trailing_swaps(c: Circuit) -> tuple[Circuit, Permutation]:
    """Strip trailing swap gates and return them as an output permutation.

    Inverse of appending ``swaps_for(perm)``: the stripped circuit leaves
    logical ``q`` on wire ``perm(q)``.
    """
    gates = list(c.gates)
    trailing: list[Gate] = []  # last gate first
    while gates and gates[-1].name == "swap" and len(gates[-1].qubits) == 2:
        trailing.append(gates.pop())
    holder = list(range(c.n))  # wire -> logical, undone from the end
    for g in trailing:
        a, b = g.qubits
        holder[a], holder[b] = holder[b], holder[a]
    return c.with_gates(gates), Permutation(tuple(holder)).inverse()


# ---------------------------------------------------------------- metrics


@dataclass(frozen=True)
class Metrics:
    cnot_count: int
    depth: int
    cnot_depth: int

    def as_dict(self) -> dict[str, int]:
        return {"cnot_count": self.cnot_count, "depth": self.depth, "cnot_depth": self.cnot_depth}


def metrics(c: Circuit) -> Metrics:
    level = [0] * c.n
    clevel = [0] * c.n
    count = 0
    for g in c.gates:
        qs = g.qubits
        if not qs:
            continue
        cl = max(clevel[q] for q in qs)
        if g.name == "barrier":
            lv = max(level[q] for q in qs)
        else:
            lv = max(level[q] for q in qs) + 1
        if g.is_cnot:
            count += 1
            cl += 1
        for q in qs:
            level[q] = lv
            clevel[q] = cl
    return Metrics(count, max(level, default=0), max(clevel, default=0))


# ---------------------------------------------------------------- slicing


@dataclass
class Slice:
    cnot_part: list[Gate] = field(default_factory=list)
    tail: list[Gate] = field(default_factory=list)

    def pairs(self) -> list[Pair]:
        return [g.qubits for g in self.cnot_part]  # type: ignore[misc]


def slice_circuit(c: Circuit) -> list[Slice]:
    """Cut a circuit into slices of one maximal CNOT block followed by non-CNOT gates.

    Scanning from the top, a CNOT joins the current slice unless one of its
    qubits is already used by that slice's tail. Non-CNOT gates go to the
    tail of the earliest slice that their dependencies allow.
    """
    slices = [Slice()]
    last = [0] * c.n  # slice index of the latest gate on each qubit
    blocked: set[int] = set()  # qubits touched by the current slice's tail
    for g in c.gates:
        if g.is_cnot:
            if any(q in blocked for q in g.qubits):
                slices.append(Slice())
                blocked = set()
            cur = len(slices) - 1
            slices[cur].cnot_part.append(g)
            for q in g.qubits:
                last[q] = cur
        else:
            s = max((last[q] for q in g.qubits), default=0)
            slices[s].tail.append(g)
            for q in g.qubits:
                last[q] = s
            if s == len(slices) - 1:
                blocked.update(g.qubits)
    return slices


def flatten(slices: Sequence[Slice]) -> list[Gate]:
    return [g for s in slices for g in s.cnot_part + s.tail]


class StitchError(ValueError):
    pass


def stitch(
    slices: Sequence[Slice],
    replacements: Sequence[tuple[Sequence[Pair], Permutation]],
    like: Circuit,
) -> tuple[Circuit, Permutation]:
    """Rebuild a circuit with each slice's CNOT block replaced.

    Replacement ``i`` is a gate list on the slice's own wire labels plus the
    output permutation (logical qubit -> wire) it realises. Everything after
    a permuting slice is relabeled through the accumulated permutation.
    """
    if len(replacements) != len(slices):
        raise StitchError("need exactly one replacement per slice")
    n = like.n
    acc = Permutation.identity(n)
    out: list[Gate] = []
    for i, (sl, (pairs, perm)) in enumerate(zip(slices, replacements)):
        original = from_gate_list(n, sl.pairs())
        replaced = from_gate_list(n, pairs)
        found = weak_match(original, replaced)
        if found is None or found != perm:
            raise StitchError(f"slice {i}: replacement does not realise the stated permutation")
        out += [cx(acc(a), acc(b)) for a, b in pairs]
        acc = acc.compose(perm)
        out += [g.relabel(acc) for g in sl.tail]
    return like.with_gates(out), acc
