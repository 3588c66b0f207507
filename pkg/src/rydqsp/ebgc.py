"""Native Rydberg gate IR, k-hot coefficient trees and error-bounded gate counting.

The EBGC (error-bounded gate count) charges every native gate the worst-case
error probability of a maximal-error CNOT, weighted by the probability that its
control condition is satisfied on the ideal input state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

KINDS = ("Rotation", "VOHE", "VOHETilde", "CVOHE", "CPauli", "CXR", "CPHASE", "SYNC")
CONTROLLED = ("CVOHE", "CPauli", "CXR")
IR_VERSION = 1

# native gate costs as exact rationals
VOHE_COST = Fraction(1)
CVOHE_COST = Fraction(4, 3)
CVOHE_PREP_COST = Fraction(5, 3)
CPHASE_COST = Fraction(4, 3)

_TOL = 1e-9


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One native gate.

    ``condition`` lists (level, index) pairs of address qubits that must all be
    excited for the gate to act; its probability is evaluated on the coefficient
    tree. ``p_control`` overrides the tree lookup (used for the exit ancilla,
    whose state is unknown, hence charged at 1).
    """

    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    amplitudes: tuple[float, ...] = ()
    theta: float = 0.0
    axis: str = "y"
    paulis: str = ""
    sign: int = 1
    variant: str = "table"
    adjoint: bool = False
    condition: tuple[tuple[int, int], ...] = ()
    p_control: float | None = None
    target_probs: tuple[float, ...] = ()
    reflect_scope: tuple[int, ...] = ()
    phase: float = math.pi
    cost: float = float(CPHASE_COST)
    charged_k: int = 0
    control_on: str = "all"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind == "Rotation":
            if not math.isfinite(self.theta):
                raise CircuitError("rotation angle must be finite")
            if len(self.targets) != 1 or self.axis not in ("x", "y", "z"):
                raise CircuitError("rotation needs one target and an axis in x, y, z")
        if self.kind in ("VOHE", "VOHETilde", "CVOHE"):
            if len(self.amplitudes) != len(self.targets) or not self.targets:
                raise CircuitError(f"{self.kind}: one amplitude per target required")
            norm = math.fsum(a * a for a in self.amplitudes)
            if abs(norm - 1.0) > _TOL:
                raise CircuitError(f"{self.kind}: squared amplitudes sum to {norm}, not 1")
        if self.kind == "CVOHE" and len(self.controls) != 1:
            raise CircuitError("CVOHE takes exactly one control")
        if self.control_on not in ("all", "reflection"):
            raise CircuitError("control_on must be 'all' or 'reflection'")
        if self.control_on == "reflection" and not self.reflect_scope:
            raise CircuitError("a reflection-only control needs a reflect_scope")
        if self.kind == "CPauli":
            if not self.paulis or len(self.paulis) != len(self.targets):
                raise CircuitError("CPauli needs one non-identity letter per target")
            if any(c not in "XYZ" for c in self.paulis):
                raise CircuitError(f"CPauli letters must be X, Y or Z, got {self.paulis!r}")
            # "table" is the default charge, identical to "ground"
            if self.variant not in ("table", "ground", "rydberg"):
                raise CircuitError("CPauli variant must be 'table', 'ground' or 'rydberg'")
        if self.kind == "CXR" and (len(self.controls) != 1 or not self.targets):
            raise CircuitError("CXR takes one control and at least one target")
        if self.target_probs and len(self.target_probs) != len(self.targets):
            raise CircuitError("target_probs must match targets")
        if self.p_control is not None and not 0.0 <= self.p_control <= 1.0:
            raise CircuitError("p_control must lie in [0, 1]")

    def qubits(self) -> tuple[int, ...]:
        return tuple(self.controls) + tuple(self.targets) + tuple(self.reflect_scope)

    def to_record(self) -> dict:
        rec: dict = {"kind": self.kind, "targets": list(self.targets)}
        defaults = Gate.__dataclass_fields__
        for name in ("controls", "amplitudes", "theta", "axis", "paulis", "sign", "variant",
                     "adjoint", "condition", "p_control", "target_probs", "reflect_scope",
                     "phase", "cost", "charged_k", "control_on"):
            value = getattr(self, name)
            if value == defaults[name].default:
                continue
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            rec[name] = value
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Gate":
        kw = dict(rec)
        for name in ("targets", "controls", "amplitudes", "target_probs", "reflect_scope"):
            if name in kw:
                kw[name] = tuple(kw[name])
        if "condition" in kw:
            kw["condition"] = tuple(tuple(c) for c in kw["condition"])
        return cls(**kw)


def ebgc_of_gate(gate: Gate, p_sat: float = 1.0, extra: tuple[float, ...] | None = None) -> float:
    """EBGC of one gate whose control condition holds with probability ``p_sat``.

    ``extra`` optionally supplies excitation probabilities of CXR targets;
    otherwise the gate's own ``target_probs`` are used, and failing those the
    conservative value 1 per target.
    """
    if not 0.0 <= p_sat <= 1.0:
        raise CircuitError(f"p_sat must lie in [0, 1], got {p_sat}")
    k = gate.kind
    if k == "Rotation":
        return abs(gate.theta) / (3 * math.pi)
    if k in ("VOHE", "VOHETilde"):
        return float(VOHE_COST)
    if k == "CVOHE":
        unit = CVOHE_PREP_COST if gate.variant == "prep" else CVOHE_COST
        return float(unit) * p_sat
    if k == "CPauli":
        n = gate.charged_k or len(gate.targets)
        if gate.variant == "rydberg":
            return n / 3 * p_sat
        return (2 + n) / 3 * p_sat
    if k == "CXR":
        probs = extra if extra is not None else gate.target_probs
        excited = math.fsum(probs) if probs else float(len(gate.targets))
        return 2 / 3 * p_sat * (1 + excited)
    if k == "CPHASE":
        return float(gate.cost)
    return 0.0


def depth_of_gate(gate: Gate) -> float:
    k = gate.kind
    if k == "Rotation":
        return abs(gate.theta) / math.pi
    if k in ("VOHE", "VOHETilde"):
        return 2.0
    if k == "CVOHE":
        return 4.0
    if k == "CPauli":
        return 1.0 if gate.variant == "rydberg" else 3.0
    if k == "CXR":
        return 4.0
    if k == "CPHASE":
        return 3.0
    return 1.0  # SYNC


@dataclass(frozen=True, eq=False)
class CoefficientTree:
    """Markov k-hot amplitude tree.

    ``root`` holds the register-1 amplitudes, ``transitions[j]`` the row-normalized
    amplitude matrix from register j to register j+1 (row = excited qubit of
    register j).
    """

    root: np.ndarray
    transitions: tuple[np.ndarray, ...] = ()

    def __post_init__(self) -> None:
        root = np.asarray(self.root, dtype=float)
        if root.ndim != 1 or root.size == 0:
            raise CircuitError("root amplitudes must be a non-empty vector")
        if abs(np.sum(root**2) - 1) > 1e-12:
            raise CircuitError("root amplitudes are not normalized")
        prev = root.size
        for j, t in enumerate(self.transitions):
            t = np.asarray(t, dtype=float)
            if t.ndim != 2 or t.shape[0] != prev:
                raise CircuitError(f"transition {j} has shape {t.shape}, expected ({prev}, n)")
            if np.any(np.abs(np.sum(t**2, axis=1) - 1) > 1e-12):
                raise CircuitError(f"transition {j} rows are not normalized")
            prev = t.shape[1]

    @property
    def k(self) -> int:
        return 1 + len(self.transitions)

    @property
    def branching(self) -> tuple[int, ...]:
        return (len(self.root),) + tuple(np.shape(t)[1] for t in self.transitions)

    @property
    def n_addresses(self) -> int:
        return int(np.prod(self.branching))

    def amplitudes(self, level: int, parent: int | None = None) -> np.ndarray:
        if level == 0:
            return np.asarray(self.root, dtype=float)
        return np.asarray(self.transitions[level - 1], dtype=float)[parent]

    def marginal(self, level: int) -> np.ndarray:
        m = np.asarray(self.root, dtype=float) ** 2
        for t in self.transitions[:level]:
            m = m @ (np.asarray(t, dtype=float) ** 2)
        return m

    def condition_probability(self, condition) -> float:
        """Probability that every (level, index) pair of ``condition`` is excited."""
        need: dict[int, int] = {}
        for level, idx in condition:
            if not 0 <= level < self.k or not 0 <= idx < self.branching[level]:
                raise CircuitError(f"condition ({level}, {idx}) outside tree {self.branching}")
            if need.get(level, idx) != idx:
                return 0.0
            need[level] = idx
        if not need:
            return 1.0
        f = np.asarray(self.root, dtype=float) ** 2
        top = max(need)
        for level in range(top + 1):
            if level > 0:
                f = f @ (np.asarray(self.transitions[level - 1], dtype=float) ** 2)
            if level in need:
                mask = np.zeros_like(f)
                mask[need[level]] = 1.0
                f = f * mask
        return float(np.clip(np.sum(f), 0.0, 1.0))

    def leaf_probabilities(self) -> np.ndarray:
        """Joint probability of every full address path, shape = branching."""
        p = np.asarray(self.root, dtype=float) ** 2
        for t in self.transitions:
            p = p[..., None] * np.asarray(t, dtype=float) ** 2
        return p

    @classmethod
    def uniform(cls, branching) -> "CoefficientTree":
        branching = tuple(int(b) for b in branching)
        root = np.full(branching[0], 1 / math.sqrt(branching[0]))
        trans = tuple(
            np.full((branching[j - 1], branching[j]), 1 / math.sqrt(branching[j]))
            for j in range(1, len(branching))
        )
        return cls(root, trans)

    @classmethod
    def random(cls, branching, rng: np.random.Generator) -> "CoefficientTree":
        def unit(shape):
            a = rng.uniform(0.05, 1.0, size=shape)
            return a / np.linalg.norm(a, axis=-1, keepdims=True)

        branching = tuple(int(b) for b in branching)
        root = unit(branching[0])
        trans = tuple(unit((branching[j - 1], branching[j])) for j in range(1, len(branching)))
        return cls(root, trans)

    @classmethod
    def from_probabilities(cls, probs, branching=None) -> "CoefficientTree":
        """Tree whose leaves, read row-major, carry ``probs`` (zero-padded). k <= 2."""
        probs = np.asarray(probs, dtype=float)
        total = probs.sum()
        if np.any(probs < 0) or total <= 0:
            raise CircuitError("leaf probabilities must be non-negative and not all zero")
        probs = probs / total
        if branching is None:
            branching = (probs.size,)
        branching = tuple(int(b) for b in branching)
        n = int(np.prod(branching))
        if probs.size > n:
            raise CircuitError(f"{probs.size} leaves do not fit branching {branching}")
        if len(branching) == 1:
            return cls(np.sqrt(probs))
        if len(branching) != 2:
            raise CircuitError("from_probabilities supports k <= 2; build deeper trees explicitly")
        grid = np.zeros(n)
        grid[: probs.size] = probs
        grid = grid.reshape(branching)
        rows = grid.sum(axis=1)
        root = np.sqrt(rows / rows.sum())
        trans = np.empty_like(grid)
        for r in range(branching[0]):
            if rows[r] > 0:
                trans[r] = np.sqrt(grid[r] / rows[r])
            else:
                trans[r] = 1 / math.sqrt(branching[1])
        return cls(root, (trans,))


def p_sat(tree: CoefficientTree, path) -> float:
    """Probability of the address prefix ``path`` (one index per level from the root)."""
    path = list(path)
    if len(path) > tree.k:
        raise CircuitError(f"path of length {len(path)} exceeds tree depth {tree.k}")
    return tree.condition_probability([(j, i) for j, i in enumerate(path)])


@dataclass(frozen=True, eq=False)
class CircuitIR:
    n_qubits: int
    registers: dict[str, tuple[int, ...]]
    layers: tuple[tuple[Gate, ...], ...]
    ancilla_registers: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for li, layer in enumerate(self.layers):
            for g in layer:
                for q in g.qubits():
                    if not 0 <= q < self.n_qubits:
                        raise CircuitError(f"layer {li}: {g.kind} references qubit {q}")

    def gates(self):
        for layer in self.layers:
            yield from layer

    def then(self, other: "CircuitIR") -> "CircuitIR":
        if other.n_qubits != self.n_qubits:
            raise CircuitError("cannot concatenate circuits on different registers")
        regs = dict(self.registers)
        regs.update(other.registers)
        anc = tuple(dict.fromkeys(self.ancilla_registers + other.ancilla_registers))
        return CircuitIR(self.n_qubits, regs, self.layers + other.layers, anc)

    def to_json(self) -> str:
        doc = {
            "ir_version": IR_VERSION,
            "n_qubits": self.n_qubits,
            "registers": {k: list(v) for k, v in self.registers.items()},
            "ancilla_registers": list(self.ancilla_registers),
            "layers": [[g.to_record() for g in layer] for layer in self.layers],
        }
        return json.dumps(doc, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CircuitIR":
        doc = json.loads(text)
        if doc.get("ir_version") != IR_VERSION:
            raise CircuitError(f"unsupported ir_version {doc.get('ir_version')!r}")
        layers = tuple(tuple(Gate.from_record(r) for r in layer) for layer in doc["layers"])
        regs = {k: tuple(v) for k, v in doc["registers"].items()}
        return cls(doc["n_qubits"], regs, layers, tuple(doc["ancilla_registers"]))


@dataclass(frozen=True)
class ResourceReport:
    ebgc: float
    depth: float
    ancillae: int
    breakdown: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ebgc": self.ebgc,
            "depth": self.depth,
            "ancillae": self.ancillae,
            "breakdown": dict(sorted(self.breakdown.items())),
        }


def gate_probability(gate: Gate, tree: CoefficientTree | None) -> float:
    if gate.p_control is not None:
        return gate.p_control
    if gate.kind not in CONTROLLED:
        return 1.0
    if not gate.condition:
        return 1.0
    if tree is None:
        raise CircuitError(f"{gate.kind} carries a condition but no tree was given")
    return tree.condition_probability(gate.condition)


def account(circuit: CircuitIR, tree: CoefficientTree | None = None) -> ResourceReport:
    """Sum gate EBGCs and layer depths of a circuit."""
    parts: dict[str, list[float]] = {}
    depth_terms = []
    for layer in circuit.layers:
        best = 0.0
        for g in layer:
            parts.setdefault(g.kind, []).append(ebgc_of_gate(g, gate_probability(g, tree)))
            best = max(best, depth_of_gate(g))
        depth_terms.append(best)
    breakdown = {k: math.fsum(v) for k, v in parts.items()}
    anc_qubits = set()
    for name in circuit.ancilla_registers:
        anc_qubits.update(circuit.registers[name])
    touched = {q for g in circuit.gates() for q in g.qubits()}
    return ResourceReport(
        ebgc=math.fsum(x for v in parts.values() for x in v),
        depth=math.fsum(depth_terms),
        ancillae=len(anc_qubits & touched),
        breakdown=breakdown,
    )
