"""Finite blockade radius: module partitioning and costs of the distributed protocols.

Registers larger than one blockade volume are split into subsystems, each with
a three-qubit communication port (antenna, receiver, processor). The costs here
are exact sums of native-gate charges: a transfer hop is two CNOTs (EBGC 2p,
depth 6), a FANOUT hop layer is one CPauli layer (depth 3).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .ebgc import CVOHE_PREP_COST, ResourceReport

PORT_QUBITS = 3
_TOL = 1e-9


class LayoutError(ValueError):
    pass


def ceil_root(n: int, d: int) -> int:
    """Smallest integer r with r**d >= n."""
    if n < 1:
        raise LayoutError(f"need n >= 1, got {n}")
    r = max(1, round(n ** (1.0 / d)))
    while r**d < n:
        r += 1
    while r > 1 and (r - 1) ** d >= n:
        r -= 1
    return r


@dataclass(frozen=True)
class LayoutSpec:
    dim: int = 1
    blockade_radius: float = 30.0
    atom_pitch: float = 2.0
    n_sub_c: int = 1
    n_sub_t: int = 1
    n_control_registers: int | None = None

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise LayoutError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (self.blockade_radius > 0 and self.atom_pitch > 0):
            raise LayoutError("blockade radius and atom pitch must be positive")
        if self.atom_pitch > self.blockade_radius:
            raise LayoutError(
                f"atom pitch {self.atom_pitch} exceeds blockade radius {self.blockade_radius}: "
                "every subsystem would hold a single atom")
        if self.n_sub_c < 1 or self.n_sub_t < 1:
            raise LayoutError("subsystem counts must be >= 1")

    @property
    def capacity(self) -> int:
        """Atoms that fit inside one blockade volume."""
        return int(math.floor((self.blockade_radius / self.atom_pitch) ** self.dim + _TOL))

    @property
    def n_ports(self) -> int:
        return PORT_QUBITS * (self.n_sub_c + self.n_sub_t)

    @property
    def hops_c(self) -> int:
        return ceil_root(self.n_sub_c, self.dim)

    @property
    def hops_t(self) -> int:
        return ceil_root(self.n_sub_t, self.dim)

    def for_registers(self, n_control_atoms: int, n_target_atoms: int) -> "LayoutSpec":
        """Copy with subsystem counts derived from register sizes."""
        cap = self.capacity
        return LayoutSpec(self.dim, self.blockade_radius, self.atom_pitch,
                          math.ceil(n_control_atoms / cap), math.ceil(n_target_atoms / cap),
                          self.n_control_registers)

    @classmethod
    def from_json(cls, text: str) -> "LayoutSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LayoutError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise LayoutError("expected a JSON object")
        keys = {"dim", "blockade_radius_um", "atom_pitch_um"}
        missing = sorted(keys - set(doc))
        if missing:
            raise LayoutError(f"missing field(s): {', '.join(missing)}")
        extra = sorted(set(doc) - keys)
        if extra:
            raise LayoutError(f"unknown field(s): {', '.join(extra)}")
        if not isinstance(doc["dim"], int):
            raise LayoutError("dim must be an integer")
        return cls(doc["dim"], float(doc["blockade_radius_um"]), float(doc["atom_pitch_um"]))


def partition(n_atoms: int, layout: LayoutSpec) -> list[list[int]]:
    """Split atoms 0..n_atoms-1 into consecutive modules of at most one blockade volume."""
    if n_atoms < 1:
        raise LayoutError(f"need n_atoms >= 1, got {n_atoms}")
    cap = layout.capacity
    n_sub = math.ceil(n_atoms / cap)
    return [list(range(i * cap, min(n_atoms, (i + 1) * cap))) for i in range(n_sub)]


def _check_prob(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0 + _TOL:
        raise LayoutError(f"{name} must lie in [0, 1], got {p}")


def fanout_cost(n_targets: int, p_control: float, layout: LayoutSpec) -> ResourceReport:
    """Broadcast one qubit to n_targets receivers."""
    if n_targets < 1:
        raise LayoutError(f"need n_targets >= 1, got {n_targets}")
    _check_prob(p_control, "p_control")
    e = p_control * n_targets
    return ResourceReport(e, 3.0 * ceil_root(n_targets, layout.dim), 0, {"FANOUT": e})


def state_transfer_cost(hops: int, p_source: float) -> ResourceReport:
    """Relay a qubit over ``hops`` modules, two CNOTs per hop."""
    if hops < 1:
        raise LayoutError(f"need hops >= 1, got {hops}")
    _check_prob(p_source, "p_source")
    e = 2.0 * hops * p_source
    return ResourceReport(e, 6.0 * hops, 0, {"transfer": e})


def scalable_cpauli_cost(k: int, layout: LayoutSpec, p_first: float) -> ResourceReport:
    """k-register-controlled Pauli string across modules.

    Transfers chain the condition from register k down to register 1, a FANOUT
    spreads it to the target modules, the Paulis act, and the chain is undone.
    A single-module layout degenerates to the plain CPauli charge (2+k)/3 p.
    """
    if k < 1:
        raise LayoutError(f"need k >= 1, got {k}")
    if layout.n_control_registers is not None and k > layout.n_control_registers:
        raise LayoutError(f"k={k} exceeds the {layout.n_control_registers} control registers")
    _check_prob(p_first, "p_first")
    if layout.n_sub_c == 1 and layout.n_sub_t == 1:
        e = (2 + k) / 3 * p_first
        return ResourceReport(e, 3.0, 0, {"CPauli": e})
    hc, ht = layout.hops_c, layout.hops_t
    transfer = 2.0 * (k - 1) * hc * p_first
    fan = k * ht * p_first
    paulis = k * p_first
    depth = 2 * (6 * hc * (k - 1) + 3 * ht) + 3
    return ResourceReport(transfer + fan + paulis, float(depth), layout.n_ports,
                          {"transfer": transfer, "FANOUT": fan, "CPauli": paulis})


def scalable_vohe_cost(layout: LayoutSpec, betas) -> ResourceReport:
    """Distributed OHE preparation over a chain of modules with weights beta_j.

    Module j receives the antenna flag of module j-1 (set iff an earlier module
    fired), rotates its processor by arcsin of the conditional amplitude,
    fires its CVOHE when the flag is off and the processor on, then sets its
    own antenna when either is on.
    """
    betas = [float(b) for b in betas]
    if not betas:
        raise LayoutError("need at least one subsystem weight")
    norm = math.fsum(b * b for b in betas)
    if abs(norm - 1.0) > _TOL:
        raise LayoutError(f"sum of |beta_j|^2 is {norm}, not 1")
    if len(betas) == 1:
        return ResourceReport(1.0, 2.0, 0, {"VOHE": 1.0})
    parts = {"transfer": 0.0, "Rotation": 0.0, "CVOHE": 0.0, "toggle": 0.0}
    depth = 0.0
    prior = 0.0
    for j, b in enumerate(betas):
        q = b * b
        if j > 0:
            parts["transfer"] += 2.0 * prior
            depth += 6.0
        remaining = 1.0 - prior
        cond = min(1.0, abs(b) / math.sqrt(remaining)) if remaining > _TOL else 0.0
        theta = math.asin(cond)
        parts["Rotation"] += theta / (3 * math.pi)
        parts["CVOHE"] += float(CVOHE_PREP_COST) * q
        prior = min(1.0, prior + q)
        parts["toggle"] += prior
        depth += theta / math.pi + 4.0 + 3.0
    return ResourceReport(math.fsum(parts.values()), depth, PORT_QUBITS * len(betas), parts)
