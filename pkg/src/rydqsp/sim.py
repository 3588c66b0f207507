"""Dense statevector semantics of the native gates."""

from __future__ import annotations

import math

import numpy as np

from .ebgc import CircuitError, CircuitIR, Gate
from .pauli import pauli_action

MAX_QUBITS = 14

_PAULI_2 = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DenseSim:
    """Applies circuits to batches of states stored as (2^n, batch) arrays.

    Qubit 0 is the most significant bit of the basis index. CXR gates do not
    change amplitudes; they record which qubits sit in the Rydberg manifold, and
    a Rydberg-controlled CPauli acts when every qubit of that record is excited.
    """

    def __init__(self, n_qubits: int):
        if n_qubits > MAX_QUBITS:
            raise CircuitError(f"{n_qubits} qubits exceed the dense limit of {MAX_QUBITS}")
        self.n = n_qubits
        self.idx = np.arange(2**n_qubits)

    def bit(self, q: int) -> int:
        return 1 << (self.n - 1 - q)

    def mask(self, qubits) -> int:
        m = 0
        for q in qubits:
            m |= self.bit(q)
        return m

    def all_one(self, qubits) -> np.ndarray:
        m = self.mask(qubits)
        return (self.idx & m) == m

    def all_zero(self, qubits) -> np.ndarray:
        return (self.idx & self.mask(qubits)) == 0

    def run(self, circuit: CircuitIR, state: np.ndarray, repeat: int = 1) -> np.ndarray:
        if circuit.n_qubits != self.n:
            raise CircuitError("circuit and simulator sizes differ")
        psi = np.array(state, dtype=complex, copy=True)
        if psi.ndim == 1:
            psi = psi[:, None]
        for _ in range(repeat):
            ryd: dict[int, frozenset[int]] = {}
            for layer in circuit.layers:
                for g in layer:
                    psi = self.apply(g, psi, ryd)
            if ryd:
                raise CircuitError(f"Rydberg flags left on qubits {sorted(ryd)}")
        return psi

    def unitary(self, circuit: CircuitIR) -> np.ndarray:
        return self.run(circuit, np.eye(2**self.n, dtype=complex))

    def apply(self, g: Gate, psi: np.ndarray, ryd: dict) -> np.ndarray:
        k = g.kind
        if k == "SYNC":
            return psi
        if k == "Rotation":
            M = math.cos(g.theta) * np.eye(2) + 1j * math.sin(g.theta) * _PAULI_2[g.axis]
            b = self.bit(g.targets[0])
            i0 = self.idx[(self.idx & b) == 0]
            i1 = i0 | b
            a0, a1 = psi[i0].copy(), psi[i1].copy()
            psi[i0] = M[0, 0] * a0 + M[0, 1] * a1
            psi[i1] = M[1, 0] * a0 + M[1, 1] * a1
            return psi
        if k in ("VOHE", "VOHETilde", "CVOHE"):
            return self._vohe(g, psi)
        if k == "CXR":
            c = g.controls[0]
            source = ryd.get(c, frozenset((c,)))
            for t in g.targets:
                if g.adjoint:
                    if t not in ryd:
                        raise CircuitError(f"uncompute of qubit {t} that is not Rydberg-flagged")
                    del ryd[t]
                else:
                    if t in ryd:
                        raise CircuitError(f"qubit {t} already Rydberg-flagged")
                    ryd[t] = source | {t}
            return psi
        if k == "CPauli":
            if g.variant == "rydberg":
                c = g.controls[0]
                if c not in ryd:
                    raise CircuitError(f"Rydberg-controlled gate on qubit {c} with no excitation")
                cond = ryd[c]
            else:
                cond = g.controls
            ok = self.idx[self.all_one(cond)]
            flip, phase = pauli_action(g.paulis, g.targets, self.n)
            out = psi.copy()
            out[ok ^ flip] = (g.sign * phase[ok])[:, None] * psi[ok]
            return out
        if k == "CPHASE":
            ok = self.all_one(g.controls)
            psi[ok] *= np.exp(1j * g.phase)
            return psi
        raise CircuitError(f"no semantics for {k}")

    def _vohe(self, g: Gate, psi: np.ndarray) -> np.ndarray:
        # rotation in span{|0..0>, |ohe(alpha)>}: |0..0> -> |ohe>, |ohe> -> -|0..0>
        ctrl = self.all_one(g.controls)
        rot = ctrl if g.control_on == "all" else np.ones_like(ctrl)
        base = self.idx[rot & self.all_zero(g.targets)]
        alpha = np.asarray(g.amplitudes, dtype=float)
        excited = [base | self.bit(t) for t in g.targets]
        a0 = psi[base].copy()
        a1 = sum(a * psi[e] for a, e in zip(alpha, excited))
        if g.adjoint:
            psi[base] = a1
            for a, e in zip(alpha, excited):
                psi[e] = psi[e] - a * (a0 + a1)
        else:
            psi[base] = -a1
            for a, e in zip(alpha, excited):
                psi[e] = psi[e] + a * (a0 - a1)
        if g.reflect_scope:
            psi[ctrl & self.all_zero(g.reflect_scope)] *= -1
        return psi
