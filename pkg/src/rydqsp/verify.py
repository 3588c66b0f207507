"""Dense oracles for the compiled constructions and the light-cone decimation check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .ebgc import CircuitError
from .lcu import (
    LcuPlan,
    compile_block_encoding,
    compile_lcu,
    compile_walk,
    ohe_plan,
)
from .pauli import HamiltonianSpec, build_disordered_heisenberg, make_spec
from .qsp import QspSequence, assemble_qsp_protocol, qsp_evaluate
from .sim import DenseSim


def gauge_deviation(B: np.ndarray, A: np.ndarray) -> float:
    """max |e^{-i phi} B - A| with the global phase phi aligning B to A."""
    overlap = np.vdot(A, B)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(B / phase - A)))


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value (LAPACK SVD)."""
    return float(np.linalg.norm(M, 2))


def _system_inputs(plan: LcuPlan, n_qubits: int, exit_bit: int = 0) -> np.ndarray:
    """Indices of |0_anc>|j>(|exit_bit>) for every system basis state j."""
    shift = n_qubits - plan.n_address - plan.n_site
    j = np.arange(2**plan.n_site)
    return (j << shift) | (exit_bit if shift else 0)


def _apply_to_system(plan: LcuPlan, circuit, vectors: np.ndarray, repeat: int = 1,
                     exit_bit: int = 0) -> tuple[np.ndarray, np.ndarray, DenseSim]:
    sim = DenseSim(circuit.n_qubits)
    rows = _system_inputs(plan, circuit.n_qubits, exit_bit)
    psi = np.zeros((2**circuit.n_qubits, vectors.shape[1]), dtype=complex)
    psi[rows] = vectors
    return sim.run(circuit, psi, repeat=repeat), rows, sim


def block_of(plan: LcuPlan, circuit, repeat: int = 1) -> np.ndarray:
    """Pi_0 C^repeat Pi_0 restricted to the system register."""
    eye = np.eye(2**plan.n_site, dtype=complex)
    out, rows, _ = _apply_to_system(plan, circuit, eye, repeat)
    return out[rows]


def verify_block_encoding(plan: LcuPlan) -> float:
    return gauge_deviation(block_of(plan, compile_block_encoding(plan)), plan.matrix())


def chebyshev_of(A: np.ndarray, k: int) -> np.ndarray:
    lam, vec = np.linalg.eigh(A)
    t = np.cos(k * np.arccos(np.clip(lam, -1.0, 1.0)))
    return (vec * t) @ vec.conj().T


def verify_walk_chebyshev(plan: LcuPlan, k: int) -> float:
    if not 0 <= k <= 8:
        raise CircuitError("k must lie in 0..8")
    A = plan.matrix()
    if k == 0:
        return 0.0
    return gauge_deviation(block_of(plan, compile_walk(plan), repeat=k), chebyshev_of(A, k))


def walk_eigenphase_deviation(plan: LcuPlan) -> float:
    """Compare W's eigenphases on each plane span{|0,v>, W|0,v>} with +-arccos(lambda)."""
    A = plan.matrix()
    lam, vec = np.linalg.eigh(A)
    walk = compile_walk(plan)
    sim = DenseSim(walk.n_qubits)
    rows = _system_inputs(plan, walk.n_qubits)
    dim = 2**walk.n_qubits
    worst = 0.0
    for l, v in zip(lam, vec.T):
        g = np.zeros(dim, dtype=complex)
        g[rows] = v
        wg = sim.run(walk, g)[:, 0]
        perp = wg - np.vdot(g, wg) * g
        target = math.acos(min(1.0, max(-1.0, l)))
        if np.linalg.norm(perp) < 1e-7:
            # one-dimensional plane: W|G> = +-|G>
            phase = np.angle(np.vdot(g, wg))
            worst = max(worst, abs(abs(phase) - target))
            continue
        perp /= np.linalg.norm(perp)
        basis = np.stack([g, perp], axis=1)
        image = sim.run(walk, basis)
        M = basis.conj().T @ image
        leak = np.linalg.norm(image - basis @ M)
        phases = np.sort(np.angle(np.linalg.eigvals(M)))
        worst = max(worst, leak, float(np.max(np.abs(phases - np.array([-target, target])))))
    return float(worst)


def verify_reflection_identity(plan: LcuPlan) -> float:
    """V~ Ubar V against (I - 2 Pi_0) V^dagger Ubar V as full matrices."""
    lcu = compile_lcu(plan)
    sim = DenseSim(lcu.n_qubits)
    lhs = sim.unitary(lcu)
    rhs = sim.unitary(compile_block_encoding(plan))
    zero = sim.all_zero(plan.address_qubits)
    rhs[zero] *= -1
    return gauge_deviation(lhs, rhs)


def unitarity_defect(circuit) -> float:
    U = DenseSim(circuit.n_qubits).unitary(circuit)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def verify_qsp_end_to_end(plan: LcuPlan, seq: QspSequence, construction: str = "exact") -> float:
    """Assembled exit-ancilla protocol against the scalar exit-qubit response.

    For every eigenpair (lambda, v) of A and exit states s, s', the dense element
    <s, 0, v| U |s', 0, v> must equal the average over the two walk eigenphases
    of qsp_evaluate(seq, lambda, branch)[s, s'].
    """
    circuit = assemble_qsp_protocol(plan, seq, construction)
    lam, vec = np.linalg.eigh(plan.matrix())
    scalar = QspSequence(seq.phases, "exit")
    worst = 0.0
    for s_in in (0, 1):
        out, _, _ = _apply_to_system(plan, circuit, vec.astype(complex), exit_bit=s_in)
        for s_out in (0, 1):
            rows = _system_inputs(plan, circuit.n_qubits, s_out)
            dense = np.einsum("ij,ij->j", vec.conj(), out[rows])
            for j, l in enumerate(lam):
                l = min(1.0, max(-1.0, float(l)))
                pred = 0.5 * sum(qsp_evaluate(scalar, l, b)[s_out, s_in] for b in (1, -1))
                worst = max(worst, abs(dense[j] - pred))
    return worst


def verify_qsp_alternating(plan: LcuPlan, seq: QspSequence) -> float:
    """Alternate the walk with projector phases exp(i phi (2 Pi_0 - I)).

    Checks <0, v| G(phi_n) W ... W G(phi_0) |0, v> = P(lambda) of the ``"wx"``
    convention, with no global phase freedom.
    """
    walk = compile_walk(plan)
    sim = DenseSim(walk.n_qubits)
    sign = np.where(sim.all_zero(plan.address_qubits), 1.0, -1.0)
    lam, vec = np.linalg.eigh(plan.matrix())
    rows = _system_inputs(plan, walk.n_qubits)
    psi = np.zeros((2**walk.n_qubits, len(lam)), dtype=complex)
    psi[rows] = vec
    ref = psi.copy()
    psi *= np.exp(1j * seq.phases[0] * sign)[:, None]
    for phi in seq.phases[1:]:
        psi = sim.run(walk, psi)
        psi *= np.exp(1j * phi * sign)[:, None]
    dense = np.einsum("ij,ij->j", ref.conj(), psi)
    wx = QspSequence(seq.phases, "wx")
    pred = np.array([qsp_evaluate(wx, min(1.0, max(-1.0, float(l))))[0, 0] for l in lam])
    return float(np.max(np.abs(dense - pred)))


@dataclass(frozen=True)
class LrReport:
    l_values: tuple[int, ...]
    defects: tuple[float, ...]
    mu: float
    r: float

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.defects, self.defects[1:]))


def _region_matrix(spec: HamiltonianSpec, sites: set[int]) -> np.ndarray:
    dim = 2**spec.n_site
    H = np.zeros((dim, dim), dtype=complex)
    for t in spec.terms:
        if set(t.support) <= sites:
            H += t.sign * t.raw_coeff * t.matrix()
    return H


def lr_defect(spec: HamiltonianSpec, t: float, l: int, full: np.ndarray | None = None) -> float:
    """|| e^{-iHt} - e^{-iH_AB t} e^{iH_B t} e^{-iH_BC t} || with B the middle l sites."""
    n = spec.n_site
    if not 1 <= l <= n - 2:
        raise CircuitError(f"middle width {l} leaves no outer region on {n} sites")
    a = (n - l) // 2
    A, B, C = set(range(a)), set(range(a, a + l)), set(range(a + l, n))
    if full is None:
        full = expm(-1j * t * spec.matrix(raw=True))
    approx = (expm(-1j * t * _region_matrix(spec, A | B))
              @ expm(1j * t * _region_matrix(spec, B))
              @ expm(-1j * t * _region_matrix(spec, B | C)))
    return spectral_norm(full - approx)


def verify_lr_decimation(n_site: int, t: float, l_values, field_seed: int = 0) -> LrReport:
    if n_site > 12:
        raise CircuitError(f"n_site={n_site} exceeds the dense limit of 12")
    l_values = tuple(int(l) for l in l_values)
    if t > min(l_values) / 4:
        raise CircuitError(f"t={t} violates the light-cone heuristic t <= l/4")
    spec = build_disordered_heisenberg(n_site, field_seed)
    full = expm(-1j * t * spec.matrix(raw=True))
    defects = tuple(lr_defect(spec, t, l, full) for l in l_values)
    if len(l_values) >= 2 and all(d > 0 for d in defects):
        logs = np.log(defects)
        slope = float(np.polyfit(l_values, logs, 1)[0])
        r = float(np.corrcoef(l_values, logs)[0, 1])
    else:
        slope, r = 0.0, 0.0
    return LrReport(l_values, defects, -slope, r)


def random_instance(rng: np.random.Generator, n_site: int, n_terms: int,
                    charge: str = "exact") -> LcuPlan:
    """Random OHE plan with distinct non-identity Pauli strings and signed weights."""
    pool = 4**n_site - 1
    if n_terms > pool:
        raise CircuitError(f"only {pool} distinct non-identity strings on {n_site} sites")
    picks = rng.choice(np.arange(1, 4**n_site), size=n_terms, replace=False)
    strings = []
    for code in picks:
        s = ""
        for _ in range(n_site):
            s = "IXYZ"[code % 4] + s
            code //= 4
        strings.append(s)
    coeffs = rng.uniform(0.1, 1.0, n_terms) * rng.choice([-1.0, 1.0], n_terms)
    return ohe_plan(make_spec(n_site, strings, list(coeffs)), charge)
