"""LCU block-encoding compiler: k-hot state preparation, the select unitary, walk operators."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .ebgc import (
    CVOHE_PREP_COST,
    CPHASE_COST,
    CircuitError,
    CircuitIR,
    CoefficientTree,
    Gate,
)
from .pauli import HamiltonianSpec, PauliTerm

Layers = list[tuple[Gate, ...]]


@dataclass(frozen=True, eq=False)
class LcuPlan:
    """A coefficient tree plus the address path of every Pauli term.

    ``charge`` selects how Pauli supports enter the EBGC of the select unitary:
    ``"exact"`` uses each term's own support, ``"bound"`` charges every term the
    Hamiltonian's maximum support.
    """

    tree: CoefficientTree
    terms: tuple[PauliTerm, ...]
    paths: tuple[tuple[int, ...], ...]
    n_site: int
    charge: str = "exact"

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.paths):
            raise CircuitError("every term needs exactly one address path")
        if self.charge not in ("exact", "bound"):
            raise CircuitError(f"unknown charge policy {self.charge!r}")
        seen = set()
        b = self.tree.branching
        for t, p in zip(self.terms, self.paths):
            if len(p) != self.tree.k or any(not 0 <= i < n for i, n in zip(p, b)):
                raise CircuitError(f"path {p} does not fit branching {b}")
            if p in seen:
                raise CircuitError(f"address {p} assigned twice")
            seen.add(p)
            if t.n_site != self.n_site:
                raise CircuitError("term length differs from n_site")
        probs = self.leaf_probs()
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise CircuitError(f"assigned leaf probabilities sum to {math.fsum(probs)}, not 1")
        for t, q in zip(self.terms, probs):
            if abs(t.coeff - q) > 1e-9:
                raise CircuitError(f"term weight {t.coeff} differs from its leaf probability {q}")

    @property
    def k(self) -> int:
        return self.tree.k

    @property
    def L(self) -> int:
        return self.tree.branching[0]

    @property
    def k_locality(self) -> int:
        return max(t.weight for t in self.terms)

    def leaf_probs(self) -> list[float]:
        leaves = self.tree.leaf_probabilities()
        return [float(leaves[p]) for p in self.paths]

    def register(self, level: int) -> tuple[int, ...]:
        b = self.tree.branching
        off = sum(b[:level])
        return tuple(range(off, off + b[level]))

    @property
    def n_address(self) -> int:
        return sum(self.tree.branching)

    @property
    def address_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n_address))

    @property
    def system_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.n_address, self.n_address + self.n_site))

    @property
    def exit_qubit(self) -> int:
        return self.n_address + self.n_site

    def matrix(self) -> np.ndarray:
        """The encoded operator A = sum_i sign_i |alpha_i|^2 P_i."""
        dim = 2**self.n_site
        out = np.zeros((dim, dim), dtype=complex)
        for t, q in zip(self.terms, self.leaf_probs()):
            out += t.sign * q * t.matrix()
        return out


def _sorted_order(terms) -> list[int]:
    return sorted(range(len(terms)), key=lambda i: (-terms[i].coeff, i))


def packed_plan(spec: HamiltonianSpec, branching=None, charge: str = "exact") -> LcuPlan:
    """Pack terms, sorted by descending weight, into the leaves row-major (k <= 2)."""
    order = _sorted_order(spec.terms)
    probs = [spec.terms[i].coeff for i in order]
    tree = CoefficientTree.from_probabilities(probs, branching)
    b = tree.branching
    paths = [tuple(int(x) for x in np.unravel_index(pos, b)) for pos in range(len(order))]
    terms = tuple(spec.terms[i] for i in order)
    terms = tuple(replace(t, coeff=float(tree.leaf_probabilities()[p])) for t, p in zip(terms, paths))
    return LcuPlan(tree, terms, tuple(paths), spec.n_site, charge)


def ohe_plan(spec: HamiltonianSpec, charge: str = "exact") -> LcuPlan:
    """One-hot addresses: a single register with one qubit per term."""
    return packed_plan(spec, (spec.n_terms,), charge)


def term_group(term: PauliTerm) -> tuple[str, int | None]:
    sup = term.support
    letters = "".join(term.string[i] for i in sup)
    return (letters, sup[0] % 2 if len(sup) > 1 else None)


def grouped_plan(spec: HamiltonianSpec, charge: str = "bound") -> LcuPlan:
    """Two-hot plan grouping terms by Pauli type and bond parity.

    For the Heisenberg chain this gives L = 7 first-register qubits (three
    interaction axes on even and odd bonds, plus the field).
    """
    groups: dict[tuple, list[int]] = {}
    for i, t in enumerate(spec.terms):
        groups.setdefault(term_group(t), []).append(i)
    rows = [sorted(idx, key=lambda i: (-spec.terms[i].coeff, i)) for idx in groups.values()]
    n1, n2 = len(rows), max(len(r) for r in rows)
    weights = np.array([math.fsum(spec.terms[i].coeff for i in r) for r in rows])
    root = np.sqrt(weights / weights.sum())
    trans = np.zeros((n1, n2))
    paths, terms = [], []
    for l, r in enumerate(rows):
        for col, i in enumerate(r):
            trans[l, col] = math.sqrt(spec.terms[i].coeff / weights[l]) if weights[l] > 0 else 0.0
            paths.append((l, col))
            terms.append(spec.terms[i])
        if weights[l] == 0:
            trans[l] = 1 / math.sqrt(n2)
    tree = CoefficientTree(root, (trans,))
    leaves = tree.leaf_probabilities()
    terms = [replace(t, coeff=float(leaves[p])) for t, p in zip(terms, paths)]
    return LcuPlan(tree, tuple(terms), tuple(paths), spec.n_site, charge)


def tree_plan(tree: CoefficientTree, strings, n_site: int, signs=None, charge: str = "exact") -> LcuPlan:
    """Assign one Pauli string to every leaf of ``tree`` in row-major order."""
    leaves = tree.leaf_probabilities()
    if len(strings) != leaves.size:
        raise CircuitError(f"need {leaves.size} strings, got {len(strings)}")
    signs = signs if signs is not None else [1] * len(strings)
    paths, terms = [], []
    for pos, (s, sg) in enumerate(zip(strings, signs)):
        p = tuple(int(x) for x in np.unravel_index(pos, leaves.shape))
        q = float(leaves[p])
        paths.append(p)
        terms.append(PauliTerm(s, coeff=q, raw_coeff=q, sign=sg))
    return LcuPlan(tree, tuple(terms), tuple(paths), n_site, charge)


# circuit builders


def _circuit(plan: LcuPlan, layers: Layers, with_exit: bool = False) -> CircuitIR:
    regs = {f"a{j + 1}": plan.register(j) for j in range(plan.k)}
    regs["sys"] = plan.system_qubits
    anc = tuple(f"a{j + 1}" for j in range(plan.k))
    n = plan.n_address + plan.n_site
    if with_exit:
        regs["exit"] = (plan.exit_qubit,)
        anc += ("exit",)
        n += 1
    return CircuitIR(n, regs, tuple(layers), anc)


def _prep_gates(plan: LcuPlan, exit_control: bool) -> list[Gate]:
    tree = plan.tree
    root = tuple(float(a) for a in tree.amplitudes(0))
    if exit_control:
        first = Gate("CVOHE", targets=plan.register(0), controls=(plan.exit_qubit,),
                     amplitudes=root, variant="prep", p_control=1.0)
    else:
        first = Gate("VOHE", targets=plan.register(0), amplitudes=root)
    gates = [first]
    for j in range(1, plan.k):
        parent = plan.register(j - 1)
        for l in range(len(parent)):
            amps = tuple(float(a) for a in tree.amplitudes(j, l))
            gates.append(Gate("CVOHE", targets=plan.register(j), controls=(parent[l],),
                              amplitudes=amps, variant="prep", condition=((j - 1, l),)))
    return gates


def state_prep_layers(plan: LcuPlan, inverse: bool = False, reflect: bool = False,
                      exit_control: bool = False, control_on: str = "all") -> Layers:
    gates = _prep_gates(plan, exit_control and control_on == "all")
    if not inverse:
        return [(g,) for g in gates]
    out = [replace(g, adjoint=True) for g in reversed(gates)]
    if reflect:
        last = out[-1]
        if exit_control:
            out[-1] = Gate("CVOHE", targets=last.targets, controls=(plan.exit_qubit,),
                           amplitudes=last.amplitudes, variant="prep", adjoint=True,
                           p_control=1.0, reflect_scope=plan.address_qubits,
                           control_on=control_on)
        else:
            out[-1] = replace(last, kind="VOHETilde", reflect_scope=plan.address_qubits)
    return [(g,) for g in out]


def compile_state_prep(plan: LcuPlan) -> CircuitIR:
    return _circuit(plan, state_prep_layers(plan))


def _pauli_gate(plan: LcuPlan, term: PauliTerm, controls: tuple[int, ...], variant: str,
                path) -> Gate:
    sup = term.support
    return Gate(
        "CPauli",
        controls=controls,
        targets=tuple(plan.system_qubits[i] for i in sup),
        paulis="".join(term.string[i] for i in sup),
        sign=term.sign,
        variant=variant,
        condition=tuple((j, i) for j, i in enumerate(path)),
        charged_k=plan.k_locality if plan.charge == "bound" else 0,
    )


def ubar_layers(plan: LcuPlan, exit_gate: int | None = None) -> Layers:
    """Select unitary: apply P_i conditioned on address i being excited.

    With ``exit_gate`` every Pauli additionally requires that qubit to be excited
    (an extra control for one-hot plans, an exit-to-register-1 Rydberg fan otherwise).
    """
    for t in plan.terms:
        if t.weight == 0:
            raise CircuitError("identity terms have no support and cannot be applied")
    if plan.k == 1:
        reg = plan.register(0)
        extra = () if exit_gate is None else (exit_gate,)
        return [(_pauli_gate(plan, t, (reg[p[0]],) + extra, "ground", p),)
                for t, p in zip(plan.terms, plan.paths)]

    by_prefix: dict[tuple, list[int]] = {}
    for idx, p in enumerate(plan.paths):
        by_prefix.setdefault(p[:-1], []).append(idx)

    def block(level: int, prefix: tuple[int, ...], control: int) -> Layers:
        nxt = plan.register(level + 1)
        probs = tuple(float(a * a) for a in plan.tree.amplitudes(level + 1, prefix[-1]))
        fan = Gate("CXR", controls=(control,), targets=nxt, target_probs=probs,
                   condition=tuple(enumerate(prefix)))
        out: Layers = [(fan,)]
        if level + 2 == plan.k:
            paulis = tuple(
                _pauli_gate(plan, plan.terms[i], (nxt[plan.paths[i][-1]],), "rydberg",
                            plan.paths[i])
                for i in by_prefix.get(prefix, [])
            )
            if paulis:
                out.append(paulis)
        else:
            for i, q in enumerate(nxt):
                out += block(level + 1, prefix + (i,), q)
        out.append((replace(fan, adjoint=True),))
        return out

    layers: Layers = []
    for l, q in enumerate(plan.register(0)):
        layers += block(0, (l,), q)
    if exit_gate is not None:
        probs = tuple(float(a * a) for a in plan.tree.amplitudes(0))
        fan = Gate("CXR", controls=(exit_gate,), targets=plan.register(0), target_probs=probs,
                   p_control=1.0)
        layers = [(fan,)] + layers + [(replace(fan, adjoint=True),)]
    return layers


def compile_ubar(plan: LcuPlan) -> CircuitIR:
    return _circuit(plan, ubar_layers(plan))


def compile_block_encoding(plan: LcuPlan) -> CircuitIR:
    """U = V^dagger Ubar V, whose all-zeros address block is A."""
    layers = state_prep_layers(plan) + ubar_layers(plan) + state_prep_layers(plan, inverse=True)
    return _circuit(plan, layers)


SYNC = Gate("SYNC")


def compile_lcu(plan: LcuPlan) -> CircuitIR:
    """Reflected block encoding (I - 2 Pi_0) U, realized with the phase-shifted V~.

    The closing one-step SYNC slot completes the LCU depth count.
    """
    layers = (state_prep_layers(plan) + ubar_layers(plan)
              + state_prep_layers(plan, inverse=True, reflect=True) + [(SYNC,)])
    return _circuit(plan, layers)


def compile_walk(plan: LcuPlan) -> CircuitIR:
    """W = (2 Pi_0 - I) U: the reflected encoding followed by the phase-ancilla CPHASE."""
    return compile_lcu(plan).then(_circuit(plan, [(Gate("CPHASE"),)]))


def compile_controlled_walk(plan: LcuPlan, construction: str = "promoted") -> CircuitIR:
    """Walk controlled by the exit ancilla.

    ``"promoted"``: the first preparation gate and the last gate of V~ become
    exit-controlled CVOHE gates and the CPHASE takes the exit qubit as control.
    This acts as controlled-W on inputs whose address register is empty; with the
    exit qubit off, Ubar still acts on excited addresses.

    ``"exact"``: V and V^dagger stay uncontrolled, Ubar is gated by the exit qubit
    and only the reflection of V~ is exit-controlled, so the exit-off branch is
    the identity on the whole register.
    """
    e = plan.exit_qubit
    if construction == "promoted":
        layers = (state_prep_layers(plan, exit_control=True) + ubar_layers(plan)
                  + state_prep_layers(plan, inverse=True, reflect=True, exit_control=True))
    elif construction == "exact":
        layers = (state_prep_layers(plan) + ubar_layers(plan, exit_gate=e)
                  + state_prep_layers(plan, inverse=True, reflect=True, exit_control=True,
                                      control_on="reflection"))
    else:
        raise CircuitError(f"unknown controlled-walk construction {construction!r}")
    layers += [(SYNC,), (Gate("CPHASE", controls=(e,)),)]
    return _circuit(plan, layers, with_exit=True)


# closed forms


def prep_ebgc_formula(k: int) -> Fraction:
    return Fraction(3 + 5 * (k - 1), 3)


def prep_depth_formula(branching) -> int:
    return 2 + 4 * sum(branching[:-1])


def ubar_ebgc_formula(plan: LcuPlan) -> float:
    """Closed-form EBGC of the select unitary from the tree weights."""
    probs = plan.leaf_probs()
    supp = [plan.k_locality if plan.charge == "bound" else t.weight for t in plan.terms]
    if plan.k == 1:
        return math.fsum(q * (2 + s) / 3 for q, s in zip(probs, supp))
    return 8 * (plan.k - 1) / 3 + math.fsum(q * s / 3 for q, s in zip(probs, supp))


def walk_cost_formulas(L: int) -> dict[str, Fraction]:
    """Closed-form depth and EBGC of the two-hot LCU and controlled walk, max support 2."""
    d_lcu = 2 * (2 + 4 * L) + 9 * L + 1
    n_lcu = 2 * (1 + CVOHE_PREP_COST) + Fraction(10, 3)  # two 2-hot preps plus Ubar
    d_cw = 2 * 2 + 3 + d_lcu
    n_cw = 2 * Fraction(2, 3) + CPHASE_COST + n_lcu
    return {"d_LCU": Fraction(d_lcu), "n_LCU": n_lcu, "d_CW": Fraction(d_cw), "n_CW": n_cw}
