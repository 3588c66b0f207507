"""Pauli strings, Hamiltonian specifications and the disordered Heisenberg chain."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np

LETTERS = "IXYZ"

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class HamiltonianError(ValueError):
    """Raised for malformed Hamiltonian input."""


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string.

    ``coeff`` is the normalized non-negative weight, ``raw_coeff`` the magnitude
    before normalization and ``sign`` carries the sign of the original real
    coefficient (the term contributes ``sign * coeff * P``).
    """

    string: str
    coeff: float
    raw_coeff: float
    sign: int = 1

    def __post_init__(self) -> None:
        bad = [i for i, c in enumerate(self.string) if c not in LETTERS]
        if bad:
            raise HamiltonianError(
                f"invalid Pauli letter {self.string[bad[0]]!r} at position {bad[0]}"
            )
        if not self.string:
            raise HamiltonianError("empty Pauli string")
        if self.coeff < 0 or not math.isfinite(self.coeff):
            raise HamiltonianError(f"coeff must be finite and >= 0, got {self.coeff}")
        if self.raw_coeff < 0 or not math.isfinite(self.raw_coeff):
            raise HamiltonianError(f"raw_coeff must be finite and >= 0, got {self.raw_coeff}")
        if self.sign not in (1, -1):
            raise HamiltonianError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def n_site(self) -> int:
        return len(self.string)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.string) if c != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    def matrix(self) -> np.ndarray:
        """Dense matrix of the bare Pauli string (no coefficient or sign)."""
        return reduce(np.kron, (_PAULI_MATRICES[c] for c in self.string))


@dataclass(frozen=True)
class HamiltonianSpec:
    n_site: int
    terms: tuple[PauliTerm, ...]
    one_norm: float

    def __post_init__(self) -> None:
        if self.n_site < 1:
            raise HamiltonianError("n_site must be positive")
        if not self.terms:
            raise HamiltonianError("a Hamiltonian needs at least one term")
        for i, t in enumerate(self.terms):
            if t.n_site != self.n_site:
                raise HamiltonianError(
                    f"terms[{i}]: string length {t.n_site} != n_site {self.n_site}"
                )

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def k_locality(self) -> int:
        return max(t.weight for t in self.terms)

    def matrix(self, raw: bool = False) -> np.ndarray:
        """Dense operator: sum of sign*coeff*P (or sign*raw_coeff*P when ``raw``)."""
        dim = 2**self.n_site
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            w = t.raw_coeff if raw else t.coeff
            out += t.sign * w * t.matrix()
        return out


def make_spec(n_site: int, strings: list[str], coeffs: list[float]) -> HamiltonianSpec:
    """Build a normalized spec from signed real coefficients."""
    if len(strings) != len(coeffs):
        raise HamiltonianError("strings and coeffs differ in length")
    terms = tuple(
        PauliTerm(s, coeff=abs(float(c)), raw_coeff=abs(float(c)), sign=-1 if c < 0 else 1)
        for s, c in zip(strings, coeffs)
    )
    spec = HamiltonianSpec(n_site, terms, one_norm=float(sum(abs(c) for c in coeffs)))
    return normalize(spec)


def normalize(spec: HamiltonianSpec) -> HamiltonianSpec:
    """Rescale coeffs so they sum to one. The one-norm of raw coefficients is kept."""
    raws = [t.raw_coeff for t in spec.terms]
    if not all(math.isfinite(r) for r in raws):
        raise HamiltonianError("non-finite coefficient")
    total = math.fsum(raws)
    if total <= 0:
        raise HamiltonianError("all coefficients are zero; nothing to normalize")
    terms = tuple(replace(t, coeff=t.raw_coeff / total) for t in spec.terms)
    return HamiltonianSpec(spec.n_site, terms, one_norm=total)


def heisenberg_fields(n_site: int, field_seed: int) -> np.ndarray:
    """The seeded random fields h_i ~ U[-1, 1]."""
    rng = np.random.default_rng(field_seed)
    return rng.uniform(-1.0, 1.0, size=n_site)


def build_disordered_heisenberg(n_site: int, field_seed: int) -> HamiltonianSpec:
    """Nearest-neighbour Heisenberg chain with a random longitudinal field.

    Terms are ordered bond by bond (XX, YY, ZZ) followed by the n_site Z fields.
    """
    if n_site < 2:
        raise HamiltonianError(f"need n_site >= 2, got {n_site}")
    strings: list[str] = []
    coeffs: list[float] = []
    for i in range(n_site - 1):
        for p in "XYZ":
            s = ["I"] * n_site
            s[i] = s[i + 1] = p
            strings.append("".join(s))
            coeffs.append(1.0)
    h = heisenberg_fields(n_site, field_seed)
    for i in range(n_site):
        s = ["I"] * n_site
        s[i] = "Z"
        strings.append("".join(s))
        coeffs.append(float(h[i]))
    return make_spec(n_site, strings, coeffs)


def bond_norm(spec: HamiltonianSpec) -> float:
    """Largest one-norm of the two-site terms acting on a single nearest-neighbour bond.

    Returns 1.0 when the spec has no such terms.
    """
    per_bond: dict[int, float] = {}
    for t in spec.terms:
        sup = t.support
        if len(sup) == 2 and sup[1] == sup[0] + 1:
            per_bond[sup[0]] = per_bond.get(sup[0], 0.0) + t.raw_coeff
    return max(per_bond.values()) if per_bond else 1.0


def _bit_table(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    return (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1


def pauli_action(string: str, qubits: tuple[int, ...] | list[int], n_qubits: int):
    """Return (flip_mask, phase) so that P|b> = phase[b] |b ^ flip_mask>.

    ``string`` holds one letter per entry of ``qubits``; qubit 0 is the most
    significant bit of the basis index.
    """
    flip = 0
    idx = np.arange(2**n_qubits)
    phase = np.ones(2**n_qubits, dtype=complex)
    for letter, q in zip(string, qubits):
        bit = 1 << (n_qubits - 1 - q)
        b = (idx & bit) != 0
        if letter in "XY":
            flip |= bit
        if letter == "Z":
            phase = np.where(b, -phase, phase)
        elif letter == "Y":
            phase = phase * np.where(b, -1j, 1j)
    return flip, phase


def apply_pauli(term: PauliTerm | str, state: np.ndarray) -> np.ndarray:
    """Apply the bare Pauli string to a dense state vector (or a batch of columns)."""
    string = term.string if isinstance(term, PauliTerm) else term
    n = len(string)
    state = np.asarray(state)
    if state.shape[0] != 2**n:
        raise HamiltonianError(
            f"state dimension {state.shape[0]} does not match 2^{n} for string {string!r}"
        )
    flip, phase = pauli_action(string, range(n), n)
    out = np.empty_like(state, dtype=complex)
    src = np.arange(2**n)
    ph = phase if state.ndim == 1 else phase[:, None]
    out[src ^ flip] = ph * state
    return out


def parse_hamiltonian_json(text: str) -> HamiltonianSpec:
    """Parse ``{"n_sites": int, "terms": [{"pauli": str, "coeff": real}, ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HamiltonianError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise HamiltonianError("top level: expected an object")
    n = doc.get("n_sites")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise HamiltonianError("n_sites: expected a positive integer")
    terms = doc.get("terms")
    if not isinstance(terms, list) or not terms:
        raise HamiltonianError("terms: expected a non-empty list")
    strings, coeffs = [], []
    for i, rec in enumerate(terms):
        if not isinstance(rec, dict):
            raise HamiltonianError(f"terms[{i}]: expected an object")
        s = rec.get("pauli")
        c = rec.get("coeff")
        if not isinstance(s, str):
            raise HamiltonianError(f"terms[{i}].pauli: expected a string")
        if len(s) != n:
            raise HamiltonianError(f"terms[{i}].pauli: length {len(s)} != n_sites {n}")
        for j, ch in enumerate(s):
            if ch not in LETTERS:
                raise HamiltonianError(
                    f"terms[{i}].pauli: invalid letter {ch!r} at position {j}"
                )
        if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
            raise HamiltonianError(f"terms[{i}].coeff: expected a finite real")
        strings.append(s)
        coeffs.append(float(c))
    return make_spec(n, strings, coeffs)


def spec_to_json(spec: HamiltonianSpec) -> str:
    terms = [{"pauli": t.string, "coeff": t.sign * t.raw_coeff} for t in spec.terms]
    return json.dumps({"n_sites": spec.n_site, "terms": terms}, indent=2)
