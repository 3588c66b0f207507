"""Single-qubit QSP algebra, the walk spectral model, protocol assembly and query counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .ebgc import CircuitIR, Gate
from .lcu import LcuPlan, compile_controlled_walk

CONVENTIONS = ("wx", "exit")

_I2 = np.eye(2, dtype=complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)


class QspError(ValueError):
    pass


@dataclass(frozen=True)
class QspSequence:
    """Phases phi_0 .. phi_n.

    ``"wx"``: U = G(phi_n) R G(phi_{n-1}) ... R G(phi_0), with G(phi) = exp(i phi Z)
    and signal R = exp(i theta X), cos(theta) = x.
    ``"exit"``: the exit-ancilla view of the controlled-walk protocol,
    U = exp(i phi_n X) D ... exp(i phi_1 X) D exp(i phi_0 Z) with D = diag(1, exp(i b theta)),
    b = +1 or -1 labelling the two walk eigenphases.
    """

    phases: tuple[float, ...]
    convention: str = "wx"

    def __post_init__(self) -> None:
        if len(self.phases) < 1:
            raise QspError("a sequence needs at least phi_0")
        if not all(math.isfinite(p) for p in self.phases):
            raise QspError("phases must be finite")
        if self.convention not in CONVENTIONS:
            raise QspError(f"unknown convention {self.convention!r}")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    @property
    def n_iterates(self) -> int:
        return len(self.phases) - 1


def _zrot(phi: float) -> np.ndarray:
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def _xrot(phi: float) -> np.ndarray:
    return math.cos(phi) * _I2 + 1j * math.sin(phi) * _SX


def qsp_evaluate(seq: QspSequence, x: float, branch: int = 1) -> np.ndarray:
    """2x2 response of the phase sequence at signal value x; entry [0, 0] is P(x)."""
    if not -1.0 <= x <= 1.0:
        raise QspError(f"signal value must lie in [-1, 1], got {x}")
    if seq.convention == "wx":
        s = math.sqrt(max(0.0, 1.0 - x * x))
        signal = np.array([[x, 1j * s], [1j * s, x]])
        U = _zrot(seq.phases[0])
        for phi in seq.phases[1:]:
            U = _zrot(phi) @ signal @ U
        return U
    if branch not in (1, -1):
        raise QspError("branch must be +1 or -1")
    theta = math.acos(x)
    signal = np.diag([1.0, np.exp(1j * branch * theta)])
    U = _zrot(seq.phases[0])
    for phi in seq.phases[1:]:
        U = _xrot(phi) @ signal @ U
    return U


@dataclass(frozen=True)
class ConstraintReport:
    max_violation: float
    n_samples: int

    @property
    def ok(self) -> bool:
        return self.max_violation < 1e-10


def qsp_constraint_check(seq: QspSequence, samples) -> ConstraintReport:
    """Check |P|^2 + (1 - x^2)|Q|^2 = 1, where i Q sqrt(1 - x^2) is the top-right entry."""
    worst = 0.0
    samples = list(samples)
    for x in samples:
        U = qsp_evaluate(seq, float(x))
        worst = max(worst, abs(abs(U[0, 0]) ** 2 + abs(U[0, 1]) ** 2 - 1.0))
    return ConstraintReport(worst, len(samples))


def chebyshev_t(n: int, x):
    """T_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    t0, t1 = np.ones_like(x), x
    if n == 0:
        return t0
    for _ in range(n - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


@dataclass(frozen=True)
class WalkSpectralModel:
    """Walk restricted to the invariant plane of an eigenvalue lambda of A."""

    lam: float

    def __post_init__(self) -> None:
        if not -1.0 - 1e-12 <= self.lam <= 1.0 + 1e-12:
            raise QspError(f"|lambda| must be <= 1, got {self.lam}")

    @property
    def theta(self) -> float:
        return math.acos(min(1.0, max(-1.0, self.lam)))

    def eigenphases(self) -> tuple[float, float]:
        return (self.theta, -self.theta)

    def matrix(self) -> np.ndarray:
        s = math.sin(self.theta)
        return np.array([[self.lam, -s], [s, self.lam]], dtype=complex)


def _bound(q: float, alpha_t: float, log_term: float) -> float:
    return math.exp(q) * alpha_t + log_term / q


def query_complexity(alpha_t: float, epsilon: float, even: bool = False) -> tuple[int, float]:
    """Minimize exp(q) alpha_t + ln(1/epsilon)/q over q > 0.

    Returns the ceiling of the minimum and the minimizing q; ``even`` rounds the
    count up to an even number.
    """
    if not alpha_t > 0:
        raise QspError(f"alpha_t must be positive, got {alpha_t}")
    if not 0 < epsilon < 1:
        raise QspError(f"epsilon must lie in (0, 1), got {epsilon}")
    log_term = math.log(1 / epsilon)
    res = minimize_scalar(
        _bound, bounds=(1e-6, 20.0), args=(alpha_t, log_term), method="bounded",
        options={"xatol": 1e-12, "maxiter": 500},
    )
    q = float(res.x)
    k = math.ceil(_bound(q, alpha_t, log_term) - 1e-9)
    if even and k % 2:
        k += 1
    return k, q


def assemble_qsp_protocol(plan: LcuPlan, seq: QspSequence,
                          construction: str = "exact") -> CircuitIR:
    """Exit-ancilla protocol: exp(i phi_0 Z), then per phase a controlled walk and exp(i phi_i X)."""
    cw = compile_controlled_walk(plan, construction)
    e = plan.exit_qubit
    layers = [(Gate("Rotation", targets=(e,), theta=seq.phases[0], axis="z"),)]
    for phi in seq.phases[1:]:
        layers += list(cw.layers)
        layers.append((Gate("Rotation", targets=(e,), theta=phi, axis="x"),))
    return CircuitIR(cw.n_qubits, dict(cw.registers), tuple(layers), cw.ancilla_registers)
