"""Closed-form error model of the EIT-based biased-error Rydberg gates.

All frequencies are angular (rad/s), rates are in 1/s and times in seconds.
Rates are turned into probabilities with 1 - exp(-rate * time), which differs
from rate * time by O((rate * time)^2) and stays inside [0, 1].
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

REGIMES = ("bias-linear", "strong-drive")
_FIELDS = ("gamma_R", "gamma_P", "omega_p", "omega_c", "delta", "J")


class PhysicalError(ValueError):
    pass


def _prob(exponent: float) -> float:
    return -math.expm1(-exponent)


@dataclass(frozen=True)
class EitParams:
    gamma_R: float
    gamma_P: float
    omega_p: float
    omega_c: float
    delta: float
    J: float
    guard: float = 0.0  # relative band around the regime boundary treated as bias-linear

    def __post_init__(self) -> None:
        for name in _FIELDS:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise PhysicalError(f"{name} must be positive and finite, got {v}")
        if self.guard < 0:
            raise PhysicalError("guard band must be non-negative")

    @property
    def tau_g(self) -> float:
        return math.pi * self.delta / self.omega_p**2

    @property
    def x(self) -> float:
        return math.sqrt(2.0) * self.omega_p / self.omega_c

    @property
    def boundary(self) -> float:
        """Control Rabi frequency above which the blockade-leakage term dominates."""
        return self.J * math.sqrt(self.gamma_P / self.gamma_R)

    @property
    def regime(self) -> str:
        return "strong-drive" if self.omega_c > self.boundary * (1 + self.guard) else "bias-linear"

    def perturbative_flags(self, factor: float = 5.0) -> dict[str, bool]:
        """Which of the ordering assumptions hold by at least ``factor``."""
        big = min(self.delta, self.J)
        mid_hi = max(self.omega_p, self.omega_c)
        mid_lo = min(self.omega_p, self.omega_c)
        small = max(self.gamma_R, self.gamma_P)
        return {
            "detuning_and_interaction_over_drives": big >= factor * mid_hi,
            "drives_over_decay": mid_lo >= factor * small,
        }

    def with_control(self, omega_c: float) -> "EitParams":
        return EitParams(self.gamma_R, self.gamma_P, self.omega_p, omega_c, self.delta, self.J,
                         self.guard)

    @classmethod
    def from_dict(cls, doc: dict) -> "EitParams":
        missing = [k for k in _FIELDS if k not in doc]
        if missing:
            raise PhysicalError(f"missing field(s): {', '.join(missing)}")
        extra = sorted(set(doc) - set(_FIELDS) - {"guard"})
        if extra:
            raise PhysicalError(f"unknown field(s): {', '.join(extra)}")
        try:
            return cls(**{k: float(v) for k, v in doc.items()})
        except (TypeError, ValueError) as exc:
            if isinstance(exc, PhysicalError):
                raise
            raise PhysicalError(f"non-numeric field: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "EitParams":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PhysicalError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise PhysicalError("expected a JSON object of physical parameters")
        return cls.from_dict(doc)


@dataclass(frozen=True)
class EitErrorReport:
    eps_v: float
    eps_s: float
    eta: float
    tau_g: float
    regime: str
    flags: dict

    def to_dict(self) -> dict:
        return {
            "eps_v": self.eps_v,
            "eps_s": self.eps_s,
            "eta": self.eta,
            "tau_g_s": self.tau_g,
            "regime": self.regime,
            "flags": dict(sorted(self.flags.items())),
        }


def conditional_errors(p: EitParams) -> EitErrorReport:
    """Target error probabilities with the control condition violated (eps_v) or satisfied (eps_s)."""
    tau = p.tau_g
    leak = (p.omega_p * p.omega_c / (p.delta * p.J)) ** 2
    rate_s = (p.omega_p / p.delta) ** 2 * p.gamma_P + p.gamma_R + leak * p.gamma_R
    eps_v = _prob(tau * p.gamma_R * p.x**2)
    eps_s = _prob(tau * rate_s)
    if eps_s == 0.0:
        raise PhysicalError("satisfied-control error vanished; ratio undefined")
    return EitErrorReport(eps_v, eps_s, eps_v / eps_s, tau, p.regime, p.perturbative_flags())


def total_error_ohe(p: EitParams, N: int) -> float:
    """Error of N single-qubit-controlled Paulis driven by one OHE address register."""
    if N < 1:
        raise PhysicalError(f"N must be >= 1, got {N}")
    r = conditional_errors(p)
    if r.eps_v * N > 0.1:
        warnings.warn(f"eps_v * N = {r.eps_v * N:.3g} is not small; linear accounting is loose",
                      stacklevel=2)
    return min(1.0, r.eps_s * (1.0 + r.eta * (N - 1)))


def balanced_detuning(omega_p: float, gamma_R: float, gamma_P: float) -> float:
    """Detuning with (omega_p/delta)^2 gamma_P = gamma_R."""
    return omega_p * math.sqrt(gamma_P / gamma_R)


# reported hardware numbers
TAU_R = 146e-6
TAU_P = 115e-9
OMEGA_R = 2 * math.pi * 120e6


def reported_parameters(J: float = 2 * math.pi * 1e9) -> EitParams:
    """Lifetimes 146 us / 115 ns, control drive 2 pi x 120 MHz, probe a tenth of it.

    The probe sets the bias x^2 = 2 (omega_p/omega_c)^2 = 1/50; J is taken large
    enough that the blockade-leakage term is negligible.
    """
    gamma_R, gamma_P = 1 / TAU_R, 1 / TAU_P
    omega_p = OMEGA_R / 10
    return EitParams(gamma_R, gamma_P, omega_p, OMEGA_R,
                     balanced_detuning(omega_p, gamma_R, gamma_P), J)


def reported_parameter_example() -> EitErrorReport:
    return conditional_errors(reported_parameters())


def strong_drive_scaling(p: EitParams, N: int) -> float:
    """Total N-gate error with the strong-drive leading forms.

    eps_s ~ tau_g (omega_p omega_c / (delta J))^2 gamma_R and eta = eps_v/eps_s ~ omega_c^-4.
    """
    if p.regime != "strong-drive":
        raise PhysicalError(
            f"bias-linear regime: omega_c = {p.omega_c:.4g} does not exceed "
            f"J sqrt(gamma_P/gamma_R) = {p.boundary:.4g}")
    if N < 1:
        raise PhysicalError(f"N must be >= 1, got {N}")
    tau = p.tau_g
    eps_s = _prob(tau * (p.omega_p * p.omega_c / (p.delta * p.J)) ** 2 * p.gamma_R)
    eps_v = _prob(tau * p.gamma_R * p.x**2)
    return min(1.0, eps_s * (1.0 + eps_v / eps_s * (N - 1)))


def strong_drive_eta(p: EitParams) -> float:
    """Leading-order bias ratio in the strong-drive regime, 2 (delta J)^2 / omega_c^4."""
    return p.x**2 / (p.omega_p * p.omega_c / (p.delta * p.J)) ** 2


def strong_drive_sweep(p: EitParams, Ns, n_ref: int = 100) -> tuple[np.ndarray, float]:
    """Total error at each N with omega_c scaled as (N/n_ref)^(1/4), plus the log-log slope."""
    Ns = np.asarray(list(Ns), dtype=float)
    eps = np.array([strong_drive_scaling(p.with_control(p.omega_c * (n / n_ref) ** 0.25), int(n))
                    for n in Ns])
    slope = float(np.polyfit(np.log(Ns), np.log(eps), 1)[0])
    return eps, slope


def strong_drive_example() -> EitParams:
    """A weak-blockade setting (J = 2 pi x 5 MHz) where the leakage term governs eps_s."""
    gamma_R, gamma_P = 1 / TAU_R, 1 / TAU_P
    omega_p = 2 * math.pi * 20e6
    return EitParams(gamma_R, gamma_P, omega_p, 2 * math.pi * 300e6,
                     balanced_detuning(omega_p, gamma_R, gamma_P), 2 * math.pi * 5e6)
