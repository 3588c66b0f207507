"""Resource estimates for time evolution under a local chain Hamiltonian.

Three strategies are costed: the qubitized walk driven by QSP over the whole
chain, a space-time block decimation running QSP inside each block, and the
fourth-order even/odd product formula.

Time is measured in units where every nearest-neighbour bond term has norm at
most one. With ``normalization="bond"`` the LCU one-norm is divided by the
largest bond one-norm; ``"none"`` feeds the raw one-norm to the query count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.optimize import brentq

from .ebgc import account
from .layout import LayoutSpec
from .lcu import compile_controlled_walk, compile_lcu, grouped_plan, walk_cost_formulas
from .pauli import HamiltonianSpec, bond_norm, build_disordered_heisenberg
from .qsp import query_complexity

METHODS = ("qsp", "haah", "pf4")
NORMALIZATIONS = ("bond", "none")
PF_CHARGES = ("composed", "literal")
CSV_FIELDS = ("n_site", "method", "ebgc", "depth", "ancillae", "k_star", "r_segments", "l", "t_box")


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class SimulationJob:
    spec: HamiltonianSpec
    t: float
    epsilon: float
    method: str = "qsp"
    layout: LayoutSpec | None = None
    normalization: str = "bond"
    pf_charge: str = "composed"
    walk: str = "promoted"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and self.t > 0):
            raise PlanError(f"t must be positive, got {self.t}")
        if not 0 < self.epsilon < 1:
            raise PlanError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.method not in METHODS:
            raise PlanError(f"unknown method {self.method!r}")
        if self.normalization not in NORMALIZATIONS:
            raise PlanError(f"unknown normalization {self.normalization!r}")
        if self.pf_charge not in PF_CHARGES:
            raise PlanError(f"unknown product-formula charge {self.pf_charge!r}")
        if self.walk not in ("promoted", "exact"):
            raise PlanError(f"unknown walk construction {self.walk!r}")

    @property
    def alpha(self) -> float:
        if self.normalization == "none":
            return self.spec.one_norm
        return self.spec.one_norm / bond_norm(self.spec)


@dataclass(frozen=True)
class HaahBlocking:
    l: int
    t_box: float
    m: float
    k_small: int
    k_large: int


@dataclass(frozen=True)
class PlanReport:
    method: str
    n_site: int
    ebgc: float
    depth: float
    ancillae: int
    k_star: int | None = None
    r_segments: int | None = None
    l: int | None = None
    t_box: float | None = None
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_FIELDS}

    def to_dict(self) -> dict:
        d = self.row()
        d["extra"] = dict(sorted(self.extra.items()))
        return d


# walk constants


@dataclass(frozen=True)
class WalkConstants:
    d_lcu: float
    n_lcu: float
    d_cw: float
    n_cw: float
    a_lcu: int
    L: int


@lru_cache(maxsize=256)
def _walk_constants_cached(spec: HamiltonianSpec, walk: str) -> WalkConstants:
    plan = grouped_plan(spec, charge="bound")
    lcu = account(compile_lcu(plan), plan.tree)
    cw = account(compile_controlled_walk(plan, walk), plan.tree)
    return WalkConstants(lcu.depth, lcu.ebgc, cw.depth, cw.ebgc, plan.n_address, plan.L)


def walk_constants(spec: HamiltonianSpec, walk: str = "promoted") -> WalkConstants:
    """Depth and EBGC of one LCU and one controlled walk, from compiled-circuit accounting."""
    return _walk_constants_cached(spec, walk)


def closed_form_constants(L: int) -> dict[str, float]:
    return {k: float(v) for k, v in walk_cost_formulas(L).items()}


# direct QSP


def plan_qsp(job: SimulationJob) -> PlanReport:
    if job.method != "qsp":
        raise PlanError(f"plan_qsp called with method {job.method!r}")
    c = walk_constants(job.spec, job.walk)
    k, q = query_complexity(job.alpha * job.t, job.epsilon)
    extra = {"alpha": job.alpha, "q_opt": q, "d_CW": c.d_cw, "n_CW": c.n_cw}
    anc = c.a_lcu + 1
    if job.layout is not None:
        anc += _layout_ports(job.layout, c.a_lcu, job.spec.n_site, extra)
    return PlanReport("qsp", job.spec.n_site, k * (c.n_cw + 1), k * (c.d_cw + 1), anc, k_star=k,
                      extra=extra)


def _layout_ports(layout: LayoutSpec, n_address: int, n_site: int, extra: dict) -> int:
    lay = layout.for_registers(n_address, n_site)
    extra["n_sub_address"] = lay.n_sub_c
    extra["n_sub_system"] = lay.n_sub_t
    return lay.n_ports


# block decimation


def lr_relation(t_box: float, l: int) -> float:
    """Empirical seam error of one block of width l and duration t_box."""
    return 0.175 * (7.9 * t_box / (l + 0.95)) ** (l + 0.95)


def block_count(t: float, n_site: int, t_box: float, l: int) -> float:
    return 4 * (2 * t * n_site) / (t_box * l)


def solve_t_box(t: float, n_site: int, l: int, epsilon: float) -> float:
    """Largest t_box whose seam error meets epsilon/(2m), with m depending on t_box."""

    def defect(tb: float) -> float:
        m = block_count(t, n_site, tb, l)
        return math.log(lr_relation(tb, l)) - math.log(epsilon / (2 * m))

    lo, hi = 1e-6, l / 7.9 * (l + 0.95)
    for _ in range(200):
        if defect(lo) < 0 < defect(hi):
            break
        if defect(lo) >= 0:
            lo /= 2
        if defect(hi) <= 0:
            hi *= 2
    else:
        raise PlanError(f"no root of the seam relation in [{lo:.3g}, {hi:.3g}] for l={l}")
    return brentq(defect, lo, hi, xtol=1e-14, rtol=1e-14)


def haah_blocking(t: float, n_site: int, l: int, epsilon: float) -> HaahBlocking:
    tb = solve_t_box(t, n_site, l, epsilon)
    m = block_count(t, n_site, tb, l)
    eps_block = epsilon / (2 * m)
    k_small, _ = query_complexity(tb * l, eps_block)
    k_large, _ = query_complexity(tb * 2 * l, eps_block)
    return HaahBlocking(l, tb, m, k_small, k_large)


def _haah_report(job: SimulationJob, b: HaahBlocking, c: WalkConstants) -> PlanReport:
    n, t = job.spec.n_site, job.t
    ebgc = b.m / 2 * b.k_large * (c.n_cw + 1)
    # the leading factor 2 is the crosstalk schedule doubling
    depth = 2 * (t / b.t_box) * (b.k_small + 2 * b.k_large) * (c.d_cw + 1)
    anc = math.ceil(n / (2 * b.l) * (4 + 2 * b.l + 2))
    extra = {"m": b.m, "k_small": b.k_small, "k_large": b.k_large}
    return PlanReport("haah", n, ebgc, depth, anc, l=b.l, t_box=b.t_box, extra=extra)


def plan_haah(job: SimulationJob) -> PlanReport:
    if job.method != "haah":
        raise PlanError(f"plan_haah called with method {job.method!r}")
    n = job.spec.n_site
    if n < 8:
        raise PlanError(f"block decimation needs n_site >= 8, got {n}")
    c = walk_constants(job.spec, job.walk)
    best = None
    for l in range(2, n // 4 + 1):
        r = _haah_report(job, haah_blocking(job.t, n, l, job.epsilon), c)
        if best is None or r.ebgc < best.ebgc:
            best = r
    return best


# product formula


SUZUKI_P4 = 1 / (4 - 4 ** (1 / 3))


def pf4_segments(n_site: int) -> int:
    return math.ceil(4 * n_site**1.555)


def pf1_segment_cost(n_site: int, dt: float) -> tuple[float, float, float]:
    """(ebgc, depth, ancillae) of one first-order even/odd segment."""
    a = abs(dt) / math.pi
    return n_site * (6 + 4 * a / 3), 48 + 7 * a, n_site / 2


def _layer_cost(n_site: int, tau: float) -> tuple[float, float]:
    # all bonds of one parity in parallel, three two-qubit exponentials each
    a = abs(tau) / math.pi
    return n_site / 2 * 3 * (2 + a / 3), 3 * (8 + a)


def pf2_cost(n_site: int, tau: float) -> tuple[float, float]:
    """Second-order step: even(tau/2), odd(tau), even(tau/2), then the field rotations."""
    e = d = 0.0
    for w in (0.5, 1.0, 0.5):
        le, ld = _layer_cost(n_site, w * tau)
        e, d = e + le, d + ld
    a = abs(tau) / math.pi
    return e + n_site * a / 3, d + a


def pf4_step_cost(n_site: int, dt: float) -> tuple[float, float]:
    """Fourth-order step as five second-order steps with weights p, p, 1-4p, p, p."""
    p = SUZUKI_P4
    e = d = 0.0
    for w in (p, p, 1 - 4 * p, p, p):
        se, sd = pf2_cost(n_site, w * dt)
        e, d = e + se, d + sd
    return e, d


def plan_pf4(job: SimulationJob) -> PlanReport:
    if job.method != "pf4":
        raise PlanError(f"plan_pf4 called with method {job.method!r}")
    n = job.spec.n_site
    r = pf4_segments(n)
    dt = job.t / r
    le, ld, la = pf1_segment_cost(n, dt)
    ce, cd = pf4_step_cost(n, dt)
    extra = {"dt": dt, "ebgc_literal": r * le, "depth_literal": r * ld,
             "ebgc_composed": r * ce, "depth_composed": r * cd}
    if job.pf_charge == "literal":
        ebgc, depth = r * le, r * ld
    else:
        ebgc, depth = r * ce, r * cd
    return PlanReport("pf4", n, ebgc, depth, math.ceil(la), r_segments=r, extra=extra)


PLANNERS = {"qsp": plan_qsp, "haah": plan_haah, "pf4": plan_pf4}


def plan(job: SimulationJob) -> PlanReport:
    return PLANNERS[job.method](job)


# comparison


def time_policy(policy: str, n_site: int) -> float:
    if policy == "4n":
        return 4.0 * n_site
    try:
        return float(policy)
    except ValueError:
        raise PlanError(f"unknown time policy {policy!r}") from None


def _threads() -> int:
    raw = os.environ.get("RQSP_THREADS", "")
    if not raw:
        return 1
    try:
        v = int(raw)
    except ValueError:
        raise PlanError(f"RQSP_THREADS must be an integer, got {raw!r}") from None
    return max(1, v)


def compare(jobs) -> list[dict]:
    """Rows of (method, ebgc, depth, ancillae, ...) with ratios to the QSP row of each size."""
    jobs = list(jobs)
    policies = {(j.epsilon, j.normalization, j.pf_charge, j.walk, round(j.t / j.spec.n_site, 12))
                for j in jobs}
    if len(policies) > 1:
        raise PlanError("jobs mix different (t/n_site, epsilon, normalization, charge) policies")
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(plan, jobs))
    qsp = {r.n_site: r for r in reports if r.method == "qsp"}
    rows = []
    for r in reports:
        row = r.row()
        ref = qsp.get(r.n_site)
        row["ebgc_ratio"] = r.ebgc / ref.ebgc if ref else None
        row["depth_ratio"] = r.depth / ref.depth if ref else None
        rows.append(row)
    return rows


def heisenberg_jobs(sizes, epsilon: float = 1e-3, policy: str = "4n", seed: int = 0,
                    methods=METHODS, **kw) -> list[SimulationJob]:
    jobs = []
    for n in sizes:
        spec = build_disordered_heisenberg(n, seed)
        t = time_policy(policy, n)
        jobs += [SimulationJob(spec, t, epsilon, m, **kw) for m in methods]
    return jobs


def constants_agree(L: int, spec: HamiltonianSpec) -> dict[str, tuple[float, float]]:
    """Closed-form vs accounted constants, keyed by name."""
    c = walk_constants(spec)
    closed = walk_cost_formulas(L)
    return {
        "d_LCU": (float(closed["d_LCU"]), c.d_lcu),
        "n_LCU": (float(closed["n_LCU"]), c.n_lcu),
        "d_CW": (float(closed["d_CW"]), c.d_cw),
        "n_CW": (float(closed["n_CW"]), c.n_cw),
    }

