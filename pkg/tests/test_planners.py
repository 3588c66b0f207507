from __future__ import annotations

import math

import numpy as np
import pytest

from rydqsp.layout import LayoutSpec
from rydqsp.pauli import build_disordered_heisenberg
from rydqsp.planners import (
    PlanError,
    SimulationJob,
    block_count,
    compare,
    constants_agree,
    haah_blocking,
    heisenberg_jobs,
    lr_relation,
    pf1_segment_cost,
    pf4_segments,
    pf4_step_cost,
    plan,
    plan_haah,
    plan_pf4,
    plan_qsp,
    solve_t_box,
    walk_constants,
)
from rydqsp.qsp import query_complexity


@pytest.fixture(scope="module")
def heis50():
    return build_disordered_heisenberg(50, 0)


def test_two_path_constants(heis10):
    for name, (closed, compiled) in constants_agree(7, heis10).items():
        assert closed == pytest.approx(compiled, abs=1e-9), name
    c = walk_constants(heis10)
    assert (c.d_cw, c.a_lcu) == (131, 17)


def test_plan_qsp_frozen(heis50):
    r = plan_qsp(SimulationJob(heis50, 200.0, 1e-3, "qsp"))
    assert r.k_star == 12056
    assert r.ebgc == pytest.approx(148690.6666666667, rel=1e-12)
    assert r.depth == 1591392.0
    assert r.ancillae == 50 + 7 + 1
    # independent path: closed-form constants and the query count
    k, _ = query_complexity(heis50.one_norm / 3.0 * 200.0, 1e-3)
    assert r.ebgc == pytest.approx(k * (34 / 3 + 1), rel=1e-6)
    assert r.depth == pytest.approx(k * 132, rel=1e-6)


def test_plan_qsp_linear_in_k(heis10):
    a = plan_qsp(SimulationJob(heis10, 10.0, 1e-3, "qsp"))
    b = plan_qsp(SimulationJob(heis10, 40.0, 1e-3, "qsp"))
    assert a.ebgc / a.k_star == pytest.approx(b.ebgc / b.k_star)


def test_wrong_method_and_bad_job(heis10):
    with pytest.raises(PlanError):
        plan_qsp(SimulationJob(heis10, 1.0, 1e-3, "pf4"))
    with pytest.raises(PlanError):
        SimulationJob(heis10, -1.0, 1e-3)
    with pytest.raises(PlanError):
        SimulationJob(heis10, 1.0, 2.0)


def test_lr_relation_monotone():
    tb = np.logspace(-3, 0, 40)
    for l in (2, 5, 9):
        v = [lr_relation(t, l) for t in tb]
        assert all(a < b for a, b in zip(v, v[1:]))


def test_block_count_linear():
    assert block_count(20.0, 10, 0.5, 3) == pytest.approx(2 * block_count(10.0, 10, 0.5, 3))
    assert block_count(10.0, 20, 0.5, 3) == pytest.approx(2 * block_count(10.0, 10, 0.5, 3))


def test_t_box_solves_relation():
    tb = solve_t_box(200.0, 50, 12, 1e-3)
    m = block_count(200.0, 50, tb, 12)
    assert lr_relation(tb, 12) == pytest.approx(1e-3 / (2 * m), rel=1e-9)


def test_haah_exceeds_qsp(heis50):
    h = plan_haah(SimulationJob(heis50, 200.0, 1e-3, "haah"))
    q = plan_qsp(SimulationJob(heis50, 200.0, 1e-3, "qsp"))
    assert h.ebgc > q.ebgc
    assert 2 <= h.l <= 50 // 4
    assert h.t_box == pytest.approx(0.5008634271031793, rel=1e-9)


def test_haah_monotone_at_fixed_l():
    e = [haah_blocking(t, 40, 5, 1e-3) for t in (40.0, 80.0, 160.0)]
    assert all(a.m < b.m for a, b in zip(e, e[1:]))
    loose, tight = haah_blocking(80.0, 40, 5, 1e-2), haah_blocking(80.0, 40, 5, 1e-4)
    # tighter tolerance: shorter blocks, more of them, more total queries
    assert tight.m > loose.m and tight.m * tight.k_large > loose.m * loose.k_large


def test_pf_segments_and_segment_depth():
    assert [pf4_segments(n) for n in (10, 50, 100)] == [144, 1754, 5153]
    assert pf1_segment_cost(10, 0.0)[1] == 48
    assert pf1_segment_cost(10, 1e-9)[1] == pytest.approx(48, abs=1e-8)
    assert pf1_segment_cost(10, 0.0)[0] == 60
    e, d = pf4_step_cost(10, 0.0)
    assert (e, d) == (pytest.approx(5 * 9 * 10), 5 * 3 * 24)


def test_pf4_charges(heis50):
    lit = plan_pf4(SimulationJob(heis50, 200.0, 1e-3, "pf4", pf_charge="literal"))
    comp = plan_pf4(SimulationJob(heis50, 200.0, 1e-3, "pf4"))
    assert lit.r_segments == comp.r_segments == 1754
    assert lit.ebgc == pytest.approx(comp.extra["ebgc_literal"])
    assert comp.ebgc / lit.ebgc == pytest.approx(7.5, rel=0.01)
    seg = pf1_segment_cost(50, 200.0 / 1754)
    assert lit.ebgc == pytest.approx(1754 * seg[0])
    assert lit.ancillae == 25


def test_monotone_in_time_and_epsilon(heis10):
    for m in ("qsp", "pf4", "haah"):
        r = [plan(SimulationJob(heis10, t, 1e-3, m)).ebgc for t in (10.0, 20.0, 40.0)]
        assert r == sorted(r)
        e = [plan(SimulationJob(heis10, 20.0, eps, m)).ebgc for eps in (1e-2, 1e-3, 1e-4)]
        assert e == sorted(e)


def test_monotone_in_size_qsp_pf4():
    rows = compare(heisenberg_jobs(range(10, 61, 10), methods=("qsp", "pf4")))
    for m in ("qsp", "pf4"):
        v = [r["ebgc"] for r in rows if r["method"] == m]
        d = [r["depth"] for r in rows if r["method"] == m]
        assert v == sorted(v) and d == sorted(d)


def test_compare_rejects_mixed_policies(heis10):
    jobs = [SimulationJob(heis10, 40.0, 1e-3, "qsp"), SimulationJob(heis10, 40.0, 1e-4, "pf4")]
    with pytest.raises(PlanError):
        compare(jobs)


def test_compare_deterministic(monkeypatch):
    jobs = heisenberg_jobs([10, 20])
    a = compare(jobs)
    monkeypatch.setenv("RQSP_THREADS", "4")
    assert compare(jobs) == a
    assert [r["method"] for r in a] == ["qsp", "haah", "pf4"] * 2
    assert a[0]["ebgc_ratio"] == 1.0


def test_layout_adds_ports(heis10):
    bare = plan_qsp(SimulationJob(heis10, 40.0, 1e-3, "qsp"))
    lay = plan_qsp(SimulationJob(heis10, 40.0, 1e-3, "qsp", layout=LayoutSpec(1, 10.0, 2.0)))
    assert lay.ancillae == bare.ancillae + 3 * (math.ceil(17 / 5) + 2)
    assert lay.ebgc == bare.ebgc
