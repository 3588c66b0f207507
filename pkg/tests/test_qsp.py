from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydqsp.ebgc import account
from rydqsp.lcu import compile_controlled_walk, ohe_plan
from rydqsp.pauli import make_spec
from rydqsp.qsp import (
    QspError,
    QspSequence,
    WalkSpectralModel,
    assemble_qsp_protocol,
    chebyshev_t,
    qsp_constraint_check,
    qsp_evaluate,
    query_complexity,
)

phase_lists = st.lists(st.floats(-math.pi, math.pi), min_size=1, max_size=9)


def test_trivial_sequences():
    for x in (-0.7, 0.0, 0.3, 1.0):
        assert qsp_evaluate(QspSequence((0.0,)), x)[0, 0] == 1
        assert qsp_evaluate(QspSequence((0.0, 0.0)), x)[0, 0] == pytest.approx(x)
        assert qsp_evaluate(QspSequence((0.0, 0.0, 0.0)), x)[0, 0] == pytest.approx(2 * x * x - 1)
    with pytest.raises(QspError):
        qsp_evaluate(QspSequence((0.0,)), 1.5)


@pytest.mark.parametrize("n", range(9))
def test_zero_phases_give_chebyshev(n):
    xs = np.linspace(-1, 1, 41)
    got = [qsp_evaluate(QspSequence((0.0,) * (n + 1)), x)[0, 0].real for x in xs]
    assert np.allclose(got, chebyshev_t(n, xs), atol=1e-12)


@given(phase_lists)
@settings(max_examples=40)
def test_response_unitary(phases):
    seq = QspSequence(tuple(phases))
    rep = qsp_constraint_check(seq, np.linspace(-1, 1, 100))
    assert rep.ok and rep.n_samples == 100
    for x in (-0.9, 0.2, 1.0):
        U = qsp_evaluate(seq, x)
        assert abs(abs(np.linalg.det(U)) - 1) < 1e-10
    assert abs(abs(qsp_evaluate(seq, 1.0)[0, 0]) - 1) < 1e-12


def test_exit_convention_branches():
    seq = QspSequence((0.3, -0.4, 1.1), "exit")
    for x in (-0.5, 0.4):
        for b in (1, -1):
            U = qsp_evaluate(seq, x, b)
            assert np.allclose(U.conj().T @ U, np.eye(2), atol=1e-12)
    with pytest.raises(QspError):
        qsp_evaluate(seq, 0.1, 0)


def test_walk_model():
    m = WalkSpectralModel(0.3)
    assert m.eigenphases() == (math.acos(0.3), -math.acos(0.3))
    ev = np.sort(np.angle(np.linalg.eigvals(m.matrix())))
    assert np.allclose(ev, [-math.acos(0.3), math.acos(0.3)])


def _grid_oracle(alpha_t, eps):
    q = np.linspace(1e-3, 10, 100_000)
    return math.ceil(np.min(np.exp(q) * alpha_t + math.log(1 / eps) / q) - 1e-9)


@pytest.mark.parametrize("alpha_t,eps", [(20, 1e-3), (10, 1e-3), (1, 1e-2), (150, 1e-6)])
def test_query_complexity_vs_grid(alpha_t, eps):
    assert query_complexity(alpha_t, eps)[0] == _grid_oracle(alpha_t, eps)


def test_query_complexity_frozen_and_monotone():
    assert query_complexity(10, 1e-3)[0] == 30
    assert query_complexity(10, 0.99)[0] <= 11
    assert query_complexity(7, 1e-3, even=True)[0] % 2 == 0
    for a in (1.0, 5.0, 40.0):
        assert query_complexity(a, 1e-4)[0] >= query_complexity(a, 1e-3)[0]
        assert query_complexity(2 * a, 1e-3)[0] >= query_complexity(a, 1e-3)[0]
    with pytest.raises(QspError):
        query_complexity(0.0, 0.1)
    with pytest.raises(QspError):
        query_complexity(1.0, 1.0)


def test_protocol_cost():
    plan = ohe_plan(make_spec(2, ["XI", "IZ", "YY"], [1.0, 0.5, 0.25]))
    cw = account(compile_controlled_walk(plan, "exact"), plan.tree)
    phases = (0.2, -1.0, 0.5, 0.0)
    r = account(assemble_qsp_protocol(plan, QspSequence(phases)), plan.tree)
    rot = sum(abs(p) for p in phases) / (3 * math.pi)
    assert r.ebgc == pytest.approx(3 * cw.ebgc + rot)
    assert r.ebgc <= 3 * (cw.ebgc + 1)
    assert r.depth == pytest.approx(3 * cw.depth + sum(abs(p) for p in phases) / math.pi)
    trivial = account(assemble_qsp_protocol(plan, QspSequence((0.0, 0.0))), plan.tree)
    assert trivial.ebgc == pytest.approx(cw.ebgc)
