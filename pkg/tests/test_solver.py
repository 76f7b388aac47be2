import math

import numpy as np
import pytest

from czcrack.solver import CrackSolver, MaterialParams, SolverSettings, find_delay_time
from czcrack.viscoelastic import CreepParams

CREEP = CreepParams(m=5.0, theta=1.0)


def _run(b, beta, mode, h):
    sv = CrackSolver(MaterialParams(b=b, beta=beta, mode=mode, creep=CREEP),
                     SolverSettings(h=h))
    return sv, sv.run()


@pytest.fixture(scope="module", params=[(4.0, 0.5, 1e-3), (4.0, 2.0, 2e-3)],
                ids=["b4-beta0.5", "b4-beta2"])
def pair(request):
    b, beta, h = request.param
    return {mode: _run(b, beta, mode, h) for mode in ("elastic", "viscoelastic")}


def test_runs_rupture(pair):
    for sv, tr in pair.values():
        assert tr.outcome == "ruptured"
        assert tr.t_d < tr.t_r and tr.rupture["triggers"]


def test_zone_tip_sif_vanishes(pair):
    for sv, tr in pair.values():
        assert max(abs(k) for k in sv.state.K_series[1:]) <= 1e-8


def test_opening_criterion_on_growth_nodes(pair):
    for sv, tr in pair.values():
        st = sv.state
        d = np.asarray(st.delta_v if sv.params.viscous else st.delta_e)
        assert np.max(np.abs(d[st.i_d:] - sv.params.delta_c)) <= 1e-6


def test_monotone_geometry(pair):
    for sv, tr in pair.values():
        st = sv.state
        c_stat = np.asarray(st.c_series[: st.i_d + 1])
        a_prop = np.asarray(st.a_series[st.i_d:])
        assert np.all(np.diff(c_stat) > 0)
        assert np.all(np.asarray(st.a_series[: st.i_d + 1]) == 1.0)
        assert np.all(np.diff(a_prop[1:]) > 0)
        assert np.all(np.diff(a_prop) >= 0)
        assert np.all(tr.l >= 0)


def test_damage_consistency(pair):
    for sv, tr in pair.values():
        assert sv.damage_residuals() <= 5e-3


def test_elastic_and_visco_share_stationary_state(pair):
    (se, te), (sv, tv) = pair["elastic"], pair["viscoelastic"]
    assert tv.t_d <= te.t_d
    n = sv.state.i_d  # visco delay comes first; nodes before it are uniform
    assert se.state.times[:n] == sv.state.times[:n]
    assert se.state.c_series[:n] == sv.state.c_series[:n]
    de = np.asarray(sv.state.delta_e[:n])
    dv = np.asarray(sv.state.delta_v[:n])
    assert np.all(dv >= de)


def test_uncommitted_step_leaves_state_alone():
    sv = CrackSolver(MaterialParams(b=4.0, beta=0.5), SolverSettings(h=1e-3))
    sv.find_delay_time()
    before = (list(sv.state.times), list(sv.state.c_series), len(sv._point_x))
    zone = sv.propagation_step(sv.state.times[-1] + 1e-4, commit=False)
    assert zone is not None and zone.a > 1.0
    assert (list(sv.state.times), list(sv.state.c_series), len(sv._point_x)) == before


def test_no_growth_when_delta_c_out_of_reach():
    sv = CrackSolver(MaterialParams(b=4.0, beta=2.0, delta_c=50.0),
                     SolverSettings(h=0.01, t_end=0.05))
    tr = sv.run()
    assert tr.outcome == "no_growth" and tr.t_d is None and tr.t_r is None


def test_tiny_delta_c_grows_at_once():
    t_d, st = find_delay_time(MaterialParams(b=4.0, beta=2.0, delta_c=1e-6), h=1e-3)
    assert 0.0 < t_d <= 1e-3


def test_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(h=0.0)
    with pytest.raises(ValueError):
        SolverSettings(max_iter=0)
    with pytest.raises(ValueError):
        MaterialParams(b=4.0, beta=2.0, mode="plastic")
