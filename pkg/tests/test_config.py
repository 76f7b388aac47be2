import dataclasses
import math

import pytest
from hypothesis import given, strategies as st

from czcrack.config import (PMMA, ConfigError, RunConfig, UnitError, kolosov,
                            normalize_physical, pmma_normalisation)
from czcrack.solver import MaterialParams, SolverSettings
from czcrack.viscoelastic import CreepParams


def test_pmma_normalisation():
    n = pmma_normalisation()
    assert n.mu0 == pytest.approx(1148.0, rel=1e-3)
    assert n.kappa == pytest.approx(1.96, rel=5e-3)
    assert n.t_inf_hat == pytest.approx(8.96, rel=1e-2)
    assert n.material.creep.m == pytest.approx(5.0, rel=1e-2)
    assert n.material.creep.theta == pytest.approx(1.0, rel=1e-2)
    assert n.material.delta_c == pytest.approx(0.238, rel=1e-2)


def test_shear_viscosity_reading_changes_m():
    shear = dataclasses.replace(PMMA, viscosity_kind="shear")
    m_t = normalize_physical(PMMA).material.creep.m
    m_s = normalize_physical(shear).material.creep.m
    assert m_s == pytest.approx(m_t / (2.0 * (1.0 + PMMA.nu)))


def test_elastic_limit_of_large_viscosity():
    p = dataclasses.replace(PMMA, eta=1e300)
    assert normalize_physical(p).material.creep.m == pytest.approx(0.0, abs=1e-250)


def test_kolosov():
    assert kolosov(0.25, "plane-strain") == pytest.approx(2.0)
    assert kolosov(0.25, "plane-stress") == pytest.approx(2.2)


def test_physical_validation():
    with pytest.raises(ConfigError):
        dataclasses.replace(PMMA, nu=0.5)
    with pytest.raises(ConfigError):
        dataclasses.replace(PMMA, E0=-1.0)
    with pytest.raises(UnitError):
        dataclasses.replace(PMMA, theta_unit="fortnight")


materials = st.builds(
    MaterialParams,
    b=st.floats(1.0, 20.0),
    beta=st.floats(0.05, 0.99),
    delta_c=st.floats(1e-3, 1.0),
    creep=st.builds(CreepParams, m=st.floats(0.0, 10.0), theta=st.floats(0.1, 10.0)),
    mode=st.sampled_from(["elastic", "viscoelastic"]),
)
settings_ = st.builds(SolverSettings, h=st.floats(1e-5, 0.1), t_end=st.floats(0.01, 5.0),
                      eps=st.floats(1e-12, 1e-6), max_iter=st.integers(1, 500),
                      stationary_only=st.booleans())


@given(mat=materials, s=settings_, probes=st.lists(st.floats(0.0, 2.0), max_size=3))
def test_round_trip(mat, s, probes):
    cfg = RunConfig(material=mat, settings=s, out_dir="results/x", probe_t=tuple(probes))
    back = RunConfig.from_string(cfg.to_string())
    assert back == cfg


def test_round_trip_with_physical_block():
    cfg = RunConfig.from_file("configs/pmma.ini")
    assert RunConfig.from_string(cfg.to_string()) == cfg


def test_normalized_block_wins(caplog):
    text = open("configs/pmma.ini").read() + "\n[normalized]\nb = 4\nbeta = 2\n"
    cfg = RunConfig.from_string(text)
    assert cfg.material.b == 4.0 and cfg.physical is not None
    assert any("using [normalized]" in r.message for r in caplog.records)


@pytest.mark.parametrize("text, where", [
    ("[mesh]\nh = 1e-3\n", "need a [normalized] or [physical]"),
    ("[normalized]\nb = 4\nbeta = x\n", "normalized.beta"),
    ("[normalized]\nb = 4\nbeta = 2\n[mesh]\nn = 10\nh = 0.1\n", "not both"),
    ("[normalized]\nb = 4\nbeta = 2\n[solver]\nfoo = 1\n", "solver.foo"),
    ("[normalized]\nb = 4\nbeta = 2\n[bogus]\n", "unknown section"),
    ("[normalized]\nb = 4\nbeta = 5\n", "need 0 < beta < b"),
    ("[normalized]\nb = 4\nbeta = 2\n[solver]\nh = -1\n", "h must be positive"),
    ("[normalized]\nb = 4\nbeta = 2\n[solver]\nstationary_only = maybe\n", "not a boolean"),
    ("[normalized\nb = 4\n", "<string>"),
])
def test_config_errors_name_the_field(text, where):
    with pytest.raises(ConfigError) as err:
        RunConfig.from_string(text)
    assert where in str(err.value)


def test_missing_time_units_rejected():
    text = open("configs/pmma.ini").read().replace("theta_unit = s\n", "")
    with pytest.raises(UnitError, match="theta_unit"):
        RunConfig.from_string(text)


def test_mesh_count_sets_h():
    cfg = RunConfig.from_string("[normalized]\nb = 4\nbeta = 2\n[mesh]\nn = 2500\n")
    assert cfg.settings.h == pytest.approx(4e-4)


def test_overrides():
    cfg = RunConfig().with_overrides(b=3.0, mode="viscoelastic", h=1e-3, beta=None)
    assert cfg.material.b == 3.0 and cfg.material.beta == 2.0
    assert cfg.material.mode == "viscoelastic" and cfg.settings.h == 1e-3
