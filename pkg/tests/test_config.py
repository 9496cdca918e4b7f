import dataclasses
import io

import pytest

from starnoma.config import (
    ConfigError,
    PowerAllocation,
    SystemConfig,
    baseline_config,
    default_power_allocation,
    dump_config,
    load_config,
)

BASELINE_DOC = """
geometry:
  R: 50.0
  R_r: 30.0
  d_br: 80.0
  m: 2.7
surface:
  N: 10
users:
  K_cd: 6
  K_cu: 6
  K_ed: 3
  K_eu: 3
  K_d1: 3
  K_d2: 3
  K_u1: 3
  K_u2: 3
impairments:
  xi_sic: 0.1
  si_beta: 0.001
"""


def test_baseline_document_loads():
    doc = BASELINE_DOC.replace("si_beta", "beta_si")
    cfg = load_config(io.StringIO(doc))
    assert cfg.R == 50.0 and cfg.R_r == 30.0 and cfg.N == 10
    assert cfg.m == 2.7 and cfg.xi_sic == 0.1 and cfg.beta_si == 0.001
    assert cfg.lambda_si == 0.1
    assert all(k == 3.0 for k in cfg.kappa_map.values())
    assert cfg.K_d1 + cfg.K_d2 == cfg.K_cd


def test_unknown_field_rejected():
    with pytest.raises(ConfigError, match="si_beta"):
        load_config(io.StringIO(BASELINE_DOC))


def test_alpha_ordering_rejected():
    with pytest.raises(ConfigError, match="alpha"):
        load_config(io.StringIO("allocation:\n  alpha: [0.5, 0.3, 0.2]\n  p_ul: [1.0, 1.0, 1.0]\n"))


def test_geometry_precondition_rejected():
    with pytest.raises(ConfigError, match="d_br"):
        load_config(io.StringIO("geometry:\n  d_br: 40.0\n"))


@pytest.mark.parametrize(
    "field,value,match",
    [
        ("xi_sic", 1.5, "xi_sic"),
        ("lambda_si", -0.1, "lambda_si"),
        ("K_d1", 2, "K_d1"),
        ("p_um", 2000.0, "p_um"),
        ("R", -1.0, "R"),
        ("sigma2", 0.0, "sigma2"),
    ],
)
def test_invariant_violations_name_the_field(field, value, match):
    with pytest.raises(ConfigError, match=match):
        dataclasses.replace(baseline_config(), **{field: value})


def test_negative_kappa_rejected():
    cfg = baseline_config()
    bad = dict(cfg.kappa_map, **{"b,r": -1.0})
    with pytest.raises(ConfigError, match="kappa"):
        dataclasses.replace(cfg, kappa_map=bad)


def test_round_trip_identity(tmp_path):
    cfg = baseline_config(P_b=200.0, p_um=20.0, xi_sic=0.05)
    path = tmp_path / "cfg.yaml"
    dump_config(cfg, str(path))
    again = load_config(str(path))
    assert again == cfg


def test_round_trip_with_allocation():
    cfg = baseline_config(allocation=PowerAllocation((0.1, 0.3, 0.6), (10.0, 10.0, 5.0)))
    assert load_config(dump_config(cfg)) == cfg


def test_with_snr():
    cfg = baseline_config().with_snr(40.0)
    assert cfg.P_b == pytest.approx(1e4)
    assert cfg.p_um == pytest.approx(1e3)
    assert cfg.snr_db == pytest.approx(40.0)


def test_default_power_allocation(cfg):
    pw = default_power_allocation(cfg)
    assert pw.alpha[0] < pw.alpha[1] < pw.alpha[2]
    assert sum(pw.alpha) <= 1.0
    assert all(p == cfg.p_um for p in pw.p_ul)


def test_allocation_budget_check():
    with pytest.raises(ConfigError, match="p_ul"):
        PowerAllocation((0.1, 0.3, 0.6), (1.0, 1.0, 200.0)).validate_budget(100.0)


def test_uniform_clusters_flag(cfg):
    assert cfg.uniform_clusters()
    assert not dataclasses.replace(cfg, K_ed=4).uniform_clusters()


def test_config_equality_is_value_based(cfg):
    assert cfg == SystemConfig()
