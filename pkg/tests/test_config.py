import pytest

from nirfuse.errors import ConfigError
from nirfuse.filters import BFParams, WLSParams
from nirfuse.fusion import MaxRule, Method
from nirfuse.harness.config import RunConfig, parse_config, parse_override, write_config


def test_defaults_are_reference_parameters(monkeypatch):
    monkeypatch.delenv("NIRFUSE_THREADS", raising=False)
    cfg = parse_config()
    assert cfg.bf_params() == BFParams()
    assert cfg.wls_params() == WLSParams()
    assert cfg.methods == [m.value for m in Method]
    assert cfg.transforms == ["ROT45", "ROT90", "ROT180", "SCALE_050", "SCALE_075"]
    assert (cfg.threshold, cfg.bin_size, cfg.step, cfg.threads) == (1.5, 8, 4, 1)
    assert cfg.max_rule == MaxRule.MAGNITUDE.value


def test_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("NIRFUSE_THREADS", "3")
    path = tmp_path / "run.toml"
    path.write_text('sigma_range = 0.2\nlambda = 0.5\nmethods = ["SWAP_BF"]\n')
    cfg = parse_config(path)
    assert (cfg.sigma_range, cfg.lam, cfg.methods, cfg.threads) == (0.2, 0.5, ["SWAP_BF"], 3)
    cfg = parse_config(path, ["sigma_range=0.3", "threads=2", "methods=SWAP_WLS,BFWLS_MAX"])
    assert (cfg.sigma_range, cfg.lam, cfg.threads) == (0.3, 0.5, 2)
    assert cfg.methods == ["SWAP_WLS", "BFWLS_MAX"]
    cfg = parse_config(path, {"lambda": 1, "threads": None})
    assert cfg.lam == 1.0 and isinstance(cfg.lam, float)


def test_unknown_key_suggests_spelling(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("sigma_space = 10.0\n")
    with pytest.raises(ConfigError, match="sigma_space.*sigma_spatial"):
        parse_config(path)
    with pytest.raises(ConfigError, match="lambda"):
        parse_config(overrides=["lamda=0.2"])


def test_type_mismatch_names_expected_type():
    with pytest.raises(ConfigError, match="expected int"):
        parse_config(overrides=["bin_size=8.5"])
    with pytest.raises(ConfigError, match="expected float"):
        parse_config(overrides=["sigma_range=wide"])
    with pytest.raises(ConfigError, match="expected bool"):
        parse_config(overrides={"emit_images": "yes"})


@pytest.mark.parametrize(
    "override",
    ["sigma_range=-1", "methods=FANCY", "transforms=ROT30", "threads=0", "max_rule=median", "step=0"],
)
def test_invalid_values(override):
    with pytest.raises(ConfigError):
        parse_config(overrides=[override])


def test_malformed_inputs(tmp_path):
    with pytest.raises(ConfigError):
        parse_override("no-equals-sign")
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.toml")
    (tmp_path / "nested.toml").write_text("[bf]\nsigma_range = 0.1\n")
    with pytest.raises(ConfigError, match="flat"):
        parse_config(tmp_path / "nested.toml")
    (tmp_path / "broken.toml").write_text("sigma_range = \n")
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "broken.toml")


def test_parse_override_values():
    assert parse_override("lambda=0.25") == ("lambda", 0.25)
    assert parse_override("emit_images = true") == ("emit_images", True)
    assert parse_override("max_rule=signed") == ("max_rule", "signed")


def test_round_trip(tmp_path):
    cfg = parse_config(overrides=["sigma_range=0.15", "methods=SWAP_BF"])
    write_config(cfg, tmp_path / "out.toml")
    assert parse_config(tmp_path / "out.toml") == cfg


def test_hash_ignores_logistics():
    a = RunConfig()
    b = RunConfig(output_dir="elsewhere", threads=4, emit_images=True)
    assert a.config_hash() == b.config_hash()
    assert RunConfig(sigma_range=0.2).config_hash() != a.config_hash()


def test_fusion_methods_carry_parameters():
    cfg = parse_config(overrides=["lambda=0.3", "max_rule=signed", "methods=BFWLS_MAX"])
    (m,) = cfg.fusion_methods()
    assert m.tag is Method.BFWLS_MAX and m.wls.lam == 0.3 and m.max_rule is MaxRule.SIGNED
