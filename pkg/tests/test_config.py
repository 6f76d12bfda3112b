import pytest
from hypothesis import given
from hypothesis import strategies as st

from finrogue.config import PRESETS, ConfigError, parse_config, serialize_config

FIG1A = """\
# one-rogon scenario at k = 0
params.sigma = 0.3
params.beta = 0.03
params.alpha = 2
params.k = 0
solution = rogon1
grid.s_min = -6
grid.s_max = 6
grid.n_s = 128
grid.t_min = -3
grid.t_max = 3
grid.n_t = 97
"""


def test_parse_figure_scenario():
    c = parse_config(FIG1A)
    assert c.solution == "rogon1"
    assert (c.params.sigma, c.params.beta, c.params.alpha, c.params.k) == (0.3, 0.03, 2.0, 0.0)
    assert c.grid.n_s == 128 and c.grid.n_t == 97
    assert c.normalization == ("global-minmax",)
    assert c["run.workers"] == 1


def test_empty_input_lists_all_required():
    with pytest.raises(ConfigError) as info:
        parse_config("")
    msg = str(info.value)
    for key in ("solution", "params.sigma", "params.beta", "params.alpha", "params.k", "grid.n_s", "grid.n_t"):
        assert key in msg


def test_missing_keys_listed_together():
    with pytest.raises(ConfigError) as info:
        parse_config("solution = rogon2\nparams.sigma = 0.3\n")
    assert "params.beta" in str(info.value) and "grid.t_max" in str(info.value)


def test_sign_constraint_reported():
    with pytest.raises(ConfigError, match=r"sigma\*beta > 0"):
        parse_config(FIG1A + "params.beta = -0.03\n")


def test_unknown_key():
    with pytest.raises(ConfigError, match="unknown key") as info:
        parse_config(FIG1A + "params.gamma = 1\n")
    assert info.value.line == 13
    assert info.value.key == "params.gamma"


@pytest.mark.parametrize(
    "extra, line",
    [("just words\n", 13), ("grid.n_s = many\n", 13), ("= 3\n", 13)],
)
def test_parse_errors_carry_line(extra, line):
    with pytest.raises(ConfigError) as info:
        parse_config(FIG1A + extra)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_comments_and_blank_lines():
    text = "\n\n" + FIG1A.replace("params.k = 0", "params.k = 0   # carrier wavenumber")
    assert parse_config(text).params.k == 0.0


@pytest.mark.parametrize(
    "override, key",
    [
        ("grid.n_s=0", "grid"),
        ("render.normalization=fixed", "render.normalization"),
        ("verify.n_s=1000", "verify.n_s"),
        ("run.workers=0", "run.workers"),
        ("verify.dt_probe=0", "verify.dt_probe"),
    ],
)
def test_validation_names_key(override, key):
    with pytest.raises(ConfigError) as info:
        parse_config(FIG1A, [override])
    assert info.value.key == key


def test_fixed_normalization():
    c = parse_config(FIG1A, ["render.normalization=fixed", "render.lo=0", "render.hi=180"])
    assert c.normalization == ("fixed", 0.0, 180.0)
    with pytest.raises(ConfigError):
        parse_config(FIG1A, ["render.normalization=fixed", "render.lo=5", "render.hi=5"])


def test_overrides_in_order_last_wins():
    c = parse_config(FIG1A, ["params.alpha=1", "params.alpha=3"])
    assert c.params.alpha == 3.0


def test_each_override_validated():
    with pytest.raises(ConfigError):
        parse_config(FIG1A, ["params.alpha=abc", "params.alpha=1"])
    with pytest.raises(ConfigError):
        parse_config(FIG1A, ["noequals"])


def test_simulate_requires_admissible_k():
    base = PRESETS["sim-fig1"]
    with pytest.raises(ConfigError, match="nearest admissible") as info:
        parse_config(base, ["params.k=-1.5"])
    assert info.value.key == "params.k"


def test_simulate_requires_centered_domain():
    with pytest.raises(ConfigError) as info:
        parse_config(PRESETS["sim-fig1"], ["grid.s_min=-50"])
    assert info.value.key == "grid.s_min"


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_round_trip(name):
    c = parse_config(PRESETS[name])
    text = serialize_config(c)
    again = parse_config(text)
    assert again == c
    assert serialize_config(again) == text


@given(
    st.floats(0.01, 10.0, allow_subnormal=False),
    st.floats(0.001, 5.0, allow_subnormal=False),
    st.floats(0.1, 5.0),
    st.floats(-3.0, 3.0),
)
def test_round_trip_arbitrary_floats(sigma, beta, alpha, k):
    c = parse_config(
        FIG1A,
        [f"params.sigma={sigma!r}", f"params.beta={beta!r}", f"params.alpha={alpha!r}", f"params.k={k!r}"],
    )
    assert parse_config(serialize_config(c)) == c


def test_bs_config_needs_no_market_params():
    c = parse_config(PRESETS["bs-atm"])
    assert c.bs_params.strike == 100.0
    assert "params.sigma" not in c.values
