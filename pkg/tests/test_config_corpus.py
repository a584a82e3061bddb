import json
import math

import numpy as np
import pytest

from qdiff import corpus
from qdiff.config import RunConfig, derived_nash_constant, kappa, load_config
from qdiff.errors import ParseError, ValidationError
from qdiff.functionals import dirichlet_form, purity
from qdiff.gaussian import GaussianState, validate


def test_derived_constant_values():
    assert derived_nash_constant(1) == pytest.approx(8.0)
    # n = 2: 4 (3/2)^(3/2) sqrt(pi^2) / (2 pi)
    assert derived_nash_constant(2) == pytest.approx(4 * 1.5**1.5 * math.pi / (2 * math.pi))
    assert kappa(1, 8.0) == pytest.approx(2.0)
    assert kappa(2, 3.0) == pytest.approx(3.0)


def test_derived_constant_dominates_thermal_family():
    for n in (1, 2, 3):
        c = derived_nash_constant(n)
        for nu in np.linspace(0.5, 10, 200):
            s = GaussianState.thermal(nu, n)
            assert purity(s) ** (1 + 1 / n) <= c * dirichlet_form(s)


def test_config_defaults_and_hash():
    c = RunConfig()
    assert c.nash_c(1) == 8.0
    assert c.config_hash() == RunConfig(out_dir="elsewhere").config_hash()
    assert c.config_hash() != RunConfig(seed=7).config_hash()
    assert c.with_overrides(seed=None, nash_constant=2.0).nash_constant == 2.0


@pytest.mark.parametrize("kw", [{"grid_m": 100}, {"margin_tol": 0.0}, {"nash_constant": -1.0}, {"ultra_t_max": 0.01}])
def test_config_validation(kw):
    with pytest.raises(ValidationError):
        RunConfig(**kw)


def test_load_config(tmp_path, monkeypatch):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"seed": 9, "modes": [1]}))
    assert load_config(str(p)).seed == 9
    monkeypatch.setenv("QDIFF_CONFIG", str(p))
    assert load_config().modes == (1,)
    p.write_text('{"seed": 9,\n "bogus": 1}')
    with pytest.raises(ParseError, match="bogus"):
        load_config(str(p))
    p.write_text('{"seed": 9,\n oops}')
    with pytest.raises(ParseError, match="line 2"):
        load_config(str(p))
    with pytest.raises(ParseError):
        load_config(str(tmp_path / "missing.json"))


def test_rng_streams_are_independent_and_reproducible():
    a = corpus.rng_for(42, "nash").random(3)
    b = corpus.rng_for(42, "nash").random(3)
    c = corpus.rng_for(42, "ultra").random(3)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_random_corpora_are_physical():
    rng = corpus.rng_for(1, "t")
    for s in corpus.random_gaussians(rng, 30):
        assert validate(s).invertible
        assert np.all(s.mean == 0)
    for s in corpus.flow_states(rng):
        assert validate(s).physical
    for g in corpus.random_mixtures(rng, 5):
        assert abs(g.chi[128, 128] - 1) < 1e-12


def test_pure_squeezed():
    s = corpus.pure_squeezed(2, 0.4)
    assert purity(s) == pytest.approx(1.0)
