import json
import math

import numpy as np
import pytest

from qdiff.errors import BadWeights, DimensionMismatch, GridTooSmall, QuadratureUnconverged
from qdiff.functionals import dirichlet_form, purity
from qdiff.gaussian import GaussianState
from qdiff.grid import (
    evolve_grid,
    from_gaussian_mixture,
    grid_dirichlet,
    grid_purity,
    sample_gaussian_chi,
    wigner_samples,
    write_chi_csv,
    write_wigner_csv,
)
from qdiff.semigroup import evolve_gaussian
from qdiff.corpus import coherent_cat_mixture

CAT = 0.5 * (1 + math.exp(-4))


def single(state, **kw):
    return from_gaussian_mixture([(1.0, state)], **kw)


def test_vacuum_chi():
    g = single(GaussianState.vacuum())
    x = g.axis
    ref = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / 4)
    assert np.max(np.abs(g.chi - ref)) < 1e-15
    assert g.chi[128, 128] == 1.0


def test_purity_and_dirichlet():
    assert grid_purity(single(GaussianState.vacuum())) == pytest.approx(1.0, abs=1e-8)
    assert grid_purity(single(GaussianState.thermal(1.5))) == pytest.approx(1 / 3, abs=1e-8)
    assert grid_dirichlet(single(GaussianState.vacuum())) == pytest.approx(0.5, abs=1e-7)
    assert grid_purity(coherent_cat_mixture()) == pytest.approx(CAT, abs=1e-6)


def test_squeezed_displaced_component_matches_closed_form():
    s = GaussianState([1.0, -2.0], [[1.1, 0.3], [0.3, 0.8]])
    g = single(s)
    assert grid_purity(g) == pytest.approx(purity(s), abs=1e-10)
    assert grid_dirichlet(g) == pytest.approx(dirichlet_form(s), abs=1e-10)


def test_evolution_matches_gaussian_path():
    s = GaussianState([0.5, 0.2], [[0.9, 0.1], [0.1, 0.6]])
    a = evolve_grid(single(s), 1.0)
    b = single(evolve_gaussian(s, 1.0))
    assert np.max(np.abs(a.chi - b.chi)) < 1e-10
    assert evolve_grid(a, 0.0) is a


def test_grid_semigroup_law():
    g = coherent_cat_mixture()
    a = evolve_grid(evolve_grid(g, 0.3), 0.9)
    b = evolve_grid(g, 1.2)
    assert np.max(np.abs(a.chi - b.chi)) < 1e-12
    assert a.t == pytest.approx(1.2)


def test_purity_rate_on_grid():
    g = coherent_cat_mixture()
    d = 1e-4
    for t in (0.25, 1.0, 4.0):
        rate = (grid_purity(evolve_grid(g, t + d)) - grid_purity(evolve_grid(g, t - d))) / (2 * d)
        assert rate == pytest.approx(-2 * grid_dirichlet(evolve_grid(g, t)), rel=1e-5)


def test_resampled_reproduces_state():
    g = evolve_grid(coherent_cat_mixture(), 0.7)
    r = g.resampled(512)
    assert r.m == 512 and r.t == pytest.approx(0.7)
    assert grid_purity(r, check=False) == pytest.approx(grid_purity(g, check=False), abs=1e-12)


def test_unconverged_quadrature_detected():
    # a sharp peak on a coarse grid changes when m is doubled
    g = from_gaussian_mixture([(1.0, GaussianState([0, 0], 0.5 * np.eye(2)))], extent=12.0, m=16)
    with pytest.raises(QuadratureUnconverged):
        grid_purity(evolve_grid(g, 0.0))


def test_mixture_errors():
    v = GaussianState.vacuum()
    with pytest.raises(BadWeights):
        from_gaussian_mixture([(0.4, v), (0.4, v)])
    with pytest.raises(BadWeights):
        from_gaussian_mixture([(1.5, v), (-0.5, v)])
    with pytest.raises(BadWeights):
        from_gaussian_mixture([])
    with pytest.raises(DimensionMismatch):
        from_gaussian_mixture([(1.0, GaussianState.vacuum(2))])
    with pytest.raises(DimensionMismatch):
        from_gaussian_mixture([(1.0, v)], m=100)
    with pytest.raises(GridTooSmall):
        from_gaussian_mixture([(1.0, GaussianState.thermal(0.6))], extent=3.0)


def test_wigner_vacuum():
    w = wigner_samples(single(GaussianState.vacuum()))
    assert w.minimum >= -1e-10
    assert w.integral == pytest.approx(2 * math.pi, abs=1e-6)
    mid = len(w.axis) // 2
    assert w.axis[mid] == 0.0
    # W(u) = (2pi)^-1 * 4 pi exp(-|u|^2) for the vacuum
    assert w.values[mid, mid] == pytest.approx(2.0, abs=1e-10)
    u = w.axis
    ref = 2.0 * np.exp(-(u[:, None] ** 2 + u[None, :] ** 2))
    assert np.max(np.abs(w.values - ref)) < 1e-10


def test_wigner_cat_mixture_positive_and_smoothing():
    g = coherent_cat_mixture()
    w0 = wigner_samples(g)
    w2 = wigner_samples(evolve_grid(g, 2.0))
    assert w0.positive and w0.minimum >= -1e-8 * w0.values.max()
    assert w2.minimum >= w0.minimum
    assert w0.integral == pytest.approx(2 * math.pi, abs=1e-6)


def test_sample_gaussian_chi_shape():
    ax = np.linspace(-1, 1, 8)
    assert sample_gaussian_chi(GaussianState.vacuum(), ax).shape == (8, 8)


def test_csv_exports(tmp_path):
    g = coherent_cat_mixture(m=64)
    p = write_chi_csv(g, tmp_path / "chi.csv", {"seed": 1})
    lines = p.read_text().splitlines()
    head = json.loads(lines[0][2:])
    assert head["m"] == 64 and head["extent"] == 12.0 and head["seed"] == 1
    assert len(head["provenance"]["components"]) == 2
    rows = [l.split(",") for l in lines[2:] if l]
    assert len(rows) == 64 * 64
    origin = [r for r in rows if float(r[0]) == 0.0 and float(r[1]) == 0.0]
    assert float(origin[0][2]) == 1.0 and float(origin[0][3]) == 0.0
    p = write_wigner_csv(g, tmp_path / "w.csv")
    head = json.loads(p.read_text().splitlines()[0][2:])
    assert head["positive"] is True
    assert head["wigner_integral"] == pytest.approx(2 * math.pi, abs=1e-6)
