import math

import numpy as np
import pytest
from scipy.linalg import expm

from qdiff import fock
from qdiff.errors import DimensionMismatch, SupportViolation, TailMassTooLarge, ValidationError
from qdiff.functionals import entropy, hs_overlap, purity, relative_entropy
from qdiff.gaussian import GaussianState, conjugate_by_exp_iRj
from qdiff.semigroup import evolve_gaussian


def test_thermal_probabilities():
    assert np.array_equal(fock.thermal_probabilities(0.5, 5), [1, 0, 0, 0, 0])
    assert np.allclose(fock.thermal_probabilities(1.5, 6), 0.5 ** np.arange(1, 7))
    for nu in (0.6, 2.0, 5.0):
        assert fock.thermal_fock(nu).tail_mass < 1e-12


def test_thermal_oracle_values():
    m = fock.thermal_fock(1.5)
    assert fock.spectral_entropy(m) == pytest.approx(2 * math.log(2), abs=1e-12)
    assert fock.spectral_purity(m) == pytest.approx(1 / 3, abs=1e-14)
    assert fock.spectral_relative_entropy(m, m) == pytest.approx(0.0, abs=1e-12)


def test_tail_mass_guard():
    with pytest.raises(TailMassTooLarge):
        fock.thermal_fock(20.0, 50)


def test_coherent_states():
    assert np.allclose(fock.coherent_amplitudes(0.0, 4), [1, 0, 0, 0])
    assert fock.spectral_purity(fock.coherent_fock(1.3 - 0.4j)) == pytest.approx(1.0)
    a, b = 1.0 + 0.5j, -0.3 + 0.2j
    ov = abs(np.vdot(fock.coherent_amplitudes(a, 200), fock.coherent_amplitudes(b, 200))) ** 2
    assert ov == pytest.approx(math.exp(-abs(a - b) ** 2), rel=1e-13)


def test_displacement_column_is_coherent_state():
    alpha = 0.8 - 0.6j
    d = fock.displacement_operator(alpha, 60)
    assert np.allclose(d[:, 0], fock.coherent_amplitudes(alpha, 60), atol=1e-13)


def test_cat_mixture_purity():
    a = fock.coherent_fock(1.0).matrix
    b = fock.coherent_fock(-1.0).matrix
    m = fock.FockDensityMatrix(0.5 * (a + b))
    assert fock.spectral_purity(m) == pytest.approx(0.5 * (1 + math.exp(-4)), abs=1e-14)


def test_mean_convention():
    q_op, p_op = fock.quadratures(200)
    m = fock.from_gaussian(GaussianState([1.0, 0.5], 0.5 * np.eye(2)))
    assert fock.expectation(m, q_op).real == pytest.approx(1.0, abs=1e-12)
    assert fock.expectation(m, p_op).real == pytest.approx(0.5, abs=1e-12)


def test_conjugation_sign_against_matrix_exponential():
    # exp(i theta Q) rho exp(-i theta Q) in the truncated basis
    dim, theta = 120, 0.3
    q_op, p_op = fock.quadratures(dim)
    rho = fock.thermal_fock(1.2, dim).matrix
    u = expm(1j * theta * q_op)
    moved = u @ rho @ u.conj().T
    moved_p = np.trace(moved @ p_op).real
    ref = conjugate_by_exp_iRj(GaussianState.thermal(1.2), 0, theta)
    assert moved_p == pytest.approx(ref.mean[1], abs=1e-9)
    assert ref.mean[1] == pytest.approx(theta)


@pytest.mark.parametrize(
    "state",
    [
        GaussianState.thermal(2.0),
        GaussianState.coherent([1.0, -0.7]),
        GaussianState([0.6, 1.1], 1.7 * np.eye(2)),
    ],
)
def test_closed_forms_match_oracle(state):
    m = fock.from_gaussian(state)
    assert fock.spectral_entropy(m) == pytest.approx(entropy(state), abs=1e-9)
    assert fock.spectral_purity(m) == pytest.approx(purity(state), abs=1e-11)
    # reference tail must dominate so its numerical support covers the state
    ref = GaussianState([-0.2, 0.3], 2.6 * np.eye(2))
    r = fock.from_gaussian(ref)
    assert fock.spectral_overlap(m, r) == pytest.approx(hs_overlap(state, ref), abs=1e-11)
    assert fock.spectral_relative_entropy(m, r) == pytest.approx(relative_entropy(state, ref), abs=1e-9)


def test_oracle_scope():
    with pytest.raises(DimensionMismatch):
        fock.from_gaussian(GaussianState.thermal(1.5, 2))
    with pytest.raises(ValidationError):
        fock.from_gaussian(GaussianState([0, 0], np.diag([2.0, 0.125])))


def test_support_violation():
    with pytest.raises(SupportViolation):
        fock.spectral_relative_entropy(fock.thermal_fock(1.5), fock.coherent_fock(0.0))


def test_dim_mismatch():
    with pytest.raises(DimensionMismatch):
        fock.spectral_overlap(fock.thermal_fock(1.0, 100), fock.thermal_fock(1.0, 120))


def test_oracle_tracks_flow():
    for nu, t in ((0.5, 1.0), (1.5, 0.4), (2.0, 3.0)):
        evolved = fock.thermal_fock(nu + t / 2)
        ref = purity(evolve_gaussian(GaussianState.thermal(nu), t))
        assert fock.spectral_purity(evolved) == pytest.approx(ref, abs=1e-10)
