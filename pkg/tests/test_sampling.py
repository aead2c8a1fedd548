import math

import numpy as np
import pytest

from bloore.positivity import minors_nonneg_2x2_real, psd_mask
from bloore.sampling import (
    QmcStream,
    RngStream,
    cad_limits,
    correlation_from_states,
    ginibre_states,
    low_discrepancy_stream,
    sample_correlation_z,
    sample_hs_density,
    sample_spheroidal,
    sample_z_box,
    sample_z_cad,
)
from bloore.statespace import NumberField, ScenarioSpec, SystemSplit

VOLUME = 32 * math.pi**2 / 27


def test_streams_are_reproducible_and_independent():
    a = RngStream(7, 3).uniform(size=5)
    np.testing.assert_array_equal(a, RngStream(7, 3).uniform(size=5))
    assert not np.allclose(a, RngStream(7, 4).uniform(size=5))
    assert not np.allclose(a, RngStream(7, 3).child(0).uniform(size=5))
    with pytest.raises(ValueError):
        RngStream(-1)


def test_sobol_blocks_are_consistent():
    whole = low_discrepancy_stream(3, 0, 64, seed=1)
    np.testing.assert_array_equal(whole[16:48], low_discrepancy_stream(3, 16, 32, seed=1))
    assert whole.min() >= 0 and whole.max() < 1
    q = QmcStream(1)
    assert q.uniform(-1, 1, (8, 2)).shape == (8, 2)


def test_box_shapes():
    spec = ScenarioSpec.from_id("2x2:mixed:[(1,2)c,(1,4)r,(2,3)q]")
    z = sample_z_box(spec, RngStream(0), 1000)
    assert z.shape == (1000, 3, 4)
    assert np.all(z[:, 1, 1:] == 0) and np.all(z[:, 0, 2:] == 0)
    assert np.all(np.abs(z) <= 1)


def test_cad_limits_are_tight():
    z12, z13, z14 = 0.3, -0.5, 0.7
    lim = cad_limits(z12, z13, z14)
    for z23 in (lim.z23[0] + 1e-9, lim.z23[1] - 1e-9):
        m = np.array([[1, z12, z13], [z12, 1, z23], [z13, z23, 1]])
        assert np.linalg.eigvalsh(m)[0] > -1e-8
    m = np.array([[1, z12, z13], [z12, 1, lim.z23[1] + 1e-3], [z13, lim.z23[1] + 1e-3, 1]])
    assert np.linalg.eigvalsh(m)[0] < 0


def test_cad_sampler_volume_and_feasibility():
    z, w = sample_z_cad(RngStream(11), 400_000)
    assert minors_nonneg_2x2_real(z[:2000]).all()
    se = w.std() / math.sqrt(len(w))
    assert abs(w.mean() - VOLUME) < 4 * se


def test_spheroidal_volume_and_feasibility():
    s = sample_spheroidal(RngStream(12), 400_000)
    ok = s.weight > 0
    assert minors_nonneg_2x2_real(s.z[ok][:2000]).all()
    se = s.weight.std() / math.sqrt(len(s.weight))
    assert abs(s.weight.mean() - VOLUME) < 4 * se


def test_box_acceptance_gives_volume():
    spec = ScenarioSpec.full(SystemSplit.TWO_QUBIT, NumberField.REAL)
    z = sample_z_box(spec, RngStream(13), 400_000)[:, :, 0]
    p = minors_nonneg_2x2_real(z).mean()
    assert abs(64 * p - VOLUME) < 4 * 64 * math.sqrt(p * (1 - p) / len(z))


@pytest.mark.parametrize("n,fld", [(4, NumberField.REAL), (6, NumberField.COMPLEX)])
def test_ginibre_states_are_states(n, fld):
    rhos = ginibre_states(n, fld, RngStream(14), 200)
    assert rhos.shape == (200, n, n)
    np.testing.assert_allclose(np.trace(rhos, axis1=1, axis2=2), 1.0)
    np.testing.assert_allclose(rhos, np.conj(np.swapaxes(rhos, 1, 2)), atol=1e-15)
    assert psd_mask(rhos).all()


def test_hs_purity_matches_exact_mean():
    # Mean purity under the flat measure on n x n complex states is 2n/(n^2+1).
    rhos = ginibre_states(4, NumberField.COMPLEX, RngStream(15), 100_000)
    purity = np.einsum("kij,kji->k", rhos, rhos).real
    assert purity.mean() == pytest.approx(8 / 17, abs=4 * purity.std() / math.sqrt(len(purity)))


def test_quaternion_ginibre_is_refused():
    with pytest.raises(ValueError):
        ginibre_states(4, NumberField.QUATERNION, RngStream(0), 1)
    with pytest.raises(ValueError):
        sample_hs_density(5, NumberField.REAL, RngStream(0))


def test_correlation_sampler():
    spec = ScenarioSpec.full(SystemSplit.TWO_QUBIT, NumberField.COMPLEX)
    z = sample_correlation_z(spec, RngStream(16), 1000)
    assert z.shape == (1000, 6, 4) and np.all(z[:, :, 2:] == 0)
    c = correlation_from_states(ginibre_states(4, NumberField.REAL, RngStream(17), 10))
    np.testing.assert_allclose(np.diagonal(c, axis1=1, axis2=2), 1.0)
    with pytest.raises(ValueError):
        sample_correlation_z(ScenarioSpec.from_id("2x2:real:[(1,4)]"), RngStream(0), 1)
