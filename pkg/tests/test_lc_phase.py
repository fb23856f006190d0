import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ris_wideband.lc_phase import (DispersionError, PhaseProfile, beta_factor,
                                   entrywise_power, max_phase_range,
                                   phase_to_voltage, phase_vector,
                                   phases_at_frequency, profile_from_complex,
                                   rank_one_power, reflection_coefficients,
                                   validate_band)
from ris_wideband.scenario import LcMaterial


def _profile(om, beta=2.4, fc=60e9):
    return PhaseProfile(omega_c=np.asarray(om, float), beta=beta, f_c=fc)


def test_beta_factor_center():
    assert beta_factor(60e9, 60e9, 2.4) == 1.0


def test_beta_factor_band_edges():
    assert math.isclose(beta_factor(64e9, 60e9, 2.4), 1.16, rel_tol=1e-12)
    assert math.isclose(beta_factor(56e9, 60e9, 2.4), 0.84, rel_tol=1e-12)


def test_validate_band_rejects_negative_beta_k():
    with pytest.raises(DispersionError, match="invalid for bandwidth"):
        validate_band(30e9, 90e9, 60e9, 2.4)  # beta_k at 30 GHz = -0.2


def test_phases_identity_at_center():
    p = _profile([0.3, 1.2, 5.9])
    assert np.allclose(phases_at_frequency(p, 60e9), p.omega_c)


def test_zero_profile_flat():
    p = _profile(np.zeros(5))
    for f in (56e9, 60e9, 64e9):
        assert np.allclose(phases_at_frequency(p, f), 0.0)


def test_phase_scaling_value():
    p = _profile([math.pi])
    assert np.allclose(phases_at_frequency(p, 64e9), [1.16 * math.pi])


def test_reflection_all_ones():
    p = _profile(np.zeros(4))
    assert np.allclose(reflection_coefficients(p, 62e9), np.ones(4))


def test_reflection_modulus(rng):
    p = _profile(rng.uniform(0, 2 * math.pi, 12))
    for amp in (1.0, 0.8):
        assert np.allclose(np.abs(reflection_coefficients(p, 63e9, amp)), amp)


def test_reflection_per_element_oracle(rng):
    p = _profile(rng.uniform(0, 2 * math.pi, 6))
    f = 57.5e9
    bk = beta_factor(f, p.f_c, p.beta)
    got = reflection_coefficients(p, f)
    for n in range(6):
        assert abs(got[n] - np.exp(1j * bk * p.omega_c[n])) < 1e-12


def test_profile_rejects_out_of_range():
    with pytest.raises(ValueError):
        _profile([0.1, 2 * math.pi])
    with pytest.raises(ValueError):
        _profile([-0.1])


@given(st.floats(min_value=1e-9, max_value=2 * math.pi, exclude_max=True),
       st.floats(min_value=56e9, max_value=64e9))
@settings(max_examples=60)
def test_positive_beta_monotone_in_f(om, f):
    p = _profile([om])
    lo = phases_at_frequency(p, f)[0]
    hi = phases_at_frequency(p, f + 1e8)[0]
    assert hi > lo


def test_flat_limit_beta_zero(rng):
    p = _profile(rng.uniform(0, 2 * math.pi, 8), beta=0.0)
    for f in (55e9, 60e9, 65e9):
        assert np.allclose(phases_at_frequency(p, f), p.omega_c)


def test_center_reflection_mod_2pi_only():
    a = _profile([1.0])
    g1 = reflection_coefficients(a, 60e9)
    # same phase mod 2 pi at the center frequency
    b = profile_from_complex(np.exp(1j * np.array([1.0 + 2 * math.pi])), 2.4, 60e9)
    assert np.allclose(reflection_coefficients(b, 60e9), g1, atol=1e-12)


# --- material model ---------------------------------------------------------

def _material(length=None):
    eps_par, eps_perp = 3.2, 2.4
    dn = math.sqrt(eps_par) - math.sqrt(eps_perp)
    if length is None:
        # choose l so the tuning range at f_c is exactly 2*pi
        length = 299792458.0 / (dn * 60e9)
    return LcMaterial(eps_parallel=eps_par, eps_perp=eps_perp, length_m=length,
                      voltage_v=(0.0, 2.0, 4.0, 8.0),
                      phase_rad=(0.0, 2.0, 4.5, 2 * math.pi))


def test_zero_birefringence_zero_range():
    m = LcMaterial(eps_parallel=2.5, eps_perp=2.5, length_m=0.01,
                   voltage_v=(0.0, 1.0), phase_rad=(0.0, 6.28))
    assert max_phase_range(m, 60e9, 60e9, 2.4) == 0.0


def test_range_normalization_matches_beta_factor():
    m = _material()
    assert math.isclose(max_phase_range(m, 60e9, 60e9, 2.4), 2 * math.pi, rel_tol=1e-12)
    ratio = max_phase_range(m, 64e9, 60e9, 2.4) / (2 * math.pi)
    assert math.isclose(ratio, 1.16, rel_tol=1e-12)


def test_range_affine_in_frequency():
    m = _material(length=0.004)
    f = np.array([56e9, 60e9, 64e9])
    v = np.array([max_phase_range(m, fi, 60e9, 2.4) for fi in f])
    assert math.isclose(v[1], (v[0] + v[2]) / 2, rel_tol=1e-12)


def test_voltage_inversion_monotone():
    m = _material()
    om = np.array([0.0, 1.0, 3.0, 6.0])
    v = phase_to_voltage(m, om)
    assert np.all(np.diff(v) > 0)
    assert np.allclose(phase_to_voltage(m, [2.0]), [2.0])  # exact at a knot


# --- Hadamard powers --------------------------------------------------------

def test_entrywise_power_identity():
    z = np.exp(1j * np.array([[0.0, 0.4], [-0.4, 0.0]]))
    assert np.allclose(entrywise_power(z, 1.0), z)


def test_entrywise_power_scalar_oracle(rng):
    th = rng.uniform(-math.pi, math.pi, (3, 3))
    z = 1.3 * np.exp(1j * th)
    p = 0.84
    got = entrywise_power(z, p)
    assert np.allclose(got, 1.3 ** p * np.exp(1j * p * th))


def test_entrywise_power_degenerate_reference():
    z = np.array([[1.0, 0.0], [0.0, 1.0]], complex)
    with pytest.raises(ValueError, match="degenerate"):
        entrywise_power(z, 0.16)


def test_principal_branch_not_rank_preserving():
    # the documented counterexample: wide phase spreads break entrywise powers
    s = np.exp(1j * np.array([0.0, 2.0, 4.0]))
    S = np.outer(s, s.conj())
    M = entrywise_power(S, 1.16)
    w = np.linalg.eigvalsh(M @ M.conj().T)
    assert w[-2] > 1e-6  # second singular value clearly nonzero


def test_rank_one_power_preserves_structure(rng):
    # factor-route power: rank/PSD/diagonal preserved exactly (Lemma-2 semantics)
    for _ in range(25):
        om = rng.uniform(0, 2 * math.pi, 10)
        S = np.outer(np.exp(1j * om), np.exp(-1j * om))
        for bk in (0.84, 1.0, 1.16, 2.4):
            P = rank_one_power(S, bk)
            w = np.linalg.eigvalsh(P)
            assert w[-2] < 1e-9          # rank one
            assert w[0] > -1e-12         # PSD
            assert np.allclose(np.diag(P), 1.0, atol=1e-12)


def test_rank_one_power_matches_vector_route(rng):
    om = rng.uniform(0, 2 * math.pi, 6)
    s = np.exp(1j * om)
    bk = 1.16
    direct = np.outer(np.exp(1j * bk * om), np.exp(-1j * bk * om))
    via_vec = rank_one_power(s, bk)
    assert np.allclose(via_vec, direct, atol=1e-12)
