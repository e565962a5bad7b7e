import math

import numpy as np
import pytest

from conftest import rho_random
from qslkit import (
    S0Descriptor,
    Spectrum,
    UndefinedAngleError,
    ValidationError,
    bloch_from_density,
    density_from_bloch,
    first_hit_time,
    pi_reach_report,
    random_s0,
    s_residual,
    sample_s0,
    two_level_hit_time,
    unitary_evolve,
)

H2 = Spectrum(np.array([
    1.0,
    2.0 * math.sqrt(7.0),
    6.0 * math.sqrt(2.0),
    6.0 * math.sqrt(3.0),
    6.0 * math.sqrt(5.0),
]))


def test_s0_density_structure():
    desc = S0Descriptor(3, 2, 0, 1.0 / 3.0)
    rho = desc.density()
    np.testing.assert_allclose(np.diag(rho).real, [1 / 3] * 3, atol=1e-15)
    assert abs(rho[0, 2] - 1.0 / 3.0) <= 1e-15
    vals = np.sort(np.linalg.eigvalsh(rho))
    np.testing.assert_allclose(vals, [0.0, 1 / 3, 2 / 3], atol=1e-12)


def test_sample_s0_round_trips_the_descriptor():
    desc = S0Descriptor(4, 3, 1, 0.2, phase=1.3)
    st = sample_s0(desc)
    rho = density_from_bloch(st)
    assert abs(rho[1, 3] - 0.2 * np.exp(-1.3j)) <= 1e-12
    np.testing.assert_allclose(np.diag(rho).real, [0.25] * 4, atol=1e-13)


def test_s0_descriptor_validation():
    with pytest.raises(ValidationError):
        S0Descriptor(3, 1, 0, 0.5)  # m > 1/N
    with pytest.raises(ValidationError):
        S0Descriptor(3, 1, 0, 0.0)
    with pytest.raises(ValidationError):
        S0Descriptor(3, 0, 0, 0.1)
    with pytest.raises(ValidationError):
        S0Descriptor(3, 2, 2, 0.1)


def test_s0_phase_wraps():
    desc = S0Descriptor(3, 1, 0, 0.2, phase=2.0 * math.pi + 0.3)
    assert abs(desc.phase - 0.3) <= 1e-12


def test_random_s0_is_seeded_and_physical():
    a = random_s0(np.random.default_rng(9), 5)
    b = random_s0(np.random.default_rng(9), 5)
    assert a == b
    assert 0.0 < a.m <= 0.2
    st = sample_s0(a)
    assert st.dim == 5


def test_s_residual_sign_change_at_the_hit():
    sp = Spectrum(np.array([0.0, 1.0, 3.0]))
    st = sample_s0(S0Descriptor(3, 1, 0, 0.25))
    theta = math.pi / 2
    t_hit = first_hit_time(st, sp, theta)
    assert abs(s_residual(st, sp, theta, t_hit)) <= 1e-7
    assert s_residual(st, sp, theta, 0.5 * t_hit) < 0.0
    assert s_residual(st, sp, theta, 0.0) < 0.0


def test_s_residual_zero_norm_raises():
    sp = Spectrum(np.array([0.0, 1.0, 3.0]))
    with pytest.raises(UndefinedAngleError):
        s_residual(np.zeros(8), sp, math.pi, 1.0)


def test_pi_reach_report_odd_ratio_spectrum():
    rep = pi_reach_report(H2)
    assert rep.s_equals_s0
    assert rep.compatible_gap_groups == []
    assert math.isclose(rep.min_reach_time, math.pi / H2.width,
                        rel_tol=1e-15)


def test_pi_reach_report_compatible_gaps():
    rep = pi_reach_report(Spectrum(np.array([0.0, 1.0, 3.0])))
    assert not rep.s_equals_s0
    assert [(1, 0), (2, 0)] in rep.compatible_gap_groups
    assert not rep.symmetric


def test_pi_reach_report_equal_spacing_mirror():
    rep = pi_reach_report(Spectrum(np.array([0.0, 1.0, 2.0])))
    assert not rep.s_equals_s0
    assert rep.symmetric
    assert [(1, 0), (2, 1)] in rep.compatible_gap_groups
    assert ((1, 0), (2, 1)) in rep.mirrored_families


def test_generic_states_never_reach_pi_on_odd_ratio_spectrum():
    rng = np.random.default_rng(10)
    for _ in range(200):
        st = bloch_from_density(rho_random(rng, 5))
        assert first_hit_time(st, H2, math.pi) is None


def test_s0_states_do_reach_pi_on_odd_ratio_spectrum():
    st = sample_s0(S0Descriptor(5, 3, 1, 0.1))
    t = first_hit_time(st, H2, math.pi)
    gap = H2.energies[3] - H2.energies[1]
    assert t is not None
    assert abs(t - math.pi / gap) <= 1e-8


def test_two_level_hit_time_frozen_value():
    t = two_level_hit_time(math.pi / 3, 0.4, math.pi / 2, 0.0, 1.0)
    assert abs(t - 1.9106332362490185) <= 1e-14
    # eta never enters
    assert t == two_level_hit_time(math.pi / 3, 1.0, math.pi / 2, 0.0, 1.0)
    # gap rescales linearly
    t2 = two_level_hit_time(math.pi / 3, 0.4, math.pi / 2, 1.0, 3.0)
    assert abs(t2 - t / 2.0) <= 1e-14


def test_two_level_hit_time_band_and_validation():
    assert two_level_hit_time(0.1, 1.0, math.pi / 2, 0.0, 1.0) is None
    assert two_level_hit_time(3.1, 1.0, math.pi / 2, 0.0, 1.0) is None
    with pytest.raises(ValidationError):
        two_level_hit_time(1.0, 1.5, math.pi / 2, 0.0, 1.0)
    with pytest.raises(ValidationError):
        two_level_hit_time(1.0, 1.0, math.pi / 2, 1.0, 1.0)
    with pytest.raises(ValidationError):
        two_level_hit_time(1.0, 1.0, 0.0, 0.0, 1.0)


def test_angle_identity_behind_the_residual():
    # the residual is the reach equation: zero exactly when the evolved
    # angle equals theta
    sp = Spectrum(np.array([0.0, 0.9, 2.3]))
    rng = np.random.default_rng(11)
    st = bloch_from_density(rho_random(rng, 3))
    t = 0.8
    traj = unitary_evolve(st, sp, np.array([0.0, t]), keep_states=False)
    theta_t = traj.angles[-1]
    assert abs(s_residual(st, sp, theta_t, t)) <= 1e-9
