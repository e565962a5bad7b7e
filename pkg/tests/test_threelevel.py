import math

import numpy as np
import pytest

from qslkit import (
    DomainError,
    Spectrum,
    ValidationError,
    XYPoint,
    bd_validity,
    energy_stats,
    h_min,
    h_pair,
    hit_time_els3,
    regime_membership,
    sample_state_xy,
    tau_bd,
    tau_circle_max,
    xy_of_state,
)

SP = Spectrum(np.array([0.0, 1.0, 2.0]))

# (x, y, norm2, theta) -> first hit time at unit gap, frozen from a
# dense trajectory scan plus bisection
HIT_TABLE = [
    (0.16, 0.05, 0.25, math.pi / 2, 1.0012965761794148),
    (0.02, 0.20, 0.25, math.pi / 2, 1.6213280863933615),
    (0.00, 0.20, 0.25, math.pi / 2, 1.8234765819369754),
    (0.20, 0.05, 0.25, 2.5, 1.576803086474516),
    (0.04, 0.16, 0.25, 1.0, 0.9259494025178938),
    (0.25, 0.00, 0.25, math.pi / 2, math.pi / 4),
]

# (x, y, norm2, theta) -> max Bhatia-Davis time over the diagonal circle,
# frozen from a brute scan of (r2, r7). The two corner-branch entries
# carry the scan's ~2e-7 grid bias (the optimum sits on the positivity
# corner, where a linear scan undershoots), so they get a looser gate.
CIRCLE_TABLE = [
    (0.1, 0.1, 0.6, math.pi / 2, 1.137907709289, 1e-6),
    (0.1, 0.2, 0.5, math.pi / 2, 0.917147461427, 1e-9),
    (0.2, 0.2, 0.8, 2.0, 1.448829093725, 1e-6),
    (0.4, 0.6, 1.0, math.pi, math.pi / 2, 1e-9),
]


def test_xy_point_validation_and_clamps():
    with pytest.raises(ValidationError):
        XYPoint(-1e-3, 0.1, 0.5)
    with pytest.raises(ValidationError):
        XYPoint(0.1, 0.1, 0.0)
    with pytest.raises(ValidationError):
        XYPoint(0.4, 0.3, 0.5)  # x + y > norm2
    p = XYPoint(-1e-13, -1e-13, 0.5)
    assert p.x == 0.0 and p.y == 0.0
    assert p.residual2 == 0.5
    q = XYPoint(0.3, 0.2, 0.5)
    assert q.residual2 == 0.0


def test_xy_of_state_inverts_sampling():
    rng = np.random.default_rng(5)
    p = XYPoint(0.1, 0.3, 0.55)
    st = sample_state_xy(rng, p)
    q = xy_of_state(st)
    assert abs(q.x - p.x) <= 1e-12
    assert abs(q.y - p.y) <= 1e-12
    assert q.norm2 <= p.norm2 + 1e-12
    on = xy_of_state(sample_state_xy(rng, p, on_circle=True))
    assert abs(on.norm2 - p.norm2) <= 1e-12


def test_xy_of_state_rejects_other_dims():
    from qslkit import BlochState

    with pytest.raises(ValidationError):
        xy_of_state(BlochState(2, np.array([0.0, 0.0, 0.5])))


def test_sampling_exhausts_on_infeasible_weights():
    # residual2 = 0 forces uniform populations, and every pure state with
    # uniform populations sits at (1/3, 2/3); this point has no states
    rng = np.random.default_rng(0)
    with pytest.raises(ValidationError):
        sample_state_xy(rng, XYPoint(0.75, 0.25, 1.0), max_tries=300)


def test_hit_times_match_frozen_scan():
    for x, y, n2, theta, want in HIT_TABLE:
        t = hit_time_els3(XYPoint(x, y, n2), theta, 1.0)
        assert t == pytest.approx(want, abs=1e-12), (x, y, theta)


def test_hit_time_scales_with_the_gap():
    p = XYPoint(0.16, 0.05, 0.25)
    t1 = hit_time_els3(p, 1.3, 1.0)
    t2 = hit_time_els3(p, 1.3, 2.5)
    assert abs(t2 - t1 / 2.5) <= 1e-15


def test_hit_time_none_outside_the_reachable_set():
    # pure-y point that cannot climb to theta: u < -1
    assert hit_time_els3(XYPoint(0.0, 0.1, 0.25), math.pi, 1.0) is None
    # x-dominant point short of the target
    assert hit_time_els3(XYPoint(0.01, 0.0, 0.25), math.pi, 1.0) is None
    assert hit_time_els3(XYPoint(0.0, 0.0, 0.25), 1.0, 1.0) is None


def test_hit_time_is_strictly_positive_in_region():
    # the larger quadratic root stays below 1 whenever theta > 0
    rng = np.random.default_rng(12)
    found = 0
    for _ in range(500):
        n2 = rng.uniform(0.05, 1.0)
        x = rng.uniform(0.0, n2)
        y = rng.uniform(0.0, n2 - x)
        theta = rng.uniform(0.05, math.pi)
        t = hit_time_els3(XYPoint(x, y, n2), theta, 1.0)
        if t is not None:
            found += 1
            assert t > 0.0
    assert found > 100


def test_hit_time_validation():
    p = XYPoint(0.1, 0.1, 0.5)
    with pytest.raises(DomainError):
        hit_time_els3(p, 0.0, 1.0)
    with pytest.raises(DomainError):
        hit_time_els3(p, 3.3, 1.0)
    with pytest.raises(ValidationError):
        hit_time_els3(p, 1.0, 0.0)


def test_circle_max_matches_frozen_scans():
    for x, y, n2, theta, want, gate in CIRCLE_TABLE:
        got = tau_circle_max(XYPoint(x, y, n2), theta, 1.0)
        assert got == pytest.approx(want, abs=gate), (x, y, n2, theta)


def test_circle_max_gap_invariance():
    p = XYPoint(0.1, 0.2, 0.5)
    assert abs(
        tau_circle_max(p, 1.1, 3.0) - tau_circle_max(p, 1.1, 1.0) / 3.0
    ) <= 1e-15


def test_circle_max_branch_continuity():
    # residual2 lands exactly on float(1/3): the tangent expression is
    # used, and the corner expression evaluated at the same budget must
    # agree to machine precision
    for theta in (0.7, math.pi / 2, 2.9):
        p = XYPoint(0.0, 0.0, 1.0 / 3.0)
        c = p.residual2
        got = tau_circle_max(p, theta, 1.0)
        s = 0.5 + math.sqrt((c - 0.25) / 3.0)
        corner = theta / (2.0 * math.sqrt(1.0 - s * s))
        shared = 3.0 * theta / (2.0 * math.sqrt(5.0))
        assert abs(got - corner) <= 1e-12
        assert abs(got - shared) <= 1e-12


def test_circle_max_infinite_on_the_unit_circle():
    # a unit-length point with everything in the diagonal budget reaches
    # the pure-state bound, where the worst completion never moves
    assert tau_circle_max(XYPoint(0.0, 0.0, 1.0), 1.0, 1.0) == math.inf


def test_circle_max_validation():
    with pytest.raises(ValidationError):
        tau_circle_max(XYPoint(0.1, 0.1, 1.5), 1.0, 1.0)
    with pytest.raises(ValidationError):
        tau_circle_max(XYPoint(0.1, 0.1, 0.5), 1.0, -1.0)
    with pytest.raises(DomainError):
        tau_circle_max(XYPoint(0.1, 0.1, 0.5), 0.0, 1.0)


def test_worst_case_time_is_capped_at_half_pi():
    # over the whole family of worst in-region points (x = sin^2(theta/2)
    # on the unit sphere) the product gap * tau never exceeds pi/2, with
    # equality reached at theta = pi
    thetas = np.linspace(0.05, math.pi, 400)
    best = 0.0
    for theta in thetas:
        p = XYPoint(math.sin(0.5 * theta) ** 2, 0.0, 1.0)
        tau = tau_circle_max(p, theta, 1.0)
        assert tau <= math.pi / 2 + 1e-12
        best = max(best, tau)
    assert best >= math.pi / 2 - 1e-3
    at_pi = tau_circle_max(XYPoint(1.0, 0.0, 1.0), math.pi, 1.0)
    assert abs(at_pi - math.pi / 2) <= 1e-14


def test_worst_case_time_closed_forms():
    # the same family in closed form: a tangent expression for
    # cos^2(theta/2) <= 1/3 and a corner expression below the critical
    # angle 2 arccos(1/sqrt(3))
    theta_c = 2.0 * math.acos(1.0 / math.sqrt(3.0))
    for theta in np.linspace(0.2, math.pi, 171):
        p = XYPoint(math.sin(0.5 * theta) ** 2, 0.0, 1.0)
        tau = tau_circle_max(p, theta, 1.0)
        if theta >= theta_c:
            ref = math.sqrt(3.0) * theta / (
                2.0 * math.sqrt(1.0 - 2.0 * math.cos(theta))
            )
        else:
            s = 0.5 * (1.0 + math.sqrt((1.0 + 2.0 * math.cos(theta)) / 3.0))
            ref = theta / (2.0 * math.sqrt(1.0 - s * s))
        assert abs(tau - ref) <= 1e-12, theta


def test_regime_membership_labels():
    none = regime_membership(XYPoint(0.0, 0.0, 0.3), math.pi / 2)
    assert not none.in_S and none.region == "none" and not none.bd_valid
    a = regime_membership(XYPoint(0.15, 0.3, 0.5), math.pi / 2)
    assert a.in_S and a.region == "A"
    b = regime_membership(XYPoint(0.01, 0.3, 0.5), math.pi / 2)
    assert b.in_S and b.region == "B"
    assert b.bd_valid
    out = regime_membership(XYPoint(0.001, 0.001, 0.5), math.pi)
    assert not out.in_S and out.region == "none"


def test_known_violating_point():
    # in-region point whose actual hit undercuts the worst-case
    # Bhatia-Davis time; the validity test must flag it
    p = XYPoint(0.75, 0.0, 1.0)
    theta = math.pi / 3
    verdict = regime_membership(p, theta)
    assert verdict.in_S
    assert not verdict.bd_valid
    t = hit_time_els3(p, theta, 1.0)
    tau_m = tau_circle_max(p, theta, 1.0)
    assert t is not None
    assert t < tau_m - 1e-12
    assert abs(t - math.acos(math.sqrt(2.0 / 3.0))) <= 1e-15
    assert abs(tau_m - theta / (2.0 * math.sqrt(2.0 / 3.0))) <= 1e-15


def test_valid_points_bound_every_completion():
    # whenever the validity test passes, the actual hit time dominates
    # the Bhatia-Davis time of every state carrying those weights
    rng = np.random.default_rng(21)
    checked = 0
    for _ in range(20000):
        if checked >= 400:
            break
        n2 = rng.uniform(0.1, 1.0)
        x = rng.uniform(0.0, n2)
        y = rng.uniform(0.0, n2 - x)
        theta = rng.uniform(0.2, math.pi)
        p = XYPoint(x, y, n2)
        if not regime_membership(p, theta).bd_valid:
            continue
        t = hit_time_els3(p, theta, 1.0)
        assert t is not None
        try:
            # not every coherence point admits a state on the residual
            # circle; those draws prove nothing either way
            st = sample_state_xy(rng, p, on_circle=True)
        except ValidationError:
            continue
        bd = tau_bd(energy_stats(st, SP), theta)
        assert t >= bd - 1e-9, (x, y, n2, theta)
        assert tau_circle_max(p, theta, 1.0) >= bd - 1e-9
        checked += 1
    assert checked >= 400


def test_bd_validity_direct_calls():
    assert bd_validity(XYPoint(0.01, 0.3, 0.5), math.pi / 2, 1.0)
    assert not bd_validity(XYPoint(0.75, 0.0, 1.0), math.pi / 3, 1.0)
    # gap-free: the load comparison scales out of the worst-case phase
    assert bd_validity(XYPoint(0.15, 0.3, 0.5), math.pi / 2, 1.0) == \
        bd_validity(XYPoint(0.15, 0.3, 0.5), math.pi / 2, 7.0)


def test_h_pair_values_and_continuity():
    h1, h2 = h_pair(0.0, 1.0)
    assert abs(h1 - (math.cos(0.5) + 1.0 - math.cos(1.0))) <= 1e-15
    assert math.isnan(h2)
    for theta in (0.6, 1.0, 2.4):
        a = h_pair(1.0 / 3.0, theta)
        assert abs(a[0] - a[1]) <= 1e-12
    h1_hi, h2_hi = h_pair(0.8, 1.0)
    assert math.isnan(h1_hi) and math.isnan(h2_hi)


def test_h_min_frozen_values():
    r1 = h_min(1.0)
    assert abs(r1.h1_min - 1.337280256022) <= 1e-9
    assert r1.h1_argmin <= 1e-6
    assert abs(r1.h2_min - 1.472858490650) <= 1e-9
    assert abs(r1.h2_argmin - 1.0 / 3.0) <= 1e-6
    rpi = h_min(math.pi)
    assert abs(rpi.h1_min - 2.0) <= 1e-9
    assert abs(rpi.h2_min - 2.488741851340) <= 1e-9
    assert rpi.min_value == min(rpi.h1_min, rpi.h2_min)


def test_h_min_small_angle_floor():
    theta = 1e-3
    r = h_min(theta)
    want = 1.0 + 3.0 * theta * theta / 8.0
    assert abs(r.min_value - want) <= 1e-10
    assert r.min_value >= 1.0


def test_h_min_stays_above_one():
    for theta in np.linspace(0.05, math.pi, 50):
        assert h_min(theta).min_value >= 1.0 - 1e-9
