import numpy as np
import pytest

from kickedtop.dynamics import build_floquet, evolve
from kickedtop.errors import ValidationError
from kickedtop.measures import (ge_extent_identity_residual, ge_record,
                                haar_baseline, haar_random_state,
                                invariant_uncertainty, meyer_wallach_crosscheck,
                                purity_so2, purity_su2, extent, rmt_average_ge)
from kickedtop.spin import GcsParams, build_gcs, build_spin_system
from conftest import random_state


def basis_state(s, m):
    psi = np.zeros(s.N, dtype=complex)
    psi[round(s.J - m)] = 1.0
    return psi


def test_purity_su2_of_coherent_states(sys50):
    for theta, phi in [(0.3, 1.0), (1.5, -2.2), (2.9, 0.0)]:
        psi = build_gcs(sys50, GcsParams(theta, phi))
        assert purity_su2(sys50, psi) == pytest.approx(1.0, abs=1e-8)


def test_purity_su2_vanishing_cases():
    s = build_spin_system(4)
    assert purity_su2(s, basis_state(s, 0)) < 1e-12
    s1 = build_spin_system(1)
    cat = (basis_state(s1, 1) + basis_state(s1, -1)) / np.sqrt(2)
    assert purity_su2(s1, cat) < 1e-12


def test_purity_so2(sys50):
    assert purity_so2(sys50, basis_state(sys50, 50)) == pytest.approx(1.0)
    assert purity_so2(sys50, basis_state(sys50, 0)) == 0.0
    for theta in (0.4, 1.3, 2.6):
        psi = build_gcs(sys50, GcsParams(theta, 0.5))
        assert purity_so2(sys50, psi) == pytest.approx(np.cos(theta) ** 2, abs=1e-8)


@pytest.mark.parametrize("J", [1, 2.5, 5, 10])
def test_extent_of_coherent_state(J):
    # brute-force oracle: moments summed directly over amplitudes of Jz
    s = build_spin_system(J)
    for theta in (0.0, 0.7, np.pi / 2, 2.5):
        psi = build_gcs(s, GcsParams(theta, -1.0))
        probs = np.abs(psi) ** 2
        var_oracle = probs @ s.m ** 2 - (probs @ s.m) ** 2
        assert extent(s, s.Jz, psi) == pytest.approx(np.sqrt(var_oracle), abs=1e-10)
        assert extent(s, s.Jz, psi) == pytest.approx(
            np.sqrt(J / 2) * abs(np.sin(theta)), abs=1e-8 * np.sqrt(J))


def test_extent_of_eigenstate_is_zero(sys50):
    assert extent(sys50, sys50.Jz, basis_state(sys50, 13)) == 0.0


def test_invariant_uncertainty(sys50):
    J = sys50.J
    psi = build_gcs(sys50, GcsParams(1.0, 2.0))
    assert invariant_uncertainty(sys50, psi) == pytest.approx(J, abs=1e-8 * J)
    mid = basis_state(sys50, 0)
    assert invariant_uncertainty(sys50, mid) == pytest.approx(J * (J + 1))
    for seed in range(3):
        psi = haar_random_state(sys50.N, seed)
        lhs = invariant_uncertainty(sys50, psi)
        rhs = J * (J + 1) - J ** 2 * purity_su2(sys50, psi)
        assert lhs == pytest.approx(rhs, abs=1e-8 * J ** 2)


def test_ge_extent_identity_everywhere(sys50, sys500):
    assert ge_extent_identity_residual(
        sys50, build_gcs(sys50, GcsParams(0.9, 0.1))) < 1e-10
    assert ge_extent_identity_residual(
        sys500, haar_random_state(sys500.N, 42)) < 1e-10
    U = build_floquet(sys50, 12.0)
    evolved = evolve(U, build_gcs(sys50, GcsParams(2.0, -1.0)), 100)
    assert ge_extent_identity_residual(sys50, evolved) < 1e-10


def test_ge_record_consistency(sys50):
    rec = ge_record(sys50, haar_random_state(sys50.N, 5))
    assert rec.ge_su2 == 1.0 - rec.p_su2
    assert rec.ge_so2 == 1.0 - rec.p_so2
    assert rec.p_so2 <= rec.p_su2 + 1e-12
    J = sys50.J
    sum_rule = rec.ext_x ** 2 + rec.ext_y ** 2 + rec.ext_z ** 2 \
        + J ** 2 * rec.p_su2
    assert sum_rule == pytest.approx(J * (J + 1), abs=1e-8 * J ** 2)


def test_rmt_average_ge_values():
    assert rmt_average_ge(500) == pytest.approx(0.999)
    assert rmt_average_ge(0.5) == 0.0
    assert rmt_average_ge(50) == pytest.approx(0.99)
    with pytest.raises(ValidationError):
        rmt_average_ge(0)


def test_haar_sampler_basics():
    one = haar_random_state(1, 9)
    assert abs(one[0]) == pytest.approx(1.0)
    a = haar_random_state(33, 1234)
    b = haar_random_state(33, 1234)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, haar_random_state(33, 1235))


def test_haar_mean_ge_matches_rmt():
    s = build_spin_system(10)
    base = haar_baseline(s, 200, seed=7)
    assert abs(base.sample_mean - base.mean_ge) < 3 * base.sample_stderr


@pytest.mark.parametrize("J", [1, 1.5, 2, 3])
def test_meyer_wallach_equivalence(J):
    s = build_spin_system(J)
    psi = build_gcs(s, GcsParams(1.2, -0.6))
    assert meyer_wallach_crosscheck(s, psi) < 1e-8
    for seed in range(5):
        assert meyer_wallach_crosscheck(s, haar_random_state(s.N, seed)) < 1e-8


def test_meyer_wallach_zero_for_coherent_and_matches_basis_state():
    s = build_spin_system(2)
    psi = build_gcs(s, GcsParams(0.8, 0.3))
    # both sides vanish for a product of identical qubits
    assert abs(1.0 - purity_su2(s, psi)) < 1e-8
    assert meyer_wallach_crosscheck(s, psi) < 1e-8
    mid = np.zeros(s.N, dtype=complex)
    mid[2] = 1.0   # |J=2, m=0>
    assert meyer_wallach_crosscheck(s, mid) < 1e-8


def test_meyer_wallach_rejects_large_J():
    s = build_spin_system(6)
    with pytest.raises(ValidationError):
        meyer_wallach_crosscheck(s, haar_random_state(s.N, 0))
