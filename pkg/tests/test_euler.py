"""Forward and inverse Euler parametrizations, angle records and shift identities."""
import json
import math

import numpy as np
import pytest
from scipy.stats import special_ortho_group, unitary_group

from euler_haar.controllers.euler import (
    SHIFT_KINDS, d_matrix, forward, inverse, shift_identity_residual, shifted_angles, so_inverse, su_inverse,
)
from euler_haar.controllers.verification import interior_angles
from euler_haar.models.angles import (
    EulerAngles, GroupElement, GroupKind, angle_counts, coordinate_layout, group_dimension, parse_angle_list,
    phi_offset,
)
from euler_haar.utils.errors import ParseError


@pytest.mark.parametrize("group", list(GroupKind))
def test_zero_angles_give_identity(group):
    for n in (2, 3, 4):
        np.testing.assert_allclose(forward(EulerAngles.zeros(group, n)).matrix, np.eye(n), atol=1e-15)


def test_su2_closed_form():
    phi, psi, omega = 0.7, 0.4, 1.9
    u = forward(EulerAngles(GroupKind.SU, 2, [phi], [psi], [omega])).matrix
    expected = np.array([
        [np.exp(1j * (phi + omega)) * np.cos(psi), np.exp(1j * (phi - omega)) * np.sin(psi)],
        [-np.exp(-1j * (phi - omega)) * np.sin(psi), np.exp(-1j * (phi + omega)) * np.cos(psi)],
    ])
    np.testing.assert_allclose(u, expected, atol=1e-14)


def test_coordinate_counts():
    assert angle_counts(GroupKind.SU, 4) == {'phi': 6, 'psi': 6, 'omega': 3}
    assert angle_counts('so', 4) == {'phi': 6, 'psi': 0, 'omega': 0}
    for n in range(2, 7):
        assert group_dimension(GroupKind.SU, n) == n * n - 1
        assert group_dimension(GroupKind.SO, n) == n * (n - 1) // 2


def test_coordinate_layout_order_and_ranges():
    layout = coordinate_layout(GroupKind.SU, 3)
    assert [c.name for c in layout] == ['phi1', 'phi2', 'psi1', 'psi2', 'omega2', 'phi3', 'psi3', 'omega1']
    assert layout[0].high == pytest.approx(math.pi) and layout[0].divisor == 2
    assert layout[1].periodic and layout[1].divisor == 1
    assert layout[4].high == pytest.approx(math.pi) and layout[4].divisor == 2 and not layout[4].periodic
    assert layout[-1].periodic and layout[-1].divisor == 1
    so = coordinate_layout(GroupKind.SO, 3)
    assert [c.trig for c in so] == [False, True, False]
    assert phi_offset(4, 4) == 0 and phi_offset(4, 3) == 3 and phi_offset(4, 2) == 5


@pytest.mark.parametrize("group", list(GroupKind))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_forward_lands_in_the_group(group, n, rng):
    g = forward(interior_angles(group, n, rng, 1000))
    assert g.matrix.shape == (1000, n, n)
    assert g.unitarity_error() < 1e-10
    assert g.det_error() < 1e-10
    if group is GroupKind.SO:
        assert g.imaginary_error() == 0


@pytest.mark.slow
@pytest.mark.parametrize("group", list(GroupKind))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_inverse_round_trip(group, n, rng):
    batch = interior_angles(group, n, rng, 1000)
    mats = forward(batch).matrix
    worst = 0.0
    for i in range(1000):
        back = inverse(GroupElement(group, mats[i]))
        worst = max(worst, float(np.max(np.abs(back.flat() - batch.take(i).flat()))))
        assert not back.out_of_range()
    assert worst < 1e-9


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3, 4])
def test_every_haar_matrix_is_reached(n):
    for u in unitary_group.rvs(n, size=1000, random_state=7):
        u = u / np.linalg.det(u) ** (1 / n)
        angles = su_inverse(GroupElement(GroupKind.SU, u))
        assert not angles.out_of_range(atol=1e-9)
        np.testing.assert_allclose(forward(angles).matrix, u, atol=1e-9)
    for r in special_ortho_group.rvs(n, size=1000, random_state=7):
        angles = so_inverse(GroupElement(GroupKind.SO, r))
        np.testing.assert_allclose(forward(angles).matrix, r, atol=1e-9)


@pytest.mark.parametrize("group", list(GroupKind))
def test_inverse_of_identity(group):
    angles = inverse(GroupElement(group, np.eye(3)))
    np.testing.assert_allclose(forward(angles).matrix, np.eye(3), atol=1e-12)


def test_inverse_of_permutation_like_matrix():
    w = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=complex)
    angles = su_inverse(GroupElement(GroupKind.SU, w))
    np.testing.assert_allclose(forward(angles).matrix, w, atol=1e-12)


def test_inverse_rejects_non_members():
    with pytest.raises(ValueError):
        su_inverse(GroupElement(GroupKind.SU, 2 * np.eye(2)))
    with pytest.raises(ValueError):
        su_inverse(GroupElement(GroupKind.SU, np.diag([1, -1])))
    with pytest.raises(ValueError):
        so_inverse(GroupElement(GroupKind.SO, np.diag([1j, -1j])))


def test_angle_record_validation():
    with pytest.raises(ValueError):
        EulerAngles(GroupKind.SU, 2, [0.0], [0.0, 0.0], [0.0])
    with pytest.raises(ValueError):
        EulerAngles(GroupKind.SO, 1, [])
    with pytest.raises(ParseError):
        EulerAngles.from_dict({'group': 'su', 'phi': [0]})
    with pytest.raises(ParseError):
        GroupKind.parse('sp')


def test_out_of_range_angles_are_flagged_not_rejected():
    angles = EulerAngles(GroupKind.SU, 2, [4.0], [0.1], [0.2])
    assert angles.out_of_range() == ['phi1']
    assert not angles.validate()
    assert forward(angles).unitarity_error() < 1e-12


def test_parse_angle_list():
    angles = parse_angle_list('su', 2, "0.1, 0.2, 0.3")
    assert angles.phi.tolist() == [0.1] and angles.psi.tolist() == [0.2] and angles.omega.tolist() == [0.3]
    with pytest.raises(ValueError):
        parse_angle_list('su', 2, "0.1, 0.2")
    with pytest.raises(ParseError):
        parse_angle_list('so', 2, "abc")


def test_angle_record_json():
    angles = EulerAngles(GroupKind.SU, 2, [0.1], [0.2], [0.3])
    again = EulerAngles.from_dict(angles.to_dict())
    np.testing.assert_array_equal(again.flat(), angles.flat())
    from_text = EulerAngles.from_dict(json.loads(angles.to_json(indent=None)))
    np.testing.assert_array_equal(from_text.flat(), angles.flat())
    assert set(EulerAngles.zeros('so', 3).to_dict()) == {'group', 'n', 'phi'}


def test_matrix_json():
    g = GroupElement(GroupKind.SU, np.array([[0, 1j], [1j, 0]]))
    data = g.to_dict()
    assert data['entries'][1] == [0.0, 1.0]
    np.testing.assert_array_equal(GroupElement.from_dict(data).matrix, g.matrix)
    with pytest.raises(ParseError):
        GroupElement.from_dict({'n': 2, 'entries': [[1, 0]]})


def test_d_matrix():
    d = d_matrix(4, 3, 0.5).matrix
    np.testing.assert_allclose(np.diag(d), [np.exp(0.5j), np.exp(0.5j), np.exp(-1j), 1])
    with pytest.raises(ValueError):
        d_matrix(2, 3, 0.5)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_shift_identities(n, rng):
    for _ in range(25):
        angles = interior_angles(GroupKind.SU, n, rng, 1).take(0)
        z = float(rng.uniform(-math.pi, math.pi))
        for kind in SHIFT_KINDS:
            if kind == 'DN-1-full' and n == 2:
                continue
            assert shift_identity_residual(kind, n, z, angles) < 1e-12


def test_left_d2_shifts_the_first_phi():
    angles = EulerAngles(GroupKind.SU, 3, [0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8])
    shifted = shifted_angles('left-D2', angles, 0.25)
    np.testing.assert_allclose(shifted.phi, [0.35, 0.2, 0.3])
    np.testing.assert_array_equal(angles.phi, [0.1, 0.2, 0.3])


def test_shift_argument_checks():
    angles = EulerAngles.zeros(GroupKind.SU, 2)
    with pytest.raises(ValueError):
        shifted_angles('DN-1-full', angles, 0.1)
    with pytest.raises(ValueError):
        shifted_angles('sideways', angles, 0.1)
    with pytest.raises(ValueError):
        shift_identity_residual('left-D2', 3, 0.1, angles)
