import json

import numpy as np
import pytest

from willmore_orbits.geometry import tangent_map
from willmore_orbits.representations import (
    DomainError,
    Representation,
    build_so3_conjugation_rep,
    build_so5_adjoint_rep,
    build_so_block_rep,
    coords_to_sym,
    load_representation,
    save_representation,
    so5_basis,
    sym_to_coords,
    traceless_symmetric_basis,
    validate_representation,
)

BUILTINS = [
    build_so_block_rep([1, 1]),
    build_so_block_rep([2, 3]),
    build_so_block_rep([1, 2, 1]),
    build_so3_conjugation_rep(),
    build_so5_adjoint_rep(),
]


def test_block_rep_shapes():
    rep = build_so_block_rep([1, 1])
    assert (rep.ambient_dim, rep.g_dim) == (4, 2)
    e1 = np.zeros((4, 4))
    e1[0, 1], e1[1, 0] = 1, -1
    e2 = np.zeros((4, 4))
    e2[2, 3], e2[3, 2] = 1, -1
    np.testing.assert_array_equal(rep.generators[0], e1)
    np.testing.assert_array_equal(rep.generators[1], e2)

    rep = build_so_block_rep([2, 3])
    assert (rep.ambient_dim, rep.g_dim) == (7, 9)

    rep = build_so_block_rep([1])
    assert (rep.ambient_dim, rep.g_dim) == (2, 1)
    assert tangent_map(rep, [0.6, 0.8]).orbit_dim == 1


@pytest.mark.parametrize("dims", [[], [0], [1, 0], [2, -1]])
def test_block_rep_rejects_bad_dims(dims):
    with pytest.raises(DomainError):
        build_so_block_rep(dims)


@pytest.mark.parametrize("rep", BUILTINS, ids=lambda r: r.name)
def test_builtins_validate(rep):
    report = validate_representation(rep)
    assert report.passed, report.failures
    assert report.skew_residual <= 1e-12
    assert report.closure_residual <= 1e-9


def test_so5_closure_is_exact():
    assert validate_representation(build_so5_adjoint_rep()).closure_residual <= 1e-12


def test_perturbed_generator_fails_skewness():
    rep = build_so3_conjugation_rep()
    gens = np.array(rep.generators)
    gens[1, 0, 2] += 1e-3
    report = validate_representation(Representation("bad", gens))
    assert not report.passed
    assert "skewness" in report.failures


def test_dependent_generators_fail():
    rep = build_so_block_rep([1, 1])
    gens = np.array([rep.generators[0], 2 * rep.generators[0]])
    report = validate_representation(Representation("dup", gens))
    assert "linear-independence" in report.failures


def test_non_closed_span_fails():
    # two rotations of so(3) without their bracket
    gens = build_so_block_rep([2]).generators[:2]
    report = validate_representation(Representation("open", gens))
    assert report.failures == ["bracket-closure"]


@pytest.mark.parametrize("rep", BUILTINS, ids=lambda r: r.name)
def test_orbits_stay_on_sphere(rep, rng):
    for _ in range(20):
        x = rng.normal(size=rep.ambient_dim)
        x /= np.linalg.norm(x)
        assert np.max(np.abs(np.einsum("aij,i,j->a", rep.generators, x, x))) <= 1e-12


def test_traceless_basis_orthonormal():
    b = traceless_symmetric_basis()
    gram = np.array([[np.trace(p @ q) for q in b] for p in b])
    np.testing.assert_allclose(gram, np.eye(5), atol=1e-15)
    for m in b:
        assert abs(np.trace(m)) < 1e-15
        np.testing.assert_array_equal(m, m.T)


def test_so5_basis_orthonormal():
    b = so5_basis()
    gram = np.array([[-0.5 * np.trace(p @ q) for q in b] for p in b])
    np.testing.assert_allclose(gram, np.eye(10), atol=1e-15)


def test_sym_coordinates_roundtrip():
    a = np.diag([1.0, 1.0, -2.0]) / np.sqrt(6)
    x = sym_to_coords(a)
    assert abs(np.linalg.norm(x) - 1) < 1e-15
    np.testing.assert_allclose(x, [0, 0, 0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(coords_to_sym(x), a, atol=1e-15)


def test_so3_generators_act_by_commutator():
    rep = build_so3_conjugation_rep()
    a = np.array([[0.3, 0.1, -0.2], [0.1, -0.5, 0.4], [-0.2, 0.4, 0.2]])
    xi = np.zeros((3, 3))
    xi[0, 1], xi[1, 0] = 1, -1
    np.testing.assert_allclose(
        coords_to_sym(rep.generators[0] @ sym_to_coords(a)), xi @ a - a @ xi, atol=1e-14
    )


@pytest.mark.parametrize(
    "dims,t,expected",
    [
        ([1, 1], [0.6, 0.8], 2),
        ([1, 2], [0.0, 1.0], 2),
        ([1, 2], [1.0, 0.0], 1),
        ([2, 3, 1], [0.5, 0.5, np.sqrt(0.5)], 6),
        ([2, 3, 1], [0.6, 0.0, 0.8], 3),
    ],
)
def test_block_orbit_dimension(dims, t, expected):
    from willmore_orbits.families import product_sphere_point

    rep = build_so_block_rep(dims)
    assert tangent_map(rep, product_sphere_point(dims, t)).orbit_dim == expected


def test_json_roundtrip(tmp_path):
    rep = build_so5_adjoint_rep()
    path = tmp_path / "rep.json"
    save_representation(rep, path)
    doc = json.loads(path.read_text())
    assert set(doc) == {"name", "ambient_dim", "generators"}
    back = load_representation(path)
    assert back.name == rep.name
    np.testing.assert_array_equal(back.generators, rep.generators)


def test_json_dimension_mismatch():
    with pytest.raises(DomainError):
        Representation.from_dict({"name": "x", "ambient_dim": 3, "generators": [[[0, 1], [-1, 0]]]})


def test_generators_are_immutable():
    rep = build_so_block_rep([1, 1])
    with pytest.raises(ValueError):
        rep.generators[0, 0, 1] = 5.0
