import numpy as np
import pytest

from laguerre import lorentz, spheres
from laguerre.errors import InvalidCoordinateError, InvalidLineError, UsageError
from laguerre.spheres import ContactElement, Plane, PointAtInfinity, Sphere


def test_sphere_coord_hand_values():
    got = spheres.sphere_coord_vector(Sphere(np.zeros(3), 1.0))
    assert np.allclose(got, [0, 1, 0, 0, 0, -1])
    got = spheres.sphere_coord_vector(Plane(np.array([0.0, 0, 1]), 0.0))
    assert np.allclose(got, [0, 0, 0, 0, 1, 1])
    got = spheres.sphere_coord_vector(Sphere(np.zeros(3), 0.0))
    assert np.allclose(got, [0.5, 0.5, 0, 0, 0, 0])


def test_sphere_coord_lightlike_randomized():
    rng = np.random.default_rng(3)
    for _ in range(500):
        s = Sphere(rng.standard_normal(3) * 5, rng.standard_normal() * 3)
        v = spheres.sphere_coord_vector(s)
        assert abs(lorentz.inner(v, v)) < 1e-12 * np.dot(v, v)
        xi = rng.standard_normal(3)
        p = Plane(xi / np.linalg.norm(xi), rng.standard_normal() * 4)
        v = spheres.sphere_coord_vector(p)
        assert abs(lorentz.inner(v, v)) < 1e-12 * np.dot(v, v)


def test_plane_rejects_non_unit_normal():
    with pytest.raises(UsageError):
        Plane(np.array([0.0, 0.0, 2.0]), 1.0)


def test_classify_coord():
    s = spheres.classify_coord(spheres.sphere_coord(Sphere(np.zeros(3), 1.0)))
    assert isinstance(s, Sphere)
    assert np.allclose(s.center, 0) and s.radius == pytest.approx(1.0)

    p = spheres.classify_coord(spheres.sphere_coord(Plane(np.array([0.0, 0, 1]), 0.0)))
    assert isinstance(p, Plane)
    assert np.allclose(p.normal, [0, 0, 1]) and p.offset == pytest.approx(0.0)

    inf = spheres.classify_coord(spheres.ProjectivePoint(lorentz.wp(3)))
    assert isinstance(inf, PointAtInfinity)
    # scaled representative of the improper point classifies the same way
    inf2 = spheres.classify_coord(-3.0 * lorentz.wp(3))
    assert isinstance(inf2, PointAtInfinity)

    with pytest.raises(InvalidCoordinateError):
        spheres.classify_coord(np.array([1.0, 0, 0, 0, 0, 0]))


def test_classify_roundtrip_randomized():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        if rng.random() < 0.5:
            el = Sphere(rng.standard_normal(3) * 4, rng.standard_normal() * 3)
        else:
            xi = rng.standard_normal(3)
            el = Plane(xi / np.linalg.norm(xi), rng.standard_normal() * 4)
        # random projective rescale of the representative
        scale = rng.choice([-1.0, 1.0]) * np.exp(rng.uniform(-2, 2))
        back = spheres.classify_coord(scale * spheres.sphere_coord_vector(el))
        assert type(back) is type(el)
        if isinstance(el, Sphere):
            assert np.abs(back.center - el.center).max() < 1e-10 * (1 + np.abs(el.center).max())
            assert back.radius == pytest.approx(el.radius, rel=1e-10, abs=1e-10)
        else:
            assert np.abs(back.normal - el.normal).max() < 1e-10
            assert back.offset == pytest.approx(el.offset, rel=1e-10, abs=1e-10)


def test_oriented_contact_hand_cases():
    s1 = Sphere(np.zeros(3), 1.0)
    assert spheres.oriented_contact(s1, Plane(np.array([0.0, 0, 1]), 1.0))
    assert spheres.oriented_contact(s1, Sphere(np.array([3.0, 0, 0]), -2.0))
    assert not spheres.oriented_contact(s1, Sphere(np.zeros(3), 2.0))


def test_tangential_invariant():
    s1 = Sphere(np.zeros(3), 1.0)
    s2 = Sphere(np.array([3.0, 0, 0]), 1.0)
    assert spheres.tangential_invariant(s1, s2) == pytest.approx(9.0)
    assert spheres.tangential_invariant(s1, s1) == 0.0
    s3 = Sphere(np.array([3.0, 0, 0]), -2.0)
    assert spheres.tangential_invariant(s1, s3) == pytest.approx(0.0)
    with pytest.raises(UsageError):
        spheres.tangential_invariant(s1, Plane(np.array([1.0, 0, 0]), 0.0))


def test_contact_iff_tangential_invariant_vanishes():
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(10_000):
        if rng.random() < 0.5:
            # tangent pair built from a shared contact element
            x = rng.standard_normal(3) * 3
            xi = rng.standard_normal(3)
            xi /= np.linalg.norm(xi)
            r1, r2 = rng.standard_normal(2) * 3
            a = Sphere(x - r1 * xi, r1)
            b = Sphere(x - r2 * xi, r2)
        else:
            a = Sphere(rng.standard_normal(3) * 3, rng.standard_normal() * 2)
            b = Sphere(rng.standard_normal(3) * 3, rng.standard_normal() * 2)
        F = spheres.tangential_invariant(a, b)
        scale = 1.0 + np.dot(a.center, a.center) + np.dot(b.center, b.center) \
            + a.radius ** 2 + b.radius ** 2
        contact = spheres.oriented_contact(a, b, tol=1e-9)
        assert contact == (abs(F) <= 1e-8 * scale)
        hits += contact
    assert hits > 4000  # both branches well represented


def test_wp_pairing_separates_spheres_from_planes():
    rng = np.random.default_rng(9)
    w = lorentz.wp(3)
    for _ in range(200):
        s = Sphere(rng.standard_normal(3), rng.standard_normal())
        assert abs(lorentz.inner(spheres.sphere_coord_vector(s), w)) > 0.5
        xi = rng.standard_normal(3)
        p = Plane(xi / np.linalg.norm(xi), rng.standard_normal())
        assert abs(lorentz.inner(spheres.sphere_coord_vector(p), w)) < 1e-12


def test_lie_line_hand_case():
    c = ContactElement(np.zeros(3), np.array([0.0, 0, 1]))
    line = spheres.lie_line(c)
    assert np.allclose(line.gamma1.vec, [1, 1, 0, 0, 0, 0])  # (1/2,1/2,0,0,0,0) rescaled
    assert np.allclose(line.gamma2.vec, [0, 0, 0, 0, 1, 1])
    assert abs(lorentz.inner(line.gamma1.vec, line.gamma2.vec)) < 1e-14


def test_pencil_member_is_tangent_sphere():
    # gamma1 + mu gamma2 carries signed radius -mu: at x = 0 the member with
    # mu = -r must be the sphere of radius r centered at -r xi
    rng = np.random.default_rng(13)
    for _ in range(100):
        xi = rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        r = rng.standard_normal() * 2
        c = ContactElement(np.zeros(3), xi)
        g1 = spheres.point_sphere_vector(c.x)
        lam = float(np.dot(c.x, xi))
        g2 = np.concatenate([[lam, -lam], xi, [1.0]])
        member = spheres.classify_coord(g1 + (-r) * g2)
        expected = Sphere(-r * xi, r)
        assert np.abs(member.center - expected.center).max() < 1e-12
        assert member.radius == pytest.approx(r, abs=1e-12)


def test_contact_from_line_roundtrip():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(10_000):
        x = rng.standard_normal(3) * 3
        xi = rng.standard_normal(3)
        xi /= np.linalg.norm(xi)
        c = ContactElement(x, xi)
        back = spheres.contact_from_line(spheres.lie_line(c))
        worst = max(worst, np.abs(back.x - x).max(), np.abs(back.xi - xi).max())
    assert worst < 1e-10


def test_contact_from_line_reads_normal_from_plane_member():
    xi = np.array([0.6, 0.0, 0.8])
    lam = 2.5
    g2 = np.concatenate([[lam, -lam], xi, [1.0]])
    x = lam * xi  # a base point with x . xi = lam
    line = spheres.LieLine(
        spheres.ProjectivePoint(spheres.point_sphere_vector(x)),
        spheres.ProjectivePoint(g2),
    )
    back = spheres.contact_from_line(line)
    assert np.abs(back.xi - xi).max() < 1e-12


def test_degenerate_line_rejected():
    g2 = spheres.ProjectivePoint(np.array([0.0, 0, 0, 0, 1, 1]))
    with pytest.raises(InvalidLineError):
        spheres.LieLine(g2, g2)
    # a line whose "sphere" generator is actually a plane
    g2b = spheres.ProjectivePoint(np.array([1.0, -1, 0, 1, 0, 1]))
    with pytest.raises(InvalidLineError):
        spheres.LieLine(g2, g2b)


def test_element_json_roundtrip():
    for el in [Sphere(np.array([1.0, 2, 3]), -0.5), Plane(np.array([0.0, 1, 0]), 2.0)]:
        back = spheres.element_from_json(spheres.element_to_json(el))
        assert type(back) is type(el)
    with pytest.raises(UsageError):
        spheres.element_from_json({"kind": "blob"})
