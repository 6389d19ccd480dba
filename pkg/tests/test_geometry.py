import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F_STAR

from gaussmax.closedform import f_max
from gaussmax.corrmat import PAIRS, CorrelationMatrix4, classify, DomainTag
from gaussmax.geometry import (
    EDGE_OF_FACET_PAIR,
    FACET_PAIRS,
    FACETS,
    GAUSSIAN_RADIAL_FACTOR,
    Tetrahedron,
    corr_of,
    dihedrals,
    dihedrals_of,
    embed,
    f_width,
    f_width_inv,
    facet_areas,
    foot_data,
    h_func,
    h_func_expanded,
    mean_width,
    origin_inside,
    stationarity_residual,
)

ACOS_THIRD = np.arccos(-1.0 / 3.0)


def random_tetra(rng):
    v = rng.normal(size=(4, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return Tetrahedron(v)


def polar_tetra(t1, t2, t3, t4, t5):
    """The spherical parametrization used for the volume formulas."""
    return Tetrahedron(np.array([
        [0.0, 0.0, 1.0],
        [np.sin(t1), 0.0, np.cos(t1)],
        [np.sin(t2) * np.cos(t4), np.sin(t2) * np.sin(t4), np.cos(t2)],
        [np.sin(t3) * np.cos(t5), np.sin(t3) * np.sin(t5), np.cos(t3)],
    ]))


class TestEmbedding:
    def test_regular(self):
        t = embed(CorrelationMatrix4.equicorrelated(-1.0 / 3.0))
        g = t.vertices @ t.vertices.T
        assert np.allclose(g - np.eye(4) * (1 + 1 / 3), -1 / 3, atol=1e-12)
        assert np.allclose(t.vertices[0], [0, 0, 1])
        assert t.vertices[1][1] == pytest.approx(0.0, abs=1e-12)
        assert t.vertices[1][0] >= 0

    def test_rank4_rejected(self):
        with pytest.raises(ValueError, match="rank 4"):
            embed(CorrelationMatrix4.identity())

    def test_rank1_flat(self):
        t = embed(CorrelationMatrix4.equicorrelated(1.0))
        assert np.allclose(t.vertices, t.vertices[0])

    def test_roundtrip_from_random_vertices(self, rng):
        for _ in range(20):
            t = random_tetra(rng)
            m = corr_of(t)
            t2 = embed(m)
            g1 = t.vertices @ t.vertices.T
            g2 = t2.vertices @ t2.vertices.T
            assert np.max(np.abs(g1 - g2)) <= 1e-10

    def test_corr_of_repeated_vertex(self, rng):
        v = rng.normal(size=(4, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        v[3] = v[2]
        m = corr_of(Tetrahedron(v))
        assert m.offdiag[PAIRS.index((2, 3))] == 1.0

    def test_polar_parametrization_matches_trig_formulas(self, rng):
        for _ in range(10):
            t1 = rng.uniform(0.2, np.pi - 0.2)
            t2, t3 = rng.uniform(0.2, 2 * np.pi - 0.2, 2)
            t4, t5 = rng.uniform(0.2, np.pi - 0.2, 2)
            m = corr_of(polar_tetra(t1, t2, t3, t4, t5)).matrix()
            assert m[0, 1] == pytest.approx(np.cos(t1), abs=1e-12)
            assert m[0, 2] == pytest.approx(np.cos(t2), abs=1e-12)
            assert m[0, 3] == pytest.approx(np.cos(t3), abs=1e-12)
            assert m[1, 2] == pytest.approx(
                np.sin(t1) * np.sin(t2) * np.cos(t4) + np.cos(t1) * np.cos(t2), abs=1e-12)
            assert m[1, 3] == pytest.approx(
                np.sin(t1) * np.sin(t3) * np.cos(t5) + np.cos(t1) * np.cos(t3), abs=1e-12)
            assert m[2, 3] == pytest.approx(
                np.sin(t2) * np.sin(t3) * np.cos(t4 - t5) + np.cos(t2) * np.cos(t3), abs=1e-12)

    def test_nonunit_vertices_rejected(self):
        with pytest.raises(ValueError):
            Tetrahedron(np.ones((4, 3)))


class TestDihedrals:
    def test_facet_pair_edge_table(self):
        # facet pair <-> the unique shared edge; pins the fixed facet order
        # F1={1,2,3}, F2={1,3,4}, F3={1,2,4}, F4={2,3,4}
        assert FACETS == ((0, 1, 2), (0, 2, 3), (0, 1, 3), (1, 2, 3))
        expected = {
            (0, 1): (0, 2),  # alpha_12 <-> edge (1,3)
            (0, 2): (0, 1),  # alpha_13 <-> edge (1,2)
            (0, 3): (1, 2),  # alpha_14 <-> edge (2,3)
            (1, 2): (0, 3),  # alpha_23 <-> edge (1,4)
            (1, 3): (2, 3),  # alpha_24 <-> edge (3,4)
            (2, 3): (1, 3),  # alpha_34 <-> edge (2,4)
        }
        for idx, fp in enumerate(FACET_PAIRS):
            assert PAIRS[EDGE_OF_FACET_PAIR[idx]] == expected[fp]

    def test_regular_all_angles_equal(self):
        m = CorrelationMatrix4.equicorrelated(-1.0 / 3.0)
        ds = dihedrals(m)
        assert np.allclose(ds.alpha, ACOS_THIRD, atol=1e-12)
        ds2 = dihedrals_of(embed(m))
        assert np.allclose(ds2.alpha, ACOS_THIRD, atol=1e-9)

    def test_formula_matches_face_normals(self, rng):
        for _ in range(15):
            t = random_tetra(rng)
            m = corr_of(t)
            if classify(m).tag is DomainTag.DEGENERATE_UNIT_PAIR:
                continue
            a1 = dihedrals(m).alpha
            a2 = dihedrals_of(t).alpha
            assert np.max(np.abs(a1 - a2)) <= 1e-9

    def test_coplanar_has_two_zero_outer_angles(self):
        # four distinct points on a great circle: the tetrahedron collapses
        angles = np.array([0.0, 1.1, 2.4, 4.0])
        v = np.column_stack([np.cos(angles), np.sin(angles), np.zeros(4)])
        ds = dihedrals(corr_of(Tetrahedron(v)))
        n_zero = int(np.sum(ds.alpha < 1e-6))
        assert n_zero == 2

    def test_interior_matrix_still_has_dihedrals(self):
        # the formula needs no 3-D realization; interior (rank-4) inputs work
        ds = dihedrals(CorrelationMatrix4.equicorrelated(-0.25))
        assert np.all((ds.alpha > 0) & (ds.alpha < np.pi))

    def test_unit_pair_rejected(self):
        with pytest.raises(ValueError):
            dihedrals(CorrelationMatrix4((0, 0, 1.0, 0, 0, 0)))


class TestFootData:
    def test_regular_lengths_one_third(self):
        t = Tetrahedron.regular()
        fd = foot_data(t)
        assert np.allclose(fd.lengths, 1.0 / 3.0, atol=1e-12)
        assert np.ptp(fd.volumes) < 1e-14
        assert fd.residual <= 1e-10

    def test_volumes_sum_to_total_volume(self, rng):
        for _ in range(10):
            t = random_tetra(rng)
            if not origin_inside(t):
                continue
            v = t.vertices
            total = abs(np.linalg.det(v[1:] - v[0])) / 6.0
            assert np.sum(foot_data(t).volumes) == pytest.approx(total, rel=1e-9)

    def test_polar_volume_formulas(self, rng):
        # cone volumes over facets 1..3 in the spherical parametrization
        for _ in range(10):
            t1 = rng.uniform(0.3, np.pi - 0.3)
            t2, t3 = rng.uniform(0.3, np.pi - 0.3, 2)
            t4, t5 = rng.uniform(0.3, np.pi - 0.3, 2)
            if abs(t4 - t5) < 0.05:
                continue
            t = polar_tetra(t1, t2, t3, t4, t5)
            try:
                fd = foot_data(t)
            except ValueError:
                continue
            v1 = np.sin(t1) * abs(np.sin(t2)) * np.sin(t4) / 6.0
            v2 = abs(np.sin(t2) * np.sin(t3) * np.sin(t4 - t5)) / 6.0
            v3 = np.sin(t1) * abs(np.sin(t3)) * np.sin(t5) / 6.0
            assert fd.volumes[0] == pytest.approx(v1, rel=1e-12)
            assert fd.volumes[1] == pytest.approx(v2, rel=1e-12)
            assert fd.volumes[2] == pytest.approx(v3, rel=1e-12)

    def test_flat_quadruple_errors(self):
        angles = np.array([0.0, 1.0, 2.0, 3.0])
        v = np.column_stack([np.cos(angles), np.sin(angles), np.zeros(4)])
        with pytest.raises(ValueError):
            foot_data(Tetrahedron(v))

    def test_law_of_sines(self, rng):
        # |X1X2| Area(F2) / sin(alpha_13) and its two stated analogues agree
        for _ in range(10):
            t = random_tetra(rng)
            v = t.vertices
            try:
                alpha = dihedrals_of(t).alpha
            except ValueError:
                continue
            areas = facet_areas(t)
            idx = {fp: i for i, fp in enumerate(FACET_PAIRS)}
            r1 = np.linalg.norm(v[1] - v[0]) * areas[1] / np.sin(alpha[idx[(0, 2)]])
            r2 = np.linalg.norm(v[2] - v[0]) * areas[2] / np.sin(alpha[idx[(0, 1)]])
            r3 = np.linalg.norm(v[3] - v[0]) * areas[0] / np.sin(alpha[idx[(1, 2)]])
            assert r2 == pytest.approx(r1, rel=1e-9)
            assert r3 == pytest.approx(r1, rel=1e-9)


class TestStationarity:
    def test_regular_is_stationary(self):
        m = CorrelationMatrix4.equicorrelated(-1.0 / 3.0)
        assert stationarity_residual(m) <= 1e-10

    def test_perturbed_regular_is_not(self):
        t = Tetrahedron.regular().vertices.copy()
        c, s = np.cos(0.1), np.sin(0.1)
        rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        t[0] = rot @ t[0]
        m = corr_of(Tetrahedron(t))
        assert stationarity_residual(m) > 1e-3

    def test_coplanar_errors(self):
        angles = np.array([0.0, 1.0, 2.0, 3.0])
        v = np.column_stack([np.cos(angles), np.sin(angles), np.zeros(4)])
        with pytest.raises(ValueError):
            stationarity_residual(corr_of(Tetrahedron(v)))


class TestWidthTransfer:
    def test_endpoints(self):
        assert f_width(-1.0) == 0.0
        assert f_width(1.0) == 1.0
        assert f_width(0.0) == pytest.approx(2.0 / np.pi, rel=1e-15)

    def test_inverse_at_two_over_pi(self):
        assert f_width_inv(2.0 / np.pi) == pytest.approx(0.0, abs=1e-12)

    def test_roundtrip_grid(self):
        x = np.linspace(-1.0, 1.0, 1000)
        back = f_width_inv(f_width(x))
        assert np.max(np.abs(back - x)) <= 1e-10

    def test_series_branch_agrees_with_direct_form(self):
        # just outside the series window the two branches must agree
        for t in (2e-6, 1e-5, 1e-4):
            x = 1.0 - t
            direct = np.sqrt(1 - x * x) / np.arccos(x)
            assert f_width(x) == pytest.approx(direct, rel=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 1.0, allow_nan=False))
    def test_inverse_roundtrip_property(self, y):
        # near y = 0 the inverse flattens into -1 + O(y^2), below float
        # resolution, so the y-space roundtrip cannot beat ~sqrt(eps)
        x = f_width_inv(y)
        assert -1.0 <= x <= 1.0
        assert f_width(x) == pytest.approx(y, abs=1e-8)

    def test_monotone(self):
        x = np.linspace(-1, 1, 500)
        assert np.all(np.diff(f_width(x)) > 0)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            f_width(1.5)
        with pytest.raises(ValueError):
            f_width_inv(-0.1)


class TestHFunction:
    def test_regular_value_is_inverse_gamma(self):
        t = Tetrahedron.regular()
        fd = foot_data(t)
        u = fd.u[0]
        assert np.ptp(fd.u) < 1e-12
        assert h_func(u, u, u) == pytest.approx(1.0 / fd.gamma, rel=1e-10)

    def test_symmetry(self, rng):
        for _ in range(10):
            x, y, z = rng.uniform(0.4, 0.95, 3)
            try:
                base = h_func(x, y, z)
            except ValueError:
                continue
            for args in ((x, z, y), (y, x, z), (z, y, x), (y, z, x), (z, x, y)):
                assert h_func(*args) == pytest.approx(base, rel=1e-12)

    def test_quadratic_form_matches_expanded(self, rng):
        for _ in range(20):
            x, y, z = rng.uniform(0.4, 0.95, 3)
            expanded, det = h_func_expanded(x, y, z)
            if det <= 0:
                with pytest.raises(ValueError):
                    h_func(x, y, z)
                continue
            assert h_func(x, y, z) == pytest.approx(float(expanded), rel=1e-10)

    def test_equal_h_condition_on_regular(self):
        fd = foot_data(Tetrahedron.regular())
        u = fd.u
        vals = [h_func(u[i], u[j], u[k])
                for i, j, k in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))]
        assert np.ptp(vals) < 1e-10

    def test_errors_name_the_condition(self):
        with pytest.raises(ValueError, match="x must be positive"):
            h_func(-1.0, 0.5, 0.5)
        with pytest.raises(ValueError, match="product xy"):
            h_func(2.0, 0.6, 0.1)
        with pytest.raises(ValueError, match="det"):
            h_func(0.9, 0.9, 0.05)


class TestMeanWidth:
    def test_single_point_is_zero(self):
        v = np.tile([0.0, 0.0, 1.0], (4, 1))
        assert mean_width(Tetrahedron(v), quad_order=20) == pytest.approx(0.0, abs=1e-14)

    def test_regular_matches_closed_form_route(self):
        t = Tetrahedron.regular()
        target = 2 * F_STAR / GAUSSIAN_RADIAL_FACTOR
        assert mean_width(t, quad_order=50) == pytest.approx(target, rel=1e-4)
        assert mean_width(t, quad_order=200) == pytest.approx(target, rel=1e-6)

    def test_gaussian_radial_factor(self):
        from scipy.special import gamma as gamma_fn

        expected = np.sqrt(2.0) * gamma_fn(2.0) / gamma_fn(1.5)
        assert GAUSSIAN_RADIAL_FACTOR == pytest.approx(expected, rel=1e-14)

    def test_gaussian_equivalence_random(self, rng):
        for _ in range(5):
            t = random_tetra(rng)
            fm = f_max(corr_of(t))
            w = mean_width(t, quad_order=50)
            assert GAUSSIAN_RADIAL_FACTOR * w / 2 == pytest.approx(fm, rel=1e-4)

    def test_random_below_regular(self, rng):
        w_reg = mean_width(Tetrahedron.regular(), quad_order=50)
        for _ in range(20):
            assert mean_width(random_tetra(rng), quad_order=50) <= w_reg + 1e-6

    def test_rotation_invariance(self, rng):
        t = random_tetra(rng)
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        t2 = Tetrahedron(t.vertices @ q.T)
        assert mean_width(t2, quad_order=80) == pytest.approx(
            mean_width(t, quad_order=80), rel=1e-5)
