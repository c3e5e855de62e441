import numpy as np
import pytest

from mvpose import geometry as geo
from mvpose.exceptions import BehindCameraError, InvariantViolation, OutOfBoundsError


def random_pose(rng):
    return geo.Pose(geo.random_rotation(rng), rng.uniform(-1, 1, size=3))


def random_camera(rng, size=(64, 48)):
    intr = geo.CameraIntrinsics(
        focal=rng.uniform(30, 80, size=2),
        principal_point=(size[0] / 2 + rng.uniform(-2, 2), size[1] / 2 + rng.uniform(-2, 2)),
        image_size=size,
    )
    extr = geo.CameraExtrinsics(random_pose(rng))
    return intr, extr


class TestPose:
    def test_identity_compose(self):
        rng = np.random.default_rng(0)
        p = random_pose(rng)
        q = geo.compose_pose(geo.Pose.identity(), p)
        np.testing.assert_allclose(q.rotation, p.rotation)
        np.testing.assert_allclose(q.translation, p.translation)

    def test_compose_with_inverse_is_identity(self):
        rng = np.random.default_rng(1)
        p = random_pose(rng)
        q = geo.compose_pose(p, geo.invert_pose(p))
        np.testing.assert_allclose(q.rotation, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(q.translation, 0, atol=1e-12)

    def test_compose_matches_homogeneous_matrix_oracle(self):
        # Oracle: 4x4 homogeneous matrix product.
        rng = np.random.default_rng(2)
        for _ in range(50):
            p, q = random_pose(rng), random_pose(rng)
            got = geo.compose_pose(p, q).as_matrix()
            np.testing.assert_allclose(got, p.as_matrix() @ q.as_matrix(), atol=1e-12)

    def test_compose_applies_b_then_a(self):
        rng = np.random.default_rng(3)
        p, q = random_pose(rng), random_pose(rng)
        x = rng.uniform(-1, 1, size=3)
        np.testing.assert_allclose(geo.compose_pose(p, q).apply(x), p.apply(q.apply(x)), atol=1e-12)

    def test_invert_identity(self):
        p = geo.invert_pose(geo.Pose.identity())
        np.testing.assert_allclose(p.as_matrix(), np.eye(4))

    def test_invert_is_involution(self):
        rng = np.random.default_rng(4)
        p = random_pose(rng)
        q = geo.invert_pose(geo.invert_pose(p))
        np.testing.assert_allclose(q.as_matrix(), p.as_matrix(), atol=1e-12)

    def test_invert_matches_matrix_inverse_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            p = random_pose(rng)
            np.testing.assert_allclose(
                geo.invert_pose(p).as_matrix(), np.linalg.inv(p.as_matrix()), atol=1e-10
            )

    def test_associativity(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a, b, c = (random_pose(rng) for _ in range(3))
            left = geo.compose_pose(geo.compose_pose(a, b), c).as_matrix()
            right = geo.compose_pose(a, geo.compose_pose(b, c)).as_matrix()
            np.testing.assert_allclose(left, right, atol=1e-9)

    def test_rejects_non_rotation(self):
        with pytest.raises(InvariantViolation):
            geo.Pose(np.eye(3) * 2.0, np.zeros(3))
        with pytest.raises(InvariantViolation):
            geo.Pose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))  # det = -1

    def test_random_rotation_is_uniformish(self):
        # z-components of rotated unit vectors should average to ~0.
        rng = np.random.default_rng(7)
        zs = [geo.random_rotation(rng)[2, 0] for _ in range(4000)]
        se = np.std(zs) / np.sqrt(len(zs))
        assert abs(np.mean(zs)) < 3 * se + 1e-3


class TestProjection:
    def test_optical_axis_point_hits_principal_point(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        px = geo.project_point(intr, geo.CameraExtrinsics.identity(), (0, 0, 2.0))
        np.testing.assert_allclose(px, intr.principal_point)

    def test_pinhole_definition(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        x, y, z = 0.2, -0.1, 1.5
        px = geo.project_point(intr, geo.CameraExtrinsics.identity(), (x, y, z))
        np.testing.assert_allclose(px, [50 * x / z + 32, 55 * y / z + 24])

    def test_behind_camera_raises(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        with pytest.raises(BehindCameraError):
            geo.project_point(intr, geo.CameraExtrinsics.identity(), (0, 0, -1.0))

    def test_project_then_ray_contains_point(self):
        # Oracle: ray membership, distance from point to ray < 1e-6 m.
        rng = np.random.default_rng(8)
        for _ in range(50):
            intr, extr = random_camera(rng)
            p_cam = np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.5, 3)])
            point = extr.camera_to_reference.apply(p_cam)
            px = geo.project_point(intr, extr, point)
            if np.any(px < 0) or np.any(px >= intr.image_size):
                continue
            ray = geo.pixel_ray(intr, extr, px, scale=1.0)
            v = point - ray.origin
            dist = np.linalg.norm(np.cross(ray.direction, v))
            assert dist < 1e-6


class TestPixelRay:
    def test_principal_point_gives_optical_axis(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        for scale in (1.0, 4.0):
            ray = geo.pixel_ray(intr, geo.CameraExtrinsics.identity(),
                                np.array([32.0, 24.0]) / scale, scale)
            np.testing.assert_allclose(ray.direction, [0, 0, 1], atol=1e-12)

    def test_reference_camera_origin_is_zero(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        ray = geo.pixel_ray(intr, geo.CameraExtrinsics.identity(), (3.3, 4.4), scale=4.0)
        np.testing.assert_allclose(ray.origin, 0.0)

    def test_round_trip_through_project_point(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            intr, extr = random_camera(rng)
            pixel = rng.uniform(0, 1, size=2) * intr.image_size
            for scale in (1.0, 8.0):
                ray = geo.pixel_ray(intr, extr, pixel / scale, scale)
                for s in (0.4, 2.7):
                    px = geo.project_point(intr, extr, ray.origin + s * ray.direction)
                    np.testing.assert_allclose(px, pixel, atol=1e-4)

    def test_out_of_bounds_rejected(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        with pytest.raises(OutOfBoundsError):
            geo.pixel_ray(intr, geo.CameraExtrinsics.identity(), (70, 10), scale=1.0)
        with pytest.raises(OutOfBoundsError):
            geo.pixel_ray(intr, geo.CameraExtrinsics.identity(), (5, 13), scale=4.0)

    def test_all_origins_identical_across_pixels_and_scales(self):
        rng = np.random.default_rng(10)
        intr, extr = random_camera(rng)
        origins = []
        for scale in (1.0, 2.0, 4.0):
            for _ in range(10):
                pixel = rng.uniform(0, 1, size=2) * intr.image_size / scale
                origins.append(geo.pixel_ray(intr, extr, pixel, scale).origin)
        origins = np.array(origins)
        assert np.ptp(origins, axis=0).max() == 0.0


class TestLoSEncoding:
    def test_ray_through_origin_has_zero_moment(self):
        ray = geo.Ray(np.zeros(3), np.array([0.6, 0.8, 0.0]))
        code = geo.encode_los(ray, "pluecker")
        np.testing.assert_allclose(code.values[3:], 0.0)

    def test_dir_origin_of_reference_ray(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        ray = geo.pixel_ray(intr, geo.CameraExtrinsics.identity(), (10.5, 20.5))
        code = geo.encode_los(ray, "dir_origin")
        np.testing.assert_allclose(np.linalg.norm(code.values[:3]), 1.0, atol=1e-12)
        np.testing.assert_allclose(code.values[3:], 0.0)

    def test_moment_matches_cross_product_oracle_and_orthogonality(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            o = rng.uniform(-2, 2, size=3)
            code = geo.encode_los(geo.Ray(o, d), "pluecker")
            m = code.values[3:]
            # component-wise cross product oracle, m = d x o
            oracle = np.array(
                [d[1] * o[2] - d[2] * o[1], d[2] * o[0] - d[0] * o[2], d[0] * o[1] - d[1] * o[0]]
            )
            np.testing.assert_allclose(m, oracle, atol=1e-12)
            assert abs(np.dot(m, d)) < 1e-9

    def test_moment_invariant_to_point_on_ray(self):
        rng = np.random.default_rng(12)
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        o = rng.uniform(-2, 2, size=3)
        m0 = geo.encode_los(geo.Ray(o, d), "pluecker").values[3:]
        m1 = np.cross(d, o + 2.0 * d)
        np.testing.assert_allclose(m0, m1, atol=1e-12)

    @pytest.mark.parametrize("mode,dim", [("dir_only", 3), ("dir_origin", 6),
                                          ("pluecker", 6), ("pluecker_origin", 9)])
    def test_lengths(self, mode, dim):
        ray = geo.Ray((0.1, 0.2, 0.3), (0, 0, 1))
        assert geo.encode_los(ray, mode).values.shape == (dim,)

    def test_dir_origin_is_injective(self):
        # equal dir_origin codes => the same ray
        rng = np.random.default_rng(13)
        rays = []
        for _ in range(200):
            d = rng.normal(size=3)
            rays.append(geo.Ray(rng.uniform(-1, 1, 3), d / np.linalg.norm(d)))
        codes = {tuple(np.round(geo.encode_los(r, "dir_origin").values, 12)) for r in rays}
        assert len(codes) == len(rays)

    def test_los_map_matches_per_pixel_ops(self):
        rng = np.random.default_rng(14)
        intr, extr = random_camera(rng, size=(16, 8))
        for mode in geo.LOS_MODES:
            grid = geo.los_map(intr, extr, scale=2, mode=mode)
            assert grid.shape == (4, 8, geo.LOS_DIMS[mode])
            for i in (0, 3):
                for j in (0, 7):
                    ray = geo.pixel_ray(intr, extr, (j + 0.5, i + 0.5), scale=2)
                    np.testing.assert_allclose(
                        grid[i, j], geo.encode_los(ray, mode).values, atol=1e-12
                    )


class TestSerialization:
    def test_bop_json_round_trip(self):
        rng = np.random.default_rng(15)
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        w2c = random_pose(rng)
        entry = geo.camera_to_json(intr, w2c)
        assert set(entry) == {"cam_K", "cam_R_w2c", "cam_t_w2c"}
        assert len(entry["cam_K"]) == 9 and len(entry["cam_R_w2c"]) == 9
        intr2, w2c2 = geo.camera_from_json(entry, image_size=(64, 48))
        np.testing.assert_allclose(intr2.k_matrix, intr.k_matrix)
        np.testing.assert_allclose(w2c2.rotation, w2c.rotation, atol=1e-12)
        np.testing.assert_allclose(w2c2.translation, w2c.translation, atol=1e-12)

    def test_translation_serialized_in_millimeters(self):
        intr = geo.CameraIntrinsics((50, 55), (32, 24), (64, 48))
        w2c = geo.Pose(np.eye(3), (0.001, 0.002, 0.003))
        entry = geo.camera_to_json(intr, w2c)
        np.testing.assert_allclose(entry["cam_t_w2c"], [1.0, 2.0, 3.0])


class TestLookAt:
    def test_looks_at_target(self):
        pose = geo.look_at_pose((1.0, 2.0, 3.0), (0.0, 0.0, 0.0), up_hint=(0, 0, 1))
        fwd = pose.rotation[:, 2]
        np.testing.assert_allclose(fwd, -np.array([1, 2, 3]) / np.linalg.norm([1, 2, 3]), atol=1e-12)

    def test_roll_keeps_viewing_axis(self):
        p0 = geo.look_at_pose((1, 0, 1), (0, 0, 0), (0, 0, 1), roll=0.0)
        p1 = geo.look_at_pose((1, 0, 1), (0, 0, 0), (0, 0, 1), roll=1.2)
        np.testing.assert_allclose(p0.rotation[:, 2], p1.rotation[:, 2], atol=1e-12)
        assert not np.allclose(p0.rotation[:, 0], p1.rotation[:, 0])
