use std::f64::consts::PI;

use indiflight::control::{attitude_command, error_angles};
use indiflight::quaternion::{quat_mul, quat_rotate, wrap_angle, yaw_of};
use indiflight::{i_z, Mat3, Quaternion, Vec3};
use proptest::prelude::*;

fn unit_quat() -> impl Strategy<Value = Quaternion> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-degenerate", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
        .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z).normalize())
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Rodrigues' formula, built without quaternions.
fn axis_angle_matrix(axis: &Vec3, angle: f64) -> Mat3 {
    let k = axis.normalize();
    let kx = Mat3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Mat3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

fn close(a: &Quaternion, b: &Quaternion, tol: f64) -> bool {
    (a.w - b.w).abs() < tol && (a.x - b.x).abs() < tol && (a.y - b.y).abs() < tol && (a.z - b.z).abs() < tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn product_is_associative(p in unit_quat(), q in unit_quat(), r in unit_quat()) {
        let a = quat_mul(&quat_mul(&p, &q), &r);
        let b = quat_mul(&p, &quat_mul(&q, &r));
        prop_assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn rotation_preserves_inner_products(q in unit_quat(), u in vec3(10.0), v in vec3(10.0)) {
        let lhs = quat_rotate(&q, &u).dot(&quat_rotate(&q, &v));
        prop_assert!((lhs - u.dot(&v)).abs() < 1e-12 * (1.0 + u.norm() * v.norm()));
    }

    #[test]
    fn rotation_matrix_is_proper_orthogonal(q in unit_quat()) {
        let r = q.rotation_matrix();
        prop_assert!((r.transpose() * r - Mat3::identity()).amax() < 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotate_matches_axis_angle_matrix(axis in vec3(1.0), angle in -PI..PI, u in vec3(5.0)) {
        prop_assume!(axis.norm() > 1e-3);
        let q = Quaternion::from_axis_angle(&axis, angle);
        let expect = axis_angle_matrix(&axis, angle) * u;
        prop_assert!((quat_rotate(&q, &u) - expect).norm() < 1e-12 * (1.0 + u.norm()));
        prop_assert!((q.rotation_matrix() * u - expect).norm() < 1e-12 * (1.0 + u.norm()));
    }

    #[test]
    fn attitude_quaternions_stay_normalized(p in unit_quat(), q in unit_quat()) {
        let n = quat_mul(&p, &q).norm();
        prop_assert!((n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matrix_round_trip_up_to_sign(q in unit_quat()) {
        let back = Quaternion::from_rotation_matrix(&q.rotation_matrix());
        prop_assert!(close(&back.canonical(), &q.canonical(), 1e-9));
    }

    #[test]
    fn error_angle_norm_is_geodesic_angle(q in unit_quat()) {
        let q = q.canonical();
        let xi = error_angles(&q);
        prop_assert!((xi.norm() - 2.0 * q.w.min(1.0).acos()).abs() < 1e-9);
        // and points along the rotation axis
        if q.vector().norm() > 1e-6 {
            prop_assert!(xi.normalize().cross(&q.vector().normalize()).norm() < 1e-9);
        }
    }

    #[test]
    fn error_angles_ignore_the_double_cover(q in unit_quat()) {
        prop_assert!((error_angles(&q) - error_angles(&-q)).norm() < 1e-12);
    }

    #[test]
    fn tilt_aligns_thrust_direction(q in unit_quat(), t in vec3(15.0), yaw in -PI..PI) {
        let thrust = t - 9.81 * i_z();
        prop_assume!(thrust.norm() > 0.5);
        let cmd = attitude_command(&thrust, &q, yaw);
        let frame = q * cmd.tilt;
        let minus_bz = quat_rotate(&frame, &(-i_z()));
        // nonsingular: commanded direction not opposite the current one
        prop_assume!((q.rotate_inverse(&thrust.normalize()).z - 1.0).abs() > 1e-6);
        prop_assert!(minus_bz.cross(&thrust.normalize()).norm() < 1e-9);
        prop_assert!(minus_bz.dot(&thrust) > 0.0);
    }

    #[test]
    fn full_command_puts_body_x_in_the_yaw_plane(q in unit_quat(), t in vec3(8.0), yaw in -PI..PI) {
        let thrust = t - 9.81 * i_z();
        let cmd = attitude_command(&thrust, &q, yaw);
        let frame = q * cmd.total;
        let bx = quat_rotate(&frame, &Vec3::x());
        let n = Vec3::new(yaw.sin(), -yaw.cos(), 0.0);
        let bz = quat_rotate(&frame, &Vec3::z());
        // away from the singular case where b_z lies along n
        prop_assume!(bz.cross(&n).norm() > 1e-3);
        prop_assert!(bx.dot(&n).abs() < 1e-9, "b_x . n = {}", bx.dot(&n));
        // thrust alignment survives the yaw rotation
        prop_assert!(quat_rotate(&frame, &(-i_z())).cross(&thrust.normalize()).norm() < 1e-9);
        // heading is the reference or its reverse
        let psi = yaw_of(&frame).unwrap();
        let d = wrap_angle(psi - yaw).abs();
        prop_assert!(d < 1e-6 || (d - PI).abs() < 1e-6, "yaw {psi} vs {yaw}");
    }
}

#[test]
fn level_command_keeps_reference_heading() {
    for yaw in [-3.0, -1.0, 0.0, 0.5, 2.0] {
        let q = Quaternion::from_yaw(yaw + 0.1);
        let cmd = attitude_command(&(-9.81 * i_z()), &q, yaw);
        let psi = yaw_of(&(q * cmd.total)).unwrap();
        assert!(wrap_angle(psi - yaw).abs() < 1e-9, "{psi} vs {yaw}");
    }
}
