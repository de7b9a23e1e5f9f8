//! Rigid-body math: poses, planar 4-DoF poses, end-effector twists, frame
//! transforms, and closed-form SE(3) twist integration.
//!
//! All values are immutable after construction and every operation is a pure
//! function. Orientations are unit quaternions, renormalized after each
//! composition so long trajectories do not drift.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance used when checking that a pose is planar (roll = pitch = 0).
pub const PLANAR_TOL: f64 = 1e-6;

// ---------------------------------------------------------------------------
// 3-vector helpers
// ---------------------------------------------------------------------------

pub type Vec3 = [f64; 3];

pub(crate) fn v_add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn v_sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn v_scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn v_dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn v_cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn v_norm(a: Vec3) -> f64 {
    v_dot(a, a).sqrt()
}

/// Wraps an angle to the half-open interval (−π, π].
///
/// Values already in range are returned unchanged, which makes the wrap
/// idempotent bit-for-bit.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(2.0 * PI); // [0, 2π)
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

// ---------------------------------------------------------------------------
// Quaternions
// ---------------------------------------------------------------------------

/// Unit quaternion (w, x, y, z) representing a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn from_yaw(theta: f64) -> Quat {
        let h = 0.5 * theta;
        Quat { w: h.cos(), x: 0.0, y: 0.0, z: h.sin() }
    }

    /// SO(3) exponential: rotation vector (axis * angle) to quaternion.
    pub fn from_scaled_axis(v: Vec3) -> Quat {
        let theta2 = v_dot(v, v);
        if theta2 < 1e-16 {
            // sin(θ/2)/θ ≈ 1/2 − θ²/48, cos(θ/2) ≈ 1 − θ²/8
            let k = 0.5 - theta2 / 48.0;
            Quat { w: 1.0 - theta2 / 8.0, x: v[0] * k, y: v[1] * k, z: v[2] * k }.normalized()
        } else {
            let theta = theta2.sqrt();
            let k = (0.5 * theta).sin() / theta;
            Quat {
                w: (0.5 * theta).cos(),
                x: v[0] * k,
                y: v[1] * k,
                z: v[2] * k,
            }
        }
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Quat {
        let n = self.norm();
        Quat { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }
    }

    pub fn conjugate(self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Hamilton product.
    pub fn mul(self, q: Quat) -> Quat {
        Quat {
            w: self.w * q.w - self.x * q.x - self.y * q.y - self.z * q.z,
            x: self.w * q.x + self.x * q.w + self.y * q.z - self.z * q.y,
            y: self.w * q.y - self.x * q.z + self.y * q.w + self.z * q.x,
            z: self.w * q.z + self.x * q.y - self.y * q.x + self.z * q.w,
        }
    }

    /// Rotates a vector.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        // q v q* via the two-cross-product form.
        let u = [self.x, self.y, self.z];
        let t = v_scale(v_cross(u, v), 2.0);
        v_add(v_add(v, v_scale(t, self.w)), v_cross(u, t))
    }

    /// Row-major 3×3 rotation matrix.
    pub fn to_matrix(self) -> [[f64; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    }

    /// Yaw (rotation about world z) under the ZYX convention.
    pub fn yaw(self) -> f64 {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        (2.0 * (w * z + x * y)).atan2(1.0 - 2.0 * (y * y + z * z))
    }

    /// Angle of the relative rotation between two quaternions, in radians.
    /// Uses the atan2 form, which stays accurate for tiny angles where acos
    /// loses precision.
    pub fn angle_to(self, other: Quat) -> f64 {
        let r = self.conjugate().mul(other);
        let vec_norm = (r.x * r.x + r.y * r.y + r.z * r.z).sqrt();
        2.0 * vec_norm.atan2(r.w.abs())
    }

    /// How far the rotated z-axis deviates from world z, in radians. Zero for
    /// pure-yaw rotations.
    pub fn tilt(self) -> f64 {
        let ez = self.rotate([0.0, 0.0, 1.0]);
        ez[2].clamp(-1.0, 1.0).acos()
    }
}

// ---------------------------------------------------------------------------
// Frames and poses
// ---------------------------------------------------------------------------

/// The frame a pose or twist is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    World,
    EndEffector,
    Object,
    Camera,
}

/// A rigid-body pose: position plus unit-quaternion orientation, tagged with
/// the frame it is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Quat,
    pub frame: Frame,
}

impl Pose {
    pub fn identity(frame: Frame) -> Pose {
        Pose { position: [0.0; 3], orientation: Quat::IDENTITY, frame }
    }

    pub fn new(position: Vec3, orientation: Quat, frame: Frame) -> Pose {
        Pose { position, orientation: orientation.normalized(), frame }
    }

    /// Rigid composition `self ∘ rhs`.
    ///
    /// Both operands in the same frame compose as group elements; otherwise
    /// `rhs` is treated as a relative pose hanging off `self`, which is why a
    /// World-expressed `rhs` cannot be appended to a non-World pose.
    pub fn compose(&self, rhs: &Pose) -> Result<Pose> {
        if rhs.frame == Frame::World && self.frame != Frame::World {
            return Err(Error::FrameMismatch { left: self.frame, right: rhs.frame });
        }
        Ok(Pose {
            position: v_add(self.position, self.orientation.rotate(rhs.position)),
            orientation: self.orientation.mul(rhs.orientation).normalized(),
            frame: self.frame,
        })
    }

    /// Inverse transform, expressed in the same frame tag.
    pub fn inverse(&self) -> Pose {
        let qi = self.orientation.conjugate();
        Pose {
            position: v_scale(qi.rotate(self.position), -1.0),
            orientation: qi,
            frame: self.frame,
        }
    }

    /// Transforms a point given in this pose's local frame into the frame the
    /// pose is expressed in.
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        v_add(self.position, self.orientation.rotate(p))
    }

    /// Euclidean distance between positions.
    pub fn distance_to(&self, other: &Pose) -> f64 {
        v_norm(v_sub(self.position, other.position))
    }

    /// Angle of the relative orientation, radians.
    pub fn angle_to(&self, other: &Pose) -> f64 {
        self.orientation.angle_to(other.orientation)
    }

    /// Reduces to a planar 4-DoF pose. Errors if roll or pitch exceed
    /// [`PLANAR_TOL`].
    pub fn planar(&self) -> Result<PlanarPose4> {
        let tilt = self.orientation.tilt();
        if tilt > PLANAR_TOL {
            return Err(Error::NonPlanar { value: tilt, limit: PLANAR_TOL });
        }
        Ok(PlanarPose4 {
            x: self.position[0],
            y: self.position[1],
            z: self.position[2],
            theta_z: wrap_angle(self.orientation.yaw()),
        })
    }
}

/// Planar 4-DoF pose (x, y, z, θ_z) with the yaw wrapped to (−π, π].
///
/// Construction is the single wrap site: any `PlanarPose4` in the program has
/// its angle already in range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPose4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    theta_z: f64,
}

impl PlanarPose4 {
    pub fn new(x: f64, y: f64, z: f64, theta_z: f64) -> PlanarPose4 {
        PlanarPose4 { x, y, z, theta_z: wrap_angle(theta_z) }
    }

    pub fn theta_z(&self) -> f64 {
        self.theta_z
    }

    pub fn to_pose(self, frame: Frame) -> Pose {
        Pose {
            position: [self.x, self.y, self.z],
            orientation: Quat::from_yaw(self.theta_z),
            frame,
        }
    }

    pub fn position(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    /// Composes two planar poses (`self` then `rhs` in self's frame).
    pub fn compose(&self, rhs: &PlanarPose4) -> PlanarPose4 {
        let (s, c) = (self.theta_z.sin(), self.theta_z.cos());
        PlanarPose4::new(
            self.x + c * rhs.x - s * rhs.y,
            self.y + s * rhs.x + c * rhs.y,
            self.z + rhs.z,
            self.theta_z + rhs.theta_z,
        )
    }
}

// ---------------------------------------------------------------------------
// Twists
// ---------------------------------------------------------------------------

/// Velocity limits used to validate twists.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwistLimits {
    pub max_linear: f64,
    pub max_angular: f64,
}

impl Default for TwistLimits {
    fn default() -> Self {
        TwistLimits { max_linear: 0.5, max_angular: 1.5 }
    }
}

/// A 6-DoF velocity: linear (m/s) and angular (rad/s) components plus the
/// frame they are expressed in. Recorded trajectories are always
/// end-effector-frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub linear: Vec3,
    pub angular: Vec3,
    pub frame: Frame,
}

impl Twist {
    pub fn zero(frame: Frame) -> Twist {
        Twist { linear: [0.0; 3], angular: [0.0; 3], frame }
    }

    /// End-effector-frame twist, validated against the default limits.
    pub fn ee(linear: Vec3, angular: Vec3) -> Twist {
        Twist::try_new(linear, angular, Frame::EndEffector, &TwistLimits::default())
            .expect("twist within default limits")
    }

    pub fn try_new(
        linear: Vec3,
        angular: Vec3,
        frame: Frame,
        limits: &TwistLimits,
    ) -> Result<Twist> {
        let all_finite = linear.iter().chain(angular.iter()).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidTwist("non-finite component".into()));
        }
        let lv = v_norm(linear);
        let av = v_norm(angular);
        if lv > limits.max_linear + 1e-12 {
            return Err(Error::InvalidTwist(format!(
                "|v| = {lv:.4} exceeds limit {:.4}",
                limits.max_linear
            )));
        }
        if av > limits.max_angular + 1e-12 {
            return Err(Error::InvalidTwist(format!(
                "|w| = {av:.4} exceeds limit {:.4}",
                limits.max_angular
            )));
        }
        Ok(Twist { linear, angular, frame })
    }
}

/// Integrates a constant body-frame twist over `dt` using the closed-form
/// SE(3) exponential, composed on the right of `p`.
///
/// Preconditions: `t` is end-effector-frame and `dt > 0`.
pub fn integrate_twist(p: &Pose, t: &Twist, dt: f64) -> Pose {
    debug_assert_eq!(t.frame, Frame::EndEffector, "integrate_twist needs a body-frame twist");
    debug_assert!(dt > 0.0, "dt must be positive");

    let w = v_scale(t.angular, dt);
    let v = v_scale(t.linear, dt);
    let theta2 = v_dot(w, w);

    // V(θ) = I + a·Ω + b·Ω² with Ω the skew matrix of w,
    // a = (1 − cos θ)/θ², b = (θ − sin θ)/θ³.
    let (a, b) = if theta2 < 1e-14 {
        (0.5 - theta2 / 24.0, 1.0 / 6.0 - theta2 / 120.0)
    } else {
        let theta = theta2.sqrt();
        ((1.0 - theta.cos()) / theta2, (theta - theta.sin()) / (theta2 * theta))
    };

    // V·v = v + a·(w × v) + b·(w × (w × v))
    let wv = v_cross(w, v);
    let wwv = v_cross(w, wv);
    let trans = v_add(v_add(v, v_scale(wv, a)), v_scale(wwv, b));

    let rot = Quat::from_scaled_axis(w);
    Pose {
        position: v_add(p.position, p.orientation.rotate(trans)),
        orientation: p.orientation.mul(rot).normalized(),
        frame: p.frame,
    }
}

// ---------------------------------------------------------------------------
// 4-DoF displacements
// ---------------------------------------------------------------------------

/// A 4-DoF displacement: translation expressed in the end-effector frame it
/// was computed from, plus a yaw offset in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Displacement4 {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    dtheta_z: f64,
}

impl Displacement4 {
    pub const ZERO: Displacement4 = Displacement4 { dx: 0.0, dy: 0.0, dz: 0.0, dtheta_z: 0.0 };

    pub fn new(dx: f64, dy: f64, dz: f64, dtheta_z: f64) -> Displacement4 {
        Displacement4 { dx, dy, dz, dtheta_z: wrap_angle(dtheta_z) }
    }

    pub fn dtheta_z(&self) -> f64 {
        self.dtheta_z
    }

    pub fn translation(&self) -> Vec3 {
        [self.dx, self.dy, self.dz]
    }

    pub fn translation_norm(&self) -> f64 {
        v_norm(self.translation())
    }
}

/// Computes the 4-DoF displacement that carries the end-effector at `p` to
/// the bottleneck `b`: the positional difference rotated into the
/// end-effector frame of `p`, with the yaw difference wrapped.
///
/// Both poses must be World-frame and planar.
pub fn displacement_to_bottleneck(p: &Pose, b: &Pose) -> Result<Displacement4> {
    if p.frame != b.frame {
        return Err(Error::FrameMismatch { left: p.frame, right: b.frame });
    }
    let pp = p.planar()?;
    let bp = b.planar()?;
    let d_world = v_sub(bp.position(), pp.position());
    let (s, c) = (pp.theta_z().sin(), pp.theta_z().cos());
    // R_z(−θ_p) · d_world
    let d_ee = [
        c * d_world[0] + s * d_world[1],
        -s * d_world[0] + c * d_world[1],
        d_world[2],
    ];
    Ok(Displacement4::new(d_ee[0], d_ee[1], d_ee[2], bp.theta_z() - pp.theta_z()))
}

/// Applies a 4-DoF displacement to the planar pose it was computed from,
/// reproducing the target pose.
pub fn apply_displacement(p: &Pose, d: &Displacement4) -> Result<Pose> {
    let pp = p.planar()?;
    let (s, c) = (pp.theta_z().sin(), pp.theta_z().cos());
    let world = [
        c * d.dx - s * d.dy,
        s * d.dx + c * d.dy,
        d.dz,
    ];
    Ok(PlanarPose4::new(
        pp.x + world[0],
        pp.y + world[1],
        pp.z + world[2],
        pp.theta_z() + d.dtheta_z(),
    )
    .to_pose(p.frame))
}
