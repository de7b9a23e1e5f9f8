//! Analytic shape primitives and ray intersection.
//!
//! Objects are compositions of these primitives. Cylinders sit on their local
//! z = 0 plane with the axis along +z; boxes are centered on their local
//! origin; torus segments sweep an arc of a ring lying in the local xy plane.

use serde::{Deserialize, Serialize};

use crate::geometry::{v_add, v_cross, v_dot, v_norm, v_scale, v_sub, Pose, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Axis +z, base at z = 0, z ∈ [0, height].
    Cylinder { radius: f64, height: f64 },
    /// Centered at the local origin.
    Box { half_extents: [f64; 3] },
    /// Ring of radius `ring_radius` in the local xy plane, tube radius
    /// `tube_radius`, swept from `start_angle` to `end_angle` (radians,
    /// counterclockwise, start < end).
    TorusSegment {
        ring_radius: f64,
        tube_radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
}

impl Shape {
    /// All size parameters strictly positive?
    pub fn is_valid(&self) -> bool {
        match *self {
            Shape::Cylinder { radius, height } => radius > 0.0 && height > 0.0,
            Shape::Box { half_extents } => half_extents.iter().all(|&e| e > 0.0),
            Shape::TorusSegment { ring_radius, tube_radius, start_angle, end_angle } => {
                ring_radius > 0.0 && tube_radius > 0.0 && end_angle > start_angle
            }
        }
    }

    /// Center and radius of a local-frame bounding sphere.
    pub fn bounding_sphere(&self) -> (Vec3, f64) {
        match *self {
            Shape::Cylinder { radius, height } => {
                ([0.0, 0.0, 0.5 * height], (radius * radius + 0.25 * height * height).sqrt())
            }
            Shape::Box { half_extents } => ([0.0; 3], v_norm(half_extents)),
            Shape::TorusSegment { ring_radius, tube_radius, .. } => {
                ([0.0; 3], ring_radius + tube_radius)
            }
        }
    }
}

/// One shape within an object: the shape, its pose in the object frame, and
/// an optional color override (otherwise the object color is used).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub shape: Shape,
    pub local: PrimitivePlacement,
    #[serde(default)]
    pub color: Option<[u8; 3]>,
}

/// Placement of a primitive in the object frame: a translation plus a
/// rotation given as a scaled-axis vector (keeps the JSON schema compact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitivePlacement {
    pub translation: Vec3,
    #[serde(default)]
    pub rotation: Vec3,
}

impl PrimitivePlacement {
    pub fn at(translation: Vec3) -> Self {
        Self { translation, rotation: [0.0; 3] }
    }

    pub fn new(translation: Vec3, rotation: Vec3) -> Self {
        Self { translation, rotation }
    }

    pub fn to_pose(&self, frame: crate::geometry::Frame) -> Pose {
        Pose::new(
            self.translation,
            crate::geometry::Quat::from_scaled_axis(self.rotation),
            frame,
        )
    }
}

/// A ray in world coordinates with a precomputed normalized direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
}

/// A ray-primitive hit: parameter along the ray and the world-frame surface
/// normal.
#[derive(Debug, Clone, Copy)]
pub struct Hit {
    pub t: f64,
    pub normal: Vec3,
}

const T_MIN: f64 = 1e-6;

/// A primitive instanced into the world: rotation matrix + translation both
/// ways, plus a world bounding sphere for early-out tests.
pub struct PrimInstance {
    rot: [[f64; 3]; 3],     // local -> world
    rot_inv: [[f64; 3]; 3], // world -> local (transpose)
    trans: Vec3,
    pub shape: Shape,
    pub color: [u8; 3],
    pub object_index: usize,
    bound_center: Vec3,
    bound_radius: f64,
}

fn mat_mul_vec(m: &[[f64; 3]; 3], v: Vec3) -> Vec3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn transpose(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    [
        [m[0][0], m[1][0], m[2][0]],
        [m[0][1], m[1][1], m[2][1]],
        [m[0][2], m[1][2], m[2][2]],
    ]
}

impl PrimInstance {
    /// Instantiates a primitive under an object pose in the world.
    pub fn new(prim: &Primitive, object_pose: &Pose, color: [u8; 3], object_index: usize) -> Self {
        let local = prim.local.to_pose(object_pose.frame);
        let world = object_pose.compose(&local).expect("object pose composes with primitive");
        let rot = world.orientation.to_matrix();
        let (bc_local, br) = prim.shape.bounding_sphere();
        PrimInstance {
            rot,
            rot_inv: transpose(&rot),
            trans: world.position,
            shape: prim.shape.clone(),
            color: prim.color.unwrap_or(color),
            object_index,
            bound_center: world.transform_point(bc_local),
            bound_radius: br,
        }
    }

    /// Nearest positive intersection with the ray, if any.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        // Bounding-sphere early out.
        let oc = v_sub(self.bound_center, ray.origin);
        let along = v_dot(oc, ray.dir);
        let perp2 = v_dot(oc, oc) - along * along;
        if perp2 > self.bound_radius * self.bound_radius
            || along + self.bound_radius < T_MIN
        {
            return None;
        }

        let o = mat_mul_vec(&self.rot_inv, v_sub(ray.origin, self.trans));
        let d = mat_mul_vec(&self.rot_inv, ray.dir);

        let local_hit = match self.shape {
            Shape::Cylinder { radius, height } => cylinder_hit(o, d, radius, height),
            Shape::Box { half_extents } => box_hit(o, d, half_extents),
            Shape::TorusSegment { ring_radius, tube_radius, start_angle, end_angle } => {
                let (t0, t1) = (
                    (along - self.bound_radius).max(T_MIN),
                    along + self.bound_radius,
                );
                torus_segment_hit(o, d, ring_radius, tube_radius, start_angle, end_angle, t0, t1)
            }
        };

        local_hit.map(|(t, n_local)| Hit { t, normal: mat_mul_vec(&self.rot, n_local) })
    }
}

fn cylinder_hit(o: Vec3, d: Vec3, radius: f64, height: f64) -> Option<(f64, Vec3)> {
    let mut best: Option<(f64, Vec3)> = None;
    let mut consider = |t: f64, n: Vec3| {
        if t > T_MIN && best.map_or(true, |(bt, _)| t < bt) {
            best = Some((t, n));
        }
    };

    // Side surface.
    let a = d[0] * d[0] + d[1] * d[1];
    if a > 1e-12 {
        let b = o[0] * d[0] + o[1] * d[1];
        let c = o[0] * o[0] + o[1] * o[1] - radius * radius;
        let disc = b * b - a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-b - sq) / a, (-b + sq) / a] {
                let z = o[2] + t * d[2];
                if z >= 0.0 && z <= height {
                    let p = v_add(o, v_scale(d, t));
                    consider(t, [p[0] / radius, p[1] / radius, 0.0]);
                }
            }
        }
    }

    // End caps.
    if d[2].abs() > 1e-12 {
        for (zc, nz) in [(0.0, -1.0), (height, 1.0)] {
            let t = (zc - o[2]) / d[2];
            if t > T_MIN {
                let x = o[0] + t * d[0];
                let y = o[1] + t * d[1];
                if x * x + y * y <= radius * radius {
                    consider(t, [0.0, 0.0, nz]);
                }
            }
        }
    }

    best
}

fn box_hit(o: Vec3, d: Vec3, e: [f64; 3]) -> Option<(f64, Vec3)> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    let mut axis = 0usize;
    for i in 0..3 {
        if d[i].abs() < 1e-12 {
            if o[i].abs() > e[i] {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d[i];
        let (mut t0, mut t1) = ((-e[i] - o[i]) * inv, (e[i] - o[i]) * inv);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0 > t_enter {
            t_enter = t0;
            axis = i;
        }
        t_exit = t_exit.min(t1);
        if t_enter > t_exit {
            return None;
        }
    }
    if t_enter <= T_MIN {
        return None;
    }
    let p = o[axis] + t_enter * d[axis];
    let mut n = [0.0; 3];
    n[axis] = p.signum();
    Some((t_enter, n))
}

/// Signed distance to the torus segment (arc of ring with spherical caps at
/// the arc endpoints).
fn torus_segment_sdf(
    p: Vec3,
    ring: f64,
    tube: f64,
    a0: f64,
    a1: f64,
) -> f64 {
    let phi = p[1].atan2(p[0]);
    // Angles are stored in (-π, π]; the arc never wraps in our object
    // library, so a plain interval test suffices.
    if phi >= a0 && phi <= a1 {
        let q = (p[0] * p[0] + p[1] * p[1]).sqrt() - ring;
        (q * q + p[2] * p[2]).sqrt() - tube
    } else {
        let c0 = [ring * a0.cos(), ring * a0.sin(), 0.0];
        let c1 = [ring * a1.cos(), ring * a1.sin(), 0.0];
        let d0 = v_norm(v_sub(p, c0));
        let d1 = v_norm(v_sub(p, c1));
        d0.min(d1) - tube
    }
}

#[allow(clippy::too_many_arguments)]
fn torus_segment_hit(
    o: Vec3,
    d: Vec3,
    ring: f64,
    tube: f64,
    a0: f64,
    a1: f64,
    t0: f64,
    t1: f64,
) -> Option<(f64, Vec3)> {
    // Sphere-trace the exact SDF inside the bounding-sphere interval. The
    // SDF is exact, so full-length steps are safe.
    let mut t = t0;
    for _ in 0..96 {
        if t > t1 {
            return None;
        }
        let p = v_add(o, v_scale(d, t));
        let dist = torus_segment_sdf(p, ring, tube, a0, a1);
        if dist < 1e-6 {
            let phi = p[1].atan2(p[0]);
            let n = if phi >= a0 && phi <= a1 {
                let q = [ring * phi.cos(), ring * phi.sin(), 0.0];
                let v = v_sub(p, q);
                v_scale(v, 1.0 / v_norm(v).max(1e-12))
            } else {
                let c0 = [ring * a0.cos(), ring * a0.sin(), 0.0];
                let c1 = [ring * a1.cos(), ring * a1.sin(), 0.0];
                let c = if v_norm(v_sub(p, c0)) < v_norm(v_sub(p, c1)) { c0 } else { c1 };
                let v = v_sub(p, c);
                v_scale(v, 1.0 / v_norm(v).max(1e-12))
            };
            return Some((t, n));
        }
        t += dist.max(2e-6);
    }
    None
}

/// Intersection with the z = 0 table plane, restricted to the table extent.
pub fn table_hit(ray: &Ray, half_x: f64, half_y: f64) -> Option<Hit> {
    if ray.dir[2].abs() < 1e-12 {
        return None;
    }
    let t = -ray.origin[2] / ray.dir[2];
    if t <= T_MIN {
        return None;
    }
    let x = ray.origin[0] + t * ray.dir[0];
    let y = ray.origin[1] + t * ray.dir[1];
    if x.abs() <= half_x && y.abs() <= half_y {
        Some(Hit { t, normal: [0.0, 0.0, 1.0] })
    } else {
        None
    }
}

#[allow(dead_code)]
pub(crate) fn reflect(v: Vec3, n: Vec3) -> Vec3 {
    v_sub(v, v_scale(n, 2.0 * v_dot(v, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Frame, PlanarPose4};

    fn instance(shape: Shape, pose: Pose) -> PrimInstance {
        let prim = Primitive {
            shape,
            local: PrimitivePlacement::at([0.0; 3]),
            color: None,
        };
        PrimInstance::new(&prim, &pose, [200, 0, 0], 0)
    }

    fn down_ray(x: f64, y: f64, z: f64) -> Ray {
        Ray { origin: [x, y, z], dir: [0.0, 0.0, -1.0] }
    }

    #[test]
    fn cylinder_cap_hit_from_above() {
        let inst = instance(
            Shape::Cylinder { radius: 0.05, height: 0.1 },
            Pose::identity(Frame::World),
        );
        let hit = inst.intersect(&down_ray(0.0, 0.0, 1.0)).unwrap();
        assert!((hit.t - 0.9).abs() < 1e-9);
        assert!((hit.normal[2] - 1.0).abs() < 1e-9);
        // Outside the radius: miss.
        assert!(inst.intersect(&down_ray(0.06, 0.0, 1.0)).is_none());
    }

    #[test]
    fn cylinder_side_hit() {
        let inst = instance(
            Shape::Cylinder { radius: 0.05, height: 0.2 },
            Pose::identity(Frame::World),
        );
        let ray = Ray { origin: [1.0, 0.0, 0.1], dir: [-1.0, 0.0, 0.0] };
        let hit = inst.intersect(&ray).unwrap();
        assert!((hit.t - 0.95).abs() < 1e-9);
        assert!((hit.normal[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn box_hit_and_normal() {
        let inst = instance(
            Shape::Box { half_extents: [0.1, 0.2, 0.3] },
            PlanarPose4::new(0.0, 0.0, 0.5, 0.0).to_pose(Frame::World),
        );
        let hit = inst.intersect(&down_ray(0.05, -0.1, 2.0)).unwrap();
        assert!((hit.t - (2.0 - 0.8)).abs() < 1e-9);
        assert!((hit.normal[2] - 1.0).abs() < 1e-9);
        assert!(inst.intersect(&down_ray(0.15, 0.0, 2.0)).is_none());
    }

    #[test]
    fn torus_segment_hit_on_arc_and_miss_off_arc() {
        use std::f64::consts::PI;
        // Half-ring from 0 to π, ring 0.05, tube 0.01, in the xy plane at z=0.3.
        let inst = instance(
            Shape::TorusSegment {
                ring_radius: 0.05,
                tube_radius: 0.01,
                start_angle: 0.0,
                end_angle: PI,
            },
            PlanarPose4::new(0.0, 0.0, 0.3, 0.0).to_pose(Frame::World),
        );
        // Above the arc midpoint (φ = π/2 → (0, 0.05)).
        let hit = inst.intersect(&down_ray(0.0, 0.05, 1.0)).unwrap();
        assert!((hit.t - (1.0 - 0.3 - 0.01)).abs() < 1e-4);
        // Above the missing half (φ = −π/2).
        assert!(inst.intersect(&down_ray(0.0, -0.05, 1.0)).is_none());
    }

    #[test]
    fn rotated_cylinder_lies_along_x() {
        use std::f64::consts::FRAC_PI_2;
        // Rotate the +z axis onto +x: rotation about y by +π/2.
        let prim = Primitive {
            shape: Shape::Cylinder { radius: 0.02, height: 0.2 },
            local: PrimitivePlacement::new([0.0, 0.0, 0.02], [0.0, FRAC_PI_2, 0.0]),
            color: None,
        };
        let inst = PrimInstance::new(&prim, &Pose::identity(Frame::World), [0; 3], 0);
        // The cylinder now spans x ∈ [0, 0.2] at z = 0.02.
        let hit = inst.intersect(&down_ray(0.1, 0.0, 1.0)).unwrap();
        assert!((hit.t - (1.0 - 0.04)).abs() < 1e-9, "t = {}", hit.t);
        assert!(inst.intersect(&down_ray(-0.05, 0.0, 1.0)).is_none());
    }

    #[test]
    fn table_hit_respects_extent() {
        let ray = down_ray(0.2, 0.2, 0.7);
        let hit = table_hit(&ray, 0.35, 0.35).unwrap();
        assert!((hit.t - 0.7).abs() < 1e-12);
        assert!(table_hit(&down_ray(0.4, 0.0, 0.7), 0.35, 0.35).is_none());
    }
}
