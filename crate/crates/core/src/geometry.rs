//! Small 3-vector and box types shared by every module.
//!
//! Frame: Y is up, yaw rotates about Y, yaw 0 faces +Z and yaw 90 faces +X.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// A point or direction in meters. Serializes as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).length()
    }

    pub fn distance_squared(self, other: Vec3) -> f64 {
        let d = self - other;
        d.dot(d)
    }

    /// Length of the projection onto the horizontal (XZ) plane.
    pub fn horizontal_length(self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Componentwise linear interpolation, `t = 0` gives `self`.
    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        self + (other - self) * t
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned box given by its min and max corners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn from_center(center: Vec3, half_extents: Vec3) -> Self {
        Self::new(center - half_extents, center + half_extents)
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        self.min.distance(self.max)
    }

    pub fn is_well_formed(&self) -> bool {
        self.min.is_finite()
            && self.max.is_finite()
            && self.min.x <= self.max.x
            && self.min.y <= self.max.y
            && self.min.z <= self.max.z
    }

    /// The eight corners, ordered by bit pattern (x, y, z) over (min, max).
    pub fn corners(&self) -> [Vec3; 8] {
        let mut out = [Vec3::ZERO; 8];
        for (i, c) in out.iter_mut().enumerate() {
            *c = Vec3::new(
                if i & 1 == 0 { self.min.x } else { self.max.x },
                if i & 2 == 0 { self.min.y } else { self.max.y },
                if i & 4 == 0 { self.min.z } else { self.max.z },
            );
        }
        out
    }

    /// Entry distance of a ray into the box, if it hits in front of the origin.
    pub fn ray_hit(&self, origin: Vec3, dir: Vec3) -> Option<f64> {
        let mut t_near = f64::NEG_INFINITY;
        let mut t_far = f64::INFINITY;
        for (o, d, lo, hi) in [
            (origin.x, dir.x, self.min.x, self.max.x),
            (origin.y, dir.y, self.min.y, self.max.y),
            (origin.z, dir.z, self.min.z, self.max.z),
        ] {
            if d.abs() < 1e-12 {
                if o < lo || o > hi {
                    return None;
                }
                continue;
            }
            let (mut t0, mut t1) = ((lo - o) / d, (hi - o) / d);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_near = t_near.max(t0);
            t_far = t_far.min(t1);
            if t_near > t_far {
                return None;
            }
        }
        if t_far < 0.0 {
            None
        } else {
            Some(t_near.max(0.0))
        }
    }
}

/// Wraps an angle in degrees into `[0, 360)`.
pub fn normalize_yaw(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Wraps an angle in degrees into `(-180, 180]`.
pub fn wrap_signed(deg: f64) -> f64 {
    let r = normalize_yaw(deg);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Absolute circular distance between two angles in degrees, in `[0, 180]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_signed(a - b).abs()
}

/// Unit horizontal facing vector for a yaw in degrees.
pub fn facing(yaw_deg: f64) -> Vec3 {
    let r = yaw_deg.to_radians();
    Vec3::new(r.sin(), 0.0, r.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yaw_wraps() {
        assert_eq!(normalize_yaw(360.0), 0.0);
        assert_eq!(normalize_yaw(-90.0), 270.0);
        assert_eq!(normalize_yaw(-1e-18), 0.0);
        assert_eq!(wrap_signed(270.0), -90.0);
        assert_eq!(wrap_signed(180.0), 180.0);
        assert_eq!(wrap_signed(-180.0), 180.0);
        assert_eq!(circular_distance(350.0, 0.0), 10.0);
        assert_eq!(circular_distance(350.0, 315.0), 35.0);
    }

    #[test]
    fn ray_hits_box_in_front_only() {
        let b = Aabb::from_center(Vec3::new(0.0, 0.0, 5.0), Vec3::new(1.0, 1.0, 1.0));
        assert_eq!(b.ray_hit(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0)), Some(4.0));
        assert_eq!(b.ray_hit(Vec3::ZERO, Vec3::new(0.0, 0.0, -1.0)), None);
        assert_eq!(
            b.ray_hit(Vec3::new(0.0, 0.0, 5.0), Vec3::new(1.0, 0.0, 0.0)),
            Some(0.0)
        );
    }

    #[test]
    fn serializes_as_triple() {
        let v = Vec3::new(1.0, 2.5, -3.0);
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1.0,2.5,-3.0]");
        let back: Vec3 = serde_json::from_str("[1,2.5,-3]").unwrap();
        assert_eq!(back, v);
    }
}
