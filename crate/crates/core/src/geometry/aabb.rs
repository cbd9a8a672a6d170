//! Axis-aligned bounding boxes for BVH construction and traversal.

use crate::float::{real, Real};

use super::Vec3;

#[derive(Clone, Copy, Debug)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn empty() -> Self {
        Self {
            min: Vec3::new(T::infinity(), T::infinity(), T::infinity()),
            max: Vec3::new(-T::infinity(), -T::infinity(), -T::infinity()),
        }
    }

    pub fn of_point(p: Vec3<T>) -> Self {
        Self { min: p, max: p }
    }

    pub fn expanded(self, p: Vec3<T>) -> Self {
        Self {
            min: self.min.componentwise_min(p),
            max: self.max.componentwise_max(p),
        }
    }

    pub fn union(self, other: Self) -> Self {
        Self {
            min: self.min.componentwise_min(other.min),
            max: self.max.componentwise_max(other.max),
        }
    }

    pub fn centroid(self) -> Vec3<T> {
        (self.min + self.max) * real(0.5)
    }

    pub fn extent(self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn is_empty(self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn surface_area(self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let e = self.extent();
        real::<T>(2.0) * (e.x * e.y + e.y * e.z + e.z * e.x)
    }

    pub fn contains(self, p: Vec3<T>, slack: T) -> bool {
        p.x >= self.min.x - slack
            && p.x <= self.max.x + slack
            && p.y >= self.min.y - slack
            && p.y <= self.max.y + slack
            && p.z >= self.min.z - slack
            && p.z <= self.max.z + slack
    }

    /// Slab test: does the ray touch the box anywhere in `(t_min, t_max)`?
    pub fn intersects_ray(self, origin: Vec3<T>, inv_dir: Vec3<T>, t_min: T, t_max: T) -> bool {
        let mut lo = t_min;
        let mut hi = t_max;
        for axis in 0..3 {
            let o = origin.axis(axis);
            let inv = inv_dir.axis(axis);
            let mut t0 = (self.min.axis(axis) - o) * inv;
            let mut t1 = (self.max.axis(axis) - o) * inv;
            if t0 > t1 {
                core::mem::swap(&mut t0, &mut t1);
            }
            lo = lo.max(t0);
            hi = hi.min(t1);
            if lo > hi {
                return false;
            }
        }
        true
    }
}
