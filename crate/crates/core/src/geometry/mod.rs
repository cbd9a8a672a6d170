//! Triangle-mesh scene representation and exact ray / visibility queries.
//!
//! A [`Scene`] is immutable after construction: triangles, a material table,
//! an axis-aligned bounding box, and a BVH built with a binned
//! surface-area heuristic. Intersection and visibility queries are pure and
//! can run from many threads concurrently.

mod aabb;
mod bvh;
mod mesh;

pub use aabb::Aabb;
pub use bvh::{Bvh, BvhAudit};
pub use mesh::{load_mesh_scene, parse_material_bindings, parse_obj};

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::float::{real, to_f64, Real};
use crate::materials::Material;

/// Self-intersection guard along a ray, meters. Scene scale is tens of
/// meters, so this sits far below feature size and well above f64 noise.
pub fn ray_epsilon<T: Real>() -> T {
    real(1e-6)
}

/// Minimum triangle area, m². Anything smaller is rejected as degenerate.
pub fn degenerate_area_threshold<T: Real>() -> T {
    real(1e-12)
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("mesh parse error at line {line}: {message}")]
    MeshParse { line: usize, message: String },
    #[error("mesh contains no geometry")]
    NoGeometry,
    #[error("face group '{group}' has no material binding")]
    UnboundMaterial { group: String },
    #[error("material '{name}' not found in the material table")]
    UnknownMaterial { name: String },
    #[error("triangle {index} is degenerate (area below 1e-12 m^2)")]
    DegenerateTriangle { index: usize },
    #[error("triangle {index} references material id {id} outside the table")]
    BadMaterialId { index: usize, id: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid material bindings JSON: {0}")]
    BadBindings(#[from] serde_json::Error),
}

/// 3D vector, meters for positions and unitless for directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// Convenience constructor from `f64` literals.
    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(real(x), real(y), real(z))
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Unit vector in the same direction. Panics on (near-)zero input in
    /// debug builds; callers guard degenerate cases explicitly.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        debug_assert!(n > T::zero(), "normalizing zero-length vector");
        self / n
    }

    pub fn try_normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > real(1e-30) {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_unit(self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    pub fn min_component_axis(self) -> usize {
        let ax = self.x.abs();
        let ay = self.y.abs();
        let az = self.z.abs();
        if ax <= ay && ax <= az {
            0
        } else if ay <= az {
            1
        } else {
            2
        }
    }

    pub fn axis(self, i: usize) -> T {
        match i {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn componentwise_min(self, other: Self) -> Self {
        Self::new(
            self.x.min(other.x),
            self.y.min(other.y),
            self.z.min(other.z),
        )
    }

    pub fn componentwise_max(self, other: Self) -> Self {
        Self::new(
            self.x.max(other.x),
            self.y.max(other.y),
            self.z.max(other.z),
        )
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Lossy conversion for diagnostics and hashing.
    pub fn to_f64_array(self) -> [f64; 3] {
        [to_f64(self.x), to_f64(self.y), to_f64(self.z)]
    }
}

impl<T: Real> std::ops::Add for Vec3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Real> std::ops::Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Real> std::ops::Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> std::ops::Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl<T: Real> std::ops::Div<T> for Vec3<T> {
    type Output = Self;
    fn div(self, rhs: T) -> Self {
        Self::new(self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

// Serialized as a bare `[x, y, z]` triple to keep config files compact.
impl<T: Serialize> Serialize for Vec3<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(3)?;
        tup.serialize_element(&self.x)?;
        tup.serialize_element(&self.y)?;
        tup.serialize_element(&self.z)?;
        tup.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Vec3<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V3Visitor<T>(std::marker::PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V3Visitor<T> {
            type Value = Vec3<T>;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a [x, y, z] triple")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let x = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let y = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                let z = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(2, &self))?;
                if seq.next_element::<serde::de::IgnoredAny>()?.is_some() {
                    return Err(serde::de::Error::invalid_length(4, &self));
                }
                Ok(Vec3 { x, y, z })
            }
        }
        deserializer.deserialize_tuple(3, V3Visitor(std::marker::PhantomData))
    }
}

/// Mesh triangle with a material reference and a winding-derived unit normal.
#[derive(Clone, Copy, Debug)]
pub struct Triangle<T> {
    pub vertices: [Vec3<T>; 3],
    pub material_id: usize,
    normal: Vec3<T>,
    area: T,
}

impl<T: Real> Triangle<T> {
    /// Builds a triangle; the normal follows right-hand winding of the
    /// vertex order. Fails for areas below [`degenerate_area_threshold`].
    pub fn new(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>, material_id: usize) -> Option<Self> {
        let cross = (b - a).cross(c - a);
        let doubled = cross.norm();
        let area = doubled * real(0.5);
        if !(area > degenerate_area_threshold()) || !area.is_finite() {
            return None;
        }
        Some(Self {
            vertices: [a, b, c],
            material_id,
            normal: cross / doubled,
            area,
        })
    }

    pub fn normal(&self) -> Vec3<T> {
        self.normal
    }

    pub fn area(&self) -> T {
        self.area
    }

    pub fn centroid(&self) -> Vec3<T> {
        let [a, b, c] = self.vertices;
        (a + b + c) / real(3.0)
    }

    pub fn aabb(&self) -> Aabb<T> {
        let [a, b, c] = self.vertices;
        Aabb::of_point(a).expanded(b).expanded(c)
    }

    pub fn longest_edge(&self) -> T {
        let [a, b, c] = self.vertices;
        a.distance(b).max(b.distance(c)).max(c.distance(a))
    }

    /// Möller–Trumbore ray/triangle test. Returns `(t, front_face)` for the
    /// first forward intersection, ignoring hits outside `(t_min, t_max)`.
    pub fn intersect(
        &self,
        origin: Vec3<T>,
        direction: Vec3<T>,
        t_min: T,
        t_max: T,
    ) -> Option<(T, bool)> {
        let [a, b, c] = self.vertices;
        let e1 = b - a;
        let e2 = c - a;
        let p = direction.cross(e2);
        let det = e1.dot(p);
        if det.abs() < real(1e-14) {
            return None; // parallel
        }
        let inv_det = T::one() / det;
        let s = origin - a;
        let u = s.dot(p) * inv_det;
        if u < T::zero() || u > T::one() {
            return None;
        }
        let q = s.cross(e1);
        let v = direction.dot(q) * inv_det;
        if v < T::zero() || u + v > T::one() {
            return None;
        }
        let t = e2.dot(q) * inv_det;
        if t <= t_min || t >= t_max {
            return None;
        }
        Some((t, direction.dot(self.normal) < T::zero()))
    }

    /// Distance from a point to the triangle's supporting plane (signed,
    /// positive on the normal side).
    pub fn signed_distance(&self, point: Vec3<T>) -> T {
        (point - self.vertices[0]).dot(self.normal)
    }

    /// True when `point` lies on the triangle within `tol` (plane distance
    /// and barycentric containment).
    pub fn contains_point(&self, point: Vec3<T>, tol: T) -> bool {
        if self.signed_distance(point).abs() > tol {
            return false;
        }
        let [a, b, c] = self.vertices;
        let v0 = b - a;
        let v1 = c - a;
        let v2 = point - a;
        let d00 = v0.dot(v0);
        let d01 = v0.dot(v1);
        let d11 = v1.dot(v1);
        let d20 = v2.dot(v0);
        let d21 = v2.dot(v1);
        let denom = d00 * d11 - d01 * d01;
        if denom.abs() < real(1e-30) {
            return false;
        }
        let v = (d11 * d20 - d01 * d21) / denom;
        let w = (d00 * d21 - d01 * d20) / denom;
        let slack = tol.max(real(1e-9));
        v >= -slack && w >= -slack && v + w <= T::one() + slack
    }
}

/// Nearest-intersection record.
#[derive(Clone, Copy, Debug)]
pub struct RayHit<T> {
    /// Distance along the (unit) ray direction, meters. Always above the
    /// self-intersection epsilon.
    pub t: T,
    pub point: Vec3<T>,
    pub triangle_id: usize,
    /// True when the ray arrived against the triangle normal.
    pub front_face: bool,
}

/// Immutable triangle-mesh world with a material table and a BVH.
#[derive(Clone, Debug)]
pub struct Scene<T> {
    triangles: Vec<Triangle<T>>,
    materials: Vec<Material<T>>,
    bvh: Bvh<T>,
    bounds: Aabb<T>,
}

impl<T: Real> Scene<T> {
    /// Builds a scene from already-validated triangles and a material table.
    /// Every `material_id` must resolve.
    pub fn from_triangles(
        triangles: Vec<Triangle<T>>,
        materials: Vec<Material<T>>,
    ) -> Result<Self, GeometryError> {
        for (index, tri) in triangles.iter().enumerate() {
            if tri.material_id >= materials.len() {
                return Err(GeometryError::BadMaterialId {
                    index,
                    id: tri.material_id,
                });
            }
        }
        let bounds = triangles
            .iter()
            .map(Triangle::aabb)
            .fold(Aabb::empty(), Aabb::union);
        let bvh = Bvh::build(&triangles);
        Ok(Self {
            triangles,
            materials,
            bvh,
            bounds,
        })
    }

    /// Free-space scene: no geometry, no materials. Line-of-sight only.
    pub fn empty() -> Self {
        Self {
            triangles: Vec::new(),
            materials: Vec::new(),
            bvh: Bvh::build(&[]),
            bounds: Aabb::empty(),
        }
    }

    pub fn triangles(&self) -> &[Triangle<T>] {
        &self.triangles
    }

    pub fn triangle(&self, id: usize) -> &Triangle<T> {
        &self.triangles[id]
    }

    pub fn materials(&self) -> &[Material<T>] {
        &self.materials
    }

    pub fn material_of(&self, triangle_id: usize) -> &Material<T> {
        &self.materials[self.triangles[triangle_id].material_id]
    }

    pub fn bounds(&self) -> Aabb<T> {
        self.bounds
    }

    pub fn bvh(&self) -> &Bvh<T> {
        &self.bvh
    }

    /// Nearest hit along a unit-direction ray, honoring the
    /// self-intersection epsilon.
    pub fn intersect(&self, origin: Vec3<T>, direction: Vec3<T>) -> Option<RayHit<T>> {
        self.intersect_within(origin, direction, ray_epsilon(), T::infinity())
    }

    /// Nearest hit with an explicit `(t_min, t_max)` window.
    pub fn intersect_within(
        &self,
        origin: Vec3<T>,
        direction: Vec3<T>,
        t_min: T,
        t_max: T,
    ) -> Option<RayHit<T>> {
        self.bvh
            .nearest_hit(&self.triangles, origin, direction, t_min, t_max)
            .map(|(t, id, front_face)| RayHit {
                t,
                point: origin + direction * t,
                triangle_id: id,
                front_face,
            })
    }

    /// Reference implementation that scans every triangle. Kept as the
    /// independent oracle for the BVH.
    pub fn intersect_linear(&self, origin: Vec3<T>, direction: Vec3<T>) -> Option<RayHit<T>> {
        let mut best: Option<RayHit<T>> = None;
        let t_min = ray_epsilon();
        for (id, tri) in self.triangles.iter().enumerate() {
            let t_max = best.map_or(T::infinity(), |h| h.t);
            if let Some((t, front_face)) = tri.intersect(origin, direction, t_min, t_max) {
                best = Some(RayHit {
                    t,
                    point: origin + direction * t,
                    triangle_id: id,
                    front_face,
                });
            }
        }
        best
    }

    /// True iff the open segment `(a, b)` is unobstructed. The epsilon guard
    /// applies at both ends, so endpoints resting on geometry do not
    /// self-occlude.
    pub fn is_visible(&self, a: Vec3<T>, b: Vec3<T>) -> bool {
        let delta = b - a;
        let dist = delta.norm();
        if dist <= ray_epsilon::<T>() + ray_epsilon() {
            return true;
        }
        let dir = delta / dist;
        !self
            .bvh
            .any_hit(&self.triangles, a, dir, ray_epsilon(), dist - ray_epsilon())
    }

    /// Every intersection along the open segment `(a, b)`, sorted by
    /// distance. Near-coincident hits on coplanar triangles (shared
    /// edges/diagonals) are collapsed to one event.
    pub fn intersections_between(&self, a: Vec3<T>, b: Vec3<T>) -> Vec<RayHit<T>> {
        let delta = b - a;
        let dist = delta.norm();
        if dist <= ray_epsilon::<T>() + ray_epsilon() {
            return Vec::new();
        }
        let dir = delta / dist;
        let mut hits =
            self.bvh
                .all_hits(&self.triangles, a, dir, ray_epsilon(), dist - ray_epsilon());
        hits.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut out: Vec<RayHit<T>> = Vec::with_capacity(hits.len());
        for (t, id, front_face) in hits {
            if let Some(last) = out.last() {
                let coplanar = self.triangles[last.triangle_id]
                    .normal()
                    .dot(self.triangles[id].normal())
                    .abs()
                    > T::one() - real(1e-9);
                if (t - last.t).abs() < real(1e-7) && coplanar {
                    continue;
                }
            }
            out.push(RayHit {
                t,
                point: a + dir * t,
                triangle_id: id,
                front_face,
            });
        }
        out
    }

    /// Stable content hash over geometry and materials, for manifests.
    pub fn content_hash(&self) -> [u8; 32] {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update((self.triangles.len() as u64).to_le_bytes());
        for tri in &self.triangles {
            for v in tri.vertices {
                for c in v.to_f64_array() {
                    hasher.update(c.to_le_bytes());
                }
            }
            hasher.update((tri.material_id as u64).to_le_bytes());
        }
        for mat in &self.materials {
            hasher.update(mat.name.as_bytes());
            hasher.update(to_f64(mat.epsilon_r).to_le_bytes());
            hasher.update(to_f64(mat.sigma).to_le_bytes());
            hasher.update(to_f64(mat.scattering_coefficient).to_le_bytes());
            hasher.update(to_f64(mat.xpd_ratio).to_le_bytes());
        }
        hasher.finalize().into()
    }
}

#[cfg(test)]
mod tests;
