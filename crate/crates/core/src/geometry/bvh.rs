//! Binned SAH bounding volume hierarchy over scene triangles.
//!
//! Build is single-threaded and deterministic; traversal is pure. Leaves
//! hold at most [`MAX_LEAF_TRIANGLES`] triangles and depth is capped at
//! [`MAX_DEPTH`], with a median split fallback when the SAH degenerates.

use crate::float::{real, to_f64, Real};

use super::{Aabb, Triangle, Vec3};

pub const MAX_LEAF_TRIANGLES: usize = 4;
pub const MAX_DEPTH: usize = 64;
const SAH_BINS: usize = 16;

/// Inner nodes carry child indices; leaves carry a run `[start, start+count)`
/// into the triangle order. `count > 0` marks a leaf.
#[derive(Clone, Copy, Debug)]
struct Node<T> {
    aabb: Aabb<T>,
    left: u32,
    right: u32,
    start: u32,
    count: u32,
}

impl<T: Real> Node<T> {
    fn is_leaf(&self) -> bool {
        self.count > 0
    }
}

/// Flattened BVH. `order` is a permutation of triangle indices; leaves
/// reference contiguous runs of it.
#[derive(Clone, Debug)]
pub struct Bvh<T> {
    nodes: Vec<Node<T>>,
    order: Vec<u32>,
}

/// Structural audit used by tests and the validation suite.
#[derive(Clone, Debug)]
pub struct BvhAudit {
    pub max_depth: usize,
    pub leaf_count: usize,
    pub max_leaf_size: usize,
    /// Triangle ids reachable through leaves, sorted ascending.
    pub covered_triangles: Vec<usize>,
}

impl<T: Real> Bvh<T> {
    pub fn build(triangles: &[Triangle<T>]) -> Self {
        if triangles.is_empty() {
            return Self {
                nodes: Vec::new(),
                order: Vec::new(),
            };
        }
        let aabbs: Vec<Aabb<T>> = triangles.iter().map(Triangle::aabb).collect();
        let centroids: Vec<Vec3<T>> = aabbs.iter().map(|b| b.centroid()).collect();
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * triangles.len());
        nodes.push(Node {
            aabb: Aabb::empty(),
            left: 0,
            right: 0,
            start: 0,
            count: 0,
        });
        let len = order.len();
        Self::build_node(&mut nodes, 0, &mut order, 0, len, &aabbs, &centroids, 0);
        Self { nodes, order }
    }

    #[allow(clippy::too_many_arguments)]
    fn build_node(
        nodes: &mut Vec<Node<T>>,
        node_index: usize,
        order: &mut [u32],
        start: usize,
        end: usize,
        aabbs: &[Aabb<T>],
        centroids: &[Vec3<T>],
        depth: usize,
    ) {
        let slice = &order[start..end];
        let bounds = slice
            .iter()
            .map(|&i| aabbs[i as usize])
            .fold(Aabb::empty(), Aabb::union);
        let count = end - start;
        if count <= MAX_LEAF_TRIANGLES || depth + 1 >= MAX_DEPTH {
            nodes[node_index] = Node {
                aabb: bounds,
                left: 0,
                right: 0,
                start: start as u32,
                count: count as u32,
            };
            return;
        }

        let centroid_bounds = slice
            .iter()
            .map(|&i| Aabb::of_point(centroids[i as usize]))
            .fold(Aabb::empty(), Aabb::union);
        let extent = centroid_bounds.extent();
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let axis_min = centroid_bounds.min.axis(axis);
        let axis_extent = extent.axis(axis);

        let mut mid = start + count / 2;
        if axis_extent > real(1e-12) {
            // Binned SAH along the widest centroid axis.
            let mut bin_bounds = [Aabb::<T>::empty(); SAH_BINS];
            let mut bin_counts = [0usize; SAH_BINS];
            let scale = real::<T>(SAH_BINS as f64) / axis_extent;
            let bin_of = |i: u32| -> usize {
                let offset = (centroids[i as usize].axis(axis) - axis_min) * scale;
                (to_f64(offset) as usize).min(SAH_BINS - 1)
            };
            for &i in slice.iter() {
                let b = bin_of(i);
                bin_counts[b] += 1;
                bin_bounds[b] = bin_bounds[b].union(aabbs[i as usize]);
            }
            // Sweep for the cheapest split between bins.
            let mut suffix_area = [T::zero(); SAH_BINS];
            let mut suffix_count = [0usize; SAH_BINS];
            let mut acc = Aabb::empty();
            let mut n = 0usize;
            for b in (1..SAH_BINS).rev() {
                acc = acc.union(bin_bounds[b]);
                n += bin_counts[b];
                suffix_area[b] = acc.surface_area();
                suffix_count[b] = n;
            }
            let mut best_cost = T::infinity();
            let mut best_split = usize::MAX;
            let mut prefix = Aabb::empty();
            let mut prefix_count = 0usize;
            for b in 0..SAH_BINS - 1 {
                prefix = prefix.union(bin_bounds[b]);
                prefix_count += bin_counts[b];
                if prefix_count == 0 || suffix_count[b + 1] == 0 {
                    continue;
                }
                let cost = prefix.surface_area() * real(prefix_count as f64)
                    + suffix_area[b + 1] * real(suffix_count[b + 1] as f64);
                if cost < best_cost {
                    best_cost = cost;
                    best_split = b;
                }
            }
            if best_split != usize::MAX {
                let partition_point = stable_partition(&mut order[start..end], |&i| {
                    bin_of(i) <= best_split
                });
                if partition_point > 0 && partition_point < count {
                    mid = start + partition_point;
                } else {
                    // SAH picked an empty side; fall back to a median split.
                    order[start..end].sort_unstable_by(|&a, &b| {
                        centroids[a as usize]
                            .axis(axis)
                            .partial_cmp(&centroids[b as usize].axis(axis))
                            .unwrap()
                            .then(a.cmp(&b))
                    });
                    mid = start + count / 2;
                }
            } else {
                order[start..end].sort_unstable_by(|&a, &b| {
                    centroids[a as usize]
                        .axis(axis)
                        .partial_cmp(&centroids[b as usize].axis(axis))
                        .unwrap()
                        .then(a.cmp(&b))
                });
                mid = start + count / 2;
            }
        }

        let left = nodes.len();
        nodes.push(Node {
            aabb: Aabb::empty(),
            left: 0,
            right: 0,
            start: 0,
            count: 0,
        });
        let right = nodes.len();
        nodes.push(Node {
            aabb: Aabb::empty(),
            left: 0,
            right: 0,
            start: 0,
            count: 0,
        });
        nodes[node_index] = Node {
            aabb: bounds,
            left: left as u32,
            right: right as u32,
            start: 0,
            count: 0,
        };
        Self::build_node(nodes, left, order, start, mid, aabbs, centroids, depth + 1);
        Self::build_node(nodes, right, order, mid, end, aabbs, centroids, depth + 1);
    }

    /// Nearest intersection in `(t_min, t_max)`: `(t, triangle_id, front_face)`.
    pub fn nearest_hit(
        &self,
        triangles: &[Triangle<T>],
        origin: Vec3<T>,
        direction: Vec3<T>,
        t_min: T,
        t_max: T,
    ) -> Option<(T, usize, bool)> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv_dir = Vec3::new(
            T::one() / direction.x,
            T::one() / direction.y,
            T::one() / direction.z,
        );
        let mut best: Option<(T, usize, bool)> = None;
        let mut limit = t_max;
        let mut stack = [0u32; MAX_DEPTH + 2];
        let mut top = 0usize;
        stack[top] = 0;
        top += 1;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !node.aabb.intersects_ray(origin, inv_dir, t_min, limit) {
                continue;
            }
            if node.is_leaf() {
                for &id in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let tri = &triangles[id as usize];
                    if let Some((t, front)) = tri.intersect(origin, direction, t_min, limit) {
                        // Deterministic tie-break on identical t.
                        let replace = match best {
                            None => true,
                            Some((bt, bid, _)) => t < bt || (t == bt && (id as usize) < bid),
                        };
                        if replace {
                            best = Some((t, id as usize, front));
                            limit = t;
                        }
                    }
                }
            } else {
                stack[top] = node.left;
                top += 1;
                stack[top] = node.right;
                top += 1;
            }
        }
        best
    }

    /// True when anything intersects inside `(t_min, t_max)`; early exit.
    pub fn any_hit(
        &self,
        triangles: &[Triangle<T>],
        origin: Vec3<T>,
        direction: Vec3<T>,
        t_min: T,
        t_max: T,
    ) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let inv_dir = Vec3::new(
            T::one() / direction.x,
            T::one() / direction.y,
            T::one() / direction.z,
        );
        let mut stack = [0u32; MAX_DEPTH + 2];
        let mut top = 0usize;
        stack[top] = 0;
        top += 1;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !node.aabb.intersects_ray(origin, inv_dir, t_min, t_max) {
                continue;
            }
            if node.is_leaf() {
                for &id in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    if triangles[id as usize]
                        .intersect(origin, direction, t_min, t_max)
                        .is_some()
                    {
                        return true;
                    }
                }
            } else {
                stack[top] = node.left;
                top += 1;
                stack[top] = node.right;
                top += 1;
            }
        }
        false
    }

    /// Every intersection in `(t_min, t_max)`, unsorted.
    pub fn all_hits(
        &self,
        triangles: &[Triangle<T>],
        origin: Vec3<T>,
        direction: Vec3<T>,
        t_min: T,
        t_max: T,
    ) -> Vec<(T, usize, bool)> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let inv_dir = Vec3::new(
            T::one() / direction.x,
            T::one() / direction.y,
            T::one() / direction.z,
        );
        let mut stack = [0u32; MAX_DEPTH + 2];
        let mut top = 0usize;
        stack[top] = 0;
        top += 1;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if !node.aabb.intersects_ray(origin, inv_dir, t_min, t_max) {
                continue;
            }
            if node.is_leaf() {
                for &id in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    if let Some((t, front)) =
                        triangles[id as usize].intersect(origin, direction, t_min, t_max)
                    {
                        out.push((t, id as usize, front));
                    }
                }
            } else {
                stack[top] = node.left;
                top += 1;
                stack[top] = node.right;
                top += 1;
            }
        }
        out
    }

    pub fn audit(&self) -> BvhAudit {
        let mut audit = BvhAudit {
            max_depth: 0,
            leaf_count: 0,
            max_leaf_size: 0,
            covered_triangles: Vec::new(),
        };
        if self.nodes.is_empty() {
            return audit;
        }
        let mut stack = vec![(0u32, 1usize)];
        while let Some((index, depth)) = stack.pop() {
            let node = &self.nodes[index as usize];
            audit.max_depth = audit.max_depth.max(depth);
            if node.is_leaf() {
                audit.leaf_count += 1;
                audit.max_leaf_size = audit.max_leaf_size.max(node.count as usize);
                for &id in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    audit.covered_triangles.push(id as usize);
                }
            } else {
                stack.push((node.left, depth + 1));
                stack.push((node.right, depth + 1));
            }
        }
        audit.covered_triangles.sort_unstable();
        audit
    }
}

/// Stable in-place partition; returns the number of elements satisfying the
/// predicate (they end up first, preserving relative order on both sides).
fn stable_partition<E, F: FnMut(&E) -> bool>(slice: &mut [E], mut pred: F) -> usize
where
    E: Copy,
{
    let mut kept: Vec<E> = Vec::with_capacity(slice.len());
    let mut rest: Vec<E> = Vec::with_capacity(slice.len());
    for &e in slice.iter() {
        if pred(&e) {
            kept.push(e);
        } else {
            rest.push(e);
        }
    }
    let split = kept.len();
    for (dst, src) in slice.iter_mut().zip(kept.into_iter().chain(rest)) {
        *dst = src;
    }
    split
}
