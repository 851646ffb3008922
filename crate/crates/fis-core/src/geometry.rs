//! Planar and spatial primitives shared by the rest of the crate: float
//! vectors and affine maps, an exact scalar ring for the dihedral matrix
//! entries, and convex polygons with half-plane clipping.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

pub use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<f64>;
pub type Mat3 = Matrix3<f64>;

/// Default absolute tolerance for floating comparisons.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate polygon: fewer than 3 non-collinear vertices")]
    DegeneratePolygon,
    #[error("polygon is not convex")]
    NotConvex,
}

/// Affine map on the plane, `x ↦ L·x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub linear: Mat2,
    pub translation: Vec2,
}

impl Affine2 {
    pub fn new(linear: Mat2, translation: Vec2) -> Self {
        Self {
            linear,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Mat2::identity(), Vec2::zeros())
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.linear * p + self.translation
    }

    /// Operator (spectral) norm of the linear part.
    pub fn operator_norm(&self) -> f64 {
        self.linear.singular_values().max()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine2) -> Affine2 {
        Affine2::new(
            self.linear * other.linear,
            self.linear * other.translation + self.translation,
        )
    }

    /// Fixed point `(I − L)⁻¹ t`, if the map is not parabolic.
    pub fn fixed_point(&self) -> Option<Vec2> {
        (Mat2::identity() - self.linear)
            .try_inverse()
            .map(|inv| inv * self.translation)
    }
}

/// Affine map in space, `x ↦ L·x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine3 {
    pub linear: Mat3,
    pub translation: Vec3,
}

impl Affine3 {
    pub fn new(linear: Mat3, translation: Vec3) -> Self {
        Self {
            linear,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Mat3::identity(), Vec3::zeros())
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        self.linear * p + self.translation
    }

    pub fn operator_norm(&self) -> f64 {
        self.linear.singular_values().max()
    }

    pub fn compose(&self, other: &Affine3) -> Affine3 {
        Affine3::new(
            self.linear * other.linear,
            self.linear * other.translation + self.translation,
        )
    }
}

/// Exact scalar of the form `q + r·√3` with rational coefficients.
///
/// Every entry of the order-12 orthogonal group (0, ±1, ±1/2, ±√3/2) and
/// every translation component met in the graph-directed construction
/// (±1, ±1/√3, ±2/√3) is representable, and the set is closed under ring
/// arithmetic. Rational rather than integer coefficients are required:
/// products such as (1/2)·(1/2) leave any fixed-denominator lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DihedralScalar {
    pub q: Ratio<i64>,
    pub r: Ratio<i64>,
}

impl DihedralScalar {
    pub fn new(q: Ratio<i64>, r: Ratio<i64>) -> Self {
        Self { q, r }
    }

    /// `(p + r·√3)/2` for integer `p`, `r` — the form the group entries take.
    pub fn from_halves(p: i64, r: i64) -> Self {
        Self {
            q: Ratio::new(p, 2),
            r: Ratio::new(r, 2),
        }
    }

    pub fn from_int(p: i64) -> Self {
        Self {
            q: Ratio::from_integer(p),
            r: Ratio::zero(),
        }
    }

    /// `a/b + (c/d)·√3`.
    pub fn from_ratios(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            q: Ratio::new(a, b),
            r: Ratio::new(c, d),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero() && self.r.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.q) + ratio_to_f64(self.r) * 3.0_f64.sqrt()
    }

    /// Sign of the represented real number (exact).
    pub fn signum(&self) -> i32 {
        if self.q.is_zero() && self.r.is_zero() {
            return 0;
        }
        if !self.q.is_negative() && !self.r.is_negative() {
            return 1;
        }
        if self.q.is_negative() && self.r.is_negative() {
            return -1;
        }
        // Mixed signs: compare q² with 3r² (q + r√3 > 0 ⟺ q² − 3r² has the
        // sign of the positive-coefficient term's dominance).
        let q2 = self.q * self.q;
        let r2 = self.r * self.r * Ratio::from_integer(3);
        let q_positive = !self.q.is_negative();
        match q2.cmp(&r2) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => {
                if q_positive {
                    1
                } else {
                    -1
                }
            }
            std::cmp::Ordering::Less => {
                if q_positive {
                    -1
                } else {
                    1
                }
            }
        }
    }
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for DihedralScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            q: self.q + rhs.q,
            r: self.r + rhs.r,
        }
    }
}

impl Sub for DihedralScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            q: self.q - rhs.q,
            r: self.r - rhs.r,
        }
    }
}

impl Mul for DihedralScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // (q1 + r1√3)(q2 + r2√3) = q1q2 + 3r1r2 + (q1r2 + q2r1)√3
        Self {
            q: self.q * rhs.q + Ratio::from_integer(3) * self.r * rhs.r,
            r: self.q * rhs.r + self.r * rhs.q,
        }
    }
}

impl Neg for DihedralScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            q: -self.q,
            r: -self.r,
        }
    }
}

impl fmt::Display for DihedralScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.is_zero() {
            write!(f, "{}", self.q)
        } else if self.q.is_zero() {
            write!(f, "{}√3", self.r)
        } else {
            write!(f, "{} + {}√3", self.q, self.r)
        }
    }
}

/// Convex polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Builds a polygon from vertices, normalizing orientation to CCW.
    /// Rejects inputs with fewer than 3 non-collinear vertices or a
    /// non-convex boundary (beyond collinearity tolerance).
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::DegeneratePolygon);
        }
        let area2 = signed_area2(&vertices);
        let scale = vertices
            .iter()
            .map(|v| v.x.abs().max(v.y.abs()))
            .fold(1.0, f64::max);
        if area2.abs() <= 1e-14 * scale * scale {
            return Err(GeometryError::DegeneratePolygon);
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(b - a, c - b) < -1e-9 * scale * scale {
                return Err(GeometryError::NotConvex);
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area2(&self.vertices) / 2.0
    }

    /// Axis-aligned bounding box area; used to scale the emptiness threshold.
    pub fn bounding_area(&self) -> f64 {
        let (min, max) = self.bounds();
        (max.x - min.x) * (max.y - min.y)
    }

    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut min = self.vertices[0];
        let mut max = self.vertices[0];
        for v in &self.vertices {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        (min, max)
    }

    /// Point membership within absolute tolerance `tol` (positive `tol`
    /// accepts points slightly outside; negative demands interior margin).
    pub fn contains_point(&self, p: Vec2, tol: f64) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let edge = b - a;
            let len = edge.norm();
            if len == 0.0 {
                continue;
            }
            // Signed distance of p to the supporting line, positive inside.
            if cross(edge, p - a) / len < -tol {
                return false;
            }
        }
        true
    }

    /// True iff every vertex of `inner` lies in `self` within `tol`.
    pub fn contains_polygon(&self, inner: &ConvexPolygon, tol: f64) -> bool {
        inner.vertices.iter().all(|&v| self.contains_point(v, tol))
    }

    /// Image under an affine map. Orientation is re-normalized (the map may
    /// reverse it).
    pub fn transform(&self, map: &Affine2) -> Result<ConvexPolygon, GeometryError> {
        ConvexPolygon::new(self.vertices.iter().map(|&v| map.apply(v)).collect())
    }

    /// Convex intersection via half-plane clipping. Results with area below
    /// `1e−12 ×` the larger bounding area count as empty.
    pub fn clip(&self, other: &ConvexPolygon) -> Option<ConvexPolygon> {
        let eps_area = 1e-12 * self.bounding_area().max(other.bounding_area());
        clip_with_eps(self, other, eps_area)
    }
}

fn clip_with_eps(a: &ConvexPolygon, b: &ConvexPolygon, eps_area: f64) -> Option<ConvexPolygon> {
    let mut subject: Vec<Vec2> = a.vertices.clone();
    let n = b.vertices.len();
    for i in 0..n {
        let p = b.vertices[i];
        let q = b.vertices[(i + 1) % n];
        subject = clip_halfplane(&subject, p, q);
        if subject.len() < 3 {
            return None;
        }
    }
    let area = signed_area2(&subject) / 2.0;
    if area <= eps_area {
        return None;
    }
    // Drop duplicate vertices produced by clipping through existing corners.
    let scale = subject
        .iter()
        .map(|v| v.x.abs().max(v.y.abs()))
        .fold(1.0, f64::max);
    let mut dedup: Vec<Vec2> = Vec::with_capacity(subject.len());
    for v in subject {
        if dedup
            .last()
            .map_or(true, |&u| (u - v).norm() > 1e-12 * scale)
        {
            dedup.push(v);
        }
    }
    if dedup.len() >= 2 && (dedup[0] - *dedup.last().unwrap()).norm() <= 1e-12 * scale {
        dedup.pop();
    }
    if dedup.len() < 3 {
        return None;
    }
    ConvexPolygon::new(dedup).ok()
}

/// Keeps the part of `poly` on the left of the directed line `p → q`.
fn clip_halfplane(poly: &[Vec2], p: Vec2, q: Vec2) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let dir = q - p;
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let side_cur = cross(dir, cur - p);
        let side_nxt = cross(dir, nxt - p);
        if side_cur >= 0.0 {
            out.push(cur);
        }
        if (side_cur > 0.0 && side_nxt < 0.0) || (side_cur < 0.0 && side_nxt > 0.0) {
            let t = side_cur / (side_cur - side_nxt);
            out.push(cur + (nxt - cur) * t);
        }
    }
    out
}

/// Maximum k such that some k-subset of `polys` has an intersection with
/// nonempty interior. Intended for short lists (the callers pass ≤ 8).
pub fn arrangement_max_depth(polys: &[ConvexPolygon]) -> usize {
    assert!(polys.len() <= 16, "arrangement depth is exponential in n");
    if polys.is_empty() {
        return 0;
    }
    let eps_area = 1e-12
        * polys
            .iter()
            .map(ConvexPolygon::bounding_area)
            .fold(0.0, f64::max);
    let n = polys.len();
    // Memoized subset intersections: inter[mask] built from a sub-mask.
    let mut inter: Vec<Option<ConvexPolygon>> = vec![None; 1 << n];
    let mut best = 0;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let current = if rest == 0 {
            Some(polys[low].clone())
        } else {
            inter[rest]
                .as_ref()
                .and_then(|p| clip_with_eps(p, &polys[low], eps_area))
        };
        if current.is_some() {
            best = best.max(mask.count_ones() as usize);
        }
        inter[mask] = current;
    }
    best
}

pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area (positive for CCW).
fn signed_area2(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        s += a.x * b.y - a.y * b.x;
    }
    s
}
