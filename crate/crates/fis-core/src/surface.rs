//! Construction of the two triangular interpolation IFS families from data:
//! the N²-map wedding-cake family over a uniform triangulation of the
//! equilateral triangle, and the 4-map family with rotational orthogonal
//! parts. Both produce block lower-triangular affine maps
//! `[[λU_i, 0], [gᵢᵀ, sᵢ]]` plus a translation.

use crate::geometry::{Affine3, Mat2, Mat3, Vec2, Vec3};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Corners of the domain triangle Δ.
pub fn domain_triangle() -> [Vec2; 3] {
    [
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(0.5, SQRT3 / 2.0),
    ]
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("N must be at least 3, got {0}")]
    BadSubdivision(usize),
    #[error("expected {expected} scaling factors, got {got}")]
    WrongScaleCount { expected: usize, got: usize },
    #[error("scaling factor s[{index}] = {value} outside (0,1)")]
    ScaleOutOfRange { index: usize, value: f64 },
    #[error("boundary lattice point ({r},{c}) carries nonzero value {value}")]
    BoundaryValueNonzero { r: usize, c: usize, value: f64 },
    #[error("lattice coordinate ({r},{c}) outside the triangulation")]
    BadLatticeCoord { r: usize, c: usize },
    #[error("parameter a must be nonzero")]
    ZeroAmplitude,
    #[error("join-up verification failed on map {index}: residual {residual}")]
    JoinUpFailed { index: usize, residual: f64 },
}

/// Uniform triangulation of Δ with N subdivisions per side.
///
/// Lattice points are keyed by (row, column) with
/// `p(r,c) = (c/N + r/(2N), r·√3/(2N))`. Upward triangles are indexed
/// `1..N(N+1)/2` row-major bottom-to-top; downward triangles follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangulationSpec {
    pub n: usize,
}

impl TriangulationSpec {
    pub fn new(n: usize) -> Result<Self, SurfaceError> {
        if n < 3 {
            return Err(SurfaceError::BadSubdivision(n));
        }
        Ok(Self { n })
    }

    /// Number of lattice points, (N+1)(N+2)/2.
    pub fn lattice_count(&self) -> usize {
        (self.n + 1) * (self.n + 2) / 2
    }

    pub fn triangle_count(&self) -> usize {
        self.n * self.n
    }

    pub fn contains_coord(&self, r: usize, c: usize) -> bool {
        r <= self.n && c <= self.n - r
    }

    pub fn lattice_point(&self, r: usize, c: usize) -> Vec2 {
        let n = self.n as f64;
        Vec2::new(
            c as f64 / n + r as f64 / (2.0 * n),
            r as f64 * SQRT3 / (2.0 * n),
        )
    }

    pub fn is_boundary(&self, r: usize, c: usize) -> bool {
        r == 0 || c == 0 || r + c == self.n
    }

    /// Lattice coordinates of a point, if it is (approximately) on the lattice.
    pub fn coord_of_point(&self, p: Vec2, tol: f64) -> Option<(usize, usize)> {
        let n = self.n as f64;
        let rf = p.y * 2.0 * n / SQRT3;
        let r = rf.round();
        if r < 0.0 || (rf - r).abs() > tol {
            return None;
        }
        let cf = (p.x - r / (2.0 * n)) * n;
        let c = cf.round();
        if c < 0.0 || (cf - c).abs() > tol {
            return None;
        }
        let (r, c) = (r as usize, c as usize);
        self.contains_coord(r, c).then_some((r, c))
    }

    /// All N² triangles with their horizontal-edge endpoints and apex,
    /// in index order (1-based indices).
    pub fn triangles(&self) -> Vec<TrianglePatch> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        let mut index = 1;
        // Upward: the horizontal edge is the bottom edge, apex above.
        for r in 0..n {
            for j in 0..(n - r) {
                out.push(TrianglePatch {
                    index,
                    up: true,
                    left: (r, j),
                    right: (r, j + 1),
                    apex: (r + 1, j),
                });
                index += 1;
            }
        }
        // Downward: the horizontal edge is the top edge, apex below.
        for r in 0..n.saturating_sub(1) {
            for j in 0..(n - 1 - r) {
                out.push(TrianglePatch {
                    index,
                    up: false,
                    left: (r + 1, j),
                    right: (r + 1, j + 1),
                    apex: (r, j + 1),
                });
                index += 1;
            }
        }
        out
    }
}

/// One triangle of the triangulation: lattice coordinates of the
/// horizontal-edge endpoints (left, right) and of the apex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrianglePatch {
    pub index: usize,
    pub up: bool,
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub apex: (usize, usize),
}

/// Interpolation heights keyed by lattice coordinate; missing keys mean 0.
#[derive(Debug, Clone, Default)]
pub struct InterpolationData {
    pub values: HashMap<(usize, usize), f64>,
}

impl InterpolationData {
    pub fn value(&self, key: (usize, usize)) -> f64 {
        self.values.get(&key).copied().unwrap_or(0.0)
    }

    /// The N=3 single center peak of height `a` — the running example.
    pub fn center_peak(a: f64) -> Self {
        let mut values = HashMap::new();
        values.insert((1, 1), a);
        Self { values }
    }
}

/// Per-triangle record of the quantities the height maps are built from.
#[derive(Debug, Clone, Copy)]
pub struct TriangleRecord {
    pub index: usize,
    pub up: bool,
    /// Heights at the left and right vertices of the horizontal edge and at
    /// the apex.
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// Planar anchors: left and right vertices of the horizontal edge.
    pub left_anchor: Vec2,
    pub right_anchor: Vec2,
}

impl TriangleRecord {
    pub fn edge_gap(&self) -> f64 {
        (self.a1 - self.a2).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Massopust,
    GeronimoHardin,
}

/// Assembled block lower-triangular IFS for either construction.
#[derive(Debug, Clone)]
pub struct SurfaceIfs {
    pub construction: Construction,
    /// Planar contraction ratio λ shared by all maps (1/N resp. 1/2).
    pub lambda: f64,
    pub maps: Vec<Affine3>,
    /// 2×2 orthogonal parts U_i (the planar blocks are λ·U_i).
    pub orthogonal: Vec<Mat2>,
    /// Planar translations.
    pub planar_translation: Vec<Vec2>,
    /// Vertical scaling factors s_i.
    pub s: Vec<f64>,
    /// Gradient rows (a_i, b_i) of the height maps.
    pub gradient: Vec<Vec2>,
    /// Height offsets c_i.
    pub offset: Vec<f64>,
    /// Per-triangle data records (empty for the 4-map construction).
    pub records: Vec<TriangleRecord>,
    /// Interpolation amplitude for the 4-map construction; for the N²-map
    /// construction this is 0 and the records carry the data.
    pub a: f64,
    /// Subdivisions per side (N for the N²-map construction, 2 for 4-map).
    pub n: usize,
}

impl SurfaceIfs {
    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    /// Σ λ_i² over the planar blocks; equals 1 for both constructions.
    pub fn lambda_square_sum(&self) -> f64 {
        self.lambda * self.lambda * self.maps.len() as f64
    }
}

fn assemble_map(u: Mat2, t: Vec2, grad: Vec2, s: f64, c: f64) -> Affine3 {
    Affine3::new(
        Mat3::new(
            u[(0, 0)],
            u[(0, 1)],
            0.0,
            u[(1, 0)],
            u[(1, 1)],
            0.0,
            grad.x,
            grad.y,
            s,
        ),
        Vec3::new(t.x, t.y, c),
    )
}

/// Builds the N²-map IFS from interpolation data with zero boundary values.
///
/// For each triangle the planar similarity contracts by 1/N, flips x when
/// the right vertex of the horizontal edge carries the strictly larger
/// height, flips y for downward triangles, and translates to the
/// larger-height end of the horizontal edge. The height map
/// `V(x,y,z) = a·x + b·y + s·z + c` has `a = −|a1−a2|`,
/// `b = (2/√3)(a3 − (a1+a2)/2)`, `c = max(a1,a2)`, which is the unique
/// solution of the join-up conditions at the three corners (verified here
/// to 1e−12).
pub fn build_massopust(
    spec: TriangulationSpec,
    data: &InterpolationData,
    s: &[f64],
) -> Result<SurfaceIfs, SurfaceError> {
    let n = spec.n;
    if s.len() != n * n {
        return Err(SurfaceError::WrongScaleCount {
            expected: n * n,
            got: s.len(),
        });
    }
    for (index, &value) in s.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(SurfaceError::ScaleOutOfRange { index, value });
        }
    }
    for (&(r, c), &value) in &data.values {
        if !spec.contains_coord(r, c) {
            return Err(SurfaceError::BadLatticeCoord { r, c });
        }
        if spec.is_boundary(r, c) && value != 0.0 {
            return Err(SurfaceError::BoundaryValueNonzero { r, c, value });
        }
    }

    let lambda = 1.0 / n as f64;
    let mut ifs = SurfaceIfs {
        construction: Construction::Massopust,
        lambda,
        maps: Vec::new(),
        orthogonal: Vec::new(),
        planar_translation: Vec::new(),
        s: s.to_vec(),
        gradient: Vec::new(),
        offset: Vec::new(),
        records: Vec::new(),
        a: 0.0,
        n,
    };

    for patch in spec.triangles() {
        let i = patch.index - 1;
        let a1 = data.value(patch.left);
        let a2 = data.value(patch.right);
        let a3 = data.value(patch.apex);
        let record = TriangleRecord {
            index: patch.index,
            up: patch.up,
            a1,
            a2,
            a3,
            left_anchor: spec.lattice_point(patch.left.0, patch.left.1),
            right_anchor: spec.lattice_point(patch.right.0, patch.right.1),
        };
        let sx: f64 = if a1 >= a2 { 1.0 } else { -1.0 };
        let sy: f64 = if patch.up { 1.0 } else { -1.0 };
        let u = Mat2::new(sx, 0.0, 0.0, sy);
        let t = if a1 >= a2 {
            record.left_anchor
        } else {
            record.right_anchor
        };
        let grad = Vec2::new(
            -(a1 - a2).abs(),
            (2.0 / SQRT3) * (a3 - (a1 + a2) / 2.0),
        );
        let c = a1.max(a2);
        ifs.maps
            .push(assemble_map(u * lambda, t, grad, s[i], c));
        ifs.orthogonal.push(u);
        ifs.planar_translation.push(t);
        ifs.gradient.push(grad);
        ifs.offset.push(c);
        ifs.records.push(record);
    }

    verify_join_up(&spec, data, &ifs)?;
    Ok(ifs)
}

/// Join-up check: each corner of Δ (at height 0) must map to the graph point
/// over the corresponding lattice vertex.
fn verify_join_up(
    spec: &TriangulationSpec,
    data: &InterpolationData,
    ifs: &SurfaceIfs,
) -> Result<(), SurfaceError> {
    for (i, map) in ifs.maps.iter().enumerate() {
        for corner in domain_triangle() {
            let image = map.apply(Vec3::new(corner.x, corner.y, 0.0));
            let coord = spec
                .coord_of_point(Vec2::new(image.x, image.y), 1e-9)
                .ok_or(SurfaceError::JoinUpFailed {
                    index: i + 1,
                    residual: f64::INFINITY,
                })?;
            let residual = (image.z - data.value(coord)).abs();
            if residual > 1e-12 {
                return Err(SurfaceError::JoinUpFailed {
                    index: i + 1,
                    residual,
                });
            }
        }
    }
    Ok(())
}

/// Builds the 4-map IFS: three corner similarities built from ±120°
/// rotation/reflection parts and a middle half-turn, interpolating heights
/// `a` at the three edge midpoints of Δ.
pub fn build_geronimo_hardin(s: f64, a: f64) -> Result<SurfaceIfs, SurfaceError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SurfaceError::ScaleOutOfRange { index: 0, value: s });
    }
    if a == 0.0 {
        return Err(SurfaceError::ZeroAmplitude);
    }
    let h = SQRT3 / 4.0;
    let corner = Vec2::new(0.75, h);
    let orthogonal = [
        Mat2::new(0.5, SQRT3 / 2.0, SQRT3 / 2.0, -0.5),
        Mat2::new(0.5, -SQRT3 / 2.0, -SQRT3 / 2.0, -0.5),
        Mat2::new(-1.0, 0.0, 0.0, 1.0),
        Mat2::new(-1.0, 0.0, 0.0, -1.0),
    ];
    let translations = [Vec2::new(0.0, 0.0), corner, corner, corner];
    let gradients = [
        Vec2::new(a, a / SQRT3),
        Vec2::new(-a, a / SQRT3),
        Vec2::new(0.0, -2.0 * a / SQRT3),
        Vec2::new(0.0, 0.0),
    ];
    let offsets = [0.0, a, a, a];

    let mut ifs = SurfaceIfs {
        construction: Construction::GeronimoHardin,
        lambda: 0.5,
        maps: Vec::new(),
        orthogonal: orthogonal.to_vec(),
        planar_translation: translations.to_vec(),
        s: vec![s; 4],
        gradient: gradients.to_vec(),
        offset: offsets.to_vec(),
        records: Vec::new(),
        a,
        n: 2,
    };
    for k in 0..4 {
        ifs.maps.push(assemble_map(
            orthogonal[k] * 0.5,
            translations[k],
            gradients[k],
            s,
            offsets[k],
        ));
    }
    Ok(ifs)
}

/// Index classification by the sign of a1−a2 (1-based triangle indices) and
/// the derived interval constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    /// a1 = a2: the projected maps share the fixed point 0.
    pub a1_set: Vec<usize>,
    /// a1 > a2: orientation-preserving with positive offset.
    pub a2_set: Vec<usize>,
    /// a1 < a2: orientation-reversing with positive offset.
    pub a3_set: Vec<usize>,
    /// B = 1/(1 + max_{i∈A2} max_{k∈A3} gap_i/gap_k); absent if A2 or A3 empty.
    pub b: Option<f64>,
    /// D = min over ordered pairs (k,i) in A3 of gap_k/gap_i; absent if A3 empty.
    pub d: Option<f64>,
}

pub fn classify_and_constants(ifs: &SurfaceIfs) -> Classification {
    let mut a1_set = Vec::new();
    let mut a2_set = Vec::new();
    let mut a3_set = Vec::new();
    for rec in &ifs.records {
        if rec.a1 == rec.a2 {
            a1_set.push(rec.index);
        } else if rec.a1 > rec.a2 {
            a2_set.push(rec.index);
        } else {
            a3_set.push(rec.index);
        }
    }
    let gap = |idx: &usize| ifs.records[idx - 1].edge_gap();
    let a3_gaps: Vec<f64> = a3_set.iter().map(gap).collect();
    let d = if a3_gaps.is_empty() {
        None
    } else {
        let min = a3_gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = a3_gaps.iter().cloned().fold(0.0, f64::max);
        Some(min / max)
    };
    let b = if a2_set.is_empty() || a3_gaps.is_empty() {
        None
    } else {
        let min_a3 = a3_gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_bi = a2_set
            .iter()
            .map(|i| gap(i) / min_a3)
            .fold(0.0, f64::max);
        Some(1.0 / (1.0 + max_bi))
    };
    Classification {
        a1_set,
        a2_set,
        a3_set,
        b,
        d,
    }
}

/// Open parameter intervals per class: (1/N, 1) on A1, (1/(NB), 1) on A2,
/// (1/(ND), 1) on A3.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRegion {
    pub a1_low: f64,
    pub a2_low: Option<f64>,
    pub a3_low: Option<f64>,
}

impl ParameterRegion {
    pub fn from_classification(n: usize, class: &Classification) -> Self {
        let nf = n as f64;
        Self {
            a1_low: 1.0 / nf,
            a2_low: class.b.map(|b| 1.0 / (nf * b)),
            a3_low: class.d.map(|d| 1.0 / (nf * d)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionReport {
    pub ok: bool,
    /// (triangle index, s value, required lower bound) per violator.
    pub violations: Vec<(usize, f64, f64)>,
}

/// True iff every s_i lies strictly inside its class interval.
pub fn validate_region(
    ifs: &SurfaceIfs,
    class: &Classification,
    region: &ParameterRegion,
) -> RegionReport {
    let mut violations = Vec::new();
    let mut check = |set: &[usize], low: f64| {
        for &i in set {
            let s = ifs.s[i - 1];
            if !(s > low && s < 1.0) {
                violations.push((i, s, low));
            }
        }
    };
    check(&class.a1_set, region.a1_low);
    if let Some(low) = region.a2_low {
        check(&class.a2_set, low);
    }
    if let Some(low) = region.a3_low {
        check(&class.a3_set, low);
    }
    RegionReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// JSON configuration schema for building either construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub construction: Construction,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub data: Vec<DataEntry>,
    pub s: ScaleSpec,
    #[serde(default)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataEntry {
    pub r: usize,
    pub c: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Uniform(f64),
    PerMap(Vec<f64>),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("field `{0}` is required for this construction")]
    MissingField(&'static str),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<SurfaceIfs, ConfigError> {
        match self.construction {
            Construction::Massopust => {
                let n = self.n.ok_or(ConfigError::MissingField("n"))?;
                let spec = TriangulationSpec::new(n)?;
                let mut data = InterpolationData::default();
                for entry in &self.data {
                    data.values.insert((entry.r, entry.c), entry.value);
                }
                let s = match &self.s {
                    ScaleSpec::Uniform(s) => vec![*s; n * n],
                    ScaleSpec::PerMap(v) => v.clone(),
                };
                Ok(build_massopust(spec, &data, &s)?)
            }
            Construction::GeronimoHardin => {
                let s = match &self.s {
                    ScaleSpec::Uniform(s) => *s,
                    ScaleSpec::PerMap(v) => {
                        if v.len() != 1 {
                            return Err(ConfigError::MissingField("s (scalar)"));
                        }
                        v[0]
                    }
                };
                let a = self.a.ok_or(ConfigError::MissingField("a"))?;
                Ok(build_geronimo_hardin(s, a)?)
            }
        }
    }
}
