//! Attractor generation for affine IFSs: random-orbit (chaos game) sampling,
//! deterministic subdivision meshes for surface graphs, occupancy grids for
//! box counting, and file exports (OBJ / CSV / PGM).

use crate::geometry::{Affine2, Affine3, Mat2, Vec2, Vec3};
use crate::surface::{domain_triangle, SurfaceIfs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashSet;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttractorError {
    #[error("IFS map {index} is not contractive (operator norm {norm})")]
    NonContractive { index: usize, norm: f64 },
    #[error("weights must sum to 1 (got {0})")]
    BadWeights(f64),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("scales must be strictly decreasing and positive")]
    BadScales,
    #[error("triangle budget exceeded: {requested} > {budget}")]
    BudgetExceeded { requested: usize, budget: usize },
}

/// Sampled attractor points together with the sampling parameters.
#[derive(Debug, Clone)]
pub struct PointCloud<P> {
    pub points: Vec<P>,
    pub seed: u64,
    pub burn_in: usize,
    /// Number of RNG streams used; the cloud is deterministic given
    /// (seed, stream count) and independent of thread scheduling.
    pub streams: usize,
}

pub type PointCloud2 = PointCloud<Vec2>;
pub type PointCloud3 = PointCloud<Vec3>;

/// Default burn-in; the systems here contract by ≥ 1/3 per step, so the
/// residual bias after 100 steps is far below representable precision.
pub const DEFAULT_BURN_IN: usize = 100;

/// Minimal interface the chaos game needs from a map family.
pub trait IterableMap: Sync {
    type Point: Copy + Default + Send;
    fn step(&self, p: Self::Point) -> Self::Point;
    fn operator_norm(&self) -> f64;
}

impl IterableMap for Affine2 {
    type Point = Vec2;
    fn step(&self, p: Vec2) -> Vec2 {
        self.apply(p)
    }
    fn operator_norm(&self) -> f64 {
        Affine2::operator_norm(self)
    }
}

impl IterableMap for Affine3 {
    type Point = Vec3;
    fn step(&self, p: Vec3) -> Vec3 {
        self.apply(p)
    }
    fn operator_norm(&self) -> f64 {
        let l = &self.linear;
        if l[(0, 2)] == 0.0 && l[(1, 2)] == 0.0 {
            // Block lower-triangular (planar part independent of height):
            // orbits contract iff both diagonal blocks do; the gradient row
            // only adds a cross term that the diagonal contractions absorb.
            let planar = Mat2::new(l[(0, 0)], l[(0, 1)], l[(1, 0)], l[(1, 1)]);
            Affine2::new(planar, Vec2::zeros())
                .operator_norm()
                .max(l[(2, 2)].abs())
        } else {
            Affine3::operator_norm(self)
        }
    }
}

/// Random-orbit sampling of the attractor under the given probability
/// vector. Work is split into `streams` independent RNG streams (one seed,
/// per-stream stream index); the result does not depend on how streams are
/// scheduled across threads.
pub fn chaos_game<M: IterableMap>(
    maps: &[M],
    weights: &[f64],
    count: usize,
    seed: u64,
    burn_in: usize,
    streams: usize,
) -> Result<PointCloud<M::Point>, AttractorError> {
    assert!(count >= 1 && streams >= 1 && !maps.is_empty());
    for (index, map) in maps.iter().enumerate() {
        let norm = map.operator_norm();
        if norm >= 1.0 {
            return Err(AttractorError::NonContractive { index, norm });
        }
    }
    let total: f64 = weights.iter().sum();
    if weights.len() != maps.len() || (total - 1.0).abs() > 1e-12 {
        return Err(AttractorError::BadWeights(total));
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    *cumulative.last_mut().unwrap() = 1.0;

    let quotas: Vec<usize> = (0..streams)
        .map(|j| count / streams + usize::from(j < count % streams))
        .collect();
    let chunks: Vec<Vec<M::Point>> = quotas
        .par_iter()
        .enumerate()
        .map(|(j, &quota)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let mut p = M::Point::default();
            let mut out = Vec::with_capacity(quota);
            for step in 0..burn_in + quota {
                let u: f64 = rng.gen();
                let idx = cumulative.partition_point(|&c| c < u).min(maps.len() - 1);
                p = maps[idx].step(p);
                if step >= burn_in {
                    out.push(p);
                }
            }
            out
        })
        .collect();
    let mut points = Vec::with_capacity(count);
    for chunk in chunks {
        points.extend(chunk);
    }
    Ok(PointCloud {
        points,
        seed,
        burn_in,
        streams,
    })
}

/// Depth-d deterministic approximation of the surface graph: all length-d
/// map compositions applied to the flat domain triangle.
#[derive(Debug, Clone)]
pub struct SubdivisionMesh {
    pub depth: usize,
    pub triangles: Vec<[Vec3; 3]>,
}

pub const DEFAULT_TRIANGLE_BUDGET: usize = 1_000_000;

pub fn subdivision_mesh(
    ifs: &SurfaceIfs,
    depth: usize,
    budget: usize,
) -> Result<SubdivisionMesh, AttractorError> {
    let n = ifs.map_count();
    let requested = n.checked_pow(depth as u32).unwrap_or(usize::MAX);
    if requested > budget {
        return Err(AttractorError::BudgetExceeded { requested, budget });
    }
    let corners = domain_triangle();
    let mut triangles = vec![[
        Vec3::new(corners[0].x, corners[0].y, 0.0),
        Vec3::new(corners[1].x, corners[1].y, 0.0),
        Vec3::new(corners[2].x, corners[2].y, 0.0),
    ]];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(triangles.len() * n);
        for map in &ifs.maps {
            for tri in &triangles {
                next.push([map.apply(tri[0]), map.apply(tri[1]), map.apply(tri[2])]);
            }
        }
        triangles = next;
    }
    Ok(SubdivisionMesh { depth, triangles })
}

/// Grid occupancy counts per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyTable {
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Anything that can be snapped to an origin-anchored grid cell.
pub trait GridPoint: Sync {
    fn cell(&self, delta: f64) -> [i64; 3];
}

impl GridPoint for Vec2 {
    fn cell(&self, delta: f64) -> [i64; 3] {
        [(self.x / delta).floor() as i64, (self.y / delta).floor() as i64, 0]
    }
}

impl GridPoint for Vec3 {
    fn cell(&self, delta: f64) -> [i64; 3] {
        [
            (self.x / delta).floor() as i64,
            (self.y / delta).floor() as i64,
            (self.z / delta).floor() as i64,
        ]
    }
}

/// Number of distinct origin-anchored cells `floor(p/δ)` occupied by the
/// cloud, per scale. Scales must be strictly decreasing.
pub fn box_count<P: GridPoint>(points: &[P], scales: &[f64]) -> Result<OccupancyTable, AttractorError> {
    if points.is_empty() {
        return Err(AttractorError::EmptyCloud);
    }
    if scales.is_empty()
        || scales.iter().any(|&d| !(d > 0.0))
        || scales.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(AttractorError::BadScales);
    }
    let counts = scales
        .par_iter()
        .map(|&delta| {
            let mut cells: HashSet<[i64; 3]> = HashSet::with_capacity(points.len() / 4);
            for p in points {
                cells.insert(p.cell(delta));
            }
            cells.len() as u64
        })
        .collect();
    Ok(OccupancyTable {
        scales: scales.to_vec(),
        counts,
    })
}

/// ASCII OBJ export: three `v` records per triangle followed by `f` records.
pub fn export_obj(mesh: &SubdivisionMesh, path: &Path) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for tri in &mesh.triangles {
        for v in tri {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
    }
    for i in 0..mesh.triangles.len() {
        writeln!(w, "f {} {} {}", 3 * i + 1, 3 * i + 2, 3 * i + 3)?;
    }
    w.flush()
}

/// CSV export of a 3D cloud with `x,y,z` header.
pub fn export_csv_cloud(cloud: &PointCloud3, path: &Path) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "x,y,z")?;
    for p in &cloud.points {
        writeln!(w, "{},{},{}", p.x, p.y, p.z)?;
    }
    w.flush()
}

/// CSV export of an occupancy table with `delta,count` header.
pub fn export_csv_table(table: &OccupancyTable, path: &Path) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "delta,count")?;
    for (delta, count) in table.scales.iter().zip(&table.counts) {
        writeln!(w, "{},{}", delta, count)?;
    }
    w.flush()
}

/// P2 (ASCII) PGM heightmap: the mesh is rasterized on a `size × size` grid
/// over [0,1]², sampling each covered pixel from the containing triangle
/// (later triangles in mesh order win) and normalizing heights to 0..255.
/// Pixels outside the domain triangle are black.
pub fn export_pgm(mesh: &SubdivisionMesh, path: &Path, size: usize) -> std::io::Result<()> {
    let mut height = vec![f64::NAN; size * size];
    let (mut zmin, mut zmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for tri in &mesh.triangles {
        for v in tri {
            zmin = zmin.min(v.z);
            zmax = zmax.max(v.z);
        }
    }
    let span = if zmax > zmin { zmax - zmin } else { 1.0 };
    let px = |x: f64| (x * size as f64).floor().clamp(0.0, size as f64 - 1.0) as usize;
    for tri in &mesh.triangles {
        let (ax, ay) = (tri[0].x, tri[0].y);
        let (bx, by) = (tri[1].x, tri[1].y);
        let (cx, cy) = (tri[2].x, tri[2].y);
        let minx = px(ax.min(bx).min(cx));
        let maxx = px(ax.max(bx).max(cx));
        let miny = px(ay.min(by).min(cy));
        let maxy = px(ay.max(by).max(cy));
        let det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
        for gy in miny..=maxy {
            for gx in minx..=maxx {
                let x = (gx as f64 + 0.5) / size as f64;
                let y = (gy as f64 + 0.5) / size as f64;
                // Barycentric membership and interpolation; degenerate
                // xy-projections only touch their bounding pixel centers.
                let (u, v) = if det.abs() > 1e-300 {
                    (
                        ((x - ax) * (cy - ay) - (y - ay) * (cx - ax)) / det,
                        ((bx - ax) * (y - ay) - (by - ay) * (x - ax)) / det,
                    )
                } else {
                    continue;
                };
                if u >= -1e-12 && v >= -1e-12 && u + v <= 1.0 + 1e-12 {
                    let z = tri[0].z + u * (tri[1].z - tri[0].z) + v * (tri[2].z - tri[0].z);
                    height[gy * size + gx] = z;
                }
            }
        }
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "P2")?;
    writeln!(w, "{} {}", size, size)?;
    writeln!(w, "255")?;
    for gy in (0..size).rev() {
        let row: Vec<String> = (0..size)
            .map(|gx| {
                let h = height[gy * size + gx];
                if h.is_nan() {
                    "0".to_string()
                } else {
                    format!("{}", (((h - zmin) / span) * 255.0).round() as u32)
                }
            })
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()
}
