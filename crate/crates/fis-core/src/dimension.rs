//! Dimension machinery: singular value functions, the affinity dimension of
//! the surface systems (structured two-branch solver plus a generic SVD
//! solver), closed forms, log–log box-count fits, and entropy/Lyapunov
//! lower-bound diagnostics including the class-multiplicity failure interval
//! for uniform vertical scales.

use crate::attractor::OccupancyTable;
use crate::geometry::Mat3;
use crate::surface::SurfaceIfs;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DimensionError {
    #[error("need at least one map")]
    Empty,
    #[error("scale factors must lie in (0, 1)")]
    ScaleOutOfRange,
    #[error("need at least {needed} samples for a fit, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("weights must be positive and sum to 1")]
    BadWeights,
    #[error("subdivision parameter must be at least 3")]
    BadSubdivision,
}

const BISECTION_ITERS: usize = 200;

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    // f must be positive at lo and negative at hi.
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Singular values of a 3×3 matrix, descending.
pub fn singular_values3(m: &Mat3) -> [f64; 3] {
    let svd = m.svd(false, false);
    let mut s = [
        svd.singular_values[0],
        svd.singular_values[1],
        svd.singular_values[2],
    ];
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// φᵗ(M): product of the ⌈t⌉ largest singular values with the last raised to
/// the fractional power, extended by |det M|^{t/3} for t > 3.
pub fn singular_value_function(m: &Mat3, t: f64) -> f64 {
    let [s1, s2, s3] = singular_values3(m);
    if t <= 0.0 {
        1.0
    } else if t <= 1.0 {
        s1.powf(t)
    } else if t <= 2.0 {
        s1 * s2.powf(t - 1.0)
    } else if t <= 3.0 {
        s1 * s2 * s3.powf(t - 2.0)
    } else {
        m.determinant().abs().powf(t / 3.0)
    }
}

/// Zero of t ↦ Σᵢ φᵗ(Mᵢ) − 1 for strictly contractive matrices, by
/// bisection over [0, 6].
pub fn affinity_dimension_svd(mats: &[Mat3]) -> Result<f64, DimensionError> {
    if mats.is_empty() {
        return Err(DimensionError::Empty);
    }
    for m in mats {
        if singular_values3(m)[0] >= 1.0 {
            return Err(DimensionError::ScaleOutOfRange);
        }
    }
    let f = |t: f64| mats.iter().map(|m| singular_value_function(m, t)).sum::<f64>() - 1.0;
    Ok(bisect(0.0, 6.0, f))
}

/// Which branch of the two-branch pressure equation determined the affinity
/// dimension of a surface system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffinityBranch {
    /// The vertical scales alone decide the root: Σ sᵢ^t = 1.
    HeightOnly,
    /// The planar contraction enters: Σ sᵢ λᵢ^{t−1} = 1.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinitySolution {
    /// Root of Σ sᵢ^t = 1.
    pub r1: f64,
    /// Root of Σ sᵢ λᵢ^{t−1} = 1.
    pub r2: f64,
    /// min(r1, r2): the affinity dimension.
    pub t0: f64,
    pub branch: AffinityBranch,
}

/// Structured affinity dimension for vertical scales `s` and per-map planar
/// contraction ratios `lambda` (all in (0,1), s_i > λ_i).
pub fn affinity_dimension(s: &[f64], lambda: &[f64]) -> Result<AffinitySolution, DimensionError> {
    if s.is_empty() || s.len() != lambda.len() {
        return Err(DimensionError::Empty);
    }
    if s.iter().chain(lambda).any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(DimensionError::ScaleOutOfRange);
    }
    let r1 = bisect(0.0, 400.0, |t| {
        s.iter().map(|si| si.powf(t)).sum::<f64>() - 1.0
    });
    let r2 = bisect(1.0, 400.0, |t| {
        s.iter()
            .zip(lambda)
            .map(|(si, li)| si * li.powf(t - 1.0))
            .sum::<f64>()
            - 1.0
    });
    let (t0, branch) = if r1 <= r2 {
        (r1, AffinityBranch::HeightOnly)
    } else {
        (r2, AffinityBranch::Mixed)
    };
    Ok(AffinitySolution { r1, r2, t0, branch })
}

/// Structured affinity dimension of a built surface system.
pub fn surface_affinity_dimension(ifs: &SurfaceIfs) -> Result<AffinitySolution, DimensionError> {
    let lambda = vec![ifs.lambda; ifs.map_count()];
    affinity_dimension(&ifs.s, &lambda)
}

/// Closed form for the N²-map family on the mixed branch:
/// 1 + log(Σ sᵢ) / log N.
pub fn closed_form_subdivided(n: usize, s: &[f64]) -> Result<f64, DimensionError> {
    if s.len() != n * n {
        return Err(DimensionError::Empty);
    }
    Ok(1.0 + s.iter().sum::<f64>().ln() / (n as f64).ln())
}

/// Closed form for the 4-map rotational family: 3 + log s / log 2.
pub fn closed_form_quartic(s: f64) -> Result<f64, DimensionError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(DimensionError::ScaleOutOfRange);
    }
    Ok(3.0 + s.ln() / 2.0_f64.ln())
}

/// Ordinary least-squares fit of log N_δ against log(1/δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 when only two samples).
    pub slope_std_err: f64,
}

pub fn box_dimension_fit(table: &OccupancyTable) -> Result<BoxFit, DimensionError> {
    let n = table.scales.len();
    if n < 2 {
        return Err(DimensionError::TooFewSamples { needed: 2, got: n });
    }
    let xs: Vec<f64> = table.scales.iter().map(|d| (1.0 / d).ln()).collect();
    let ys: Vec<f64> = table.counts.iter().map(|&c| (c as f64).ln()).collect();
    let xm = xs.iter().sum::<f64>() / n as f64;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let slope_std_err = if n > 2 {
        let rss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(BoxFit {
        slope,
        intercept,
        slope_std_err,
    })
}

/// Shannon entropy in nats; requires a positive probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64, DimensionError> {
    if p.is_empty() || p.iter().any(|&x| !(x > 0.0)) {
        return Err(DimensionError::BadWeights);
    }
    if (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(DimensionError::BadWeights);
    }
    Ok(-p.iter().map(|x| x * x.ln()).sum::<f64>())
}

/// Lyapunov exponent −Σ pᵢ log λᵢ of a contracting system under weights p.
pub fn lyapunov_exponent(p: &[f64], contractions: &[f64]) -> Result<f64, DimensionError> {
    if p.len() != contractions.len() {
        return Err(DimensionError::Empty);
    }
    if contractions.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
        return Err(DimensionError::ScaleOutOfRange);
    }
    shannon_entropy(p)?; // weight validation
    Ok(-p.iter().zip(contractions).map(|(pi, li)| pi * li.ln()).sum::<f64>())
}

/// Entropy/Lyapunov dimension estimate for a 1D system, with the raw ratio
/// and its clip to the ambient dimension 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBound {
    pub entropy: f64,
    pub lyapunov: f64,
    pub raw_ratio: f64,
    pub clipped: f64,
}

pub fn entropy_lyapunov_bound(p: &[f64], contractions: &[f64]) -> Result<EntropyBound, DimensionError> {
    let entropy = shannon_entropy(p)?;
    let lyapunov = lyapunov_exponent(p, contractions)?;
    let raw_ratio = entropy / lyapunov;
    Ok(EntropyBound {
        entropy,
        lyapunov,
        raw_ratio,
        clipped: raw_ratio.min(1.0),
    })
}

/// Coincidence classes of the projected 1D maps of the N²-map family with
/// uniform vertical scale: nine classes whose sizes sum to N².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityProfile {
    pub n: usize,
    pub multiplicities: [usize; 9],
}

/// Indices (into the nine-entry multiplicity list) of the classes whose
/// projected maps share the fixed point at the origin.
const SHARED_FIXED_POINT_CLASSES: [usize; 5] = [0, 1, 6, 7, 8];

impl MultiplicityProfile {
    pub fn new(n: usize) -> Result<Self, DimensionError> {
        if n < 3 {
            return Err(DimensionError::BadSubdivision);
        }
        let m = [
            (n - 3) * (n - 2) / 2 + 3,
            if n >= 4 { (n - 4) * (n - 3) / 2 } else { 0 },
            n - 2,
            n - 2,
            n - 2,
            n - 2,
            n - 3,
            n - 2,
            1,
        ];
        debug_assert_eq!(m.iter().sum::<usize>(), n * n);
        Ok(Self {
            n,
            multiplicities: m,
        })
    }

    /// Entropy of the class distribution (mᵢ/N²), in nats.
    pub fn class_entropy(&self) -> f64 {
        let total = (self.n * self.n) as f64;
        -self
            .multiplicities
            .iter()
            .filter(|&&m| m > 0)
            .map(|&m| {
                let p = m as f64 / total;
                p * p.ln()
            })
            .sum::<f64>()
    }

    /// Effective entropy after merging the mass of the sign-flipping classes
    /// into each class that shares the fixed point at the origin: −Σ_{A}
    /// pᵢ log(pᵢ + P_B) − Σ_{B} pᵢ log pᵢ. Always ≤ the class entropy.
    pub fn overlap_corrected_entropy(&self) -> f64 {
        let total = (self.n * self.n) as f64;
        let p = |i: usize| self.multiplicities[i] as f64 / total;
        let pb: f64 = (0..9)
            .filter(|i| !SHARED_FIXED_POINT_CLASSES.contains(i))
            .map(p)
            .sum();
        let mut phi = 0.0;
        for i in 0..9 {
            if self.multiplicities[i] == 0 {
                continue;
            }
            if SHARED_FIXED_POINT_CLASSES.contains(&i) {
                phi += p(i) * (p(i) + pb).ln();
            } else {
                phi += p(i) * p(i).ln();
            }
        }
        -phi
    }
}

/// Which entropy enters the failure-interval computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    Plain,
    OverlapCorrected,
}

/// Interval of uniform vertical scales s on which the entropy/Lyapunov
/// lower bound H / log(Ns) drops below the target −log s / log N, i.e. the
/// bound fails to certify the projected dimension. `None` when the bound
/// never fails. Endpoints are located by bisection on each side of the
/// minimum of the defect in u = log s.
pub fn bound_failure_interval(
    n: usize,
    variant: BoundVariant,
) -> Result<Option<(f64, f64)>, DimensionError> {
    let profile = MultiplicityProfile::new(n)?;
    let h = match variant {
        BoundVariant::Plain => profile.class_entropy(),
        BoundVariant::OverlapCorrected => profile.overlap_corrected_entropy(),
    };
    let l = (n as f64).ln();
    // Defect f(u) = u² + uL + HL with u = log s: negative exactly where the
    // bound fails. Convex with minimum at u = −L/2.
    let f = |u: f64| u * u + u * l + h * l;
    let mid = -l / 2.0;
    if f(mid) >= 0.0 {
        return Ok(None);
    }
    let u_floor = (1e-15f64).ln();
    let lo = bisect(u_floor, mid, |u| f(u)); // f > 0 at u_floor for any n ≥ 3
    let hi = bisect(-1e-15, mid, |u| f(u));
    Ok(Some((lo.exp(), hi.exp())))
}
