//! The planar similarity system induced by a block-triangular surface IFS
//! ("Furstenberg" system): axis projections and their invariant intervals,
//! the invariant hexagon of the 4-map family, exact overlap certificates via
//! interval/polygon arrangements, the covering lower bound, and the full
//! dimension-certificate pipeline.

use crate::attractor::chaos_game;
use crate::dimension::{surface_affinity_dimension, DimensionError};
use crate::geometry::{arrangement_max_depth, Affine2, ConvexPolygon, Mat2, Vec2};
use crate::surface::{classify_and_constants, Construction, SurfaceIfs, SQRT3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FurstenbergError {
    #[error("vertical scale s_{0} is zero")]
    ZeroScale(usize),
    #[error("projection not self-map: orthogonal parts are not axis-aligned")]
    NotAxisAligned,
    #[error("operation requires the {expected:?} construction")]
    WrongConstruction { expected: Construction },
    #[error("scale parameter out of range: {0}")]
    ScaleOutOfRange(f64),
    #[error("Q·p_min = {0} must lie in [0, 1)")]
    BoundDomain(f64),
    #[error("contraction parameter must lie in (0,1), got {0}")]
    BadContraction(f64),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("geometry failure: {0}")]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error("attractor failure: {0}")]
    Attractor(#[from] crate::attractor::AttractorError),
}

/// Planar similarity system h_i = (λ/s_i)·U_iᵀ x − a_i/s_i with the
/// stationary weights p_i = s_i λ^{t0−1}.
#[derive(Debug, Clone)]
pub struct FurstenbergIfs {
    pub construction: Construction,
    pub maps: Vec<Affine2>,
    /// For the 4-map family: the conjugated amplitude-normalized form with
    /// translations (±1, 1/√3), (0, −2/√3), (0, 0).
    pub canonical: Option<Vec<Affine2>>,
    pub weights: Vec<f64>,
    /// Affinity dimension used in the weight exponent.
    pub t0: f64,
    pub lambda: f64,
    pub s: Vec<f64>,
}

impl FurstenbergIfs {
    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    /// Largest contraction ratio λ/min sᵢ.
    pub fn lambda_max(&self) -> f64 {
        self.lambda / self.s.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub fn build_furstenberg(ifs: &SurfaceIfs) -> Result<FurstenbergIfs, FurstenbergError> {
    for (i, &si) in ifs.s.iter().enumerate() {
        if si == 0.0 {
            return Err(FurstenbergError::ZeroScale(i + 1));
        }
    }
    let t0 = surface_affinity_dimension(ifs)?.t0;
    let maps: Vec<Affine2> = ifs
        .orthogonal
        .iter()
        .zip(&ifs.s)
        .zip(&ifs.gradient)
        .map(|((u, &si), g)| {
            Affine2::new(u.transpose() * (ifs.lambda / si), -g / si)
        })
        .collect();
    let weights: Vec<f64> = ifs
        .s
        .iter()
        .map(|&si| si * ifs.lambda.powf(t0 - 1.0))
        .collect();
    let canonical = match ifs.construction {
        Construction::GeronimoHardin => Some(gh_canonical_family(ifs.s[0])),
        Construction::Massopust => None,
    };
    Ok(FurstenbergIfs {
        construction: ifs.construction,
        maps,
        canonical,
        weights,
        t0,
        lambda: ifs.lambda,
        s: ifs.s.clone(),
    })
}

/// The amplitude-normalized similarity family of the 4-map construction:
/// h_i = (1/(2s))·Q_i x + t_i with t₁ = (1, 1/√3), t₂ = (−1, 1/√3),
/// t₃ = (0, −2/√3), t₄ = (0, 0). Conjugate to the raw family by the
/// scaling x ↦ −(s/a)·x.
pub fn gh_canonical_family(s: f64) -> Vec<Affine2> {
    let f = 1.0 / (2.0 * s);
    let q = [
        Mat2::new(0.5, SQRT3 / 2.0, SQRT3 / 2.0, -0.5),
        Mat2::new(0.5, -SQRT3 / 2.0, -SQRT3 / 2.0, -0.5),
        Mat2::new(-1.0, 0.0, 0.0, 1.0),
        Mat2::new(-1.0, 0.0, 0.0, -1.0),
    ];
    let t = [
        Vec2::new(1.0, 1.0 / SQRT3),
        Vec2::new(-1.0, 1.0 / SQRT3),
        Vec2::new(0.0, -2.0 / SQRT3),
        Vec2::new(0.0, 0.0),
    ];
    q.iter().zip(t).map(|(qi, ti)| Affine2::new(qi * f, ti)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A signed 1D similarity f(x) = slope·x + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Map1 {
    pub slope: f64,
    pub offset: f64,
}

impl Map1 {
    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.offset
    }

    pub fn fixed_point(&self) -> f64 {
        self.offset / (1.0 - self.slope)
    }

    /// Image of an interval, endpoints sorted.
    pub fn image(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (a, b) = (self.apply(lo), self.apply(hi));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProjectedSystem {
    pub axis: Axis,
    pub maps: Vec<Map1>,
    pub s: Vec<f64>,
}

/// Axis projection of the planar system. Valid only when every orthogonal
/// part is diagonal (the N²-map family); the 4-map family's rotations mix
/// the axes and the projection is refused.
pub fn project_1d(fifs: &FurstenbergIfs, axis: Axis) -> Result<ProjectedSystem, FurstenbergError> {
    let idx = match axis {
        Axis::X => 0,
        Axis::Y => 1,
    };
    let mut maps = Vec::with_capacity(fifs.maps.len());
    for h in &fifs.maps {
        if h.linear[(0, 1)].abs() > 1e-12 || h.linear[(1, 0)].abs() > 1e-12 {
            return Err(FurstenbergError::NotAxisAligned);
        }
        maps.push(Map1 {
            slope: h.linear[(idx, idx)],
            offset: h.translation[idx],
        });
    }
    Ok(ProjectedSystem {
        axis,
        maps,
        s: fifs.s.clone(),
    })
}

/// An interval [lo, hi] together with the result of checking that every
/// projected map sends it into itself.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantInterval {
    pub lo: f64,
    pub hi: f64,
    pub verified: bool,
    /// (1-based map index, overshoot) for each containment violation.
    pub violations: Vec<(usize, f64)>,
}

const CONTAINMENT_TOL: f64 = 1e-10;

/// Smallest invariant interval containing all fixed points and 0: the seed
/// [min fix ∧ 0, max fix ∨ 0] is grown by the interval Hutchinson map
/// I ↦ I ∪ ⋃ f_i(I) until stable (geometric convergence since every
/// |slope| < 1). Containment of every image is then verified directly; a
/// failure is reported in the result, not as an error.
pub fn invariant_interval(sys: &ProjectedSystem) -> InvariantInterval {
    let fixes: Vec<f64> = sys.maps.iter().map(Map1::fixed_point).collect();
    let mut lo = fixes.iter().cloned().fold(0.0_f64, f64::min);
    let mut hi = fixes.iter().cloned().fold(0.0_f64, f64::max);
    for _ in 0..10_000 {
        let mut grew = false;
        for m in &sys.maps {
            let (a, b) = m.image(lo, hi);
            if a < lo - f64::EPSILON * lo.abs().max(1.0) {
                lo = a;
                grew = true;
            }
            if b > hi + f64::EPSILON * hi.abs().max(1.0) {
                hi = b;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let mut violations = Vec::new();
    for (i, m) in sys.maps.iter().enumerate() {
        let (a, b) = m.image(lo, hi);
        let overshoot = (lo - a).max(b - hi);
        if overshoot > CONTAINMENT_TOL {
            violations.push((i + 1, overshoot));
        }
    }
    InvariantInterval {
        lo,
        hi,
        verified: violations.is_empty(),
        violations,
    }
}

/// Whether the images of the invariant interval under the
/// orientation-reversing maps and the positively-shifted
/// orientation-preserving maps have disjoint interiors (endpoint touching
/// allowed).
pub fn interval_disjointness(sys: &ProjectedSystem, iv: &InvariantInterval) -> bool {
    let reversing: Vec<(f64, f64)> = sys
        .maps
        .iter()
        .filter(|m| m.slope < 0.0)
        .map(|m| m.image(iv.lo, iv.hi))
        .collect();
    let shifted: Vec<(f64, f64)> = sys
        .maps
        .iter()
        .filter(|m| m.slope > 0.0 && m.offset > 0.0)
        .map(|m| m.image(iv.lo, iv.hi))
        .collect();
    for &(a0, a1) in &reversing {
        for &(b0, b1) in &shifted {
            if a1.min(b1) - a0.max(b0) > 1e-12 {
                return false;
            }
        }
    }
    true
}

/// Parameter above which the triple overlap of the first three hexagon
/// images is interior-empty: (1 + √5)/4.
pub fn gh_threshold() -> f64 {
    (1.0 + 5.0_f64.sqrt()) / 4.0
}

/// The invariant hexagon of the amplitude-normalized 4-map family.
#[derive(Debug, Clone)]
pub struct InvariantHexagon {
    pub polygon: ConvexPolygon,
    pub a: Vec2,
    pub b: Vec2,
    pub c: Vec2,
    pub a_prime: Vec2,
    pub b_prime: Vec2,
    pub c_prime: Vec2,
    pub containment_ok: bool,
    /// (map index, offending image vertex) for containment failures.
    pub failures: Vec<(usize, Vec2)>,
}

/// Builds the hexagon A, C', B, A', C, B' (counterclockwise) from the
/// closed forms A = (4s/(4s−2), 4s/(√3(4s−2))), B its mirror,
/// C = (0, −8s/(√3(4s−2))), with primes the images under the central map
/// h₄ = −x/(2s); verifies h_i(hexagon) ⊆ hexagon for all four maps.
pub fn gh_hexagon(s: f64) -> Result<InvariantHexagon, FurstenbergError> {
    if !(s > 0.5 && s < 1.0) {
        return Err(FurstenbergError::ScaleOutOfRange(s));
    }
    let d = 4.0 * s - 2.0;
    let a = Vec2::new(4.0 * s / d, 4.0 * s / (SQRT3 * d));
    let b = Vec2::new(-a.x, a.y);
    let c = Vec2::new(0.0, -8.0 * s / (SQRT3 * d));
    let maps = gh_canonical_family(s);
    let h4 = &maps[3];
    let a_prime = h4.apply(a);
    let b_prime = h4.apply(b);
    let c_prime = h4.apply(c);
    let polygon = ConvexPolygon::new(vec![a, c_prime, b, a_prime, c, b_prime])?;
    let mut failures = Vec::new();
    for (i, h) in maps.iter().enumerate() {
        let image = polygon.transform(h)?;
        for v in image.vertices() {
            if !polygon.contains_point(*v, 1e-9) {
                failures.push((i + 1, *v));
            }
        }
    }
    Ok(InvariantHexagon {
        polygon,
        a,
        b,
        c,
        a_prime,
        b_prime,
        c_prime,
        containment_ok: failures.is_empty(),
        failures,
    })
}

/// The three coincidence points h₁(A'), h₂(B'), h₃(C'); all vanish at the
/// threshold parameter.
pub fn gh_coincidence(s: f64) -> Result<[Vec2; 3], FurstenbergError> {
    let hex = gh_hexagon(s)?;
    let maps = gh_canonical_family(s);
    Ok([
        maps[0].apply(hex.a_prime),
        maps[1].apply(hex.b_prime),
        maps[2].apply(hex.c_prime),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateMethod {
    BoxArrangement,
    PolygonArrangement,
}

/// Exact lower bound Q on the number of region images missing any given
/// point: Q = n_maps − depth, with depth the maximum interior multiplicity
/// of the image arrangement.
#[derive(Debug, Clone)]
pub struct OverlapCertificate {
    pub q: usize,
    pub depth: usize,
    pub method: CertificateMethod,
    /// Whether the theorem hypotheses backing the certificate held.
    pub hypotheses_met: bool,
    /// 4-map family only: interior-emptiness of the first triple overlap.
    pub triple_interior_empty: Option<bool>,
    pub notes: Vec<String>,
}

/// Certificate for the 4-map family at parameter s via the hexagon-image
/// polygon arrangement.
pub fn overlap_certificate_gh(s: f64) -> Result<OverlapCertificate, FurstenbergError> {
    let hex = gh_hexagon(s)?;
    let maps = gh_canonical_family(s);
    let images: Vec<ConvexPolygon> = maps
        .iter()
        .map(|h| hex.polygon.transform(h))
        .collect::<Result<_, _>>()?;
    let depth = arrangement_max_depth(&images);
    let triple = match images[0].clip(&images[1]) {
        Some(i12) => i12.clip(&images[2]).is_none(),
        None => true,
    };
    let above = s >= gh_threshold();
    let mut notes = Vec::new();
    if !above {
        notes.push(format!(
            "s = {s} below coincidence threshold {}; no overlap claim",
            gh_threshold()
        ));
    }
    if !hex.containment_ok {
        notes.push("hexagon containment check failed".to_string());
    }
    Ok(OverlapCertificate {
        q: 4 - depth,
        depth,
        method: CertificateMethod::PolygonArrangement,
        hypotheses_met: above && hex.containment_ok,
        triple_interior_empty: Some(triple),
        notes,
    })
}

/// Maximum interior multiplicity of a family of axis-aligned boxes
/// (xlo, xhi, ylo, yhi), by sweeping slab midpoints of the sorted
/// endpoints. Interior semantics: boxes that merely touch do not overlap.
/// A family of coincident degenerate boxes counts with its multiplicity.
fn boxes_max_depth(boxes: &[(f64, f64, f64, f64)]) -> usize {
    if boxes.iter().all(|b| b.0 == b.1 && b.2 == b.3) {
        return boxes
            .iter()
            .map(|b| boxes.iter().filter(|o| *o == b).count())
            .max()
            .unwrap_or(0);
    }
    let mut xs: Vec<f64> = boxes.iter().flat_map(|b| [b.0, b.1]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut depth = 0;
    for w in xs.windows(2) {
        let x = 0.5 * (w[0] + w[1]);
        let mut ys: Vec<(f64, f64)> = boxes
            .iter()
            .filter(|b| b.0 < x && x < b.1)
            .map(|b| (b.2, b.3))
            .collect();
        if ys.is_empty() {
            continue;
        }
        let mut yv: Vec<f64> = ys.iter().flat_map(|i| [i.0, i.1]).collect();
        yv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        yv.dedup();
        for wy in yv.windows(2) {
            let y = 0.5 * (wy[0] + wy[1]);
            let count = ys.iter().filter(|i| i.0 < y && y < i.1).count();
            depth = depth.max(count);
        }
        ys.clear();
    }
    depth
}

/// Certificate for the 9-map family via the product-interval box
/// arrangement of the projected images. Requires N = 3; the theorem
/// hypotheses (all s_i ∈ (2/3, 1); reversing scales dominate the shifted
/// ones on the X-axis; the downward-shifted preserving Y-scale does not
/// exceed the downward-shifted reversing one) are checked and reported.
pub fn overlap_certificate_massopust3(
    ifs: &SurfaceIfs,
) -> Result<OverlapCertificate, FurstenbergError> {
    if ifs.construction != Construction::Massopust || ifs.n != 3 {
        return Err(FurstenbergError::WrongConstruction {
            expected: Construction::Massopust,
        });
    }
    let fifs = build_furstenberg(ifs)?;
    let px = project_1d(&fifs, Axis::X)?;
    let py = project_1d(&fifs, Axis::Y)?;
    let ix = invariant_interval(&px);
    let iy = invariant_interval(&py);

    let mut notes = Vec::new();
    let mut hypotheses_met = true;
    if ifs.s.iter().any(|&si| !(si > 2.0 / 3.0 && si < 1.0)) {
        hypotheses_met = false;
        notes.push("some s_i outside (2/3, 1)".to_string());
    }
    let max_shifted = px
        .maps
        .iter()
        .zip(&px.s)
        .filter(|(m, _)| m.slope > 0.0 && m.offset > 0.0)
        .map(|(_, &s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_reversing = px
        .maps
        .iter()
        .zip(&px.s)
        .filter(|(m, _)| m.slope < 0.0)
        .map(|(_, &s)| s)
        .fold(f64::INFINITY, f64::min);
    if max_shifted.is_finite() && min_reversing.is_finite() && max_shifted > min_reversing {
        hypotheses_met = false;
        notes.push("X-axis hypothesis max{s⁺} ≤ min{s⁻} violated".to_string());
    }
    let s_down_preserving = py
        .maps
        .iter()
        .zip(&py.s)
        .filter(|(m, _)| m.slope > 0.0 && m.offset < 0.0)
        .map(|(_, &s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let s_down_reversing = py
        .maps
        .iter()
        .zip(&py.s)
        .filter(|(m, _)| m.slope < 0.0 && m.offset < 0.0)
        .map(|(_, &s)| s)
        .fold(f64::INFINITY, f64::min);
    if s_down_preserving.is_finite()
        && s_down_reversing.is_finite()
        && s_down_preserving > s_down_reversing
    {
        hypotheses_met = false;
        notes.push("Y-axis hypothesis (downward-shifted scales) violated".to_string());
    }
    if !ix.verified || !iy.verified {
        hypotheses_met = false;
        notes.push("invariant interval containment failed".to_string());
    }
    if !hypotheses_met {
        notes.push("outside theorem hypotheses: certificate downgraded to empirical".to_string());
    }

    let boxes: Vec<(f64, f64, f64, f64)> = px
        .maps
        .iter()
        .zip(&py.maps)
        .map(|(fx, fy)| {
            let (x0, x1) = fx.image(ix.lo, ix.hi);
            let (y0, y1) = fy.image(iy.lo, iy.hi);
            (x0, x1, y0, y1)
        })
        .collect();
    let depth = boxes_max_depth(&boxes);
    Ok(OverlapCertificate {
        q: ifs.map_count().saturating_sub(depth),
        depth,
        method: CertificateMethod::BoxArrangement,
        hypotheses_met,
        triple_interior_empty: None,
        notes,
    })
}

/// Covering bound log(1 − Q·p_min)/log λ_max on the dimension of the
/// stationary measure.
pub fn covering_lower_bound(q: usize, p_min: f64, lambda_max: f64) -> Result<f64, FurstenbergError> {
    if !(lambda_max > 0.0 && lambda_max < 1.0) {
        return Err(FurstenbergError::BadContraction(lambda_max));
    }
    let qp = q as f64 * p_min;
    if !(0.0..1.0).contains(&qp) {
        return Err(FurstenbergError::BoundDomain(qp));
    }
    if q == 0 {
        return Ok(0.0);
    }
    Ok((1.0 - qp).ln() / lambda_max.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The attractor dimension equals the affinity dimension t0.
    Certified,
    HypothesesUnmet,
    BoundInsufficient,
}

/// Full numeric trace of the certificate pipeline.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub verdict: Verdict,
    pub t0: f64,
    /// The dimension-drop threshold 3 − t0 the measure bound must beat.
    pub target: f64,
    pub certificate: Option<OverlapCertificate>,
    /// Covering bound with the true largest contraction λ/s_min.
    pub bound: Option<f64>,
    /// Variant with 1/(N·s_max) in the denominator, recorded for
    /// comparison (coincides with the primary bound for uniform scales).
    pub bound_alt: Option<f64>,
    /// 9-map route only: the closed sufficient test Σs_i > 6
    /// (equivalently 3^t0 > 18).
    pub sufficient_closed_form: Option<bool>,
    pub trace: Vec<String>,
}

pub fn certificate_pipeline(ifs: &SurfaceIfs) -> Result<PipelineReport, FurstenbergError> {
    let mut trace = Vec::new();
    let sol = surface_affinity_dimension(ifs)?;
    let t0 = sol.t0;
    let target = 3.0 - t0;
    trace.push(format!("t0 = {t0:.12}, target 3 - t0 = {target:.12}"));

    let fail = |verdict, trace: Vec<String>| PipelineReport {
        verdict,
        t0,
        target,
        certificate: None,
        bound: None,
        bound_alt: None,
        sufficient_closed_form: None,
        trace,
    };

    if (ifs.lambda_square_sum() - 1.0).abs() > 1e-12 {
        trace.push("Σλ² ≠ 1".to_string());
        return Ok(fail(Verdict::HypothesesUnmet, trace));
    }
    let s_min = ifs.s.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_max = ifs.s.iter().cloned().fold(0.0_f64, f64::max);
    if ifs.lambda >= s_min {
        trace.push(format!("λ = {} not below min s = {}", ifs.lambda, s_min));
        return Ok(fail(Verdict::HypothesesUnmet, trace));
    }

    let fifs = build_furstenberg(ifs)?;
    let p_min = fifs.weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let (certificate, required_q, sufficient) = match ifs.construction {
        Construction::GeronimoHardin => {
            let s = ifs.s[0];
            if s < gh_threshold() {
                trace.push(format!("s = {s} below threshold {}", gh_threshold()));
                return Ok(fail(Verdict::HypothesesUnmet, trace));
            }
            let cert = overlap_certificate_gh(s)?;
            trace.push(format!(
                "hexagon arrangement depth = {}, Q = {}, triple empty = {:?}",
                cert.depth, cert.q, cert.triple_interior_empty
            ));
            (cert, 1, None)
        }
        Construction::Massopust => {
            if ifs.n != 3 {
                trace.push(format!("no certificate route for N = {}", ifs.n));
                return Ok(fail(Verdict::HypothesesUnmet, trace));
            }
            let px = project_1d(&fifs, Axis::X)?;
            let ix = invariant_interval(&px);
            if !interval_disjointness(&px, &ix) {
                trace.push("X-axis image unions overlap".to_string());
                return Ok(fail(Verdict::HypothesesUnmet, trace));
            }
            let cert = overlap_certificate_massopust3(ifs)?;
            trace.push(format!(
                "box arrangement depth = {}, Q = {}",
                cert.depth, cert.q
            ));
            let sum_s: f64 = ifs.s.iter().sum();
            let sufficient = sum_s > 6.0;
            trace.push(format!(
                "closed sufficient test: Σs = {sum_s:.12}, 3^t0 = {:.12}, passes = {sufficient}",
                3.0_f64.powf(t0)
            ));
            (cert, 3, Some(sufficient))
        }
    };

    if !certificate.hypotheses_met || certificate.q < required_q {
        trace.push(format!(
            "certificate hypotheses met = {}, Q = {} (need ≥ {required_q})",
            certificate.hypotheses_met, certificate.q
        ));
        let mut report = fail(Verdict::HypothesesUnmet, trace);
        report.certificate = Some(certificate);
        return Ok(report);
    }

    // The verdict rests on the theorem-certified overlap count; the sweep's
    // sharper measured Q stays in the certificate as a diagnostic.
    let lambda_max = fifs.lambda_max();
    let bound = covering_lower_bound(required_q, p_min, lambda_max)?;
    let bound_alt = covering_lower_bound(required_q, p_min, ifs.lambda / s_max)?;
    trace.push(format!(
        "covering bound = {bound:.12} (λ_max = {lambda_max:.12}); variant with 1/(N·s_max): {bound_alt:.12}"
    ));
    let verdict = if bound > target {
        trace.push(format!("bound exceeds target by {:.12}", bound - target));
        Verdict::Certified
    } else {
        trace.push("bound does not exceed the drop threshold".to_string());
        Verdict::BoundInsufficient
    };
    Ok(PipelineReport {
        verdict,
        t0,
        target,
        certificate: Some(certificate),
        bound: Some(bound),
        bound_alt: Some(bound_alt),
        sufficient_closed_form: sufficient,
        trace,
    })
}

/// Value and sign of the scale-only positivity expression
/// Σ_{i∈A1} s_i log((s_i + Σ_B s_j)·Σs / (N² s_i³))
/// + Σ_{i∈B} s_i log((Σs)² / (N² s_i³)), B = A2 ∪ A3, together with the
/// overlap-corrected entropy/Lyapunov bound for the stationary weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FurstdimaeReport {
    pub value: f64,
    pub positive: bool,
    /// −Φ(p)/χ with Φ the overlap-corrected weight entropy and χ the
    /// Lyapunov exponent of the planar system.
    pub phi_bound: f64,
}

pub fn furstdimae_inequality(ifs: &SurfaceIfs) -> Result<FurstdimaeReport, FurstenbergError> {
    if ifs.construction != Construction::Massopust {
        return Err(FurstenbergError::WrongConstruction {
            expected: Construction::Massopust,
        });
    }
    let class = classify_and_constants(ifs);
    let n2 = (ifs.n * ifs.n) as f64;
    let sum_s: f64 = ifs.s.iter().sum();
    let overlap: Vec<usize> = class
        .a2_set
        .iter()
        .chain(&class.a3_set)
        .cloned()
        .collect();
    let sum_b: f64 = overlap.iter().map(|&i| ifs.s[i - 1]).sum();
    let mut value = 0.0;
    for &i in &class.a1_set {
        let si = ifs.s[i - 1];
        value += si * ((si + sum_b) * sum_s / (n2 * si.powi(3))).ln();
    }
    for &i in &overlap {
        let si = ifs.s[i - 1];
        value += si * (sum_s * sum_s / (n2 * si.powi(3))).ln();
    }

    let fifs = build_furstenberg(ifs)?;
    let p = &fifs.weights;
    let pb: f64 = overlap.iter().map(|&i| p[i - 1]).sum();
    let mut phi = 0.0;
    for &i in &class.a1_set {
        phi += p[i - 1] * (p[i - 1] + pb).ln();
    }
    for &i in &overlap {
        phi += p[i - 1] * p[i - 1].ln();
    }
    let chi: f64 = -p
        .iter()
        .zip(&ifs.s)
        .map(|(pi, si)| pi * (ifs.lambda / si).ln())
        .sum::<f64>();
    Ok(FurstdimaeReport {
        value,
        positive: value > 0.0,
        phi_bound: -phi / chi,
    })
}

/// Monte-Carlo cross-check: samples the planar attractor and reports
/// n_maps minus the maximum number of region images containing a sample.
/// Never a substitute for the exact certificates.
pub fn empirical_overlap(
    fifs: &FurstenbergIfs,
    region: &ConvexPolygon,
    samples: usize,
    seed: u64,
) -> Result<usize, FurstenbergError> {
    let maps = fifs.canonical.as_ref().unwrap_or(&fifs.maps);
    let total: f64 = fifs.weights.iter().sum();
    let weights: Vec<f64> = fifs.weights.iter().map(|w| w / total).collect();
    let cloud = chaos_game(maps, &weights, samples, seed, 100, 4)?;
    let images: Vec<ConvexPolygon> = maps
        .iter()
        .map(|h| region.transform(h))
        .collect::<Result<_, _>>()?;
    let max_cover = cloud
        .points
        .iter()
        .map(|p| images.iter().filter(|im| im.contains_point(*p, 1e-9)).count())
        .max()
        .unwrap_or(0);
    Ok(maps.len() - max_cover)
}

/// The product of the verified X and Y invariant intervals as a rectangle,
/// for empirical overlap checks of the 9-map family.
pub fn massopust_invariant_rectangle(
    fifs: &FurstenbergIfs,
) -> Result<(ConvexPolygon, InvariantInterval, InvariantInterval), FurstenbergError> {
    let ix = invariant_interval(&project_1d(fifs, Axis::X)?);
    let iy = invariant_interval(&project_1d(fifs, Axis::Y)?);
    let rect = ConvexPolygon::new(vec![
        Vec2::new(ix.lo, iy.lo),
        Vec2::new(ix.hi, iy.lo),
        Vec2::new(ix.hi, iy.hi),
        Vec2::new(ix.lo, iy.hi),
    ])?;
    Ok((rect, ix, iy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_geronimo_hardin, build_massopust, InterpolationData, TriangulationSpec};

    fn center_peak(s: &[f64; 9]) -> SurfaceIfs {
        build_massopust(
            TriangulationSpec::new(3).unwrap(),
            &InterpolationData::center_peak(1.0),
            s,
        )
        .unwrap()
    }

    #[test]
    fn weights_sum_to_one_and_contract() {
        for ifs in [center_peak(&[0.75; 9]), build_geronimo_hardin(0.82, 1.0).unwrap()] {
            let fifs = build_furstenberg(&ifs).unwrap();
            let sum: f64 = fifs.weights.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "weight sum {sum}");
            for h in &fifs.maps {
                let r = h.operator_norm();
                assert!(r > 0.0 && r < 1.0);
            }
        }
        // Uniform scales: weights are exactly 1/n².
        let fifs = build_furstenberg(&center_peak(&[0.75; 9])).unwrap();
        for w in &fifs.weights {
            assert!((w - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn massopust_projection_closed_forms() {
        let fifs = build_furstenberg(&center_peak(&[0.75; 9])).unwrap();
        let px = project_1d(&fifs, Axis::X).unwrap();
        // Identity-class maps: x/(3s) with zero offset and fixed point 0.
        for i in [1, 2, 3, 6, 9] {
            let m = px.maps[i - 1];
            assert!((m.slope - 1.0 / 2.25).abs() < 1e-12);
            assert!(m.offset.abs() < 1e-12);
            assert!(m.fixed_point().abs() < 1e-12);
        }
        // Shifted preserving maps 5, 8: fixed point 3a/(3s−1) = 2.4.
        for i in [5, 8] {
            let m = px.maps[i - 1];
            assert!((m.slope - 1.0 / 2.25).abs() < 1e-12);
            assert!((m.offset - 1.0 / 0.75).abs() < 1e-12);
            assert!((m.fixed_point() - 2.4).abs() < 1e-12);
        }
        // Reversing maps 4, 7: −x/(3s) + a/s.
        for i in [4, 7] {
            let m = px.maps[i - 1];
            assert!((m.slope + 1.0 / 2.25).abs() < 1e-12);
            assert!((m.offset - 1.0 / 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn gh_canonical_matches_reference() {
        let fam = gh_canonical_family(0.82);
        let h3 = &fam[2];
        assert!((h3.linear[(0, 0)] + 1.0 / 1.64).abs() < 1e-12);
        assert!((h3.linear[(1, 1)] - 1.0 / 1.64).abs() < 1e-12);
        assert!(h3.linear[(0, 1)].abs() < 1e-15 && h3.linear[(1, 0)].abs() < 1e-15);
        assert!((h3.translation - Vec2::new(0.0, -2.0 / SQRT3)).norm() < 1e-12);
        // Canonical family is the raw family conjugated by x ↦ −(s/a)x.
        let ifs = build_geronimo_hardin(0.82, 1.0).unwrap();
        let fifs = build_furstenberg(&ifs).unwrap();
        let beta = -0.82;
        for (raw, canon) in fifs.maps.iter().zip(fifs.canonical.as_ref().unwrap()) {
            assert!((raw.linear - canon.linear).norm() < 1e-12);
            assert!((raw.translation * beta - canon.translation).norm() < 1e-12);
        }
    }

    #[test]
    fn gh_projection_refused() {
        let ifs = build_geronimo_hardin(0.82, 1.0).unwrap();
        let fifs = build_furstenberg(&ifs).unwrap();
        let err = project_1d(&fifs, Axis::X).unwrap_err();
        assert!(err.to_string().contains("projection not self-map"));
    }

    #[test]
    fn x_axis_invariant_interval() {
        let fifs = build_furstenberg(&center_peak(&[0.75; 9])).unwrap();
        let px = project_1d(&fifs, Axis::X).unwrap();
        let iv = invariant_interval(&px);
        assert!(iv.lo.abs() < 1e-12);
        assert!((iv.hi - 2.4).abs() < 1e-12);
        assert!(iv.verified, "violations: {:?}", iv.violations);
        // Reversing image endpoints a(3s−2)/(s(3s−1)) and a/s.
        let (lo, hi) = px.maps[3].image(iv.lo, iv.hi);
        assert!((lo - 0.25 / (0.75 * 1.25)).abs() < 1e-12);
        assert!((hi - 1.0 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn y_axis_invariant_interval_selects_reflected_endpoint() {
        let fifs = build_furstenberg(&center_peak(&[0.75; 9])).unwrap();
        let py = project_1d(&fifs, Axis::Y).unwrap();
        let iv = invariant_interval(&py);
        let fix_g2 = -6.0 / (SQRT3 * 1.25);
        assert!((iv.lo - fix_g2).abs() < 1e-12);
        // g8(Fix(g2)) = (a/(√3 s))·(3s+1)/(3s−1) beats Fix(g5) here.
        let reflected = (1.0 / (SQRT3 * 0.75)) * (3.25 / 1.25);
        let fix_g5 = 3.0 / (SQRT3 * 1.25);
        assert!(reflected > fix_g5);
        assert!((iv.hi - reflected).abs() < 1e-12);
        assert!(iv.verified, "violations: {:?}", iv.violations);
    }

    #[test]
    fn degenerate_data_gives_point_interval() {
        let ifs = build_massopust(
            TriangulationSpec::new(3).unwrap(),
            &InterpolationData::center_peak(0.0),
            &[0.75; 9],
        )
        .unwrap();
        let fifs = build_furstenberg(&ifs).unwrap();
        for axis in [Axis::X, Axis::Y] {
            let iv = invariant_interval(&project_1d(&fifs, axis).unwrap());
            assert_eq!((iv.lo, iv.hi), (0.0, 0.0));
            assert!(iv.verified);
        }
    }

    #[test]
    fn x_axis_disjointness_cases() {
        // Uniform: images touch at a/s but interiors are disjoint.
        let fifs = build_furstenberg(&center_peak(&[0.75; 9])).unwrap();
        let px = project_1d(&fifs, Axis::X).unwrap();
        let iv = invariant_interval(&px);
        assert!(interval_disjointness(&px, &iv));

        // Strong contrast: a gap between the unions.
        let mut s = [0.75; 9];
        s[3] = 0.95;
        s[6] = 0.95;
        s[4] = 0.70;
        s[7] = 0.70;
        let fifs = build_furstenberg(&center_peak(&s)).unwrap();
        let px = project_1d(&fifs, Axis::X).unwrap();
        let iv = invariant_interval(&px);
        assert!(interval_disjointness(&px, &iv));

        // Hypothesis violated: shifted scale above reversing scale.
        let mut s = [0.75; 9];
        s[3] = 0.70;
        s[6] = 0.70;
        s[4] = 0.95;
        s[7] = 0.95;
        let fifs = build_furstenberg(&center_peak(&s)).unwrap();
        let px = project_1d(&fifs, Axis::X).unwrap();
        let iv = invariant_interval(&px);
        assert!(!interval_disjointness(&px, &iv));
    }

    #[test]
    fn hexagon_closed_forms_and_containment() {
        let hex = gh_hexagon(0.82).unwrap();
        assert!((hex.a - Vec2::new(2.5625, 2.5625 / SQRT3)).norm() < 1e-12);
        assert!((hex.c_prime - Vec2::new(0.0, 4.0 / (SQRT3 * 1.28))).norm() < 1e-12);
        assert!(hex.containment_ok);
        // Mirror symmetry about the Y-axis.
        assert!((hex.b - Vec2::new(-hex.a.x, hex.a.y)).norm() < 1e-15);
        for s in [0.75, 0.9, 0.999] {
            assert!(gh_hexagon(s).unwrap().containment_ok, "s = {s}");
        }
        // s → 1 limit of A is (2, 2/√3).
        let hex = gh_hexagon(1.0 - 1e-12).unwrap();
        assert!((hex.a - Vec2::new(2.0, 2.0 / SQRT3)).norm() < 1e-9);
        assert!(gh_hexagon(0.5).is_err());
    }

    #[test]
    fn threshold_coincidence() {
        let s0 = gh_threshold();
        assert!((s0 * (4.0 * s0 - 2.0) - 1.0).abs() < 1e-12);
        for p in gh_coincidence(s0).unwrap() {
            assert!(p.norm() < 1e-9, "coincidence point {p:?}");
        }
        // Slightly above threshold the points move strictly off the origin.
        let moved = gh_coincidence(s0 + 1e-3).unwrap();
        assert!(moved.iter().all(|p| p.norm() > 1e-5));
    }

    #[test]
    fn gh_certificates() {
        let cert = overlap_certificate_gh(0.82).unwrap();
        assert_eq!(cert.depth, 3);
        assert_eq!(cert.q, 1);
        assert_eq!(cert.triple_interior_empty, Some(true));
        assert!(cert.hypotheses_met);

        let cert = overlap_certificate_gh(0.9).unwrap();
        assert!(cert.q >= 1 && cert.depth <= 3);
        assert_eq!(cert.triple_interior_empty, Some(true));

        // Below threshold: full-depth overlap, no claim.
        let cert = overlap_certificate_gh(0.6).unwrap();
        assert_eq!(cert.q, 0);
        assert!(!cert.hypotheses_met);
    }

    #[test]
    fn massopust_certificate_uniform() {
        let cert = overlap_certificate_massopust3(&center_peak(&[0.75; 9])).unwrap();
        assert!(cert.hypotheses_met, "notes: {:?}", cert.notes);
        // The lemma guarantees depth ≤ 6 (Q ≥ 3); the exact sweep is
        // sharper at the uniform parameter: the deepest cell stacks the
        // three coincident shift-free boxes with boxes 2 and 9.
        assert_eq!(cert.depth, 5);
        assert_eq!(cert.q, 4);
    }

    #[test]
    fn massopust_certificate_degenerate_and_flagged() {
        let flat = build_massopust(
            TriangulationSpec::new(3).unwrap(),
            &InterpolationData::center_peak(0.0),
            &[0.75; 9],
        )
        .unwrap();
        let cert = overlap_certificate_massopust3(&flat).unwrap();
        assert_eq!(cert.depth, 9);
        assert_eq!(cert.q, 0);

        // Violating the Y hypothesis (map 2 scale above map 9's) flags the
        // certificate.
        let mut s = [0.75; 9];
        s[1] = 0.95;
        s[8] = 0.70;
        let cert = overlap_certificate_massopust3(&center_peak(&s)).unwrap();
        assert!(!cert.hypotheses_met);
        assert!(cert.notes.iter().any(|n| n.contains("empirical")));
    }

    #[test]
    fn covering_bound_reference_values() {
        let b = covering_lower_bound(1, 0.25, 1.0 / 1.64).unwrap();
        assert!((b - 0.75f64.ln() / (1.0 / 1.64f64).ln()).abs() < 1e-15);
        assert!((b - 0.5815327631841805).abs() < 1e-9);
        let b = covering_lower_bound(3, 1.0 / 9.0, 1.0 / 2.25).unwrap();
        assert!((b - 0.5).abs() < 1e-12);
        assert_eq!(covering_lower_bound(0, 0.25, 0.5).unwrap(), 0.0);
        assert!(covering_lower_bound(4, 0.25, 0.5).is_err());
        assert!(covering_lower_bound(1, 0.25, 1.5).is_err());
    }

    #[test]
    fn pipeline_verdicts() {
        let report = certificate_pipeline(&build_geronimo_hardin(0.82, 1.0).unwrap()).unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        let bound = report.bound.unwrap();
        assert!((bound - 0.5815327631841805).abs() < 1e-9);
        assert!(bound > report.target);
        assert!((report.target - 0.2863041852).abs() < 1e-9);

        let report = certificate_pipeline(&center_peak(&[0.75; 9])).unwrap();
        assert_eq!(report.verdict, Verdict::Certified);
        assert!((report.bound.unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(report.sufficient_closed_form, Some(true));
        assert!((3.0f64.powf(report.t0) - 20.25).abs() < 1e-9);

        let report = certificate_pipeline(&build_geronimo_hardin(0.6, 1.0).unwrap()).unwrap();
        assert_eq!(report.verdict, Verdict::HypothesesUnmet);
    }

    #[test]
    fn uniform_bound_variants_coincide() {
        let report = certificate_pipeline(&center_peak(&[0.75; 9])).unwrap();
        assert!((report.bound.unwrap() - report.bound_alt.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn furstdimae_positive_and_scale_invariant() {
        let report = furstdimae_inequality(&center_peak(&[0.75; 9])).unwrap();
        assert!(report.positive, "value = {}", report.value);
        assert!(report.phi_bound > 0.0);

        let tall = build_massopust(
            TriangulationSpec::new(3).unwrap(),
            &InterpolationData::center_peak(5.0),
            &[0.75; 9],
        )
        .unwrap();
        let report5 = furstdimae_inequality(&tall).unwrap();
        assert!((report.value - report5.value).abs() < 1e-12);
    }

    #[test]
    fn empirical_overlap_consistent_with_certificates() {
        // 4-map family at s = 0.9.
        let ifs = build_geronimo_hardin(0.9, 1.0).unwrap();
        let fifs = build_furstenberg(&ifs).unwrap();
        let hex = gh_hexagon(0.9).unwrap();
        let cert = overlap_certificate_gh(0.9).unwrap();
        let emp = empirical_overlap(&fifs, &hex.polygon, 20_000, 11).unwrap();
        assert!(emp >= cert.q, "empirical {emp} < certified {}", cert.q);

        // 9-map family at uniform s = 0.75.
        let ifs = center_peak(&[0.75; 9]);
        let fifs = build_furstenberg(&ifs).unwrap();
        let (rect, ix, iy) = massopust_invariant_rectangle(&fifs).unwrap();
        assert!(ix.verified && iy.verified);
        let emp = empirical_overlap(&fifs, &rect, 20_000, 12).unwrap();
        assert!(emp >= 3, "empirical {emp}");
    }

    #[test]
    fn attractor_stays_in_invariant_regions() {
        let ifs = build_geronimo_hardin(0.82, 1.0).unwrap();
        let fifs = build_furstenberg(&ifs).unwrap();
        let hex = gh_hexagon(0.82).unwrap();
        let maps = fifs.canonical.clone().unwrap();
        let cloud = chaos_game(&maps, &fifs.weights, 20_000, 5, 100, 2).unwrap();
        for p in &cloud.points {
            assert!(hex.polygon.contains_point(*p, 1e-6));
        }

        let ifs = center_peak(&[0.75; 9]);
        let fifs = build_furstenberg(&ifs).unwrap();
        let (rect, _, _) = massopust_invariant_rectangle(&fifs).unwrap();
        let cloud = chaos_game(&fifs.maps, &fifs.weights, 20_000, 6, 100, 2).unwrap();
        for p in &cloud.points {
            assert!(rect.contains_point(*p, 1e-6));
        }
    }
}
