//! Exact machinery around the order-12 orthogonal group generated by the
//! 4-map family's linear parts: breadth-first group closure over exact
//! half-integer/√3 scalars, the induced Markov chain with rational
//! arithmetic, return-count asymptotics, and the graph-directed 1D system
//! attached to a projection direction.

use crate::geometry::DihedralScalar;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MarkovError {
    #[error("group closure exceeded cap {0}: input does not generate a finite group")]
    ClosureExceedsCap(usize),
    #[error("vertex {vertex} has out-degree {out} and in-degree {r#in}, expected 4")]
    DegreeViolation { vertex: usize, out: usize, r#in: usize },
    #[error("offsets at vertex {vertex} coincide for edge labels {k1} and {k2}")]
    OffsetCollision { vertex: usize, k1: usize, k2: usize },
    #[error("power exponent {0} exceeds the exact-arithmetic cap 12")]
    ExponentTooLarge(usize),
    #[error("scale parameter must lie in (1/2, 1), got {0}")]
    BadScale(f64),
}

/// 2×2 matrix with exact entries of the form q + r√3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DMat2(pub [[DihedralScalar; 2]; 2]);

/// Exact 2-vector over the same scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DVec2(pub [DihedralScalar; 2]);

impl DMat2 {
    pub fn identity() -> Self {
        DMat2([
            [DihedralScalar::one(), DihedralScalar::zero()],
            [DihedralScalar::zero(), DihedralScalar::one()],
        ])
    }

    pub fn mul(&self, other: &DMat2) -> DMat2 {
        let mut out = [[DihedralScalar::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][0] * other.0[0][j] + self.0[i][1] * other.0[1][j];
            }
        }
        DMat2(out)
    }

    pub fn transpose(&self) -> DMat2 {
        DMat2([
            [self.0[0][0], self.0[1][0]],
            [self.0[0][1], self.0[1][1]],
        ])
    }

    pub fn apply(&self, v: &DVec2) -> DVec2 {
        DVec2([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1],
        ])
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.0[0][0].to_f64(), self.0[0][1].to_f64()],
            [self.0[1][0].to_f64(), self.0[1][1].to_f64()],
        ]
    }
}

impl DVec2 {
    pub fn dot(&self, other: &DVec2) -> DihedralScalar {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }
}

/// The canonical twelve elements, indexed 1..12 as usually listed: the four
/// generators first, then the identity and the remaining products.
pub fn canonical_elements() -> [DMat2; 12] {
    // Entry shorthands: h(p, r) = (p + r√3)/2.
    let h = DihedralScalar::from_halves;
    let m = |a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)| {
        DMat2([[h(a.0, a.1), h(b.0, b.1)], [h(c.0, c.1), h(d.0, d.1)]])
    };
    [
        m((1, 0), (0, 1), (0, 1), (-1, 0)),   // Q1
        m((1, 0), (0, -1), (0, -1), (-1, 0)), // Q2
        m((-2, 0), (0, 0), (0, 0), (2, 0)),   // Q3
        m((-2, 0), (0, 0), (0, 0), (-2, 0)),  // Q4
        m((2, 0), (0, 0), (0, 0), (2, 0)),    // Q5 = Id
        m((-1, 0), (0, -1), (0, -1), (1, 0)), // Q6
        m((-1, 0), (0, 1), (0, 1), (1, 0)),   // Q7
        m((-1, 0), (0, 1), (0, -1), (-1, 0)), // Q8
        m((-1, 0), (0, -1), (0, 1), (-1, 0)), // Q9
        m((2, 0), (0, 0), (0, 0), (-2, 0)),   // Q10
        m((1, 0), (0, -1), (0, 1), (1, 0)),   // Q11
        m((1, 0), (0, 1), (0, -1), (1, 0)),   // Q12
    ]
}

/// Indices (0-based into the canonical list) of the four generators.
pub const GENERATORS: [usize; 4] = [0, 1, 2, 3];

/// The block ordering {Q5, Q6, Q7, Q8, Q9, Q10, Q1, Q2, Q3, Q4, Q11, Q12}
/// under which the two-step chain becomes block-diagonal.
pub const BIPARTITE_ORDER: [usize; 12] = [4, 5, 6, 7, 8, 9, 0, 1, 2, 3, 10, 11];

#[derive(Debug, Clone)]
pub struct MatrixGroup {
    pub elements: Vec<DMat2>,
    /// Indices of the generators within `elements`.
    pub generators: Vec<usize>,
    /// table[i][j] = index of elements[i]·elements[j].
    pub table: Vec<Vec<usize>>,
    /// Index of the identity.
    pub identity: usize,
}

/// Breadth-first closure of a generating set under multiplication, capped.
pub fn group_closure(generators: &[DMat2], cap: usize) -> Result<MatrixGroup, MarkovError> {
    let mut elements = vec![DMat2::identity()];
    let mut index: HashMap<DMat2, usize> = HashMap::new();
    index.insert(elements[0], 0);
    for g in generators {
        if !index.contains_key(g) {
            index.insert(*g, elements.len());
            elements.push(*g);
        }
    }
    let mut frontier: Vec<usize> = (0..elements.len()).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            for g in generators {
                let prod = elements[i].mul(g);
                if !index.contains_key(&prod) {
                    if elements.len() >= cap {
                        return Err(MarkovError::ClosureExceedsCap(cap));
                    }
                    index.insert(prod, elements.len());
                    next.push(elements.len());
                    elements.push(prod);
                }
            }
        }
        frontier = next;
    }
    let table: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.mul(b)]).collect())
        .collect();
    let generators = generators.iter().map(|g| index[g]).collect();
    Ok(MatrixGroup {
        elements,
        generators,
        table,
        identity: 0,
    })
}

/// The order-12 group in its canonical indexing, built by closure from the
/// four generators and verified to equal the canonical element set.
pub fn canonical_group() -> MatrixGroup {
    let canonical = canonical_elements();
    let closure = group_closure(&canonical[..4], 1024).expect("generators close at order 12");
    assert_eq!(closure.elements.len(), 12);
    let mut closed: Vec<DMat2> = closure.elements.clone();
    let mut listed: Vec<DMat2> = canonical.to_vec();
    closed.sort();
    listed.sort();
    assert_eq!(closed, listed, "closure differs from the canonical list");

    let elements = canonical.to_vec();
    let index: HashMap<DMat2, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i))
        .collect();
    let table = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.mul(b)]).collect())
        .collect();
    MatrixGroup {
        elements,
        generators: GENERATORS.to_vec(),
        table,
        identity: 4,
    }
}

pub type RationalMatrix = Vec<Vec<BigRational>>;

#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    /// order[i] = canonical element index of chain state i.
    pub order: Vec<usize>,
    pub entries: RationalMatrix,
    /// Row index of the identity state.
    pub identity_state: usize,
}

fn big(n: i64, d: i64) -> BigRational {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Row-stochastic matrix with entry 1/4 from state l to state m whenever
/// some generator right-multiplies l into m.
pub fn transition_matrix(group: &MatrixGroup, order: &[usize]) -> TransitionMatrix {
    let n = group.elements.len();
    assert_eq!(order.len(), n);
    let position: HashMap<usize, usize> = order.iter().enumerate().map(|(p, &e)| (e, p)).collect();
    let mut entries = vec![vec![big(0, 1); n]; n];
    for (row, &l) in order.iter().enumerate() {
        for &g in &group.generators {
            let m = group.table[l][g];
            entries[row][position[&m]] = big(1, 4);
        }
    }
    TransitionMatrix {
        order: order.to_vec(),
        entries,
        identity_state: position[&group.identity],
    }
}

pub fn matrix_mul(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let n = a.len();
    let mut out = vec![vec![big(0, 1); b[0].len()]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = big(0, 1);
            for k in 0..b.len() {
                acc += &a[i][k] * &b[k][j];
            }
            *cell = acc;
        }
    }
    out
}

pub fn matrix_pow(m: &RationalMatrix, e: usize) -> RationalMatrix {
    let n = m.len();
    let mut out: RationalMatrix = (0..n)
        .map(|i| (0..n).map(|j| big((i == j) as i64, 1)).collect())
        .collect();
    for _ in 0..e {
        out = matrix_mul(&out, m);
    }
    out
}

#[derive(Debug, Clone)]
pub struct ChainAnalysis {
    pub period: usize,
    /// The 6×6 block of the two-step chain on the rotation-coset states.
    pub r_block: RationalMatrix,
    /// First n with max |(Rⁿ)_{ij} − 1/6| < 1e−12.
    pub convergence_n: usize,
    /// Max deviation at convergence.
    pub deviation: f64,
    /// P(X₂ = Id | X₀ = Id).
    pub two_step_return: BigRational,
}

/// Period, the block structure of P², and the rank-one limit of the block.
pub fn chain_analysis(p: &TransitionMatrix) -> ChainAnalysis {
    let n = p.entries.len();
    let id = p.identity_state;
    // Period: gcd of return lengths up to 2n steps.
    let mut period = 0;
    let mut power = matrix_pow(&p.entries, 0);
    for step in 1..=2 * n {
        power = matrix_mul(&power, &p.entries);
        if power[id][id] > big(0, 1) {
            period = gcd(period, step);
        }
    }
    let p2 = matrix_pow(&p.entries, 2);
    let half = n / 2;
    // Verify the off-diagonal blocks of P² vanish before truncating.
    for i in 0..half {
        for j in half..n {
            assert!(p2[i][j] == big(0, 1) && p2[j][i] == big(0, 1));
        }
    }
    let r_block: RationalMatrix = p2[..half]
        .iter()
        .map(|row| row[..half].to_vec())
        .collect();
    let sixth = big(1, 6);
    let mut rn = r_block.clone();
    let mut convergence_n = 1;
    let mut deviation = f64::INFINITY;
    for step in 1..=200 {
        let dev = rn
            .iter()
            .flatten()
            .map(|x| abs_f64(&(x - &sixth)))
            .fold(0.0, f64::max);
        convergence_n = step;
        deviation = dev;
        if dev < 1e-12 {
            break;
        }
        rn = matrix_mul(&rn, &r_block);
    }
    ChainAnalysis {
        period,
        r_block,
        convergence_n,
        deviation,
        two_step_return: p2[id][id].clone(),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

fn abs_f64(x: &BigRational) -> f64 {
    let v = ratio_to_f64(x);
    v.abs()
}

pub fn ratio_to_f64(x: &BigRational) -> f64 {
    let numer: f64 = x.numer().to_string().parse().unwrap();
    let denom: f64 = x.denom().to_string().parse().unwrap();
    numer / denom
}

#[derive(Debug, Clone)]
pub struct ReturnCounts {
    /// counts[n−1] = number of generator words of length 2n multiplying to
    /// the identity.
    pub counts: Vec<BigInt>,
    /// Minimal n₀ with counts[n−1] ≥ 16ⁿ/12 for every computed n ≥ n₀.
    pub n0: Option<usize>,
}

/// Return counts by exact matrix powers, cross-checked against direct word
/// enumeration for n ≤ 5.
pub fn return_counts(group: &MatrixGroup, n_max: usize) -> Result<ReturnCounts, MarkovError> {
    if n_max > 12 {
        return Err(MarkovError::ExponentTooLarge(n_max));
    }
    let p = transition_matrix(group, &(0..group.elements.len()).collect::<Vec<_>>());
    let id = p.identity_state;
    let mut counts = Vec::with_capacity(n_max);
    let p2 = matrix_pow(&p.entries, 2);
    let mut power = matrix_pow(&p.entries, 0);
    let sixteen = BigInt::from(16);
    let mut scale = BigInt::from(1);
    for _ in 1..=n_max {
        power = matrix_mul(&power, &p2);
        scale *= &sixteen;
        let count = &power[id][id] * BigRational::from(scale.clone());
        assert!(count.is_integer());
        counts.push(count.to_integer());
    }
    for (n, count) in counts.iter().enumerate().take(5) {
        let brute = brute_force_returns(group, 2 * (n + 1));
        assert_eq!(*count, BigInt::from(brute), "enumeration mismatch at n = {}", n + 1);
    }
    let mut n0 = None;
    let mut threshold_num = BigInt::from(1);
    for (n, count) in counts.iter().enumerate() {
        threshold_num *= &sixteen;
        // count ≥ 16^{n+1}/12 ⟺ 12·count ≥ 16^{n+1}.
        if BigInt::from(12) * count >= threshold_num {
            if n0.is_none() {
                n0 = Some(n + 1);
            }
        } else {
            n0 = None;
        }
    }
    Ok(ReturnCounts { counts, n0 })
}

fn brute_force_returns(group: &MatrixGroup, len: usize) -> u64 {
    fn recurse(group: &MatrixGroup, current: usize, remaining: usize, target: usize) -> u64 {
        if remaining == 0 {
            return (current == target) as u64;
        }
        group
            .generators
            .iter()
            .map(|&g| recurse(group, group.table[current][g], remaining - 1, target))
            .sum()
    }
    recurse(group, group.identity, len, group.identity)
}

/// Report quantity: the dimension value certified by the depth-n return
/// count, 3 + log s/log 2 − log 12/(2n log 2).
pub fn t_hat(s: f64, n: usize) -> Result<f64, MarkovError> {
    if !(s > 0.5 && s < 1.0) {
        return Err(MarkovError::BadScale(s));
    }
    Ok(3.0 + s.ln() / 2f64.ln() - 12f64.ln() / (2.0 * n as f64 * 2f64.ln()))
}

/// One directed edge of the graph-directed system, carrying the 1D map
/// f(x) = x/(2s) + offset.
#[derive(Debug, Clone)]
pub struct GdEdge {
    /// 0-based source and target vertex (canonical element indices).
    pub from: usize,
    pub to: usize,
    /// 1-based generator label k with v_from = Q_k v_to.
    pub k: usize,
    pub offset_exact: DihedralScalar,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct GraphDirectedIfs {
    /// v_l = Q_lᵀ·(1,1), exact.
    pub vertices: Vec<DVec2>,
    pub edges: Vec<GdEdge>,
    pub contraction: f64,
}

/// Exact translation vectors of the amplitude-normalized 4-map planar
/// family: (±1, √3/3), (0, −2√3/3), (0, 0).
pub fn canonical_translations() -> [DVec2; 4] {
    let q = DihedralScalar::from_ratios;
    [
        DVec2([q(1, 1, 0, 1), q(0, 1, 1, 3)]),
        DVec2([q(-1, 1, 0, 1), q(0, 1, 1, 3)]),
        DVec2([q(0, 1, 0, 1), q(0, 1, -2, 3)]),
        DVec2([q(0, 1, 0, 1), q(0, 1, 0, 1)]),
    ]
}

/// Builds the graph-directed system for direction v = (1,1): vertices
/// v_l = Q_lᵀ v, one edge l → m per generator k with v_l = Q_k v_m (exact
/// equality), map offsets v_l·t_k. Verifies out-/in-degree 4 and pairwise
/// distinctness of the four offsets at every vertex.
pub fn build_gd_ifs(group: &MatrixGroup, s: f64) -> Result<GraphDirectedIfs, MarkovError> {
    if !(s > 0.5 && s < 1.0) {
        return Err(MarkovError::BadScale(s));
    }
    let one = DihedralScalar::one();
    let v = DVec2([one, one]);
    let vertices: Vec<DVec2> = group
        .elements
        .iter()
        .map(|q| q.transpose().apply(&v))
        .collect();
    let translations = canonical_translations();
    let mut edges = Vec::new();
    for (l, vl) in vertices.iter().enumerate() {
        let offsets: Vec<DihedralScalar> =
            translations.iter().map(|t| vl.dot(t)).collect();
        for (k1, o1) in offsets.iter().enumerate() {
            for (k2, o2) in offsets.iter().enumerate().skip(k1 + 1) {
                if o1 == o2 {
                    return Err(MarkovError::OffsetCollision {
                        vertex: l + 1,
                        k1: k1 + 1,
                        k2: k2 + 1,
                    });
                }
            }
        }
        for (ki, &g) in group.generators.iter().enumerate() {
            let qk = &group.elements[g];
            for (m, vm) in vertices.iter().enumerate() {
                if qk.apply(vm) == *vl {
                    edges.push(GdEdge {
                        from: l,
                        to: m,
                        k: ki + 1,
                        offset_exact: offsets[ki],
                        offset: offsets[ki].to_f64(),
                    });
                }
            }
        }
    }
    for l in 0..vertices.len() {
        let out = edges.iter().filter(|e| e.from == l).count();
        let r#in = edges.iter().filter(|e| e.to == l).count();
        if out != 4 || r#in != 4 {
            return Err(MarkovError::DegreeViolation { vertex: l + 1, out, r#in });
        }
    }
    Ok(GraphDirectedIfs {
        vertices,
        edges,
        contraction: 1.0 / (2.0 * s),
    })
}

/// CSV rendering of a rational matrix (entries as exact fractions).
pub fn rational_matrix_csv(m: &RationalMatrix) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
