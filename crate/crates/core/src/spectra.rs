//! Spectra of the graphs `X_q(δ, a)`: adjacency operators, closed-form
//! eigenvalues, the Ramanujan bound, the moment-matrix identities and
//! semicircle statistics over a sweep of primes.
//!
//! The eigenvalue of the adjacency operator of `X_q(δ, a)` on the
//! `π_i`-isotypic component is `λ_i(a) = |G|/dim(π_i) · |S_a| · η_i(D_a)`,
//! which reduces to `|S_a|` times the spherical function at `D_a`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{is_prime, DeltaChoice, FieldCtx};
use crate::hecke::{HeckeCtx, DENSE_LIMIT};
use crate::plane::PlaneCtx;

/// Eigenvalues with imaginary part above this are reported as non-real.
pub const REALITY_TOL: f64 = 1e-9;
/// Slack added to `2√q` in the Ramanujan comparison.
pub const RAMANUJAN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Bruteforce,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EigenvalueEntry {
    pub rep_index: usize,
    pub kind: String,
    pub dim: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RamanujanCheck {
    pub bound: f64,
    pub max_nontrivial: f64,
    pub margin: f64,
    pub pass: bool,
    /// False for `a ∈ {0, 4δ}`, where the bound is not claimed.
    pub applicable: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Moments {
    /// `(q-1)⁻¹ Σ_{i≥0} dim(π_i)/q · λ_i/√q`.
    pub weighted_m1: f64,
    /// `(q-1)⁻¹ Σ_{i≥0} dim(π_i)/q · (λ_i/√q)²`.
    pub weighted_m2: f64,
    /// `|G||S_a| / (|K| q² (q-1))`.
    pub weighted_m2_expected: f64,
    /// Unweighted moments of `λ_i/√q` over `i ≥ 1`.
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumReport {
    pub q: u32,
    pub delta: u32,
    pub a: u32,
    pub method: Method,
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub degree: usize,
    pub ramanujan: RamanujanCheck,
    pub moments: Moments,
    /// Largest `|Im λ_i(a)|` seen before discarding imaginary parts.
    pub max_imaginary: f64,
    /// For `method = bruteforce`: sorted brute-force spectrum and its
    /// largest deviation from the formula multiset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bruteforce: Option<BruteforceCheck>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BruteforceCheck {
    pub sorted_eigenvalues: Vec<f64>,
    pub max_deviation: f64,
}

/// `M[i][a] = √(|S_a|/dim π_i) · η_i(D_a)`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub entries: DMatrix<f64>,
    pub k_order: f64,
    pub group_order: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentMatrixResiduals {
    /// `max |(|K||G| M Mᵀ) - I|`.
    pub mmt: f64,
    /// `max |(|K||G| Mᵀ M) - I|`.
    pub mtm: f64,
}

impl MomentMatrix {
    pub fn residuals(&self) -> MomentMatrixResiduals {
        let s = self.k_order * self.group_order;
        let n = self.entries.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let m = &self.entries;
        MomentMatrixResiduals {
            mmt: ((m * m.transpose()) * s - &id).amax(),
            mtm: ((m.transpose() * m) * s - &id).amax(),
        }
    }
}

/// How the graph parameter `a` is chosen per prime in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ARule {
    /// Smallest `a ∉ {0, 4δ}` by lift.
    SmallestValid,
    /// A fixed residue, reduced mod q; rejected where it is 0 or `4δ`.
    Fixed(u32),
}

impl ARule {
    pub fn pick(&self, plane: &PlaneCtx) -> Result<u32> {
        match *self {
            ARule::SmallestValid => {
                plane.regular_distances().first().copied().ok_or(Error::InvalidDistance(0, "no regular distance"))
            }
            ARule::Fixed(a) => {
                let a = a % plane.q();
                if a == 0 || a == plane.four_delta() {
                    Err(Error::InvalidDistance(a, "a ∈ {0, 4δ}"))
                } else {
                    Ok(a)
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ARule::SmallestValid => "smallest_valid".into(),
            ARule::Fixed(a) => format!("fixed({a})"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub semicircle_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SatoTateRow {
    pub q: u32,
    pub delta: u32,
    pub a: u32,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub ks: f64,
    pub histogram: Vec<HistogramBin>,
    pub ramanujan_pass: bool,
}

fn check_distance(plane: &PlaneCtx, a: u32) -> Result<()> {
    if a >= plane.q() {
        return Err(Error::OutOfRange { index: a as i64, range: format!("0..{}", plane.q()) });
    }
    Ok(())
}

/// 0/1 adjacency matrix of `X_q(δ, a)` in canonical point order.
pub fn adjacency_matrix(hecke: &HeckeCtx, a: u32) -> Result<DMatrix<f64>> {
    let plane = hecke.plane();
    check_distance(plane, a)?;
    if a == 0 {
        return Err(Error::InvalidDistance(0, "the a = 0 graph is degenerate (self-loops only)"));
    }
    if plane.q() > DENSE_LIMIT {
        return Err(Error::TooLargeForDense { q: plane.q(), limit: DENSE_LIMIT });
    }
    let n = plane.num_points();
    Ok(DMatrix::from_fn(n, n, |i, j| if plane.distance_idx(i, j) == a { 1.0 } else { 0.0 }))
}

/// Undirected edges `(u, v)` with `u < v` of `X_q(δ, a)`.
pub fn edge_list(plane: &PlaneCtx, a: u32) -> Result<Vec<(usize, usize)>> {
    check_distance(plane, a)?;
    if a == 0 {
        return Err(Error::InvalidDistance(0, "the a = 0 graph is degenerate (self-loops only)"));
    }
    let n = plane.num_points();
    Ok((0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).filter(|&(u, v)| plane.distance_idx(u, v) == a).collect())
}

/// `λ_i(a)`, still complex; the imaginary part is numerical noise.
pub fn eigenvalue_complex(hecke: &HeckeCtx, i: usize, a: u32) -> num_complex::Complex64 {
    hecke.spherical_value(i, a) * hecke.plane().sphere_size(a) as f64
}

/// `λ_i(a) = |G|/dim(π_i) · |S_a| · η_i(D_a)`.
pub fn eigenvalue_formula(hecke: &HeckeCtx, i: usize, a: u32) -> f64 {
    eigenvalue_complex(hecke, i, a).re
}

/// `λ_i(a)` for every `i`, via the idempotent itself rather than the
/// spherical-function shortcut.
pub fn eigenvalues_from_idempotents(hecke: &HeckeCtx, a: u32) -> Vec<f64> {
    let g = hecke.plane().group_order();
    let s = hecke.plane().sphere_size(a) as f64;
    (0..hecke.reps().len())
        .map(|i| {
            let eta = hecke.idempotent(i).expect("in range");
            (g / hecke.dim(i) as f64 * s * eta.get(a)).re
        })
        .collect()
}

/// Spectrum of the adjacency matrix by dense symmetric diagonalisation,
/// sorted ascending.
pub fn eigenvalues_bruteforce(hecke: &HeckeCtx, a: u32) -> Result<Vec<f64>> {
    let m = adjacency_matrix(hecke, a)?;
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// The formula spectrum expanded with multiplicities `dim π_i`, sorted.
pub fn formula_multiset(hecke: &HeckeCtx, a: u32) -> Vec<f64> {
    let mut out: Vec<f64> = (0..hecke.reps().len())
        .flat_map(|i| std::iter::repeat_n(eigenvalue_formula(hecke, i, a), hecke.dim(i)))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn ramanujan_check(hecke: &HeckeCtx, a: u32) -> RamanujanCheck {
    let plane = hecke.plane();
    let q = plane.q() as f64;
    let bound = 2.0 * q.sqrt();
    let max_nontrivial = (1..hecke.reps().len()).map(|i| eigenvalue_formula(hecke, i, a).abs()).fold(0.0, f64::max);
    let applicable = a != 0 && a != plane.four_delta();
    RamanujanCheck {
        bound,
        max_nontrivial,
        margin: bound - max_nontrivial,
        pass: max_nontrivial <= bound + RAMANUJAN_SLACK,
        applicable,
    }
}

pub fn moment_matrix(hecke: &HeckeCtx) -> MomentMatrix {
    let plane = hecke.plane();
    let q = plane.q() as usize;
    let entries = DMatrix::from_fn(q, q, |i, a| {
        let s = plane.sphere_size(a as u32) as f64;
        let eta = hecke.idempotent(i).expect("in range").get(a as u32).re;
        (s / hecke.dim(i) as f64).sqrt() * eta
    });
    MomentMatrix { entries, k_order: plane.k_order(), group_order: plane.group_order() }
}

/// Weighted first and second moments and the closed form the second one
/// should equal.
pub fn weighted_moments(hecke: &HeckeCtx, a: u32) -> (f64, f64, f64) {
    let plane = hecke.plane();
    let q = plane.q() as f64;
    let sq = q.sqrt();
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..hecke.reps().len() {
        let w = hecke.dim(i) as f64 / q;
        let x = eigenvalue_formula(hecke, i, a) / sq;
        m1 += w * x;
        m2 += w * x * x;
    }
    let expected = plane.group_order() * plane.sphere_size(a) as f64 / (plane.k_order() * q * q * (q - 1.0));
    (m1 / (q - 1.0), m2 / (q - 1.0), expected)
}

/// Normalised nontrivial eigenvalues `λ_i(a)/√q`, `i = 1..q-1`.
pub fn normalized_nontrivial(hecke: &HeckeCtx, a: u32) -> Vec<f64> {
    let sq = (hecke.q() as f64).sqrt();
    (1..hecke.reps().len()).map(|i| eigenvalue_formula(hecke, i, a) / sq).collect()
}

/// Unweighted moments `m_k = (q-1)⁻¹ Σ_{i≥1} (λ_i/√q)^k`, `k = 1..4`.
pub fn unweighted_moments(values: &[f64]) -> [f64; 4] {
    let n = values.len() as f64;
    let mut m = [0.0; 4];
    for &x in values {
        let mut p = 1.0;
        for slot in m.iter_mut() {
            p *= x;
            *slot += p;
        }
    }
    m.map(|v| v / n)
}

pub fn spectrum_report(hecke: &HeckeCtx, a: u32, method: Method) -> Result<SpectrumReport> {
    let plane = hecke.plane();
    check_distance(plane, a)?;
    let bruteforce = match method {
        Method::Formula => None,
        Method::Bruteforce => {
            let bf = eigenvalues_bruteforce(hecke, a)?;
            let fm = formula_multiset(hecke, a);
            let dev = bf.iter().zip(&fm).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Some(BruteforceCheck { sorted_eigenvalues: bf, max_deviation: dev })
        }
    };
    let eigenvalues = hecke
        .reps()
        .iter()
        .map(|r| EigenvalueEntry {
            rep_index: r.index,
            kind: r.kind.label(),
            dim: r.dim,
            lambda: eigenvalue_formula(hecke, r.index, a),
        })
        .collect();
    let max_imaginary = (0..hecke.reps().len()).map(|i| eigenvalue_complex(hecke, i, a).im.abs()).fold(0.0, f64::max);
    let (wm1, wm2, wexp) = weighted_moments(hecke, a);
    let [m1, m2, m3, m4] = unweighted_moments(&normalized_nontrivial(hecke, a));
    Ok(SpectrumReport {
        q: plane.q(),
        delta: plane.field().delta(),
        a,
        method,
        eigenvalues,
        degree: plane.sphere_size(a),
        ramanujan: ramanujan_check(hecke, a),
        moments: Moments { weighted_m1: wm1, weighted_m2: wm2, weighted_m2_expected: wexp, m1, m2, m3, m4 },
        max_imaginary,
        bruteforce,
    })
}

/// CDF of the semicircle law `(2π)⁻¹ √(4 - x²)` on `[-2, 2]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI + 0.5
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `values` and the semicircle law.
pub fn ks_semicircle(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = semicircle_cdf(x);
            (((k + 1) as f64 / n) - f).max(f - k as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Histogram over `[-2, 2]`; bins are closed on the left, the last one on
/// both sides. Values outside the interval are dropped.
pub fn histogram(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    let width = 4.0 / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| {
            let l = -2.0 + b as f64 * width;
            let r = if b + 1 == bins { 2.0 } else { -2.0 + (b + 1) as f64 * width };
            HistogramBin { bin_left: l, bin_right: r, count: 0, semicircle_mass: semicircle_cdf(r) - semicircle_cdf(l) }
        })
        .collect();
    for &x in values {
        if !(-2.0..=2.0).contains(&x) {
            continue;
        }
        let b = (((x + 2.0) / width).floor() as usize).min(bins - 1);
        out[b].count += 1;
    }
    out
}

/// One row of the sweep for a single prime.
pub fn sato_tate_row(q: u32, rule: ARule, bins: usize) -> Result<SatoTateRow> {
    let plane = PlaneCtx::new(FieldCtx::new(q, DeltaChoice::Auto)?);
    let a = rule.pick(&plane)?;
    let hecke = HeckeCtx::new(plane);
    let values = normalized_nontrivial(&hecke, a);
    let [m1, m2, m3, m4] = unweighted_moments(&values);
    Ok(SatoTateRow {
        q,
        delta: hecke.plane().field().delta(),
        a,
        m1,
        m2,
        m3,
        m4,
        ks: ks_semicircle(&values),
        histogram: histogram(&values, bins),
        ramanujan_pass: ramanujan_check(&hecke, a).pass,
    })
}

/// Odd primes in `lo..=hi`.
pub fn odd_primes(lo: u32, hi: u32) -> Vec<u32> {
    (lo.max(3)..=hi).filter(|&p| p % 2 == 1 && is_prime(p)).collect()
}

/// Sweep over primes; rows come back in the order given.
pub fn sato_tate_report(qs: &[u32], rule: ARule, bins: usize) -> Result<Vec<SatoTateRow>> {
    qs.par_iter().map(|&q| sato_tate_row(q, rule, bins)).collect()
}
