//! Numerical verification of the idempotent, basis and base-comparison
//! theorems, producing serializable reports.
//!
//! Each identity is checked as `lhs ≈ c·rhs` with `c` fitted by least
//! squares and compared against the expected constant, so a global
//! normalisation factor shows up as a ratio rather than as a residual.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{EigenfunctionLabel, Eigenfunctions};
use crate::error::{Error, Result};
use crate::hecke::{HeckeCtx, HeckeElement, PFunction, DENSE_LIMIT};

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    pub theorem1: f64,
    pub gram: f64,
    pub projector: f64,
    pub eigen: f64,
    pub identity: f64,
    pub fourier: f64,
    /// Functions with norm below this are null members.
    pub null_norm: f64,
    /// Relative singular-value cutoff for rank.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            theorem1: 1e-10,
            gram: 1e-8,
            projector: 1e-9,
            eigen: 1e-8,
            identity: 1e-9,
            fourier: 1e-9,
            null_norm: 1e-12,
            rank: 1e-9,
        }
    }
}

impl Tolerances {
    /// Sets one tolerance by its camelCase name.
    pub fn set(&mut self, name: &str, value: f64) -> std::result::Result<(), String> {
        let slot = match name {
            "theorem1" => &mut self.theorem1,
            "gram" => &mut self.gram,
            "projector" => &mut self.projector,
            "eigen" => &mut self.eigen,
            "identity" => &mut self.identity,
            "fourier" => &mut self.fourier,
            "nullNorm" => &mut self.null_norm,
            "rank" => &mut self.rank,
            _ => return Err(format!("unknown tolerance `{name}`")),
        };
        *slot = value;
        Ok(())
    }
}

/// Ratios between the implemented normalisation and the stated constants.
pub mod ledger {
    /// Base-comparison identities: the collapsed `u`-sum matches as stated.
    pub const BASE_COMPARISON: f64 = 1.0;
    /// `⟨Ψ_a∗η_i, Ψ_a∗η_i⟩ / (|K| q F(1; a, η_i)) = |K|⁻²`.
    pub fn norm_identity(k_order: f64) -> f64 {
        k_order.powi(-2)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem1Report {
    pub q: u32,
    pub pairs: usize,
    pub max_abs_residual: f64,
    /// Residual divided by `max_i max_a |η_i(a)|`.
    pub max_relative_residual: f64,
    /// `max |Σ_i η_i - unit|`, relative to the unit's value `|K|⁻¹`.
    pub unit_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem2Report {
    pub q: u32,
    pub chi_count: usize,
    pub psi_count: usize,
    pub null_members: Vec<EigenfunctionLabel>,
    /// `max |G_jk| / √(G_jj G_kk)` over `j ≠ k`.
    pub gram_offdiag_relative: f64,
    pub rank: usize,
    pub expected_rank: usize,
    /// `max ‖P_j f - [j = sector(f)] f‖ / ‖f‖`, with `P_j = |K| T_{η_j}`.
    pub projector_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct T0Entry {
    pub i: u32,
    pub a: u32,
    pub t0: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem3Report {
    pub q: u32,
    pub k_max_residual: f64,
    pub h_max_residual: f64,
    /// Indices `i` for which some nonzero `H_{t,i,ψ_a}` fails the eigen test.
    pub non_eigen_indices: Vec<u32>,
    pub non_eigen_min_worst: Option<f64>,
    pub t0_table: Vec<T0Entry>,
    /// Pairs `(i, a)` for which no `t` gave a new nonzero member.
    pub t0_missing: Vec<T0Entry>,
    /// Candidates dropped as zero or not orthogonal to earlier members.
    pub rejected: Vec<EigenfunctionLabel>,
    pub literal_range_count: usize,
    pub basis_count: usize,
    pub rank: usize,
    pub expected_rank: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityForm {
    /// Indices paired exactly as originally stated.
    Literal,
    /// Indices paired through the conjugate or twisted label.
    Corrected,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentityCheck {
    pub identity: u8,
    pub form: IdentityForm,
    pub i: u32,
    pub a: u32,
    pub fitted: Complex64,
    pub expected: Complex64,
    /// `fitted / expected`; should equal the ledger factor.
    pub ratio: Complex64,
    /// `‖lhs - fitted·rhs‖ / ‖lhs‖`.
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentitySummary {
    pub identity: u8,
    pub form: IdentityForm,
    pub checks: usize,
    pub passed: usize,
    pub max_ratio_error: f64,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Theorem4Report {
    pub q: u32,
    pub ledger_factor: f64,
    pub summaries: Vec<IdentitySummary>,
    pub checks: Vec<IdentityCheck>,
    /// True when every corrected-form identity holds.
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FourierReport {
    pub q: u32,
    pub ledger_factor: f64,
    /// `max |ratio / ledger - 1|` for the norm identity.
    pub norm_identity_error: f64,
    pub min_abs_fourier: f64,
    /// `max |F(1;a,η_i) - Ψ_{-a}∗η_i(1)| / |F|`.
    pub base_value_error: f64,
    pub principal_formula_error: f64,
    pub cuspidal_formula_error_literal: f64,
    pub cuspidal_formula_error_corrected: f64,
    /// Over nontrivial characters `i = 1..q-2`.
    pub jacobi_error: f64,
    /// `|C_0(0) + χ^0(-δ) J(χ^0, s)|`; nonzero, the trivial character is excluded.
    pub jacobi_trivial_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub q: u32,
    pub delta: u32,
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem1: Option<Theorem1Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem2: Option<Theorem2Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem3: Option<Theorem3Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem4: Option<Theorem4Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier: Option<FourierReport>,
    pub pass: bool,
}

/// Which checks to run; `4` also runs the Fourier-coefficient identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremSet {
    pub theorem1: bool,
    pub theorem2: bool,
    pub theorem3: bool,
    pub theorem4: bool,
}

impl TheoremSet {
    pub const ALL: TheoremSet = TheoremSet { theorem1: true, theorem2: true, theorem3: true, theorem4: true };

    /// Parses a list like `1,2,4`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let mut set = TheoremSet { theorem1: false, theorem2: false, theorem3: false, theorem4: false };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "1" => set.theorem1 = true,
                "2" => set.theorem2 = true,
                "3" => set.theorem3 = true,
                "4" => set.theorem4 = true,
                _ => return Err(format!("unknown theorem `{part}` (expected 1-4)")),
            }
        }
        if set == (TheoremSet { theorem1: false, theorem2: false, theorem3: false, theorem4: false }) {
            return Err("empty theorem list".into());
        }
        Ok(set)
    }
}

fn check_dense(hecke: &HeckeCtx) -> Result<()> {
    if hecke.q() > DENSE_LIMIT {
        return Err(Error::TooLargeForDense { q: hecke.q(), limit: DENSE_LIMIT });
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Numerical rank of the span of `fs`, after normalising each column.
pub fn numerical_rank(fs: &[PFunction], rel_tol: f64) -> usize {
    if fs.is_empty() {
        return 0;
    }
    let n = fs[0].len();
    let m = DMatrix::from_fn(n, fs.len(), |r, c| fs[c].values[r] / fs[c].norm());
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

fn gram_offdiag_relative(fs: &[PFunction]) -> f64 {
    let norms: Vec<f64> = fs.iter().map(PFunction::norm).collect();
    (0..fs.len())
        .into_par_iter()
        .map(|j| ((j + 1)..fs.len()).map(|k| fs[j].inner(&fs[k]).norm() / (norms[j] * norms[k])).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

pub fn verify_theorem1(hecke: &HeckeCtx, tol: &Tolerances) -> Theorem1Report {
    let q = hecke.q();
    let etas = hecke.idempotents();
    let scale = etas.iter().map(HeckeElement::max_abs).fold(0.0, f64::max);
    let n = etas.len();
    let max_abs_residual = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let c = hecke.convolve(&etas[i], &etas[j]);
            let want = if i == j { etas[i].clone() } else { HeckeElement::zeros(q) };
            c.max_abs_diff(&want)
        })
        .reduce(|| 0.0, f64::max);
    let sum = etas.iter().skip(1).fold(etas[0].clone(), |acc, e| acc.add(e));
    let unit = hecke.unit();
    let unit_residual = sum.max_abs_diff(&unit) / unit.max_abs();
    let max_relative_residual = max_abs_residual / scale;
    Theorem1Report {
        q,
        pairs: n * n,
        max_abs_residual,
        max_relative_residual,
        unit_residual,
        pass: max_relative_residual <= tol.theorem1 && unit_residual <= tol.theorem1,
    }
}

pub fn verify_theorem2(hecke: &HeckeCtx, tol: &Tolerances) -> Result<Theorem2Report> {
    check_dense(hecke)?;
    let q = hecke.q();
    let e = Eigenfunctions::new(hecke);
    let mut labels: Vec<EigenfunctionLabel> = (1..q).map(|i| EigenfunctionLabel::ChiFunc { i }).collect();
    labels.extend((1..q).flat_map(|a| (1..q as usize).map(move |i| EigenfunctionLabel::PsiStarEta { a, i })));
    let built: Vec<(EigenfunctionLabel, PFunction)> =
        labels.par_iter().map(|l| e.build(l).map(|f| (*l, f))).collect::<Result<_>>()?;
    let mut null_members = Vec::new();
    let mut members = Vec::new();
    for (l, f) in built {
        if f.norm() < tol.null_norm {
            null_members.push(l);
        } else {
            members.push((l, f));
        }
    }
    let projector_residual = members
        .par_iter()
        .map(|(l, f)| {
            let home = e.sector(l);
            (0..q as usize)
                .map(|j| {
                    let pf = hecke.project(j, f).expect("index in range");
                    let want = if Some(j) == home { f.clone() } else { PFunction::zeros(f.len()) };
                    pf.sub(&want).norm() / f.norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let fs: Vec<PFunction> = members.into_iter().map(|(_, f)| f).collect();
    let gram = gram_offdiag_relative(&fs);
    let rank = numerical_rank(&fs, tol.rank);
    let expected_rank = (q * (q - 1)) as usize;
    Ok(Theorem2Report {
        q,
        chi_count: (q - 1) as usize,
        psi_count: ((q - 1) * (q - 1)) as usize,
        null_members,
        gram_offdiag_relative: gram,
        rank,
        expected_rank,
        projector_residual,
        pass: gram <= tol.gram && rank == expected_rank && projector_residual <= tol.projector,
    })
}

fn orthogonal_to(f: &PFunction, accepted: &[PFunction], tol: f64) -> bool {
    let nf = f.norm();
    accepted.iter().all(|g| f.inner(g).norm() <= tol * nf * g.norm())
}

pub fn verify_theorem3(hecke: &HeckeCtx, tol: &Tolerances) -> Result<Theorem3Report> {
    check_dense(hecke)?;
    let q = hecke.q();
    let half = (q - 1) / 2;
    let e = Eigenfunctions::new(hecke);

    let k_labels: Vec<(u32, u32)> = (1..q).flat_map(|i| (0..q).map(move |a| (i, a))).collect();
    let k_max_residual = k_labels
        .par_iter()
        .map(|&(i, a)| {
            let k = e.terras_k(i, a).expect("in range");
            if k.norm() < tol.null_norm {
                0.0
            } else {
                e.eigen_residual(&k)
            }
        })
        .reduce(|| 0.0, f64::max);

    let h_labels: Vec<(u32, u32, u32)> =
        (1..q).flat_map(|t| (1..q).flat_map(move |i| (0..q).map(move |a| (t, i, a)))).collect();
    let h_res: Vec<(u32, f64)> = h_labels
        .par_iter()
        .filter_map(|&(t, i, a)| {
            let h = e.evans_h(t, i, a).expect("in range");
            (h.norm() >= tol.null_norm).then(|| (i, e.eigen_residual(&h)))
        })
        .collect();
    let mut worst_by_i = vec![0.0f64; q as usize];
    for &(i, r) in &h_res {
        worst_by_i[i as usize] = worst_by_i[i as usize].max(r);
    }
    let non_eigen_indices: Vec<u32> = (1..q).filter(|&i| worst_by_i[i as usize] > tol.eigen).collect();
    let non_eigen_min_worst = non_eigen_indices.iter().map(|&i| worst_by_i[i as usize]).min_by(f64::total_cmp);
    let h_max_residual =
        (1..q).filter(|i| !non_eigen_indices.contains(i)).map(|i| worst_by_i[i as usize]).fold(0.0, f64::max);

    // Greedy basis over the stated index ranges, in order.
    let mut accepted: Vec<PFunction> = Vec::new();
    let mut rejected = Vec::new();
    let mut literal_range_count = 0;
    let mut consider = |label: EigenfunctionLabel, func: PFunction| {
        if func.norm() >= tol.null_norm && orthogonal_to(&func, &accepted, tol.gram) {
            accepted.push(func);
        } else {
            rejected.push(label);
        }
    };
    for i in 1..q {
        literal_range_count += 1;
        consider(EigenfunctionLabel::TerrasK { i, a: 0 }, e.terras_k(i, 0)?);
    }
    for i in 1..=half {
        for a in 0..q {
            literal_range_count += 1;
            consider(EigenfunctionLabel::TerrasK { i, a }, e.terras_k(i, a)?);
        }
    }
    let mut t0_table = Vec::new();
    let mut t0_missing = Vec::new();
    for i in 1..=half {
        for a in 0..q {
            literal_range_count += 1;
            let mut found = None;
            for t in 1..q {
                let h = e.evans_h(t, i, a)?;
                if h.norm() >= tol.null_norm && orthogonal_to(&h, &accepted, tol.gram) {
                    accepted.push(h);
                    found = Some(t);
                    break;
                }
            }
            let entry = T0Entry { i, a, t0: found };
            if found.is_none() {
                t0_missing.push(entry.clone());
            }
            t0_table.push(entry);
        }
    }
    let rank = numerical_rank(&accepted, tol.rank);
    let expected_rank = (q * (q - 1)) as usize;
    let eigen_ok =
        k_max_residual <= tol.eigen && h_max_residual <= tol.eigen && non_eigen_indices.iter().all(|&i| i == half + 1);
    Ok(Theorem3Report {
        q,
        k_max_residual,
        h_max_residual,
        non_eigen_indices,
        non_eigen_min_worst,
        t0_table,
        t0_missing,
        rejected,
        literal_range_count,
        basis_count: accepted.len(),
        rank,
        expected_rank,
        pass: eigen_ok && rank == expected_rank && accepted.len() == expected_rank,
    })
}

fn fit(
    (identity, form, i, a): (u8, IdentityForm, u32, u32),
    lhs: &PFunction,
    rhs: &PFunction,
    expected: Complex64,
    tol: &Tolerances,
) -> IdentityCheck {
    let rr = rhs.inner(rhs);
    let fitted = if rr.norm() > 0.0 { lhs.inner(rhs) / rr } else { Complex64::new(0.0, 0.0) };
    let residual = lhs.sub(&rhs.scale(fitted)).norm() / lhs.norm();
    let ratio = fitted / expected;
    let pass = residual <= tol.identity && (ratio - ledger::BASE_COMPARISON).norm() <= tol.identity;
    IdentityCheck { identity, form, i, a, fitted, expected, ratio, residual, pass }
}

fn summarize(checks: &[IdentityCheck]) -> Vec<IdentitySummary> {
    let mut out = Vec::new();
    for identity in 1..=3u8 {
        for form in [IdentityForm::Literal, IdentityForm::Corrected] {
            let sel: Vec<&IdentityCheck> = checks.iter().filter(|c| c.identity == identity && c.form == form).collect();
            if sel.is_empty() {
                continue;
            }
            let passed = sel.iter().filter(|c| c.pass).count();
            out.push(IdentitySummary {
                identity,
                form,
                checks: sel.len(),
                passed,
                max_ratio_error: sel.iter().map(|c| (c.ratio - ledger::BASE_COMPARISON).norm()).fold(0.0, f64::max),
                max_residual: sel.iter().map(|c| c.residual).fold(0.0, f64::max),
                pass: passed == sel.len(),
            });
        }
    }
    out
}

/// Index `j` with `χ_j = conj χ_i` on `F_q^×`, within `1..=q-1`.
pub fn conjugate_chi_index(q: u32, i: u32) -> u32 {
    if i.is_multiple_of(q - 1) {
        q - 1
    } else {
        q - 1 - i
    }
}

/// The `ω`-exponent whose `H_{-δ,·}` lies in the sector of `η_{(q-1)/2 + j}`.
pub fn twisted_h_index(q: u32, j: u32) -> u32 {
    q.div_ceil(2) - j
}

pub fn verify_theorem4(hecke: &HeckeCtx, tol: &Tolerances) -> Result<Theorem4Report> {
    let q = hecke.q();
    let half = (q - 1) / 2;
    let f = hecke.plane().field();
    let g = hecke.plane().group_order();
    let e = Eigenfunctions::new(hecke);
    let minus_delta = f.neg(f.delta());

    let mut checks = Vec::new();
    for i in 1..q {
        let lhs = e.terras_k(i, 0)?;
        let expected = e.c_sum(i as i64, 0).conj();
        checks.push(fit((1, IdentityForm::Literal, i, 0), &lhs, &e.chi_func(i)?, expected, tol));
        let rhs = e.chi_func(conjugate_chi_index(q, i))?;
        checks.push(fit((1, IdentityForm::Corrected, i, 0), &lhs, &rhs, expected, tol));
    }
    let pairs: Vec<(u32, u32)> = (1..q).flat_map(|a| (1..=half).map(move |i| (a, i))).collect();
    let rest: Vec<Vec<IdentityCheck>> = pairs
        .par_iter()
        .map(|&(a, i)| -> Result<Vec<IdentityCheck>> {
            let mut out = Vec::with_capacity(3);
            let lhs = e.psi_star_eta(a, i as usize)?;
            let rhs = e.terras_k(i, f.neg(a))?;
            let expected = e.c_sum(i as i64, a) * (hecke.dim(i as usize) as f64 / (g * (q + 1) as f64));
            // The stated and implemented index pairing agree for this identity.
            out.push(fit((2, IdentityForm::Literal, i, a), &lhs, &rhs, expected, tol));
            let hat = (half + i) as usize;
            let lhs = e.psi_star_eta(a, hat)?;
            let expected = re(hecke.dim(hat) as f64 / g);
            let rhs = e.evans_h(minus_delta, i, f.neg(a))?;
            out.push(fit((3, IdentityForm::Literal, i, a), &lhs, &rhs, expected, tol));
            let rhs = e.evans_h(minus_delta, twisted_h_index(q, i), f.neg(a))?;
            out.push(fit((3, IdentityForm::Corrected, i, a), &lhs, &rhs, expected, tol));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    checks.extend(rest.into_iter().flatten());
    let mut summaries = summarize(&checks);
    // Identity 2 has a single form; it counts as its own corrected form.
    if let Some(s) = summaries.iter().find(|s| s.identity == 2).cloned() {
        summaries.push(IdentitySummary { form: IdentityForm::Corrected, ..s });
    }
    summaries.sort_by_key(|s| (s.identity, s.form == IdentityForm::Corrected));
    let pass = summaries.iter().filter(|s| s.form == IdentityForm::Corrected).all(|s| s.pass);
    Ok(Theorem4Report { q, ledger_factor: ledger::BASE_COMPARISON, summaries, checks, pass })
}

pub fn verify_fourier(hecke: &HeckeCtx, tol: &Tolerances) -> Result<FourierReport> {
    let q = hecke.q();
    let half = (q - 1) / 2;
    let f = hecke.plane().field();
    let g = hecke.plane().group_order();
    let k = hecke.plane().k_order();
    let e = Eigenfunctions::new(hecke);
    let ledger_factor = ledger::norm_identity(k);

    let pairs: Vec<(u32, usize)> = (1..q).flat_map(|a| (1..q as usize).map(move |i| (a, i))).collect();
    let rows: Vec<[f64; 6]> = pairs
        .par_iter()
        .map(|&(a, i)| -> Result<[f64; 6]> {
            let eta = hecke.idempotent(i)?;
            let fc = e.fourier_coeff(a, &eta);
            let pe = e.psi_star_eta(a, i)?;
            let ratio = pe.inner(&pe) / (fc * k * q as f64);
            let norm_err = (ratio / ledger_factor - 1.0).norm();
            let base = e.psi_star_eta(f.neg(a), i)?.values[0];
            let base_err = (fc - base).norm() / fc.norm();
            let dim = hecke.dim(i) as f64;
            let (mut princ, mut lit, mut cor) = (0.0, 0.0, 0.0);
            if i as u32 <= half {
                let want = dim / (g * (q + 1) as f64) * e.c_sum(i as i64, a).norm_sqr();
                princ = (fc - want).norm() / fc.norm();
            } else {
                let j_lit = i as u32 - half;
                lit = (fc - e.cuspidal_fourier_sum(j_lit, a) * (dim / g)).norm() / fc.norm();
                let j_cor = q - i as u32;
                cor = (fc - e.cuspidal_fourier_sum(j_cor, a) * (dim / g)).norm() / fc.norm();
            }
            Ok([norm_err, fc.norm(), base_err, princ, lit, cor])
        })
        .collect::<Result<_>>()?;
    let col_max = |c: usize| rows.iter().map(|r| r[c]).fold(0.0, f64::max);
    let min_abs_fourier = rows.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    let jacobi = |i: i64| -f.chi(i, f.neg(f.delta())) * f.jacobi_sum_quad(i);
    let jacobi_error = (1..(q - 1) as i64).map(|i| (e.c_sum(i, 0) - jacobi(i)).norm()).fold(0.0, f64::max) / q as f64;
    let jacobi_trivial_gap = (e.c_sum(0, 0) - jacobi(0)).norm();
    let report = FourierReport {
        q,
        ledger_factor,
        norm_identity_error: col_max(0),
        min_abs_fourier,
        base_value_error: col_max(2),
        principal_formula_error: col_max(3),
        cuspidal_formula_error_literal: col_max(4),
        cuspidal_formula_error_corrected: col_max(5),
        jacobi_error,
        jacobi_trivial_gap,
        pass: false,
    };
    let pass = report.norm_identity_error <= tol.fourier
        && report.min_abs_fourier > 0.0
        && report.base_value_error <= tol.fourier
        && report.principal_formula_error <= tol.fourier
        && report.cuspidal_formula_error_corrected <= tol.fourier
        && report.jacobi_error <= tol.fourier;
    Ok(FourierReport { pass, ..report })
}

pub fn verify(hecke: &HeckeCtx, which: TheoremSet, tol: &Tolerances) -> Result<VerifyReport> {
    let mut r = VerifyReport {
        q: hecke.q(),
        delta: hecke.plane().field().delta(),
        tolerances: Some(*tol),
        ..Default::default()
    };
    if which.theorem1 {
        r.theorem1 = Some(verify_theorem1(hecke, tol));
    }
    if which.theorem2 {
        r.theorem2 = Some(verify_theorem2(hecke, tol)?);
    }
    if which.theorem3 {
        r.theorem3 = Some(verify_theorem3(hecke, tol)?);
    }
    if which.theorem4 {
        r.theorem4 = Some(verify_theorem4(hecke, tol)?);
        r.fourier = Some(verify_fourier(hecke, tol)?);
    }
    r.pass = r.theorem1.as_ref().is_none_or(|t| t.pass)
        && r.theorem2.as_ref().is_none_or(|t| t.pass)
        && r.theorem3.as_ref().is_none_or(|t| t.pass)
        && r.theorem4.as_ref().is_none_or(|t| t.pass)
        && r.fourier.as_ref().is_none_or(|t| t.pass);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{DeltaChoice, FieldCtx};
    use crate::plane::PlaneCtx;

    fn hecke(q: u32) -> HeckeCtx {
        HeckeCtx::new(PlaneCtx::new(FieldCtx::new(q, DeltaChoice::Auto).unwrap()))
    }

    #[test]
    fn theorem_set_parsing() {
        let s = TheoremSet::parse("1, 4").unwrap();
        assert!(s.theorem1 && !s.theorem2 && !s.theorem3 && s.theorem4);
        assert!(TheoremSet::parse("5").is_err());
        assert!(TheoremSet::parse("").is_err());
    }

    #[test]
    fn tolerance_override() {
        let mut t = Tolerances::default();
        t.set("gram", 1e-3).unwrap();
        assert_eq!(t.gram, 1e-3);
        assert!(t.set("bogus", 1.0).is_err());
    }

    #[test]
    fn rank_helper() {
        let v = |xs: &[f64]| PFunction { values: xs.iter().map(|&x| re(x)).collect() };
        let fs = [v(&[1.0, 0.0, 0.0]), v(&[0.0, 1e-6, 0.0]), v(&[2.0, 2e-6, 0.0])];
        assert_eq!(numerical_rank(&fs, 1e-9), 2);
        assert_eq!(numerical_rank(&[], 1e-9), 0);
    }

    #[test]
    fn index_maps() {
        assert_eq!(conjugate_chi_index(7, 1), 5);
        assert_eq!(conjugate_chi_index(7, 3), 3);
        assert_eq!(conjugate_chi_index(7, 6), 6);
        assert_eq!(twisted_h_index(7, 1), 3);
        assert_eq!(twisted_h_index(7, 3), 1);
    }

    #[test]
    fn small_q_reports_pass() {
        for q in [3u32, 5] {
            let h = hecke(q);
            let r = verify(&h, TheoremSet::ALL, &Tolerances::default()).unwrap();
            let t2 = r.theorem2.as_ref().unwrap();
            assert!(t2.null_members.is_empty());
            assert_eq!(t2.rank, t2.expected_rank);
            let t3 = r.theorem3.as_ref().unwrap();
            assert_eq!(t3.literal_range_count, (q * q - 1) as usize);
            if q > 3 {
                assert_eq!(t3.non_eigen_indices, vec![q.div_ceil(2)]);
            }
            assert!(r.pass, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn literal_identities_are_reported_as_failing() {
        let h = hecke(7);
        let r = verify_theorem4(&h, &Tolerances::default()).unwrap();
        let lit1: Vec<u32> = r
            .checks
            .iter()
            .filter(|c| c.identity == 1 && c.form == IdentityForm::Literal && c.pass)
            .map(|c| c.i)
            .collect();
        assert_eq!(lit1, vec![3, 6]);
        let s3 = r.summaries.iter().find(|s| s.identity == 3 && s.form == IdentityForm::Literal).unwrap();
        assert!(!s3.pass && s3.passed < s3.checks);
        assert!(r.pass);
    }

    #[test]
    fn dense_limit() {
        let h = hecke(17);
        assert!(verify_theorem2(&h, &Tolerances::default()).is_err());
        assert!(verify_theorem3(&h, &Tolerances::default()).is_err());
    }
}
