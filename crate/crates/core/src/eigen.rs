//! The eigenfunction families on `P`: the `χ_i` and `Ψ_a ∗ η_i` built from the
//! Hecke idempotents, the character-sum functions `K_{i,ψ_a}` and
//! `H_{t,i,ψ_a}`, and the sums `C_i(a)` and `F(1; a, f)` relating them.
//!
//! `Ψ_a ∗ η_i` is evaluated as the collapsed sum
//! `Σ_u ψ_a(u) η_i([[y, x - u], [0, 1]])`, which is `|K|⁻¹` times the group
//! convolution used in [`crate::hecke`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::hecke::{HeckeCtx, HeckeElement, PFunction};
use crate::plane::PlanePoint;

/// Which `u = 0` terms of the `H` sum are multiplied by `q + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsteriskRule {
    /// When `y = ±t/δ`, where `δy/t + t/(δy) = ±2`. For `t = -δ` these are
    /// the rows whose `u = 0` point has a one-point `K`-orbit.
    #[default]
    Normalized,
    /// When `y = ±t`, read verbatim.
    Verbatim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EigenfunctionLabel {
    ChiFunc { i: u32 },
    PsiStarEta { a: u32, i: usize },
    TerrasK { i: u32, a: u32 },
    EvansH { t: u32, i: u32, a: u32 },
}

/// Builds eigenfunctions for one Hecke context.
pub struct Eigenfunctions<'h> {
    hecke: &'h HeckeCtx,
    /// `α + 1/α` for each `α` in the norm-one subgroup, paired with `α`'s log.
    u1: Vec<(u32, crate::field::Fq2Elem)>,
    asterisk: AsteriskRule,
}

impl<'h> Eigenfunctions<'h> {
    pub fn new(hecke: &'h HeckeCtx) -> Self {
        let f = hecke.plane().field();
        let u1 = f.norm_one_subgroup().into_iter().map(|al| (f.add2(al, f.inv2(al)).x, al)).collect();
        Self { hecke, u1, asterisk: AsteriskRule::default() }
    }

    pub fn with_asterisk(mut self, rule: AsteriskRule) -> Self {
        self.asterisk = rule;
        self
    }

    pub fn hecke(&self) -> &HeckeCtx {
        self.hecke
    }

    fn field(&self) -> &FieldCtx {
        self.hecke.plane().field()
    }

    fn q(&self) -> u32 {
        self.hecke.q()
    }

    fn tabulate(&self, mut value: impl FnMut(PlanePoint) -> Complex64) -> PFunction {
        PFunction { values: self.hecke.plane().points().iter().map(|&z| value(z)).collect() }
    }

    fn check_index(&self, i: i64, lo: i64, hi: i64) -> Result<()> {
        if i < lo || i > hi {
            return Err(Error::OutOfRange { index: i, range: format!("{lo}..={hi}") });
        }
        Ok(())
    }

    /// `χ_i(p) = χ^i(y)`.
    pub fn chi_func(&self, i: u32) -> Result<PFunction> {
        self.check_index(i as i64, 1, self.q() as i64 - 1)?;
        let f = self.field();
        Ok(self.tabulate(|z| f.chi(i as i64, z.y)))
    }

    /// `(Ψ_a ∗ η_i)(p) = Σ_u ψ_a(u) η_i(Δ(x - u + y√δ, √δ))`.
    pub fn psi_star_eta(&self, a: u32, i: usize) -> Result<PFunction> {
        if a == 0 {
            return Err(Error::InvalidDistance(0, "Ψ_a ∗ η_i needs a ≠ 0"));
        }
        let eta = self.hecke.idempotent(i)?;
        Ok(self.psi_star(a, &eta))
    }

    /// `Σ_u ψ_a(u) φ(label of (x - u, y))` for any bi-K-invariant `φ`.
    pub fn psi_star(&self, a: u32, phi: &HeckeElement) -> PFunction {
        let f = self.field();
        let plane = self.hecke.plane();
        self.tabulate(|z| {
            (0..self.q())
                .map(|u| {
                    let idx = plane.index_of(PlanePoint { x: f.sub(z.x, u), y: z.y });
                    f.psi(a, u) * phi.get(plane.base_distance(idx))
                })
                .sum()
        })
    }

    /// `K_{i,ψ_a}(p) = ψ_a(-x) χ^i(y) Σ_u ψ_a(u) χ̄^i(u² - δy²)`.
    pub fn terras_k(&self, i: u32, a: u32) -> Result<PFunction> {
        self.check_index(i as i64, 1, self.q() as i64 - 1)?;
        let f = self.field();
        let i = i as i64;
        Ok(self.tabulate(|z| {
            let dy2 = f.mul(f.delta(), f.mul(z.y, z.y));
            let s: Complex64 = (0..self.q()).map(|u| f.psi(a, u) * f.chi0(-i, f.sub(f.mul(u, u), dy2))).sum();
            f.psi(a, f.neg(z.x)) * f.chi(i, z.y) * s
        }))
    }

    /// `H_{t,i,ψ_a}(p) = ψ_a(-x)/(q+1) Σ*_u ψ_a(u) Σ_{α∈U₁} ω^i(α)
    /// s(α + 1/α + δy/t + t/(δy) - u²/(ty))`.
    pub fn evans_h(&self, t: u32, i: u32, a: u32) -> Result<PFunction> {
        if t == 0 {
            return Err(Error::OutOfRange { index: 0, range: "t ≠ 0".into() });
        }
        self.check_index(i as i64, 1, self.q() as i64 - 1)?;
        let f = self.field();
        let q = self.q();
        let delta = f.delta();
        let omega: Vec<(u32, Complex64)> = self.u1.iter().map(|&(tr, al)| (tr, f.omega(i as i64, al))).collect();
        let starred_y = match self.asterisk {
            AsteriskRule::Normalized => f.div(t, delta),
            AsteriskRule::Verbatim => t,
        };
        Ok(self.tabulate(|z| {
            let w = f.div(f.mul(delta, z.y), t);
            let base = f.add(w, f.inv(w));
            let ty_inv = f.inv(f.mul(t, z.y));
            let starred = z.y == starred_y || z.y == f.neg(starred_y);
            let mut total = Complex64::new(0.0, 0.0);
            for u in 0..q {
                let c = f.sub(base, f.mul(f.mul(u, u), ty_inv));
                let inner: Complex64 = omega.iter().map(|&(tr, om)| om * f.quad(f.add(tr, c)) as f64).sum();
                let weight = if u == 0 && starred { (q + 1) as f64 } else { 1.0 };
                total += f.psi(a, u) * inner * weight;
            }
            f.psi(a, f.neg(z.x)) * total / (q + 1) as f64
        }))
    }

    /// `C_i(a) = Σ_x ψ_a(x) χ^i(x² - δ)`.
    pub fn c_sum(&self, i: i64, a: u32) -> Complex64 {
        let f = self.field();
        (0..self.q()).map(|x| f.psi(a, x) * f.chi0(i, f.sub(f.mul(x, x), f.delta()))).sum()
    }

    /// `F(1; a, φ) = Σ_x φ([[1, x], [0, 1]]) ψ_a(x)`.
    pub fn fourier_coeff(&self, a: u32, phi: &HeckeElement) -> Complex64 {
        let f = self.field();
        let plane = self.hecke.plane();
        (0..self.q()).map(|x| phi.get(plane.base_distance(plane.index_of(PlanePoint { x, y: 1 }))) * f.psi(a, x)).sum()
    }

    /// The cuspidal-sector sum
    /// `Σ_u ψ_a(u) |S(u + √δ)|⁻¹ Σ_{α∈U₁} ω^i(α) s(α + 1/α + u²/δ - 2)`.
    pub fn cuspidal_fourier_sum(&self, i: u32, a: u32) -> Complex64 {
        let f = self.field();
        let plane = self.hecke.plane();
        let two = 2 % self.q();
        (0..self.q())
            .map(|u| {
                let orbit = plane.k_orbit_size(plane.index_of(PlanePoint { x: u, y: 1 })) as f64;
                let c = f.sub(f.div(f.mul(u, u), f.delta()), two);
                let inner: Complex64 =
                    self.u1.iter().map(|&(tr, al)| f.omega(i as i64, al) * f.quad(f.add(tr, c)) as f64).sum();
                f.psi(a, u) * inner / orbit
            })
            .sum()
    }

    pub fn build(&self, label: &EigenfunctionLabel) -> Result<PFunction> {
        match *label {
            EigenfunctionLabel::ChiFunc { i } => self.chi_func(i),
            EigenfunctionLabel::PsiStarEta { a, i } => self.psi_star_eta(a, i),
            EigenfunctionLabel::TerrasK { i, a } => self.terras_k(i, a),
            EigenfunctionLabel::EvansH { t, i, a } => self.evans_h(t, i, a),
        }
    }

    /// Spherical representation index whose isotypic component contains the
    /// function, when it is determined by the label alone.
    pub fn sector(&self, label: &EigenfunctionLabel) -> Option<usize> {
        let q = self.q() as usize;
        let half = (q - 1) / 2;
        let fold_chi = |i: usize| {
            let i = i % (q - 1);
            i.min(q - 1 - i)
        };
        match *label {
            EigenfunctionLabel::ChiFunc { i } => Some(fold_chi(i as usize)),
            EigenfunctionLabel::PsiStarEta { i, .. } => Some(i),
            EigenfunctionLabel::TerrasK { i, .. } => Some(fold_chi(i as usize)),
            EigenfunctionLabel::EvansH { i, .. } => {
                let i = i as usize;
                if i <= half {
                    Some(q - i)
                } else if i > half + 1 {
                    Some(i - 1)
                } else {
                    None
                }
            }
        }
    }

    /// `max_b ‖A_b f - λ_b f‖ / ‖f‖` over `b ∈ F_q^×`, with `λ_b` the
    /// Rayleigh quotient.
    pub fn eigen_residual(&self, f: &PFunction) -> f64 {
        let nf = f.norm();
        (1..self.q())
            .map(|b| {
                let af = self.hecke.t_apply(&self.hecke.indicator(b), f);
                let lam = af.inner(f) / f.inner(f);
                af.sub(&f.scale(lam)).norm() / nf
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{DeltaChoice, FieldCtx};
    use crate::plane::PlaneCtx;

    fn hecke(q: u32) -> HeckeCtx {
        HeckeCtx::new(PlaneCtx::new(FieldCtx::new(q, DeltaChoice::Auto).unwrap()))
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn chi_orthogonality() {
        for q in [3u32, 5, 7] {
            let h = hecke(q);
            let e = Eigenfunctions::new(&h);
            let n = (q * (q - 1)) as f64;
            for i in 1..q {
                for j in 1..q {
                    let ip = e.chi_func(i).unwrap().inner(&e.chi_func(j).unwrap());
                    let want = if i == j { n } else { 0.0 };
                    assert!((ip - want).norm() < 1e-9);
                }
            }
            let one = e.chi_func(q - 1).unwrap();
            assert!(one.values.iter().all(|v| (v - 1.0).norm() < 1e-12));
            assert!(e.chi_func(0).is_err() && e.chi_func(q).is_err());
        }
        let h = hecke(3);
        let e = Eigenfunctions::new(&h);
        for (z, v) in h.plane().points().iter().zip(e.chi_func(1).unwrap().values) {
            let want = if z.y == 1 { 1.0 } else { -1.0 };
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_star_eta_projections() {
        let h = hecke(5);
        let e = Eigenfunctions::new(&h);
        assert!(e.psi_star_eta(0, 1).is_err());
        for a in 1..5 {
            for i in 0..5 {
                let f = e.psi_star_eta(a, i).unwrap();
                for j in 0..5 {
                    let pf = h.project(j, &f).unwrap();
                    let want = if i == j { f.clone() } else { PFunction::zeros(f.len()) };
                    assert!(pf.sub(&want).max_abs() < 1e-9 * (1.0 + f.max_abs()));
                }
            }
        }
    }

    #[test]
    fn families_are_eigenfunctions() {
        for q in [5u32, 7] {
            let h = hecke(q);
            let e = Eigenfunctions::new(&h);
            for i in 1..q {
                let mut worst: f64 = 0.0;
                for a in 0..q {
                    let k = e.terras_k(i, a).unwrap();
                    if k.norm() > 1e-9 {
                        assert!(e.eigen_residual(&k) < 1e-8);
                    }
                    let hf = e.evans_h(1, i, a).unwrap();
                    if hf.norm() < 1e-9 {
                        continue;
                    }
                    let r = e.eigen_residual(&hf);
                    worst = worst.max(r);
                    if i != q.div_ceil(2) {
                        assert!(r < 1e-8, "q={q} i={i} a={a} r={r}");
                    }
                }
                if i == q.div_ceil(2) {
                    assert!(worst > 1e-3);
                }
            }
        }
    }

    #[test]
    fn verbatim_asterisk_is_not_an_eigenfunction() {
        let h = hecke(5);
        let e = Eigenfunctions::new(&h).with_asterisk(AsteriskRule::Verbatim);
        let f = e.evans_h(1, 1, 1).unwrap();
        assert!(e.eigen_residual(&f) > 1e-3);
    }

    #[test]
    fn sectors_match_projections() {
        for q in [5u32, 7, 11] {
            let h = hecke(q);
            let e = Eigenfunctions::new(&h);
            let labels = (1..q).flat_map(|i| {
                [
                    EigenfunctionLabel::ChiFunc { i },
                    EigenfunctionLabel::TerrasK { i, a: 1 },
                    EigenfunctionLabel::EvansH { t: h.plane().field().neg(h.plane().field().delta()), i, a: 1 },
                    EigenfunctionLabel::PsiStarEta { a: 2, i: i as usize },
                ]
            });
            for label in labels {
                let f = e.build(&label).unwrap();
                if f.norm() < 1e-9 {
                    continue;
                }
                match e.sector(&label) {
                    Some(s) => {
                        let p = h.project(s, &f).unwrap();
                        assert!(p.sub(&f).norm() < 1e-9 * f.norm(), "{label:?}");
                    }
                    None => assert!(matches!(label, EigenfunctionLabel::EvansH { i, .. } if i == q.div_ceil(2))),
                }
            }
        }
    }

    #[test]
    fn terras_k_at_zero() {
        for q in [5u32, 7] {
            let h = hecke(q);
            let e = Eigenfunctions::new(&h);
            for i in 1..q {
                let k = e.terras_k(i, 0).unwrap();
                let conj_idx = if i == q - 1 { q - 1 } else { q - 1 - i };
                let want = e.chi_func(conj_idx).unwrap().scale(e.c_sum(i as i64, 0).conj());
                assert!(k.sub(&want).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn terras_k_base_value() {
        let h = hecke(7);
        let e = Eigenfunctions::new(&h);
        let f = h.plane().field();
        for i in 1..7 {
            for a in 0..7 {
                let k = e.terras_k(i, f.neg(a)).unwrap();
                assert_eq!(h.plane().point(0), PlanePoint::BASE);
                assert!((k.values[0] - e.c_sum(i as i64, a).conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn c_sum_values() {
        for q in [5u32, 7] {
            let h = hecke(q);
            let e = Eigenfunctions::new(&h);
            let f = h.plane().field();
            assert!((e.c_sum(0, 0) - q as f64).norm() < 1e-12);
            for i in 1..(q - 1) as i64 {
                let want = -f.chi(i, f.neg(f.delta())) * f.jacobi_sum_quad(i);
                assert!((e.c_sum(i, 0) - want).norm() < 1e-10);
            }
            // The Jacobi form does not extend to the trivial character.
            let j0 = -f.chi(0, f.neg(f.delta())) * f.jacobi_sum_quad(0);
            assert!((e.c_sum(q as i64 - 1, 0) - j0).norm() > 1.0);
            for i in 0..q as i64 {
                for a in 0..q {
                    assert!(e.c_sum(i, a).norm() <= q as f64 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn c_sum_fixtures_q5() {
        // δ = 2; direct evaluation of Σ_x ψ_a(x) χ^i(x² - 2) by a separate
        // hand enumeration: x² - 2 runs over {3, 4, 2, 2, 4}, with log_2
        // values {3, 2, 1, 1, 2}, so χ^2 gives {-1, 1, -1, -1, 1}.
        let h = hecke(5);
        let e = Eigenfunctions::new(&h);
        let z = (2.0 * std::f64::consts::PI / 5.0).cos();
        let z2 = (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!((e.c_sum(2, 0) - c(-1.0)).norm() < 1e-12);
        // χ^2 is 1 at x = 1, 4 and -1 at x = 0, 2, 3.
        let want = -1.0 + 2.0 * z - 2.0 * z2;
        assert!((e.c_sum(2, 1) - c(want)).norm() < 1e-12);
        assert!((e.c_sum(4, 0) - c(5.0)).norm() < 1e-12);
        assert!((e.c_sum(4, 1) - c(0.0)).norm() < 1e-12);
    }

    #[test]
    fn fourier_coefficients() {
        for q in [5u32, 7] {
            let h = hecke(q);
            let e = Eigenfunctions::new(&h);
            let g = h.plane().group_order();
            let k = h.plane().k_order();
            let half = (q - 1) / 2;
            for a in 1..q {
                for i in 1..q as usize {
                    let eta = h.idempotent(i).unwrap();
                    let f1 = e.fourier_coeff(a, &eta);
                    assert!(f1.norm() > 1e-12);
                    let pe = e.psi_star_eta(a, i).unwrap();
                    let lhs = pe.inner(&pe);
                    assert!((lhs - f1 * (q as f64 / k)).norm() < 1e-9 * lhs.norm());
                    let base = e.psi_star_eta(h.plane().field().neg(a), i).unwrap().values[0];
                    assert!((base - f1).norm() < 1e-12);
                    let want = if i as u32 <= half {
                        c(h.dim(i) as f64 / (g * (q + 1) as f64) * e.c_sum(i as i64, a).norm_sqr())
                    } else {
                        e.cuspidal_fourier_sum(q - i as u32, a) * (h.dim(i) as f64 / g)
                    };
                    assert!((f1 - want).norm() < 1e-9 * f1.norm());
                }
            }
        }
    }

    #[test]
    fn base_comparison_identities() {
        let q = 7u32;
        let h = hecke(q);
        let e = Eigenfunctions::new(&h);
        let f = h.plane().field();
        let g = h.plane().group_order();
        let half = (q - 1) / 2;
        for a in 1..q {
            for i in 1..=half {
                let lhs = e.psi_star_eta(a, i as usize).unwrap();
                let k = e.terras_k(i, f.neg(a)).unwrap();
                let coef = e.c_sum(i as i64, a) * (h.dim(i as usize) as f64 / (g * (q + 1) as f64));
                assert!(lhs.sub(&k.scale(coef)).max_abs() < 1e-12);
                let hat = (half + i) as usize;
                let hf = e.evans_h(f.neg(f.delta()), q - hat as u32, f.neg(a)).unwrap();
                let coef = c(h.dim(hat) as f64 / g);
                let lhs = e.psi_star_eta(a, hat).unwrap();
                assert!(lhs.sub(&hf.scale(coef)).max_abs() < 1e-12);
            }
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(40))]

        #[test]
        fn projections_carry_formula_eigenvalues(qi in 0usize..3, a in 1u32..1000, i in 0usize..1000, b in 1u32..1000) {
            let q = [5u32, 7, 11][qi];
            let h = HeckeCtx::new(PlaneCtx::new(FieldCtx::new(q, DeltaChoice::Auto).unwrap()));
            let e = Eigenfunctions::new(&h);
            let (a, i, b) = (a % (q - 1) + 1, i % q as usize, b % (q - 1) + 1);
            let f = e.psi_star_eta(a, i).unwrap();
            proptest::prop_assume!(f.norm() > 1e-9 * f.len() as f64);
            proptest::prop_assert!(e.eigen_residual(&f) < 1e-8);
            let af = h.t_apply(&h.indicator(b), &f);
            let lam = (af.inner(&f) / f.inner(&f)).re;
            let want = crate::spectra::eigenvalue_formula(&h, i, b);
            proptest::prop_assert!((lam - want).abs() < 1e-8 * (1.0 + want.abs()), "{} vs {}", lam, want);
        }
    }
}
