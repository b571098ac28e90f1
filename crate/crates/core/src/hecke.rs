//! The Hecke algebra `H(G, K)` of bi-`K`-invariant functions, its
//! idempotents and its action on functions on the plane.
//!
//! A bi-`K`-invariant function is constant on each double coset `D_a`, so it
//! is stored as `q` values indexed by the distance label `a`. Convolution is
//! the plain group convolution `(f∗h)(w) = Σ_{g∈G} f(g) h(g⁻¹w)`; with this
//! convention the idempotents satisfy `η_i ∗ η_j = [i = j] η_i` exactly.
//!
//! The operator on `L²(P)` is `T_φ f(p) = Σ_{p₁∈P} f(p₁) φ(p₁⁻¹p)`. Under this
//! normalisation `T_φ T_ψ = |K|⁻¹ T_{φ∗ψ}`, so the honest projections are
//! `|K|·T_{η_i}` and the graph adjacency operator is `T` of the 0/1
//! indicator of `D_a`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gl2::{character_value, classify, spherical_inventory, SphericalRep};
use crate::plane::PlaneCtx;

/// Largest `q` for which dense `q(q-1) × q(q-1)` operators are built.
pub const DENSE_LIMIT: u32 = 13;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A bi-`K`-invariant function, one value per double coset `D_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeElement {
    pub values: Vec<Complex64>,
}

impl HeckeElement {
    pub fn zeros(q: u32) -> Self {
        Self { values: vec![ZERO; q as usize] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn get(&self, a: u32) -> Complex64 {
        self.values[a as usize]
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect() }
    }

    /// `φ̂(h) = conj φ(h⁻¹)`; labels are symmetric, so only conjugation remains.
    pub fn adjoint(&self) -> Self {
        Self { values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.values.iter().zip(&o.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A complex function on `P ≅ H_q`, indexed by canonical point order.
#[derive(Debug, Clone, PartialEq)]
pub struct PFunction {
    pub values: Vec<Complex64>,
}

impl PFunction {
    pub fn zeros(n: usize) -> Self {
        Self { values: vec![ZERO; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `⟨f, g⟩ = Σ f(p) conj g(p)`.
    pub fn inner(&self, o: &Self) -> Complex64 {
        self.values.iter().zip(&o.values).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_dvector(&self) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(&self.values)
    }
}

/// Structure constants `c[a][b][c] = (1_{D_a} ∗ 1_{D_b})(w)` for `w ∈ D_c`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    q: usize,
    k_order: f64,
    counts: Vec<u64>,
}

impl StructureConstants {
    pub fn get(&self, a: u32, b: u32, c: u32) -> f64 {
        self.k_order * self.count(a, b, c) as f64
    }

    /// The integer `c[a][b][c] / |K|`.
    pub fn count(&self, a: u32, b: u32, c: u32) -> u64 {
        let q = self.q;
        self.counts[(a as usize * q + b as usize) * q + c as usize]
    }

    pub fn convolve(&self, f: &HeckeElement, h: &HeckeElement) -> HeckeElement {
        let q = self.q;
        let mut out = vec![ZERO; q];
        for a in 0..q {
            for b in 0..q {
                let fh = f.values[a] * h.values[b];
                for (c, o) in out.iter_mut().enumerate() {
                    let n = self.counts[(a * q + b) * q + c];
                    if n != 0 {
                        *o += fh * (self.k_order * n as f64);
                    }
                }
            }
        }
        HeckeElement { values: out }
    }
}

/// The Hecke algebra together with the spherical functions of every
/// spherical representation.
#[derive(Debug, Clone)]
pub struct HeckeCtx {
    plane: PlaneCtx,
    reps: Vec<SphericalRep>,
    /// `sph[i][a] = |K|⁻¹ Σ_{k∈K} tr π_i(k g_a)`, equal to 1 at `a = 0`.
    sph: Vec<Vec<Complex64>>,
}

impl HeckeCtx {
    pub fn new(plane: PlaneCtx) -> Self {
        let q = plane.q();
        let reps = spherical_inventory(q);
        let f = plane.field();
        let kreps = plane.k_projective();
        // Every spherical representation has trivial central character, so
        // averaging over K/Z equals averaging over K.
        let by_distance: Vec<Vec<Complex64>> = (0..q)
            .into_par_iter()
            .map(|a| {
                let mut acc = vec![ZERO; reps.len()];
                let Ok(g) = plane.double_coset_rep(a) else {
                    return acc;
                };
                for k in &kreps {
                    let cls = classify(f, &k.mul(f, &g));
                    for (slot, rep) in acc.iter_mut().zip(&reps) {
                        *slot += character_value(f, rep, &cls);
                    }
                }
                let n = kreps.len() as f64;
                acc.iter_mut().for_each(|v| *v /= n);
                acc
            })
            .collect();
        let sph = (0..reps.len()).map(|i| by_distance.iter().map(|row| row[i]).collect()).collect();
        HeckeCtx { plane, reps, sph }
    }

    pub fn plane(&self) -> &PlaneCtx {
        &self.plane
    }

    pub fn q(&self) -> u32 {
        self.plane.q()
    }

    pub fn reps(&self) -> &[SphericalRep] {
        &self.reps
    }

    pub fn dim(&self, i: usize) -> usize {
        self.reps[i].dim
    }

    /// `η'_i(D_a) = |K|⁻¹ Σ_{k∈K} tr π_i(k g_a)`.
    pub fn spherical_value(&self, i: usize, a: u32) -> Complex64 {
        self.sph[i][a as usize]
    }

    /// `η_i = dim(π_i)/|G| · η'_i`.
    pub fn idempotent(&self, i: usize) -> Result<HeckeElement> {
        if i >= self.reps.len() {
            return Err(Error::OutOfRange { index: i as i64, range: format!("0..{}", self.reps.len()) });
        }
        let c = self.reps[i].dim as f64 / self.plane.group_order();
        Ok(HeckeElement { values: self.sph[i].iter().map(|v| v * c).collect() })
    }

    pub fn idempotents(&self) -> Vec<HeckeElement> {
        (0..self.reps.len()).map(|i| self.idempotent(i).expect("in range")).collect()
    }

    /// Indicator of `D_a`.
    pub fn indicator(&self, a: u32) -> HeckeElement {
        let mut h = HeckeElement::zeros(self.q());
        h.values[a as usize] = Complex64::new(1.0, 0.0);
        h
    }

    /// Convolution unit `|K|⁻¹ 1_K`.
    pub fn unit(&self) -> HeckeElement {
        self.indicator(0).scale(Complex64::new(1.0 / self.plane.k_order(), 0.0))
    }

    /// Direct group convolution, reduced to a sum over the plane:
    /// `(f∗h)(w) = |K| Σ_z f(Δ(z, √δ)) h(Δ(w√δ, z))`.
    pub fn convolve(&self, f: &HeckeElement, h: &HeckeElement) -> HeckeElement {
        let p = &self.plane;
        let k = p.k_order();
        let values = (0..self.q())
            .map(|c| {
                let Some(&w) = p.sphere(c).first() else {
                    return ZERO;
                };
                let s: Complex64 = (0..p.num_points())
                    .map(|j| f.values[p.base_distance(j) as usize] * h.values[p.distance_idx(w, j) as usize])
                    .sum();
                s * k
            })
            .collect();
        HeckeElement { values }
    }

    pub fn structure_constants(&self) -> StructureConstants {
        let p = &self.plane;
        let q = self.q() as usize;
        let mut counts = vec![0u64; q * q * q];
        for c in 0..q {
            let Some(&w) = p.sphere(c as u32).first() else {
                continue;
            };
            for j in 0..p.num_points() {
                let a = p.base_distance(j) as usize;
                let b = p.distance_idx(w, j) as usize;
                counts[(a * q + b) * q + c] += 1;
            }
        }
        StructureConstants { q, k_order: p.k_order(), counts }
    }

    /// `T_φ f(p) = Σ_{p₁} f(p₁) φ(Δ(p₁, p))`.
    pub fn t_apply(&self, phi: &HeckeElement, f: &PFunction) -> PFunction {
        let p = &self.plane;
        let n = p.num_points();
        let values =
            (0..n).map(|i| (0..n).map(|j| f.values[j] * phi.values[p.distance_idx(j, i) as usize]).sum()).collect();
        PFunction { values }
    }

    fn check_dense(&self) -> Result<()> {
        if self.q() > DENSE_LIMIT {
            return Err(Error::TooLargeForDense { q: self.q(), limit: DENSE_LIMIT });
        }
        Ok(())
    }

    /// Matrix of `T_φ` in the canonical point basis.
    pub fn operator_matrix(&self, phi: &HeckeElement) -> Result<DMatrix<Complex64>> {
        self.check_dense()?;
        let p = &self.plane;
        let n = p.num_points();
        Ok(DMatrix::from_fn(n, n, |i, j| phi.values[p.distance_idx(j, i) as usize]))
    }

    /// `|K|·T_{η_i}`, the orthogonal projection onto the `π_i`-isotypic part.
    pub fn projector_matrix(&self, i: usize) -> Result<DMatrix<Complex64>> {
        let eta = self.idempotent(i)?;
        Ok(self.operator_matrix(&eta)? * Complex64::new(self.plane.k_order(), 0.0))
    }

    /// `|K|·T_{η_i} f` without materialising the matrix.
    pub fn project(&self, i: usize, f: &PFunction) -> Result<PFunction> {
        let eta = self.idempotent(i)?;
        Ok(self.t_apply(&eta, f).scale(Complex64::new(self.plane.k_order(), 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{DeltaChoice, FieldCtx};
    use crate::gl2::classify;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hecke(q: u32) -> HeckeCtx {
        HeckeCtx::new(PlaneCtx::new(FieldCtx::new(q, DeltaChoice::Auto).unwrap()))
    }

    fn random_element(rng: &mut ChaCha8Rng, q: u32) -> HeckeElement {
        HeckeElement {
            values: (0..q).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        }
    }

    fn random_pfunction(rng: &mut ChaCha8Rng, n: usize) -> PFunction {
        PFunction {
            values: (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        }
    }

    #[test]
    fn spherical_values_match_full_k_average() {
        for q in [3u32, 5, 7] {
            let h = hecke(q);
            let p = h.plane();
            let f = p.field();
            let ks = p.k_elements();
            for (i, rep) in h.reps().iter().enumerate() {
                for a in 0..q {
                    let g = p.double_coset_rep(a).unwrap();
                    let s: Complex64 = ks.iter().map(|k| character_value(f, rep, &classify(f, &k.mul(f, &g)))).sum();
                    let direct = s / ks.len() as f64;
                    assert!((direct - h.spherical_value(i, a)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn idempotent_examples() {
        let h = hecke(5);
        let g = h.plane().group_order();
        let e0 = h.idempotent(0).unwrap();
        assert!(e0.values.iter().all(|v| (v - 1.0 / g).norm() < 1e-18));
        for i in 0..5 {
            let e = h.idempotent(i).unwrap();
            assert!((e.get(0) - h.dim(i) as f64 / g).norm() < 1e-15);
            assert!(e.values.iter().all(|v| v.im.abs() < 1e-15));
        }
        assert!(h.idempotent(5).is_err());
    }

    #[test]
    fn unit_and_commutativity() {
        let h = hecke(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_element(&mut rng, 3);
        assert!(h.convolve(&h.unit(), &x).max_abs_diff(&x) < 1e-12);

        let h = hecke(5);
        for _ in 0..100 {
            let a = random_element(&mut rng, 5);
            let b = random_element(&mut rng, 5);
            let ab = h.convolve(&a, &b);
            assert!(ab.max_abs_diff(&h.convolve(&b, &a)) < 1e-9 * ab.max_abs().max(1.0));
        }
        let g = h.plane().group_order();
        let c = HeckeElement::from_real(&[1.0 / g; 5]);
        assert!(h.convolve(&c, &c).max_abs_diff(&c) < 1e-20);
    }

    #[test]
    fn structure_constants_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in [3u32, 5] {
            let h = hecke(q);
            let sc = h.structure_constants();
            let p = h.plane();
            let k = p.k_order();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(sc.get(0, b, a), if a == b { k } else { 0.0 });
                    let weighted: f64 = (0..q).map(|c| sc.get(a, b, c) * p.sphere_size(c) as f64).sum();
                    assert_eq!(weighted, (p.sphere_size(a) * p.sphere_size(b)) as f64 * k);
                    for c in 0..q {
                        assert_eq!(sc.count(a, b, c), sc.count(b, a, c));
                    }
                }
            }
            for _ in 0..50 {
                let x = random_element(&mut rng, q);
                let y = random_element(&mut rng, q);
                let d = h.convolve(&x, &y);
                assert!(sc.convolve(&x, &y).max_abs_diff(&d) < 1e-9 * d.max_abs());
            }
        }
    }

    #[test]
    fn idempotents_are_orthogonal_and_resolve_unit() {
        for q in [3u32, 5, 7] {
            let h = hecke(q);
            let etas = h.idempotents();
            let scale = etas.iter().map(|e| e.max_abs()).fold(0.0, f64::max);
            for (i, ei) in etas.iter().enumerate() {
                for (j, ej) in etas.iter().enumerate() {
                    let c = h.convolve(ei, ej);
                    let want = if i == j { ei.clone() } else { HeckeElement::zeros(q) };
                    assert!(c.max_abs_diff(&want) < 1e-10 * scale, "q={q} i={i} j={j}");
                }
            }
            let sum = etas.iter().skip(1).fold(etas[0].clone(), |acc, e| acc.add(e));
            assert!(sum.max_abs_diff(&h.unit()) < 1e-12);
        }
    }

    #[test]
    fn operator_identity_and_self_adjointness() {
        let h = hecke(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_pfunction(&mut rng, 6);
        // |K|·T_unit = identity
        let id = h.t_apply(&h.unit(), &f).scale(Complex64::new(h.plane().k_order(), 0.0));
        assert!(id.sub(&f).max_abs() < 1e-12);
        // T of 1_{D_0} is the identity on the nose.
        assert!(h.t_apply(&h.indicator(0), &f).sub(&f).max_abs() < 1e-15);

        let h = hecke(7);
        let n = h.plane().num_points();
        for _ in 0..10 {
            let phi = random_element(&mut rng, 7);
            let f1 = random_pfunction(&mut rng, n);
            let f2 = random_pfunction(&mut rng, n);
            let l = h.t_apply(&phi, &f1).inner(&f2);
            let r = f1.inner(&h.t_apply(&phi.adjoint(), &f2));
            assert!((l - r).norm() < 1e-9);
        }
        for a in 0..7 {
            let m = h.operator_matrix(&h.indicator(a)).unwrap();
            assert_eq!(m, m.transpose());
        }
    }

    #[test]
    fn projectors() {
        for q in [3u32, 5] {
            let h = hecke(q);
            let n = h.plane().num_points();
            let mats: Vec<_> = (0..q as usize).map(|i| h.projector_matrix(i).unwrap()).collect();
            let mut total = DMatrix::<Complex64>::zeros(n, n);
            let mut rank_sum = 0.0;
            for (i, m) in mats.iter().enumerate() {
                assert!((m * m - m).camax() < 1e-9);
                let tr = m.trace();
                assert!((tr.re - h.dim(i) as f64).abs() < 1e-9);
                rank_sum += tr.re;
                total += m;
                for (j, o) in mats.iter().enumerate() {
                    if i != j {
                        assert!((m * o).camax() < 1e-9);
                    }
                }
            }
            assert!((rank_sum - n as f64).abs() < 1e-9);
            assert!((total - DMatrix::<Complex64>::identity(n, n)).camax() < 1e-9);
            let avg = Complex64::new(1.0 / n as f64, 0.0);
            assert!(mats[0].iter().all(|v| (v - avg).norm() < 1e-12));
        }
    }

    #[test]
    fn adjacency_commutes_with_projectors() {
        let h = hecke(5);
        let projs: Vec<_> = (0..5).map(|i| h.projector_matrix(i).unwrap()).collect();
        for a in 0..5 {
            let adj = h.operator_matrix(&h.indicator(a)).unwrap();
            for pr in &projs {
                assert!((&adj * pr - pr * &adj).camax() < 1e-9);
            }
        }
    }

    #[test]
    fn dense_limit_enforced() {
        let h = hecke(17);
        assert!(matches!(h.operator_matrix(&h.unit()), Err(Error::TooLargeForDense { .. })));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn convolution_is_commutative_and_associative(qi in 0usize..3, seed in 0u64..u64::MAX) {
            let q = [3u32, 5, 7][qi];
            let h = hecke(q);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_element(&mut rng, q);
            let y = random_element(&mut rng, q);
            let z = random_element(&mut rng, q);
            let xy = h.convolve(&x, &y);
            let scale = xy.max_abs().max(1e-30);
            proptest::prop_assert!(xy.max_abs_diff(&h.convolve(&y, &x)) < 1e-9 * scale);
            let l = h.convolve(&xy, &z);
            let r = h.convolve(&x, &h.convolve(&y, &z));
            proptest::prop_assert!(l.max_abs_diff(&r) < 1e-9 * l.max_abs().max(1e-30));
        }
    }
}
