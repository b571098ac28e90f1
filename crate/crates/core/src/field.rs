//! Arithmetic in the prime field `F_q` and its quadratic extension `F_q(√δ)`,
//! together with the additive and multiplicative characters built on them.
//!
//! Field elements are plain `u32` residues in `0..q`. Extension elements are
//! pairs `x + y√δ`. Discrete logarithms for both fields are tabulated at
//! construction, so every character evaluation is two table lookups.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported modulus. Keeps the `q²` extension log table small.
pub const MAX_Q: u32 = 1021;

/// An element `x + y√δ` of the quadratic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq2Elem {
    pub x: u32,
    pub y: u32,
}

impl Fq2Elem {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// True when the element lies in the base field.
    pub fn is_rational(&self) -> bool {
        self.y == 0
    }
}

/// Immutable arithmetic context for `F_q` and `F_q(√δ)`.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    q: u32,
    delta: u32,
    generator: u32,
    ext_generator: Fq2Elem,
    /// `log_q[x]` = k with `g^k = x`, for x in 1..q. Index 0 unused.
    log_q: Vec<u32>,
    exp_q: Vec<u32>,
    /// Indexed by `x * q + y`; entry for zero unused.
    log_q2: Vec<u32>,
    exp_q2: Vec<Fq2Elem>,
    /// `e^{2πi k/q}`, `e^{2πi k/(q-1)}`, `e^{2πi k/(q²-1)}`.
    roots_q: Vec<Complex64>,
    roots_qm1: Vec<Complex64>,
    roots_q2m1: Vec<Complex64>,
    /// `sqrt_q[x]` = smallest r with r² = x, if any.
    sqrt_q: Vec<Option<u32>>,
}

/// Delta selection for [`FieldCtx::new`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaChoice {
    Auto,
    Value(u32),
}

impl From<Option<u32>> for DeltaChoice {
    fn from(v: Option<u32>) -> Self {
        v.map_or(DeltaChoice::Auto, DeltaChoice::Value)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn unity_roots(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect()
}

impl FieldCtx {
    /// Builds the context for an odd prime `q`. With [`DeltaChoice::Auto`] the
    /// smallest non-square is used.
    pub fn new(q: u32, delta: impl Into<DeltaChoice>) -> Result<Self> {
        if q.is_multiple_of(2) {
            return Err(Error::EvenModulus(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q > MAX_Q {
            return Err(Error::ModulusTooLarge { q, max: MAX_Q });
        }
        let qq = q as u64;
        let pow = |b: u32, mut e: u64| -> u32 {
            let mut acc = 1u64;
            let mut base = b as u64 % qq;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % qq;
                }
                base = base * base % qq;
                e >>= 1;
            }
            acc as u32
        };
        let half = (qq - 1) / 2;
        let is_nonsquare = |d: u32| !d.is_multiple_of(q) && pow(d, half) == q - 1;

        let delta = match delta.into() {
            DeltaChoice::Auto => (2..q).find(|&d| is_nonsquare(d)).expect("odd prime has a non-square"),
            DeltaChoice::Value(d) => {
                let d = d % q;
                if d == 0 {
                    return Err(Error::DeltaZero);
                }
                if !is_nonsquare(d) {
                    return Err(Error::DeltaIsSquare { q, delta: d });
                }
                d
            }
        };

        // Smallest primitive root of F_q.
        let factors_qm1 = prime_factors(qq - 1);
        let generator =
            (2..q).find(|&c| factors_qm1.iter().all(|&p| pow(c, (qq - 1) / p) != 1)).expect("primitive root exists");

        let mut log_q = vec![0u32; q as usize];
        let mut exp_q = Vec::with_capacity(q as usize - 1);
        let mut v = 1u32;
        for k in 0..(q - 1) {
            log_q[v as usize] = k;
            exp_q.push(v);
            v = (v as u64 * generator as u64 % qq) as u32;
        }

        let mut sqrt_q = vec![None; q as usize];
        for r in (0..q).rev() {
            sqrt_q[(r as u64 * r as u64 % qq) as usize] = Some(r);
        }

        let mut ctx = FieldCtx {
            q,
            delta,
            generator,
            ext_generator: Fq2Elem::new(0, 1),
            log_q,
            exp_q,
            log_q2: vec![0; (q * q) as usize],
            exp_q2: Vec::new(),
            roots_q: unity_roots(q as usize),
            roots_qm1: unity_roots(q as usize - 1),
            roots_q2m1: unity_roots((q * q) as usize - 1),
            sqrt_q,
        };

        // Smallest generator Γ of F_q(√δ)^× (ordered by (y, x)) with Γ^(q+1) = g.
        let order = qq * qq - 1;
        let factors = prime_factors(order);
        let gamma = (1..q)
            .flat_map(|y| (0..q).map(move |x| Fq2Elem::new(x, y)))
            .find(|&c| {
                ctx.norm(c) == generator && factors.iter().all(|&p| ctx.pow2(c, order / p) != Fq2Elem::new(1, 0))
            })
            .expect("compatible extension generator exists");
        ctx.ext_generator = gamma;

        let mut exp_q2 = Vec::with_capacity(order as usize);
        let mut w = Fq2Elem::new(1, 0);
        for k in 0..order as u32 {
            let at = ctx.idx2(w);
            ctx.log_q2[at] = k;
            exp_q2.push(w);
            w = ctx.mul2(w, gamma);
        }
        ctx.exp_q2 = exp_q2;
        Ok(ctx)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// The fixed primitive root `g` of `F_q`.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    /// The fixed generator `Γ` of `F_q(√δ)^×`, with `Γ^(q+1) = g`.
    pub fn ext_generator(&self) -> Fq2Elem {
        self.ext_generator
    }

    // ---- F_q ----

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.q as u64) as u32
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in F_{}", self.q);
        let k = self.log_q[a as usize];
        self.exp_q[((self.q - 1 - k) % (self.q - 1)) as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// Reduces an arbitrary signed integer into `0..q`.
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.q as i64) as u32
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let mut acc = 1u32;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete log base `g`. Panics on zero.
    pub fn log(&self, a: u32) -> u32 {
        assert!(a != 0, "log of zero");
        self.log_q[a as usize]
    }

    pub fn is_square(&self, a: u32) -> bool {
        self.sqrt_q[a as usize].is_some()
    }

    /// Smallest square root by lift, if `a` is a square.
    pub fn sqrt(&self, a: u32) -> Option<u32> {
        self.sqrt_q[a as usize]
    }

    // ---- F_q(√δ) ----

    #[inline]
    fn idx2(&self, z: Fq2Elem) -> usize {
        (z.x * self.q + z.y) as usize
    }

    #[inline]
    pub fn add2(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        Fq2Elem::new(self.add(a.x, b.x), self.add(a.y, b.y))
    }

    #[inline]
    pub fn sub2(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        Fq2Elem::new(self.sub(a.x, b.x), self.sub(a.y, b.y))
    }

    #[inline]
    pub fn mul2(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        let q = self.q as u64;
        let (ax, ay, bx, by) = (a.x as u64, a.y as u64, b.x as u64, b.y as u64);
        let x = (ax * bx + self.delta as u64 * (ay * by % q)) % q;
        let y = (ax * by + ay * bx) % q;
        Fq2Elem::new(x as u32, y as u32)
    }

    /// Embeds a base-field element.
    #[inline]
    pub fn embed(&self, a: u32) -> Fq2Elem {
        Fq2Elem::new(a, 0)
    }

    /// Galois conjugate `x - y√δ`, equal to `z^q`.
    #[inline]
    pub fn conj(&self, z: Fq2Elem) -> Fq2Elem {
        Fq2Elem::new(z.x, self.neg(z.y))
    }

    /// Norm `x² - δy²`.
    #[inline]
    pub fn norm(&self, z: Fq2Elem) -> u32 {
        self.sub(self.mul(z.x, z.x), self.mul(self.delta, self.mul(z.y, z.y)))
    }

    /// Inverse in the extension. Panics on zero.
    pub fn inv2(&self, z: Fq2Elem) -> Fq2Elem {
        let n = self.norm(z);
        assert!(n != 0, "inverse of zero in F_q(√δ)");
        let ni = self.inv(n);
        let c = self.conj(z);
        Fq2Elem::new(self.mul(c.x, ni), self.mul(c.y, ni))
    }

    pub fn div2(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        self.mul2(a, self.inv2(b))
    }

    pub fn pow2(&self, z: Fq2Elem, e: u64) -> Fq2Elem {
        let mut acc = Fq2Elem::new(1, 0);
        let mut base = z;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul2(acc, base);
            }
            base = self.mul2(base, base);
            e >>= 1;
        }
        acc
    }

    /// Discrete log base `Γ`. Panics on zero.
    pub fn log2(&self, z: Fq2Elem) -> u32 {
        assert!(!z.is_zero(), "log of zero in F_q(√δ)");
        self.log_q2[self.idx2(z)]
    }

    /// `Γ^k`.
    pub fn exp2(&self, k: u64) -> Fq2Elem {
        let order = self.exp_q2.len() as u64;
        self.exp_q2[(k % order) as usize]
    }

    // ---- characters ----

    /// Additive character `ψ_a(x) = e^{2πi·ax/q}`.
    #[inline]
    pub fn psi(&self, a: u32, x: u32) -> Complex64 {
        self.roots_q[self.mul(a, x) as usize]
    }

    /// `χ^i(x)` for `x ≠ 0`, where `χ(g) = e^{2πi/(q-1)}`.
    ///
    /// Panics on `x = 0`; use [`FieldCtx::chi0`] inside character sums.
    #[inline]
    pub fn chi(&self, i: i64, x: u32) -> Complex64 {
        assert!(x != 0, "chi evaluated at zero");
        let n = (self.q - 1) as i64;
        let k = (i.rem_euclid(n) * self.log_q[x as usize] as i64) % n;
        self.roots_qm1[k as usize]
    }

    /// `χ^i` extended by `χ^i(0) = 0` for every `i`, including `i = 0`.
    #[inline]
    pub fn chi0(&self, i: i64, x: u32) -> Complex64 {
        if x == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.chi(i, x)
        }
    }

    /// Quadratic character `s = χ^((q-1)/2)` with `s(0) = 0`.
    #[inline]
    pub fn quad(&self, x: u32) -> i32 {
        match x {
            0 => 0,
            _ if self.is_square(x) => 1,
            _ => -1,
        }
    }

    /// `ω^i(α)` for `α ≠ 0`, where `ω(Γ) = e^{2πi/(q²-1)}`.
    #[inline]
    pub fn omega(&self, i: i64, alpha: Fq2Elem) -> Complex64 {
        let n = self.roots_q2m1.len() as i64;
        let k = (i.rem_euclid(n) * self.log2(alpha) as i64) % n;
        self.roots_q2m1[k as usize]
    }

    /// The norm-one subgroup `{α : N(α) = 1}` in increasing log order.
    pub fn norm_one_subgroup(&self) -> Vec<Fq2Elem> {
        let step = (self.q - 1) as u64;
        (0..=self.q as u64).map(|k| self.exp2(k * step)).collect()
    }

    /// Jacobi sum `Σ_{x ≠ 0,1} χ^i(x) χ^j(1-x)`.
    pub fn jacobi_sum(&self, i: i64, j: i64) -> Complex64 {
        (2..self.q).map(|x| self.chi(i, x) * self.chi(j, self.sub(1, x))).sum()
    }

    /// Jacobi sum `J(χ^i, s)` against the quadratic character.
    pub fn jacobi_sum_quad(&self, i: i64) -> Complex64 {
        self.jacobi_sum(i, ((self.q - 1) / 2) as i64)
    }
}
