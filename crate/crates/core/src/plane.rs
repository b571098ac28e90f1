//! The finite upper half plane `H_q = {x + y√δ : y ≠ 0}`, the `GL₂(F_q)`
//! action on it, the invariant pseudo-distance and the spheres around the
//! base point `√δ`.
//!
//! Points are enumerated in `(y, x)` order, so the point with coordinates
//! `(x, y)` has index `(y - 1)·q + x` and the base point `√δ` is index 0.
//! A point is identified with its coset representative `[[y, x], [0, 1]]`.

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2Elem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanePoint {
    pub x: u32,
    pub y: u32,
}

impl PlanePoint {
    pub const BASE: PlanePoint = PlanePoint { x: 0, y: 1 };

    pub fn new(x: u32, y: u32) -> Self {
        assert!(y != 0, "plane points have nonzero imaginary part");
        Self { x, y }
    }

    pub fn as_ext(&self) -> Fq2Elem {
        Fq2Elem::new(self.x, self.y)
    }

    /// The coset representative `[[y, x], [0, 1]]`.
    pub fn coset_rep(&self) -> Gl2Elem {
        Gl2Elem { a: self.y, b: self.x, c: 0, d: 1 }
    }
}

/// An invertible 2×2 matrix `[[a, b], [c, d]]` over `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gl2Elem {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Gl2Elem {
    pub const IDENTITY: Gl2Elem = Gl2Elem { a: 1, b: 0, c: 0, d: 1 };

    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        Self { a, b, c, d }
    }

    pub fn det(&self, f: &FieldCtx) -> u32 {
        f.sub(f.mul(self.a, self.d), f.mul(self.b, self.c))
    }

    pub fn trace(&self, f: &FieldCtx) -> u32 {
        f.add(self.a, self.d)
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    pub fn mul(&self, f: &FieldCtx, o: &Gl2Elem) -> Gl2Elem {
        Gl2Elem {
            a: f.add(f.mul(self.a, o.a), f.mul(self.b, o.c)),
            b: f.add(f.mul(self.a, o.b), f.mul(self.b, o.d)),
            c: f.add(f.mul(self.c, o.a), f.mul(self.d, o.c)),
            d: f.add(f.mul(self.c, o.b), f.mul(self.d, o.d)),
        }
    }

    pub fn inverse(&self, f: &FieldCtx) -> Gl2Elem {
        let di = f.inv(self.det(f));
        Gl2Elem { a: f.mul(self.d, di), b: f.mul(f.neg(self.b), di), c: f.mul(f.neg(self.c), di), d: f.mul(self.a, di) }
    }
}

/// Enumeration of `H_q ≅ G/K ≅ P` together with the stabiliser `K` of `√δ`,
/// the distance to the base point and the spheres `S_a`.
#[derive(Debug, Clone)]
pub struct PlaneCtx {
    field: FieldCtx,
    points: Vec<PlanePoint>,
    /// `Δ(z, √δ)` for every point in canonical order.
    base_distance: Vec<u32>,
    spheres: Vec<Vec<usize>>,
    orbit_sizes: Vec<usize>,
}

impl PlaneCtx {
    pub fn new(field: FieldCtx) -> Self {
        let q = field.q();
        let points: Vec<PlanePoint> = (1..q).flat_map(|y| (0..q).map(move |x| PlanePoint { x, y })).collect();
        let base_distance: Vec<u32> = points.iter().map(|&z| distance_to_base(&field, z)).collect();
        let mut spheres = vec![Vec::new(); q as usize];
        for (i, &a) in base_distance.iter().enumerate() {
            spheres[a as usize].push(i);
        }

        let mut ctx = PlaneCtx { field, points, base_distance, spheres, orbit_sizes: Vec::new() };
        let n = ctx.points.len();
        let kreps = ctx.k_projective();
        let mut sizes = vec![0usize; n];
        for start in 0..n {
            if sizes[start] != 0 {
                continue;
            }
            let z = ctx.points[start];
            let mut orbit: Vec<usize> = kreps.iter().map(|k| ctx.index_of(ctx.act(k, z))).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &i in &orbit {
                sizes[i] = orbit.len();
            }
        }
        ctx.orbit_sizes = sizes;
        ctx
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// `|P| = q(q-1)`.
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn point(&self, index: usize) -> PlanePoint {
        self.points[index]
    }

    pub fn index_of(&self, z: PlanePoint) -> usize {
        ((z.y - 1) * self.q() + z.x) as usize
    }

    /// `|G| = (q² - 1)(q² - q)`.
    pub fn group_order(&self) -> f64 {
        let q = self.q() as f64;
        (q * q - 1.0) * (q * q - q)
    }

    /// `|K| = q² - 1`.
    pub fn k_order(&self) -> f64 {
        let q = self.q() as f64;
        q * q - 1.0
    }

    /// All `q² - 1` matrices `[[a, bδ], [b, a]]`, in `(a, b)` lift order.
    pub fn k_elements(&self) -> Vec<Gl2Elem> {
        let f = &self.field;
        let q = f.q();
        (0..q)
            .flat_map(|a| (0..q).map(move |b| (a, b)))
            .filter(|&(a, b)| a != 0 || b != 0)
            .map(|(a, b)| Gl2Elem::new(a, f.mul(b, f.delta()), b, a))
            .collect()
    }

    /// Representatives of `K / Z`: `[[1, bδ], [b, 1]]` for every `b`, plus
    /// `[[0, δ], [1, 0]]`. Central elements act trivially on `H_q`.
    pub fn k_projective(&self) -> Vec<Gl2Elem> {
        let f = &self.field;
        let q = f.q();
        let mut out: Vec<Gl2Elem> = (0..q).map(|b| Gl2Elem::new(1, f.mul(b, f.delta()), b, 1)).collect();
        out.push(Gl2Elem::new(0, f.delta(), 1, 0));
        out
    }

    /// Möbius action `(az + b)/(cz + d)`.
    pub fn act(&self, g: &Gl2Elem, z: PlanePoint) -> PlanePoint {
        let f = &self.field;
        let w = z.as_ext();
        let num = f.add2(f.mul2(f.embed(g.a), w), f.embed(g.b));
        let den = f.add2(f.mul2(f.embed(g.c), w), f.embed(g.d));
        assert!(!den.is_zero(), "cz + d vanished for a non-rational z");
        let r = f.div2(num, den);
        assert!(r.y != 0, "action left the plane");
        PlanePoint { x: r.x, y: r.y }
    }

    /// `g·√δ`, the point whose coset is `gK`.
    pub fn point_of(&self, g: &Gl2Elem) -> PlanePoint {
        self.act(g, PlanePoint::BASE)
    }

    /// Pseudo-distance `N(z1 - z2) / (Im z1 · Im z2)`.
    pub fn distance(&self, z1: PlanePoint, z2: PlanePoint) -> u32 {
        let f = &self.field;
        let n = f.norm(f.sub2(z1.as_ext(), z2.as_ext()));
        f.div(n, f.mul(z1.y, z2.y))
    }

    /// Distance between two points given by canonical index.
    #[inline]
    pub fn distance_idx(&self, i: usize, j: usize) -> u32 {
        self.distance(self.points[i], self.points[j])
    }

    /// `Δ(z, √δ)` for the point at `index`; this labels the double coset of
    /// its representative.
    #[inline]
    pub fn base_distance(&self, index: usize) -> u32 {
        self.base_distance[index]
    }

    pub fn base_distances(&self) -> &[u32] {
        &self.base_distance
    }

    /// Canonical indices of the sphere `S_a = {z : Δ(z, √δ) = a}`.
    pub fn sphere(&self, a: u32) -> &[usize] {
        &self.spheres[a as usize]
    }

    pub fn sphere_size(&self, a: u32) -> usize {
        self.spheres[a as usize].len()
    }

    /// `4δ`, the distance excluded from the Ramanujan family.
    pub fn four_delta(&self) -> u32 {
        self.field.mul(4 % self.q(), self.field.delta())
    }

    /// Nonzero distances other than `4δ`.
    pub fn regular_distances(&self) -> Vec<u32> {
        let fd = self.four_delta();
        (1..self.q()).filter(|&a| a != fd).collect()
    }

    pub fn k_orbit_size(&self, index: usize) -> usize {
        self.orbit_sizes[index]
    }

    /// Representative of the double coset `D_a`: the coset matrix of the
    /// first point of `S_a`.
    pub fn double_coset_rep(&self, a: u32) -> Result<Gl2Elem> {
        let first = *self.sphere(a).first().ok_or(Error::EmptySphere(a))?;
        Ok(self.points[first].coset_rep())
    }

    /// Double-coset label of an arbitrary group element.
    pub fn label_of(&self, g: &Gl2Elem) -> u32 {
        distance_to_base(&self.field, self.point_of(g))
    }
}

fn distance_to_base(f: &FieldCtx, z: PlanePoint) -> u32 {
    // (x² - δ(y - 1)²) / y
    let ym1 = f.sub(z.y, 1);
    let n = f.sub(f.mul(z.x, z.x), f.mul(f.delta(), f.mul(ym1, ym1)));
    f.div(n, z.y)
}
