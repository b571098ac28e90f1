//! Conjugacy classes of `GL₂(F_q)` and the characters of its `q` spherical
//! irreducible representations.
//!
//! Characters are read off the standard class table; no representation
//! space is ever built. The spherical representations, in idempotent order:
//!
//! | index            | representation                  | dim   |
//! |------------------|---------------------------------|-------|
//! | 0                | trivial                         | 1     |
//! | 1 ..= (q-3)/2    | principal series `Ind(χ^j, χ^-j)` | q + 1 |
//! | (q-1)/2          | `(s∘det) ⊗ Steinberg`           | q     |
//! | (q-1)/2 + j      | cuspidal for `ν_j = ω^{j(q-1)}` | q - 1 |

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, Fq2Elem};
use crate::plane::Gl2Elem;

/// Conjugacy class of an invertible matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassDescriptor {
    /// Scalar matrix `a·I`.
    Central(u32),
    /// Conjugate to `[[a, 1], [0, a]]`.
    NonSemisimple(u32),
    /// Distinct eigenvalues in `F_q`, stored with the smaller lift first.
    Split(u32, u32),
    /// Eigenvalues `α, α^q` outside `F_q`; the representative has the
    /// smaller `√δ`-coefficient.
    Elliptic(Fq2Elem),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", content = "j")]
pub enum RepKind {
    Trivial,
    Principal(u32),
    SteinbergTwist,
    Cuspidal(u32),
}

impl RepKind {
    pub fn label(&self) -> String {
        match self {
            RepKind::Trivial => "trivial".into(),
            RepKind::Principal(j) => format!("principal({j})"),
            RepKind::SteinbergTwist => "steinberg_twist".into(),
            RepKind::Cuspidal(j) => format!("cuspidal({j})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SphericalRep {
    pub index: usize,
    pub kind: RepKind,
    pub dim: usize,
}

pub fn classify(f: &FieldCtx, g: &Gl2Elem) -> ClassDescriptor {
    if g.is_scalar() {
        return ClassDescriptor::Central(g.a);
    }
    classify_trace_det(f, g.trace(f), g.det(f))
}

/// Class of a non-scalar matrix with the given trace and determinant.
pub fn classify_trace_det(f: &FieldCtx, tr: u32, det: u32) -> ClassDescriptor {
    let two_inv = f.inv(2);
    let disc = f.sub(f.mul(tr, tr), f.mul(4 % f.q(), det));
    if disc == 0 {
        return ClassDescriptor::NonSemisimple(f.mul(tr, two_inv));
    }
    if let Some(r) = f.sqrt(disc) {
        let e1 = f.mul(f.add(tr, r), two_inv);
        let e2 = f.mul(f.sub(tr, r), two_inv);
        return ClassDescriptor::Split(e1.min(e2), e1.max(e2));
    }
    // disc = δ·r² for some r
    let r = f.sqrt(f.div(disc, f.delta())).expect("disc/δ is a square");
    let y = f.mul(r, two_inv);
    let y = y.min(f.neg(y));
    ClassDescriptor::Elliptic(Fq2Elem::new(f.mul(tr, two_inv), y))
}

/// The `q` spherical representations in idempotent order.
pub fn spherical_inventory(q: u32) -> Vec<SphericalRep> {
    let q = q as usize;
    let half = (q - 1) / 2;
    let mut reps = Vec::with_capacity(q);
    reps.push(SphericalRep { index: 0, kind: RepKind::Trivial, dim: 1 });
    for j in 1..half {
        reps.push(SphericalRep { index: j, kind: RepKind::Principal(j as u32), dim: q + 1 });
    }
    reps.push(SphericalRep { index: half, kind: RepKind::SteinbergTwist, dim: q });
    for j in 1..=half {
        // ν_j^q ≠ ν_j  ⇔  j(q-1) ≢ 0 mod q+1  ⇔  2j ≢ 0 mod q+1
        assert!((2 * j) % (q + 1) != 0, "cuspidal character ν_{j} is Galois-fixed");
        reps.push(SphericalRep { index: half + j, kind: RepKind::Cuspidal(j as u32), dim: q - 1 });
    }
    reps
}

pub fn rep_at(q: u32, index: usize) -> Result<SphericalRep> {
    spherical_inventory(q)
        .get(index)
        .copied()
        .ok_or_else(|| Error::OutOfRange { index: index as i64, range: format!("0..{q}") })
}

fn nu(f: &FieldCtx, j: u32, alpha: Fq2Elem) -> Complex64 {
    f.omega(j as i64 * (f.q() as i64 - 1), alpha)
}

/// `tr π(g)` for any `g` in the class.
pub fn character_value(f: &FieldCtx, rep: &SphericalRep, cls: &ClassDescriptor) -> Complex64 {
    let q = f.q() as f64;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match (rep.kind, *cls) {
        (RepKind::Trivial, _) => one,

        (RepKind::Principal(_), ClassDescriptor::Central(_)) => Complex64::new(q + 1.0, 0.0),
        (RepKind::Principal(_), ClassDescriptor::NonSemisimple(_)) => one,
        (RepKind::Principal(j), ClassDescriptor::Split(a, b)) => {
            let r = f.chi(j as i64, f.div(a, b));
            r + r.conj()
        }
        (RepKind::Principal(_), ClassDescriptor::Elliptic(_)) => zero,

        (RepKind::SteinbergTwist, ClassDescriptor::Central(_)) => Complex64::new(q, 0.0),
        (RepKind::SteinbergTwist, ClassDescriptor::NonSemisimple(_)) => zero,
        (RepKind::SteinbergTwist, ClassDescriptor::Split(a, b)) => Complex64::new(f.quad(f.mul(a, b)) as f64, 0.0),
        (RepKind::SteinbergTwist, ClassDescriptor::Elliptic(al)) => Complex64::new(-f.quad(f.norm(al)) as f64, 0.0),

        (RepKind::Cuspidal(j), ClassDescriptor::Central(a)) => nu(f, j, f.embed(a)) * (q - 1.0),
        (RepKind::Cuspidal(j), ClassDescriptor::NonSemisimple(a)) => -nu(f, j, f.embed(a)),
        (RepKind::Cuspidal(_), ClassDescriptor::Split(..)) => zero,
        (RepKind::Cuspidal(j), ClassDescriptor::Elliptic(al)) => -(nu(f, j, al) + nu(f, j, f.conj(al))),
    }
}
