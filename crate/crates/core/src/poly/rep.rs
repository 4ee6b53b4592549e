use super::{GroupElement, GroupPoly};
use crate::error::{Error, Result};
use crate::spin::{binomial, HalfInt, SpinKet};
use crate::{CMatrix, C64};

/// `(2j+1)×(2j+1)` matrix of polynomials, rows `m'` and columns `m` in the
/// order `j, ..., -j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    j: HalfInt,
    entries: Vec<GroupPoly>,
}

impl PolyMatrix {
    pub fn spin(&self) -> HalfInt {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> &GroupPoly {
        &self.entries[row * self.dim() + col]
    }

    /// Entry `⟨j, m'|U|j, m⟩`.
    pub fn entry(&self, m_row: HalfInt, m_col: HalfInt) -> &GroupPoly {
        self.get(self.j.offset_of(m_row), self.j.offset_of(m_col))
    }

    pub fn evaluate(&self, g: &GroupElement) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |r, c| self.get(r, c).evaluate(g.u, g.v))
    }
}

fn int(h: HalfInt) -> i64 {
    h.to_int().expect("integer spin combination") as i64
}

/// Matrix element `U^{(j)}_{m',m}` as the double-binomial alternating sum
///
/// `sqrt(C(2j,j-m)/C(2j,j-m')) Σ_a C(j-m,a) C(j+m,m-m'+a) (-1)^a
///  u^{j+m'-a} (u*)^{j-m-a} v^{m-m'+a} (v*)^a`.
pub fn rep_entry(j: HalfInt, m_row: HalfInt, m_col: HalfInt) -> GroupPoly {
    assert!(j.admits(m_row) && j.admits(m_col), "labels outside irrep {j}");
    let two_j = j.twice() as u32;
    let (jpr, jmc, jpc) = (int(j + m_row), int(j - m_col), int(j + m_col));
    let shift = int(m_col - m_row);
    let norm = (binomial(two_j, jmc as u32) / binomial(two_j, int(j - m_row) as u32)).sqrt();
    let lo = 0.max(-shift);
    let hi = jmc.min(jpr);
    let mut p = GroupPoly::zero();
    for a in lo..=hi {
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        let c = norm * sign * binomial(jmc as u32, a as u32) * binomial(jpc as u32, (shift + a) as u32);
        let exps = [(jpr - a) as u32, (jmc - a) as u32, (shift + a) as u32, a as u32];
        p.add_term(exps, C64::new(c, 0.0));
    }
    p.prune();
    p
}

/// Polynomial representation matrix of irrep `j`.
pub fn rep_matrix(j: HalfInt) -> PolyMatrix {
    assert!(!j.is_negative(), "negative spin {j}");
    let entries = j
        .projections()
        .flat_map(|mr| j.projections().map(move |mc| rep_entry(j, mr, mc)))
        .collect();
    PolyMatrix { j, entries }
}

/// Numeric representation matrix at `g`.
pub fn rep_matrix_eval(j: HalfInt, g: &GroupElement) -> CMatrix {
    rep_matrix(j).evaluate(g)
}

/// Terminating Gauss series `₂F₁(a, b; c; x)` with `a` a non-positive integer.
fn hyp2f1_terminating(a: i64, b: i64, c: i64, x: C64) -> C64 {
    debug_assert!(a <= 0 && c > 0);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..(-a) {
        let n = n as f64;
        term *= (a as f64 + n) * (b as f64 + n) / ((c as f64 + n) * (n + 1.0));
        term *= x;
        sum += term;
    }
    sum
}

/// Closed hypergeometric form of `U^{(j)}_{m',m}` at `(u, v)`.
///
/// Independent of [`rep_entry`]; used as a cross-check. Fails at `u = 0`,
/// where the argument `-vv*/(uu*)` is singular.
pub fn rep_matrix_hypergeom(j: HalfInt, m_row: HalfInt, m_col: HalfInt, u: C64, v: C64) -> Result<C64> {
    GroupElement::new(u, v)?;
    if !(j.admits(m_row) && j.admits(m_col)) {
        return Err(Error::InvalidLabel { j, m: if j.admits(m_row) { m_col } else { m_row } });
    }
    if u.norm() == 0.0 {
        return Err(Error::SingularClosedForm);
    }
    let two_j = j.twice() as u32;
    let norm = (binomial(two_j, int(j - m_col) as u32) / binomial(two_j, int(j - m_row) as u32)).sqrt();
    let x = -(v * v.conj()) / (u * u.conj());
    let d = int(m_col - m_row);
    let (uc, vc) = (u.conj(), v.conj());
    if d >= 0 {
        let pre = binomial(int(j + m_col) as u32, d as u32) * norm;
        let mono = v.powu(d as u32) * uc.powu(int(j - m_col) as u32) * u.powu(int(j + m_row) as u32);
        let f = hyp2f1_terminating(int(m_col - j), int(-j - m_row), d + 1, x);
        Ok(mono * f * pre)
    } else {
        let e = -d;
        let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
        let pre = binomial(int(j - m_col) as u32, e as u32) * norm * sign;
        let mono = u.powu(int(j + m_col) as u32) * vc.powu(e as u32) * uc.powu(int(j - m_row) as u32);
        let f = hyp2f1_terminating(int(-j - m_col), int(m_row - j), e + 1, x);
        Ok(mono * f * pre)
    }
}

/// Applies the representation of `(u, v)` irrep by irrep.
pub fn rotate_state(ket: &SpinKet, u: C64, v: C64) -> Result<SpinKet> {
    let g = GroupElement::new(u, v)?;
    let mut out = SpinKet::new();
    let mut irreps: Vec<HalfInt> = ket.iter().map(|((j, _), _)| j).collect();
    irreps.dedup();
    for j in irreps {
        let rotated = rep_matrix_eval(j, &g) * ket.component(j);
        out.set_component(j, &rotated);
    }
    Ok(out)
}
