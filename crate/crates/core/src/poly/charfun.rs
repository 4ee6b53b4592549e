use super::rep::rep_matrix;
use super::GroupPoly;
use crate::spin::{BlockDensity, HalfInt, SpinKet};

/// Characteristic function `⟨ψ|U_g|ψ⟩` of a pure state.
pub fn charfun_pure(ket: &SpinKet) -> GroupPoly {
    let mut irreps: Vec<HalfInt> = ket.iter().map(|((j, _), _)| j).collect();
    irreps.dedup();
    let mut chi = GroupPoly::zero();
    for j in irreps {
        let u = rep_matrix(j);
        let psi = ket.component(j);
        for r in 0..j.dim() {
            for c in 0..j.dim() {
                let w = psi[r].conj() * psi[c];
                for (e, x) in u.get(r, c).terms() {
                    chi.add_term(e, x * w);
                }
            }
        }
    }
    chi.prune();
    chi
}

/// Characteristic function `tr(ρ U_g)`; coherences between irreps drop out.
pub fn charfun_mixed(rho: &BlockDensity) -> GroupPoly {
    let mut chi = GroupPoly::zero();
    for (j, block) in rho.blocks() {
        let u = rep_matrix(j);
        for r in 0..j.dim() {
            for c in 0..j.dim() {
                // tr(ρ U) = Σ ρ_{m,m'} U_{m',m}
                let w = block[(c, r)];
                if w.norm() == 0.0 {
                    continue;
                }
                for (e, x) in u.get(r, c).terms() {
                    chi.add_term(e, x * w);
                }
            }
        }
    }
    chi.prune();
    chi
}
