use std::collections::{BTreeMap, BTreeSet};

use super::{psd_part, MaxSpin};
use crate::error::{Error, Result};
use crate::poly::{canonical, charfun_pure, rep_matrix, CanonicalCoeffs, Exponents, GroupPoly};
use crate::solver::{BlockId, BlockKind, LinearForm, SdpProblem, SolveReport, SolveStatus};
use crate::spin::{BlockDensity, HalfInt, SpinKet};
use crate::{CMatrix, C64};

/// Outcome of the deterministic feasibility test.
#[derive(Clone, Debug)]
pub struct Feasibility {
    pub feasible: bool,
    /// A state `ξ` with `χ_ψ = χ_ξ χ_φ` when feasible.
    pub xi: Option<BlockDensity>,
    pub report: Option<SolveReport>,
}

/// Optimum of the probabilistic conversion program.
#[derive(Clone, Debug)]
pub struct MaxProb {
    pub p: f64,
    /// Unnormalized ancilla state of the successful branch, `tr ρ = p`.
    pub rho: BlockDensity,
    /// Unnormalized state of the failure branch.
    pub sigma: BlockDensity,
    pub report: Option<SolveReport>,
}

/// Per-irrep PSD variables for a block-diagonal state.
struct StateVar {
    blocks: Vec<(HalfInt, BlockId)>,
}

impl StateVar {
    fn new(sdp: &mut SdpProblem, name: &str, jmax: HalfInt) -> Self {
        let blocks = jmax
            .spins_up_to()
            .map(|j| (j, sdp.add_block(format!("{name}[{j}]"), j.dim(), BlockKind::Hermitian)))
            .collect();
        StateVar { blocks }
    }

    /// Adds `tr(ρ_j U^j) · factor` to `acc`, one canonical polynomial per
    /// matrix entry of each block.
    fn add_charfun(&self, factor: &GroupPoly, acc: &mut BTreeMap<Exponents, LinearForm>) {
        for &(j, id) in &self.blocks {
            let u = rep_matrix(j);
            for r in 0..j.dim() {
                for c in 0..j.dim() {
                    // tr(ρ U) = Σ ρ[c][r] U[r][c]
                    for (e, x) in canonical(&(u.get(r, c) * factor)).terms() {
                        acc.entry(e).or_default().add(id, c, r, x);
                    }
                }
            }
        }
    }

    fn add_trace(&self, form: &mut LinearForm) {
        for &(j, id) in &self.blocks {
            form.add_trace(id, j.dim(), 1.0);
        }
    }

    fn value(&self, report: &SolveReport) -> BlockDensity {
        let blocks = self.blocks.iter().map(|&(j, id)| (j, psd_part(report.value(id))));
        BlockDensity::from_blocks(blocks).expect("PSD blocks")
    }
}

/// `canonical(χ_ψ) = Σ forms` coefficient by coefficient.
fn match_coefficients(sdp: &mut SdpProblem, target: &CanonicalCoeffs, forms: BTreeMap<Exponents, LinearForm>) {
    let keys: BTreeSet<Exponents> = target.terms().map(|(e, _)| e).chain(forms.keys().copied()).collect();
    let mut forms = forms;
    for e in keys {
        let form = forms.remove(&e).unwrap_or_default();
        sdp.add_complex_constraint(form, target.coeff(e));
    }
}

fn check_inputs(psi: &SpinKet, phi: &SpinKet) -> Result<(HalfInt, HalfInt)> {
    psi.require_normalized()?;
    phi.require_normalized()?;
    Ok((psi.jmax()?, phi.jmax()?))
}

/// Whether `ψ → φ` is possible with certainty: a state `ξ` with
/// `j_max(ξ) ≤ j_max(ψ) - j_max(φ)` and `χ_ψ = χ_ξ χ_φ`.
pub fn deterministic_feasible(psi: &SpinKet, phi: &SpinKet) -> Result<Feasibility> {
    let (jpsi, jphi) = check_inputs(psi, phi)?;
    if jphi > jpsi {
        return Ok(Feasibility { feasible: false, xi: None, report: None });
    }
    let mut sdp = SdpProblem::new();
    let xi = StateVar::new(&mut sdp, "xi", jpsi - jphi);
    let mut forms = BTreeMap::new();
    xi.add_charfun(&charfun_pure(phi), &mut forms);
    match_coefficients(&mut sdp, &canonical(&charfun_pure(psi)), forms);
    let mut tr = LinearForm::new();
    xi.add_trace(&mut tr);
    sdp.add_constraint(tr.clone(), 1.0);
    // a bounded objective keeps the program well posed
    sdp.set_objective(LinearForm::new());

    let report = sdp.solve()?;
    match report.status {
        SolveStatus::Optimal => Ok(Feasibility { feasible: true, xi: Some(xi.value(&report)), report: Some(report) }),
        SolveStatus::Infeasible => Ok(Feasibility { feasible: false, xi: None, report: Some(report) }),
        _ => {
            // fall back on the probability program, which is always feasible
            let best = max_prob(psi, phi)?;
            let feasible = best.p > 1.0 - 1e-6;
            let xi = feasible.then(|| best.rho.scaled(1.0 / best.p));
            Ok(Feasibility { feasible, xi, report: best.report })
        }
    }
}

/// Largest success probability of a covariant `ψ → φ`:
/// maximize `tr ρ` subject to `χ_ψ = χ_ρ χ_φ + χ_σ`, `ρ, σ ⪰ 0`,
/// `j_max(ρ) ≤ j_max(ψ) - j_max(φ)` and `j_max(σ) ≤ j_max(ψ)`.
pub fn max_prob(psi: &SpinKet, phi: &SpinKet) -> Result<MaxProb> {
    let (jpsi, jphi) = check_inputs(psi, phi)?;
    if jphi > jpsi {
        // spin cannot increase
        let sigma = BlockDensity::from_ket(psi).block_diagonal();
        let rho = BlockDensity::from_blocks([(HalfInt::ZERO, CMatrix::zeros(1, 1))])?;
        return Ok(MaxProb { p: 0.0, rho, sigma, report: None });
    }
    let mut sdp = SdpProblem::new();
    let rho = StateVar::new(&mut sdp, "rho", jpsi - jphi);
    let sigma = StateVar::new(&mut sdp, "sigma", jpsi);
    let mut forms = BTreeMap::new();
    rho.add_charfun(&charfun_pure(phi), &mut forms);
    sigma.add_charfun(&GroupPoly::constant(C64::new(1.0, 0.0)), &mut forms);
    match_coefficients(&mut sdp, &canonical(&charfun_pure(psi)), forms);
    let mut obj = LinearForm::new();
    rho.add_trace(&mut obj);
    sdp.set_objective(obj);

    let report = sdp.solve()?.require_optimal()?;
    let rho_v = rho.value(&report);
    let sigma_v = sigma.value(&report);
    let p = report.objective.clamp(0.0, 1.0);
    if !p.is_finite() {
        return Err(Error::Solver("non-finite objective".into()));
    }
    Ok(MaxProb { p, rho: rho_v, sigma: sigma_v, report: Some(report) })
}
