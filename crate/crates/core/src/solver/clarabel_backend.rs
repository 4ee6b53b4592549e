use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::DMatrix;

use super::{solver_tolerance, tri_index, Backend, SolveReport, SolveStatus, StandardForm};
use crate::error::{Error, Result};

/// Interior-point backend.
///
/// Unknowns are the scaled upper triangles of the real blocks in the
/// solver's convention (off-diagonal entries times √2); equalities go into a
/// zero cone and each block into a PSD triangle cone.
#[derive(Clone, Copy, Debug)]
pub struct ClarabelBackend {
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for ClarabelBackend {
    fn default() -> Self {
        ClarabelBackend { tol: solver_tolerance(), max_iter: 500 }
    }
}

impl Backend for ClarabelBackend {
    fn solve(&self, sf: &StandardForm) -> Result<SolveReport> {
        let offsets = sf.offsets();
        let n = sf.n_vars();
        let m = sf.constraints.len();
        let scale = |i: usize, j: usize| if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };

        let (mut rows, mut cols, mut vals) = (Vec::new(), Vec::new(), Vec::new());
        for (k, form) in sf.constraints.iter().enumerate() {
            for &(b, i, j, w) in form {
                rows.push(k);
                cols.push(offsets[b] + tri_index(i, j));
                vals.push(w * scale(i, j));
            }
        }
        // -x + s = 0 with s in the PSD cones
        for v in 0..n {
            rows.push(m + v);
            cols.push(v);
            vals.push(-1.0);
        }
        let a = CscMatrix::new_from_triplets(m + n, n, rows, cols, vals);
        let mut b = sf.rhs.clone();
        b.resize(m + n, 0.0);

        let mut q = vec![0.0; n];
        for &(blk, i, j, w) in &sf.objective {
            q[offsets[blk] + tri_index(i, j)] -= w * scale(i, j);
        }
        let p = CscMatrix::zeros((n, n));

        let mut cones = Vec::with_capacity(sf.sizes.len() + 1);
        if m > 0 {
            cones.push(SupportedConeT::ZeroConeT(m));
        }
        cones.extend(sf.sizes.iter().map(|&d| SupportedConeT::PSDTriangleConeT(d)));

        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_feas(self.tol)
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .build()
            .map_err(|e| Error::Solver(e.to_string()))?;
        let mut solver =
            DefaultSolver::new(&p, &q, &a, &b, &cones, settings).map_err(|e| Error::Solver(format!("{e:?}")))?;
        solver.solve();

        let sol = &solver.solution;
        let status = match sol.status {
            SolverStatus::Solved => SolveStatus::Optimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
            _ => SolveStatus::NumericalTrouble,
        };
        let real: Vec<DMatrix<f64>> = sf
            .sizes
            .iter()
            .zip(&offsets)
            .map(|(&d, &o)| {
                DMatrix::from_fn(d, d, |i, j| {
                    let (i, j) = (i.min(j), i.max(j));
                    sol.x[o + tri_index(i, j)] * scale(i, j)
                })
            })
            .collect();
        let info = &solver.info;
        Ok(SolveReport {
            status,
            objective: StandardForm::evaluate(&sf.objective, &real),
            values: sf.recover(&real),
            primal_residual: info.res_primal,
            dual_residual: info.res_dual,
            gap: info.gap_abs.min(info.gap_rel),
            iterations: info.iterations,
            tolerance: self.tol,
        })
    }
}
