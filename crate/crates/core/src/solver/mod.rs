//! Semidefinite programs over named PSD blocks and their real standard form.
//!
//! Problems are stated as: maximize a real linear functional of block
//! matrices `Z_b ⪰ 0` subject to real affine equalities. Hermitian blocks are
//! carried by real symmetric blocks of twice the size,
//! `Y = [[Re Z, -Im Z], [Im Z, Re Z]]`. Every complex entry is read back as
//! the average of its two copies in `Y`, so a functional evaluated on an exact
//! embedding gives the same number as on `Z` and no factor 2 appears in the
//! objective.

mod clarabel_backend;
mod sdpa;

pub use clarabel_backend::ClarabelBackend;

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Default solver feasibility and gap tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Environment variable overriding [`DEFAULT_TOL`].
pub const TOL_ENV: &str = "ROTACOV_SOLVER_TOL";

/// Tolerance from the environment, falling back to [`DEFAULT_TOL`].
pub fn solver_tolerance() -> f64 {
    std::env::var(TOL_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Real symmetric.
    Real,
    /// Complex Hermitian.
    Hermitian,
}

/// Handle of a block inside one [`SdpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(usize);

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    pub name: String,
    pub dim: usize,
    pub kind: BlockKind,
}

/// `Σ coef · Z_b[r, c]`; used through its real part unless stated otherwise.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearForm {
    terms: Vec<(BlockId, usize, usize, C64)>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, block: BlockId, r: usize, c: usize, coef: C64) {
        if coef != C64::new(0.0, 0.0) {
            self.terms.push((block, r, c, coef));
        }
    }

    /// Adds `coef · tr Z_b`.
    pub fn add_trace(&mut self, block: BlockId, dim: usize, coef: f64) {
        for k in 0..dim {
            self.add(block, k, k, C64::new(coef, 0.0));
        }
    }

    pub fn terms(&self) -> &[(BlockId, usize, usize, C64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn times(&self, f: C64) -> Self {
        LinearForm { terms: self.terms.iter().map(|&(b, r, c, x)| (b, r, c, x * f)).collect() }
    }

    /// Complex value on given block matrices.
    pub fn evaluate(&self, values: &[CMatrix]) -> C64 {
        self.terms.iter().map(|&(b, r, c, x)| x * values[b.0][(r, c)]).sum()
    }
}

/// Maximization SDP over named PSD blocks.
#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    blocks: Vec<BlockSpec>,
    constraints: Vec<(LinearForm, f64)>,
    objective: LinearForm,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, name: impl Into<String>, dim: usize, kind: BlockKind) -> BlockId {
        self.blocks.push(BlockSpec { name: name.into(), dim, kind });
        BlockId(self.blocks.len() - 1)
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn block(&self, id: BlockId) -> &BlockSpec {
        &self.blocks[id.0]
    }

    /// `Re form = rhs`.
    pub fn add_constraint(&mut self, form: LinearForm, rhs: f64) {
        self.constraints.push((form, rhs));
    }

    /// `form = rhs` as two real equalities.
    pub fn add_complex_constraint(&mut self, form: LinearForm, rhs: C64) {
        // Im w = Re(-i w)
        let imag = form.times(C64::new(0.0, -1.0));
        self.constraints.push((form, rhs.re));
        self.constraints.push((imag, rhs.im));
    }

    pub fn constraints(&self) -> &[(LinearForm, f64)] {
        &self.constraints
    }

    /// Maximize `Re form`.
    pub fn set_objective(&mut self, form: LinearForm) {
        self.objective = form;
    }

    pub fn objective(&self) -> &LinearForm {
        &self.objective
    }

    /// Real symmetric standard form.
    pub fn to_standard(&self) -> Result<StandardForm> {
        let sizes: Vec<usize> = self
            .blocks
            .iter()
            .map(|b| match b.kind {
                BlockKind::Real => b.dim,
                BlockKind::Hermitian => 2 * b.dim,
            })
            .collect();
        if self.blocks.iter().any(|b| b.dim == 0) {
            return Err(Error::Dimension("empty PSD block".into()));
        }
        let convert = |form: &LinearForm| -> Result<SymForm> {
            let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
            let mut put = |b: usize, i: usize, j: usize, w: f64| {
                if w != 0.0 {
                    *acc.entry((b, i.min(j), i.max(j))).or_insert(0.0) += w;
                }
            };
            for &(BlockId(b), r, c, x) in &form.terms {
                let spec = self
                    .blocks
                    .get(b)
                    .ok_or_else(|| Error::Dimension(format!("unknown block {b}")))?;
                if r >= spec.dim || c >= spec.dim {
                    return Err(Error::Dimension(format!(
                        "entry ({r}, {c}) outside block `{}` of size {}",
                        spec.name, spec.dim
                    )));
                }
                if !(x.re.is_finite() && x.im.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite coefficient".into()));
                }
                match spec.kind {
                    BlockKind::Real => put(b, r, c, x.re),
                    BlockKind::Hermitian => {
                        let n = spec.dim;
                        // Re(x Z) = Re x · Re Z - Im x · Im Z
                        put(b, r, c, x.re / 2.0);
                        put(b, n + r, n + c, x.re / 2.0);
                        put(b, n + r, c, -x.im / 2.0);
                        put(b, r, n + c, x.im / 2.0);
                    }
                }
            }
            Ok(acc.into_iter().filter(|(_, w)| *w != 0.0).map(|((b, i, j), w)| (b, i, j, w)).collect())
        };
        let mut constraints = Vec::with_capacity(self.constraints.len());
        let mut rhs = Vec::with_capacity(self.constraints.len());
        for (form, b) in &self.constraints {
            if !b.is_finite() {
                return Err(Error::InvalidParameter("non-finite right-hand side".into()));
            }
            constraints.push(convert(form)?);
            rhs.push(*b);
        }
        Ok(StandardForm { sizes, constraints, rhs, objective: convert(&self.objective)?, layout: self.blocks.clone() })
    }

    /// Converts, solves with the default backend and reads the blocks back.
    pub fn solve(&self) -> Result<SolveReport> {
        ClarabelBackend::default().solve(&self.to_standard()?)
    }
}

/// Sparse symmetric functional `Σ w · Y_b[i, j]` over upper-triangle entries
/// `i ≤ j`, each entry listed once.
pub type SymForm = Vec<(usize, usize, usize, f64)>;

/// `maximize Σ w·Y` subject to `Σ w_k·Y = rhs_k` and `Y_b ⪰ 0`, all real.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardForm {
    /// Real block sizes.
    pub sizes: Vec<usize>,
    pub constraints: Vec<SymForm>,
    pub rhs: Vec<f64>,
    pub objective: SymForm,
    layout: Vec<BlockSpec>,
}

impl StandardForm {
    pub fn layout(&self) -> &[BlockSpec] {
        &self.layout
    }

    /// Number of scalar unknowns (upper triangles of all blocks).
    pub fn n_vars(&self) -> usize {
        self.sizes.iter().map(|n| n * (n + 1) / 2).sum()
    }

    /// Objective as a dense vector over upper-triangle entries, blocks in
    /// order, each block column by column.
    pub fn objective_vector(&self) -> Vec<f64> {
        let offsets = self.offsets();
        let mut out = vec![0.0; self.n_vars()];
        for &(b, i, j, w) in &self.objective {
            out[offsets[b] + tri_index(i, j)] += w;
        }
        out
    }

    pub(crate) fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.sizes
            .iter()
            .map(|n| {
                let o = acc;
                acc += n * (n + 1) / 2;
                o
            })
            .collect()
    }

    /// Original blocks recovered from real symmetric values.
    pub fn recover(&self, real: &[DMatrix<f64>]) -> Vec<CMatrix> {
        self.layout
            .iter()
            .zip(real)
            .map(|(spec, y)| match spec.kind {
                BlockKind::Real => y.map(|x| C64::new(x, 0.0)),
                BlockKind::Hermitian => {
                    let n = spec.dim;
                    CMatrix::from_fn(n, n, |r, c| {
                        C64::new((y[(r, c)] + y[(n + r, n + c)]) / 2.0, (y[(n + r, c)] - y[(r, n + c)]) / 2.0)
                    })
                }
            })
            .collect()
    }

    /// Real symmetric embedding of original block values.
    pub fn embed(&self, values: &[CMatrix]) -> Vec<DMatrix<f64>> {
        self.layout
            .iter()
            .zip(values)
            .map(|(spec, z)| match spec.kind {
                BlockKind::Real => z.map(|x| x.re),
                BlockKind::Hermitian => {
                    let n = spec.dim;
                    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
                        let x = z[(i % n, j % n)];
                        match (i < n, j < n) {
                            (true, true) | (false, false) => x.re,
                            (false, true) => x.im,
                            (true, false) => -x.im,
                        }
                    })
                }
            })
            .collect()
    }

    /// `Σ w·Y` on real block values.
    pub fn evaluate(form: &SymForm, real: &[DMatrix<f64>]) -> f64 {
        form.iter().map(|&(b, i, j, w)| w * real[b][(i, j)]).sum()
    }
}

/// Position of `(i, j)`, `i ≤ j`, in a column-major upper triangle.
pub(crate) fn tri_index(i: usize, j: usize) -> usize {
    j * (j + 1) / 2 + i
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalTrouble,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Primal objective of the maximization.
    pub objective: f64,
    /// Block values in declaration order.
    pub values: Vec<CMatrix>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Smaller of the absolute and relative duality gaps.
    pub gap: f64,
    pub iterations: u32,
    pub tolerance: f64,
}

impl SolveReport {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, id: BlockId) -> &CMatrix {
        &self.values[id.0]
    }

    /// Errors unless the status is optimal.
    pub fn require_optimal(self) -> Result<Self> {
        match self.status {
            SolveStatus::Optimal => Ok(self),
            s => Err(Error::Solver(format!("solver returned {s:?}"))),
        }
    }
}

/// A conic backend able to solve real standard forms.
pub trait Backend {
    fn solve(&self, sf: &StandardForm) -> Result<SolveReport>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_equality() {
        let mut p = SdpProblem::new();
        let x = p.add_block("x", 1, BlockKind::Real);
        let mut f = LinearForm::new();
        f.add(x, 0, 0, C64::new(1.0, 0.0));
        p.add_constraint(f.clone(), 3.0);
        p.set_objective(f);
        let r = p.solve().unwrap();
        assert!(r.is_optimal());
        assert!((r.objective - 3.0).abs() < 1e-7);
        assert!((r.value(x)[(0, 0)].re - 3.0).abs() < 1e-7);
    }

    #[test]
    fn negative_scalar_is_infeasible() {
        let mut p = SdpProblem::new();
        let x = p.add_block("x", 1, BlockKind::Real);
        let mut f = LinearForm::new();
        f.add(x, 0, 0, C64::new(1.0, 0.0));
        p.add_constraint(f.clone(), -1.0);
        p.set_objective(f);
        assert_eq!(p.solve().unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn embedding_round_trip_preserves_functionals() {
        let mut p = SdpProblem::new();
        let z = p.add_block("z", 2, BlockKind::Hermitian);
        let mut f = LinearForm::new();
        f.add(z, 0, 1, C64::new(0.3, -1.2));
        f.add(z, 1, 1, C64::new(2.0, 0.5));
        p.set_objective(f.clone());
        let sf = p.to_standard().unwrap();
        assert_eq!(sf.sizes, vec![4]);
        let zv = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.2, 0.7), C64::new(0.2, -0.7), C64::new(3.0, 0.0)]);
        let y = sf.embed(std::slice::from_ref(&zv));
        assert!((StandardForm::evaluate(&sf.objective, &y) - f.evaluate(&[zv.clone()]).re).abs() < 1e-14);
        // the embedded trace counts every diagonal entry twice
        assert!((y[0].trace() - 2.0 * zv.trace().re).abs() < 1e-14);
        assert!((sf.recover(&y)[0].clone() - zv).norm() < 1e-14);
    }

    #[test]
    fn bad_indices_are_rejected() {
        let mut p = SdpProblem::new();
        let x = p.add_block("x", 2, BlockKind::Real);
        let mut f = LinearForm::new();
        f.add(x, 2, 0, C64::new(1.0, 0.0));
        p.add_constraint(f, 0.0);
        assert!(matches!(p.to_standard(), Err(Error::Dimension(_))));
    }

    #[test]
    fn hermitian_off_diagonal_bound() {
        // max Re z01 over 2x2 density matrices is 1/2
        let mut p = SdpProblem::new();
        let z = p.add_block("z", 2, BlockKind::Hermitian);
        let mut tr = LinearForm::new();
        tr.add_trace(z, 2, 1.0);
        p.add_constraint(tr, 1.0);
        let mut f = LinearForm::new();
        f.add(z, 0, 1, C64::new(0.0, 1.0));
        p.set_objective(f);
        let r = p.solve().unwrap();
        assert!((r.objective - 0.5).abs() < 1e-7);
        // maximizer of Re(i z01) = -Im z01
        assert!((r.value(z)[(0, 1)].im + 0.5).abs() < 1e-6);
    }
}
