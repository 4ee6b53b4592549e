use std::io::Write;

use super::{StandardForm, SymForm};
use crate::error::Result;

impl StandardForm {
    /// Writes the problem in sparse SDPA format.
    ///
    /// The standard form is the SDPA dual, `max tr(F0 Y)` subject to
    /// `tr(Fk Y) = ck`, so the right-hand sides become the cost vector and
    /// each functional a symmetric matrix with off-diagonal weights halved.
    pub fn write_sdpa(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "\"rotacov standard form")?;
        writeln!(out, "{}", self.constraints.len())?;
        writeln!(out, "{}", self.sizes.len())?;
        let sizes: Vec<String> = self.sizes.iter().map(|n| n.to_string()).collect();
        writeln!(out, "{}", sizes.join(" "))?;
        let c: Vec<String> = self.rhs.iter().map(|x| format!("{x:e}")).collect();
        writeln!(out, "{}", c.join(" "))?;
        let mut entries = |k: usize, form: &SymForm| -> std::io::Result<()> {
            for &(b, i, j, w) in form {
                let f = if i == j { w } else { w / 2.0 };
                writeln!(out, "{k} {} {} {} {f:e}", b + 1, i + 1, j + 1)?;
            }
            Ok(())
        };
        entries(0, &self.objective)?;
        for (k, form) in self.constraints.iter().enumerate() {
            entries(k + 1, form)?;
        }
        Ok(())
    }
}
