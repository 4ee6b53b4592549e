//! JSON state files.
//!
//! Kets: `{"terms": [{"j": "3/2", "m": "1/2", "re": 0.5, "im": 0.0}, ...]}`.
//! Densities: `{"blocks": {"1": [[...]]}, "coherences": {"0,1": [[...]]}}`,
//! where a matrix entry is a number or a `[re, im]` pair and the coherence
//! block `"j1,j2"` holds `⟨j1,·|ρ|j2,·⟩` for `j1 < j2`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rotacov::{BlockDensity, CMatrix, HalfInt, SpinKet, C64};
use serde_json::{json, Map, Value};

/// A parsed state file.
#[derive(Clone, Debug)]
pub enum State {
    Ket(SpinKet),
    Density(BlockDensity),
}

impl State {
    pub fn density(&self) -> BlockDensity {
        match self {
            State::Ket(k) => BlockDensity::from_ket(k),
            State::Density(d) => d.clone(),
        }
    }

    pub fn ket(&self, what: &str) -> Result<&SpinKet> {
        match self {
            State::Ket(k) => Ok(k),
            State::Density(_) => bail!("{what}: a pure state (\"terms\") is required"),
        }
    }
}

pub fn load(path: &Path, normalize: bool) -> Result<State> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("{}: invalid JSON", path.display()))?;
    parse(&value, normalize).with_context(|| format!("{}", path.display()))
}

pub fn parse(value: &Value, normalize: bool) -> Result<State> {
    let obj = value.as_object().ok_or_else(|| anyhow!("top level: expected an object"))?;
    if let Some(terms) = obj.get("terms") {
        let ket = parse_terms(terms)?;
        if ket.is_empty() {
            bail!("terms: state is empty");
        }
        let ket = if normalize { ket.normalized()? } else { ket };
        ket.require_normalized().context("terms: use --normalize to rescale")?;
        return Ok(State::Ket(ket));
    }
    if let Some(blocks) = obj.get("blocks") {
        let rho = parse_density(blocks, obj.get("coherences"))?;
        let t = rho.trace();
        let rho = if normalize && t > 0.0 { rho.scaled(1.0 / t) } else { rho };
        rho.require_normalized().context("blocks: use --normalize to rescale")?;
        return Ok(State::Density(rho));
    }
    bail!("top level: expected a \"terms\" or \"blocks\" field")
}

fn half_int(v: &Value, field: &str) -> Result<HalfInt> {
    match v {
        Value::String(s) => s.parse().map_err(|e| anyhow!("{field}: {e}")),
        Value::Number(n) => match n.as_i64() {
            Some(k) => Ok(HalfInt::from_int(k as i32)),
            None => bail!("{field}: write half-integers as strings such as \"3/2\""),
        },
        _ => bail!("{field}: expected a half-integer"),
    }
}

fn number(v: Option<&Value>, field: &str) -> Result<f64> {
    match v {
        None => Ok(0.0),
        Some(x) => x.as_f64().ok_or_else(|| anyhow!("{field}: expected a number")),
    }
}

fn parse_terms(terms: &Value) -> Result<SpinKet> {
    let list = terms.as_array().ok_or_else(|| anyhow!("terms: expected an array"))?;
    let mut ket = SpinKet::new();
    for (i, t) in list.iter().enumerate() {
        let at = |f: &str| format!("terms[{i}].{f}");
        let o = t.as_object().ok_or_else(|| anyhow!("terms[{i}]: expected an object"))?;
        let j = half_int(o.get("j").ok_or_else(|| anyhow!("{}: missing", at("j")))?, &at("j"))?;
        let m = half_int(o.get("m").ok_or_else(|| anyhow!("{}: missing", at("m")))?, &at("m"))?;
        let re = number(o.get("re"), &at("re"))?;
        let im = number(o.get("im"), &at("im"))?;
        ket.add(j, m, C64::new(re, im)).with_context(|| format!("terms[{i}]"))?;
    }
    Ok(ket)
}

fn entry(v: &Value, field: &str) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap(), 0.0)),
        Value::Array(p) if p.len() == 2 => {
            let re = p[0].as_f64().ok_or_else(|| anyhow!("{field}[0]: expected a number"))?;
            let im = p[1].as_f64().ok_or_else(|| anyhow!("{field}[1]: expected a number"))?;
            Ok(C64::new(re, im))
        }
        _ => bail!("{field}: expected a number or [re, im]"),
    }
}

fn matrix(v: &Value, rows: usize, cols: usize, field: &str) -> Result<CMatrix> {
    let r = v.as_array().ok_or_else(|| anyhow!("{field}: expected an array of rows"))?;
    if r.len() != rows {
        bail!("{field}: expected {rows} rows, found {}", r.len());
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (a, row) in r.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| anyhow!("{field}[{a}]: expected an array"))?;
        if row.len() != cols {
            bail!("{field}[{a}]: expected {cols} entries, found {}", row.len());
        }
        for (b, x) in row.iter().enumerate() {
            m[(a, b)] = entry(x, &format!("{field}[{a}][{b}]"))?;
        }
    }
    Ok(m)
}

fn parse_density(blocks: &Value, coherences: Option<&Value>) -> Result<BlockDensity> {
    let obj = blocks.as_object().ok_or_else(|| anyhow!("blocks: expected an object"))?;
    let mut diag = BTreeMap::new();
    for (key, v) in obj {
        let field = format!("blocks.{key}");
        let j = half_int(&Value::String(key.clone()), &field)?;
        if j.is_negative() {
            bail!("{field}: negative spin");
        }
        diag.insert(j, matrix(v, j.dim(), j.dim(), &field)?);
    }
    let mut coh = BTreeMap::new();
    if let Some(c) = coherences {
        let obj = c.as_object().ok_or_else(|| anyhow!("coherences: expected an object"))?;
        for (key, v) in obj {
            let field = format!("coherences.{key}");
            let (a, b) = key.split_once(',').ok_or_else(|| anyhow!("{field}: key must read \"j1,j2\""))?;
            let (j1, j2) = (half_int(&Value::String(a.into()), &field)?, half_int(&Value::String(b.into()), &field)?);
            if j1 >= j2 {
                bail!("{field}: key must have j1 < j2");
            }
            coh.insert((j1, j2), matrix(v, j1.dim(), j2.dim(), &field)?);
        }
    }
    BlockDensity::from_parts(&diag, &coh).context("blocks")
}

pub fn complex(z: C64) -> Value {
    json!([z.re, z.im])
}

fn matrix_json(m: &CMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|r| Value::Array((0..m.ncols()).map(|c| complex(m[(r, c)])).collect())).collect())
}

/// Density in state-file form; all-zero coherence blocks are left out.
pub fn density_json(rho: &BlockDensity) -> Value {
    let mut blocks = Map::new();
    for (j, b) in rho.blocks() {
        blocks.insert(j.to_string(), matrix_json(&b));
    }
    let mut coh = Map::new();
    let irreps = rho.space().irreps();
    for (k, &a) in irreps.iter().enumerate() {
        for &b in &irreps[k + 1..] {
            let m = rho.coherence(a, b).unwrap();
            if m.iter().any(|z| z.norm() > 0.0) {
                coh.insert(format!("{a},{b}"), matrix_json(&m));
            }
        }
    }
    let mut out = Map::new();
    out.insert("blocks".into(), Value::Object(blocks));
    if !coh.is_empty() {
        out.insert("coherences".into(), Value::Object(coh));
    }
    Value::Object(out)
}
