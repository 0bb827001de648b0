//! Design specifications: which variables are grouped into which stratified
//! subspaces, with how many strata per dimension.
//!
//! Subspace layouts are written in a compact notation: `"2^50"` splits 100
//! variables into 50 two-dimensional subspaces, `"4^1 1^2"` splits 6
//! variables into one 4-D subspace plus two 1-D subspaces. A term `d^k`
//! contributes `k` subspaces of dimension `d` over consecutive variables;
//! a bare `d` means `d^1`.

use crate::error::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Srs,
    Ss,
    Lhs,
    Pss,
    Lss,
    Lpss,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Srs => "srs",
            Method::Ss => "ss",
            Method::Lhs => "lhs",
            Method::Pss => "pss",
            Method::Lss => "lss",
            Method::Lpss => "lpss",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "srs" => Ok(Method::Srs),
            "ss" => Ok(Method::Ss),
            "lhs" => Ok(Method::Lhs),
            "pss" => Ok(Method::Pss),
            "lss" => Ok(Method::Lss),
            "lpss" => Ok(Method::Lpss),
            other => Err(Error::InvalidDesign(format!("unknown method \"{other}\""))),
        }
    }
}

/// One stratified subspace: which variables it owns (0-based indices into
/// the full variable list) and how many strata each of those dimensions is
/// split into. An empty `counts_per_dim` means "fill in the default grid
/// during validation".
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubspaceSpec {
    pub variables: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub counts_per_dim: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub latinize: bool,
}

impl SubspaceSpec {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn strata_total(&self) -> usize {
        self.counts_per_dim.iter().product()
    }
}

/// A complete sampling design: method, problem dimension, sample count,
/// subspace layout, and base seed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignSpec {
    pub method: Method,
    pub dim: usize,
    pub n: usize,
    pub subspaces: Vec<SubspaceSpec>,
    pub seed: u64,
}

impl DesignSpec {
    /// Design with no subspaces from a method that derives its own layout
    /// (SRS, SS, LHS, LSS with default counts).
    pub fn simple(method: Method, dim: usize, n: usize, seed: u64) -> Self {
        DesignSpec { method, dim, n, subspaces: Vec::new(), seed }
    }

    /// Build subspaces from notation text; counts are left for validation
    /// to fill with defaults.
    pub fn from_notation(
        method: Method,
        dim: usize,
        n: usize,
        notation: &str,
        seed: u64,
    ) -> Result<Self> {
        let subspaces = parse_pss_notation(notation, dim)?;
        Ok(DesignSpec { method, dim, n, subspaces, seed })
    }

    /// Compact notation for the current subspace layout, e.g. `"2^50"`.
    pub fn notation(&self) -> String {
        render_pss_notation(&self.subspaces)
    }

    /// Short label for reports: method name plus layout.
    pub fn label(&self) -> String {
        match self.method {
            Method::Srs | Method::Lhs => String::from(self.method.as_str()),
            _ => format!("{}-{}", self.method.as_str(), self.notation()),
        }
    }
}

/// Parse subspace notation. The resulting subspaces claim consecutive
/// variables in order and carry empty (default-pending) strata counts.
pub fn parse_pss_notation(text: &str, dim: usize) -> Result<Vec<SubspaceSpec>> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let mut terms: Vec<(usize, usize)> = Vec::new();

    let read_int = |pos: &mut usize| -> Result<usize> {
        let start = *pos;
        let mut value: usize = 0;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((bytes[*pos] - b'0') as usize))
                .ok_or_else(|| Error::Parse {
                    position: start,
                    message: "integer too large".into(),
                })?;
            *pos += 1;
        }
        if *pos == start {
            let found = if *pos < bytes.len() {
                format!("'{}'", bytes[*pos] as char)
            } else {
                "end of input".into()
            };
            return Err(Error::Parse { position: *pos, message: format!("expected integer, found {found}") });
        }
        Ok(value)
    };

    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            break;
        }
        let term_start = pos;
        let d = read_int(&mut pos)?;
        let k = if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            read_int(&mut pos)?
        } else {
            1
        };
        if d == 0 {
            return Err(Error::Parse { position: term_start, message: "subspace dimension is zero".into() });
        }
        if k == 0 {
            return Err(Error::Parse { position: term_start, message: "subspace repeat count is zero".into() });
        }
        terms.push((d, k));
    }
    if terms.is_empty() {
        return Err(Error::Parse { position: 0, message: "empty notation".into() });
    }

    let declared = terms.iter().try_fold(0usize, |acc, &(d, k)| {
        d.checked_mul(k).and_then(|m| acc.checked_add(m))
    });
    let declared = declared.ok_or(Error::Parse { position: 0, message: "dimension total overflows".into() })?;
    if declared != dim {
        return Err(Error::DimensionMismatch { declared, expected: dim });
    }

    let mut subspaces = Vec::new();
    let mut next_var = 0usize;
    for (d, k) in terms {
        for _ in 0..k {
            subspaces.push(SubspaceSpec {
                variables: (next_var..next_var + d).collect(),
                counts_per_dim: Vec::new(),
                latinize: false,
            });
            next_var += d;
        }
    }
    Ok(subspaces)
}

/// Inverse of [`parse_pss_notation`]: consecutive runs of equal-dimension
/// subspaces collapse to `d^k` terms.
pub fn render_pss_notation(subspaces: &[SubspaceSpec]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < subspaces.len() {
        let d = subspaces[i].dim();
        let mut k = 1;
        while i + k < subspaces.len() && subspaces[i + k].dim() == d {
            k += 1;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        if k == 1 {
            out.push_str(&format!("{d}"));
        } else {
            out.push_str(&format!("{d}^{k}"));
        }
        i += k;
    }
    out
}

/// Default strata counts for a `d`-dimensional subspace holding `n` samples:
/// 1-D subspaces get `[n]`, higher dimensions get `[m; d]` when `n = m^d`
/// for an integer `m`.
fn default_counts(d: usize, n: usize) -> Result<Vec<usize>> {
    if d == 1 {
        return Ok(alloc::vec![n]);
    }
    let guess = libm::round(libm::pow(n as f64, 1.0 / d as f64)) as usize;
    for m in guess.saturating_sub(1)..=guess + 1 {
        if m == 0 {
            continue;
        }
        let mut p: usize = 1;
        let mut overflow = false;
        for _ in 0..d {
            match p.checked_mul(m) {
                Some(v) => p = v,
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        if !overflow && p == n {
            return Ok(alloc::vec![m; d]);
        }
    }
    Err(Error::InvalidDesign(format!(
        "no default strata grid: n = {n} is not a perfect {d}-th power; give counts_per_dim explicitly"
    )))
}

/// Check and normalize a design spec.
///
/// Normalization is idempotent: SRS clears subspaces, SS/LSS become a single
/// full-dimensional subspace, LHS becomes one latinized 1-D subspace per
/// variable, PSS/LPSS keep their layout with the latinize flag forced per
/// method. Missing strata counts are filled by the default rule, then the
/// divisibility invariants are checked: the strata product of every subspace
/// must divide `n`, and every per-dimension count of a latinized subspace
/// must divide `n`.
pub fn validate_design(spec: &DesignSpec) -> Result<DesignSpec> {
    let mut out = spec.clone();
    if out.dim == 0 {
        return Err(Error::InvalidDesign("dimension must be at least 1".into()));
    }
    if out.n == 0 {
        return Err(Error::InvalidDesign("sample count must be at least 1".into()));
    }

    match out.method {
        Method::Srs => {
            if !out.subspaces.is_empty() {
                return Err(Error::InvalidDesign("srs takes no subspaces".into()));
            }
        }
        Method::Ss | Method::Lss => {
            let latinize = out.method == Method::Lss;
            if out.subspaces.is_empty() {
                out.subspaces.push(SubspaceSpec {
                    variables: (0..out.dim).collect(),
                    counts_per_dim: Vec::new(),
                    latinize,
                });
            } else if out.subspaces.len() != 1 {
                return Err(Error::InvalidDesign(format!(
                    "{} uses a single subspace covering all variables, got {}",
                    out.method,
                    out.subspaces.len()
                )));
            }
            out.subspaces[0].latinize = latinize;
        }
        Method::Lhs => {
            out.subspaces = (0..out.dim)
                .map(|v| SubspaceSpec {
                    variables: alloc::vec![v],
                    counts_per_dim: alloc::vec![out.n],
                    latinize: true,
                })
                .collect();
        }
        Method::Pss | Method::Lpss => {
            if out.subspaces.is_empty() {
                return Err(Error::InvalidDesign(format!(
                    "{} requires an explicit subspace layout",
                    out.method
                )));
            }
            let latinize = out.method == Method::Lpss;
            for s in &mut out.subspaces {
                s.latinize = latinize;
            }
        }
    }

    // disjoint cover of {0, .., dim-1}
    let mut seen = alloc::vec![false; out.dim];
    for (i, s) in out.subspaces.iter().enumerate() {
        if s.variables.is_empty() {
            return Err(Error::InvalidDesign(format!("subspace {i} owns no variables")));
        }
        for &v in &s.variables {
            if v >= out.dim {
                return Err(Error::InvalidDesign(format!(
                    "subspace {i} references variable {v}, but dimension is {}",
                    out.dim
                )));
            }
            if seen[v] {
                return Err(Error::InvalidDesign(format!(
                    "variable {v} appears in more than one subspace"
                )));
            }
            seen[v] = true;
        }
    }
    if out.method != Method::Srs {
        if let Some(v) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidDesign(format!(
                "variable {v} is not covered by any subspace"
            )));
        }
    }

    // fill defaults, then check divisibility
    for (i, s) in out.subspaces.iter_mut().enumerate() {
        if s.counts_per_dim.is_empty() {
            s.counts_per_dim = default_counts(s.dim(), out.n)?;
        } else if s.counts_per_dim.len() != s.dim() {
            return Err(Error::InvalidDesign(format!(
                "subspace {i} has {} counts for {} dimensions",
                s.counts_per_dim.len(),
                s.dim()
            )));
        }
        if let Some(j) = s.counts_per_dim.iter().position(|&c| c == 0) {
            return Err(Error::InvalidDesign(format!(
                "subspace {i} has zero strata in dimension {j}"
            )));
        }
        let product = s.counts_per_dim.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
        let product = product.ok_or_else(|| {
            Error::InvalidDesign(format!("subspace {i} strata product overflows"))
        })?;
        if out.n % product != 0 {
            return Err(Error::InvalidDesign(format!(
                "subspace {i}: strata product {product} does not divide n = {}",
                out.n
            )));
        }
        if s.latinize {
            for (j, &c) in s.counts_per_dim.iter().enumerate() {
                if out.n % c != 0 {
                    return Err(Error::InvalidDesign(format!(
                        "latinized subspace {i}: count {c} in dimension {j} does not divide n = {}",
                        out.n
                    )));
                }
            }
        }
    }

    Ok(out)
}
