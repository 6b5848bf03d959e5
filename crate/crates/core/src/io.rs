//! Text and JSON input formats.
//!
//! `.ms`: point count on the first line, then one row of the distance matrix
//! per line. `.cx`: either `simplex` lines or `cell`/`inc` lines, plus
//! optional `vertex` coordinates for simplicial files. `#` starts a comment.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Deserialize;

use crate::complex::{build_simplicial, validate_incidence, AbsoluteComplex, GeometricComplex};
use crate::duality::{CocycleClass, InvariantRequest, Ring};
use crate::error::{Error, Result};
use crate::exact::Q;
use crate::metric::FiniteMetricSpace;
use crate::operator::{CellOperator, SparseChain};

/// Parses an exact decimal (`-1.25`, `3e-2`) or a fraction (`2/3`).
pub fn parse_exact(s: &str) -> Option<Q> {
    if s.contains('/') {
        return Q::from_str(s).ok();
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Q::from_integer(num);
    if scale >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

pub fn parse_metric(text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = content_lines(text);
    let (first, header) = lines.next().ok_or_else(|| Error::parse(1, "empty metric file"))?;
    let n: usize = header.parse().map_err(|_| Error::parse(first, format!("expected point count, got {header:?}")))?;
    if n == 0 {
        return Err(Error::parse(first, "point count must be positive"));
    }
    let mut rows = Vec::with_capacity(n);
    let mut row_lines = Vec::with_capacity(n);
    for (line, l) in lines {
        if rows.len() == n {
            return Err(Error::parse(line, format!("more than {n} rows")));
        }
        let row = l
            .split_whitespace()
            .map(|t| parse_exact(t).ok_or_else(|| Error::parse(line, format!("not a decimal: {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            return Err(Error::parse(line, format!("expected {n} entries, got {}", row.len())));
        }
        rows.push(row);
        row_lines.push(line);
    }
    if rows.len() < n {
        return Err(Error::parse(row_lines.last().copied().unwrap_or(first), format!("expected {n} rows, got {}", rows.len())));
    }
    FiniteMetricSpace::checked(rows).map_err(|(row, msg)| Error::parse(row_lines[row], msg))
}

/// A parsed `.cx` file.
#[derive(Clone, Debug)]
pub enum ComplexFile {
    Absolute(AbsoluteComplex),
    Geometric(GeometricComplex),
}

impl ComplexFile {
    pub fn complex(&self) -> &AbsoluteComplex {
        match self {
            ComplexFile::Absolute(k) => k,
            ComplexFile::Geometric(g) => &g.complex,
        }
    }

    pub fn into_complex(self) -> AbsoluteComplex {
        match self {
            ComplexFile::Absolute(k) => k,
            ComplexFile::Geometric(g) => g.complex,
        }
    }
}

#[derive(PartialEq)]
enum Form {
    Simplex,
    Cell,
}

fn token<T: FromStr>(line: usize, t: Option<&str>, what: &str) -> Result<T> {
    let t = t.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    t.parse().map_err(|_| Error::parse(line, format!("invalid {what}: {t:?}")))
}

pub fn parse_complex(text: &str) -> Result<ComplexFile> {
    let mut form: Option<(Form, usize)> = None;
    let mut facets = Vec::new();
    let mut facet_lines = Vec::new();
    let mut cells: Vec<(String, usize)> = Vec::new();
    let mut cell_line: HashMap<String, usize> = HashMap::new();
    let mut incs: Vec<(String, String, i64)> = Vec::new();
    let mut inc_line: HashMap<String, usize> = HashMap::new();
    let mut coords: HashMap<u32, Vec<f64>> = HashMap::new();
    let mut first_vertex_line = None;
    for (line, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let kw = toks.next().unwrap();
        let this = match kw {
            "simplex" | "vertex" => Form::Simplex,
            "cell" | "inc" => Form::Cell,
            other => return Err(Error::parse(line, format!("unknown keyword {other:?}"))),
        };
        match &form {
            Some((f, first)) if *f != this => {
                return Err(Error::parse(line, format!("mixes simplex and cell forms (first form at line {first})")))
            }
            None => form = Some((this, line)),
            _ => {}
        }
        match kw {
            "simplex" => {
                let verts = toks.map(|t| token::<u32>(line, Some(t), "vertex label")).collect::<Result<Vec<_>>>()?;
                if verts.is_empty() {
                    return Err(Error::parse(line, "empty simplex"));
                }
                facets.push(verts);
                facet_lines.push(line);
            }
            "vertex" => {
                let id: u32 = token(line, toks.next(), "vertex label")?;
                let x = toks.map(|t| token::<f64>(line, Some(t), "coordinate")).collect::<Result<Vec<_>>>()?;
                if coords.insert(id, x).is_some() {
                    return Err(Error::parse(line, format!("duplicate coordinates for vertex {id}")));
                }
                first_vertex_line.get_or_insert(line);
            }
            "cell" => {
                let id: String = token(line, toks.next(), "cell id")?;
                let dim: usize = token(line, toks.next(), "dimension")?;
                if cell_line.insert(id.clone(), line).is_some() {
                    return Err(Error::parse(line, format!("duplicate cell {id}")));
                }
                cells.push((id, dim));
            }
            _ => {
                let f: String = token(line, toks.next(), "face id")?;
                let c: String = token(line, toks.next(), "coface id")?;
                let e: i64 = token(line, toks.next(), "incidence")?;
                for id in [&f, &c] {
                    if !cell_line.contains_key(id) {
                        return Err(Error::parse(line, format!("unknown cell {id}")));
                    }
                }
                inc_line.insert(c.clone(), line);
                incs.push((f, c, e));
            }
        }
        if let Some(extra) = l.split_whitespace().nth(if kw == "inc" { 4 } else if kw == "cell" { 3 } else { usize::MAX }) {
            return Err(Error::parse(line, format!("unexpected token {extra:?}")));
        }
    }
    match form {
        None => Err(Error::parse(1, "no cells")),
        Some((Form::Simplex, _)) => {
            let k = build_simplicial(&facets).map_err(|e| {
                let line = match &e {
                    Error::DuplicateVertex { facet, .. } => {
                        facets.iter().position(|f| f == facet).map(|i| facet_lines[i]).unwrap_or(1)
                    }
                    _ => facet_lines[0],
                };
                Error::parse(line, e.to_string())
            })?;
            if coords.is_empty() {
                return Ok(ComplexFile::Absolute(k));
            }
            GeometricComplex::new(k, coords)
                .map(ComplexFile::Geometric)
                .map_err(|e| Error::parse(first_vertex_line.unwrap_or(1), e.to_string()))
        }
        Some((Form::Cell, first)) => {
            let k = AbsoluteComplex::from_cells(cells, incs).map_err(|e| Error::parse(first, e.to_string()))?;
            let report = validate_incidence(&k);
            if let Some((x, y, s)) = report.failures.first() {
                let line = inc_line.get(y).copied().unwrap_or(first);
                return Err(Error::parse(line, format!("incidence condition fails for ({x}, {y}): sum {s}")));
            }
            Ok(ComplexFile::Absolute(k))
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(Error::from)
}

pub fn read_metric(path: &Path) -> Result<FiniteMetricSpace> {
    parse_metric(&read(path)?)
}

pub fn read_complex(path: &Path) -> Result<ComplexFile> {
    parse_complex(&read(path)?)
}

/// A JSON scalar: a number or a string holding a decimal or fraction.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(serde_json::Number),
    Text(String),
}

impl Scalar {
    pub fn exact(&self) -> Result<Q> {
        let s = match self {
            Scalar::Number(n) => n.to_string(),
            Scalar::Text(t) => t.clone(),
        };
        parse_exact(&s).ok_or_else(|| Error::InvalidArgument(format!("not an exact number: {s}")))
    }
}

fn cell_of_degree(k: &AbsoluteComplex, id: &str, degree: usize) -> Result<usize> {
    let c = k.index_of(id).ok_or_else(|| Error::InvalidArgument(format!("unknown cell {id}")))?;
    if k.cell(c).dim != degree {
        return Err(Error::DegreeMismatch(format!("cell {id} has dimension {}, expected {degree}", k.cell(c).dim)));
    }
    Ok(k.position(c))
}

/// `{"degree": q, "coeffs": {"<cell id>": value, ...}}`
#[derive(Debug, Deserialize)]
pub struct ChainJson {
    pub degree: usize,
    pub coeffs: BTreeMap<String, Scalar>,
}

impl ChainJson {
    pub fn resolve(&self, k: &AbsoluteComplex) -> Result<SparseChain<f64>> {
        let mut chain = SparseChain::new(self.degree);
        for (id, v) in &self.coeffs {
            let i = cell_of_degree(k, id, self.degree)?;
            chain.coeffs.insert(i, crate::exact::q_to_f64(&v.exact()?));
        }
        Ok(chain)
    }
}

/// `{"source_degree": q, "target_degree": r, "entries": [[target, source, value], ...]}`
#[derive(Debug, Deserialize)]
pub struct OperatorJson {
    pub source_degree: usize,
    pub target_degree: usize,
    pub entries: Vec<(String, String, Scalar)>,
}

impl OperatorJson {
    pub fn resolve(&self, src: &AbsoluteComplex, tgt: &AbsoluteComplex) -> Result<CellOperator> {
        let trips = self
            .entries
            .iter()
            .map(|(t, s, v)| {
                Ok((cell_of_degree(tgt, t, self.target_degree)?, cell_of_degree(src, s, self.source_degree)?, v.exact()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CellOperator::from_triplets(
            self.source_degree,
            self.target_degree,
            tgt.count(self.target_degree),
            src.count(self.source_degree),
            trips,
        ))
    }
}

/// `{"pairs": [["core1 id", "core0 id"], ...], "orientation": [v0, ...]}`
#[derive(Debug, Deserialize)]
pub struct GlueJson {
    pub pairs: Vec<(String, String)>,
    #[serde(default)]
    pub orientation: Option<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
pub struct ClassJson {
    pub degree: usize,
    #[serde(default = "rational")]
    pub ring: Ring,
    pub values: BTreeMap<String, Scalar>,
}

fn rational() -> Ring {
    Ring::Rational
}

/// Classes on a glued complex and the monomials to evaluate, each monomial a
/// list of `[class index, power]`.
#[derive(Debug, Default, Deserialize)]
pub struct InvariantsJson {
    #[serde(default)]
    pub classes: Vec<ClassJson>,
    #[serde(default)]
    pub monomials: Vec<Vec<(usize, usize)>>,
}

impl InvariantsJson {
    pub fn resolve(&self, k: &AbsoluteComplex) -> Result<InvariantRequest> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                let values = c.values.iter().map(|(id, v)| Ok((id.clone(), v.exact()?))).collect::<Result<BTreeMap<_, _>>>()?;
                CocycleClass::from_ids(k, c.degree, &values, c.ring)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InvariantRequest { classes, monomials: self.monomials.clone() })
    }
}

/// `{"assignment": [f(0), f(1), ...]}`
#[derive(Debug, Deserialize)]
pub struct MapJson {
    pub assignment: Vec<usize>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read(path)?)?)
}

/// Rendering of a rational for reports: integers plainly, otherwise `p/q`.
pub fn show_exact(x: &Q) -> String {
    if x.denom().is_one() || x.is_zero() {
        x.numer().to_string()
    } else {
        x.to_string()
    }
}
