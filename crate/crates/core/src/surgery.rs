//! Surgery homomorphisms, lines of surgeries, parameter sweeps and the
//! closed-form scl values of the `w` and `w′` families.

use crate::chain::{homology_class, normalize_chain, tighten, Chain, ChainError, GroupSpec, Syllable, Term};
use crate::engine::{scl_with, SclOptions};
use crate::rational::{to_pq, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

/// Integer matrix with `rank(target)` rows and `rank(source)` columns.
pub type Matrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SurgeryError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("line syntax: {0}")]
    Syntax(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("outside the hypotheses: {0}")]
    Hypothesis(String),
}

fn shape(msg: impl Into<String>) -> SurgeryError {
    SurgeryError::Shape(msg.into())
}

/// A homomorphism of free products given factorwise by integer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryMap {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub matrices: Vec<Matrix>,
}

fn check_shapes(source: &GroupSpec, target: &GroupSpec, matrices: &[Matrix]) -> Result<(), SurgeryError> {
    if source.num_factors() != target.num_factors() || matrices.len() != source.num_factors() {
        return Err(shape("factor counts differ"));
    }
    for (i, m) in matrices.iter().enumerate() {
        if m.len() != target.rank(i) || m.iter().any(|row| row.len() != source.rank(i)) {
            return Err(shape(format!("matrix of factor {i} is not {}x{}", target.rank(i), source.rank(i))));
        }
    }
    Ok(())
}

impl SurgeryMap {
    pub fn new(source: GroupSpec, target: GroupSpec, matrices: Vec<Matrix>) -> Result<SurgeryMap, SurgeryError> {
        check_shapes(&source, &target, &matrices)?;
        Ok(SurgeryMap { source, target, matrices })
    }

    /// Each generator of factor `i` goes to its `powers[i]`-th power.
    pub fn scalar(spec: &GroupSpec, powers: &[i64]) -> SurgeryMap {
        let matrices = (0..spec.num_factors())
            .map(|i| {
                let r = spec.rank(i);
                (0..r).map(|a| (0..r).map(|b| if a == b { powers[i] } else { 0 }).collect()).collect()
            })
            .collect();
        SurgeryMap { source: spec.clone(), target: spec.clone(), matrices }
    }

    pub fn identity(spec: &GroupSpec) -> SurgeryMap {
        SurgeryMap::scalar(spec, &vec![1; spec.num_factors()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryImage {
    pub chain: Chain,
    pub warnings: Vec<String>,
    pub is_boundary: bool,
}

fn mat_vec(m: &Matrix, e: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(e).map(|(a, b)| a * b).sum()).collect()
}

/// Pushes a chain forward along `map`; words that die are dropped with a warning.
pub fn apply_surgery(chain: &Chain, map: &SurgeryMap) -> Result<SurgeryImage, SurgeryError> {
    let mut terms = Vec::new();
    let mut warnings = Vec::new();
    for (k, t) in chain.terms.iter().enumerate() {
        let mut raw = Vec::new();
        for s in t.word.syllables() {
            if s.exponent.len() != map.source.rank(s.factor) {
                return Err(shape(format!("syllable of factor {} has the wrong rank", s.factor)));
            }
            raw.push(Syllable::new(s.factor, mat_vec(&map.matrices[s.factor], &s.exponent)));
        }
        match tighten(&raw) {
            Some(word) => terms.push(Term { coefficient: t.coefficient.clone(), word }),
            None => warnings.push(format!("term {} maps to the identity and was dropped", k + 1)),
        }
    }
    let chain = normalize_chain(&Chain::new(terms));
    let is_boundary = homology_class(&chain, &map.target).is_boundary();
    if !is_boundary {
        warnings.push("image is not a boundary".into());
    }
    Ok(SurgeryImage { chain, warnings, is_boundary })
}

/// `ρ(p) = σ + p·τ` factorwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryLine {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub sigma: Vec<Matrix>,
    pub tau: Vec<Matrix>,
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

impl SurgeryLine {
    pub fn new(source: GroupSpec, target: GroupSpec, sigma: Vec<Matrix>, tau: Vec<Matrix>) -> Result<SurgeryLine, SurgeryError> {
        check_shapes(&source, &target, &sigma)?;
        check_shapes(&source, &target, &tau)?;
        Ok(SurgeryLine { source, target, sigma, tau })
    }

    /// The line `p ↦ ρ(p) ∘ φ` for a factorwise endomorphism `φ` of the source.
    pub fn precompose(&self, phi: &[Matrix]) -> Result<SurgeryLine, SurgeryError> {
        check_shapes(&self.source, &self.source, phi)?;
        let sigma = self.sigma.iter().zip(phi).map(|(s, f)| mat_mul(s, f)).collect();
        let tau = self.tau.iter().zip(phi).map(|(t, f)| mat_mul(t, f)).collect();
        SurgeryLine::new(self.source.clone(), self.target.clone(), sigma, tau)
    }
}

pub fn line_at(line: &SurgeryLine, p: i64) -> SurgeryMap {
    let matrices = line
        .sigma
        .iter()
        .zip(&line.tau)
        .map(|(s, t)| {
            s.iter()
                .zip(t)
                .map(|(rs, rt)| rs.iter().zip(rt).map(|(a, b)| a + p * b).collect())
                .collect()
        })
        .collect();
    SurgeryMap { source: line.source.clone(), target: line.target.clone(), matrices }
}

/// One summand of an image expression: `coeff·[p]·gen`.
struct Summand {
    coeff: i64,
    with_p: bool,
    gen: char,
}

fn parse_expr(text: &str) -> Result<Vec<Summand>, SurgeryError> {
    let err = |m: &str| SurgeryError::Syntax(format!("{m} in '{text}'"));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let mut coeff = sign;
        let mut with_p = false;
        let mut gen = None;
        let factors: Vec<&str> = term.split('*').collect();
        for (i, f) in factors.iter().enumerate() {
            let last = i + 1 == factors.len();
            if let Ok(n) = f.parse::<i64>() {
                coeff *= n;
            } else if *f == "p" && !last {
                if with_p {
                    return Err(err("p appears twice"));
                }
                with_p = true;
            } else if last && f.len() == 1 && f.chars().all(|c| c.is_ascii_lowercase()) {
                gen = f.chars().next();
            } else {
                return Err(err(&format!("unexpected '{f}'")));
            }
        }
        let gen = gen.ok_or_else(|| err("term without a generator"))?;
        out.push(Summand { coeff, with_p, gen });
    }
    Ok(out)
}

/// Parses `"a->a; c->p*a; b->b"`. Without an explicit target, factor `i` of
/// the target is generated by the letters in the images of factor `i`, in
/// order of first appearance.
pub fn parse_line(text: &str, source: &GroupSpec, target: Option<&GroupSpec>) -> Result<SurgeryLine, SurgeryError> {
    let mut images: Vec<Option<Vec<Summand>>> = Vec::new();
    let gens: Vec<char> = source.factors().iter().flat_map(|f| f.generators.clone()).collect();
    images.resize_with(gens.len(), || None);
    for clause in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let (lhs, rhs) = clause
            .split_once("->")
            .ok_or_else(|| SurgeryError::Syntax(format!("expected 'gen -> expression' in '{clause}'")))?;
        let lhs = lhs.trim();
        let g = gens
            .iter()
            .position(|&g| lhs.len() == 1 && lhs.starts_with(g))
            .ok_or_else(|| SurgeryError::Syntax(format!("'{lhs}' is not a source generator")))?;
        if images[g].is_some() {
            return Err(SurgeryError::Syntax(format!("'{lhs}' is mapped twice")));
        }
        images[g] = Some(parse_expr(rhs)?);
    }
    if let Some(g) = images.iter().position(|i| i.is_none()) {
        return Err(SurgeryError::Syntax(format!("'{}' has no image", gens[g])));
    }
    let images: Vec<Vec<Summand>> = images.into_iter().map(Option::unwrap).collect();
    let owner = |k: usize| source.locate(gens[k]).unwrap();
    let target = match target {
        Some(t) => t.clone(),
        None => {
            let mut per_factor: Vec<Vec<char>> = vec![Vec::new(); source.num_factors()];
            for (k, img) in images.iter().enumerate() {
                let (f, _) = owner(k);
                for s in img {
                    if !per_factor[f].contains(&s.gen) {
                        per_factor[f].push(s.gen);
                    }
                }
            }
            GroupSpec::new(per_factor).map_err(|e| shape(format!("cannot infer the target group: {e}")))?
        }
    };
    if target.num_factors() != source.num_factors() {
        return Err(shape("factor counts differ"));
    }
    let zero = |i: usize| -> Matrix { vec![vec![0; source.rank(i)]; target.rank(i)] };
    let mut sigma: Vec<Matrix> = (0..source.num_factors()).map(zero).collect();
    let mut tau = sigma.clone();
    for (k, img) in images.iter().enumerate() {
        let (f, col) = owner(k);
        for s in img {
            let (tf, row) = target
                .locate(s.gen)
                .ok_or_else(|| shape(format!("'{}' is not a target generator", s.gen)))?;
            if tf != f {
                return Err(shape(format!("'{}' maps outside its factor", gens[k])));
            }
            let m = if s.with_p { &mut tau } else { &mut sigma };
            m[f][row][col] += s.coeff;
        }
    }
    SurgeryLine::new(source.clone(), target, sigma, tau)
}

/// A single homomorphism in the line syntax (no `p`).
pub fn parse_map(text: &str, source: &GroupSpec, target: Option<&GroupSpec>) -> Result<SurgeryMap, SurgeryError> {
    let line = parse_line(text, source, target)?;
    if line.tau.iter().flatten().flatten().any(|&x| x != 0) {
        return Err(SurgeryError::Syntax("a map may not mention p".into()));
    }
    Ok(line_at(&line, 0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: i64,
    pub chain_text: String,
    #[serde(serialize_with = "ser_result")]
    pub scl: Result<Rational, String>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    #[serde(serialize_with = "ser_result")]
    pub limit: Result<Rational, String>,
}

fn ser_result<S: serde::Serializer>(r: &Result<Rational, String>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Ok(q) => s.serialize_str(&to_pq(q)),
        Err(e) => s.serialize_str(&format!("error: {e}")),
    }
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let limit = match &self.limit {
            Ok(q) => to_pq(q),
            Err(e) => format!("error: {e}"),
        };
        let mut out = String::from("p,chain_text,scl,limit_value\n");
        for r in &self.rows {
            let value = match &r.scl {
                Ok(q) => to_pq(q),
                Err(e) => format!("error: {e}"),
            };
            out.push_str(&format!("{},\"{}\",{},{}\n", r.p, r.chain_text, value, limit));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }
}

/// scl of the image at every `p` in `p_from..=p_to`, plus scl of the chain itself.
pub fn sweep(line: &SurgeryLine, chain: &Chain, p_from: i64, p_to: i64, opts: &SclOptions) -> SweepTable {
    let rows = (p_from..=p_to)
        .into_par_iter()
        .map(|p| match apply_surgery(chain, &line_at(line, p)) {
            Ok(img) => {
                let scl = if img.chain.is_empty() {
                    Ok(Rational::from_integer(BigInt::from(0)))
                } else {
                    scl_with(&img.chain, &line.target, opts).map(|r| r.value).map_err(|e| e.to_string())
                };
                SweepRow { p, chain_text: img.chain.render(&line.target), scl, warnings: img.warnings }
            }
            Err(e) => SweepRow { p, chain_text: String::new(), scl: Err(e.to_string()), warnings: Vec::new() },
        })
        .collect();
    let limit = scl_with(chain, &line.source, opts).map(|r| r.value).map_err(|e| e.to_string());
    SweepTable { rows, limit }
}

fn check_pair(x1: i64, x2: i64, name: &str) -> Result<(), SurgeryError> {
    if x1.gcd(&x2) != 1 || !(x1 > x1 + x2 && x1 + x2 > 0 && 0 > x2) {
        return Err(SurgeryError::Hypothesis(format!(
            "{name} = ({x1},{x2}) needs gcd 1 and {name}1 > {name}1+{name}2 > 0 > {name}2"
        )));
    }
    Ok(())
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Closed-form scl of `a^{-α1-α2} + b^{-β1-β2} + a^{α1}b^{β1} + a^{α2}b^{β2}`.
pub fn closed_form_w(a1: i64, a2: i64, b1: i64, b2: i64) -> Result<Rational, SurgeryError> {
    check_pair(a1, a2, "α")?;
    check_pair(b1, b2, "β")?;
    let one = r(1, 1);
    let half = r(1, 2);
    let value = if r(a1 - 1, a1) <= r(b1 + b2, b1) {
        &one - &half * (r(1, a1) + r(a1 - 1, a1 * (b1 + b2)))
    } else if r(b1 - 1, b1) <= r(a1 + a2, a1) {
        &one - &half * (r(1, b1) + r(b1 - 1, b1 * (a1 + a2)))
    } else {
        &one - &half * (r(1, a1) + r(1, b1))
    };
    Ok(value)
}

/// Closed-form scl of `a^{-α1-α2} + b^{-β1-β2} + a^{α1}b^{β1}a^{α2}b^{β2}`.
pub fn closed_form_wprime(a1: i64, a2: i64, b1: i64, b2: i64) -> Result<Rational, SurgeryError> {
    check_pair(a1, a2, "α")?;
    check_pair(b1, b2, "β")?;
    let one = r(1, 1);
    let half = r(1, 2);
    let value = if r(-b2, b1) <= r(a1 + a2, a1) {
        let x = r(1, b1) - r(b2, b1 * (a1 + a2));
        let y = r(1, a1) - r(a2, a1 * (b1 + b2));
        &one - &half * x.max(y)
    } else {
        &one - &half * (r(1, a1) + r(1, b1))
    };
    Ok(value)
}

/// Chain text of the `w` family member.
pub fn w_text(a1: i64, a2: i64, b1: i64, b2: i64) -> String {
    format!("a^{} + b^{} + a^{a1} b^{b1} + a^{a2} b^{b2}", -a1 - a2, -b1 - b2)
}

/// Chain text of the `w′` family member.
pub fn wprime_text(a1: i64, a2: i64, b1: i64, b2: i64) -> String {
    format!("a^{} + b^{} + a^{a1} b^{b1} a^{a2} b^{b2}", -a1 - a2, -b1 - b2)
}

/// Pairs `(x1, x2)` with `2 ≤ x1 ≤ n` satisfying the family hypotheses.
pub fn admissible_pairs(n: i64) -> Vec<(i64, i64)> {
    (2..=n)
        .flat_map(|x1| ((1 - x1)..0).map(move |x2| (x1, x2)))
        .filter(|&(x1, x2)| x1.gcd(&x2) == 1)
        .collect()
}
