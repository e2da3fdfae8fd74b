//! Disk vectors and the Klein function.
//!
//! `κ(v)` is the largest total weight of disk vectors that fit under `v`
//! with a remainder still in the cone; it is computed by an exact LP in the
//! column formulation. `χ_o(v) = κ(v) − |v|/2`.

use crate::cone::{support_graph_int, ConeSystem};
use crate::lp::{maximize, LinearProgram, Relation, Status};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SailError {
    #[error("vector is not in the cone of factor {0}")]
    NotInCone(usize),
}

/// A nonzero integral point of the cone with connected support and no
/// dummy coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiskVector {
    pub factor: usize,
    pub v: Vec<i64>,
}

/// Checks the disk invariants from scratch.
pub fn check_disk(cone: &ConeSystem, v: &[i64]) -> Result<(), String> {
    if v.len() != cone.dim() {
        return Err("wrong length".into());
    }
    if v.iter().all(|&x| x == 0) {
        return Err("zero vector".into());
    }
    if (0..v.len()).any(|j| !cone.is_genuine(j) && v[j] != 0) {
        return Err("uses a dummy coordinate".into());
    }
    if !cone.contains_int(v) {
        return Err("not in the cone".into());
    }
    if support_graph_int(cone, v).component_count() != 1 {
        return Err("disconnected support".into());
    }
    Ok(())
}

/// Disk vectors of one factor found inside a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleinModel {
    pub factor: usize,
    pub disks: Vec<DiskVector>,
    pub bound: Vec<i64>,
    /// False when enumeration stopped at a limit.
    pub complete: bool,
}

pub fn enumerate_disk_vectors(cone: &ConeSystem, bound: &[i64]) -> KleinModel {
    enumerate_disk_vectors_limited(cone, bound, None)
}

/// Depth-first enumeration over coordinates in index order, pruning every
/// partial assignment whose completion is LP-infeasible.
pub fn enumerate_disk_vectors_limited(cone: &ConeSystem, bound: &[i64], limit: Option<usize>) -> KleinModel {
    let n = cone.dim();
    assert_eq!(bound.len(), n);
    let rows = cone.rational_rows();
    let bound: Vec<i64> = (0..n).map(|j| if cone.is_genuine(j) { bound[j] } else { 0 }).collect();
    let search = Search { cone, rows: &rows, bound: &bound, limit };
    let mut found: Vec<Vec<i64>> = if n == 0 {
        Vec::new()
    } else {
        (0..=bound[0])
            .into_par_iter()
            .map(|x| {
                let mut prefix = vec![x];
                let mut out = Vec::new();
                search.dfs(&mut prefix, &mut out);
                out
            })
            .flatten()
            .collect()
    };
    found.sort();
    let complete = limit.map_or(true, |l| found.len() <= l);
    if let Some(l) = limit {
        found.truncate(l);
    }
    KleinModel {
        factor: cone.factor,
        disks: found.into_iter().map(|v| DiskVector { factor: cone.factor, v }).collect(),
        bound,
        complete,
    }
}

struct Search<'a> {
    cone: &'a ConeSystem,
    rows: &'a [Vec<Rational>],
    bound: &'a [i64],
    limit: Option<usize>,
}

impl Search<'_> {
    fn dfs(&self, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if self.limit.is_some_and(|l| out.len() > l) || !self.feasible(prefix) {
            return;
        }
        let k = prefix.len();
        if k == self.bound.len() {
            if prefix.iter().any(|&x| x != 0) && support_graph_int(self.cone, prefix).component_count() == 1 {
                out.push(prefix.clone());
            }
            return;
        }
        for x in 0..=self.bound[k] {
            prefix.push(x);
            self.dfs(prefix, out);
            prefix.pop();
        }
    }

    /// Can the prefix be completed to a real point of the cone inside the box?
    fn feasible(&self, prefix: &[i64]) -> bool {
        let k = prefix.len();
        let n = self.bound.len();
        let residual: Vec<Rational> = self
            .rows
            .iter()
            .map(|r| {
                -prefix
                    .iter()
                    .zip(r)
                    .fold(Rational::zero(), |acc, (&x, a)| acc + a * Rational::from_integer(BigInt::from(x)))
            })
            .collect();
        let mut needs_lp = false;
        for (r, b) in self.rows.iter().zip(&residual) {
            if r[k..].iter().all(|a| a.is_zero()) {
                if !b.is_zero() {
                    return false;
                }
            } else {
                needs_lp = true;
            }
        }
        if !needs_lp {
            return true;
        }
        let mut lp = LinearProgram::new();
        let vars: Vec<usize> = (k..n).map(|j| lp.add_var(format!("x{j}"), Rational::zero())).collect();
        for (j, &var) in (k..n).zip(&vars) {
            lp.add_row(vec![(var, Rational::one())], Relation::Le, Rational::from_integer(BigInt::from(self.bound[j])));
        }
        for (r, b) in self.rows.iter().zip(residual) {
            let coeffs: Vec<(usize, Rational)> = (k..n).zip(&vars).map(|(j, &var)| (var, r[j].clone())).collect();
            lp.add_row(coeffs, Relation::Eq, b);
        }
        maximize(&lp).status == Status::Optimal
    }
}

/// Sum over genuine coordinates: `|v|`.
pub fn genuine_norm(cone: &ConeSystem, v: &[Rational]) -> Rational {
    cone.genuine_norm(v)
}

/// An optimal admissible expression `v = Σ t_d·d + remainder`, together with
/// a dual vector `y` such that `κ(u) ≤ y·u` for every `u` in the cone.
#[derive(Clone, Debug)]
pub struct KleinEval {
    pub value: Rational,
    pub expression: Vec<(Rational, usize)>,
    pub remainder: Vec<Rational>,
    pub majorant: Vec<Rational>,
}

pub fn klein_eval(model: &KleinModel, cone: &ConeSystem, v: &[Rational]) -> Result<KleinEval, SailError> {
    if !cone.contains(v) {
        return Err(SailError::NotInCone(cone.factor));
    }
    let n = cone.dim();
    let mut lp = LinearProgram::new();
    let t: Vec<usize> = (0..model.disks.len()).map(|i| lp.add_var(format!("t{i}"), Rational::one())).collect();
    let r: Vec<usize> = (0..n).map(|j| lp.add_var(format!("r{j}"), Rational::zero())).collect();
    for j in 0..n {
        let mut coeffs = vec![(r[j], Rational::one())];
        for (d, &tv) in model.disks.iter().zip(&t) {
            if d.v[j] != 0 {
                coeffs.push((tv, Rational::from_integer(BigInt::from(d.v[j]))));
            }
        }
        lp.add_row(coeffs, Relation::Eq, v[j].clone());
    }
    for row in cone.rational_rows() {
        let coeffs = row.into_iter().enumerate().map(|(j, a)| (r[j], a)).collect();
        lp.add_row(coeffs, Relation::Eq, Rational::zero());
    }
    let sol = maximize(&lp);
    assert!(sol.is_optimal(), "κ LP is feasible and bounded for points of the cone");
    let expression = t
        .iter()
        .enumerate()
        .filter(|(_, &var)| sol.assignment[var].is_positive())
        .map(|(i, &var)| (sol.assignment[var].clone(), i))
        .collect();
    Ok(KleinEval {
        value: sol.objective.clone(),
        expression,
        remainder: r.iter().map(|&var| sol.assignment[var].clone()).collect(),
        majorant: sol.duals[..n].to_vec(),
    })
}

pub fn klein_value(model: &KleinModel, cone: &ConeSystem, v: &[Rational]) -> Result<Rational, SailError> {
    Ok(klein_eval(model, cone, v)?.value)
}

pub fn chi_o(model: &KleinModel, cone: &ConeSystem, v: &[Rational]) -> Result<Rational, SailError> {
    Ok(klein_value(model, cone, v)? - genuine_norm(cone, v) / Rational::from_integer(BigInt::from(2)))
}

/// `slope·x + intercept` on `[from, to]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub from: Rational,
    pub to: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

impl Piece {
    pub fn at(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }
}

/// Piecewise-linear description of `x ↦ κ((1−x)·start + x·end)` on `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub pieces: Vec<Piece>,
}

impl Profile {
    /// Interior points where the slope changes.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.pieces.iter().skip(1).map(|p| p.from.clone()).collect()
    }

    pub fn value_at(&self, x: &Rational) -> Option<Rational> {
        self.pieces.iter().find(|p| &p.from <= x && x <= &p.to).map(|p| p.at(x))
    }
}

#[derive(Clone)]
struct Line {
    slope: Rational,
    intercept: Rational,
}

impl Line {
    fn at(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }
}

/// Exact profile of κ along a segment.
///
/// Each evaluation also yields a linear majorant of κ touching it at that
/// point. Two majorants from the ends of an interval meet at some `x*`; if κ
/// reaches them there, concavity pins κ to the majorants on both sides,
/// otherwise the interval is split at `x*`.
pub fn klein_profile(model: &KleinModel, cone: &ConeSystem, start: &[Rational], end: &[Rational]) -> Result<Profile, SailError> {
    if !cone.contains(start) || !cone.contains(end) {
        return Err(SailError::NotInCone(cone.factor));
    }
    let delta: Vec<Rational> = end.iter().zip(start).map(|(b, a)| b - a).collect();
    let point = |x: &Rational| -> Vec<Rational> { start.iter().zip(&delta).map(|(a, d)| a + d * x).collect() };
    let eval = |x: &Rational| -> Result<(Rational, Line), SailError> {
        let e = klein_eval(model, cone, &point(x))?;
        let dot = |u: &[Rational]| u.iter().zip(&e.majorant).fold(Rational::zero(), |acc, (a, y)| acc + a * y);
        Ok((e.value, Line { slope: dot(&delta), intercept: dot(start) }))
    };
    let zero = Rational::zero();
    let one = Rational::one();
    let (_, l0) = eval(&zero)?;
    let (_, l1) = eval(&one)?;
    let mut pieces = Vec::new();
    let mut stack = vec![(zero, l0, one, l1)];
    while let Some((x0, a, x1, b)) = stack.pop() {
        if a.slope == b.slope {
            // Parallel majorants touching at both ends coincide.
            pieces.push(Piece { from: x0, to: x1, slope: a.slope, intercept: a.intercept });
            continue;
        }
        let xs = (&b.intercept - &a.intercept) / (&a.slope - &b.slope);
        let (fx, line) = eval(&xs)?;
        if fx == a.at(&xs) {
            pieces.push(Piece { from: xs.clone(), to: x1, slope: b.slope, intercept: b.intercept });
            pieces.push(Piece { from: x0, to: xs, slope: a.slope, intercept: a.intercept });
        } else {
            stack.push((x0, a, xs.clone(), line.clone()));
            stack.push((xs, line, x1, b));
        }
    }
    pieces.reverse();
    pieces.sort_by(|p, q| p.from.cmp(&q.from).then(p.to.cmp(&q.to)));
    let mut merged: Vec<Piece> = Vec::new();
    for p in pieces.into_iter().filter(|p| p.from < p.to) {
        match merged.last_mut() {
            Some(last) if last.slope == p.slope && last.intercept == p.intercept => last.to = p.to,
            _ => merged.push(p),
        }
    }
    if merged.is_empty() {
        let (f0, _) = eval(&Rational::zero())?;
        merged.push(Piece { from: Rational::zero(), to: Rational::one(), slope: Rational::zero(), intercept: f0 });
    }
    Ok(Profile { pieces: merged })
}
