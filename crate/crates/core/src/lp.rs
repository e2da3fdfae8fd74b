//! Exact linear programming over the rationals.
//!
//! A dense two-phase simplex. Bland's rule is the default; Dantzig's rule is
//! available for speed and falls back to Bland after a run of degenerate
//! pivots. Every optimal solution carries dual values and is checked against
//! an exact optimality certificate before it is returned.

use crate::rational::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

/// A sparse constraint row `Σ coeff·x (rel) rhs`.
#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// `maximize objective·x` subject to rows and lower bounds (`None` = free).
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    labels: Vec<String>,
    lower: Vec<Option<Rational>>,
    objective: Vec<Rational>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with lower bound 0.
    pub fn add_var(&mut self, label: impl Into<String>, objective: Rational) -> usize {
        self.labels.push(label.into());
        self.lower.push(Some(Rational::zero()));
        self.objective.push(objective);
        self.labels.len() - 1
    }

    pub fn add_free_var(&mut self, label: impl Into<String>, objective: Rational) -> usize {
        let j = self.add_var(label, objective);
        self.lower[j] = None;
        j
    }

    pub fn set_lower(&mut self, var: usize, bound: Option<Rational>) {
        self.lower[var] = bound;
    }

    pub fn set_objective(&mut self, var: usize, c: Rational) {
        self.objective[var] = c;
    }

    /// Adds a row; zero coefficients are dropped and repeated indices summed.
    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> usize {
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|(j, _)| *j);
        for (j, a) in sorted {
            assert!(j < self.labels.len(), "row refers to unknown variable {j}");
            match merged.last_mut() {
                Some((k, b)) if *k == j => *b += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        self.rows.push(Row { coeffs: merged, relation, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn lower(&self) -> &[Option<Rational>] {
        &self.lower
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }

    /// Index of the first violated row or bound, if any.
    pub fn first_violation(&self, x: &[Rational]) -> Option<String> {
        if x.len() != self.num_vars() {
            return Some(format!("assignment has {} entries, expected {}", x.len(), self.num_vars()));
        }
        for (j, l) in self.lower.iter().enumerate() {
            if let Some(l) = l {
                if &x[j] < l {
                    return Some(format!("variable {} below its bound", self.labels[j]));
                }
            }
        }
        self.rows
            .iter()
            .position(|r| !r.holds(x))
            .map(|i| format!("row {i} violated"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotRule {
    #[default]
    Bland,
    Dantzig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: Status,
    pub objective: Rational,
    pub assignment: Vec<Rational>,
    /// Basic tableau columns, one per row, at termination.
    pub basis: Vec<usize>,
    /// One dual value per row (sign convention: the dual of a maximization).
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

impl Solution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("primal infeasible: {0}")]
    Primal(String),
    #[error("dual infeasible: {0}")]
    Dual(String),
    #[error("duality gap: primal {primal}, dual {dual}")]
    Gap { primal: String, dual: String },
}

/// Checks primal feasibility, dual feasibility and strong duality exactly.
pub fn certify(lp: &LinearProgram, sol: &Solution) -> Result<(), CertificateError> {
    if let Some(msg) = lp.first_violation(&sol.assignment) {
        return Err(CertificateError::Primal(msg));
    }
    if sol.duals.len() != lp.num_rows() {
        return Err(CertificateError::Dual("wrong number of duals".into()));
    }
    for (i, (row, y)) in lp.rows.iter().zip(&sol.duals).enumerate() {
        let ok = match row.relation {
            Relation::Le => !y.is_negative(),
            Relation::Ge => !y.is_positive(),
            Relation::Eq => true,
        };
        if !ok {
            return Err(CertificateError::Dual(format!("dual of row {i} has the wrong sign")));
        }
    }
    let mut reduced = lp.objective.clone();
    for (row, y) in lp.rows.iter().zip(&sol.duals) {
        if y.is_zero() {
            continue;
        }
        for (j, a) in &row.coeffs {
            reduced[*j] -= y * a;
        }
    }
    let mut dual_value = lp
        .rows
        .iter()
        .zip(&sol.duals)
        .fold(Rational::zero(), |acc, (r, y)| acc + y * &r.rhs);
    for (j, d) in reduced.iter().enumerate() {
        match &lp.lower[j] {
            Some(l) => {
                if d.is_positive() {
                    return Err(CertificateError::Dual(format!("reduced cost of {} is positive", lp.labels[j])));
                }
                dual_value += d * l;
            }
            None => {
                if !d.is_zero() {
                    return Err(CertificateError::Dual(format!("reduced cost of free {} is nonzero", lp.labels[j])));
                }
            }
        }
    }
    let primal_value = lp.evaluate(&sol.assignment);
    if primal_value != dual_value || primal_value != sol.objective {
        return Err(CertificateError::Gap {
            primal: primal_value.to_string(),
            dual: dual_value.to_string(),
        });
    }
    Ok(())
}

pub fn maximize(lp: &LinearProgram) -> Solution {
    maximize_with(lp, PivotRule::Bland)
}

/// Solves `lp` exactly. Panics only if the computed optimum fails its own
/// certificate, which would be an internal bug.
pub fn maximize_with(lp: &LinearProgram, rule: PivotRule) -> Solution {
    let sol = Tableau::build(lp).solve(lp, rule);
    if sol.is_optimal() {
        if let Err(e) = certify(lp, &sol) {
            panic!("simplex produced an uncertified optimum: {e}");
        }
    }
    sol
}

/// An affine functional `Σ coeff·x + constant`.
#[derive(Clone, Debug)]
pub struct Affine {
    pub coeffs: Vec<(usize, Rational)>,
    pub constant: Rational,
}

impl Affine {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (j, a)| acc + a * &x[*j])
    }
}

/// Maximizes `min_k piece_k(x) + objective·x`. The epigraph variable `z`
/// is appended last in the returned assignment.
pub fn maximize_min(lp: &LinearProgram, pieces: &[Affine]) -> Solution {
    assert!(!pieces.is_empty(), "maximize_min needs at least one piece");
    let mut aug = lp.clone();
    let z = aug.add_free_var("z", Rational::one());
    for piece in pieces {
        let mut coeffs = vec![(z, Rational::one())];
        coeffs.extend(piece.coeffs.iter().map(|(j, a)| (*j, -a)));
        aug.add_row(coeffs, Relation::Le, piece.constant.clone());
    }
    maximize(&aug)
}

#[derive(Clone, Copy)]
enum Origin {
    /// `x_var = lower + col` or, for free variables, the positive/negative part.
    Shifted(usize),
    Positive(usize),
    Negative(usize),
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    origin: Vec<Origin>,
    /// Column whose initial tableau entry is the unit vector of the row.
    unit_col: Vec<usize>,
    flipped: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.rows.len();
        let mut origin = Vec::new();
        let mut col_of = Vec::with_capacity(lp.num_vars());
        for (j, l) in lp.lower.iter().enumerate() {
            col_of.push(origin.len());
            match l {
                Some(_) => origin.push(Origin::Shifted(j)),
                None => {
                    origin.push(Origin::Positive(j));
                    origin.push(Origin::Negative(j));
                }
            }
        }
        let structural = origin.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for row in &lp.rows {
            let mut dense = vec![Rational::zero(); structural];
            let mut b = row.rhs.clone();
            for (j, a) in &row.coeffs {
                let c = col_of[*j];
                match &lp.lower[*j] {
                    Some(l) => {
                        dense[c] += a;
                        b -= a * l;
                    }
                    None => {
                        dense[c] += a;
                        dense[c + 1] -= a;
                    }
                }
            }
            let flip = b.is_negative();
            if flip {
                for v in dense.iter_mut() {
                    *v = -v.clone();
                }
                b = -b;
            }
            rows.push(dense);
            rhs.push(b);
            flipped.push(flip);
            relations.push(if flip { row.relation.flipped() } else { row.relation });
        }
        let mut unit_col = vec![0; m];
        let mut push_col = |rows: &mut Vec<Vec<Rational>>, at: usize, value: Rational, kind: Origin| {
            for (k, r) in rows.iter_mut().enumerate() {
                r.push(if k == at { value.clone() } else { Rational::zero() });
            }
            origin.push(kind);
            origin.len() - 1
        };
        for (i, rel) in relations.iter().enumerate() {
            unit_col[i] = match rel {
                Relation::Le => push_col(&mut rows, i, Rational::one(), Origin::Slack),
                Relation::Ge => {
                    push_col(&mut rows, i, -Rational::one(), Origin::Slack);
                    push_col(&mut rows, i, Rational::one(), Origin::Artificial)
                }
                Relation::Eq => push_col(&mut rows, i, Rational::one(), Origin::Artificial),
            };
        }
        Tableau {
            rows,
            rhs,
            basis: unit_col.clone(),
            origin,
            unit_col,
            flipped,
            pivots: 0,
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        matches!(self.origin[col], Origin::Artificial)
    }

    /// Reduced costs `c_j − c_B B⁻¹ A_j` and the current objective value.
    fn reduced_costs(&self, cost: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut d = cost.to_vec();
        let mut z = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            z += cb * &self.rhs[i];
            for (dj, a) in d.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *dj -= cb * a;
                }
            }
        }
        (d, z)
    }

    fn pivot(&mut self, r: usize, e: usize, d: &mut [Rational], z: &mut Rational) {
        let inv = self.rows[r][e].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let support: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        if !d[e].is_zero() {
            let f = d[e].clone();
            for &j in &support {
                d[j] -= &f * &pivot_row[j];
            }
            *z += &f * &pivot_rhs;
        }
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Runs simplex iterations on the given reduced costs. Returns false if unbounded.
    fn iterate(&mut self, d: &mut [Rational], z: &mut Rational, allow: &dyn Fn(usize) -> bool, rule: PivotRule) -> bool {
        let mut bland = rule == PivotRule::Bland;
        let mut degenerate_run = 0usize;
        let stall_limit = 50 + 2 * self.rows.len();
        loop {
            let entering = if bland {
                (0..d.len()).find(|&j| allow(j) && d[j].is_positive())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..d.len() {
                    if allow(j) && d[j].is_positive() && best.map_or(true, |b| d[j] > d[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(e) = entering else { return true };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return false };
            if ratio.is_zero() {
                degenerate_run += 1;
                if degenerate_run > stall_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, e, d, z);
        }
    }

    fn solve(mut self, lp: &LinearProgram, rule: PivotRule) -> Solution {
        let ncols = self.origin.len();
        let m = self.rows.len();
        let phase1: Vec<Rational> = (0..ncols)
            .map(|j| if self.is_artificial(j) { -Rational::one() } else { Rational::zero() })
            .collect();
        let (mut d, mut z) = self.reduced_costs(&phase1);
        let all = |_: usize| true;
        self.iterate(&mut d, &mut z, &all, rule);
        if z.is_negative() {
            return self.finish(lp, Status::Infeasible);
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..m {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            if let Some(e) = (0..ncols).find(|&j| !self.is_artificial(j) && !self.rows[i][j].is_zero()) {
                self.pivot(i, e, &mut d, &mut z);
            }
        }
        let mut cost = vec![Rational::zero(); ncols];
        for (col, o) in self.origin.iter().enumerate() {
            cost[col] = match *o {
                Origin::Shifted(j) | Origin::Positive(j) => lp.objective[j].clone(),
                Origin::Negative(j) => -lp.objective[j].clone(),
                _ => Rational::zero(),
            };
        }
        let (mut d, mut z) = self.reduced_costs(&cost);
        let artificial: Vec<bool> = (0..ncols).map(|j| self.is_artificial(j)).collect();
        let allow = |j: usize| !artificial[j];
        if !self.iterate(&mut d, &mut z, &allow, rule) {
            return self.finish(lp, Status::Unbounded);
        }
        let duals: Vec<Rational> = (0..m)
            .map(|i| {
                let y = -d[self.unit_col[i]].clone();
                if self.flipped[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        let mut sol = self.finish(lp, Status::Optimal);
        sol.duals = duals;
        sol
    }

    fn finish(self, lp: &LinearProgram, status: Status) -> Solution {
        if status != Status::Optimal {
            return Solution {
                status,
                objective: Rational::zero(),
                assignment: Vec::new(),
                basis: self.basis,
                duals: Vec::new(),
                pivots: self.pivots,
            };
        }
        let mut x: Vec<Rational> = lp
            .lower
            .iter()
            .map(|l| l.clone().unwrap_or_else(Rational::zero))
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            match self.origin[b] {
                Origin::Shifted(j) | Origin::Positive(j) => x[j] += &self.rhs[i],
                Origin::Negative(j) => x[j] -= &self.rhs[i],
                _ => {}
            }
        }
        let objective = lp.evaluate(&x);
        Solution {
            status,
            objective,
            assignment: x,
            basis: self.basis,
            duals: Vec::new(),
            pivots: self.pivots,
        }
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |j: usize, a: &Rational| format!("{a}*{}", self.labels[j]);
        let obj: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| term(j, c))
            .collect();
        writeln!(f, "maximize {}", obj.join(" + "))?;
        for row in &self.rows {
            let lhs: Vec<String> = row.coeffs.iter().map(|(j, a)| term(*j, a)).collect();
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            writeln!(f, "  {} {rel} {}", lhs.join(" + "), row.rhs)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn box_corner() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", one());
        let y = lp.add_var("y", one());
        lp.add_row(vec![(x, one()), (y, one())], Relation::Le, one());
        let sol = maximize(&lp);
        assert!(sol.is_optimal());
        assert_eq!(sol.objective, one());
    }

    #[test]
    fn exact_third() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", one());
        lp.add_row(vec![(x, int(3))], Relation::Eq, one());
        let sol = maximize(&lp);
        assert_eq!(sol.objective, rat(1, 3));
        assert_eq!(sol.duals, vec![rat(1, 3)]);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new();
        lp.add_var("x", one());
        assert_eq!(maximize(&lp).status, Status::Unbounded);
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", one());
        lp.add_row(vec![(x, one())], Relation::Le, int(-1));
        assert_eq!(maximize(&lp).status, Status::Infeasible);
    }

    #[test]
    fn free_and_shifted_variables() {
        // max -x - y with x free, x >= -3 as a row, y >= 2 as a bound.
        let mut lp = LinearProgram::new();
        let x = lp.add_free_var("x", -one());
        let y = lp.add_var("y", -one());
        lp.set_lower(y, Some(int(2)));
        lp.add_row(vec![(x, one())], Relation::Ge, int(-3));
        let sol = maximize(&lp);
        assert_eq!(sol.assignment, vec![int(-3), int(2)]);
        assert_eq!(sol.objective, int(1));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", one());
        let y = lp.add_var("y", int(2));
        lp.add_row(vec![(x, one()), (y, one())], Relation::Eq, int(4));
        lp.add_row(vec![(x, int(2)), (y, int(2))], Relation::Eq, int(8));
        lp.add_row(vec![(y, one())], Relation::Le, int(1));
        let sol = maximize(&lp);
        assert_eq!(sol.objective, int(5));
    }

    #[test]
    fn min_of_pieces() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", Rational::zero());
        lp.add_row(vec![(x, one())], Relation::Le, one());
        let pieces = [
            Affine { coeffs: vec![(x, one())], constant: Rational::zero() },
            Affine { coeffs: vec![(x, -one())], constant: one() },
        ];
        let sol = maximize_min(&lp, &pieces);
        assert_eq!(sol.objective, rat(1, 2));
        assert_eq!(sol.assignment[x], rat(1, 2));

        let pieces = [
            Affine { coeffs: vec![(x, rat(1, 3))], constant: Rational::zero() },
            Affine { coeffs: vec![], constant: rat(1, 5) },
            Affine { coeffs: vec![(x, -one())], constant: one() },
        ];
        assert_eq!(maximize_min(&lp, &pieces).objective, rat(1, 5));
    }

    #[test]
    fn single_piece_matches_maximize() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", Rational::zero());
        lp.add_row(vec![(x, int(2))], Relation::Le, int(3));
        let piece = Affine { coeffs: vec![(x, one())], constant: int(1) };
        let mut plain = lp.clone();
        plain.set_objective(x, one());
        assert_eq!(maximize_min(&lp, &[piece]).objective, maximize(&plain).objective + int(1));
    }

    #[test]
    fn dantzig_agrees_with_bland() {
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = (0..4).map(|i| lp.add_var(format!("x{i}"), int(i as i64 + 1))).collect();
        lp.add_row(v.iter().map(|&j| (j, one())).collect(), Relation::Le, int(10));
        lp.add_row(vec![(v[3], int(2)), (v[2], one())], Relation::Le, int(7));
        lp.add_row(vec![(v[0], one()), (v[3], -one())], Relation::Ge, int(-1));
        let a = maximize_with(&lp, PivotRule::Bland);
        let b = maximize_with(&lp, PivotRule::Dantzig);
        assert_eq!(a.objective, b.objective);
        let again = maximize_with(&lp, PivotRule::Bland);
        assert_eq!(a.assignment, again.assignment);
        assert_eq!(a.basis, again.basis);
    }
}
