//! The master linear program and scl with a checkable witness.
//!
//! For an integral chain with arcs `T` and coordinates `T₂`, scl is
//! `−max χ / 2N` over per-factor vectors `v = Σ t_d·d + r` (`d` disk vectors,
//! `r` in the cone) whose paired coordinates agree and whose arc degrees
//! equal the word multiplicities, with `χ = Σ_factors (Σ t_d − |v|/2)`.
//! When three or more factors occur, pairing is replaced by junction polygons
//! (see [`crate::junction`]): each genuine coordinate is the weighted count of
//! polygon sides on it, and each polygon adds `1 − m/2` to χ. Polygons are
//! priced like disks, after a slack-penalized phase has found a feasible set.
//!
//! Disk columns come either from exhaustive enumeration in the disk box or,
//! by default, from column generation: at an optimal restricted master the
//! duals price every disk, and the cheapest one is found by the walk search
//! in [`crate::pricing`]. Any disk that can improve the optimum prices below
//! one, and the walk search is exhaustive over the minimal disks in the box,
//! so both strategies reach the same optimum.

use crate::arcs::{build_arcs, ArcError, ArcStructure, CoordRef};
use crate::chain::{homology_class, normalize_chain, scale_to_integral, Chain, ChainError, GroupSpec};
use crate::cone::{build_cone_system, disk_box, extremal_rays, ConeSystem};
use crate::junction::{check_polygon, PolygonGraph};
use crate::lp::{maximize_with, LinearProgram, PivotRule, Relation, Status};
use crate::pricing::{cheap_disks, partial_sum_bounds, PricingError};
use crate::rational::{pq, Rational};
use crate::sails::{check_disk, enumerate_disk_vectors, DiskVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("chain is not a boundary")]
    NotBoundary,
    #[error("empty chain")]
    EmptyChain,
    #[error("master LP is {0}")]
    Lp(&'static str),
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

impl From<ArcError> for EngineError {
    fn from(e: ArcError) -> Self {
        match e {
            ArcError::NotBoundary => EngineError::NotBoundary,
            ArcError::EmptyChain => EngineError::EmptyChain,
            ArcError::NotIntegral => unreachable!("chains are scaled before arcs are built"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiskStrategy {
    #[default]
    ColumnGeneration,
    Enumerate,
}

#[derive(Clone, Debug)]
pub struct SclOptions {
    pub strategy: DiskStrategy,
    /// Multiplies the disk box (2 doubles it).
    pub box_scale: i64,
    pub pivot: PivotRule,
    /// Cap on search states per pricing call.
    pub state_budget: Option<usize>,
}

impl Default for SclOptions {
    fn default() -> Self {
        SclOptions { strategy: DiskStrategy::ColumnGeneration, box_scale: 1, pivot: PivotRule::Bland, state_budget: None }
    }
}

/// Everything the master LP needs about an integral boundary chain.
#[derive(Clone, Debug)]
pub struct SclProblem {
    pub spec: GroupSpec,
    pub chain: Chain,
    pub scaling: BigInt,
    pub arcs: ArcStructure,
    pub cones: Vec<ConeSystem>,
    pub boxes: Vec<Vec<i64>>,
    /// Side graph of the junction polygons, present when three or more factors occur.
    pub polygons: Option<PolygonGraph>,
}

impl SclProblem {
    pub fn new(chain: &Chain, spec: &GroupSpec, box_scale: i64) -> Result<SclProblem, EngineError> {
        let normalized = normalize_chain(chain);
        if normalized.is_empty() {
            return Err(EngineError::EmptyChain);
        }
        if !homology_class(&normalized, spec).is_boundary() {
            return Err(EngineError::NotBoundary);
        }
        let (integral, scaling) = scale_to_integral(&normalized);
        let arcs = build_arcs(&integral, spec)?;
        let cones: Vec<ConeSystem> = (0..spec.num_factors()).map(|f| build_cone_system(&arcs, f)).collect();
        let boxes = cones
            .iter()
            .map(|c| disk_box(c, &extremal_rays(c)).into_iter().map(|x| x * box_scale).collect())
            .collect();
        let polygons = arcs.junctions.then(|| PolygonGraph::new(&arcs));
        Ok(SclProblem { spec: spec.clone(), chain: integral, scaling, arcs, cones, boxes, polygons })
    }
}

/// A row of the master LP written over the `v` coordinates.
#[derive(Clone, Debug)]
struct VRow {
    row: usize,
    coeffs: Vec<(CoordRef, Rational)>,
}

/// The assembled master LP and where each piece lives in it.
#[derive(Clone, Debug)]
pub struct MasterLp {
    pub lp: LinearProgram,
    /// `t` variables per factor, parallel to the disk lists.
    pub t_vars: Vec<Vec<usize>>,
    /// Remainder variables per factor and coordinate.
    pub r_vars: Vec<Vec<usize>>,
    /// Cone rows (`∂` then `h`) per factor.
    pub cone_rows: Vec<Vec<usize>>,
    /// Junction polygon variables, parallel to the polygon list.
    pub p_vars: Vec<usize>,
    /// Gluing rows per polygon graph node (junction chains only).
    pub glue_rows: Vec<usize>,
    vrows: Vec<VRow>,
}

fn q(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn half() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(2))
}

/// χ contribution of a junction polygon with `m` sides.
fn polygon_chi(m: usize) -> Rational {
    Rational::one() - half() * q(m as i64)
}

/// Builds the master LP for the given disk columns.
pub fn build_master_lp(problem: &SclProblem, disks: &[Vec<DiskVector>]) -> MasterLp {
    build_master(problem, disks, &[], false)
}

/// The master LP with junction polygons. In the feasibility phase every
/// objective is zero and each gluing row gets two slacks costing one.
fn build_master(problem: &SclProblem, disks: &[Vec<DiskVector>], polygons: &[Vec<usize>], feasibility: bool) -> MasterLp {
    let arcs = &problem.arcs;
    let cost = |c: Rational| if feasibility { Rational::zero() } else { c };
    let mut lp = LinearProgram::new();
    let mut t_vars = Vec::new();
    let mut r_vars = Vec::new();
    for (f, cone) in problem.cones.iter().enumerate() {
        let ts: Vec<usize> = disks[f]
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let norm: i64 = (0..cone.dim()).filter(|&j| cone.is_genuine(j)).map(|j| d.v[j]).sum();
                lp.add_var(format!("t{f}_{i}"), cost(Rational::one() - half() * q(norm)))
            })
            .collect();
        t_vars.push(ts);
        let rs: Vec<usize> = (0..cone.dim())
            .map(|j| {
                let c = if cone.is_genuine(j) { -half() } else { Rational::zero() };
                lp.add_var(format!("r{f}_{j}"), cost(c))
            })
            .collect();
        r_vars.push(rs);
    }
    let p_vars: Vec<usize> =
        polygons.iter().enumerate().map(|(k, p)| lp.add_var(format!("p{k}"), cost(polygon_chi(p.len())))).collect();
    let mut cone_rows = Vec::new();
    for (f, cone) in problem.cones.iter().enumerate() {
        let rows: Vec<usize> = cone
            .rational_rows()
            .into_iter()
            .map(|row| {
                let coeffs = row.into_iter().enumerate().map(|(j, a)| (r_vars[f][j], a)).collect();
                lp.add_row(coeffs, Relation::Eq, Rational::zero())
            })
            .collect();
        cone_rows.push(rows);
    }
    // Rows over v, expanded through v = Σ t_d·d + r, plus any extra columns.
    let mut vrows = Vec::new();
    let mut push = |lp: &mut LinearProgram, coeffs: Vec<(CoordRef, Rational)>, extra: Vec<(usize, Rational)>, rhs: Rational| {
        let mut expanded = extra;
        for (c, a) in &coeffs {
            expanded.push((r_vars[c.factor][c.index], a.clone()));
            for (d, &t) in disks[c.factor].iter().zip(&t_vars[c.factor]) {
                if d.v[c.index] != 0 {
                    expanded.push((t, a * q(d.v[c.index])));
                }
            }
        }
        let row = lp.add_row(expanded, Relation::Eq, rhs);
        vrows.push(VRow { row, coeffs });
        row
    };
    let mut glue_rows = Vec::new();
    if let Some(graph) = &problem.polygons {
        for (i, &c) in graph.nodes.iter().enumerate() {
            let mut extra: Vec<(usize, Rational)> = polygons
                .iter()
                .zip(&p_vars)
                .filter(|(p, _)| p.contains(&i))
                .map(|(_, &x)| (x, -Rational::one()))
                .collect();
            if feasibility {
                extra.push((lp.add_var(format!("e+{i}"), -Rational::one()), Rational::one()));
                extra.push((lp.add_var(format!("e-{i}"), -Rational::one()), -Rational::one()));
            }
            glue_rows.push(push(&mut lp, vec![(c, Rational::one())], extra, Rational::zero()));
        }
    } else {
        for (c, x) in arcs.all_coords() {
            if !x.is_genuine() {
                continue;
            }
            match x.partner {
                Some(p) if c < p => {
                    push(&mut lp, vec![(c, Rational::one()), (p, -Rational::one())], vec![], Rational::zero());
                }
                Some(_) => {}
                None => {
                    push(&mut lp, vec![(c, Rational::one())], vec![], Rational::zero());
                }
            }
        }
    }
    for fa in &arcs.factors {
        for &tau in &fa.taus {
            let degree = Rational::from_integer(arcs.degree(tau).clone());
            let mut out = Vec::new();
            let mut inn = Vec::new();
            for (index, x) in fa.coords.iter().enumerate() {
                let c = CoordRef { factor: fa.factor, index };
                if x.tau == tau {
                    out.push((c, Rational::one()));
                }
                if x.tau_prime == tau {
                    inn.push((c, Rational::one()));
                }
            }
            push(&mut lp, out, vec![], degree.clone());
            push(&mut lp, inn, vec![], degree);
        }
    }
    MasterLp { lp, t_vars, r_vars, cone_rows, p_vars, glue_rows, vrows }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionTerm {
    #[serde(with = "pq")]
    pub t: Rational,
    #[serde(with = "pq::vec")]
    pub disk: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorWitness {
    #[serde(with = "pq")]
    pub kappa: Rational,
    #[serde(with = "pq")]
    pub norm: Rational,
    #[serde(with = "pq::vec")]
    pub v: Vec<Rational>,
    pub expression: Vec<ExpressionTerm>,
    #[serde(with = "pq::vec")]
    pub remainder: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonTerm {
    #[serde(with = "pq")]
    pub weight: Rational,
    pub sides: Vec<CoordRef>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SclStats {
    pub rounds: usize,
    pub disks: Vec<usize>,
    pub pivots: usize,
    pub polygons: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SclResult {
    #[serde(with = "pq")]
    pub value: Rational,
    #[serde(with = "pq")]
    pub scaling: Rational,
    #[serde(with = "pq")]
    pub chi: Rational,
    pub factors: Vec<FactorWitness>,
    /// Junction polygons with their weights; empty for two factors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polygons: Vec<PolygonTerm>,
    #[serde(skip)]
    pub stats: SclStats,
}

impl SclResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(text: &str) -> Result<SclResult, serde_json::Error> {
        serde_json::from_str(text)
    }
}

pub fn scl(chain: &Chain, spec: &GroupSpec) -> Result<SclResult, EngineError> {
    scl_with(chain, spec, &SclOptions::default())
}

pub fn scl_with(chain: &Chain, spec: &GroupSpec, opts: &SclOptions) -> Result<SclResult, EngineError> {
    let problem = SclProblem::new(chain, spec, opts.box_scale)?;
    solve(&problem, opts)
}

/// Parses and computes in one step; `group = None` means the free group on the letters.
pub fn scl_of(text: &str, group: Option<&str>) -> Result<SclResult, EngineError> {
    let (spec, chain) = crate::chain::parse_with_group(text, group)?;
    scl(&chain, &spec)
}

pub fn solve(problem: &SclProblem, opts: &SclOptions) -> Result<SclResult, EngineError> {
    let nf = problem.cones.len();
    let mut disks: Vec<Vec<DiskVector>> = match opts.strategy {
        DiskStrategy::Enumerate => problem
            .cones
            .iter()
            .zip(&problem.boxes)
            .map(|(c, b)| enumerate_disk_vectors(c, b).disks)
            .collect(),
        DiskStrategy::ColumnGeneration => vec![Vec::new(); nf],
    };
    let mut known: Vec<BTreeSet<Vec<i64>>> = disks.iter().map(|ds| ds.iter().map(|d| d.v.clone()).collect()).collect();
    let sum_bounds: Vec<Vec<i64>> = problem
        .cones
        .iter()
        .zip(&problem.boxes)
        .map(|(c, b)| partial_sum_bounds(c, b))
        .collect();
    let mut stats = SclStats::default();
    let mut polygons = match &problem.polygons {
        Some(graph) => feasible_polygons(problem, graph, opts.pivot, &mut stats)?,
        None => Vec::new(),
    };
    let mut known_polygons: BTreeSet<Vec<usize>> = polygons.iter().cloned().collect();
    loop {
        stats.rounds += 1;
        let master = build_master(problem, &disks, &polygons, false);
        let sol = maximize_with(&master.lp, opts.pivot);
        stats.pivots += sol.pivots;
        match sol.status {
            Status::Optimal => {}
            Status::Infeasible => return Err(EngineError::Lp("infeasible")),
            Status::Unbounded => return Err(EngineError::Lp("unbounded")),
        }
        let mut added = false;
        if opts.strategy == DiskStrategy::ColumnGeneration {
            let costs = pricing_costs(problem, &master, &sol.duals);
            for f in 0..nf {
                let found = cheap_disks(&problem.cones[f], &costs[f], &sum_bounds[f], &Rational::one(), opts.state_budget)?;
                for p in found {
                    if known[f].insert(p.v.clone()) {
                        disks[f].push(DiskVector { factor: f, v: p.v });
                        added = true;
                    }
                }
            }
        }
        if let Some(graph) = &problem.polygons {
            let weight: Vec<Rational> = master.glue_rows.iter().map(|&r| half() - &sol.duals[r]).collect();
            for p in graph.cheap_cycles(&weight, &Rational::one()) {
                if known_polygons.insert(p.clone()) {
                    polygons.push(p);
                    added = true;
                }
            }
        }
        if !added {
            stats.disks = disks.iter().map(|d| d.len()).collect();
            stats.polygons = polygons.len();
            return Ok(witness(problem, &master, &disks, &polygons, &sol.assignment, stats));
        }
    }
}

/// Junction polygons that make the master feasible, found by pricing against
/// the duals of the slack-penalized LP. A polygon improves it iff the dual
/// weights on its sides sum to a negative number.
fn feasible_polygons(
    problem: &SclProblem,
    graph: &PolygonGraph,
    pivot: PivotRule,
    stats: &mut SclStats,
) -> Result<Vec<Vec<usize>>, EngineError> {
    let none = vec![Vec::new(); problem.cones.len()];
    let mut polygons: Vec<Vec<usize>> = Vec::new();
    loop {
        stats.rounds += 1;
        let master = build_master(problem, &none, &polygons, true);
        let sol = maximize_with(&master.lp, pivot);
        stats.pivots += sol.pivots;
        if sol.status != Status::Optimal {
            return Err(EngineError::Lp("infeasible"));
        }
        if sol.objective.is_zero() {
            return Ok(polygons);
        }
        let weight: Vec<Rational> = master.glue_rows.iter().map(|&r| -&sol.duals[r]).collect();
        let found: Vec<Vec<usize>> =
            graph.cheap_cycles(&weight, &Rational::zero()).into_iter().filter(|p| !polygons.contains(p)).collect();
        if found.is_empty() {
            return Err(EngineError::Lp("infeasible"));
        }
        polygons.extend(found);
    }
}

/// Reduced-cost weights `c'` per factor and coordinate: a disk `d` improves
/// the master iff `c'·d < 1`. Nonnegative at an optimal master.
fn pricing_costs(problem: &SclProblem, master: &MasterLp, duals: &[Rational]) -> Vec<Vec<Rational>> {
    let mut costs: Vec<Vec<Rational>> = problem
        .cones
        .iter()
        .map(|c| (0..c.dim()).map(|j| if c.is_genuine(j) { half() } else { Rational::zero() }).collect())
        .collect();
    for vr in &master.vrows {
        let y = &duals[vr.row];
        if y.is_zero() {
            continue;
        }
        for (c, a) in &vr.coeffs {
            costs[c.factor][c.index] += y * a;
        }
    }
    for (f, cone) in problem.cones.iter().enumerate() {
        for (row, coeffs) in master.cone_rows[f].iter().zip(cone.rational_rows()) {
            let mu = &duals[*row];
            if mu.is_zero() {
                continue;
            }
            for (j, a) in coeffs.iter().enumerate() {
                costs[f][j] += mu * a;
            }
        }
    }
    costs
}

fn witness(
    problem: &SclProblem,
    master: &MasterLp,
    disks: &[Vec<DiskVector>],
    polygons: &[Vec<usize>],
    x: &[Rational],
    stats: SclStats,
) -> SclResult {
    let mut factors = Vec::new();
    let mut chi = Rational::zero();
    for (f, cone) in problem.cones.iter().enumerate() {
        let remainder: Vec<Rational> = master.r_vars[f].iter().map(|&r| x[r].clone()).collect();
        let mut v = remainder.clone();
        let mut expression = Vec::new();
        let mut kappa = Rational::zero();
        for (d, &t) in disks[f].iter().zip(&master.t_vars[f]) {
            let w = &x[t];
            if !w.is_positive() {
                continue;
            }
            for (vj, &dj) in v.iter_mut().zip(&d.v) {
                *vj += w * q(dj);
            }
            kappa += w;
            expression.push(ExpressionTerm { t: w.clone(), disk: d.v.iter().map(|&z| q(z)).collect() });
        }
        let norm = cone.genuine_norm(&v);
        chi += &kappa - &norm * half();
        factors.push(FactorWitness { kappa, norm, v, expression, remainder });
    }
    let mut terms = Vec::new();
    if let Some(graph) = &problem.polygons {
        for (p, &var) in polygons.iter().zip(&master.p_vars) {
            if x[var].is_positive() {
                chi += &x[var] * polygon_chi(p.len());
                terms.push(PolygonTerm { weight: x[var].clone(), sides: graph.sides(p) });
            }
        }
    }
    let scaling = Rational::from_integer(problem.scaling.clone());
    let value = -&chi / (q(2) * &scaling);
    SclResult { value, scaling, chi, factors, polygons: terms, stats }
}

/// Outcome of an independent witness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub problems: Vec<String>,
}

impl WitnessReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.problems.iter().any(|p| p.contains(needle))
    }
}

/// Re-derives every constraint and the objective from the chain and the
/// witness alone, without solving anything.
pub fn verify_witness(chain: &Chain, spec: &GroupSpec, result: &SclResult) -> WitnessReport {
    let mut problems = Vec::new();
    let report = |problems: Vec<String>| WitnessReport { problems };
    let normalized = normalize_chain(chain);
    let (integral, n) = scale_to_integral(&normalized);
    let arcs = match build_arcs(&integral, spec) {
        Ok(a) => a,
        Err(e) => return report(vec![format!("chain rejected: {e}")]),
    };
    if result.scaling != Rational::from_integer(n.clone()) {
        problems.push(format!("scaling mismatch: expected {n}"));
    }
    if result.factors.len() != arcs.factors.len() {
        problems.push("factor count mismatch".into());
        return report(problems);
    }
    for (f, (fa, w)) in arcs.factors.iter().zip(&result.factors).enumerate() {
        let dim = fa.coords.len();
        if w.v.len() != dim || w.remainder.len() != dim || w.expression.iter().any(|e| e.disk.len() != dim) {
            problems.push(format!("factor {f}: dimension mismatch"));
            return report(problems);
        }
    }
    let balanced = |f: usize, v: &[Rational]| -> bool {
        let fa = &arcs.factors[f];
        let rank = arcs.taus[fa.taus[0]].element.len();
        for &tau in &fa.taus {
            let mut net = Rational::zero();
            for (x, c) in v.iter().zip(&fa.coords) {
                if c.tau == tau {
                    net += x;
                }
                if c.tau_prime == tau {
                    net -= x;
                }
            }
            if !net.is_zero() {
                return false;
            }
        }
        (0..rank).all(|k| {
            v.iter()
                .zip(&fa.coords)
                .fold(Rational::zero(), |acc, (x, c)| {
                    acc + x * q(arcs.taus[c.tau].element[k] + arcs.taus[c.tau_prime].element[k])
                })
                .is_zero()
        })
    };
    let mut chi = Rational::zero();
    for (f, (fa, w)) in arcs.factors.iter().zip(&result.factors).enumerate() {
        let cone = build_cone_system(&arcs, f);
        let mut sum = w.remainder.clone();
        let mut kappa = Rational::zero();
        for (i, e) in w.expression.iter().enumerate() {
            if e.t.is_negative() {
                problems.push(format!("factor {f}: negative weight on disk {i}"));
            }
            let ints: Option<Vec<i64>> = e
                .disk
                .iter()
                .map(|z| if z.is_integer() { z.to_integer().to_i64() } else { None })
                .collect();
            match ints {
                Some(d) => {
                    if let Err(why) = check_disk(&cone, &d) {
                        problems.push(format!("factor {f}: disk violation on disk {i}: {why}"));
                    }
                    if !balanced(f, &e.disk) {
                        problems.push(format!("factor {f}: disk violation on disk {i}: unbalanced"));
                    }
                }
                None => problems.push(format!("factor {f}: disk violation on disk {i}: not integral")),
            }
            for (s, z) in sum.iter_mut().zip(&e.disk) {
                *s += &e.t * z;
            }
            kappa += &e.t;
        }
        if w.remainder.iter().any(|r| r.is_negative()) || !balanced(f, &w.remainder) {
            problems.push(format!("factor {f}: cone violation in the remainder"));
        }
        if sum != w.v {
            problems.push(format!("factor {f}: decomposition mismatch"));
        }
        let norm = w
            .v
            .iter()
            .zip(&fa.coords)
            .filter(|(_, c)| c.is_genuine())
            .fold(Rational::zero(), |acc, (x, _)| acc + x);
        if kappa != w.kappa || norm != w.norm {
            problems.push(format!("factor {f}: objective mismatch in kappa or norm"));
        }
        chi += &kappa - norm * half();
        for &tau in &fa.taus {
            let degree = Rational::from_integer(arcs.degree(tau).clone());
            let out = fa.coords.iter().zip(&w.v).filter(|(c, _)| c.tau == tau).fold(Rational::zero(), |a, (_, x)| a + x);
            let inn = fa.coords.iter().zip(&w.v).filter(|(c, _)| c.tau_prime == tau).fold(Rational::zero(), |a, (_, x)| a + x);
            if out != degree || inn != degree {
                problems.push(format!("factor {f}: degree violation at arc τ{}", arcs.taus[tau].local));
            }
        }
    }
    if arcs.junctions {
        let mut glued: HashMap<CoordRef, Rational> = HashMap::new();
        for (k, p) in result.polygons.iter().enumerate() {
            if let Err(why) = check_polygon(&arcs, &p.sides) {
                problems.push(format!("gluing violation: polygon {k}: {why}"));
                continue;
            }
            if p.weight.is_negative() {
                problems.push(format!("gluing violation: polygon {k} has negative weight"));
            }
            for &c in &p.sides {
                *glued.entry(c).or_insert_with(Rational::zero) += &p.weight;
            }
            chi += &p.weight * polygon_chi(p.sides.len());
        }
        for (c, x) in arcs.all_coords().filter(|(_, x)| x.is_genuine()) {
            let here = &result.factors[c.factor].v[c.index];
            if glued.get(&c).map_or(!here.is_zero(), |g| g != here) {
                problems.push(format!("gluing violation: {} is not covered by its polygons", arcs.label(c)));
            }
            if x.forced_zero && !here.is_zero() {
                problems.push(format!("gluing violation: {} must vanish", arcs.label(c)));
            }
        }
    } else {
        if !result.polygons.is_empty() {
            problems.push("gluing violation: polygons given for a two-factor chain".into());
        }
        for (c, x) in arcs.all_coords() {
            let here = &result.factors[c.factor].v[c.index];
            if x.forced_zero && !here.is_zero() {
                problems.push(format!("gluing violation: {} must vanish", arcs.label(c)));
            }
            if let Some(p) = x.partner {
                if here != &result.factors[p.factor].v[p.index] {
                    problems.push(format!("gluing violation: {} and its partner differ", arcs.label(c)));
                }
            }
        }
    }
    if chi != result.chi || result.value != -&chi / (q(2) * Rational::from_integer(n)) {
        problems.push("objective mismatch in chi or value".into());
    }
    report(problems)
}
