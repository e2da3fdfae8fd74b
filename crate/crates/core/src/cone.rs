//! The cone `V = {v ≥ 0 : ∂v = 0, hv = 0}` of one factor, its extremal rays,
//! and support graphs of vectors in it.

use crate::arcs::{ArcStructure, CoordKind, CoordRef};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Constraint system of one factor, in factor-local indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSystem {
    pub factor: usize,
    /// `(tau, tau_prime)` as local arc indices (0-based).
    pub coords: Vec<(usize, usize)>,
    pub kinds: Vec<CoordKind>,
    pub labels: Vec<String>,
    /// Element of each local arc.
    pub elements: Vec<Vec<i64>>,
    /// Rows indexed by local arcs; column of `(τ,τ′)` is `e_τ − e_τ′`.
    pub boundary: Vec<Vec<i64>>,
    /// Rows indexed by generators; column of `(τ,τ′)` is `(elem τ + elem τ′)/2`.
    pub homology: Vec<Vec<Rational>>,
}

pub fn build_cone_system(arcs: &ArcStructure, factor: usize) -> ConeSystem {
    let fa = &arcs.factors[factor];
    let local: BTreeMap<usize, usize> = fa.taus.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let coords: Vec<(usize, usize)> = fa.coords.iter().map(|c| (local[&c.tau], local[&c.tau_prime])).collect();
    let elements: Vec<Vec<i64>> = fa.taus.iter().map(|&t| arcs.taus[t].element.clone()).collect();
    let rank = elements.first().map_or(0, |e| e.len());
    let n = coords.len();
    let mut boundary = vec![vec![0i64; n]; fa.taus.len()];
    let mut homology = vec![vec![Rational::zero(); n]; rank];
    for (j, &(t, u)) in coords.iter().enumerate() {
        boundary[t][j] += 1;
        boundary[u][j] -= 1;
        for (k, row) in homology.iter_mut().enumerate() {
            row[j] = Rational::new(BigInt::from(elements[t][k] + elements[u][k]), BigInt::from(2));
        }
    }
    ConeSystem {
        factor,
        coords,
        kinds: fa.coords.iter().map(|c| c.kind).collect(),
        labels: arcs.labels(factor),
        elements,
        boundary,
        homology,
    }
}

impl ConeSystem {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_genuine(&self, j: usize) -> bool {
        self.kinds[j] == CoordKind::Genuine
    }

    pub fn coord_ref(&self, j: usize) -> CoordRef {
        CoordRef { factor: self.factor, index: j }
    }

    /// All equality rows scaled to integers (`∂` rows, then `2h` rows).
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> = self
            .boundary
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        for r in &self.homology {
            rows.push(r.iter().map(|q| (q * BigInt::from(2)).to_integer()).collect());
        }
        rows
    }

    /// All equality rows as rationals (`∂` rows, then `h` rows).
    pub fn rational_rows(&self) -> Vec<Vec<Rational>> {
        let mut rows: Vec<Vec<Rational>> = self
            .boundary
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
            .collect();
        rows.extend(self.homology.iter().cloned());
        rows
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        v.len() == self.dim()
            && v.iter().all(|x| !x.is_negative())
            && self
                .rational_rows()
                .iter()
                .all(|r| r.iter().zip(v).fold(Rational::zero(), |acc, (a, x)| acc + a * x).is_zero())
    }

    pub fn contains_int(&self, v: &[i64]) -> bool {
        let q: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
        self.contains(&q)
    }

    /// Sum over genuine coordinates.
    pub fn genuine_norm(&self, v: &[Rational]) -> Rational {
        v.iter()
            .enumerate()
            .filter(|(j, _)| self.is_genuine(*j))
            .fold(Rational::zero(), |acc, (_, x)| acc + x)
    }
}

#[derive(Clone)]
struct Ray {
    v: Vec<BigInt>,
    zeros: Vec<u64>,
}

fn zero_set(v: &[BigInt]) -> Vec<u64> {
    let mut bits = vec![0u64; v.len().div_ceil(64)];
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    bits
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && g != BigInt::from(1) {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

/// Extremal rays of a pointed cone `{x ≥ 0 : A x = 0}` by double description,
/// as primitive integer vectors in lexicographic order.
pub fn extremal_rays_of(n: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rays: Vec<Ray> = (0..n)
        .map(|i| {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::from(1);
            Ray { zeros: zero_set(&v), v }
        })
        .collect();
    for row in rows {
        let values: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        if values.iter().all(|x| x.is_zero()) {
            continue;
        }
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for (i, x) in values.iter().enumerate() {
            if x.is_positive() {
                pos.push(i);
            } else if x.is_negative() {
                neg.push(i);
            } else {
                next.push(rays[i].clone());
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p].zeros.iter().zip(&rays[q].zeros).map(|(a, b)| a & b).collect();
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !subset(&common, &r.zeros));
                if !adjacent {
                    continue;
                }
                let v: Vec<BigInt> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[q].v)
                    .map(|(a, b)| a * -&values[q] + b * &values[p])
                    .collect();
                let v = primitive(v);
                next.push(Ray { zeros: zero_set(&v), v });
            }
        }
        rays = next;
    }
    let set: BTreeSet<Vec<BigInt>> = rays.into_iter().map(|r| primitive(r.v)).collect();
    set.into_iter().collect()
}

pub fn extremal_rays(cone: &ConeSystem) -> Vec<Vec<BigInt>> {
    extremal_rays_of(cone.dim(), &cone.integer_rows())
}

/// Componentwise sum of the rays (the fundamental-zonotope bound).
pub fn disk_box(cone: &ConeSystem, rays: &[Vec<BigInt>]) -> Vec<i64> {
    let mut b = vec![BigInt::zero(); cone.dim()];
    for r in rays {
        for (x, y) in b.iter_mut().zip(r) {
            *x += y;
        }
    }
    b.iter().map(|x| x.to_i64().expect("disk box entry fits in i64")).collect()
}

/// Directed multigraph on the arcs of a factor with one weighted edge per
/// positive coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize, Rational)>,
}

pub fn support_graph(cone: &ConeSystem, v: &[Rational]) -> SupportGraph {
    let mut vertices = BTreeSet::new();
    let mut edges = Vec::new();
    for (j, x) in v.iter().enumerate() {
        if x.is_positive() {
            let (t, u) = cone.coords[j];
            vertices.insert(t);
            vertices.insert(u);
            edges.push((t, u, x.clone()));
        }
    }
    SupportGraph { vertices: vertices.into_iter().collect(), edges }
}

pub fn support_graph_int(cone: &ConeSystem, v: &[i64]) -> SupportGraph {
    let q: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
    support_graph(cone, &q)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} has unequal in- and out-degree")]
    Imbalanced(usize),
    #[error("edge weight {0} is not a positive integer")]
    NonIntegral(String),
}

impl SupportGraph {
    fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let p = parent[&x];
        if p == x {
            return x;
        }
        let r = Self::find(parent, p);
        parent.insert(x, r);
        r
    }

    /// Weakly connected components, each as a sorted vertex list.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: BTreeMap<usize, usize> = self.vertices.iter().map(|&v| (v, v)).collect();
        for (a, b, _) in &self.edges {
            let (ra, rb) = (Self::find(&mut parent, *a), Self::find(&mut parent, *b));
            if ra != rb {
                parent.insert(ra.max(rb), ra.min(rb));
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &self.vertices {
            let r = Self::find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    fn reach(&self, from: usize, forward: bool) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([from]);
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for (a, b, _) in &self.edges {
                let (s, t) = if forward { (*a, *b) } else { (*b, *a) };
                if s == x && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// True iff every weak component is strongly connected.
    pub fn is_recurrent(&self) -> bool {
        self.components().iter().all(|comp| {
            let root = comp[0];
            let f = self.reach(root, true);
            let b = self.reach(root, false);
            comp.iter().all(|v| f.contains(v) && b.contains(v))
        })
    }

    /// One closed circuit per component using each edge as often as its weight.
    pub fn eulerian_circuits(&self) -> Result<Vec<Vec<usize>>, GraphError> {
        let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut balance: BTreeMap<usize, i64> = BTreeMap::new();
        for (a, b, w) in &self.edges {
            if !w.is_integer() || !w.is_positive() {
                return Err(GraphError::NonIntegral(w.to_string()));
            }
            let k = w.to_integer().to_i64().ok_or_else(|| GraphError::NonIntegral(w.to_string()))?;
            for _ in 0..k {
                out_edges.entry(*a).or_default().push(*b);
            }
            *balance.entry(*a).or_default() += k;
            *balance.entry(*b).or_default() -= k;
        }
        if let Some((&v, _)) = balance.iter().find(|(_, &d)| d != 0) {
            return Err(GraphError::Imbalanced(v));
        }
        for list in out_edges.values_mut() {
            list.reverse();
        }
        let mut circuits = Vec::new();
        for comp in self.components() {
            let start = comp[0];
            let mut stack = vec![start];
            let mut circuit = Vec::new();
            while let Some(&x) = stack.last() {
                match out_edges.get_mut(&x).and_then(|l| l.pop()) {
                    Some(y) => stack.push(y),
                    None => circuit.push(stack.pop().unwrap()),
                }
            }
            circuit.reverse();
            circuit.pop();
            circuits.push(circuit);
        }
        Ok(circuits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::build_arcs;
    use crate::chain::{parse_chain, parse_group_spec};
    use crate::rational::int;

    pub(crate) fn w_cone(a1: i64, a2: i64) -> ConeSystem {
        let g = parse_group_spec("Z(a) * Z(b)").unwrap();
        let text = format!("a^{} + b^-2 + a^{a1} b^3 + a^{a2} b^-1", -a1 - a2);
        let arcs = build_arcs(&parse_chain(&text, &g).unwrap(), &g).unwrap();
        build_cone_system(&arcs, 0)
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn boundary_forces_v3_eq_v4() {
        let cone = w_cone(5, -2);
        // Coordinates (1,1),(2,2),(2,3),(3,2),(3,3).
        assert_eq!(cone.boundary[1], vec![0, 0, 1, -1, 0]);
        assert_eq!(cone.homology[0][0], int(-3));
        assert!(cone.contains_int(&[0, 1, 1, 1, 4]));
        assert!(!cone.contains_int(&[0, 1, 1, 0, 4]));
    }

    #[test]
    fn rays_at_five_minus_two() {
        let cone = w_cone(5, -2);
        let rays = extremal_rays(&cone);
        // Reduced coordinates (v1,v2,v3,v5) with v4 = v3.
        let expected = [[0, 2, 0, 5], [0, 0, 2, 3], [1, 0, 1, 0], [5, 3, 0, 0]];
        let mut got: Vec<[i64; 4]> = rays
            .iter()
            .map(|r| {
                assert_eq!(r[2], r[3]);
                [0, 1, 2, 4].map(|j| r[j].to_i64().unwrap())
            })
            .collect();
        got.sort();
        let mut want = expected.to_vec();
        want.sort();
        assert_eq!(got, want);
        // Sum of the four rays; v3 totals 0 + 2 + 1 + 0 = 3.
        assert_eq!(disk_box(&cone, &rays), vec![6, 5, 3, 3, 8]);
        for r in &rays {
            let v: Vec<i64> = r.iter().map(|x| x.to_i64().unwrap()).collect();
            assert!(cone.contains_int(&v));
        }
    }

    #[test]
    fn tiny_cones() {
        let rays = extremal_rays_of(2, &[big(&[1, -1])]);
        assert_eq!(rays, vec![big(&[1, 1])]);
        assert!(extremal_rays_of(2, &[big(&[1, 1])]).is_empty());
    }

    #[test]
    fn support_graphs() {
        let cone = w_cone(5, -2);
        let g = support_graph_int(&cone, &[0, 1, 1, 1, 4]);
        assert_eq!(g.vertices, vec![1, 2]);
        assert_eq!(g.component_count(), 1);
        assert!(g.is_recurrent());
        assert_eq!(support_graph_int(&cone, &[0, 2, 0, 0, 5]).component_count(), 2);
        assert_eq!(support_graph_int(&cone, &[0; 5]).component_count(), 0);

        let circuits = g.eulerian_circuits().unwrap();
        assert_eq!(circuits.len(), 1);
        let c = &circuits[0];
        assert_eq!(c.len(), 7);
        let loops = (0..c.len()).filter(|&i| c[i] == 2 && c[(i + 1) % c.len()] == 2).count();
        assert_eq!(loops, 4);
    }

    #[test]
    fn recurrence_and_circuits() {
        let two_cycle = SupportGraph { vertices: vec![0, 1], edges: vec![(0, 1, int(1)), (1, 0, int(1))] };
        assert!(two_cycle.is_recurrent());
        assert_eq!(two_cycle.eulerian_circuits().unwrap(), vec![vec![0, 1]]);
        let doubled = SupportGraph { vertices: vec![0, 1], edges: vec![(0, 1, int(2)), (1, 0, int(2))] };
        assert_eq!(doubled.eulerian_circuits().unwrap()[0].len(), 4);
        let path = SupportGraph { vertices: vec![0, 1], edges: vec![(0, 1, int(1))] };
        assert!(!path.is_recurrent());
        assert_eq!(path.eulerian_circuits(), Err(GraphError::Imbalanced(0)));
    }
}
