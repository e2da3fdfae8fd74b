//! Junction polygons for chains that meet three or more factors.
//!
//! With two factors the pieces of a surface meet along rectangles, so each
//! genuine coordinate is glued to a single partner. Once three factors are
//! involved the pieces meet around polygons instead. The sides of a polygon are
//! genuine coordinates `(τ, τ')`, and the side after `(τ, τ')` must end where
//! the chain leaves `τ`, that is its `τ'` is `succ τ`. A polygon with `m`
//! sides contributes `1 − m/2` to χ, so rectangles (`m = 2`) cost nothing.
//!
//! Only simple cycles of the side graph matter: a closed walk through a node
//! twice splits into two polygons with the same sides and one more unit of χ.

use crate::arcs::{ArcStructure, CoordRef};
use crate::rational::Rational;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

/// The side graph: nodes are genuine coordinates, `c → c'` when `c'` may follow `c`.
#[derive(Clone, Debug)]
pub struct PolygonGraph {
    pub nodes: Vec<CoordRef>,
    pub next: Vec<Vec<usize>>,
}

impl PolygonGraph {
    pub fn new(arcs: &ArcStructure) -> PolygonGraph {
        let nodes: Vec<CoordRef> = arcs.all_coords().filter(|(_, x)| x.is_genuine()).map(|(c, _)| c).collect();
        let position = |c: CoordRef| nodes.iter().position(|&n| n == c);
        let next = nodes
            .iter()
            .map(|&c| {
                let s = arcs.succ(arcs.coord(c).tau);
                let fa = &arcs.factors[arcs.taus[s].factor];
                (0..fa.coords.len())
                    .map(|index| CoordRef { factor: fa.factor, index })
                    .filter(|&d| arcs.coord(d).is_genuine() && arcs.coord(d).tau_prime == s)
                    .filter_map(position)
                    .collect()
            })
            .collect();
        PolygonGraph { nodes, next }
    }

    /// Whether each node lies on some polygon.
    pub fn on_cycle(&self) -> Vec<bool> {
        (0..self.nodes.len())
            .map(|start| {
                let mut seen = vec![false; self.nodes.len()];
                let mut stack = self.next[start].clone();
                while let Some(u) = stack.pop() {
                    if u == start {
                        return true;
                    }
                    if !std::mem::replace(&mut seen[u], true) {
                        stack.extend(&self.next[u]);
                    }
                }
                false
            })
            .collect()
    }

    pub fn sides(&self, cycle: &[usize]) -> Vec<CoordRef> {
        cycle.iter().map(|&i| self.nodes[i]).collect()
    }

    /// Simple cycles whose node weights sum below `threshold`, rotated to
    /// start at their smallest node. Empty only if no cycle is that cheap.
    pub fn cheap_cycles(&self, weight: &[Rational], threshold: &Rational) -> Vec<Vec<usize>> {
        let mut found = BTreeSet::new();
        let mut keep = |walk: Vec<usize>| {
            for cycle in split_walk(&walk) {
                let w = cycle.iter().fold(Rational::zero(), |a, &i| a + &weight[i]);
                if &w < threshold {
                    found.insert(cycle);
                }
            }
        };
        if let Some(walk) = self.negative_cycle(weight) {
            keep(walk);
        } else if threshold.is_positive() {
            for walk in self.shortest_cycles(weight) {
                keep(walk);
            }
        }
        found.into_iter().collect()
    }

    /// Bellman-Ford from a virtual source; an edge costs the weight of its head.
    fn negative_cycle(&self, weight: &[Rational]) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut dist = vec![Rational::zero(); n];
        let mut parent = vec![usize::MAX; n];
        let mut last = None;
        for _ in 0..=n {
            last = None;
            for u in 0..n {
                for &v in &self.next[u] {
                    let cand = &dist[u] + &weight[v];
                    if cand < dist[v] {
                        dist[v] = cand;
                        parent[v] = u;
                        last = Some(v);
                    }
                }
            }
            last?;
        }
        let mut x = last?;
        for _ in 0..n {
            x = parent[x];
        }
        let mut walk = vec![x];
        let mut y = parent[x];
        while y != x {
            walk.push(y);
            y = parent[y];
        }
        walk.reverse();
        Some(walk)
    }

    /// Cheapest closed walk through each node (Floyd-Warshall, no negative cycles).
    fn shortest_cycles(&self, weight: &[Rational]) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut dist: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
        let mut hop = vec![vec![usize::MAX; n]; n];
        for u in 0..n {
            for &v in &self.next[u] {
                dist[u][v] = Some(weight[v].clone());
                hop[u][v] = v;
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = dist[i][k].clone() else { continue };
                for j in 0..n {
                    let Some(kj) = &dist[k][j] else { continue };
                    let cand = &ik + kj;
                    if dist[i][j].as_ref().map_or(true, |cur| &cand < cur) {
                        dist[i][j] = Some(cand);
                        hop[i][j] = hop[i][k];
                    }
                }
            }
        }
        (0..n)
            .filter(|&i| dist[i][i].is_some())
            .filter_map(|i| {
                let mut walk = vec![i];
                let mut u = hop[i][i];
                while u != i {
                    if walk.len() > n {
                        return None;
                    }
                    walk.push(u);
                    u = hop[u][i];
                }
                Some(walk)
            })
            .collect()
    }
}

/// Splits a closed walk into simple cycles in canonical rotation.
fn split_walk(walk: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    for &u in walk.iter().chain(walk.first()) {
        if let Some(p) = stack.iter().position(|&x| x == u) {
            out.push(canonical(stack.split_off(p)));
        }
        stack.push(u);
    }
    out
}

fn canonical(mut cycle: Vec<usize>) -> Vec<usize> {
    let m = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
    cycle.rotate_left(m);
    cycle
}

/// Checks that `sides` close up into a polygon.
pub fn check_polygon(arcs: &ArcStructure, sides: &[CoordRef]) -> Result<(), String> {
    if sides.len() < 2 {
        return Err("fewer than two sides".into());
    }
    for (i, &c) in sides.iter().enumerate() {
        let valid = |d: CoordRef| {
            arcs.factors.get(d.factor).and_then(|f| f.coords.get(d.index)).is_some_and(|x| x.is_genuine())
        };
        let d = sides[(i + 1) % sides.len()];
        if !valid(c) || !valid(d) {
            return Err("side is not a genuine coordinate".into());
        }
        if arcs.coord(d).tau_prime != arcs.succ(arcs.coord(c).tau) {
            return Err(format!("{} cannot follow {}", arcs.label(d), arcs.label(c)));
        }
    }
    Ok(())
}
