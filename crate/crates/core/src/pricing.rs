//! Cheapest disk vector under a nonnegative cost vector.
//!
//! A disk vector is the edge-count vector of a closed walk in the arc graph
//! of a factor whose visited arc elements sum to zero. Minimal disks lie in
//! the disk box, which bounds every partial sum of the walk, so a Dijkstra
//! search over (arc, partial sum) states is exhaustive for them.

use crate::cone::ConeSystem;
use crate::rational::{denominator_lcm, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::ops::Add;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PricingError {
    #[error("negative pricing cost on coordinate {0}")]
    NegativeCost(usize),
    #[error("pricing search exceeded its budget of {0} states")]
    Budget(usize),
}

/// Per-generator bounds on partial sums derived from the disk box.
pub fn partial_sum_bounds(cone: &ConeSystem, bound: &[i64]) -> Vec<i64> {
    let arcs = cone.elements.len();
    let mut out_degree = vec![0i64; arcs];
    for (j, &(t, _)) in cone.coords.iter().enumerate() {
        if cone.is_genuine(j) {
            out_degree[t] += bound[j];
        }
    }
    let rank = cone.homology.len();
    (0..rank)
        .map(|k| {
            let total: i64 = (0..arcs).map(|v| out_degree[v] * cone.elements[v][k].abs()).sum();
            total / 2
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PricedDisk {
    pub v: Vec<i64>,
    pub cost: Rational,
}

/// For each starting arc, the cheapest closed zero-sum walk starting at that
/// arc (as its least vertex) with cost strictly below `threshold`.
pub fn cheap_disks(
    cone: &ConeSystem,
    costs: &[Rational],
    sum_bounds: &[i64],
    threshold: &Rational,
    budget: Option<usize>,
) -> Result<Vec<PricedDisk>, PricingError> {
    if let Some(j) = costs.iter().position(|c| c.is_negative()) {
        return Err(PricingError::NegativeCost(j));
    }
    let scale = denominator_lcm(costs.iter().chain(std::iter::once(threshold)));
    let to_int = |q: &Rational| (q * Rational::from_integer(scale.clone())).to_integer();
    let big: Vec<BigInt> = costs.iter().map(to_int).collect();
    let limit = to_int(threshold);
    let small: Option<Vec<i128>> = big.iter().map(|c| c.to_i128()).collect();
    let found = match (small, limit.to_i128()) {
        (Some(c), Some(l)) if c.iter().all(|x| *x < i128::MAX / 1024) => {
            search(cone, &c, sum_bounds, &l, budget)?.into_iter().map(|(v, c)| (v, BigInt::from(c))).collect()
        }
        _ => search(cone, &big, sum_bounds, &limit, budget)?,
    };
    Ok(found
        .into_iter()
        .map(|(v, c)| PricedDisk { v, cost: Rational::new(c, scale.clone()) })
        .collect())
}

type State = (usize, Vec<i64>);

fn search<C>(cone: &ConeSystem, costs: &[C], bounds: &[i64], limit: &C, budget: Option<usize>) -> Result<Vec<(Vec<i64>, C)>, PricingError>
where
    C: Clone + Ord + Zero + for<'a> Add<&'a C, Output = C>,
{
    let arcs = cone.elements.len();
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); arcs];
    for (j, &(t, u)) in cone.coords.iter().enumerate() {
        if cone.is_genuine(j) {
            out[t].push((j, u));
        }
    }
    let genuine_arcs: Vec<usize> = (0..arcs).filter(|&v| !out[v].is_empty()).collect();
    let mut results = Vec::new();
    let mut states_seen = 0usize;
    for &root in &genuine_arcs {
        let start: State = (root, cone.elements[root].clone());
        if !within(&start.1, bounds) {
            continue;
        }
        let mut dist: HashMap<State, (C, Option<(State, usize)>)> = HashMap::new();
        let mut heap: BinaryHeap<Reverse<(C, usize, Vec<i64>)>> = BinaryHeap::new();
        dist.insert(start.clone(), (C::zero(), None));
        heap.push(Reverse((C::zero(), start.0, start.1.clone())));
        let mut best: Option<(C, State, usize)> = None;
        while let Some(Reverse((d, v, sum))) = heap.pop() {
            let state: State = (v, sum);
            if dist.get(&state).is_some_and(|(known, _)| *known < d) {
                continue;
            }
            let cap = best.as_ref().map_or(limit, |(c, _, _)| c);
            if d >= *cap {
                break;
            }
            states_seen += 1;
            if let Some(b) = budget {
                if states_seen > b {
                    return Err(PricingError::Budget(b));
                }
            }
            for &(j, u) in &out[state.0] {
                if u < root {
                    continue;
                }
                let nd = d.clone() + &costs[j];
                if u == root {
                    let closes = state.1.iter().all(|&x| x == 0);
                    let cap = best.as_ref().map_or(limit, |(c, _, _)| c);
                    if closes && nd < *cap {
                        best = Some((nd.clone(), state.clone(), j));
                    }
                }
                let next_sum: Vec<i64> = state.1.iter().zip(&cone.elements[u]).map(|(a, b)| a + b).collect();
                if !within(&next_sum, bounds) {
                    continue;
                }
                let next: State = (u, next_sum);
                if dist.get(&next).map_or(true, |(known, _)| nd < *known) {
                    dist.insert(next.clone(), (nd.clone(), Some((state.clone(), j))));
                    heap.push(Reverse((nd, next.0, next.1)));
                }
            }
        }
        if let Some((cost, last, closing)) = best {
            let mut v = vec![0i64; cone.dim()];
            v[closing] += 1;
            let mut cur = last;
            while let Some((_, Some((prev, j)))) = dist.get(&cur) {
                v[*j] += 1;
                cur = prev.clone();
            }
            results.push((v, cost));
        }
    }
    Ok(results)
}

fn within(sum: &[i64], bounds: &[i64]) -> bool {
    sum.iter().zip(bounds).all(|(s, b)| s.abs() <= *b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::build_arcs;
    use crate::chain::{parse_chain, parse_group_spec};
    use crate::cone::{build_cone_system, disk_box, extremal_rays};
    use crate::rational::{int, rat};
    use crate::sails::{check_disk, enumerate_disk_vectors};

    #[test]
    fn finds_cheapest_enumerated_disk() {
        let g = parse_group_spec("Z(a) * Z(b)").unwrap();
        let arcs = build_arcs(&parse_chain("a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1", &g).unwrap(), &g).unwrap();
        let cone = build_cone_system(&arcs, 0);
        let bound = disk_box(&cone, &extremal_rays(&cone));
        let model = enumerate_disk_vectors(&cone, &bound);
        let bounds = partial_sum_bounds(&cone, &bound);
        for costs in [[0, 1, 2, 1, 1], [0, 3, 1, 1, 2], [5, 1, 1, 1, 1]] {
            let costs: Vec<Rational> = costs.iter().map(|&c| rat(c, 7)).collect();
            let best = model
                .disks
                .iter()
                .map(|d| d.v.iter().zip(&costs).fold(Rational::zero(), |a, (&x, c)| a + c * int(x)))
                .min()
                .unwrap();
            let found = cheap_disks(&cone, &costs, &bounds, &int(100), None).unwrap();
            let cheapest = found.iter().map(|p| p.cost.clone()).min().unwrap();
            assert_eq!(cheapest, best);
            for p in &found {
                check_disk(&cone, &p.v).unwrap();
            }
        }
    }

    #[test]
    fn threshold_filters() {
        let g = parse_group_spec("Z(a) * Z(b)").unwrap();
        let arcs = build_arcs(&parse_chain("abAB", &g).unwrap(), &g).unwrap();
        let cone = build_cone_system(&arcs, 0);
        let costs = vec![int(1); 4];
        let bounds = vec![4];
        assert!(cheap_disks(&cone, &costs, &bounds, &int(2), None).unwrap().is_empty());
        let found = cheap_disks(&cone, &costs, &bounds, &rat(5, 2), None).unwrap();
        assert_eq!(found[0].cost, int(2));
    }
}
