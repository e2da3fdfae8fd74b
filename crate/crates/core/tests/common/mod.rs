//! Shared test helpers, including an independent scl oracle for free groups.
//!
//! The oracle uses the polygon model: every letter of the expanded chain is a
//! vertex, an edge `i -> j` pairs the letter after `i` with its inverse `j`,
//! and each closed walk of edges bounds one polygon. Surfaces are glued from
//! polygons, so `χ = #polygons - #letters/2`. Closed walks are generated on
//! demand by a cheapest-cycle search. Nothing here touches sails, cones or
//! the τ-coordinates of the library; only the exact LP solver is shared, and
//! every optimum it returns is checked against its dual certificate.

#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use scl_core::lp::{maximize, LinearProgram, Relation};
use scl_core::rational::{int, Rational};
use std::collections::HashMap;

/// A letter: generator and sign.
type Letter = (char, i8);

/// Expands "a^4 b A B" into unit letters.
pub fn expand(word: &str) -> Vec<Letter> {
    let mut out = Vec::new();
    let chars: Vec<char> = word.chars().filter(|c| !c.is_whitespace()).collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        assert!(c.is_ascii_alphabetic(), "bad letter {c:?} in {word}");
        let sign: i8 = if c.is_ascii_uppercase() { -1 } else { 1 };
        i += 1;
        let mut power = 1i64;
        if i < chars.len() && chars[i] == '^' {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && (chars[end] == '-' || chars[end].is_ascii_digit()) {
                end += 1;
            }
            power = chars[start..end].iter().collect::<String>().parse().unwrap();
            i = end;
        }
        let s = if power < 0 { -sign } else { sign };
        for _ in 0..power.abs() {
            out.push((c.to_ascii_lowercase(), s));
        }
    }
    out
}

/// Closed walk of minimum total weight, or `None` if the graph is acyclic.
fn cheapest_cycle(n: usize, edges: &[(usize, usize)], w: &[Rational]) -> Option<(Rational, Vec<usize>)> {
    // Negative cycles first (Bellman-Ford from a virtual source).
    let mut d = vec![Rational::zero(); n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for _ in 0..=n {
        last = None;
        for (k, &(i, j)) in edges.iter().enumerate() {
            let cand = &d[i] + &w[k];
            if cand < d[j] {
                d[j] = cand;
                parent[j] = Some(k);
                last = Some(j);
            }
        }
        if last.is_none() {
            break;
        }
    }
    if let Some(mut x) = last {
        for _ in 0..n {
            x = edges[parent[x].unwrap()].0;
        }
        let mut cycle = Vec::new();
        let mut y = x;
        loop {
            let k = parent[y].unwrap();
            cycle.push(k);
            y = edges[k].0;
            if y == x {
                break;
            }
        }
        let weight = cycle.iter().fold(Rational::zero(), |a, &k| a + &w[k]);
        return Some((weight, cycle));
    }
    // No negative cycle: Floyd-Warshall with first-edge tracking.
    let mut dist: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    let mut first: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; n];
    for (k, &(i, j)) in edges.iter().enumerate() {
        if dist[i][j].as_ref().map_or(true, |cur| w[k] < *cur) {
            dist[i][j] = Some(w[k].clone());
            first[i][j] = k;
        }
    }
    for m in 0..n {
        for i in 0..n {
            let Some(im) = dist[i][m].clone() else { continue };
            for j in 0..n {
                if let Some(mj) = &dist[m][j] {
                    let cand = &im + mj;
                    if dist[i][j].as_ref().map_or(true, |cur| cand < *cur) {
                        dist[i][j] = Some(cand);
                        first[i][j] = first[i][m];
                    }
                }
            }
        }
    }
    let start = (0..n).filter(|&i| dist[i][i].is_some()).min_by(|&a, &b| dist[a][a].cmp(&dist[b][b]))?;
    let mut cycle = Vec::new();
    let mut u = start;
    loop {
        let k = first[u][start];
        cycle.push(k);
        u = edges[k].1;
        if u == start {
            break;
        }
    }
    Some((dist[start][start].clone().unwrap(), cycle))
}

/// scl of a chain `Σ nᵢ wᵢ` in a free group by the polygon model.
pub fn polygon_scl(chain: &[(i64, &str)]) -> Rational {
    struct Slot {
        letter: Letter,
        word: usize,
        base: usize,
        len: usize,
        pos: usize,
    }
    let mut slots = Vec::new();
    for (w, (_, text)) in chain.iter().enumerate() {
        let letters = expand(text);
        let base = slots.len();
        for (pos, &letter) in letters.iter().enumerate() {
            slots.push(Slot { letter, word: w, base, len: letters.len(), pos });
        }
    }
    let n = slots.len();
    let next = |i: usize| slots[i].base + (slots[i].pos + 1) % slots[i].len;
    let prev = |i: usize| slots[i].base + (slots[i].pos + slots[i].len - 1) % slots[i].len;
    let mut edges = Vec::new();
    for i in 0..n {
        let (g, s) = slots[next(i)].letter;
        for j in 0..n {
            if slots[j].letter == (g, -s) {
                edges.push((i, j));
            }
        }
    }
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();

    // Rows over edge counts: each edge glued to its mate, each letter used n times.
    let mut rows: Vec<(Vec<(usize, i64)>, i64)> = Vec::new();
    for (k, &(i, j)) in edges.iter().enumerate() {
        let mate = index[&(prev(j), next(i))];
        if k < mate {
            rows.push((vec![(k, 1), (mate, -1)], 0));
        }
    }
    for i in 0..n {
        let out: Vec<(usize, i64)> = edges.iter().enumerate().filter(|(_, e)| e.0 == i).map(|(k, _)| (k, 1)).collect();
        rows.push((out, chain[slots[i].word].0));
    }

    let big = int(1000);
    let mut cycles: Vec<Vec<i64>> = Vec::new();
    loop {
        let mut lp = LinearProgram::new();
        let ts: Vec<usize> = (0..cycles.len()).map(|c| lp.add_var(format!("p{c}"), Rational::one())).collect();
        for (r, (coeffs, rhs)) in rows.iter().enumerate() {
            let mut row: Vec<(usize, Rational)> = Vec::new();
            for (c, cyc) in cycles.iter().enumerate() {
                let a: i64 = coeffs.iter().map(|&(k, x)| x * cyc[k]).sum();
                if a != 0 {
                    row.push((ts[c], int(a)));
                }
            }
            row.push((lp.add_var(format!("s+{r}"), -big.clone()), Rational::one()));
            row.push((lp.add_var(format!("s-{r}"), -big.clone()), -Rational::one()));
            lp.add_row(row, Relation::Eq, int(*rhs));
        }
        let sol = maximize(&lp);
        assert!(sol.is_optimal());
        let mut weight = vec![Rational::zero(); edges.len()];
        for ((coeffs, _), y) in rows.iter().zip(&sol.duals) {
            for &(k, x) in coeffs {
                weight[k] += y * int(x);
            }
        }
        match cheapest_cycle(n, &edges, &weight) {
            Some((wt, cyc)) if wt < Rational::one() => {
                let mut col = vec![0i64; edges.len()];
                for k in cyc {
                    col[k] += 1;
                }
                cycles.push(col);
            }
            _ => {
                let slack: Rational = sol.assignment[..].iter().skip(cycles.len()).fold(Rational::zero(), |a, x| a + x);
                assert!(slack.is_zero() && !sol.objective.is_negative(), "polygon LP left slack");
                let half_letters = int(chain.iter().map(|(m, t)| m * expand(t).len() as i64).sum::<i64>()) / int(2);
                let chi = &sol.objective - half_letters;
                return -chi / int(2);
            }
        }
    }
}
