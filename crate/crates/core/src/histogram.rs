//! Value histograms of the `w` and `w′` families from their closed forms.

use crate::chain::parse_with_group;
use crate::engine::{scl_with, SclOptions};
use crate::rational::{to_pq, Rational};
use crate::surgery::{admissible_pairs, closed_form_w, closed_form_wprime, w_text, wprime_text};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    W,
    WPrime,
}

impl Family {
    pub fn closed_form(self, t: Tuple) -> Rational {
        let f = match self {
            Family::W => closed_form_w,
            Family::WPrime => closed_form_wprime,
        };
        f(t.0, t.1, t.2, t.3).expect("admissible tuple")
    }

    pub fn chain_text(self, t: Tuple) -> String {
        match self {
            Family::W => w_text(t.0, t.1, t.2, t.3),
            Family::WPrime => wprime_text(t.0, t.1, t.2, t.3),
        }
    }
}

/// `(α1, α2, β1, β2)`.
pub type Tuple = (i64, i64, i64, i64);

pub fn admissible_tuples(n: i64) -> Vec<Tuple> {
    let pairs = admissible_pairs(n);
    pairs
        .iter()
        .flat_map(|&(a1, a2)| pairs.iter().map(move |&(b1, b2)| (a1, a2, b1, b2)))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    pub bins: BTreeMap<Rational, usize>,
    pub tuples: usize,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.bins.values().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("scl,count\n");
        for (v, c) in &self.bins {
            out.push_str(&format!("{},{}\n", to_pq(v), c));
        }
        out
    }
}

/// Tallies both families over every admissible tuple with `α1, β1 ≤ n`.
pub fn histogram(n: i64) -> Histogram {
    let tuples = admissible_tuples(n);
    let values: Vec<Rational> = tuples
        .par_iter()
        .flat_map_iter(|&t| [Family::W.closed_form(t), Family::WPrime.closed_form(t)])
        .collect();
    let mut bins = BTreeMap::new();
    for v in values {
        *bins.entry(v).or_insert(0) += 1;
    }
    Histogram { bins, tuples: tuples.len() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub family: Family,
    pub tuple: Tuple,
    pub expected: Rational,
    pub computed: Result<Rational, String>,
}

impl Check {
    pub fn agrees(&self) -> bool {
        self.computed.as_ref() == Ok(&self.expected)
    }
}

/// Re-verifies `k` seeded random (family, tuple) samples with the engine.
pub fn check_sample(n: i64, k: usize, seed: u64, opts: &SclOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<(Family, Tuple)> = admissible_tuples(n)
        .into_iter()
        .flat_map(|t| [(Family::W, t), (Family::WPrime, t)])
        .collect();
    let picked: Vec<(Family, Tuple)> = all.choose_multiple(&mut rng, k).copied().collect();
    picked
        .into_par_iter()
        .map(|(family, tuple)| {
            let computed = parse_with_group(&family.chain_text(tuple), Some("Z(a) * Z(b)"))
                .map_err(|e| e.to_string())
                .and_then(|(g, c)| scl_with(&c, &g, opts).map(|r| r.value).map_err(|e| e.to_string()));
            Check { family, tuple, expected: family.closed_form(tuple), computed }
        })
        .collect()
}
