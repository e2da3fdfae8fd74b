//! τ-edges, σ-coordinates and the cross-factor pairing.
//!
//! Every syllable of the integral chain is an arc (τ-edge) in its factor. A
//! σ-coordinate of factor `i` is an ordered pair of arcs of that factor:
//! the surface leaves the boundary at the end of `tau` and comes back at the
//! start of `tau_prime`. Abelian loops instead get a single dummy coordinate.
//! With two factors each genuine coordinate is glued to one partner; with
//! three or more the gluing goes through [`crate::junction`].

use crate::chain::{homology_class, Chain, GroupSpec};
use crate::junction::PolygonGraph;
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ArcError {
    #[error("chain is not a boundary")]
    NotBoundary,
    #[error("chain coefficients must be positive integers")]
    NotIntegral,
    #[error("empty chain")]
    EmptyChain,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauEdge {
    pub id: usize,
    /// 1-based index among the arcs of the same factor, used in labels.
    pub local: usize,
    pub word: usize,
    pub position: usize,
    pub factor: usize,
    pub element: Vec<i64>,
    pub abelian_loop: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordKind {
    Dummy,
    Genuine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoordRef {
    pub factor: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T2Coord {
    pub factor: usize,
    pub tau: usize,
    pub tau_prime: usize,
    pub kind: CoordKind,
    pub partner: Option<CoordRef>,
    pub forced_zero: bool,
}

impl T2Coord {
    pub fn is_genuine(&self) -> bool {
        self.kind == CoordKind::Genuine
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorArcs {
    pub factor: usize,
    pub taus: Vec<usize>,
    pub coords: Vec<T2Coord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordArcs {
    pub taus: Vec<usize>,
    pub degree: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcStructure {
    pub taus: Vec<TauEdge>,
    pub words: Vec<WordArcs>,
    pub factors: Vec<FactorArcs>,
    /// Three or more factors occur, so gluing goes through junction polygons.
    pub junctions: bool,
    index: HashMap<(usize, usize), CoordRef>,
}

impl ArcStructure {
    pub fn succ(&self, tau: usize) -> usize {
        let t = &self.taus[tau];
        let w = &self.words[t.word].taus;
        w[(t.position + 1) % w.len()]
    }

    pub fn pred(&self, tau: usize) -> usize {
        let t = &self.taus[tau];
        let w = &self.words[t.word].taus;
        w[(t.position + w.len() - 1) % w.len()]
    }

    pub fn degree(&self, tau: usize) -> &BigInt {
        &self.words[self.taus[tau].word].degree
    }

    pub fn coord(&self, c: CoordRef) -> &T2Coord {
        &self.factors[c.factor].coords[c.index]
    }

    /// The coordinate `(tau, tau_prime)`, if it exists.
    pub fn find(&self, tau: usize, tau_prime: usize) -> Option<CoordRef> {
        self.index.get(&(tau, tau_prime)).copied()
    }

    /// Label such as `(τ2,τ3)` with factor-local arc numbers.
    pub fn label(&self, c: CoordRef) -> String {
        let x = self.coord(c);
        format!("(τ{},τ{})", self.taus[x.tau].local, self.taus[x.tau_prime].local)
    }

    pub fn labels(&self, factor: usize) -> Vec<String> {
        (0..self.factors[factor].coords.len())
            .map(|index| self.label(CoordRef { factor, index }))
            .collect()
    }

    pub fn all_coords(&self) -> impl Iterator<Item = (CoordRef, &T2Coord)> {
        self.factors.iter().flat_map(|f| {
            f.coords
                .iter()
                .enumerate()
                .map(move |(index, c)| (CoordRef { factor: f.factor, index }, c))
        })
    }
}

/// Builds arcs and coordinates for an integral boundary chain.
pub fn build_arcs(chain: &Chain, spec: &GroupSpec) -> Result<ArcStructure, ArcError> {
    if chain.is_empty() {
        return Err(ArcError::EmptyChain);
    }
    if chain
        .terms
        .iter()
        .any(|t| !t.coefficient.is_integer() || !t.coefficient.is_positive())
    {
        return Err(ArcError::NotIntegral);
    }
    if !homology_class(chain, spec).is_boundary() {
        return Err(ArcError::NotBoundary);
    }
    let mut taus = Vec::new();
    let mut words = Vec::new();
    let mut per_factor: Vec<Vec<usize>> = vec![Vec::new(); spec.num_factors()];
    for (w, term) in chain.terms.iter().enumerate() {
        let abelian = term.word.is_abelian_loop();
        let mut ids = Vec::new();
        for (position, s) in term.word.syllables().iter().enumerate() {
            let id = taus.len();
            per_factor[s.factor].push(id);
            taus.push(TauEdge {
                id,
                local: per_factor[s.factor].len(),
                word: w,
                position,
                factor: s.factor,
                element: s.exponent.clone(),
                abelian_loop: abelian,
            });
            ids.push(id);
        }
        words.push(WordArcs { taus: ids, degree: term.coefficient.to_integer() });
    }
    let mut factors = Vec::new();
    let mut index = HashMap::new();
    for (f, ids) in per_factor.iter().enumerate() {
        let mut coords = Vec::new();
        for &t in ids {
            if taus[t].abelian_loop {
                coords.push((t, t, CoordKind::Dummy));
                continue;
            }
            for &u in ids.iter().filter(|&&u| !taus[u].abelian_loop) {
                coords.push((t, u, CoordKind::Genuine));
            }
        }
        let coords: Vec<T2Coord> = coords
            .into_iter()
            .enumerate()
            .map(|(i, (tau, tau_prime, kind))| {
                index.insert((tau, tau_prime), CoordRef { factor: f, index: i });
                T2Coord { factor: f, tau, tau_prime, kind, partner: None, forced_zero: false }
            })
            .collect();
        factors.push(FactorArcs { factor: f, taus: ids.clone(), coords });
    }
    let junctions = factors.iter().filter(|f| !f.taus.is_empty()).count() >= 3;
    let mut arcs = ArcStructure { taus, words, factors, junctions, index };
    let mut links = Vec::new();
    for (c, x) in arcs.all_coords() {
        if !x.is_genuine() {
            continue;
        }
        let s = arcs.succ(x.tau);
        let p = arcs.pred(x.tau_prime);
        let partner = if arcs.taus[s].factor == arcs.taus[p].factor {
            arcs.find(p, s)
        } else {
            None
        };
        links.push((c, partner));
    }
    for (c, partner) in links {
        let x = &mut arcs.factors[c.factor].coords[c.index];
        x.partner = partner;
        x.forced_zero = partner.is_none();
    }
    if arcs.junctions {
        let graph = PolygonGraph::new(&arcs);
        for (&c, on) in graph.nodes.iter().zip(graph.on_cycle()) {
            arcs.factors[c.factor].coords[c.index].forced_zero = !on;
        }
    }
    Ok(arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{parse_chain, parse_group_spec};

    fn arcs_of(chain: &str, group: &str) -> ArcStructure {
        let g = parse_group_spec(group).unwrap();
        build_arcs(&parse_chain(chain, &g).unwrap(), &g).unwrap()
    }

    #[test]
    fn w_family_coordinates() {
        let a = arcs_of("a^-3 + b^-2 + a^5 b^3 + a^-2 b^-1", "Z(a) * Z(b)");
        let fa = &a.factors[0];
        assert_eq!(fa.taus.len(), 3);
        assert_eq!(a.labels(0), ["(τ1,τ1)", "(τ2,τ2)", "(τ2,τ3)", "(τ3,τ2)", "(τ3,τ3)"]);
        assert_eq!(fa.coords[0].kind, CoordKind::Dummy);
        assert!(fa.coords[1..].iter().all(|c| c.is_genuine() && c.partner.is_some()));
    }

    #[test]
    fn pairing_is_an_involution() {
        let a = arcs_of("abAB", "Z(a) * Z(b)");
        for (c, x) in a.all_coords() {
            assert!(!x.forced_zero);
            let p = x.partner.unwrap();
            assert_ne!(p.factor, c.factor);
            assert_eq!(a.coord(p).partner, Some(c));
            let (s, q) = (a.succ(x.tau), a.pred(x.tau_prime));
            assert_eq!((a.coord(p).tau, a.coord(p).tau_prime), (q, s));
        }
    }

    #[test]
    fn three_factor_junctions() {
        // (a,A) leaves towards b but A is entered from c: no rectangle, only polygons.
        let a = arcs_of("abcACB", "Z(a) * Z(b) * Z(c)");
        assert!(a.junctions);
        let unpaired = a.all_coords().filter(|(_, x)| x.partner.is_none()).count();
        assert!(unpaired > 0);
        assert!(a.all_coords().all(|(_, x)| !x.forced_zero));
        assert!(!arcs_of("abAB + aBAb", "Z(a) * Z(b) * Z(c)").junctions);
        for (c, x) in a.all_coords() {
            if let Some(p) = x.partner {
                assert_eq!(a.coord(p).partner, Some(c));
            }
        }
    }

    #[test]
    fn rejects_bad_chains() {
        let g = parse_group_spec("Z(a) * Z(b)").unwrap();
        let c = parse_chain("ab", &g).unwrap();
        assert_eq!(build_arcs(&c, &g), Err(ArcError::NotBoundary));
        let c = parse_chain("1/2 * abAB", &g).unwrap();
        assert_eq!(build_arcs(&c, &g), Err(ArcError::NotIntegral));
    }
}
