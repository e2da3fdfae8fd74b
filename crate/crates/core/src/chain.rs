//! Group specifications, cyclic words and rational chains.
//!
//! A group is a free product of free Abelian factors `Z^k(g1,..,gk)`. Words
//! are cyclic sequences of syllables, one exponent vector per syllable,
//! kept tight: cyclically adjacent syllables lie in different factors.

use crate::rational::{denominator_lcm, parse_rational, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("duplicate generator '{name}' at position {pos}")]
    DuplicateGenerator { name: char, pos: usize },
    #[error("rank must be at least 1 at position {pos}")]
    InvalidRank { pos: usize },
    #[error("unknown generator '{name}' at position {pos}")]
    UnknownGenerator { name: char, pos: usize },
    #[error("zero coefficient at position {pos}")]
    ZeroCoefficient { pos: usize },
    #[error("word at position {pos} reduces to the identity")]
    TrivialWord { pos: usize },
    #[error("empty chain")]
    EmptyChain,
}

fn syntax(pos: usize, message: impl Into<String>) -> ChainError {
    ChainError::Syntax { pos, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub name: String,
    pub generators: Vec<char>,
}

impl Factor {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// An ordered free product of free Abelian groups with named generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<Factor>,
}

impl GroupSpec {
    /// Builds a spec from generator lists, one per factor.
    pub fn new(factors: Vec<Vec<char>>) -> Result<GroupSpec, ChainError> {
        if factors.is_empty() {
            return Err(syntax(0, "at least one factor is required"));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for gens in factors {
            if gens.is_empty() {
                return Err(ChainError::InvalidRank { pos: 0 });
            }
            for &g in &gens {
                if !seen.insert(g) {
                    return Err(ChainError::DuplicateGenerator { name: g, pos: 0 });
                }
            }
            out.push(Factor { name: factor_name(&gens), generators: gens });
        }
        Ok(GroupSpec { factors: out })
    }

    /// The free group on the given letters: one rank-1 factor per letter.
    pub fn free(letters: &[char]) -> GroupSpec {
        GroupSpec::new(letters.iter().map(|&c| vec![c]).collect()).expect("distinct letters")
    }

    /// Free group on the distinct letters of `text`, in alphabetical order.
    pub fn default_for(text: &str) -> GroupSpec {
        let letters: BTreeSet<char> = text
            .chars()
            .filter(|c| c.is_ascii_alphabetic())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.is_empty() {
            GroupSpec::free(&['a'])
        } else {
            GroupSpec::free(&letters)
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn rank(&self, factor: usize) -> usize {
        self.factors[factor].rank()
    }

    /// Factor and basis index of a lowercase generator.
    pub fn locate(&self, gen: char) -> Option<(usize, usize)> {
        self.factors.iter().enumerate().find_map(|(i, f)| {
            f.generators.iter().position(|&g| g == gen).map(|k| (i, k))
        })
    }
}

fn factor_name(gens: &[char]) -> String {
    let list: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    if gens.len() == 1 {
        format!("Z({})", list.join(","))
    } else {
        format!("Z^{}({})", gens.len(), list.join(","))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.factors.iter().map(|x| x.name.as_str()).collect();
        write!(f, "{}", names.join(" * "))
    }
}

/// Parses `Z^2(a,c) * Z(b)`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec, ChainError> {
    let chars: Vec<(usize, char)> = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    let end = text.chars().count();
    let mut i = 0;
    let peek = |i: usize| chars.get(i).map(|&(_, c)| c);
    let pos = |i: usize| chars.get(i).map_or(end, |&(p, _)| p);
    let mut factors: Vec<Factor> = Vec::new();
    let mut seen: BTreeSet<char> = BTreeSet::new();
    loop {
        if peek(i) != Some('Z') {
            return Err(syntax(pos(i), "expected 'Z'"));
        }
        i += 1;
        let mut declared = None;
        if peek(i) == Some('^') {
            i += 1;
            let start = i;
            let mut digits = String::new();
            while let Some(c) = peek(i).filter(|c| c.is_ascii_digit() || *c == '-') {
                digits.push(c);
                i += 1;
            }
            let rank: i64 = digits.parse().map_err(|_| syntax(pos(start), "expected a rank"))?;
            if rank < 1 {
                return Err(ChainError::InvalidRank { pos: pos(start) });
            }
            declared = Some((rank as usize, pos(start)));
        }
        if peek(i) != Some('(') {
            return Err(syntax(pos(i), "expected '('"));
        }
        i += 1;
        let mut gens = Vec::new();
        loop {
            let p = pos(i);
            let mut ident = String::new();
            while let Some(c) = peek(i).filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                ident.push(c);
                i += 1;
            }
            let mut it = ident.chars();
            let g = match (it.next(), it.next()) {
                (Some(g), None) if g.is_ascii_lowercase() => g,
                (None, _) => return Err(syntax(p, "expected a generator name")),
                _ => return Err(syntax(p, "generator names must be single lowercase letters")),
            };
            if !seen.insert(g) {
                return Err(ChainError::DuplicateGenerator { name: g, pos: p });
            }
            gens.push(g);
            match peek(i) {
                Some(',') => i += 1,
                Some(')') => {
                    i += 1;
                    break;
                }
                _ => return Err(syntax(pos(i), "expected ',' or ')'")),
            }
        }
        if let Some((rank, p)) = declared {
            if rank != gens.len() {
                return Err(syntax(p, format!("rank {rank} but {} generators", gens.len())));
            }
        }
        factors.push(Factor { name: factor_name(&gens), generators: gens });
        match peek(i) {
            None => break,
            Some('*') => i += 1,
            Some(_) => return Err(syntax(pos(i), "expected '*'")),
        }
    }
    Ok(GroupSpec { factors })
}

/// A maximal run of one factor inside a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: usize,
    pub exponent: Vec<i64>,
}

impl Syllable {
    pub fn new(factor: usize, exponent: Vec<i64>) -> Syllable {
        Syllable { factor, exponent }
    }

    fn is_zero(&self) -> bool {
        self.exponent.iter().all(|&e| e == 0)
    }

    fn add(&mut self, other: &Syllable) {
        for (a, b) in self.exponent.iter_mut().zip(&other.exponent) {
            *a += b;
        }
    }

    fn negated(&self) -> Syllable {
        Syllable::new(self.factor, self.exponent.iter().map(|e| -e).collect())
    }
}

/// A tight cyclic word: cyclically adjacent syllables lie in distinct
/// factors, unless the word is a single syllable (an Abelian loop).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    syllables: Vec<Syllable>,
}

/// Merges adjacent same-factor syllables, cyclically, until tight.
/// Returns `None` when the word reduces to the identity.
pub fn tighten(raw: &[Syllable]) -> Option<CyclicWord> {
    let mut stack: Vec<Syllable> = Vec::with_capacity(raw.len());
    for s in raw.iter().filter(|s| !s.is_zero()) {
        match stack.last_mut() {
            Some(top) if top.factor == s.factor => {
                top.add(s);
                if top.is_zero() {
                    stack.pop();
                }
            }
            _ => stack.push(s.clone()),
        }
    }
    let mut word: std::collections::VecDeque<Syllable> = stack.into();
    while word.len() >= 2 && word.front().unwrap().factor == word.back().unwrap().factor {
        let last = word.pop_back().unwrap();
        let first = word.front_mut().unwrap();
        first.add(&last);
        if first.is_zero() {
            word.pop_front();
        }
    }
    if word.is_empty() {
        None
    } else {
        Some(CyclicWord { syllables: word.into() })
    }
}

impl CyclicWord {
    /// Tightens `raw`; see [`tighten`].
    pub fn new(raw: &[Syllable]) -> Option<CyclicWord> {
        tighten(raw)
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn is_abelian_loop(&self) -> bool {
        self.syllables.len() == 1
    }

    pub fn inverse(&self) -> CyclicWord {
        let raw: Vec<Syllable> = self.syllables.iter().rev().map(Syllable::negated).collect();
        tighten(&raw).expect("inverse of a nontrivial word")
    }

    /// The word read `n` times around.
    pub fn power(&self, n: usize) -> CyclicWord {
        assert!(n >= 1);
        let raw: Vec<Syllable> = (0..n).flat_map(|_| self.syllables.iter().cloned()).collect();
        tighten(&raw).expect("power of a nontrivial word")
    }

    pub fn rotated(&self, k: usize) -> CyclicWord {
        let mut s = self.syllables.clone();
        let n = s.len();
        s.rotate_left(k % n);
        CyclicWord { syllables: s }
    }

    /// Lexicographically least rotation; equal iff the words agree up to rotation.
    pub fn rotation_key(&self) -> Vec<Syllable> {
        (0..self.len())
            .map(|k| self.rotated(k).syllables)
            .min()
            .unwrap_or_default()
    }

    pub fn render(&self, spec: &GroupSpec) -> String {
        let mut parts = Vec::new();
        for s in &self.syllables {
            for (k, &e) in s.exponent.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let g = spec.factors()[s.factor].generators[k];
                parts.push(match e {
                    1 => g.to_string(),
                    -1 => g.to_ascii_uppercase().to_string(),
                    _ => format!("{g}^{e}"),
                });
            }
        }
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Rational,
    pub word: CyclicWord,
}

/// A formal rational combination of cyclic words.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    pub terms: Vec<Term>,
}

impl Chain {
    pub fn new(terms: Vec<Term>) -> Chain {
        Chain { terms }
    }

    pub fn single(word: CyclicWord) -> Chain {
        Chain::new(vec![Term { coefficient: Rational::one(), word }])
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, q: &Rational) -> Chain {
        Chain::new(
            self.terms
                .iter()
                .map(|t| Term { coefficient: &t.coefficient * q, word: t.word.clone() })
                .collect(),
        )
    }

    /// Formal sum (terms concatenated; normalize to merge).
    pub fn plus(&self, other: &Chain) -> Chain {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Chain::new(terms)
    }

    pub fn render(&self, spec: &GroupSpec) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let w = t.word.render(spec);
                if t.coefficient.is_one() {
                    w
                } else {
                    format!("{} * {w}", t.coefficient)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Parses a chain over `spec`. Words are tightened; the chain is not normalized.
pub fn parse_chain(text: &str, spec: &GroupSpec) -> Result<Chain, ChainError> {
    let chars: Vec<char> = text.chars().collect();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 0..=chars.len() {
        if i == chars.len() || chars[i] == '+' {
            terms.push(parse_term(&chars[start..i], start, spec)?);
            start = i + 1;
        }
    }
    if terms.is_empty() {
        return Err(ChainError::EmptyChain);
    }
    Ok(Chain::new(terms))
}

/// Parses with an explicit group, or the default free group on the chain's letters.
pub fn parse_with_group(text: &str, group: Option<&str>) -> Result<(GroupSpec, Chain), ChainError> {
    let spec = match group {
        Some(g) => parse_group_spec(g)?,
        None => GroupSpec::default_for(text),
    };
    let chain = parse_chain(text, &spec)?;
    Ok((spec, chain))
}

fn parse_term(chars: &[char], offset: usize, spec: &GroupSpec) -> Result<Term, ChainError> {
    let first = chars.iter().position(|c| !c.is_whitespace());
    let Some(first) = first else {
        return Err(syntax(offset + chars.len(), "empty term"));
    };
    let (coefficient, word_start) = match chars.iter().position(|&c| c == '*') {
        Some(star) => {
            let text: String = chars[..star].iter().collect();
            let q = parse_rational(&text).ok_or_else(|| syntax(offset + first, "expected a rational coefficient"))?;
            if q.is_zero() {
                return Err(ChainError::ZeroCoefficient { pos: offset + first });
            }
            (q, star + 1)
        }
        None => (Rational::one(), 0),
    };
    let mut raw = Vec::new();
    let mut i = word_start;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    skip_ws(&mut i);
    let word_pos = offset + i;
    while i < chars.len() {
        let c = chars[i];
        if !c.is_ascii_alphabetic() {
            return Err(syntax(offset + i, format!("unexpected '{c}'")));
        }
        let gen = c.to_ascii_lowercase();
        let (factor, k) = spec
            .locate(gen)
            .ok_or(ChainError::UnknownGenerator { name: gen, pos: offset + i })?;
        i += 1;
        let mut e: i64 = if c.is_ascii_uppercase() { -1 } else { 1 };
        skip_ws(&mut i);
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            skip_ws(&mut i);
            let p = i;
            let mut digits = String::new();
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                digits.push(chars[i]);
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                digits.push(chars[i]);
                i += 1;
            }
            let n: i64 = digits.parse().map_err(|_| syntax(offset + p, "expected an integer exponent"))?;
            e *= n;
            skip_ws(&mut i);
        }
        let mut exponent = vec![0; spec.rank(factor)];
        exponent[k] = e;
        raw.push(Syllable::new(factor, exponent));
    }
    if raw.is_empty() {
        return Err(syntax(word_pos, "expected a word"));
    }
    let word = tighten(&raw).ok_or(ChainError::TrivialWord { pos: word_pos })?;
    Ok(Term { coefficient, word })
}

/// Rewrites negative terms as inverse words, merges rotations, drops zeros.
pub fn normalize_chain(chain: &Chain) -> Chain {
    let mut keys: Vec<Vec<Syllable>> = Vec::new();
    let mut terms: Vec<Term> = Vec::new();
    for t in &chain.terms {
        let (coefficient, word) = if t.coefficient.is_negative() {
            (-t.coefficient.clone(), t.word.inverse())
        } else {
            (t.coefficient.clone(), t.word.clone())
        };
        let key = word.rotation_key();
        match keys.iter().position(|k| *k == key) {
            Some(i) => terms[i].coefficient += coefficient,
            None => {
                keys.push(key);
                terms.push(Term { coefficient, word });
            }
        }
    }
    terms.retain(|t| !t.coefficient.is_zero());
    Chain::new(terms)
}

/// Coefficient-weighted exponent totals per factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub per_factor: Vec<Vec<Rational>>,
}

impl HomologyClass {
    pub fn is_boundary(&self) -> bool {
        self.per_factor.iter().flatten().all(|q| q.is_zero())
    }
}

pub fn homology_class(chain: &Chain, spec: &GroupSpec) -> HomologyClass {
    let mut per_factor: Vec<Vec<Rational>> = spec
        .factors()
        .iter()
        .map(|f| vec![Rational::zero(); f.rank()])
        .collect();
    for t in &chain.terms {
        for s in t.word.syllables() {
            for (acc, &e) in per_factor[s.factor].iter_mut().zip(&s.exponent) {
                *acc += &t.coefficient * Rational::from_integer(BigInt::from(e));
            }
        }
    }
    HomologyClass { per_factor }
}

/// Returns `(N·chain, N)` with `N` the least common multiple of the
/// coefficient denominators, so every coefficient becomes an integer.
pub fn scale_to_integral(chain: &Chain) -> (Chain, BigInt) {
    let n = denominator_lcm(chain.terms.iter().map(|t| &t.coefficient));
    let scaled = chain.scaled(&Rational::from_integer(n.clone()));
    (scaled, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn free_ab() -> GroupSpec {
        parse_group_spec("Z(a) * Z(b)").unwrap()
    }

    fn syl(factor: usize, e: &[i64]) -> Syllable {
        Syllable::new(factor, e.to_vec())
    }

    #[test]
    fn group_specs() {
        let g = free_ab();
        assert_eq!(g.num_factors(), 2);
        let g = parse_group_spec("Z^2(a,c) * Z(b)").unwrap();
        assert_eq!(g.factors()[0].generators, vec!['a', 'c']);
        assert_eq!(g.rank(1), 1);
        assert_eq!(g.to_string(), "Z^2(a,c) * Z(b)");
        assert!(matches!(
            parse_group_spec("Z(a) * Z(a)"),
            Err(ChainError::DuplicateGenerator { name: 'a', pos: 9 })
        ));
        assert!(matches!(parse_group_spec("Z^0(a)"), Err(ChainError::InvalidRank { .. })));
        assert!(matches!(parse_group_spec("Z(a) Z(b)"), Err(ChainError::Syntax { .. })));
    }

    #[test]
    fn tightening() {
        let w = tighten(&[syl(0, &[1]), syl(0, &[1]), syl(1, &[1]), syl(1, &[1])]).unwrap();
        assert_eq!(w.syllables(), &[syl(0, &[2]), syl(1, &[2])]);
        let w = tighten(&[syl(1, &[1]), syl(0, &[1]), syl(1, &[-1])]).unwrap();
        assert_eq!(w.syllables(), &[syl(0, &[1])]);
        let w = tighten(&[syl(0, &[1]), syl(1, &[1]), syl(0, &[1])]).unwrap();
        assert_eq!(w.syllables(), &[syl(0, &[2]), syl(1, &[1])]);
        assert!(tighten(&[syl(0, &[1]), syl(1, &[1]), syl(1, &[-1]), syl(0, &[-1])]).is_none());
    }

    #[test]
    fn parsing_chains() {
        let g = free_ab();
        let c = parse_chain("abAB", &g).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert_eq!(
            c.terms[0].word.syllables(),
            &[syl(0, &[1]), syl(1, &[1]), syl(0, &[-1]), syl(1, &[-1])]
        );
        let c = parse_chain("a^-2 + b^-2 + a^3 b^3 + a^-1 b^-1", &g).unwrap();
        assert_eq!(c.terms.len(), 4);
        let c = parse_chain("1/2 * abAB", &g).unwrap();
        assert_eq!(c.terms[0].coefficient, rat(1, 2));
        assert!(matches!(parse_chain("abx", &g), Err(ChainError::UnknownGenerator { name: 'x', pos: 2 })));
        assert!(matches!(parse_chain("0 * ab", &g), Err(ChainError::ZeroCoefficient { .. })));
        assert!(matches!(parse_chain("abBA", &g), Err(ChainError::TrivialWord { .. })));
    }

    #[test]
    fn rank_two_syllables_merge() {
        let g = parse_group_spec("Z^2(a,c) * Z(b)").unwrap();
        let c = parse_chain("a^2 c^2 b A B C b A C B", &g).unwrap();
        let s = c.terms[0].word.syllables();
        assert_eq!(s.len(), 8);
        assert_eq!(s[0], syl(0, &[2, 2]));
        assert_eq!(s[6], syl(0, &[-1, -1]));
    }

    #[test]
    fn normalization() {
        let g = free_ab();
        let c = parse_chain("-1 * abAB", &g).unwrap();
        let n = normalize_chain(&c);
        assert_eq!(n.terms[0].coefficient, int(1));
        assert_eq!(n.render(&g), "b a B A");

        let c = parse_chain("abAB + bABa", &g).unwrap();
        let n = normalize_chain(&c);
        assert_eq!(n.terms.len(), 1);
        assert_eq!(n.terms[0].coefficient, int(2));

        let c = parse_chain("abAB + 1/2*ba - 1/2 * ab", &g);
        assert!(c.is_err(), "'-' is not a term separator");
        let c = parse_chain("1/2*ab + 1/2 * ba + 0/1 * ab", &g);
        assert!(matches!(c, Err(ChainError::ZeroCoefficient { .. })));
        let c = parse_chain("1/2*ab + 1/2 * ba", &g).unwrap();
        assert_eq!(normalize_chain(&c).terms[0].coefficient, int(1));
    }

    #[test]
    fn homology() {
        let g = free_ab();
        assert!(homology_class(&parse_chain("abAB", &g).unwrap(), &g).is_boundary());
        let h = homology_class(&parse_chain("a + b", &g).unwrap(), &g);
        assert!(!h.is_boundary());
        assert_eq!(h.per_factor[0], vec![int(1)]);
        let g = parse_group_spec("Z(a) * Z^2(v,u)").unwrap();
        let c = parse_chain("a v^2 A V + u + V U", &g).unwrap();
        assert!(homology_class(&c, &g).is_boundary());
    }

    #[test]
    fn integral_scaling() {
        let g = free_ab();
        let c = parse_chain("1/2 * abAB + 1/3 * aB", &g).unwrap();
        let (s, n) = scale_to_integral(&c);
        assert_eq!(n, BigInt::from(6));
        assert_eq!(s.terms[0].coefficient, int(3));
        assert_eq!(s.terms[1].coefficient, int(2));
        let (_, n) = scale_to_integral(&parse_chain("3/2 * ab", &g).unwrap());
        assert_eq!(n, BigInt::from(2));
        let (_, n) = scale_to_integral(&parse_chain("ab + ba", &g).unwrap());
        assert_eq!(n, BigInt::from(1));
    }

    #[test]
    fn default_group_is_alphabetical() {
        let (g, c) = parse_with_group("baBA", None).unwrap();
        assert_eq!(g.to_string(), "Z(a) * Z(b)");
        assert_eq!(c.terms[0].word.syllables()[0].factor, 1);
    }

    #[test]
    fn render_round_trip() {
        let g = parse_group_spec("Z^2(a,c) * Z(b)").unwrap();
        let c = normalize_chain(&parse_chain("2/3 * a^2 c^-1 b A B + a^3 + A^3", &g).unwrap());
        let text = c.render(&g);
        assert_eq!(normalize_chain(&parse_chain(&text, &g).unwrap()), c);
    }
}
