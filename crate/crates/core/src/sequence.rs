//! Sequences of a base pulse `P` and its phase-reversed twin `P̄`.
//!
//! Tokens act left to right in time. In text form `P` is the base pulse and
//! `Q` its twin, so the 8-pulse SA sequence reads `PPQQQQPP`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::order::{estimate_order, OrderEstimate};
use crate::pulse::BasePulse;
use crate::su2::Component;

/// Canonical labels in increasing length.
pub const CANONICAL_LABELS: [&str; 8] = ["2", "4", "8", "16", "32", "64", "128", "256"];

/// Relative tolerance on the leading σ_z coefficient for a complement.
pub const COMPLEMENT_COEFF_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Token {
    /// `P`
    Plain,
    /// `P̄`
    Barred,
}

impl Token {
    pub fn flipped(self) -> Self {
        match self {
            Token::Plain => Token::Barred,
            Token::Barred => Token::Plain,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Token::Plain => 'P',
            Token::Barred => 'Q',
        }
    }

    pub fn is_barred(self) -> bool {
        self == Token::Barred
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceExpr {
    name: String,
    tokens: Vec<Token>,
}

impl SequenceExpr {
    pub fn new(name: impl Into<String>, tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(Self {
            name: name.into(),
            tokens,
        })
    }

    /// Parses a `P`/`Q` token string.
    pub fn from_tokens(text: &str) -> Result<Self> {
        let tokens = text
            .chars()
            .map(|c| match c {
                'P' => Ok(Token::Plain),
                'Q' => Ok(Token::Barred),
                _ => Err(Error::UnknownSequence(text.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(text, tokens)
    }

    /// Accepts a canonical label (`"16"`) or a token string (`"PQQP"`).
    pub fn parse(text: &str) -> Result<Self> {
        if CANONICAL_LABELS.contains(&text) {
            build_canonical(text)
        } else {
            Self::from_tokens(text)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn barred_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_barred()).count()
    }

    pub fn to_text(&self) -> String {
        self.tokens.iter().map(|t| t.as_char()).collect()
    }

    /// Sign of `a` for ideal pulses at zero offset: `+1` for a `2kπ` rotation
    /// with `k` even, `-1` for `k` odd. `None` when the length is odd and the
    /// product is a π rotation rather than `±1`.
    ///
    /// With `P = iσ_y` and `P̄ = -iσ_y` the product of `N` tokens is
    /// `(-1)^(N/2 + #P̄)`.
    pub fn ideal_sign(&self) -> Option<i8> {
        if !self.len().is_multiple_of(2) {
            return None;
        }
        Some(
            if (self.len() / 2 + self.barred_count()).is_multiple_of(2) {
                1
            } else {
                -1
            },
        )
    }

    /// Copy with the token at `index` phase-reversed.
    pub fn flip(&self, index: usize) -> Self {
        let mut tokens = self.tokens.clone();
        tokens[index] = tokens[index].flipped();
        Self {
            name: format!("{}~{index}", self.name),
            tokens,
        }
    }
}

impl fmt::Display for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn concat(s1: &SequenceExpr, s2: &SequenceExpr) -> SequenceExpr {
    let mut tokens = s1.tokens.clone();
    tokens.extend_from_slice(&s2.tokens);
    SequenceExpr {
        name: format!("{}{}", s1.name, s2.name),
        tokens,
    }
}

pub fn bar_seq(s: &SequenceExpr) -> SequenceExpr {
    SequenceExpr {
        name: format!("bar({})", s.name),
        tokens: s.tokens.iter().map(|t| t.flipped()).collect(),
    }
}

/// `s s̄`
pub fn antisymmetrize(s: &SequenceExpr) -> SequenceExpr {
    concat(s, &bar_seq(s)).with_name(format!("AS({})", s.name))
}

/// `s s̄ s̄ s`
pub fn sa(s: &SequenceExpr) -> SequenceExpr {
    let b = bar_seq(s);
    concat(&concat(s, &b), &concat(&b, s)).with_name(format!("SA({})", s.name))
}

/// `s1 s̄1 s2 s̄2` without any checks.
fn combine_parts(s1: &SequenceExpr, s2: &SequenceExpr) -> SequenceExpr {
    concat(&antisymmetrize(s1), &antisymmetrize(s2))
        .with_name(format!("C({},{})", s1.name, s2.name))
}

fn leading_z(s: &SequenceExpr, base: &BasePulse) -> Result<OrderEstimate> {
    let est = estimate_order(s, base, Component::DeltaZ)?;
    if est.vanishing {
        return Err(Error::Precondition(format!(
            "sequence `{}` has no resolvable sigma_z error",
            s.name
        )));
    }
    Ok(est)
}

/// `s1 s̄1 s2 s̄2`, where `s1` is an even-`k` and `s2` an odd-`k` `2kπ`
/// rotation with equal leading σ_z order under `base`.
pub fn combine(s1: &SequenceExpr, s2: &SequenceExpr, base: &BasePulse) -> Result<SequenceExpr> {
    if s1.ideal_sign() != Some(1) {
        return Err(Error::Precondition(format!(
            "winding: first sequence `{}` must compose to +1 at zero offset",
            s1.name
        )));
    }
    if s2.ideal_sign() != Some(-1) {
        return Err(Error::Precondition(format!(
            "winding: second sequence `{}` must compose to -1 at zero offset",
            s2.name
        )));
    }
    let q1 = leading_z(s1, base)?;
    let q2 = leading_z(s2, base)?;
    if (q1.exponent - q2.exponent).abs() >= 0.5 {
        return Err(Error::Precondition(format!(
            "order mismatch: sigma_z exponents {:.2} and {:.2}",
            q1.exponent, q2.exponent
        )));
    }
    Ok(combine_parts(s1, s2))
}

fn matches_leading_z(
    target: &OrderEstimate,
    cand: &SequenceExpr,
    base: &BasePulse,
) -> Result<bool> {
    if cand.ideal_sign() != Some(-1) {
        return Ok(false);
    }
    let est = match estimate_order(cand, base, Component::DeltaZ) {
        Ok(e) if !e.vanishing => e,
        Ok(_) | Err(Error::FitFailure { .. }) => return Ok(false),
        Err(e) => return Err(e),
    };
    let same_order = (est.exponent - target.exponent).abs() < 0.5;
    let rel = (est.coefficient - target.coefficient).abs() / target.coefficient.abs();
    Ok(same_order && rel <= COMPLEMENT_COEFF_TOLERANCE)
}

/// Whether `cand` is an odd-winding partner of `s` with the same leading
/// σ_z order and coefficient.
pub fn is_complement(s: &SequenceExpr, cand: &SequenceExpr, base: &BasePulse) -> Result<bool> {
    if cand.len() != s.len() {
        return Ok(false);
    }
    let target = leading_z(s, base)?;
    matches_leading_z(&target, cand, base)
}

/// First same-length odd-winding partner of `s`, searching single token
/// flips in order and then flip pairs.
pub fn find_complement(s: &SequenceExpr, base: &BasePulse) -> Result<SequenceExpr> {
    if s.ideal_sign() != Some(1) {
        return Err(Error::Precondition(format!(
            "winding: `{}` must compose to +1 at zero offset",
            s.name
        )));
    }
    let target = leading_z(s, base)?;
    for i in 0..s.len() {
        let cand = s.flip(i);
        if matches_leading_z(&target, &cand, base)? {
            return Ok(cand);
        }
    }
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            let cand = s.flip(i).flip(j);
            if matches_leading_z(&target, &cand, base)? {
                return Ok(cand);
            }
        }
    }
    Err(Error::ComplementNotFound(s.name.clone()))
}

/// Every single-flip complement of `s`, in token order.
pub fn complement_candidates(s: &SequenceExpr, base: &BasePulse) -> Result<Vec<SequenceExpr>> {
    let target = leading_z(s, base)?;
    let mut found = Vec::new();
    for i in 0..s.len() {
        let cand = s.flip(i);
        if matches_leading_z(&target, &cand, base)? {
            found.push(cand);
        }
    }
    Ok(found)
}

/// The building blocks `A`, `B`, `C`, `D`, `F` of the canonical family.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub a: SequenceExpr,
    pub b: SequenceExpr,
    pub c: SequenceExpr,
    pub d: SequenceExpr,
    pub f: SequenceExpr,
}

pub fn blocks() -> Blocks {
    let pp = SequenceExpr::from_tokens("PP").expect("valid");
    let pq = SequenceExpr::from_tokens("PQ").expect("valid");
    let a = combine_parts(&pq, &pp).with_name("A");
    let b = a.flip(0).with_name("B");
    let c = combine_parts(&a, &b).with_name("C");
    let d = concat(&concat(&a, &bar_seq(&a)), &concat(&a, &bar_seq(&b))).with_name("D");
    let f = combine_parts(&c, &d).with_name("F");
    Blocks { a, b, c, d, f }
}

pub fn build_canonical(label: &str) -> Result<SequenceExpr> {
    let pp = || SequenceExpr::from_tokens("PP").expect("valid");
    let seq = match label {
        "2" => pp(),
        "4" => antisymmetrize(&pp()),
        "8" => sa(&pp()),
        "16" => antisymmetrize(&blocks().a),
        "32" => sa(&blocks().a),
        "64" => antisymmetrize(&blocks().c),
        "128" => sa(&blocks().c),
        "256" => antisymmetrize(&blocks().f),
        _ => return Err(Error::UnknownSequence(label.to_string())),
    };
    Ok(seq.with_name(label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::simple_pi;

    fn seq(text: &str) -> SequenceExpr {
        SequenceExpr::from_tokens(text).unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat(&seq("P"), &seq("Q")).to_text(), "PQ");
        assert_eq!(
            concat(&seq("PP"), &seq("QQ")).to_text(),
            build_canonical("4").unwrap().to_text()
        );
        assert!(matches!(
            SequenceExpr::new("e", vec![]),
            Err(Error::EmptySequence)
        ));
        assert!(matches!(
            SequenceExpr::from_tokens(""),
            Err(Error::EmptySequence)
        ));
    }

    #[test]
    fn bar_seq_examples() {
        assert_eq!(bar_seq(&seq("PQ")).to_text(), "QP");
        let s = seq("PQQPQ");
        assert_eq!(bar_seq(&bar_seq(&s)).tokens(), s.tokens());
        let a = blocks().a;
        assert_eq!(a.to_text(), "PQQPPPQQ");
        assert_eq!(bar_seq(&a).to_text(), "QPPQQQPP");
    }

    #[test]
    fn antisymmetrize_and_sa() {
        assert_eq!(antisymmetrize(&seq("PP")).to_text(), "PPQQ");
        assert_eq!(sa(&seq("PP")).to_text(), "PPQQQQPP");
        let a = blocks().a;
        assert_eq!(
            antisymmetrize(&a).to_text(),
            build_canonical("16").unwrap().to_text()
        );
        assert_eq!(sa(&a).to_text(), build_canonical("32").unwrap().to_text());
        assert_eq!(antisymmetrize(&a).len(), 2 * a.len());
        assert_eq!(sa(&a).len(), 4 * a.len());
    }

    #[test]
    fn blocks_match_construction() {
        let b = blocks();
        assert_eq!(b.b.to_text(), "QQQPPPQQ");
        assert_eq!(b.c.len(), 32);
        assert_eq!(b.d.len(), 32);
        assert_eq!(b.f.len(), 128);
        assert_eq!(b.a.ideal_sign(), Some(1));
        assert_eq!(b.b.ideal_sign(), Some(-1));
        assert_eq!(b.c.ideal_sign(), Some(1));
        assert_eq!(b.d.ideal_sign(), Some(-1));
        // D differs from C = A Ā B B̄ only in the first token of the third block
        assert_eq!(b.c.flip(16).tokens(), b.d.tokens());
    }

    #[test]
    fn canonical_family() {
        for label in CANONICAL_LABELS {
            let s = build_canonical(label).unwrap();
            assert_eq!(s.len(), label.parse::<usize>().unwrap());
            assert_eq!(s.name(), label);
            let n = s.len();
            let expected = if (n / 2).is_multiple_of(2) { 1 } else { -1 };
            assert_eq!(s.ideal_sign(), Some(expected), "{label}");
        }
        assert_eq!(build_canonical("2").unwrap().to_text(), "PP");
        assert_eq!(build_canonical("8").unwrap().to_text(), "PPQQQQPP");
        assert!(build_canonical("16").unwrap().to_text().starts_with("PQQP"));
        let s64 = build_canonical("64").unwrap();
        assert_eq!(s64.barred_count(), 32);
        assert!(matches!(
            build_canonical("3"),
            Err(Error::UnknownSequence(_))
        ));
    }

    #[test]
    fn parse_accepts_labels_and_tokens() {
        assert_eq!(SequenceExpr::parse("8").unwrap().to_text(), "PPQQQQPP");
        assert_eq!(SequenceExpr::parse("PQQ").unwrap().len(), 3);
        assert!(matches!(
            SequenceExpr::parse("PXQ"),
            Err(Error::UnknownSequence(_))
        ));
        assert!(matches!(
            SequenceExpr::parse("17"),
            Err(Error::UnknownSequence(_))
        ));
    }

    #[test]
    fn ideal_sign_odd_length() {
        assert_eq!(seq("PQP").ideal_sign(), None);
    }

    #[test]
    fn combine_builds_a() {
        let base = simple_pi();
        let a = combine(&seq("PQ"), &seq("PP"), &base).unwrap();
        assert_eq!(a.tokens(), blocks().a.tokens());
    }

    #[test]
    fn combine_builds_c() {
        let base = simple_pi();
        let b = blocks();
        let c = combine(&b.a, &b.b, &base).unwrap();
        assert_eq!(c.tokens(), b.c.tokens());
    }

    #[test]
    fn combine_rejects_bad_winding() {
        let base = simple_pi();
        let err = combine(&seq("PQ"), &seq("QP"), &base).unwrap_err();
        assert!(err.to_string().contains("winding"), "{err}");
        let err = combine(&seq("PP"), &seq("PP"), &base).unwrap_err();
        assert!(err.to_string().contains("winding"), "{err}");
    }

    #[test]
    fn combine_rejects_order_mismatch() {
        // A has a fifth-order sigma_z error, PP a third-order one
        let base = simple_pi();
        let err = combine(&blocks().a, &seq("PP"), &base).unwrap_err();
        assert!(err.to_string().contains("order mismatch"), "{err}");
    }

    #[test]
    fn complement_of_a_flips_first_token() {
        let base = simple_pi();
        let b = find_complement(&blocks().a, &base).unwrap();
        assert_eq!(b.to_text(), "QQQPPPQQ");
    }

    #[test]
    fn complement_of_elementary_pair() {
        let base = simple_pi();
        let c = find_complement(&seq("PQ"), &base).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.ideal_sign(), Some(-1));
        assert!(is_complement(&seq("PQ"), &seq("PP"), &base).unwrap());
    }

    #[test]
    fn d_complements_c() {
        let base = simple_pi();
        let b = blocks();
        assert!(is_complement(&b.c, &b.d, &base).unwrap());
        assert!(!is_complement(&b.c, &b.c, &base).unwrap());
    }

    #[test]
    fn complement_requires_even_winding() {
        let base = simple_pi();
        assert!(matches!(
            find_complement(&seq("PP"), &base),
            Err(Error::Precondition(_))
        ));
    }
}
