//! Words over the gTM alphabet `{1, 1̄}` and the gpd alphabet `{a, b}`,
//! the two substitution rules, fixed-point prefixes, the two-sided
//! palindromic fixed point, the 2-block factor map φ, and bounded-depth
//! legality testing.
//!
//! Serialisation: gTM letters print as `1` and `-`, gpd letters as `a`
//! and `b`; two-sided windows print a `|` before absolute position 0.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Params, Result};

/// A letter of one of the two concrete alphabets.
pub trait Letter: Copy + Eq + fmt::Debug {
    fn to_char(self) -> char;
    fn from_char(c: char) -> Option<Self>
    where
        Self: Sized;
}

/// A gTM letter: `1` (weight +1) or `1̄` (weight −1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GtmLetter {
    Plus,
    Minus,
}

impl GtmLetter {
    /// The weight ±1 of the letter.
    pub fn sign(self) -> i8 {
        match self {
            GtmLetter::Plus => 1,
            GtmLetter::Minus => -1,
        }
    }

    /// The bar-swapped letter.
    pub fn flipped(self) -> Self {
        match self {
            GtmLetter::Plus => GtmLetter::Minus,
            GtmLetter::Minus => GtmLetter::Plus,
        }
    }
}

impl Letter for GtmLetter {
    fn to_char(self) -> char {
        match self {
            GtmLetter::Plus => '1',
            GtmLetter::Minus => '-',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '1' => Some(GtmLetter::Plus),
            '-' => Some(GtmLetter::Minus),
            _ => None,
        }
    }
}

/// A generalised period-doubling letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GpdLetter {
    A,
    B,
}

impl Letter for GpdLetter {
    fn to_char(self) -> char {
        match self {
            GpdLetter::A => 'a',
            GpdLetter::B => 'b',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'a' => Some(GpdLetter::A),
            'b' => Some(GpdLetter::B),
            _ => None,
        }
    }
}

/// A finite word with an origin marker for two-sided windows.
///
/// The letter stored at array index `i` sits at absolute position
/// `i + origin_offset`; one-sided words have `origin_offset = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word<A> {
    letters: Vec<A>,
    origin_offset: i64,
}

impl<A: Letter> Word<A> {
    /// A one-sided word starting at absolute position 0.
    pub fn new(letters: Vec<A>) -> Self {
        Word {
            letters,
            origin_offset: 0,
        }
    }

    /// A word whose first stored letter sits at absolute position
    /// `origin_offset`.
    pub fn with_origin(letters: Vec<A>, origin_offset: i64) -> Self {
        Word {
            letters,
            origin_offset,
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[A] {
        &self.letters
    }

    pub fn origin_offset(&self) -> i64 {
        self.origin_offset
    }

    /// The letter at absolute position `pos`, if stored.
    pub fn get(&self, pos: i64) -> Option<A> {
        let idx = pos.checked_sub(self.origin_offset)?;
        if idx < 0 {
            return None;
        }
        self.letters.get(idx as usize).copied()
    }

    /// The reversed word (letters only; the origin stays put).
    pub fn reversed(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word {
            letters,
            origin_offset: self.origin_offset,
        }
    }
}

impl<A: Letter> fmt::Display for Word<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bar_at = -self.origin_offset;
        for (i, letter) in self.letters.iter().enumerate() {
            if bar_at > 0 && i as i64 == bar_at {
                f.write_str("|")?;
            }
            write!(f, "{}", letter.to_char())?;
        }
        Ok(())
    }
}

impl<A: Letter> FromStr for Word<A> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(s.len());
        let mut origin_offset = 0i64;
        for c in s.chars() {
            if c == '|' {
                origin_offset = -(letters.len() as i64);
                continue;
            }
            let letter = A::from_char(c)
                .ok_or_else(|| Error::Domain(format!("unexpected letter {c:?} in word {s:?}")))?;
            letters.push(letter);
        }
        Ok(Word {
            letters,
            origin_offset,
        })
    }
}

/// Applies the gTM substitution `1 ↦ 1^k 1̄^ℓ`, `1̄ ↦ 1̄^k 1^ℓ` letterwise.
pub fn substitute_gtm(p: Params, w: &Word<GtmLetter>) -> Word<GtmLetter> {
    let l_total = p.length() as usize;
    let mut out = Vec::with_capacity(w.len() * l_total);
    for &x in w.letters() {
        for _ in 0..p.k() {
            out.push(x);
        }
        for _ in 0..p.l() {
            out.push(x.flipped());
        }
    }
    Word::with_origin(out, w.origin_offset() * p.length() as i64)
}

/// Applies the gpd substitution `a ↦ b^{k−1} a b^{ℓ−1} b`,
/// `b ↦ b^{k−1} a b^{ℓ−1} a` letterwise.
pub fn substitute_gpd(p: Params, w: &Word<GpdLetter>) -> Word<GpdLetter> {
    let l_total = p.length() as usize;
    let mut out = Vec::with_capacity(w.len() * l_total);
    for &x in w.letters() {
        for _ in 0..p.k() - 1 {
            out.push(GpdLetter::B);
        }
        out.push(GpdLetter::A);
        for _ in 0..p.l() - 1 {
            out.push(GpdLetter::B);
        }
        out.push(match x {
            GpdLetter::A => GpdLetter::B,
            GpdLetter::B => GpdLetter::A,
        });
    }
    Word::with_origin(out, w.origin_offset() * p.length() as i64)
}

/// The letter `v_j` of the one-sided gTM fixed point with `v_0 = 1`,
/// by the direct digit formula: repeatedly split `j = m·L + r` and flip
/// the sign once whenever `r ≥ k`.
pub fn gtm_letter_at(p: Params, j: u64) -> GtmLetter {
    let l_total = u64::from(p.length());
    let k = u64::from(p.k());
    let mut m = j;
    let mut flips = 0u32;
    while m != 0 {
        let r = m % l_total;
        m /= l_total;
        if r >= k {
            flips ^= 1;
        }
    }
    if flips == 0 {
        GtmLetter::Plus
    } else {
        GtmLetter::Minus
    }
}

/// The prefix `v_0 … v_{n−1}` of the one-sided fixed point.
pub fn gtm_fixed_point_prefix(p: Params, n: usize) -> Word<GtmLetter> {
    let letters = (0..n as u64).map(|j| gtm_letter_at(p, j)).collect();
    Word::new(letters)
}

/// The weights `v_0 … v_{n−1}` as `±1` bytes (convenience for averaging).
pub fn gtm_signs(p: Params, n: usize) -> Vec<i8> {
    (0..n as u64).map(|j| gtm_letter_at(p, j).sign()).collect()
}

/// The window `w_{−radius} … w_{radius−1}` of the two-sided palindromic
/// fixed point `w_i = v_i` for `i ≥ 0`, `w_i = v_{−i−1}` for `i < 0`.
pub fn gtm_two_sided_window(p: Params, radius: usize) -> Word<GtmLetter> {
    let mut letters = Vec::with_capacity(2 * radius);
    for i in -(radius as i64)..radius as i64 {
        let j = if i >= 0 { i } else { -i - 1 } as u64;
        letters.push(gtm_letter_at(p, j));
    }
    Word::with_origin(letters, -(radius as i64))
}

/// The 2-block factor map φ: unequal adjacent pair ↦ `a`, equal pair ↦ `b`.
pub fn block_map_phi(w: &Word<GtmLetter>) -> Result<Word<GpdLetter>> {
    if w.len() < 2 {
        return Err(Error::Domain(format!(
            "block map needs at least 2 letters, got {}",
            w.len()
        )));
    }
    let letters = w
        .letters()
        .windows(2)
        .map(|pair| {
            if pair[0] == pair[1] {
                GpdLetter::B
            } else {
                GpdLetter::A
            }
        })
        .collect();
    Ok(Word::with_origin(letters, w.origin_offset()))
}

/// Result of a bounded legality search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Legality {
    /// Whether the word was found in an iterate of the substitution.
    pub legal: bool,
    /// Whether the search depth was large enough for the verdict to be
    /// conclusive at the documented margin (image length ≥ |w| + 2L).
    pub conclusive: bool,
    /// The substitution depth actually scanned.
    pub depth_used: u32,
}

/// Tests whether `w` occurs as a factor of `ρⁿ(1)` or `ρⁿ(1̄)` for some
/// `n ≤ max_iterations`.
///
/// Because `ρⁿ(x)` is a prefix of `ρ^{n+1}(x)`, scanning the deepest
/// iterate of each seed covers all shallower ones. The search is reported
/// as conclusive when the scanned image length reaches `|w| + 2L`; the
/// substitution depth needed to certify legality in general is not known,
/// so this is explicitly a bounded search.
pub fn is_legal(p: Params, w: &Word<GtmLetter>, max_iterations: u32) -> Legality {
    let target = w.len() + 2 * p.length() as usize;
    let mut depth = 0u32;
    let mut plus = Word::new(vec![GtmLetter::Plus]);
    let mut minus = Word::new(vec![GtmLetter::Minus]);
    while depth < max_iterations && plus.len() < target {
        plus = substitute_gtm(p, &plus);
        minus = substitute_gtm(p, &minus);
        depth += 1;
    }
    let legal = contains(plus.letters(), w.letters()) || contains(minus.letters(), w.letters());
    Legality {
        legal,
        conclusive: plus.len() >= target,
        depth_used: depth,
    }
}

fn contains<A: Letter>(haystack: &[A], needle: &[A]) -> bool {
    if needle.is_empty() {
        return true;
    }
    if needle.len() > haystack.len() {
        return false;
    }
    haystack.windows(needle.len()).any(|win| win == needle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, l: u32) -> Params {
        Params::new(k, l).unwrap()
    }

    fn gtm(s: &str) -> Word<GtmLetter> {
        s.parse().unwrap()
    }

    fn gpd(s: &str) -> Word<GpdLetter> {
        s.parse().unwrap()
    }

    #[test]
    fn substitute_gtm_examples() {
        assert_eq!(substitute_gtm(params(1, 1), &gtm("1")).to_string(), "1-");
        assert_eq!(
            substitute_gtm(params(2, 1), &gtm("1-")).to_string(),
            "11---1"
        );
        assert_eq!(substitute_gtm(params(1, 2), &gtm("1")).to_string(), "1--");
    }

    #[test]
    fn substitute_gpd_examples() {
        assert_eq!(substitute_gpd(params(1, 1), &gpd("a")).to_string(), "ab");
        assert_eq!(substitute_gpd(params(2, 1), &gpd("a")).to_string(), "bab");
        assert_eq!(substitute_gpd(params(2, 1), &gpd("b")).to_string(), "baa");
        assert_eq!(substitute_gpd(params(1, 2), &gpd("b")).to_string(), "aba");
    }

    #[test]
    fn fixed_point_prefix_examples() {
        assert_eq!(
            gtm_fixed_point_prefix(params(1, 1), 8).to_string(),
            "1--1-11-"
        );
        assert_eq!(gtm_fixed_point_prefix(params(2, 1), 6).to_string(), "11-11-");
        for (k, l) in [(1, 1), (2, 1), (3, 4)] {
            assert_eq!(gtm_fixed_point_prefix(params(k, l), 1).to_string(), "1");
        }
    }

    #[test]
    fn digit_formula_matches_iteration() {
        for (k, l) in [(1, 1), (2, 1), (1, 2), (3, 2), (5, 5)] {
            let p = params(k, l);
            let mut w = Word::new(vec![GtmLetter::Plus]);
            let n = (p.length() as usize).pow(4).min(4096);
            while w.len() < n {
                w = substitute_gtm(p, &w);
            }
            let direct = gtm_fixed_point_prefix(p, n);
            assert_eq!(&w.letters()[..n], direct.letters(), "({k}, {l})");
        }
    }

    #[test]
    fn two_sided_window_examples() {
        let w = gtm_two_sided_window(params(1, 1), 2);
        assert_eq!(w.to_string(), "-1|1-");
        assert_eq!(w.origin_offset(), -2);
        for (k, l) in [(1, 1), (2, 1), (4, 3)] {
            let w = gtm_two_sided_window(params(k, l), 7);
            assert_eq!(w, w.reversed(), "palindrome for ({k}, {l})");
            for i in 0..7i64 {
                assert_eq!(w.get(i), w.get(-i - 1));
            }
        }
    }

    #[test]
    fn window_is_fixed_under_rho_squared_when_k_equals_l() {
        // For k = ℓ the palindromic completion is a genuine two-sided fixed
        // point of ρ²: substituting the window twice reproduces it on the
        // same absolute index range.
        for (k, l) in [(1, 1), (2, 2), (3, 3)] {
            let p = params(k, l);
            let radius = 6usize;
            let w = gtm_two_sided_window(p, radius);
            let image = substitute_gtm(p, &substitute_gtm(p, &w));
            for i in -(radius as i64)..radius as i64 {
                assert_eq!(image.get(i), w.get(i), "({k}, {l}) at {i}");
            }
        }
    }

    #[test]
    fn window_is_not_fixed_under_rho_squared_when_k_differs_from_l() {
        // For k ≠ ℓ the reflection symmetry and ρ²-invariance are mutually
        // exclusive: reverse(ρ(x)) equals the (ℓ,k)-rule applied to the
        // bar-swapped letter, so ρ² can only fix the palindrome when k = ℓ.
        // Pin the smallest counterexample: for (2,1), ρ²(w)_{−2} = 1̄ while
        // w_{−2} = v_1 = 1. The palindrome itself is still in the hull.
        let p = params(2, 1);
        let w = gtm_two_sided_window(p, 2);
        let image = substitute_gtm(p, &substitute_gtm(p, &w));
        assert_eq!(w.get(-2), Some(GtmLetter::Plus));
        assert_eq!(image.get(-2), Some(GtmLetter::Minus));
    }

    #[test]
    fn block_map_examples() {
        assert_eq!(block_map_phi(&gtm("1-1-")).unwrap().to_string(), "aaa");
        assert_eq!(block_map_phi(&gtm("11--")).unwrap().to_string(), "bab");
        assert!(block_map_phi(&gtm("1")).is_err());

        // Semi-conjugacy spot check for (2,1).
        let p = params(2, 1);
        let lhs = block_map_phi(&substitute_gtm(p, &gtm("1-"))).unwrap();
        assert_eq!(lhs.to_string(), "babba");
        let rhs = substitute_gpd(p, &block_map_phi(&gtm("1-")).unwrap());
        assert_eq!(rhs.to_string(), "bab");
        assert_eq!(&lhs.letters()[..3], rhs.letters());
    }

    #[test]
    fn legality_examples() {
        assert!(!is_legal(params(1, 1), &gtm("111"), 12).legal);
        assert!(is_legal(params(1, 1), &gtm("111"), 12).conclusive);
        assert!(is_legal(params(2, 1), &gtm("111"), 12).legal);
        for (k, l) in [(1, 1), (2, 1), (3, 3)] {
            assert!(is_legal(params(k, l), &gtm("1"), 12).legal);
        }
        // Depth too small to certify anything: flagged inconclusive.
        let shallow = is_legal(params(1, 1), &gtm("1--1-11-"), 1);
        assert!(!shallow.conclusive);
    }

    #[test]
    fn balanced_letters_exact_law() {
        // In the prefix of length L^n the letter counts differ by exactly
        // |k−ℓ|^n (the substitution matrix has second eigenvalue k−ℓ).
        for (k, l) in [(1, 1), (2, 1), (5, 1), (2, 2), (3, 2)] {
            let p = params(k, l);
            for n in 0..=4u32 {
                let len = (p.length() as u64).pow(n);
                if len > 100_000 {
                    break;
                }
                let sum: i64 = gtm_signs(p, len as usize)
                    .iter()
                    .map(|&s| i64::from(s))
                    .sum();
                assert_eq!(sum.abs(), p.k_minus_l().abs().pow(n), "({k}, {l}), n={n}");
            }
        }
    }

    #[test]
    fn serialisation_round_trip() {
        let w = gtm_two_sided_window(params(2, 1), 5);
        let s = w.to_string();
        let back: Word<GtmLetter> = s.parse().unwrap();
        assert_eq!(back, w);
        assert!("1x-".parse::<Word<GtmLetter>>().is_err());
    }
}
