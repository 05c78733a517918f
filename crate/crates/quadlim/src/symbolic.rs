//! Itinerary symbols and the parity-lexicographic (signed) order on words.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// One itinerary symbol. `Crit` marks an exact critical hit (within the tie
/// tolerance) and acts as a wildcard in symbol-for-symbol comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    Zero,
    One,
    Crit,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Crit => 'C',
        }
    }

    /// Rank within the parity order: 0 < C < 1 when the preceding parity is
    /// even, reversed when odd.
    fn rank(self, even_parity: bool) -> i8 {
        let base = match self {
            Symbol::Zero => 0,
            Symbol::Crit => 1,
            Symbol::One => 2,
        };
        if even_parity {
            base
        } else {
            -base
        }
    }
}

/// A finite itinerary word over {0, 1, C}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItineraryWord(pub Vec<Symbol>);

impl ItineraryWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn suffix(&self, k: usize) -> &[Symbol] {
        &self.0[k.min(self.0.len())..]
    }

    pub fn parse(s: &str) -> Option<ItineraryWord> {
        let mut v = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => v.push(Symbol::Zero),
                '1' => v.push(Symbol::One),
                'C' | 'c' => v.push(Symbol::Crit),
                ' ' => {}
                _ => return None,
            }
        }
        Some(ItineraryWord(v))
    }
}

impl fmt::Display for ItineraryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// Parity-lexicographic comparison of two words, truncated to the shorter
/// length. Words agreeing through a shared `C` (or through the truncation
/// depth) compare equal: a common exact critical hit pins the same point.
pub fn cmp_parity_lex(a: &[Symbol], b: &[Symbol]) -> Ordering {
    let n = a.len().min(b.len());
    let mut even = true;
    for i in 0..n {
        if a[i] == b[i] {
            match a[i] {
                Symbol::One => even = !even,
                Symbol::Crit => return Ordering::Equal,
                Symbol::Zero => {}
            }
            continue;
        }
        return a[i].rank(even).cmp(&b[i].rank(even));
    }
    Ordering::Equal
}

/// Admissibility against a kneading word: every shifted suffix must not
/// exceed the kneading word in parity-lexicographic order.
pub fn is_admissible(word: &[Symbol], kneading: &[Symbol]) -> bool {
    for k in 0..word.len() {
        if cmp_parity_lex(&word[k..], kneading) == Ordering::Greater {
            return false;
        }
    }
    true
}

/// Symbol-for-symbol equality with `C` acting as a wildcard on either side.
pub fn words_match_wildcard(a: &[Symbol], b: &[Symbol]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(&x, &y)| x == y || x == Symbol::Crit || y == Symbol::Crit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ItineraryWord {
        ItineraryWord::parse(s).unwrap()
    }

    #[test]
    fn parity_order_basics() {
        // first symbol decides at even parity
        assert_eq!(cmp_parity_lex(&w("01").0, &w("10").0), Ordering::Less);
        // after a single 1, order reverses: 11... < 10...
        assert_eq!(cmp_parity_lex(&w("11").0, &w("10").0), Ordering::Less);
        // everything is <= 1000... (the full-map kneading word)
        for s in ["0000", "0101", "1111", "1010", "1000"] {
            assert_ne!(cmp_parity_lex(&w(s).0, &w("1000").0), Ordering::Greater);
        }
    }

    #[test]
    fn golden_kneading_is_self_admissible() {
        let k = w("10C10C10C");
        assert!(is_admissible(&k.0, &k.0));
        // 100 exceeds the golden word: third symbol 0 > C at odd parity
        assert_eq!(cmp_parity_lex(&w("100").0, &w("10C").0), Ordering::Greater);
    }

    #[test]
    fn wildcard_matching() {
        assert!(words_match_wildcard(&w("10C").0, &w("101").0));
        assert!(words_match_wildcard(&w("10C").0, &w("100").0));
        assert!(!words_match_wildcard(&w("10C").0, &w("110").0));
    }
}
