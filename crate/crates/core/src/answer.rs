//! Answer equality.
//!
//! By default answers are compared after Unicode NFC normalization,
//! whitespace trimming and lowercasing. Strict mode compares raw strings.

use alloc::borrow::Cow;
use alloc::string::String;
use unicode_normalization::UnicodeNormalization;

/// The `Eq(x, y)` predicate applied to predicted and gold answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnswerEq {
    #[default]
    Normalized,
    Strict,
}

impl AnswerEq {
    pub fn from_strict_flag(strict: bool) -> Self {
        if strict {
            AnswerEq::Strict
        } else {
            AnswerEq::Normalized
        }
    }

    /// Canonical form of an answer under this mode.
    pub fn canonical<'a>(&self, answer: &'a str) -> Cow<'a, str> {
        match self {
            AnswerEq::Strict => Cow::Borrowed(answer),
            AnswerEq::Normalized => {
                let trimmed = answer.trim();
                let already = trimmed.len() == answer.len()
                    && trimmed.is_ascii()
                    && !trimmed.bytes().any(|b| b.is_ascii_uppercase());
                if already {
                    Cow::Borrowed(answer)
                } else {
                    let nfc: String = trimmed.nfc().collect();
                    Cow::Owned(nfc.to_lowercase())
                }
            }
        }
    }

    pub fn eq(&self, a: &str, b: &str) -> bool {
        match self {
            AnswerEq::Strict => a == b,
            AnswerEq::Normalized => a == b || self.canonical(a) == self.canonical(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_equality() {
        let eq = AnswerEq::Normalized;
        assert!(eq.eq("Red", " red "));
        assert!(eq.eq("caf\u{e9}", "cafe\u{301}"));
        assert!(!eq.eq("red", "blue"));
        assert!(!eq.eq("red", "re d"));
    }

    #[test]
    fn strict_equality() {
        let eq = AnswerEq::Strict;
        assert!(eq.eq("red", "red"));
        assert!(!eq.eq("Red", "red"));
        assert!(!eq.eq("red ", "red"));
    }
}
