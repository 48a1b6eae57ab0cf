//! The four code pre-processing operators and their 16 combinations.
//!
//! R replaces string/number literals with generic placeholders, S splits
//! identifiers on camelCase and snake_case, F filters punctuation, L
//! lowercases. A combination is written as a 4-bit string in R,S,F,L order
//! ("1101" enables R, S, L). Inside a combination the operators always run
//! in the order R, S, F, L so placeholders are introduced before splitting
//! and survive case folding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::token::{Origin, Token, TokenKind, TokenSeq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PreprocessCombo {
    pub replace_literals: bool,
    pub split_identifiers: bool,
    pub filter_punct: bool,
    pub lowercase: bool,
}

impl PreprocessCombo {
    pub const fn new(r: bool, s: bool, f: bool, l: bool) -> Self {
        PreprocessCombo {
            replace_literals: r,
            split_identifiers: s,
            filter_punct: f,
            lowercase: l,
        }
    }

    pub const NONE: PreprocessCombo = PreprocessCombo::new(false, false, false, false);
    pub const ALL: PreprocessCombo = PreprocessCombo::new(true, true, true, true);

    /// All 16 combinations, in ascending bit order "0000".."1111".
    pub fn all() -> impl Iterator<Item = PreprocessCombo> {
        (0u8..16).map(|bits| {
            PreprocessCombo::new(
                bits & 0b1000 != 0,
                bits & 0b0100 != 0,
                bits & 0b0010 != 0,
                bits & 0b0001 != 0,
            )
        })
    }

    pub fn flag(&self, operator: Operator) -> bool {
        match operator {
            Operator::R => self.replace_literals,
            Operator::S => self.split_identifiers,
            Operator::F => self.filter_punct,
            Operator::L => self.lowercase,
        }
    }
}

impl fmt::Display for PreprocessCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for flag in [
            self.replace_literals,
            self.split_identifiers,
            self.filter_punct,
            self.lowercase,
        ] {
            write!(f, "{}", if flag { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for PreprocessCombo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidCombo(s.to_string())),
            })
            .collect::<Result<_>>()?;
        if bits.len() != 4 {
            return Err(Error::InvalidCombo(s.to_string()));
        }
        Ok(PreprocessCombo::new(bits[0], bits[1], bits[2], bits[3]))
    }
}

/// One of the four operators, in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    R,
    S,
    F,
    L,
}

impl Operator {
    pub const ALL: [Operator; 4] = [Operator::R, Operator::S, Operator::F, Operator::L];

    pub fn letter(&self) -> char {
        match self {
            Operator::R => 'R',
            Operator::S => 'S',
            Operator::F => 'F',
            Operator::L => 'L',
        }
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(Operator::R),
            "S" | "s" => Ok(Operator::S),
            "F" | "f" => Ok(Operator::F),
            "L" | "l" => Ok(Operator::L),
            _ => Err(Error::InvalidCombo(s.to_string())),
        }
    }
}

/// Operator R: string literals become `<STRING>`, number literals `<NUM>`.
pub fn op_replace_literals(seq: &TokenSeq) -> Result<TokenSeq> {
    if seq.origin != Origin::Code {
        return Err(Error::WrongOrigin {
            expected: Origin::Code,
        });
    }
    let tokens = seq
        .tokens
        .iter()
        .map(|t| match t.kind {
            TokenKind::StringLiteral => Token::placeholder_string(),
            TokenKind::NumberLiteral => Token::placeholder_num(),
            _ => t.clone(),
        })
        .collect();
    Ok(TokenSeq::new(tokens, seq.origin))
}

/// Operator S: identifiers are split on underscores and case transitions.
pub fn op_split_identifiers(seq: &TokenSeq) -> TokenSeq {
    let mut tokens = Vec::with_capacity(seq.tokens.len());
    for t in &seq.tokens {
        if t.kind == TokenKind::Identifier {
            let parts = split_identifier(&t.lexeme);
            if parts.is_empty() {
                // all-underscore identifiers have nothing to split into
                tokens.push(t.clone());
            } else {
                tokens.extend(parts.into_iter().map(|p| Token::new(p, t.kind)));
            }
        } else {
            tokens.push(t.clone());
        }
    }
    TokenSeq::new(tokens, seq.origin)
}

/// Splits one identifier into subtokens. Underscores are removed; a new
/// subtoken starts at a lower/digit to upper transition, and an upper-case
/// run breaks before its last letter when a lower-case letter follows
/// ("HTTPServer" -> "HTTP", "Server"). Letter/digit boundaries do not split.
pub fn split_identifier(ident: &str) -> Vec<String> {
    let mut parts = Vec::new();
    for piece in ident.split('_') {
        let chars: Vec<char> = piece.chars().collect();
        if chars.is_empty() {
            continue;
        }
        let mut start = 0;
        for i in 1..chars.len() {
            let prev = chars[i - 1];
            let cur = chars[i];
            let boundary = if cur.is_uppercase() {
                if prev.is_lowercase() || prev.is_ascii_digit() {
                    true
                } else {
                    // acronym rule: split before the last upper of a run
                    prev.is_uppercase() && chars.get(i + 1).is_some_and(|c| c.is_lowercase())
                }
            } else {
                false
            };
            if boundary {
                parts.push(chars[start..i].iter().collect());
                start = i;
            }
        }
        parts.push(chars[start..].iter().collect());
    }
    parts
}

/// Operator F: removes punctuation tokens. Placeholders are kept.
pub fn op_filter_punct(seq: &TokenSeq) -> TokenSeq {
    let tokens = seq
        .tokens
        .iter()
        .filter(|t| t.kind != TokenKind::Punctuation)
        .cloned()
        .collect();
    TokenSeq::new(tokens, seq.origin)
}

/// Operator L: lowercases every lexeme except placeholders.
pub fn op_lowercase(seq: &TokenSeq) -> TokenSeq {
    let tokens = seq
        .tokens
        .iter()
        .map(|t| {
            if t.kind == TokenKind::Placeholder {
                t.clone()
            } else {
                Token::new(t.lexeme.to_lowercase(), t.kind)
            }
        })
        .collect();
    TokenSeq::new(tokens, seq.origin)
}

/// Applies the enabled operators of `combo` in the fixed order R, S, F, L.
pub fn apply_combo(combo: PreprocessCombo, seq: &TokenSeq) -> Result<TokenSeq> {
    let mut out = seq.clone();
    if combo.replace_literals {
        out = op_replace_literals(&out)?;
    }
    if combo.split_identifiers {
        out = op_split_identifiers(&out);
    }
    if combo.filter_punct {
        out = op_filter_punct(&out);
    }
    if combo.lowercase {
        out = op_lowercase(&out);
    }
    Ok(out)
}
