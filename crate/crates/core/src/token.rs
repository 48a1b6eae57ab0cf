//! Token and token-sequence types shared by the lexer, the pre-processing
//! operators, and the metrics.

use serde::{Deserialize, Serialize};

pub const STRING_PLACEHOLDER: &str = "<STRING>";
pub const NUM_PLACEHOLDER: &str = "<NUM>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    StringLiteral,
    NumberLiteral,
    Punctuation,
    Placeholder,
    Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Code,
    Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub lexeme: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(lexeme: impl Into<String>, kind: TokenKind) -> Self {
        let lexeme = lexeme.into();
        debug_assert!(!lexeme.is_empty(), "token lexeme must be non-empty");
        Token { lexeme, kind }
    }

    pub fn placeholder_string() -> Self {
        Token::new(STRING_PLACEHOLDER, TokenKind::Placeholder)
    }

    pub fn placeholder_num() -> Self {
        Token::new(NUM_PLACEHOLDER, TokenKind::Placeholder)
    }
}

/// An ordered token sequence. All metrics and operators act on these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub tokens: Vec<Token>,
    pub origin: Origin,
}

impl TokenSeq {
    pub fn new(tokens: Vec<Token>, origin: Origin) -> Self {
        TokenSeq { tokens, origin }
    }

    /// Builds a sequence of plain tokens from lexemes, all with the given kind.
    pub fn from_lexemes<I, S>(lexemes: I, kind: TokenKind, origin: Origin) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TokenSeq {
            tokens: lexemes
                .into_iter()
                .map(|l| Token::new(l, kind))
                .collect(),
            origin,
        }
    }

    /// Summary-origin sequence of pre-tokenized words, as read from record files.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_lexemes(words, TokenKind::Word, Origin::Summary)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lexemes(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.lexeme.as_str())
    }

    /// Space-joined lexemes, the serialization used by the CLI.
    pub fn render(&self) -> String {
        self.lexemes().collect::<Vec<_>>().join(" ")
    }
}
