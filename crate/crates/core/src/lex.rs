//! A generic C-family lexer for source code, and a whitespace/punctuation
//! tokenizer for natural-language summaries.
//!
//! The code lexer recognizes identifiers, string/char literals, integer and
//! float literals (including hex and type suffixes), line and block comments
//! (discarded), and single-character punctuation. It deliberately knows no
//! keywords: `int` and `x` are both Identifier tokens, which is all the
//! downstream operators need.

use crate::error::{Error, Result};
use crate::token::{Origin, Token, TokenKind, TokenSeq};

/// Lexes source code into a Code-origin token sequence.
pub fn lex_code(source: &str) -> Result<TokenSeq> {
    if source.is_empty() {
        return Err(Error::EmptyInput);
    }
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'/' && i + 1 < bytes.len() {
            match bytes[i + 1] {
                b'/' => {
                    while i < bytes.len() && bytes[i] != b'\n' {
                        i += 1;
                    }
                    continue;
                }
                b'*' => {
                    let mut j = i + 2;
                    while j + 1 < bytes.len() && !(bytes[j] == b'*' && bytes[j + 1] == b'/') {
                        j += 1;
                    }
                    // unterminated block comment runs to EOF
                    i = if j + 1 < bytes.len() { j + 2 } else { bytes.len() };
                    continue;
                }
                _ => {}
            }
        }
        if b == b'"' || b == b'\'' {
            let (tok, next) = lex_string(source, i, b)?;
            tokens.push(tok);
            i = next;
            continue;
        }
        if b.is_ascii_digit() {
            let (tok, next) = lex_number(source, i);
            tokens.push(tok);
            i = next;
            continue;
        }
        if b.is_ascii_alphabetic() || b == b'_' || b == b'$' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$')
            {
                i += 1;
            }
            tokens.push(Token::new(&source[start..i], TokenKind::Identifier));
            continue;
        }
        // any other byte (or the start of a multi-byte char) is punctuation
        let ch_len = source[i..].chars().next().map(char::len_utf8).unwrap_or(1);
        tokens.push(Token::new(&source[i..i + ch_len], TokenKind::Punctuation));
        i += ch_len;
    }
    Ok(TokenSeq::new(tokens, Origin::Code))
}

fn lex_string(source: &str, start: usize, quote: u8) -> Result<(Token, usize)> {
    let bytes = source.as_bytes();
    let mut i = start + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b if b == quote => {
                return Ok((Token::new(&source[start..=i], TokenKind::StringLiteral), i + 1));
            }
            b'\n' => break,
            _ => i += 1,
        }
    }
    Err(Error::Lex {
        offset: start,
        message: "unterminated string literal".into(),
    })
}

fn lex_number(source: &str, start: usize) -> (Token, usize) {
    let bytes = source.as_bytes();
    let mut i = start;
    if bytes[i] == b'0' && i + 1 < bytes.len() && (bytes[i + 1] | 0x20) == b'x' {
        i += 2;
        while i < bytes.len() && bytes[i].is_ascii_hexdigit() {
            i += 1;
        }
    } else {
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < bytes.len() && (bytes[i] | 0x20) == b'e' {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                i = j;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
        }
    }
    // type suffix (5L, 1.0f, 3d)
    if i < bytes.len() && matches!(bytes[i] | 0x20, b'l' | b'f' | b'd') {
        i += 1;
    }
    (Token::new(&source[start..i], TokenKind::NumberLiteral), i)
}

/// Tokenizes a summary: whitespace split, punctuation separated out,
/// words lowercased.
pub fn tokenize_summary(text: &str) -> TokenSeq {
    tokenize_summary_with(text, true)
}

/// Summary tokenization with lowercasing as an explicit switch.
pub fn tokenize_summary_with(text: &str, lowercase: bool) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let mut word = String::new();
        for ch in chunk.chars() {
            if ch.is_alphanumeric() {
                if lowercase {
                    word.extend(ch.to_lowercase());
                } else {
                    word.push(ch);
                }
            } else {
                if !word.is_empty() {
                    tokens.push(Token::new(std::mem::take(&mut word), TokenKind::Word));
                }
                tokens.push(Token::new(ch.to_string(), TokenKind::Punctuation));
            }
        }
        if !word.is_empty() {
            tokens.push(Token::new(word, TokenKind::Word));
        }
    }
    TokenSeq::new(tokens, Origin::Summary)
}
