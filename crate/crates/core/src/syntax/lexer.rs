//! Tokens of `.mem` and `.theta` files.

use std::sync::Arc;

use super::diagnostic::{Diagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    Bar,
    BarBar,
    Bang,
    Caret,
    At,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::Bang => "!",
            Tok::Caret => "^",
            Tok::At => "@",
            Tok::Ident(_) | Tok::Nat(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens, ending with `Eof`. Stops at the first
/// character that cannot start a token.
pub fn lex(file: &Arc<str>, text: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let span = |line, column, length| SourceSpan { file: file.clone(), line, column, length };

    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| is_ident_char(**c)) {
                s.push(c);
                chars.next();
                col += 1;
            }
            let len = s.chars().count();
            out.push(Token { tok: Tok::Ident(s), span: span(l0, c0, len) });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                chars.next();
                col += 1;
            }
            let len = s.len();
            let Ok(n) = s.parse() else {
                return Err(Diagnostic::error(span(l0, c0, len), format!("number `{s}` is too large")));
            };
            out.push(Token { tok: Tok::Nat(n), span: span(l0, c0, len) });
            continue;
        }
        chars.next();
        col += 1;
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '!' => Tok::Bang,
            '^' => Tok::Caret,
            '@' => Tok::At,
            '|' => {
                if chars.peek() == Some(&'|') {
                    chars.next();
                    col += 1;
                    out.push(Token { tok: Tok::BarBar, span: span(l0, c0, 2) });
                    continue;
                }
                Tok::Bar
            }
            other => {
                return Err(Diagnostic::error(span(l0, c0, 1), format!("unexpected character `{other}`")));
            }
        };
        out.push(Token { tok, span: span(l0, c0, 1) });
    }
    out.push(Token { tok: Tok::Eof, span: span(line, col, 0) });
    Ok(out)
}
