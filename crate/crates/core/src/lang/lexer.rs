//! Tokenizer for evolution statements.
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_]*`. Keywords are lowercase and
//! reserved. Literals follow JSON: double-quoted strings with backslash
//! escapes, optionally signed integers, decimals with a dot and an optional
//! exponent, and `true`/`false`.

use std::fmt;

use crate::model::AtomicValue;

/// 1-based line and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Add,
    Delete,
    Rename,
    Move,
    Copy,
    To,
    Where,
    And,
}

impl Keyword {
    pub const ALL: [Keyword; 8] = [
        Keyword::Add,
        Keyword::Delete,
        Keyword::Rename,
        Keyword::Move,
        Keyword::Copy,
        Keyword::To,
        Keyword::Where,
        Keyword::And,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Add => "add",
            Keyword::Delete => "delete",
            Keyword::Rename => "rename",
            Keyword::Move => "move",
            Keyword::Copy => "copy",
            Keyword::To => "to",
            Keyword::Where => "where",
            Keyword::And => "and",
        }
    }

    fn from_word(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Literal(AtomicValue),
    Dot,
    Eq,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Literal(v) => write!(f, "literal {v}"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Eq => f.write_str("`=`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Position,
    pub message: String,
}

/// Returns `true` if `s` is a valid non-keyword identifier.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Keyword::from_word(s).is_none()
        && s != "true"
        && s != "false"
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Position,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, out: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }
}

pub fn tokenize(input: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: input.chars().peekable(),
        pos: Position { line: 1, column: 1 },
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.pos;
        let kind = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '.' => {
                cur.bump();
                TokenKind::Dot
            }
            '=' => {
                cur.bump();
                TokenKind::Eq
            }
            '"' => TokenKind::Literal(AtomicValue::Text(lex_string(&mut cur)?)),
            c if c == '-' || c == '+' || c.is_ascii_digit() => lex_number(&mut cur)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                cur.take_while(&mut word, |c| c.is_ascii_alphanumeric() || c == '_');
                match word.as_str() {
                    "true" => TokenKind::Literal(AtomicValue::Bool(true)),
                    "false" => TokenKind::Literal(AtomicValue::Bool(false)),
                    w => match Keyword::from_word(w) {
                        Some(k) => TokenKind::Keyword(k),
                        None => TokenKind::Ident(word),
                    },
                }
            }
            other => {
                return Err(LexError {
                    pos: start,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        tokens.push(Token { kind, pos: start });
    }
    Ok(tokens)
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<String, LexError> {
    let start = cur.pos;
    cur.bump();
    let mut out = String::new();
    loop {
        let pos = cur.pos;
        let err = |message: &str| LexError {
            pos,
            message: message.to_owned(),
        };
        match cur.bump() {
            None => {
                return Err(LexError {
                    pos: start,
                    message: "unterminated string literal".into(),
                })
            }
            Some('"') => return Ok(out),
            Some('\\') => {
                let escaped = match cur.bump() {
                    Some('"') => '"',
                    Some('\\') => '\\',
                    Some('/') => '/',
                    Some('b') => '\u{8}',
                    Some('f') => '\u{c}',
                    Some('n') => '\n',
                    Some('r') => '\r',
                    Some('t') => '\t',
                    Some('u') => lex_unicode_escape(cur, pos)?,
                    Some(other) => return Err(err(&format!("invalid escape `\\{other}`"))),
                    None => return Err(err("unterminated escape")),
                };
                out.push(escaped);
            }
            Some(c) if (c as u32) < 0x20 => return Err(err("control character in string literal; use an escape")),
            Some(c) => out.push(c),
        }
    }
}

fn read_hex4(cur: &mut Cursor<'_>, pos: Position) -> Result<u32, LexError> {
    let mut code = 0u32;
    for _ in 0..4 {
        let digit = cur.bump().and_then(|c| c.to_digit(16)).ok_or(LexError {
            pos,
            message: "`\\u` needs four hex digits".into(),
        })?;
        code = code * 16 + digit;
    }
    Ok(code)
}

fn lex_unicode_escape(cur: &mut Cursor<'_>, pos: Position) -> Result<char, LexError> {
    let bad = |message: &str| LexError {
        pos,
        message: message.to_owned(),
    };
    let high = read_hex4(cur, pos)?;
    let code = if (0xD800..0xDC00).contains(&high) {
        if cur.bump() != Some('\\') || cur.bump() != Some('u') {
            return Err(bad("unpaired surrogate in `\\u` escape"));
        }
        let low = read_hex4(cur, pos)?;
        if !(0xDC00..0xE000).contains(&low) {
            return Err(bad("unpaired surrogate in `\\u` escape"));
        }
        0x10000 + ((high - 0xD800) << 10) + (low - 0xDC00)
    } else {
        high
    };
    char::from_u32(code).ok_or_else(|| bad("invalid code point in `\\u` escape"))
}

fn lex_number(cur: &mut Cursor<'_>) -> Result<TokenKind, LexError> {
    let start = cur.pos;
    let err = |message: String| LexError { pos: start, message };
    let mut text = String::new();
    if let Some(sign @ ('-' | '+')) = cur.peek() {
        text.push(sign);
        cur.bump();
    }
    let digits_start = text.len();
    cur.take_while(&mut text, |c| c.is_ascii_digit());
    if text.len() == digits_start {
        return Err(err(format!("expected digits after `{text}`")));
    }
    let mut is_float = false;
    if cur.peek() == Some('.') {
        is_float = true;
        text.push('.');
        cur.bump();
        let frac_start = text.len();
        cur.take_while(&mut text, |c| c.is_ascii_digit());
        if text.len() == frac_start {
            return Err(err(format!("expected digits after the dot in `{text}`")));
        }
        if let Some(e @ ('e' | 'E')) = cur.peek() {
            text.push(e);
            cur.bump();
            if let Some(sign @ ('-' | '+')) = cur.peek() {
                text.push(sign);
                cur.bump();
            }
            let exp_start = text.len();
            cur.take_while(&mut text, |c| c.is_ascii_digit());
            if text.len() == exp_start {
                return Err(err(format!("expected exponent digits in `{text}`")));
            }
        }
    }
    if let Some(c) = cur.peek() {
        if c.is_ascii_alphanumeric() || c == '_' {
            return Err(err(format!("malformed number `{text}{c}`")));
        }
    }
    if is_float {
        let v: f64 = text.parse().map_err(|_| err(format!("malformed number `{text}`")))?;
        if !v.is_finite() {
            return Err(err(format!("number `{text}` is out of range")));
        }
        Ok(TokenKind::Literal(AtomicValue::Float(v)))
    } else {
        text.parse::<i64>()
            .map(|v| TokenKind::Literal(AtomicValue::Int(v)))
            .map_err(|_| err(format!("integer `{text}` does not fit in 64 signed bits")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(input: &str) -> Vec<TokenKind> {
        tokenize(input).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn statement_tokens() {
        assert_eq!(
            kinds("add blogpost.likes = 0"),
            vec![
                TokenKind::Keyword(Keyword::Add),
                TokenKind::Ident("blogpost".into()),
                TokenKind::Dot,
                TokenKind::Ident("likes".into()),
                TokenKind::Eq,
                TokenKind::Literal(AtomicValue::Int(0)),
            ]
        );
    }

    #[test]
    fn literals() {
        assert_eq!(kinds("-12"), vec![TokenKind::Literal(AtomicValue::Int(-12))]);
        assert_eq!(kinds("+3"), vec![TokenKind::Literal(AtomicValue::Int(3))]);
        assert_eq!(kinds("2.5"), vec![TokenKind::Literal(AtomicValue::Float(2.5))]);
        assert_eq!(kinds("1.0e3"), vec![TokenKind::Literal(AtomicValue::Float(1000.0))]);
        assert_eq!(
            kinds("true false"),
            vec![
                TokenKind::Literal(AtomicValue::Bool(true)),
                TokenKind::Literal(AtomicValue::Bool(false)),
            ]
        );
        assert_eq!(
            kinds(r#""a \"q\" \\ \u00e9 \ud83d\ude00""#),
            vec![TokenKind::Literal(AtomicValue::Text("a \"q\" \\ é 😀".into()))]
        );
    }

    #[test]
    fn keywords_are_case_sensitive() {
        assert_eq!(kinds("ADD"), vec![TokenKind::Ident("ADD".into())]);
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("add\n  a.b").unwrap();
        assert_eq!(toks[0].pos, Position { line: 1, column: 1 });
        assert_eq!(toks[1].pos, Position { line: 2, column: 3 });
    }

    #[test]
    fn lexical_errors() {
        for (input, column) in [
            ("add a.b = #", 11),
            ("add a.b = \"open", 11),
            ("add a.b = 1.", 11),
            ("add a.b = 99999999999999999999", 11),
            ("add a.b = 12ab", 11),
            ("add a.b = -", 11),
            ("add a.b = \"\\x\"", 12),
        ] {
            let err = tokenize(input).unwrap_err();
            assert_eq!(err.pos, Position { line: 1, column }, "{input}: {}", err.message);
        }
    }

    #[test]
    fn identifier_check() {
        assert!(is_identifier("comment_likes"));
        assert!(is_identifier("_x1"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier("where"));
        assert!(!is_identifier("true"));
        assert!(!is_identifier("comment-likes"));
        assert!(!is_identifier(""));
    }
}
