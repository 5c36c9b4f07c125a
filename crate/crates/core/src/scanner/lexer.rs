//! Tokenizer for the Python subset the scanner understands.
//!
//! Produces logical lines: physical lines joined across open brackets and
//! backslash continuations, with comments dropped and the indentation column
//! of the first physical line recorded. Indentation itself is not validated.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Name(String),
    /// String literal body with quotes and prefix stripped; escapes are kept raw.
    Str(String),
    Number,
    Op(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
}

impl Token {
    pub fn name(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Name(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_op(&self, op: &str) -> bool {
        matches!(self.kind, TokenKind::Op(o) if o == op)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalLine {
    pub indent: usize,
    pub line: u32,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for LexError {}

const THREE_CHAR_OPS: &[&str] = &["**=", "//=", ">>=", "<<=", "..."];
const TWO_CHAR_OPS: &[&str] =
    &["==", "!=", "<=", ">=", "->", "**", "//", "<<", ">>", ":=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="];
const ONE_CHAR_OPS: &[&str] = &[
    "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "@", "=", "+", "-", "*", "/", "%", "&", "|", "^", "~", "<", ">",
];

struct Lexer<'a> {
    src: &'a [char],
    pos: usize,
    line: u32,
    depth: Vec<(char, u32)>,
    lines: Vec<LogicalLine>,
    current: Vec<Token>,
    current_indent: usize,
    current_line: u32,
    at_line_start: bool,
}

pub fn tokenize(text: &str) -> Result<Vec<LogicalLine>, LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut lx = Lexer {
        src: &chars,
        pos: 0,
        line: 1,
        depth: Vec::new(),
        lines: Vec::new(),
        current: Vec::new(),
        current_indent: 0,
        current_line: 1,
        at_line_start: true,
    };
    lx.run()?;
    Ok(lx.lines)
}

impl Lexer<'_> {
    fn peek(&self, off: usize) -> Option<char> {
        self.src.get(self.pos + off).copied()
    }

    fn err<T>(&self, line: u32, message: impl Into<String>) -> Result<T, LexError> {
        Err(LexError { line, message: message.into() })
    }

    fn push(&mut self, kind: TokenKind, line: u32) {
        if self.current.is_empty() {
            self.current_line = line;
        }
        self.current.push(Token { kind, line });
    }

    fn end_logical_line(&mut self) {
        if !self.current.is_empty() {
            self.lines.push(LogicalLine {
                indent: self.current_indent,
                line: self.current_line,
                tokens: std::mem::take(&mut self.current),
            });
        }
        self.at_line_start = true;
    }

    fn run(&mut self) -> Result<(), LexError> {
        while self.pos < self.src.len() {
            if self.at_line_start && self.depth.is_empty() && self.current.is_empty() {
                self.current_indent = self.measure_indent();
                self.at_line_start = false;
                continue;
            }
            let c = self.src[self.pos];
            match c {
                '\n' => {
                    self.pos += 1;
                    let continued = !self.depth.is_empty();
                    self.line += 1;
                    if !continued {
                        self.end_logical_line();
                    }
                }
                '\r' | ' ' | '\t' | '\x0c' => self.pos += 1,
                '#' => {
                    while self.pos < self.src.len() && self.src[self.pos] != '\n' {
                        self.pos += 1;
                    }
                }
                '\\' => {
                    // explicit line join
                    let mut p = self.pos + 1;
                    if self.src.get(p) == Some(&'\r') {
                        p += 1;
                    }
                    if self.src.get(p) == Some(&'\n') {
                        self.pos = p + 1;
                        self.line += 1;
                    } else {
                        return self.err(self.line, "unexpected character after line continuation");
                    }
                }
                '\'' | '"' => {
                    let line = self.line;
                    let body = self.string()?;
                    self.push(TokenKind::Str(body), line);
                }
                c if c.is_ascii_digit() || (c == '.' && self.peek(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let line = self.line;
                    self.number();
                    self.push(TokenKind::Number, line);
                }
                c if c == '_' || c.is_alphabetic() => {
                    let line = self.line;
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos] == '_' || self.src[self.pos].is_alphanumeric())
                    {
                        self.pos += 1;
                    }
                    let word: String = self.src[start..self.pos].iter().collect();
                    if matches!(self.peek(0), Some('\'' | '"')) && is_string_prefix(&word) {
                        let body = self.string()?;
                        self.push(TokenKind::Str(body), line);
                    } else {
                        self.push(TokenKind::Name(word), line);
                    }
                }
                _ => {
                    let line = self.line;
                    let op = self.operator()?;
                    match op {
                        "(" | "[" | "{" => self.depth.push((op.chars().next().unwrap_or('('), line)),
                        ")" | "]" | "}" => {
                            let want = match op {
                                ")" => '(',
                                "]" => '[',
                                _ => '{',
                            };
                            match self.depth.pop() {
                                Some((open, _)) if open == want => {}
                                Some((open, l)) => {
                                    return self
                                        .err(line, format!("'{op}' does not match '{open}' opened on line {l}"));
                                }
                                None => return self.err(line, format!("unmatched '{op}'")),
                            }
                        }
                        _ => {}
                    }
                    self.push(TokenKind::Op(op), line);
                }
            }
        }
        if let Some(&(open, line)) = self.depth.last() {
            return self.err(line, format!("'{open}' was never closed"));
        }
        self.end_logical_line();
        Ok(())
    }

    fn measure_indent(&mut self) -> usize {
        let mut col = 0;
        while let Some(c) = self.peek(0) {
            match c {
                ' ' => col += 1,
                '\t' => col = (col / 8 + 1) * 8,
                '\x0c' => col = 0,
                _ => break,
            }
            self.pos += 1;
        }
        col
    }

    fn number(&mut self) {
        let start = self.pos;
        let hex = self.peek(0) == Some('0') && matches!(self.peek(1), Some('x' | 'X'));
        while let Some(c) = self.peek(0) {
            let exp_sign =
                !hex && matches!(c, '+' | '-') && self.pos > start && matches!(self.src[self.pos - 1], 'e' | 'E');
            if c.is_alphanumeric() || c == '_' || c == '.' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn string(&mut self) -> Result<String, LexError> {
        let start_line = self.line;
        let quote = self.src[self.pos];
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        let mut body = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                return self.err(start_line, "unterminated string literal");
            };
            if c == '\\' {
                // raw strings also cannot end on an escaped quote
                body.push(c);
                if let Some(next) = self.peek(1) {
                    if next == '\n' {
                        self.line += 1;
                    }
                    body.push(next);
                    self.pos += 2;
                } else {
                    self.pos += 1;
                }
                continue;
            }
            if c == quote {
                if !triple {
                    self.pos += 1;
                    return Ok(body);
                }
                if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
                    self.pos += 3;
                    return Ok(body);
                }
            }
            if c == '\n' {
                if !triple {
                    return self.err(start_line, "unterminated string literal");
                }
                self.line += 1;
            }
            body.push(c);
            self.pos += 1;
        }
    }

    fn operator(&mut self) -> Result<&'static str, LexError> {
        let rest = |n: usize| -> String { self.src[self.pos..(self.pos + n).min(self.src.len())].iter().collect() };
        for (len, table) in [(3, THREE_CHAR_OPS), (2, TWO_CHAR_OPS), (1, ONE_CHAR_OPS)] {
            let s = rest(len);
            if let Some(op) = table.iter().find(|op| **op == s) {
                self.pos += len;
                return Ok(op);
            }
        }
        let c = self.src[self.pos];
        // '!' alone is only valid inside f-string replacement fields, which are kept in Str tokens
        self.err(self.line, format!("invalid character {c:?}"))
    }
}

fn is_string_prefix(word: &str) -> bool {
    matches!(word.to_ascii_lowercase().as_str(), "r" | "u" | "b" | "f" | "br" | "rb" | "fr" | "rf" | "t" | "tr" | "rt")
}
