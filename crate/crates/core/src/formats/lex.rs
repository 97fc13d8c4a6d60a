//! Parser for the lexicographic triangulation lists.
//!
//! Entries look like `manifold_2_6_1=[[1,2,3],[1,2,4],...]` and may wrap
//! across lines anywhere inside the brackets.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unbalanced brackets: bracket opened at line {line}, column {column} is never closed")]
    UnbalancedBrackets { line: usize, column: usize },
    #[error("non-integer vertex {token:?} at line {line}, column {column}")]
    NonIntegerVertex { line: usize, column: usize, token: String },
}

/// One parsed entry: identifier and facet list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub id: String,
    pub facets: Vec<Vec<i64>>,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn pos(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    fn syntax(&self, message: impl Into<String>) -> LexError {
        LexError::Syntax { line: self.line, column: self.column, message: message.into() }
    }

    fn expect(&mut self, want: char, open: (usize, usize)) -> Result<(), LexError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            None => Err(LexError::UnbalancedBrackets { line: open.0, column: open.1 }),
            Some(c) => Err(self.syntax(format!("expected {want:?}, found {c:?}"))),
        }
    }
}

fn parse_vertex(cur: &mut Cursor<'_>) -> Result<i64, LexError> {
    cur.skip_ws();
    let (line, column) = cur.pos();
    let mut token = String::new();
    while let Some(c) = cur.peek() {
        if c == ',' || c == ']' || c == '[' || c.is_whitespace() {
            break;
        }
        token.push(c);
        cur.bump();
    }
    if token.is_empty() {
        return Err(match cur.peek() {
            None => LexError::UnbalancedBrackets { line, column },
            Some(c) => LexError::Syntax { line, column, message: format!("expected vertex, found {c:?}") },
        });
    }
    token.parse::<i64>().map_err(|_| LexError::NonIntegerVertex { line, column, token })
}

fn parse_facet(cur: &mut Cursor<'_>) -> Result<Vec<i64>, LexError> {
    let open = cur.pos();
    cur.expect('[', open)?;
    let mut facet = Vec::new();
    cur.skip_ws();
    if cur.peek() == Some(']') {
        cur.bump();
        return Ok(facet);
    }
    loop {
        facet.push(parse_vertex(cur)?);
        cur.skip_ws();
        match cur.bump() {
            Some(',') => continue,
            Some(']') => return Ok(facet),
            None => return Err(LexError::UnbalancedBrackets { line: open.0, column: open.1 }),
            Some(c) => return Err(cur.syntax(format!("expected ',' or ']', found {c:?}"))),
        }
    }
}

fn parse_entry(cur: &mut Cursor<'_>) -> Result<LexEntry, LexError> {
    let mut id = String::new();
    while let Some(c) = cur.peek() {
        if c == '=' || c.is_whitespace() || c == '[' || c == ']' {
            break;
        }
        id.push(c);
        cur.bump();
    }
    if id.is_empty() {
        return Err(cur.syntax("expected identifier"));
    }
    cur.skip_ws();
    if cur.bump() != Some('=') {
        return Err(cur.syntax(format!("expected '=' after identifier {id:?}")));
    }
    cur.skip_ws();
    let open = cur.pos();
    cur.expect('[', open)?;
    let mut facets = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('[') => facets.push(parse_facet(cur)?),
            Some(']') if facets.is_empty() => {
                cur.bump();
                return Ok(LexEntry { id, facets });
            }
            None => return Err(LexError::UnbalancedBrackets { line: open.0, column: open.1 }),
            Some(c) => return Err(cur.syntax(format!("expected '[', found {c:?}"))),
        }
        cur.skip_ws();
        match cur.bump() {
            Some(',') => continue,
            Some(']') => return Ok(LexEntry { id, facets }),
            None => return Err(LexError::UnbalancedBrackets { line: open.0, column: open.1 }),
            Some(c) => return Err(cur.syntax(format!("expected ',' or ']', found {c:?}"))),
        }
    }
}

/// Parses every entry in `text`, in file order.
pub fn parse_lexicographical(text: &str) -> Result<Vec<LexEntry>, LexError> {
    let mut cur = Cursor::new(text);
    let mut out = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            return Ok(out);
        }
        out.push(parse_entry(&mut cur)?);
    }
}
