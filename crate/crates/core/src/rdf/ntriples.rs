//! N-Triples reader and canonical writer.
//!
//! Accepts LF or CRLF line endings, blank lines and `#` comments. Literal
//! escapes are limited to `\" \\ \n \t \r \uXXXX \UXXXXXXXX`.

use thiserror::Error;

use super::term::{
    is_blank_label_char, is_forbidden_iri_char, is_valid_language_tag, BlankNode, Iri, Literal,
    Term, TermError, Triple,
};
use super::Graph;

/// A positioned N-Triples error. Lines and columns are 1-based; columns
/// count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
    #[error("line {line}, column {column}: relative IRI <{iri}>")]
    RelativeIri {
        line: usize,
        column: usize,
        iri: String,
    },
    #[error("line {line}, column {column}: literal in subject position")]
    LiteralSubject { line: usize, column: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::RelativeIri { line, .. }
            | ParseError::LiteralSubject { line, .. } => *line,
        }
    }

    pub fn column(&self) -> usize {
        match self {
            ParseError::Syntax { column, .. }
            | ParseError::RelativeIri { column, .. }
            | ParseError::LiteralSubject { column, .. } => *column,
        }
    }
}

/// Parses a whole document. Either every line parses or nothing is returned.
pub fn parse_ntriples(text: &str) -> Result<Graph, ParseError> {
    let mut graph = Graph::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(triple) = LineParser::new(line, idx + 1).parse()? {
            graph.insert(triple);
        }
    }
    Ok(graph)
}

/// Canonical serialization: one triple per line in graph order, LF endings.
pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for triple in graph.iter() {
        out.push_str(&triple.to_ntriples());
        out.push('\n');
    }
    out
}

struct LineParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineParser {
    fn new(src: &str, line: usize) -> Self {
        LineParser {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn syntax(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column(),
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn parse(mut self) -> Result<Option<Triple>, ParseError> {
        self.skip_ws();
        if self.at_end_or_comment() {
            return Ok(None);
        }

        let subject_col = self.column();
        let subject = match self.peek() {
            Some('"') => {
                return Err(ParseError::LiteralSubject {
                    line: self.line,
                    column: subject_col,
                })
            }
            Some('<') => Term::Iri(self.iri()?),
            Some('_') => Term::Blank(self.blank()?),
            _ => return Err(self.syntax("IRI or blank node subject")),
        };
        self.require_ws()?;

        let predicate = match self.peek() {
            Some('<') => self.iri()?,
            _ => return Err(self.syntax("IRI predicate")),
        };
        self.require_ws()?;

        let object = match self.peek() {
            Some('<') => Term::Iri(self.iri()?),
            Some('_') => Term::Blank(self.blank()?),
            Some('"') => Term::Literal(self.literal()?),
            _ => return Err(self.syntax("IRI, blank node or literal object")),
        };
        self.skip_ws();
        if self.peek() != Some('.') {
            return Err(self.syntax("'.'"));
        }
        self.bump();
        self.skip_ws();
        if !self.at_end_or_comment() {
            return Err(self.syntax("end of line or comment"));
        }

        // subject/predicate kinds are enforced above, so construction cannot fail
        let triple = Triple::from_iris(subject, predicate, object)
            .expect("parser only builds well-formed triples");
        Ok(Some(triple))
    }

    fn require_ws(&mut self) -> Result<(), ParseError> {
        if self.skip_ws() {
            Ok(())
        } else {
            Err(self.syntax("whitespace"))
        }
    }

    fn iri(&mut self) -> Result<Iri, ParseError> {
        let start_col = self.column();
        self.bump(); // '<'
        let mut value = String::new();
        loop {
            let col = self.column();
            match self.bump() {
                None => return Err(self.syntax("'>'")),
                Some('>') => break,
                Some('\\') => {
                    let c = self.unicode_escape(col)?;
                    if is_forbidden_iri_char(c) {
                        return Err(ParseError::Syntax {
                            line: self.line,
                            column: col,
                            expected: "IRI character".into(),
                        });
                    }
                    value.push(c);
                }
                Some(c) if is_forbidden_iri_char(c) => {
                    self.pos -= 1;
                    return Err(self.syntax("IRI character or '>'"));
                }
                Some(c) => value.push(c),
            }
        }
        Iri::new(value).map_err(|e| match e {
            TermError::RelativeIri(iri) => ParseError::RelativeIri {
                line: self.line,
                column: start_col,
                iri,
            },
            TermError::EmptyIri => ParseError::Syntax {
                line: self.line,
                column: start_col,
                expected: "non-empty IRI".into(),
            },
            other => ParseError::Syntax {
                line: self.line,
                column: start_col,
                expected: other.to_string(),
            },
        })
    }

    /// After a backslash inside an IRI: only `\u` / `\U` are allowed.
    fn unicode_escape(&mut self, col: usize) -> Result<char, ParseError> {
        let digits = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => {
                return Err(ParseError::Syntax {
                    line: self.line,
                    column: col,
                    expected: "\\u or \\U escape".into(),
                })
            }
        };
        self.hex_char(digits, col)
    }

    fn hex_char(&mut self, digits: usize, col: usize) -> Result<char, ParseError> {
        let mut code: u32 = 0;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.syntax("hex digit"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or(ParseError::Syntax {
            line: self.line,
            column: col,
            expected: "valid Unicode scalar value".into(),
        })
    }

    fn blank(&mut self) -> Result<BlankNode, ParseError> {
        self.bump(); // '_'
        if self.bump() != Some(':') {
            self.pos -= 1;
            return Err(self.syntax("':' after '_'"));
        }
        let start = self.pos;
        while self.peek().is_some_and(is_blank_label_char) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("blank node label [A-Za-z0-9_]+"));
        }
        let label: String = self.chars[start..self.pos].iter().collect();
        Ok(BlankNode::new(label).expect("label chars checked"))
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        self.bump(); // '"'
        let mut lexical = String::new();
        loop {
            let col = self.column();
            match self.bump() {
                None => return Err(self.syntax("closing '\"'")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('u') => self.hex_char(4, col)?,
                        Some('U') => self.hex_char(8, col)?,
                        _ => {
                            return Err(ParseError::Syntax {
                                line: self.line,
                                column: col,
                                expected: "escape (\\\" \\\\ \\n \\t \\r \\u \\U)".into(),
                            })
                        }
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
                {
                    self.pos += 1;
                }
                let tag: String = self.chars[start..self.pos].iter().collect();
                if !is_valid_language_tag(&tag) {
                    self.pos = start;
                    return Err(self.syntax("language tag"));
                }
                Ok(Literal::lang(lexical, tag).expect("tag checked"))
            }
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') || self.peek() != Some('<') {
                    return Err(self.syntax("'^^<' datatype IRI"));
                }
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }
}
