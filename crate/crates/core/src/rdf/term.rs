use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Errors raised when constructing a term or triple that would violate
/// the RDF data model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI is empty")]
    EmptyIri,
    #[error("relative IRI `{0}`: an absolute IRI with a scheme is required")]
    RelativeIri(String),
    #[error("IRI `{iri}` contains forbidden character {ch:?}")]
    ForbiddenIriChar { iri: String, ch: char },
    #[error("invalid blank node label `{0}`")]
    InvalidBlankLabel(String),
    #[error("invalid language tag `{0}`")]
    InvalidLanguageTag(String),
    #[error("predicate must be an IRI, found {0}")]
    NonIriPredicate(String),
    #[error("subject must not be a literal, found {0}")]
    LiteralSubject(String),
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        if value.is_empty() {
            return Err(TermError::EmptyIri);
        }
        if let Some(ch) = value.chars().find(|&c| is_forbidden_iri_char(c)) {
            return Err(TermError::ForbiddenIriChar { iri: value, ch });
        }
        if !has_scheme(&value) {
            return Err(TermError::RelativeIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn nt_chars(&self) -> NtChars<'_> {
        NtChars::new("<", &self.0, false, ">", "")
    }

    /// The prefix up to and including the last `#`, or the last `/` when
    /// there is no `#`. Empty when the IRI has neither.
    pub fn namespace(&self) -> &str {
        let cut = split_point(&self.0);
        &self.0[..cut]
    }

    /// The raw (un-normalized) suffix after [`Iri::namespace`].
    pub fn raw_local_name(&self) -> &str {
        let cut = split_point(&self.0);
        &self.0[cut..]
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl Ord for Iri {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_segments(&[&self.0, ">"], &[&other.0, ">"])
    }
}

impl PartialOrd for Iri {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn split_point(iri: &str) -> usize {
    if let Some(i) = iri.rfind('#') {
        return i + 1;
    }
    if let Some(i) = iri.rfind('/') {
        return i + 1;
    }
    // urn-style IRIs: fall back to the scheme separator
    iri.rfind(':').map_or(0, |i| i + 1)
}

pub(crate) fn is_forbidden_iri_char(c: char) -> bool {
    matches!(
        c,
        '\u{00}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'
    )
}

fn has_scheme(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Blank node label matching `[A-Za-z0-9_]+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if label.is_empty() || !label.chars().all(is_blank_label_char) {
            return Err(TermError::InvalidBlankLabel(label));
        }
        Ok(BlankNode(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_blank_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// The optional annotation carried by a literal; a literal has at most one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LiteralAnnotation {
    None,
    Datatype(Iri),
    Language(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: String,
    annotation: LiteralAnnotation,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            annotation: LiteralAnnotation::None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            annotation: LiteralAnnotation::Datatype(datatype),
        }
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Result<Self, TermError> {
        let tag = tag.into();
        if !is_valid_language_tag(&tag) {
            return Err(TermError::InvalidLanguageTag(tag));
        }
        Ok(Literal {
            lexical: lexical.into(),
            annotation: LiteralAnnotation::Language(tag),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match &self.annotation {
            LiteralAnnotation::Datatype(dt) => Some(dt),
            _ => None,
        }
    }

    pub fn language(&self) -> Option<&str> {
        match &self.annotation {
            LiteralAnnotation::Language(tag) => Some(tag),
            _ => None,
        }
    }

    pub fn annotation(&self) -> &LiteralAnnotation {
        &self.annotation
    }
}

/// `[a-zA-Z]+ ('-' [a-zA-Z0-9]+)*`
pub(crate) fn is_valid_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(first) = parts.next() else {
        return false;
    };
    if first.is_empty() || !first.chars().all(|c| c.is_ascii_alphabetic()) {
        return false;
    }
    parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// An RDF node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Result<Self, TermError> {
        Iri::new(value).map(Term::Iri)
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, TermError> {
        BlankNode::new(label).map(Term::Blank)
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::plain(lexical))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    /// The N-Triples serialization of this term.
    pub fn to_ntriples(&self) -> String {
        self.nt_chars().collect()
    }

    fn nt_chars(&self) -> NtChars<'_> {
        match self {
            Term::Iri(iri) => iri.nt_chars(),
            Term::Blank(b) => NtChars::new("_:", b.as_str(), false, "", ""),
            Term::Literal(lit) => match &lit.annotation {
                LiteralAnnotation::None => NtChars::new("\"", &lit.lexical, true, "\"", ""),
                LiteralAnnotation::Language(tag) => {
                    NtChars::new("\"", &lit.lexical, true, "\"@", tag)
                }
                LiteralAnnotation::Datatype(dt) => NtChars::with_datatype(&lit.lexical, dt),
            },
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::Blank(b)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use fmt::Write;
        for c in self.nt_chars() {
            f.write_char(c)?;
        }
        Ok(())
    }
}

/// Terms order by their N-Triples serialization, compared without
/// materializing the strings. Byte order of UTF-8 equals char order, so
/// unescaped forms compare as byte slices.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.raw_segments(), other.raw_segments()) {
            (Some(a), Some(b)) => cmp_segments(&a, &b),
            _ => self.nt_chars().cmp(other.nt_chars()),
        }
    }
}

impl Term {
    /// The serialization as plain segments, unless a literal body needs
    /// escaping.
    fn raw_segments(&self) -> Option<[&str; 5]> {
        Some(match self {
            Term::Iri(iri) => ["<", &iri.0, ">", "", ""],
            Term::Blank(b) => ["_:", b.as_str(), "", "", ""],
            Term::Literal(lit) => {
                if lit
                    .lexical
                    .bytes()
                    .any(|b| b < 0x20 || b == b'"' || b == b'\\' || b == 0x7f)
                {
                    return None;
                }
                match &lit.annotation {
                    LiteralAnnotation::None => ["\"", &lit.lexical, "\"", "", ""],
                    LiteralAnnotation::Language(tag) => ["\"", &lit.lexical, "\"@", tag, ""],
                    LiteralAnnotation::Datatype(dt) => {
                        ["\"", &lit.lexical, "\"^^<", dt.as_str(), ">"]
                    }
                }
            }
        })
    }
}

/// Lexicographic byte comparison of two concatenations.
fn cmp_segments(a: &[&str], b: &[&str]) -> Ordering {
    let (mut a, mut b) = (a.iter(), b.iter());
    let (mut x, mut y): (&[u8], &[u8]) = (&[], &[]);
    loop {
        while x.is_empty() {
            match a.next() {
                Some(s) => x = s.as_bytes(),
                None => break,
            }
        }
        while y.is_empty() {
            match b.next() {
                Some(s) => y = s.as_bytes(),
                None => break,
            }
        }
        match (x.is_empty(), y.is_empty()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let n = x.len().min(y.len());
        match x[..n].cmp(&y[..n]) {
            Ordering::Equal => {
                x = &x[n..];
                y = &y[n..];
            }
            o => return o,
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Streams the serialized form of a term: prefix, body (escaped for
/// literals), then up to two trailing segments.
struct NtChars<'a> {
    segments: [&'a str; 5],
    escape_body: bool,
    segment: usize,
    current: std::str::Chars<'a>,
    pending: [char; 10],
    pending_len: u8,
    pending_pos: u8,
}

const BODY: usize = 1;

impl<'a> NtChars<'a> {
    fn new(prefix: &'a str, body: &'a str, escape: bool, s1: &'a str, s2: &'a str) -> Self {
        NtChars {
            segments: [prefix, body, s1, s2, ""],
            escape_body: escape,
            segment: 0,
            current: prefix.chars(),
            pending: ['\0'; 10],
            pending_len: 0,
            pending_pos: 0,
        }
    }

    fn with_datatype(lexical: &'a str, dt: &'a Iri) -> Self {
        let mut it = Self::new("\"", lexical, true, "\"^^<", dt.as_str());
        it.segments[4] = ">";
        it
    }
}

impl Iterator for NtChars<'_> {
    type Item = char;

    fn next(&mut self) -> Option<char> {
        if self.pending_pos < self.pending_len {
            let c = self.pending[self.pending_pos as usize];
            self.pending_pos += 1;
            return Some(c);
        }
        loop {
            if let Some(c) = self.current.next() {
                if self.segment == BODY && self.escape_body {
                    let n = fill_literal_escape(c, &mut self.pending);
                    if n > 0 {
                        self.pending_len = n as u8;
                        self.pending_pos = 1;
                        return Some(self.pending[0]);
                    }
                }
                return Some(c);
            }
            self.segment += 1;
            if self.segment >= self.segments.len() {
                return None;
            }
            self.current = self.segments[self.segment].chars();
        }
    }
}

/// Writes the escape sequence for `c` into `buf` and returns its length,
/// or 0 when `c` is emitted verbatim.
fn fill_literal_escape(c: char, buf: &mut [char; 10]) -> usize {
    let short = match c {
        '"' => '"',
        '\\' => '\\',
        '\n' => 'n',
        '\r' => 'r',
        '\t' => 't',
        c if (c as u32) < 0x20 || c == '\u{7f}' => {
            let hex = format!("{:04X}", c as u32);
            buf[0] = '\\';
            buf[1] = 'u';
            for (i, h) in hex.chars().enumerate() {
                buf[2 + i] = h;
            }
            return 6;
        }
        _ => return 0,
    };
    buf[0] = '\\';
    buf[1] = short;
    2
}

/// An RDF statement. The predicate is always an IRI and the subject is
/// never a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    subject: Term,
    predicate: Iri,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        if subject.is_literal() {
            return Err(TermError::LiteralSubject(subject.to_ntriples()));
        }
        let predicate = match predicate {
            Term::Iri(iri) => iri,
            other => return Err(TermError::NonIriPredicate(other.to_ntriples())),
        };
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// Builds a triple from parts that already satisfy the invariants by type.
    pub fn from_iris(subject: Term, predicate: Iri, object: Term) -> Result<Self, TermError> {
        Self::new(subject, Term::Iri(predicate), object)
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    /// One N-Triples line without the trailing newline.
    pub fn to_ntriples(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.subject
            .cmp(&other.subject)
            .then_with(|| self.predicate.cmp(&other.predicate))
            .then_with(|| self.object.cmp(&other.object))
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
