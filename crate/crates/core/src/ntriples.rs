//! Strict line-oriented N-Triples reader and the matching term writer.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Iri(String),
    Blank(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal {
        value: String,
        lang: Option<String>,
        datatype: Option<String>,
    },
}

impl Term {
    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Node,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn subject_iri(&self) -> Option<&str> {
        match &self.subject {
            Node::Iri(iri) => Some(iri),
            Node::Blank(_) => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line_number}: {reason}")]
pub struct MalformedLine {
    pub line_number: usize,
    pub reason: String,
}

/// Parses a whole N-Triples document. The first malformed line aborts.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, MalformedLine> {
    let mut triples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_number = idx + 1;
        let line = raw.trim_matches(|c| c == ' ' || c == '\t' || c == '\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let triple = LineParser::new(line)
            .statement()
            .map_err(|reason| MalformedLine { line_number, reason })?;
        triples.push(triple);
    }
    Ok(triples)
}

struct LineParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn new(src: &'a str) -> Self {
        LineParser { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.pos += 1;
        }
    }

    fn statement(mut self) -> Result<Triple, String> {
        self.skip_ws();
        let subject = match self.peek() {
            Some('<') => Node::Iri(self.iri()?),
            Some('_') => Node::Blank(self.blank()?),
            _ => return Err("missing subject".into()),
        };
        self.skip_ws();
        let predicate = match self.peek() {
            Some('<') => self.iri()?,
            _ => return Err("missing predicate".into()),
        };
        self.skip_ws();
        let object = match self.peek() {
            Some('<') => Term::Iri(self.iri()?),
            Some('_') => Term::Blank(self.blank()?),
            Some('"') => self.literal()?,
            _ => return Err("missing object".into()),
        };
        self.skip_ws();
        if self.bump() != Some('.') {
            return Err("expected '.' after object".into());
        }
        self.skip_ws();
        match self.peek() {
            None | Some('#') => Ok(Triple {
                subject,
                predicate,
                object,
            }),
            Some(c) => Err(format!("unexpected {c:?} after '.'")),
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        self.bump(); // '<'
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => out.push(self.hex_escape(4)?),
                    Some('U') => out.push(self.hex_escape(8)?),
                    _ => return Err("invalid escape in IRI".into()),
                },
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return Err(format!("invalid character {c:?} in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err("empty IRI".into());
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<String, String> {
        if !self.rest().starts_with("_:") {
            return Err("invalid blank node".into());
        }
        self.pos += 2;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        // a trailing '.' terminates the statement, not the label
        while self.pos > start && self.src[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err("empty blank node label".into());
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.bump(); // '"'
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        Some(c) => return Err(format!("invalid escape \\{c}")),
                        None => return Err("unterminated literal".into()),
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
            }
        }
        let mut lang = None;
        let mut datatype = None;
        if self.peek() == Some('@') {
            self.bump();
            let start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let tag = &self.src[start..self.pos];
            if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return Err("invalid language tag".into());
            }
            lang = Some(tag.to_string());
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            if self.peek() != Some('<') {
                return Err("datatype must be an IRI".into());
            }
            datatype = Some(self.iri()?);
        }
        Ok(Term::Literal {
            value,
            lang,
            datatype,
        })
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, String> {
        let end = self.pos + digits;
        let hex = self.src.get(self.pos..end).ok_or("truncated unicode escape")?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| "invalid unicode escape")?;
        self.pos = end;
        char::from_u32(code).ok_or_else(|| "invalid code point".to_string())
    }
}

/// Writes a term in N-Triples syntax.
pub struct NtTerm<'a>(pub &'a Term);

impl fmt::Display for NtTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Iri(iri) => write!(f, "<{}>", escape_iri(iri)),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal {
                value,
                lang,
                datatype,
            } => {
                write!(f, "\"{}\"", escape_literal(value))?;
                if let Some(lang) = lang {
                    write!(f, "@{lang}")
                } else if let Some(dt) = datatype {
                    write!(f, "^^<{}>", escape_iri(dt))
                } else {
                    Ok(())
                }
            }
        }
    }
}

pub fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub fn escape_iri(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len());
    for c in iri.chars() {
        if c <= ' ' || "<>\"{}|^`\\".contains(c) {
            out.push_str(&format!("\\u{:04X}", c as u32));
        } else {
            out.push(c);
        }
    }
    out
}

/// Formats one statement line, without the trailing newline.
pub fn format_statement(subject: &str, predicate: &str, object: &Term) -> String {
    format!(
        "<{}> <{}> {} .",
        escape_iri(subject),
        escape_iri(predicate),
        NtTerm(object)
    )
}
