//! Line-oriented N-Triples parsing.
//!
//! The grammar covered here is the subset real Freebase dumps use: each
//! non-empty, non-comment line is `<subj> <pred> <obj> .` where the object
//! may be an IRI, a blank node, or a quoted literal with an optional
//! language tag or datatype. Parsing is single-pass and order-preserving,
//! so disjoint byte ranges aligned to line boundaries can be parsed by
//! independent workers and concatenated.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use super::normalize::strip_namespace;
use super::{ObjectKind, Triple};
use crate::error::{Error, Result};

/// Counters kept while draining a parse stream under the skip policy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ParseStats {
    pub triples: u64,
    pub skipped: u64,
}

/// What to do with a malformed line. Real Freebase dumps contain irregular
/// literals, so the default is to skip and count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsePolicy {
    #[default]
    SkipAndCount,
    Abort,
}

impl std::str::FromStr for ParsePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip" | "skip_and_count" => Ok(ParsePolicy::SkipAndCount),
            "abort" => Ok(ParsePolicy::Abort),
            other => Err(Error::Config(format!("unknown parse policy `{other}`"))),
        }
    }
}

/// Drains a parse stream under `policy`, returning the triples kept and the
/// skip counters. `Abort` surfaces the first malformed line as an error.
pub fn collect_triples(
    iter: impl Iterator<Item = Result<Triple>>,
    policy: ParsePolicy,
) -> Result<(Vec<Triple>, ParseStats)> {
    let mut triples = Vec::new();
    let mut stats = ParseStats::default();
    for item in iter {
        match item {
            Ok(t) => {
                stats.triples += 1;
                triples.push(t);
            }
            Err(e @ Error::Parse { .. }) => match policy {
                ParsePolicy::SkipAndCount => stats.skipped += 1,
                ParsePolicy::Abort => return Err(e),
            },
            Err(e) => return Err(e),
        }
    }
    Ok((triples, stats))
}

/// Opens an N-Triples file, transparently decompressing `.gz` inputs.
pub fn open_ntriples(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Streams triples out of a line-oriented reader. Blank lines and `#`
/// comments are skipped; each malformed line yields a recoverable
/// [`Error::Parse`] carrying its 1-based line number.
pub fn parse_ntriples<R: BufRead>(reader: R) -> NtriplesIter<R> {
    NtriplesIter { lines: reader.lines(), line_no: 0 }
}

pub struct NtriplesIter<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: u64,
}

impl<R: BufRead> Iterator for NtriplesIter<R> {
    type Item = Result<Triple>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some(parse_ntriples_line(trimmed, self.line_no));
        }
    }
}

/// Parses one already-trimmed, non-comment line.
pub fn parse_ntriples_line(line: &str, line_no: u64) -> Result<Triple> {
    let mut scanner = Scanner { line, pos: 0, line_no };
    let subject = match scanner.term()? {
        Term::Node(id) => id,
        Term::Literal(_) => return Err(scanner.fail("subject must be an IRI or blank node")),
    };
    let predicate = match scanner.term()? {
        Term::Node(id) => id,
        Term::Literal(_) => return Err(scanner.fail("predicate must be an IRI")),
    };
    let (object, object_kind) = match scanner.term()? {
        Term::Node(id) => (id, ObjectKind::Entity),
        Term::Literal(text) => (text, ObjectKind::Literal),
    };
    scanner.terminal_dot()?;
    if subject.is_empty() {
        return Err(scanner.fail("empty subject"));
    }
    if predicate.is_empty() {
        return Err(scanner.fail("empty predicate"));
    }
    Ok(Triple { subject, predicate, object, object_kind })
}

enum Term {
    Node(String),
    Literal(String),
}

struct Scanner<'a> {
    line: &'a str,
    pos: usize,
    line_no: u64,
}

impl<'a> Scanner<'a> {
    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line_no, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let rest = self.rest();
        match rest.chars().next() {
            Some('<') => {
                let close = rest
                    .find('>')
                    .ok_or_else(|| self.fail("unterminated IRI (missing `>`)"))?;
                let inner = &rest[1..close];
                self.pos += close + 1;
                Ok(Term::Node(strip_namespace(inner).to_string()))
            }
            Some('_') => {
                if !rest.starts_with("_:") {
                    return Err(self.fail("expected blank node `_:`"));
                }
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                let id = &rest[..end];
                self.pos += end;
                Ok(Term::Node(id.to_string()))
            }
            Some('"') => {
                let (value, consumed) = self.literal_body(rest)?;
                self.pos += consumed;
                self.literal_suffix()?;
                Ok(Term::Literal(value))
            }
            Some('.') => Err(self.fail("missing term before `.`")),
            Some(c) => Err(self.fail(format!("unexpected character `{c}`"))),
            None => Err(self.fail("unexpected end of line")),
        }
    }

    /// Scans `"..."` with N-Triples escapes, returning the unescaped value
    /// and the number of bytes consumed including both quotes.
    fn literal_body(&self, rest: &str) -> Result<(String, usize)> {
        debug_assert!(rest.starts_with('"'));
        let mut value = String::new();
        let mut chars = rest.char_indices().skip(1).peekable();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => return Ok((value, i + 1)),
                '\\' => match chars.next() {
                    Some((_, 'n')) => value.push('\n'),
                    Some((_, 't')) => value.push('\t'),
                    Some((_, 'r')) => value.push('\r'),
                    Some((_, '"')) => value.push('"'),
                    Some((_, '\\')) => value.push('\\'),
                    Some((_, 'u')) | Some((_, 'U')) => {
                        let width = if rest.as_bytes()[i + 1] == b'u' { 4 } else { 8 };
                        let mut code = String::new();
                        for _ in 0..width {
                            match chars.next() {
                                Some((_, h)) => code.push(h),
                                None => return Err(self.fail("truncated unicode escape")),
                            }
                        }
                        let cp = u32::from_str_radix(&code, 16)
                            .map_err(|_| self.fail("invalid unicode escape"))?;
                        value.push(
                            char::from_u32(cp).ok_or_else(|| self.fail("invalid code point"))?,
                        );
                    }
                    Some((_, other)) => {
                        value.push('\\');
                        value.push(other);
                    }
                    None => return Err(self.fail("trailing backslash in literal")),
                },
                other => value.push(other),
            }
        }
        Err(self.fail("unterminated literal (missing closing `\"`)"))
    }

    /// Consumes and discards `@lang` or `^^<datatype>` after a literal.
    fn literal_suffix(&mut self) -> Result<()> {
        let rest = self.rest();
        if let Some(tag) = rest.strip_prefix('@') {
            let end = tag.find(char::is_whitespace).unwrap_or(tag.len());
            self.pos += 1 + end;
            Ok(())
        } else if let Some(dt) = rest.strip_prefix("^^") {
            if !dt.starts_with('<') {
                return Err(self.fail("datatype must be an IRI"));
            }
            let close =
                dt.find('>').ok_or_else(|| self.fail("unterminated datatype IRI"))?;
            self.pos += 2 + close + 1;
            Ok(())
        } else {
            Ok(())
        }
    }

    fn terminal_dot(&mut self) -> Result<()> {
        self.skip_ws();
        let rest = self.rest();
        if !rest.starts_with('.') {
            return Err(self.fail("missing terminal `.`"));
        }
        self.pos += 1;
        self.skip_ws();
        if !self.rest().is_empty() {
            return Err(self.fail(format!("trailing content after `.`: `{}`", self.rest())));
        }
        Ok(())
    }
}
