//! Term-to-surface normalization.

use super::{NameMap, ObjectKind, SurfaceForm, Triple};

/// Returns the final segment of an IRI: everything after the last `/` or
/// `#`. Falls back to the whole string when the segment would be empty.
pub fn strip_namespace(iri: &str) -> &str {
    match iri.rfind(['/', '#']) {
        Some(i) if i + 1 < iri.len() => &iri[i + 1..],
        _ => iri,
    }
}

/// Converts a raw parsed term into a human-readable surface form.
///
/// IRIs lose their brackets and namespace prefix; if the remaining id has a
/// `name_map` entry that name is used, otherwise identifier separators
/// (`.`, `_`) become single spaces. Quoted literals lose quotes, `@lang`,
/// and `^^<datatype>` and keep their content verbatim. Idempotent on the
/// entity path; literal values skip this function entirely downstream
/// (see [`SurfaceResolver::object`]), so their dots survive.
pub fn normalize_term(raw: &str, name_map: Option<&NameMap>) -> SurfaceForm {
    let mut s = raw.trim();

    if s.starts_with('"') {
        return SurfaceForm(literal_value(s));
    }
    if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
        s = strip_namespace(inner);
    }
    if let Some(rest) = s.strip_prefix("_:") {
        s = rest;
    }
    // Multi-word input is already a surface form; ids never contain spaces.
    if s.contains(char::is_whitespace) {
        return SurfaceForm(collapse_whitespace(s));
    }
    let mapped;
    if let Some(name) = name_map.and_then(|m| m.get(s)) {
        mapped = name.to_string();
        s = &mapped;
    }
    SurfaceForm(collapse_whitespace(&replace_separators(s)))
}

/// Strips quotes and any `@lang` / `^^<datatype>` suffix from a raw quoted
/// literal, leaving the lexical value.
fn literal_value(s: &str) -> String {
    let body = &s[1..];
    match body.find('"') {
        Some(close) => body[..close].to_string(),
        None => body.to_string(),
    }
}

fn replace_separators(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_sep = false;
    for c in s.chars() {
        if c == '.' || c == '_' {
            if !in_sep {
                out.push(' ');
                in_sep = true;
            }
        } else {
            out.push(c);
            in_sep = false;
        }
    }
    out
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Resolves triple terms to surfaces with one shared name table.
#[derive(Debug, Clone, Default)]
pub struct SurfaceResolver {
    name_map: Option<NameMap>,
}

impl SurfaceResolver {
    pub fn new(name_map: Option<NameMap>) -> Self {
        SurfaceResolver { name_map }
    }

    pub fn name_map(&self) -> Option<&NameMap> {
        self.name_map.as_ref()
    }

    pub fn term(&self, raw: &str) -> SurfaceForm {
        normalize_term(raw, self.name_map.as_ref())
    }

    /// Literal objects were already reduced to their lexical value by the
    /// parser, so they pass through untouched.
    pub fn object(&self, triple: &Triple) -> SurfaceForm {
        match triple.object_kind {
            ObjectKind::Entity => self.term(&triple.object),
            ObjectKind::Literal => SurfaceForm(triple.object.clone()),
        }
    }

    pub fn subject(&self, triple: &Triple) -> SurfaceForm {
        self.term(&triple.subject)
    }

    pub fn predicate(&self, triple: &Triple) -> SurfaceForm {
        self.term(&triple.predicate)
    }
}
