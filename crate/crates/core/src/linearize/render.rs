//! Surface templates for grouped triples and CVT stars.
//!
//! Case templates state every shared term once:
//!
//! | case | shared            | template              |
//! |------|-------------------|-----------------------|
//! | 1    | subject+predicate | `S P O1, O2`          |
//! | 2    | subject+object    | `S P1, P2 O`          |
//! | 3    | predicate+object  | `S1, S2 P O`          |
//! | 4    | subject           | `S P1 O1; P2 O2`      |
//! | 5    | predicate         | `P S1 O1; S2 O2`      |
//! | 6    | object            | `O S1 P1; S2 P2`      |
//!
//! `", "` joins terms that share both other slots, `"; "` joins two-term
//! clauses, keeping the comma convention of CVT sentences unambiguous.
//! Every rendered term occurrence carries a byte span with the (member,
//! component) pairs it realizes, so maskers can find whole components.

use serde::{Deserialize, Serialize};

use super::passage::{Passage, PassageKind};
use crate::error::{Error, Result};

/// Subject/predicate/object surfaces of one triple, in that order.
pub type SurfaceTriple = [String; 3];

/// Role a term plays inside its triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Subject,
    Relation,
    Object,
}

/// Byte range of one rendered term occurrence. A shared term is rendered
/// once and owned by every (member index, component) it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSpan {
    pub start: usize,
    pub end: usize,
    pub owners: Vec<(usize, Component)>,
}

/// Rendered text plus the spans of every term occurrence in it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Rendered {
    pub text: String,
    pub spans: Vec<TermSpan>,
}

impl Rendered {
    fn sep(&mut self, sep: &str) {
        self.text.push_str(sep);
    }

    fn term(&mut self, term: &str, owners: Vec<(usize, Component)>) {
        let start = self.text.len();
        self.text.push_str(term);
        self.spans.push(TermSpan { start, end: self.text.len(), owners });
    }

    /// Span realizing `component` of member `idx`, if that component was
    /// rendered at all (CVT hub occurrences are not).
    pub fn span_of(&self, idx: usize, component: Component) -> Option<&TermSpan> {
        self.spans.iter().find(|s| s.owners.contains(&(idx, component)))
    }
}

/// Renders a one-triple passage: `S P O`.
pub fn render_singleton(member: &SurfaceTriple) -> Rendered {
    let mut r = Rendered::default();
    r.term(&member[0], vec![(0, Component::Subject)]);
    r.sep(" ");
    r.term(&member[1], vec![(0, Component::Relation)]);
    r.sep(" ");
    r.term(&member[2], vec![(0, Component::Object)]);
    r
}

/// Renders a group under its case template. One-member groups fall back to
/// the singleton form (budget splits can strand a single trailing triple).
pub fn render_case(case: u8, members: &[SurfaceTriple]) -> Rendered {
    assert!((1..=6).contains(&case), "case out of range");
    assert!(!members.is_empty(), "empty group");
    if members.len() == 1 {
        return render_singleton(&members[0]);
    }
    let all = |c: Component| (0..members.len()).map(|i| (i, c)).collect::<Vec<_>>();
    let mut r = Rendered::default();
    match case {
        1 => {
            r.term(&members[0][0], all(Component::Subject));
            r.sep(" ");
            r.term(&members[0][1], all(Component::Relation));
            r.sep(" ");
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    r.sep(", ");
                }
                r.term(&m[2], vec![(i, Component::Object)]);
            }
        }
        2 => {
            r.term(&members[0][0], all(Component::Subject));
            r.sep(" ");
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    r.sep(", ");
                }
                r.term(&m[1], vec![(i, Component::Relation)]);
            }
            r.sep(" ");
            r.term(&members[0][2], all(Component::Object));
        }
        3 => {
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    r.sep(", ");
                }
                r.term(&m[0], vec![(i, Component::Subject)]);
            }
            r.sep(" ");
            r.term(&members[0][1], all(Component::Relation));
            r.sep(" ");
            r.term(&members[0][2], all(Component::Object));
        }
        4 => {
            r.term(&members[0][0], all(Component::Subject));
            r.sep(" ");
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    r.sep("; ");
                }
                r.term(&m[1], vec![(i, Component::Relation)]);
                r.sep(" ");
                r.term(&m[2], vec![(i, Component::Object)]);
            }
        }
        5 => {
            r.term(&members[0][1], all(Component::Relation));
            r.sep(" ");
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    r.sep("; ");
                }
                r.term(&m[0], vec![(i, Component::Subject)]);
                r.sep(" ");
                r.term(&m[2], vec![(i, Component::Object)]);
            }
        }
        6 => {
            r.term(&members[0][2], all(Component::Object));
            r.sep(" ");
            for (i, m) in members.iter().enumerate() {
                if i > 0 {
                    r.sep("; ");
                }
                r.term(&m[0], vec![(i, Component::Subject)]);
                r.sep(" ");
                r.term(&m[1], vec![(i, Component::Relation)]);
            }
        }
        _ => unreachable!(),
    }
    r
}

/// Renders a CVT star: the inbound triple's subject and predicate head the
/// sentence, then one comma-joined `p o` clause per outbound triple. The
/// hub node itself (head object, outbound subjects) never renders, so the
/// head's `Object` and the clauses' `Subject` components carry no spans.
///
/// Member indexing: 0 = inbound head, 1.. = outbound triples in order.
pub fn render_cvt(head: &SurfaceTriple, outbound: &[SurfaceTriple]) -> Rendered {
    let mut r = Rendered::default();
    r.term(&head[0], vec![(0, Component::Subject)]);
    r.sep(" ");
    r.term(&head[1], vec![(0, Component::Relation)]);
    r.sep(" ");
    for (i, m) in outbound.iter().enumerate() {
        if i > 0 {
            r.sep(", ");
        }
        r.term(&m[1], vec![(1 + i, Component::Relation)]);
        r.sep(" ");
        r.term(&m[2], vec![(1 + i, Component::Object)]);
    }
    r
}

fn share_case_key(members: &[SurfaceTriple], case: u8) -> bool {
    let first = &members[0];
    members.iter().all(|m| match case {
        1 => m[0] == first[0] && m[1] == first[1],
        2 => m[0] == first[0] && m[2] == first[2],
        3 => m[1] == first[1] && m[2] == first[2],
        4 => m[0] == first[0],
        5 => m[1] == first[1],
        6 => m[2] == first[2],
        _ => unreachable!(),
    })
}

/// Re-derives the spans of a stored passage from its member surfaces.
///
/// The corpus format does not carry spans, so maskers rebuild them here:
/// the emitting template is recovered (lowest case whose key all members
/// share and whose render reproduces the text) and its spans returned.
/// A passage no template reproduces is corrupt.
pub fn respan(passage: &Passage) -> Result<Rendered> {
    let members = &passage.triples;
    if members.is_empty() {
        return Err(Error::Data(format!("passage {} has no member triples", passage.id)));
    }
    let rendered = match passage.kind {
        PassageKind::Singleton => render_singleton(&members[0]),
        PassageKind::CvtSentence => render_cvt(&members[0], &members[1..]),
        PassageKind::MergedGroup => (1..=6)
            .filter(|&case| share_case_key(members, case))
            .map(|case| render_case(case, members))
            .find(|r| r.text == passage.text)
            .ok_or_else(|| {
                Error::Data(format!("passage {}: no template reproduces its text", passage.id))
            })?,
    };
    if rendered.text != passage.text {
        return Err(Error::Data(format!(
            "passage {}: stored text does not match its members",
            passage.id
        )));
    }
    Ok(rendered)
}
