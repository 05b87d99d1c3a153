//! Token counting and splitting for the linearization budget and masking.
//!
//! Two interchangeable tokenizers live behind the [`Tokenizer`] trait and are
//! selected by name via [`create`]: `whitespace` (the default budget
//! tokenizer, self-contained) and `wordpiece` (greedy longest-match against a
//! BERT-style vocab, for budgets that must count subword units).

mod whitespace;
mod wordpiece;

use std::path::Path;

pub use whitespace::Whitespace;
pub use wordpiece::{detokenize, Vocab, WordPiece};

use crate::error::{Error, Result};

pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";
pub const UNK: &str = "[UNK]";

/// One token plus the byte span of the source text it covers.
///
/// Frame tokens inserted after tokenization ([CLS], [SEP], [MASK]) carry an
/// empty span and `special = true`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub special: bool,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, start: usize, end: usize) -> Self {
        Token { text: text.into(), special: false, start, end }
    }

    pub fn special(text: impl Into<String>) -> Self {
        Token { text: text.into(), special: true, start: 0, end: 0 }
    }
}

/// An ordered token list with per-position special flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSequence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn texts(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.text.clone()).collect()
    }

    /// Wraps the sequence in [CLS] ... [SEP] frame tokens.
    pub fn framed(self) -> Self {
        let mut tokens = Vec::with_capacity(self.tokens.len() + 2);
        tokens.push(Token::special(CLS));
        tokens.extend(self.tokens);
        tokens.push(Token::special(SEP));
        TokenSequence { tokens }
    }
}

/// A tokenization strategy. Implementations are pure and safe to share
/// across threads once constructed.
pub trait Tokenizer: Send + Sync {
    /// Registry name, e.g. `"whitespace"`.
    fn name(&self) -> &'static str;

    fn tokenize(&self, text: &str) -> TokenSequence;

    fn token_count(&self, text: &str) -> usize {
        self.tokenize(text).len()
    }
}

/// Names accepted by [`create`].
pub const MODES: &[&str] = &["whitespace", "wordpiece"];

/// Instantiates a tokenizer by registry name.
///
/// `wordpiece` requires a vocab file; passing one to `whitespace` is
/// accepted and ignored.
pub fn create(mode: &str, vocab: Option<&Path>) -> Result<Box<dyn Tokenizer>> {
    match mode {
        "whitespace" => Ok(Box::new(Whitespace)),
        "wordpiece" => {
            let path = vocab.ok_or_else(|| {
                Error::Config("wordpiece tokenizer requires a vocab file".into())
            })?;
            Ok(Box::new(WordPiece::from_vocab_file(path)?))
        }
        other => Err(Error::Config(format!(
            "unknown tokenizer mode `{other}` (expected one of {MODES:?})"
        ))),
    }
}

/// Splits `text` into non-whitespace runs with their byte spans.
pub(crate) fn whitespace_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                spans.push((s, i));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        spans.push((s, text.len()));
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_whitespace() {
        let t = create("whitespace", None).unwrap();
        assert_eq!(t.name(), "whitespace");
    }

    #[test]
    fn registry_rejects_unknown_mode() {
        assert!(matches!(create("bpe", None), Err(Error::Config(_))));
    }

    #[test]
    fn wordpiece_without_vocab_is_config_error() {
        assert!(matches!(create("wordpiece", None), Err(Error::Config(_))));
    }

    #[test]
    fn framing_adds_specials() {
        let seq = Whitespace.tokenize("a b").framed();
        let texts = seq.texts();
        assert_eq!(texts, vec!["[CLS]", "a", "b", "[SEP]"]);
        assert!(seq.tokens()[0].special);
        assert!(!seq.tokens()[1].special);
        assert!(seq.tokens()[3].special);
    }
}
