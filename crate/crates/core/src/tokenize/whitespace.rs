//! Whitespace tokenizer: splits on runs of Unicode whitespace.

use super::{whitespace_spans, Token, TokenSequence, Tokenizer};

/// The default budget tokenizer. Token count is additive across
/// whitespace-joined fragments, which keeps budget accounting simple.
#[derive(Debug, Clone, Copy, Default)]
pub struct Whitespace;

impl Tokenizer for Whitespace {
    fn name(&self) -> &'static str {
        "whitespace"
    }

    fn tokenize(&self, text: &str) -> TokenSequence {
        let tokens = whitespace_spans(text)
            .into_iter()
            .map(|(s, e)| Token::new(&text[s..e], s, e))
            .collect();
        TokenSequence::new(tokens)
    }

    fn token_count(&self, text: &str) -> usize {
        text.split_whitespace().count()
    }
}
