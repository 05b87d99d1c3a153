//! Greedy longest-match-first WordPiece tokenizer.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{whitespace_spans, Token, TokenSequence, Tokenizer, CLS, MASK, SEP, UNK};
use crate::error::{Error, Result};

/// Words longer than this many characters are mapped to [UNK] outright.
const MAX_WORD_CHARS: usize = 100;

/// An in-memory vocab: token string -> id (line number in the vocab file).
#[derive(Debug, Clone)]
pub struct Vocab {
    ids: HashMap<String, u32>,
}

impl Vocab {
    /// Loads a vocab file: UTF-8, one token per line, line number = token id.
    /// The file must contain [CLS], [SEP], [MASK], and [UNK].
    pub fn from_file(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| {
            Error::Config(format!("cannot read vocab file {}: {e}", path.display()))
        })?;
        let mut ids = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            let token = line.trim_end_matches(['\r', '\n']);
            if !token.is_empty() {
                ids.entry(token.to_string()).or_insert(i as u32);
            }
        }
        let vocab = Vocab { ids };
        for required in [CLS, SEP, MASK, UNK] {
            if !vocab.contains(required) {
                return Err(Error::Config(format!(
                    "vocab file {} is missing required token {required}",
                    path.display()
                )));
            }
        }
        Ok(vocab)
    }

    #[cfg(test)]
    pub(crate) fn from_tokens<I: IntoIterator<Item = S>, S: Into<String>>(tokens: I) -> Self {
        let mut ids = HashMap::new();
        for (i, t) in tokens.into_iter().enumerate() {
            ids.entry(t.into()).or_insert(i as u32);
        }
        Vocab { ids }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Splits each whitespace word into the longest in-vocab pieces, continuation
/// pieces prefixed `##`. A word with no matching prefix becomes [UNK].
#[derive(Debug, Clone)]
pub struct WordPiece {
    vocab: Vocab,
}

impl WordPiece {
    pub fn new(vocab: Vocab) -> Self {
        WordPiece { vocab }
    }

    pub fn from_vocab_file(path: &Path) -> Result<Self> {
        Ok(WordPiece::new(Vocab::from_file(path)?))
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Greedy longest-match over one word. `word_start` is the word's byte
    /// offset in the enclosing text, used to give each piece a real span.
    fn split_word(&self, word: &str, word_start: usize, out: &mut Vec<Token>) {
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        if chars.is_empty() {
            return;
        }
        if chars.len() > MAX_WORD_CHARS {
            out.push(Token::new(UNK, word_start, word_start + word.len()));
            return;
        }
        let byte_at = |char_idx: usize| {
            if char_idx == chars.len() {
                word.len()
            } else {
                chars[char_idx].0
            }
        };
        let mut pieces = Vec::new();
        let mut start = 0;
        while start < chars.len() {
            let mut end = chars.len();
            let mut matched = None;
            while start < end {
                let raw = &word[byte_at(start)..byte_at(end)];
                let candidate = if start == 0 { raw.to_string() } else { format!("##{raw}") };
                if self.vocab.contains(&candidate) {
                    matched = Some((candidate, end));
                    break;
                }
                end -= 1;
            }
            match matched {
                Some((piece, end)) => {
                    pieces.push(Token::new(
                        piece,
                        word_start + byte_at(start),
                        word_start + byte_at(end),
                    ));
                    start = end;
                }
                None => {
                    // No prefix of the remainder is in-vocab: the whole word
                    // degrades to a single unknown token.
                    out.push(Token::new(UNK, word_start, word_start + word.len()));
                    return;
                }
            }
        }
        out.extend(pieces);
    }
}

impl Tokenizer for WordPiece {
    fn name(&self) -> &'static str {
        "wordpiece"
    }

    fn tokenize(&self, text: &str) -> TokenSequence {
        let mut tokens = Vec::new();
        for (s, e) in whitespace_spans(text) {
            self.split_word(&text[s..e], s, &mut tokens);
        }
        TokenSequence::new(tokens)
    }
}

/// Joins WordPiece tokens back into text, deleting `##` seams.
pub fn detokenize(tokens: &[String]) -> String {
    let mut out = String::new();
    for tok in tokens {
        if let Some(cont) = tok.strip_prefix("##") {
            out.push_str(cont);
        } else {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(tok);
        }
    }
    out
}
