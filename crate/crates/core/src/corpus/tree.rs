use serde::{Deserialize, Serialize};

use super::types::Upos;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the utterance.
    pub index: usize,
    pub surface: String,
    /// Lowercased lemma.
    pub lemma: String,
    pub upos: Upos,
    /// 0 for roots, otherwise the 1-based index of the head.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

/// Dependency analysis of one utterance. Multi-sentence utterances keep a
/// single tree with one root per sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyTree {
    pub utterance_id: String,
    tokens: Vec<Token>,
    root_indices: Vec<usize>,
    sentence: Vec<usize>,
}

impl DependencyTree {
    /// Builds a tree after checking index contiguity, head ranges and acyclicity.
    pub fn new(utterance_id: impl Into<String>, tokens: Vec<Token>) -> Result<Self> {
        let utterance_id = utterance_id.into();
        let len = tokens.len();
        if len == 0 {
            return Err(Error::InvalidTree {
                utterance: utterance_id,
                message: "no tokens".into(),
            });
        }
        for (pos, tok) in tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err(Error::InvalidTree {
                    utterance: utterance_id,
                    message: format!("token index {} at position {}", tok.index, pos + 1),
                });
            }
            if tok.head > len {
                return Err(Error::HeadOutOfRange {
                    utterance: utterance_id,
                    token: tok.index,
                    head: tok.head,
                    len,
                });
            }
            if tok.lemma.is_empty() {
                return Err(Error::InvalidTree {
                    utterance: utterance_id,
                    message: format!("token {} has an empty lemma", tok.index),
                });
            }
        }

        // Resolve each token's root, failing on cycles.
        let mut root_of = vec![0usize; len + 1];
        for start in 1..=len {
            let mut cur = start;
            let mut steps = 0;
            while tokens[cur - 1].head != 0 {
                if root_of[cur] != 0 {
                    break;
                }
                cur = tokens[cur - 1].head;
                steps += 1;
                if steps > len {
                    return Err(Error::CyclicTree {
                        utterance: utterance_id,
                        token: start,
                    });
                }
            }
            let root = if tokens[cur - 1].head == 0 { cur } else { root_of[cur] };
            root_of[start] = root;
        }

        let root_indices: Vec<usize> = tokens.iter().filter(|t| t.is_root()).map(|t| t.index).collect();
        let sentence = (1..=len)
            .map(|i| root_indices.iter().position(|&r| r == root_of[i]).unwrap_or(0))
            .collect();

        Ok(DependencyTree {
            utterance_id,
            tokens,
            root_indices,
            sentence,
        })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn root_indices(&self) -> &[usize] {
        &self.root_indices
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at a 1-based index.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn parent(&self, index: usize) -> Option<&Token> {
        match self.token(index).head {
            0 => None,
            h => Some(self.token(h)),
        }
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(move |t| t.head == index)
    }

    /// Root of the first sentence; stands for "the" root of the utterance.
    pub fn main_root(&self) -> usize {
        self.root_indices[0]
    }

    /// 0-based sentence number of a token (order of the sentence roots).
    pub fn sentence_of(&self, index: usize) -> usize {
        self.sentence[index - 1]
    }

    pub fn sentence_count(&self) -> usize {
        self.root_indices.len()
    }

    /// Appends another sentence analysis, renumbering its indices.
    pub fn extend(self, other: DependencyTree) -> Result<Self> {
        let offset = self.tokens.len();
        let mut tokens = self.tokens;
        tokens.extend(other.tokens.into_iter().map(|mut t| {
            t.index += offset;
            if t.head != 0 {
                t.head += offset;
            }
            t
        }));
        DependencyTree::new(self.utterance_id, tokens)
    }
}

#[cfg(test)]
pub(crate) fn tok(index: usize, surface: &str, lemma: &str, upos: Upos, head: usize, deprel: &str) -> Token {
    Token {
        index,
        surface: surface.to_string(),
        lemma: lemma.to_string(),
        upos,
        head,
        deprel: deprel.to_string(),
    }
}
