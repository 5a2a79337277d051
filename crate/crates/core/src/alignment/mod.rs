//! Word alignment of the message/interpretation bitext (IBM Model 1
//! followed by an HMM refinement) and opposite-phrase mining.

mod hmm;
mod io;
mod model1;
mod phrases;
mod pipeline;
mod symmetrize;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{utterance_tokens, Corpus, ParseMap};
use crate::error::{Error, Result};

pub use hmm::{train_hmm, train_hmm_with, HmmJumpModel, HmmTraining, DEFAULT_MAX_JUMP, DEFAULT_P_NULL};
pub use io::{
    read_bitext, read_jump_model, read_phrase_table, read_translation_table, write_bitext, write_jump_model,
    write_phrase_table, write_translation_table,
};
pub use model1::{train_model1, Model1Training, TranslationTable};
pub use phrases::{
    extract_phrases, score_and_filter, FilterReport, OppositePhraseTable, PhraseEntry, PhraseMatch, PhraseOccurrence,
    PhraseTable, DEFAULT_MAX_PHRASE_LEN,
};
pub use pipeline::{mine_opposite_phrases, train_aligner, AlignerConfig, DirectionalModel, SymmetricAligner, TrainingLog};
pub use symmetrize::{symmetrize, Heuristic};

/// Name of the empty source word in model files.
pub const NULL_TOKEN: &str = "NULL";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub source: Vec<String>,
    pub target: Vec<String>,
}

impl SentencePair {
    pub fn new(source: Vec<String>, target: Vec<String>) -> Self {
        SentencePair {
            source: source.into_iter().map(|w| w.to_lowercase()).collect(),
            target: target.into_iter().map(|w| w.to_lowercase()).collect(),
        }
    }

    /// Whitespace-tokenized convenience constructor.
    pub fn from_text(source: &str, target: &str) -> Self {
        let split = |s: &str| s.split_whitespace().map(str::to_string).collect();
        SentencePair::new(split(source), split(target))
    }

    pub fn flipped(&self) -> SentencePair {
        SentencePair {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bitext {
    pairs: Vec<SentencePair>,
}

impl Bitext {
    /// Rejects pairs with an empty side.
    pub fn new(pairs: Vec<SentencePair>) -> Result<Self> {
        if let Some(pos) = pairs.iter().position(|p| p.source.is_empty() || p.target.is_empty()) {
            return Err(Error::EmptyInput(format!("sentence pair {} has an empty side", pos + 1)));
        }
        Ok(Bitext { pairs })
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn flipped(&self) -> Bitext {
        Bitext {
            pairs: self.pairs.iter().map(SentencePair::flipped).collect(),
        }
    }

    /// Message → interpretation bitext over valid pairs.
    pub fn from_corpus(corpus: &Corpus, parses: &ParseMap) -> Result<Self> {
        let pairs = corpus
            .valid_pairs()
            .map(|p| SentencePair {
                source: utterance_tokens(&p.s_im, parses),
                target: utterance_tokens(&p.h_int, parses),
            })
            .filter(|sp| !sp.source.is_empty() && !sp.target.is_empty())
            .collect();
        Bitext::new(pairs)
    }

    /// Interpretation ↔ interpretation bitext: every unordered pair of valid
    /// interpretations of the same message, added in both directions.
    pub fn interpretations_from_corpus(corpus: &Corpus, parses: &ParseMap) -> Result<Self> {
        let mut pairs = Vec::new();
        for (_, group) in corpus.messages() {
            let interps: Vec<Vec<String>> = group
                .iter()
                .filter(|p| p.is_valid())
                .map(|p| utterance_tokens(&p.h_int, parses))
                .filter(|t| !t.is_empty())
                .collect();
            for a in 0..interps.len() {
                for b in a + 1..interps.len() {
                    pairs.push(SentencePair {
                        source: interps[a].clone(),
                        target: interps[b].clone(),
                    });
                    pairs.push(SentencePair {
                        source: interps[b].clone(),
                        target: interps[a].clone(),
                    });
                }
            }
        }
        Bitext::new(pairs)
    }
}

/// A set of 1-based (source, target) links.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub source_len: usize,
    pub target_len: usize,
    links: BTreeSet<(usize, usize)>,
}

impl Alignment {
    pub fn new(source_len: usize, target_len: usize, links: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let links: BTreeSet<(usize, usize)> = links.into_iter().collect();
        if let Some(&(i, j)) = links
            .iter()
            .find(|&&(i, j)| i == 0 || j == 0 || i > source_len || j > target_len)
        {
            return Err(Error::Invariant(format!(
                "link ({i},{j}) outside a {source_len}x{target_len} sentence pair"
            )));
        }
        Ok(Alignment {
            source_len,
            target_len,
            links,
        })
    }

    pub fn empty(source_len: usize, target_len: usize) -> Self {
        Alignment {
            source_len,
            target_len,
            links: BTreeSet::new(),
        }
    }

    pub fn links(&self) -> &BTreeSet<(usize, usize)> {
        &self.links
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.links.contains(&(i, j))
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// Swaps the roles of source and target.
    pub fn transposed(&self) -> Alignment {
        Alignment {
            source_len: self.target_len,
            target_len: self.source_len,
            links: self.links.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    /// Target positions linked to source position `i`.
    pub fn targets_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().filter(move |l| l.0 == i).map(|l| l.1)
    }

    /// Source positions linked to target position `j`.
    pub fn sources_of(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.links.iter().filter(move |l| l.1 == j).map(|l| l.0)
    }
}

/// String interning shared by the trainers. Id 0 of a source vocabulary is
/// reserved for NULL.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    pub(crate) fn with_null() -> Self {
        let mut v = Vocab::default();
        v.intern(NULL_TOKEN);
        v
    }

    pub(crate) fn intern(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.ids.get(w) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(w.to_string());
        self.ids.insert(w.to_string(), id);
        id
    }

    pub(crate) fn id(&self, w: &str) -> Option<u32> {
        self.ids.get(w).copied()
    }

    pub(crate) fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub(crate) fn len(&self) -> usize {
        self.words.len()
    }
}
