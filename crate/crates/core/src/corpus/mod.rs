//! Parallel corpus of ironic messages and hearer interpretations.

mod conllu;
mod pairs;
mod tokenize;
mod tree;
mod types;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

pub use conllu::{load_parses, parse_conllu, write_conllu, ParseMap};
pub use pairs::{load_pairs, parse_pairs, write_pairs, PairsFormat, TSV_HEADER};
pub use tokenize::{fallback_tokenize, is_punctuation, normalize_word};
pub use tree::{DependencyTree, Token};
pub use types::{GoldAnnotation, Incongruity, IronyPair, Role, StrategyLabel, UnknownLabel, Upos, Utterance};

#[cfg(test)]
pub(crate) use tree::tok;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pairs: Vec<IronyPair>,
}

impl Corpus {
    pub fn new(pairs: Vec<IronyPair>) -> Self {
        Corpus { pairs }
    }

    pub fn pairs(&self) -> &[IronyPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, pair_id: &str) -> Option<&IronyPair> {
        self.pairs.iter().find(|p| p.pair_id == pair_id)
    }

    pub fn valid_pairs(&self) -> impl Iterator<Item = &IronyPair> {
        self.pairs.iter().filter(|p| p.is_valid())
    }

    /// Pairs grouped by speaker message id, in order of first appearance.
    pub fn messages(&self) -> Vec<(&str, Vec<&IronyPair>)> {
        let mut order: Vec<&str> = Vec::new();
        let mut groups: HashMap<&str, Vec<&IronyPair>> = HashMap::new();
        for p in &self.pairs {
            let id = p.s_im.id.as_str();
            groups
                .entry(id)
                .or_insert_with(|| {
                    order.push(id);
                    Vec::new()
                })
                .push(p);
        }
        order
            .into_iter()
            .map(|id| (id, groups.remove(id).unwrap_or_default()))
            .collect()
    }

    /// Marks pairs whose interpretation merely copies the message
    /// (case-insensitive equality) as invalid. Returns how many were flagged.
    pub fn flag_copies(&mut self) -> usize {
        let mut flagged = 0;
        for p in &mut self.pairs {
            let same = p.s_im.text.trim().to_lowercase() == p.h_int.text.trim().to_lowercase();
            if same {
                let gold = p.gold.get_or_insert_with(GoldAnnotation::default);
                if gold.valid {
                    gold.valid = false;
                    flagged += 1;
                }
            }
        }
        flagged
    }
}

/// Lowercased token strings of an utterance: parse surfaces when a parse
/// exists, fallback tokens otherwise.
pub fn utterance_tokens(utterance: &Utterance, parses: &ParseMap) -> Vec<String> {
    match parses.get(&utterance.id) {
        Some(tree) => tree.tokens().iter().map(|t| normalize_word(&t.surface)).collect(),
        None => fallback_tokenize(&utterance.text).iter().map(|t| normalize_word(t)).collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub total_pairs: usize,
    pub distinct_messages: usize,
    pub distinct_hearers: usize,
    pub missing_parse_s_im: usize,
    pub missing_parse_h_int: usize,
    /// Utterances (counted once per distinct id) without a parse.
    pub missing_parse_total: usize,
    pub excluded_pairs: usize,
    pub empty_texts: usize,
    pub pairs_without_gold: usize,
    /// Messages where the number of pairs differs from the number of distinct hearers.
    pub repeated_hearer_messages: usize,
}

pub fn validate_corpus(corpus: &Corpus, parses: &ParseMap) -> ValidationReport {
    let mut report = ValidationReport {
        total_pairs: corpus.len(),
        ..Default::default()
    };
    let mut seen_s = BTreeSet::new();
    let mut hearers = BTreeSet::new();
    for p in corpus.pairs() {
        hearers.insert(p.hearer_id.as_str());
        if seen_s.insert(p.s_im.id.as_str()) && !parses.contains_key(&p.s_im.id) {
            report.missing_parse_s_im += 1;
        }
        if !parses.contains_key(&p.h_int.id) {
            report.missing_parse_h_int += 1;
        }
        if !p.is_valid() {
            report.excluded_pairs += 1;
        }
        report.empty_texts += usize::from(p.s_im.is_blank()) + usize::from(p.h_int.is_blank());
        if p.gold.is_none() {
            report.pairs_without_gold += 1;
        }
    }
    for (_, group) in corpus.messages() {
        let distinct: BTreeSet<&str> = group.iter().map(|p| p.hearer_id.as_str()).collect();
        if distinct.len() != group.len() {
            report.repeated_hearer_messages += 1;
        }
    }
    report.distinct_messages = seen_s.len();
    report.distinct_hearers = hearers.len();
    report.missing_parse_total = report.missing_parse_s_im + report.missing_parse_h_int;
    report
}
