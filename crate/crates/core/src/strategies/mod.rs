//! Strategy detectors and the cascade that turns their evidence into one
//! label set per pair.

mod detectors;
mod view;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{OppositePhraseTable, SymmetricAligner};
use crate::corpus::{Corpus, IronyPair, ParseMap, StrategyLabel};
use crate::error::{Error, Result};
use crate::lexicons::LexiconBundle;
use crate::rq::{Embeddings, RqModel};

pub use detectors::{
    detect_desiderative, detect_interrog_to_decl, detect_lexical_antonym, detect_phrasal_pragmatic,
    detect_simple_negation, detect_weaken_sentiment, NegatedTerm, NegationFindings, RqGate, Side,
};
pub use view::{PairView, UtteranceView, ViewToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EvidenceMethod {
    AlignedAntonym,
    DependencyAntonym,
    FallbackAntonym,
    NegationScope,
    WeakenNeutralize,
    WeakenDropIntensifier,
    RqTransform,
    DesiderativePattern,
    OppositePhrase,
}

/// Inclusive 1-based token range and the 0-based sentence of its first token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEvidence {
    pub label: StrategyLabel,
    pub method: EvidenceMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_span: Option<Span>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_span: Option<Span>,
    /// Word each side's operation applies to (antonym member, negated term).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_focus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_focus: Option<usize>,
    #[serde(default)]
    pub triggers: Vec<String>,
    #[serde(default)]
    pub consumed: bool,
    /// Index of the combined item this one was merged into.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consumed_by: Option<usize>,
}

impl StrategyEvidence {
    pub fn new(label: StrategyLabel, method: EvidenceMethod) -> Self {
        StrategyEvidence {
            label,
            method,
            s_span: None,
            h_span: None,
            s_focus: None,
            h_focus: None,
            triggers: Vec::new(),
            consumed: false,
            consumed_by: None,
        }
    }

    pub(crate) fn consume(&mut self, by: usize) {
        self.consumed = true;
        self.consumed_by = Some(by);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySet {
    pub pair_id: String,
    pub labels: BTreeSet<StrategyLabel>,
    #[serde(default)]
    pub evidence: Vec<StrategyEvidence>,
    /// Resources that were unavailable for this pair.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl StrategySet {
    pub fn from_evidence(pair_id: impl Into<String>, evidence: Vec<StrategyEvidence>, notes: Vec<String>) -> Self {
        let labels = evidence.iter().filter(|e| !e.consumed).map(|e| e.label).collect();
        StrategySet {
            pair_id: pair_id.into(),
            labels,
            evidence,
            notes,
        }
    }

    /// Labels-only set, as read from gold annotations.
    pub fn from_labels(pair_id: impl Into<String>, labels: impl IntoIterator<Item = StrategyLabel>) -> Self {
        StrategySet {
            pair_id: pair_id.into(),
            labels: labels.into_iter().collect(),
            evidence: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Checks the bookkeeping between labels and evidence. Sets without
    /// evidence (gold labels) are accepted as they are.
    pub fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Invariant(format!("{}: {m}", self.pair_id)));
        if self.evidence.is_empty() {
            return Ok(());
        }
        let live: BTreeSet<StrategyLabel> = self.evidence.iter().filter(|e| !e.consumed).map(|e| e.label).collect();
        if live != self.labels {
            return fail("labels differ from unconsumed evidence".into());
        }
        for (k, e) in self.evidence.iter().enumerate() {
            match (e.consumed, e.consumed_by) {
                (false, None) => {}
                (true, Some(by)) => {
                    let Some(target) = self.evidence.get(by) else {
                        return fail(format!("evidence {k} merged into missing item {by}"));
                    };
                    if target.consumed || !target.label.is_combined() {
                        return fail(format!("evidence {k} merged into a non-combined item"));
                    }
                }
                _ => return fail(format!("evidence {k} has inconsistent consumption")),
            }
        }
        if self.labels.contains(&StrategyLabel::AntPhrasePragInf) && self.labels.len() > 1 {
            return fail("phrasal label reported next to other labels".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeConfig {
    /// Minimum strength gap on the [0, 1] scale for neutralization.
    pub weaken_margin: f64,
    /// Word tokens allowed between `I` and `wish`.
    pub desiderative_max_gap: usize,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            weaken_margin: 0.05,
            desiderative_max_gap: 2,
        }
    }
}

/// Everything the detectors consult; optional parts may be absent.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub lexicons: &'a LexiconBundle,
    pub parses: &'a ParseMap,
    pub aligner: Option<&'a SymmetricAligner>,
    pub rq_model: Option<&'a RqModel>,
    pub embeddings: Option<&'a Embeddings>,
    pub opposite_phrases: Option<&'a OppositePhraseTable>,
    pub config: CascadeConfig,
}

impl<'a> Resources<'a> {
    pub fn new(lexicons: &'a LexiconBundle, parses: &'a ParseMap) -> Self {
        Resources {
            lexicons,
            parses,
            aligner: None,
            rq_model: None,
            embeddings: None,
            opposite_phrases: None,
            config: CascadeConfig::default(),
        }
    }
}

pub const NOTE_NO_PARSE_S: &str = "no parse for S_im";
pub const NOTE_NO_PARSE_H: &str = "no parse for H_int";

/// Runs the detectors in cascade order on one pair.
pub fn classify_pair(pair: &IronyPair, res: &Resources) -> StrategySet {
    let view = PairView::new(pair, res.parses, res.aligner);
    let mut notes = Vec::new();
    if !view.s.is_parsed() {
        notes.push(NOTE_NO_PARSE_S.to_string());
    }
    if !view.h.is_parsed() {
        notes.push(NOTE_NO_PARSE_H.to_string());
    }
    if res.aligner.is_none() {
        notes.push("no aligner".to_string());
    }

    let mut evidence = detect_lexical_antonym(&view, res.lexicons);
    let negation = detect_simple_negation(&view, res.lexicons);
    for side in &negation.skipped {
        notes.push(format!("negation skipped on unparsed {side:?} side"));
    }
    evidence.extend(negation.evidence);
    detect_weaken_sentiment(
        &view,
        res.lexicons,
        &mut evidence,
        &negation.unanchored,
        res.config.weaken_margin,
    );
    match res.rq_model {
        Some(model) => {
            let gate = RqGate {
                model,
                lexicons: res.lexicons,
                embeddings: res.embeddings,
            };
            detect_interrog_to_decl(&view, gate, &mut evidence);
        }
        None => notes.push("no RQ model".to_string()),
    }
    for wish in detect_desiderative(&view.h, res.config.desiderative_max_gap) {
        let at = evidence.len();
        let sentence = wish.h_span.map(|s| s.sentence);
        for e in evidence.iter_mut() {
            let same_sentence = e.h_span.map(|s| s.sentence) == sentence;
            if !e.consumed && same_sentence && matches!(e.label, StrategyLabel::LexAnt | StrategyLabel::SimpleNeg) {
                e.consume(at);
            }
        }
        evidence.push(wish);
    }
    match res.opposite_phrases {
        Some(table) => {
            let found = detect_phrasal_pragmatic(&view, table, &evidence);
            evidence.extend(found);
        }
        None => notes.push("no opposite phrase table".to_string()),
    }
    StrategySet::from_evidence(&pair.pair_id, evidence, notes)
}

/// Classifies every valid pair (or every pair with `include_invalid`) in
/// parallel; output is sorted by pair id.
pub fn classify_corpus(corpus: &Corpus, res: &Resources, include_invalid: bool) -> Vec<StrategySet> {
    let pairs: Vec<&IronyPair> = corpus
        .pairs()
        .iter()
        .filter(|p| include_invalid || p.is_valid())
        .collect();
    let mut out: Vec<StrategySet> = pairs.par_iter().map(|p| classify_pair(p, res)).collect();
    out.sort_by(|a, b| a.pair_id.cmp(&b.pair_id));
    out
}

pub fn write_labels<W: Write>(sets: &[StrategySet], mut out: W) -> Result<()> {
    for s in sets {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<StrategySet>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, &path.display().to_string())
}

pub fn parse_labels(text: &str, origin: &str) -> Result<Vec<StrategySet>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let set: StrategySet =
            serde_json::from_str(line).map_err(|e| Error::malformed(origin, n + 1, e.to_string()))?;
        out.push(set);
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
