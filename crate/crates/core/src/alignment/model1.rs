use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{Alignment, Bitext, SentencePair, Vocab};
use crate::error::{Error, Result};

/// Sentence pairs per parallel E-step work unit. Partial counts are merged in
/// chunk order, so results do not depend on the thread count.
pub(crate) const CHUNK: usize = 64;

/// Lexical translation probabilities t(f|e), including e = NULL.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    pub(crate) src: Vocab,
    pub(crate) tgt: Vocab,
    pub(crate) probs: Vec<BTreeMap<u32, f64>>,
}

/// A bitext mapped to vocabulary ids; source sentences start with NULL (id 0).
pub(crate) struct Encoded {
    pub(crate) pairs: Vec<(Vec<u32>, Vec<u32>)>,
}

impl TranslationTable {
    fn empty() -> Self {
        TranslationTable {
            src: Vocab::with_null(),
            tgt: Vocab::default(),
            probs: vec![BTreeMap::new()],
        }
    }

    /// Builds a table from raw `(e, f, t)` triples, renormalizing each e.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str, f64)>) -> Self {
        let mut table = TranslationTable::empty();
        for (e, f, p) in entries {
            let e = table.src.intern(e) as usize;
            let f = table.tgt.intern(f);
            if table.probs.len() <= e {
                table.probs.resize_with(e + 1, BTreeMap::new);
            }
            *table.probs[e].entry(f).or_insert(0.0) += p.max(0.0);
        }
        for row in &mut table.probs {
            let total: f64 = row.values().sum();
            if total > 0.0 {
                row.values_mut().for_each(|v| *v /= total);
            }
        }
        table
    }

    /// t(f|e); zero for unseen combinations. Use [`NULL_TOKEN`] for the empty word.
    pub fn prob(&self, f: &str, e: &str) -> f64 {
        match (self.src.id(e), self.tgt.id(f)) {
            (Some(e), Some(f)) => self.p(f, e),
            _ => 0.0,
        }
    }

    pub(crate) fn p(&self, f: u32, e: u32) -> f64 {
        self.probs
            .get(e as usize)
            .and_then(|row| row.get(&f))
            .copied()
            .unwrap_or(0.0)
    }

    /// All `(e, f, t)` entries sorted by e then f.
    pub fn entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<(&str, &str, f64)> = self
            .probs
            .iter()
            .enumerate()
            .flat_map(|(e, row)| {
                row.iter()
                    .map(move |(&f, &p)| (self.src.word(e as u32), self.tgt.word(f), p))
            })
            .collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Largest |Σ_f t(f|e) − 1| over source words that have entries.
    pub fn normalization_error(&self) -> f64 {
        self.probs
            .iter()
            .filter(|row| !row.is_empty())
            .map(|row| (row.values().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn source_vocab_size(&self) -> usize {
        self.src.len()
    }

    /// Encodes a bitext against this table's vocabulary.
    pub(crate) fn encode(&self, bitext: &Bitext) -> Result<Encoded> {
        let mut pairs = Vec::with_capacity(bitext.len());
        for sp in bitext.pairs() {
            let mut s = vec![0u32];
            for w in &sp.source {
                s.push(self.src.id(w).ok_or_else(|| uncovered("source", w))?);
            }
            let t = sp
                .target
                .iter()
                .map(|w| self.tgt.id(w).ok_or_else(|| uncovered("target", w)))
                .collect::<Result<Vec<_>>>()?;
            pairs.push((s, t));
        }
        Ok(Encoded { pairs })
    }

    /// Ids for decoding; unseen words map to `None`.
    pub(crate) fn lookup(&self, pair: &SentencePair) -> (Vec<Option<u32>>, Vec<Option<u32>>) {
        (
            pair.source.iter().map(|w| self.src.id(w)).collect(),
            pair.target.iter().map(|w| self.tgt.id(w)).collect(),
        )
    }

    /// Emission probability for possibly-unknown ids.
    pub(crate) fn p_opt(&self, f: Option<u32>, e: Option<u32>) -> f64 {
        match (f, e) {
            (Some(f), Some(e)) => self.p(f, e),
            _ => 0.0,
        }
    }

    /// Per target word, the most probable real source word; links losing to
    /// NULL or with zero probability are omitted. Ties go to the leftmost word.
    pub fn viterbi_model1(&self, pair: &SentencePair) -> Alignment {
        let (src, tgt) = self.lookup(pair);
        let mut links = Vec::new();
        for (j, &f) in tgt.iter().enumerate() {
            let null = self.p_opt(f, Some(0));
            let mut best: Option<(usize, f64)> = None;
            for (i, &e) in src.iter().enumerate() {
                let p = self.p_opt(f, e);
                if p > 0.0 && best.is_none_or(|(_, b)| p > b) {
                    best = Some((i + 1, p));
                }
            }
            if let Some((i, p)) = best {
                if p >= null {
                    links.push((i, j + 1));
                }
            }
        }
        Alignment::new(pair.source.len(), pair.target.len(), links).expect("links within bounds")
    }
}

fn uncovered(side: &str, word: &str) -> Error {
    Error::Config(format!("initial table does not cover {side} word `{word}`"))
}

/// Merges sparse per-chunk accumulators keyed by (e, f) in chunk order.
pub(crate) fn merge_counts(parts: Vec<HashMap<(u32, u32), f64>>, n_src: usize) -> Vec<BTreeMap<u32, f64>> {
    let mut counts: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); n_src];
    for part in parts {
        let mut keys: Vec<_> = part.into_iter().collect();
        keys.sort_by_key(|(k, _)| *k);
        for ((e, f), c) in keys {
            *counts[e as usize].entry(f).or_insert(0.0) += c;
        }
    }
    counts
}

/// Normalizes expected counts into probabilities, keeping the previous row for
/// source words that received no mass.
pub(crate) fn m_step(table: &mut TranslationTable, counts: Vec<BTreeMap<u32, f64>>) {
    for (e, row) in counts.into_iter().enumerate() {
        let total: f64 = row.values().sum();
        if total > 0.0 {
            table.probs[e] = row.into_iter().map(|(f, c)| (f, c / total)).collect();
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model1Training {
    pub table: TranslationTable,
    /// Corpus log-likelihood before the first iteration and after each one.
    pub log_likelihood: Vec<f64>,
}

/// IBM Model 1 EM. t(f|e) starts uniform over the target words co-occurring
/// with e.
pub fn train_model1(bitext: &Bitext, iterations: usize) -> Result<Model1Training> {
    if bitext.is_empty() {
        return Err(Error::EmptyBitext);
    }
    if iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    let mut table = TranslationTable::empty();
    for sp in bitext.pairs() {
        for w in &sp.source {
            table.src.intern(w);
        }
        for w in &sp.target {
            table.tgt.intern(w);
        }
    }
    table.probs = vec![BTreeMap::new(); table.src.len()];
    let enc = table.encode(bitext)?;
    for (s, t) in &enc.pairs {
        for &e in s {
            for &f in t {
                table.probs[e as usize].insert(f, 1.0);
            }
        }
    }
    for row in &mut table.probs {
        let n = row.len() as f64;
        row.values_mut().for_each(|v| *v = 1.0 / n);
    }

    let mut history = Vec::with_capacity(iterations + 1);
    for _ in 0..iterations {
        let (ll, counts) = e_step(&table, &enc);
        history.push(ll);
        m_step(&mut table, counts);
        log::debug!("model1 iteration: log-likelihood {ll:.6}");
    }
    history.push(log_likelihood(&table, &enc));
    Ok(Model1Training {
        table,
        log_likelihood: history,
    })
}

fn e_step(table: &TranslationTable, enc: &Encoded) -> (f64, Vec<BTreeMap<u32, f64>>) {
    let parts: Vec<(f64, HashMap<(u32, u32), f64>)> = enc
        .pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut ll = 0.0;
            let mut acc: HashMap<(u32, u32), f64> = HashMap::new();
            for (s, t) in chunk {
                for &f in t {
                    let denom: f64 = s.iter().map(|&e| table.p(f, e)).sum();
                    ll += (denom / s.len() as f64).ln();
                    for &e in s {
                        *acc.entry((e, f)).or_insert(0.0) += table.p(f, e) / denom;
                    }
                }
            }
            (ll, acc)
        })
        .collect();
    let ll = parts.iter().map(|p| p.0).sum();
    (ll, merge_counts(parts.into_iter().map(|p| p.1).collect(), table.src.len()))
}

pub(crate) fn log_likelihood(table: &TranslationTable, enc: &Encoded) -> f64 {
    enc.pairs
        .iter()
        .map(|(s, t)| {
            t.iter()
                .map(|&f| (s.iter().map(|&e| table.p(f, e)).sum::<f64>() / s.len() as f64).ln())
                .sum::<f64>()
        })
        .sum()
}

impl TranslationTable {
    pub(crate) fn null_id() -> u32 {
        0
    }
}
