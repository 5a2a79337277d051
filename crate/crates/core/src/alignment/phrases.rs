use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Alignment, SentencePair};

pub const DEFAULT_MAX_PHRASE_LEN: usize = 4;

/// One extracted phrase pair with its 1-based inclusive spans.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PhraseOccurrence {
    pub source_span: (usize, usize),
    pub target_span: (usize, usize),
    pub source: String,
    pub target: String,
}

/// Alignment-consistent phrase pairs of at most `max_len` words per side.
/// Every boundary word of both spans must be aligned, so unaligned words are
/// never used to widen a phrase.
pub fn extract_phrases(pair: &SentencePair, alignment: &Alignment, max_len: usize) -> Vec<PhraseOccurrence> {
    let n = pair.source.len();
    let aligned_src: Vec<bool> = (0..=n).map(|i| alignment.targets_of(i).next().is_some()).collect();
    let mut out = BTreeSet::new();
    for i1 in 1..=n {
        if !aligned_src[i1] {
            continue;
        }
        for i2 in i1..=n.min(i1 + max_len.saturating_sub(1)) {
            if !aligned_src[i2] {
                continue;
            }
            let inside = alignment.links().iter().filter(|(i, _)| (i1..=i2).contains(i));
            let (j1, j2) = inside.fold((usize::MAX, 0), |(lo, hi), &(_, j)| (lo.min(j), hi.max(j)));
            if j2 - j1 + 1 > max_len {
                continue;
            }
            let consistent = alignment
                .links()
                .iter()
                .all(|&(i, j)| !(j1..=j2).contains(&j) || (i1..=i2).contains(&i));
            if consistent {
                out.insert(PhraseOccurrence {
                    source_span: (i1, i2),
                    target_span: (j1, j2),
                    source: pair.source[i1 - 1..i2].join(" "),
                    target: pair.target[j1 - 1..j2].join(" "),
                });
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhraseEntry {
    pub count: u64,
    pub phi_f_given_e: f64,
    pub phi_e_given_f: f64,
}

/// Phrase pairs (e, f) scored by relative frequency.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhraseTable {
    entries: BTreeMap<(String, String), PhraseEntry>,
}

impl PhraseTable {
    pub fn from_occurrences<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut counts: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (e, f) in pairs {
            *counts.entry((e.to_string(), f.to_string())).or_insert(0) += 1;
        }
        let mut by_e: BTreeMap<&str, u64> = BTreeMap::new();
        let mut by_f: BTreeMap<&str, u64> = BTreeMap::new();
        for ((e, f), c) in &counts {
            *by_e.entry(e).or_insert(0) += c;
            *by_f.entry(f).or_insert(0) += c;
        }
        let entries = counts
            .iter()
            .map(|((e, f), &c)| {
                let entry = PhraseEntry {
                    count: c,
                    phi_f_given_e: c as f64 / by_e[e.as_str()] as f64,
                    phi_e_given_f: c as f64 / by_f[f.as_str()] as f64,
                };
                ((e.clone(), f.clone()), entry)
            })
            .collect();
        PhraseTable { entries }
    }

    /// Takes stored scores as they are.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, String, PhraseEntry)>) -> Self {
        PhraseTable {
            entries: entries.into_iter().map(|(e, f, x)| ((e, f), x)).collect(),
        }
    }

    pub fn get(&self, e: &str, f: &str) -> Option<&PhraseEntry> {
        self.entries.get(&(e.to_string(), f.to_string()))
    }

    pub fn contains(&self, e: &str, f: &str) -> bool {
        self.get(e, f).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &PhraseEntry)> {
        self.entries.iter().map(|((e, f), x)| (e.as_str(), f.as_str(), x))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest |Σ_f φ(f|e) − 1| over source phrases.
    pub fn normalization_error(&self) -> f64 {
        let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
        for ((e, _), x) in &self.entries {
            *sums.entry(e).or_insert(0.0) += x.phi_f_given_e;
        }
        sums.values().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_pairs: usize,
    pub removed_shared: usize,
    pub removed_low_phi: usize,
    pub retained: usize,
}

/// Message→interpretation phrase pairs that survived both filters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OppositePhraseTable {
    pub table: PhraseTable,
    pub report: FilterReport,
}

/// A phrase-table hit inside a sentence pair (1-based inclusive spans).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseMatch {
    pub source: String,
    pub target: String,
    pub source_span: (usize, usize),
    pub target_span: (usize, usize),
}

impl OppositePhraseTable {
    /// Table built from hand-supplied pairs, each with φ = 1.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let table = PhraseTable::from_occurrences(pairs);
        let n = table.len();
        OppositePhraseTable {
            table,
            report: FilterReport {
                input_pairs: n,
                retained: n,
                ..Default::default()
            },
        }
    }

    /// Adds a pair with φ = 1, as when injecting curated phrases.
    pub fn insert(&mut self, e: &str, f: &str) {
        let entry = PhraseEntry {
            count: 1,
            phi_f_given_e: 1.0,
            phi_e_given_f: 1.0,
        };
        self.table.entries.insert((e.to_lowercase(), f.to_lowercase()), entry);
        self.report.retained = self.table.len();
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    /// Every entry whose e is a contiguous subsequence of `source` and whose f
    /// is one of `target`.
    pub fn find(&self, source: &[String], target: &[String]) -> Vec<PhraseMatch> {
        let mut out = Vec::new();
        for (e, f, _) in self.table.iter() {
            let e_words: Vec<&str> = e.split(' ').collect();
            let f_words: Vec<&str> = f.split(' ').collect();
            if let (Some(s), Some(t)) = (find_span(source, &e_words), find_span(target, &f_words)) {
                out.push(PhraseMatch {
                    source: e.to_string(),
                    target: f.to_string(),
                    source_span: s,
                    target_span: t,
                });
            }
        }
        out
    }
}

fn find_span(tokens: &[String], needle: &[&str]) -> Option<(usize, usize)> {
    if needle.is_empty() || needle.len() > tokens.len() {
        return None;
    }
    tokens
        .windows(needle.len())
        .position(|w| w.iter().zip(needle).all(|(a, b)| a == b))
        .map(|p| (p + 1, p + needle.len()))
}

/// Drops pairs also found in the interpretation/interpretation table, then
/// rejects pairs with φ(f|e) < 1/|f_set(e)|, where f_set(e) is the set of f
/// still paired with e after the first step.
pub fn score_and_filter(st: &PhraseTable, hh: &PhraseTable) -> OppositePhraseTable {
    let mut report = FilterReport {
        input_pairs: st.len(),
        ..Default::default()
    };
    let kept: Vec<(&str, &str, &PhraseEntry)> = st.iter().filter(|(e, f, _)| !hh.contains(e, f)).collect();
    report.removed_shared = st.len() - kept.len();
    let mut f_set: BTreeMap<&str, usize> = BTreeMap::new();
    for (e, _, _) in &kept {
        *f_set.entry(e).or_insert(0) += 1;
    }
    let retained: Vec<(String, String, PhraseEntry)> = kept
        .into_iter()
        .filter(|(e, _, x)| x.phi_f_given_e >= 1.0 / f_set[e] as f64)
        .map(|(e, f, x)| (e.to_string(), f.to_string(), *x))
        .collect();
    report.removed_low_phi = st.len() - report.removed_shared - retained.len();
    report.retained = retained.len();
    OppositePhraseTable {
        table: PhraseTable::from_entries(retained),
        report,
    }
}
