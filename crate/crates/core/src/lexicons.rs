//! Lexical resources: antonym pairs, sentiment strength, intensifiers and
//! negation markers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_word, Upos};
use crate::error::{Error, Result};

const BUNDLED_ANTONYMS: &str = include_str!("../data/antonyms.tsv");
const BUNDLED_INDIRECT_ANTONYMS: &str = include_str!("../data/antonyms_indirect.tsv");
const BUNDLED_SENTIMENT: &str = include_str!("../data/sentiment.tsv");
const BUNDLED_INTENSIFIERS: &str = include_str!("../data/intensifiers.tsv");
const BUNDLED_NEGATION: &str = include_str!("../data/negation.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AntonymSource {
    Mpqa,
    Opinion,
    Mohammad,
    WordNet,
    VerbOcean,
    Curated,
}

impl AntonymSource {
    pub fn as_str(self) -> &'static str {
        match self {
            AntonymSource::Mpqa => "mpqa",
            AntonymSource::Opinion => "opinion",
            AntonymSource::Mohammad => "mohammad",
            AntonymSource::WordNet => "wordnet",
            AntonymSource::VerbOcean => "verbocean",
            AntonymSource::Curated => "curated",
        }
    }
}

impl fmt::Display for AntonymSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AntonymSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "mpqa" => AntonymSource::Mpqa,
            "opinion" | "opinion_lexicon" => AntonymSource::Opinion,
            "mohammad" => AntonymSource::Mohammad,
            "wordnet" => AntonymSource::WordNet,
            "verbocean" => AntonymSource::VerbOcean,
            "curated" => AntonymSource::Curated,
            other => return Err(format!("unknown antonym source `{other}`")),
        })
    }
}

/// One unordered antonym pair. `first < second`; an empty POS set means the
/// member is unrestricted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AntonymEntry {
    pub first: String,
    pub second: String,
    pub sources: BTreeSet<AntonymSource>,
    pub first_pos: BTreeSet<Upos>,
    pub second_pos: BTreeSet<Upos>,
}

fn pos_admits(restriction: &BTreeSet<Upos>, pos: Option<Upos>) -> bool {
    match pos {
        Some(p) => restriction.is_empty() || restriction.contains(&p),
        None => true,
    }
}

fn merge_pos(into: &mut BTreeSet<Upos>, other: &BTreeSet<Upos>) {
    if into.is_empty() || other.is_empty() {
        into.clear();
    } else {
        into.extend(other.iter().copied());
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AntonymLexicon {
    entries: BTreeMap<(String, String), AntonymEntry>,
}

impl AntonymLexicon {
    /// Adds `{a, b}`. Returns `Err` with a reason for lines that must be
    /// rejected (self pairs, empty lemmas).
    pub fn insert(
        &mut self,
        a: &str,
        a_pos: Option<Upos>,
        b: &str,
        b_pos: Option<Upos>,
        source: AntonymSource,
    ) -> Result<(), &'static str> {
        let a = a.trim().to_lowercase();
        let b = b.trim().to_lowercase();
        if a.is_empty() || b.is_empty() {
            return Err("empty lemma");
        }
        if a == b {
            return Err("self pair");
        }
        let (first, first_pos, second, second_pos) = if a < b { (a, a_pos, b, b_pos) } else { (b, b_pos, a, a_pos) };
        let first_pos: BTreeSet<Upos> = first_pos.into_iter().collect();
        let second_pos: BTreeSet<Upos> = second_pos.into_iter().collect();
        match self.entries.get_mut(&(first.clone(), second.clone())) {
            Some(entry) => {
                entry.sources.insert(source);
                merge_pos(&mut entry.first_pos, &first_pos);
                merge_pos(&mut entry.second_pos, &second_pos);
            }
            None => {
                self.entries.insert(
                    (first.clone(), second.clone()),
                    AntonymEntry {
                        first,
                        second,
                        sources: BTreeSet::from([source]),
                        first_pos,
                        second_pos,
                    },
                );
            }
        }
        Ok(())
    }

    pub fn entry(&self, a: &str, b: &str) -> Option<&AntonymEntry> {
        if a <= b {
            self.entries.get(&(a.to_string(), b.to_string()))
        } else {
            self.entries.get(&(b.to_string(), a.to_string()))
        }
    }

    /// Lemma-level membership, ignoring POS restrictions.
    pub fn contains(&self, a: &str, b: &str) -> bool {
        a != b && self.entry(a, b).is_some()
    }

    /// Membership that honours POS restrictions; an unknown POS matches.
    pub fn matches(&self, a: &str, a_pos: Option<Upos>, b: &str, b_pos: Option<Upos>) -> bool {
        if a == b {
            return false;
        }
        match self.entry(a, b) {
            Some(e) if e.first == a => pos_admits(&e.first_pos, a_pos) && pos_admits(&e.second_pos, b_pos),
            Some(e) => pos_admits(&e.first_pos, b_pos) && pos_admits(&e.second_pos, a_pos),
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &AntonymEntry> {
        self.entries.values()
    }

    fn load(&mut self, text: &str, origin: &str, source: AntonymSource, report: &mut LoadReport) -> Result<()> {
        let mut accepted = 0;
        for (lineno, line) in content_lines(text) {
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::malformed(
                    origin,
                    lineno,
                    format!("expected `lemma<TAB>lemma`, found {} fields", fields.len()),
                ));
            }
            let (a, a_pos) = split_pos(fields[0], origin, lineno)?;
            let (b, b_pos) = split_pos(fields[1], origin, lineno)?;
            match self.insert(a, a_pos, b, b_pos, source) {
                Ok(()) => accepted += 1,
                Err(reason) => report.reject(origin, lineno, reason),
            }
        }
        *report.antonym_lines.entry(source).or_default() += accepted;
        Ok(())
    }
}

fn split_pos<'a>(field: &'a str, origin: &str, lineno: usize) -> Result<(&'a str, Option<Upos>)> {
    match field.rsplit_once('/') {
        Some((lemma, pos)) if !lemma.is_empty() => {
            let pos = pos.parse().map_err(|e: String| Error::malformed(origin, lineno, e))?;
            Ok((lemma, Some(pos)))
        }
        _ => Ok((field, None)),
    }
}

/// Lemma → strength in [0,1], min-max normalized over the loaded resource.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentStrengthLexicon {
    strength: BTreeMap<String, f64>,
}

impl SentimentStrengthLexicon {
    /// Normalizes raw scores affinely onto [0,1]. A resource whose scores
    /// are all equal maps every entry to 0.5.
    pub fn from_raw(raw: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut merged: BTreeMap<String, f64> = BTreeMap::new();
        for (lemma, score) in raw {
            let slot = merged.entry(lemma.to_lowercase()).or_insert(score);
            *slot = slot.max(score);
        }
        let min = merged.values().copied().fold(f64::INFINITY, f64::min);
        let max = merged.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        let strength = merged
            .into_iter()
            .map(|(lemma, v)| {
                let norm = if span > 0.0 { ((v - min) / span).clamp(0.0, 1.0) } else { 0.5 };
                (lemma, norm)
            })
            .collect();
        SentimentStrengthLexicon { strength }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut raw = Vec::new();
        for (lineno, line) in content_lines(text) {
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let (lemma, score) = match fields.as_slice() {
                [lemma, score] | [lemma, _, score] => (*lemma, *score),
                _ => {
                    return Err(Error::malformed(
                        origin,
                        lineno,
                        "expected `lemma<TAB>score` or `lemma<TAB>POS<TAB>score`",
                    ))
                }
            };
            let score: f64 = score
                .parse()
                .ok()
                .filter(|s: &f64| s.is_finite())
                .ok_or_else(|| Error::malformed(origin, lineno, format!("bad score `{score}`")))?;
            if lemma.is_empty() {
                return Err(Error::malformed(origin, lineno, "empty lemma"));
            }
            raw.push((lemma.to_string(), score));
        }
        Ok(Self::from_raw(raw))
    }

    pub fn get(&self, lemma: &str) -> Option<f64> {
        self.strength.get(lemma).copied()
    }

    pub fn len(&self) -> usize {
        self.strength.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strength.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.strength.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntensifierLexicon {
    entries: BTreeSet<(String, Upos)>,
}

impl IntensifierLexicon {
    /// Only adjective and adverb entries are admitted.
    pub fn insert(&mut self, lemma: &str, pos: Upos) -> bool {
        if !matches!(pos, Upos::ADJ | Upos::ADV) || lemma.trim().is_empty() {
            return false;
        }
        self.entries.insert((lemma.trim().to_lowercase(), pos));
        true
    }

    /// A token tagged as a conjunction never counts, whatever the list says.
    pub fn contains(&self, lemma: &str, pos: Upos) -> bool {
        self.entries.contains(&(lemma.to_string(), pos))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn load(&mut self, text: &str, origin: &str, report: &mut LoadReport) -> Result<()> {
        for (lineno, line) in content_lines(text) {
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [lemma, pos] = fields.as_slice() else {
                return Err(Error::malformed(origin, lineno, "expected `lemma<TAB>POS`"));
            };
            let pos: Upos = pos.parse().map_err(|e: String| Error::malformed(origin, lineno, e))?;
            if !self.insert(lemma, pos) {
                report.reject(origin, lineno, "intensifiers must be ADJ or ADV");
            }
        }
        Ok(())
    }

    /// `lemma` adds both ADJ and ADV readings; `lemma/POS` adds one.
    fn add_extra(&mut self, spec: &str) -> Result<()> {
        match spec.rsplit_once('/') {
            Some((lemma, pos)) => {
                let pos: Upos = pos.parse().map_err(Error::Config)?;
                if !self.insert(lemma, pos) {
                    return Err(Error::Config(format!("extra intensifier `{spec}` is not ADJ or ADV")));
                }
            }
            None => {
                self.insert(spec, Upos::ADJ);
                self.insert(spec, Upos::ADV);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationMarkerList {
    markers: Vec<String>,
    set: BTreeSet<String>,
}

impl NegationMarkerList {
    pub fn new(markers: impl IntoIterator<Item = impl AsRef<str>>) -> Result<Self> {
        let mut list = NegationMarkerList {
            markers: Vec::new(),
            set: BTreeSet::new(),
        };
        for m in markers {
            let m = normalize_word(m.as_ref().trim());
            if !m.is_empty() && list.set.insert(m.clone()) {
                list.markers.push(m);
            }
        }
        if list.markers.is_empty() {
            return Err(Error::EmptyInput("negation marker list".into()));
        }
        Ok(list)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(content_lines(text).map(|(_, l)| l))
    }

    pub fn markers(&self) -> &[String] {
        &self.markers
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    /// Matches the listed form, its apostrophe-free spelling, or any
    /// contracted `n't` token.
    pub fn contains(&self, surface: &str) -> bool {
        self.key(surface).is_some()
    }

    /// Canonical key used to decide whether two utterances share a marker:
    /// every spelling of `not` (contractions included) collapses to "not".
    pub fn key(&self, surface: &str) -> Option<String> {
        let w = normalize_word(surface);
        let bare = w.replace('\'', "");
        let listed = self.set.contains(&w) || self.set.contains(&bare);
        let contracted = w.ends_with("n't") || w == "nt";
        if !listed && !contracted {
            return None;
        }
        let is_not = contracted
            || matches!(
                bare.as_str(),
                "not" | "cannot" | "cant" | "wont" | "dont" | "doesnt" | "didnt" | "isnt" | "arent" | "wasnt" | "werent" | "aint"
            );
        Some(if is_not { "not".to_string() } else { bare })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedLine {
    pub origin: String,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    /// Accepted antonym lines per source tag.
    pub antonym_lines: BTreeMap<AntonymSource, usize>,
    pub antonym_pairs: usize,
    pub sentiment_entries: usize,
    pub intensifier_entries: usize,
    pub negation_markers: usize,
    pub rejected: Vec<RejectedLine>,
}

impl LoadReport {
    fn reject(&mut self, origin: &str, line: usize, reason: &str) {
        log::warn!("{origin}:{line}: rejected lexicon line ({reason})");
        self.rejected.push(RejectedLine {
            origin: origin.to_string(),
            line,
            reason: reason.to_string(),
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct AntonymSourceConfig {
    pub path: PathBuf,
    pub source: AntonymSource,
}

/// Contents of a `lexicons.toml` file. Omitted resources fall back to the
/// bundled defaults; relative paths are resolved against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconConfig {
    #[serde(default)]
    pub antonym_sources: Vec<AntonymSourceConfig>,
    pub sentiment_source: Option<PathBuf>,
    pub intensifier_source: Option<PathBuf>,
    pub negation_source: Option<PathBuf>,
    /// Extra intensifiers such as `such` or `such/ADJ`.
    #[serde(default)]
    pub extra_intensifiers: Vec<String>,
}

impl LexiconConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconBundle {
    pub antonyms: AntonymLexicon,
    pub sentiment: SentimentStrengthLexicon,
    pub intensifiers: IntensifierLexicon,
    pub negation: NegationMarkerList,
    pub report: LoadReport,
}

impl LexiconBundle {
    /// The resources shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_config(&LexiconConfig::default(), Path::new("."))
            .expect("bundled lexicon resources are well-formed")
    }

    pub fn load(config_path: impl AsRef<Path>) -> Result<Self> {
        let path = config_path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config = LexiconConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_config(&config, base)
    }

    pub fn from_config(config: &LexiconConfig, base: &Path) -> Result<Self> {
        let mut report = LoadReport::default();
        let read = |p: &Path| -> Result<(String, String)> {
            let full = base.join(p);
            let text = fs::read_to_string(&full).map_err(|e| Error::io(&full, e))?;
            Ok((text, full.display().to_string()))
        };

        let mut antonyms = AntonymLexicon::default();
        if config.antonym_sources.is_empty() {
            antonyms.load(BUNDLED_ANTONYMS, "bundled:antonyms.tsv", AntonymSource::Curated, &mut report)?;
            antonyms.load(
                BUNDLED_INDIRECT_ANTONYMS,
                "bundled:antonyms_indirect.tsv",
                AntonymSource::Curated,
                &mut report,
            )?;
        }
        for src in &config.antonym_sources {
            let (text, origin) = read(&src.path)?;
            antonyms.load(&text, &origin, src.source, &mut report)?;
        }

        let sentiment = match &config.sentiment_source {
            Some(p) => {
                let (text, origin) = read(p)?;
                SentimentStrengthLexicon::parse(&text, &origin)?
            }
            None => SentimentStrengthLexicon::parse(BUNDLED_SENTIMENT, "bundled:sentiment.tsv")?,
        };

        let mut intensifiers = IntensifierLexicon::default();
        match &config.intensifier_source {
            Some(p) => {
                let (text, origin) = read(p)?;
                intensifiers.load(&text, &origin, &mut report)?;
            }
            None => intensifiers.load(BUNDLED_INTENSIFIERS, "bundled:intensifiers.tsv", &mut report)?,
        }
        for extra in &config.extra_intensifiers {
            intensifiers.add_extra(extra)?;
        }

        let negation = match &config.negation_source {
            Some(p) => NegationMarkerList::parse(&read(p)?.0)?,
            None => NegationMarkerList::parse(BUNDLED_NEGATION)?,
        };

        report.antonym_pairs = antonyms.len();
        report.sentiment_entries = sentiment.len();
        report.intensifier_entries = intensifiers.len();
        report.negation_markers = negation.len();
        Ok(LexiconBundle {
            antonyms,
            sentiment,
            intensifiers,
            negation,
            report,
        })
    }

    pub fn is_antonym(&self, a: &str, b: &str) -> bool {
        self.antonyms.contains(a, b)
    }

    pub fn sentiment_strength(&self, lemma: &str) -> Option<f64> {
        self.sentiment.get(lemma)
    }

    pub fn is_intensifier(&self, lemma: &str, pos: Upos) -> bool {
        self.intensifiers.contains(lemma, pos)
    }

    pub fn is_negation_marker(&self, surface: &str) -> bool {
        self.negation.contains(surface)
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// Converts an MPQA subjectivity-clue file (`type=strongsubj ... word1=x
/// ... priorpolarity=positive`) into `lemma<TAB>score` lines: strong clues
/// score 1, weak clues 0.5. Neutral-polarity clues are dropped.
pub fn convert_mpqa_clues(text: &str) -> String {
    let mut best: BTreeMap<String, f64> = BTreeMap::new();
    for line in text.lines() {
        let mut word = None;
        let mut score = None;
        let mut neutral = false;
        for field in line.split_whitespace() {
            match field.split_once('=') {
                Some(("word1", w)) => word = Some(w.to_lowercase()),
                Some(("type", "strongsubj")) => score = Some(1.0),
                Some(("type", "weaksubj")) => score = Some(0.5),
                Some(("priorpolarity", "neutral")) => neutral = true,
                _ => {}
            }
        }
        if let (Some(w), Some(s), false) = (word, score, neutral) {
            let slot = best.entry(w).or_insert(s);
            *slot = slot.max(s);
        }
    }
    best.into_iter().map(|(w, s)| format!("{w}\t{s}\n")).collect()
}
