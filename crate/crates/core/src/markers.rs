//! Rule-based irony markers in ironic messages. All rules come from a JSON
//! file; the bundled one covers emoticons, emoji, hashtags, repeated
//! punctuation, capitals, quotes, interjections and tag questions.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{fallback_tokenize, normalize_word, Corpus, DependencyTree, Incongruity, ParseMap, Utterance};
use crate::error::{Error, Result};

const BUNDLED_RULES: &str = include_str!("../data/markers.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TypographicMarker {
    Emoticon,
    Emoji,
    Hashtag,
    MultiPunct,
    AllCaps,
    Quotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MorphosyntacticMarker {
    Interjection,
    TagQuestion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MarkerKind {
    Typographic(TypographicMarker),
    Morphosyntactic(MorphosyntacticMarker),
    /// Links to media; reported but not counted as a marker.
    Url,
}

/// One trigger, located by byte offsets into the utterance text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerHit {
    pub kind: MarkerKind,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerSet {
    pub utterance_id: String,
    pub typographic: BTreeSet<TypographicMarker>,
    pub morphosyntactic: BTreeSet<MorphosyntacticMarker>,
    #[serde(default)]
    pub url: bool,
    #[serde(default)]
    pub hits: Vec<MarkerHit>,
}

impl MarkerSet {
    pub fn any_marker(&self) -> bool {
        !self.typographic.is_empty() || !self.morphosyntactic.is_empty()
    }
}

/// Serialized rule inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerRules {
    pub emoticon: Vec<String>,
    pub emoji: String,
    pub hashtag: String,
    pub excluded_hashtags: Vec<String>,
    pub multi_punct: String,
    pub all_caps: String,
    pub quotation: String,
    pub url: String,
    pub interjections: Vec<String>,
    pub tag_questions: Vec<String>,
}

impl MarkerRules {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_RULES).expect("bundled marker rules are valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Compiled form of [`MarkerRules`].
#[derive(Debug, Clone)]
pub struct MarkerDetector {
    emoticon: Vec<Regex>,
    emoji: Regex,
    hashtag: Regex,
    excluded_hashtags: HashSet<String>,
    multi_punct: Regex,
    all_caps: Regex,
    quotation: Regex,
    url: Regex,
    interjections: HashSet<String>,
    tag_question: Option<Regex>,
}

fn compile(pattern: &str, what: &str) -> Result<Regex> {
    Regex::new(pattern).map_err(|e| Error::Config(format!("marker rule `{what}`: {e}")))
}

impl MarkerDetector {
    pub fn new(rules: &MarkerRules) -> Result<Self> {
        let tag_question = if rules.tag_questions.is_empty() {
            None
        } else {
            let alts: Vec<String> = rules.tag_questions.iter().map(|t| regex::escape(t)).collect();
            Some(compile(
                &format!(r"(?i)(?:^|[\s,])((?:{})\s*\?+)\W*$", alts.join("|")),
                "tag_questions",
            )?)
        };
        Ok(MarkerDetector {
            emoticon: rules
                .emoticon
                .iter()
                .map(|p| compile(p, "emoticon"))
                .collect::<Result<_>>()?,
            emoji: compile(&rules.emoji, "emoji")?,
            hashtag: compile(&rules.hashtag, "hashtag")?,
            excluded_hashtags: rules.excluded_hashtags.iter().map(|h| h.to_lowercase()).collect(),
            multi_punct: compile(&rules.multi_punct, "multi_punct")?,
            all_caps: compile(&rules.all_caps, "all_caps")?,
            quotation: compile(&rules.quotation, "quotation")?,
            url: compile(&rules.url, "url")?,
            interjections: rules.interjections.iter().map(|w| w.to_lowercase()).collect(),
            tag_question,
        })
    }

    pub fn bundled() -> Self {
        Self::new(&MarkerRules::bundled()).expect("bundled marker rules compile")
    }

    /// Markers in one utterance. Interjections are read from the parse
    /// tokens when a tree is given, from fallback tokens otherwise.
    pub fn detect(&self, message: &Utterance, tree: Option<&DependencyTree>) -> MarkerSet {
        let text = &message.text;
        let mut hits = Vec::new();
        let mut push = |kind: MarkerKind, start: usize, end: usize| {
            hits.push(MarkerHit {
                kind,
                start,
                end,
                text: text[start..end].to_string(),
            })
        };
        let typo = MarkerKind::Typographic;
        for re in &self.emoticon {
            for c in re.captures_iter(text) {
                let m = c.get(1).unwrap_or_else(|| c.get(0).expect("whole match"));
                push(typo(TypographicMarker::Emoticon), m.start(), m.end());
            }
        }
        for m in self.emoji.find_iter(text) {
            push(typo(TypographicMarker::Emoji), m.start(), m.end());
        }
        for m in self.hashtag.find_iter(text) {
            let name = m.as_str().trim_start_matches('#').to_lowercase();
            if !self.excluded_hashtags.contains(&name) {
                push(typo(TypographicMarker::Hashtag), m.start(), m.end());
            }
        }
        for m in self.multi_punct.find_iter(text) {
            push(typo(TypographicMarker::MultiPunct), m.start(), m.end());
        }
        for m in self.all_caps.find_iter(text) {
            push(typo(TypographicMarker::AllCaps), m.start(), m.end());
        }
        for m in self.quotation.find_iter(text) {
            push(typo(TypographicMarker::Quotation), m.start(), m.end());
        }
        for m in self.url.find_iter(text) {
            push(MarkerKind::Url, m.start(), m.end());
        }
        if let Some(re) = &self.tag_question {
            if let Some(m) = re.captures(text).and_then(|c| c.get(1)) {
                push(
                    MarkerKind::Morphosyntactic(MorphosyntacticMarker::TagQuestion),
                    m.start(),
                    m.end(),
                );
            }
        }
        let words: Vec<String> = match tree {
            Some(t) => t.tokens().iter().map(|t| normalize_word(&t.surface)).collect(),
            None => fallback_tokenize(text).iter().map(|t| normalize_word(t)).collect(),
        };
        let mut cursor = 0;
        let lower = text.to_lowercase();
        for w in words {
            let Some(offset) = lower.get(cursor..).and_then(|rest| rest.find(&w)) else { continue };
            let start = cursor + offset;
            cursor = start + w.len();
            if self.interjections.contains(&w) && text.is_char_boundary(start) && text.is_char_boundary(cursor) {
                push(
                    MarkerKind::Morphosyntactic(MorphosyntacticMarker::Interjection),
                    start,
                    cursor,
                );
            }
        }

        hits.sort_by_key(|h| (h.start, h.end, h.kind));
        let mut set = MarkerSet {
            utterance_id: message.id.clone(),
            ..Default::default()
        };
        for h in &hits {
            match h.kind {
                MarkerKind::Typographic(t) => {
                    set.typographic.insert(t);
                }
                MarkerKind::Morphosyntactic(m) => {
                    set.morphosyntactic.insert(m);
                }
                MarkerKind::Url => set.url = true,
            }
        }
        set.hits = hits;
        set
    }
}

pub fn detect_markers(detector: &MarkerDetector, message: &Utterance, tree: Option<&DependencyTree>) -> MarkerSet {
    detector.detect(message, tree)
}

/// Marker sets for every distinct ironic message, keyed by utterance id.
pub fn detect_corpus_markers(
    detector: &MarkerDetector,
    corpus: &Corpus,
    parses: &ParseMap,
) -> BTreeMap<String, MarkerSet> {
    let mut out = BTreeMap::new();
    for p in corpus.pairs() {
        out.entry(p.s_im.id.clone())
            .or_insert_with(|| detector.detect(&p.s_im, parses.get(&p.s_im.id)));
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarkerPrevalence {
    /// Percentage of explicit-incongruity pairs whose message has a marker.
    pub explicit: Option<f64>,
    pub implicit: Option<f64>,
    pub explicit_pairs: usize,
    pub implicit_pairs: usize,
    /// Pairs with unknown incongruity, left out of both shares.
    pub unknown_pairs: usize,
    /// Pairs whose message has no marker set.
    pub missing_markers: usize,
}

/// Share of pairs with a marker in their message, per incongruity type,
/// over valid pairs.
pub fn marker_prevalence(corpus: &Corpus, markers: &BTreeMap<String, MarkerSet>) -> MarkerPrevalence {
    let mut out = MarkerPrevalence::default();
    let (mut exp_hits, mut imp_hits) = (0usize, 0usize);
    for p in corpus.valid_pairs() {
        let incongruity = p.incongruity();
        if incongruity == Incongruity::Unknown {
            out.unknown_pairs += 1;
            continue;
        }
        let Some(set) = markers.get(&p.s_im.id) else {
            out.missing_markers += 1;
            continue;
        };
        let hit = usize::from(set.any_marker());
        match incongruity {
            Incongruity::Explicit => {
                out.explicit_pairs += 1;
                exp_hits += hit;
            }
            Incongruity::Implicit => {
                out.implicit_pairs += 1;
                imp_hits += hit;
            }
            Incongruity::Unknown => unreachable!(),
        }
    }
    let share = |h: usize, n: usize| (n > 0).then(|| 100.0 * h as f64 / n as f64);
    out.explicit = share(exp_hits, out.explicit_pairs);
    out.implicit = share(imp_hits, out.implicit_pairs);
    out
}

pub fn write_markers<W: std::io::Write>(sets: &BTreeMap<String, MarkerSet>, mut out: W) -> Result<()> {
    for s in sets.values() {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}

pub fn read_markers(path: impl AsRef<Path>) -> Result<BTreeMap<String, MarkerSet>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let set: MarkerSet = serde_json::from_str(line).map_err(|e| Error::malformed(&origin, n + 1, e.to_string()))?;
        out.insert(set.utterance_id.clone(), set);
    }
    Ok(out)
}
