use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which side of a pair an utterance sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    SpeakerIronic,
    HearerInterpretation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub text: String,
    pub role: Role,
}

impl Utterance {
    pub fn new(id: impl Into<String>, text: impl Into<String>, role: Role) -> Self {
        Utterance {
            id: id.into(),
            text: text.into(),
            role,
        }
    }

    pub fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }
}

/// The interpretation strategies a hearer can use.
///
/// Declaration order is the precedence order used when a single primary
/// label is needed (most frequent strategy first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StrategyLabel {
    LexAnt,
    SimpleNeg,
    AnWeakSent,
    AnInterrogToDecl,
    AnDesiderative,
    AntPhrasePragInf,
}

impl StrategyLabel {
    pub const ALL: [StrategyLabel; 6] = [
        StrategyLabel::LexAnt,
        StrategyLabel::SimpleNeg,
        StrategyLabel::AnWeakSent,
        StrategyLabel::AnInterrogToDecl,
        StrategyLabel::AnDesiderative,
        StrategyLabel::AntPhrasePragInf,
    ];

    /// Stable serialized identifier.
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyLabel::LexAnt => "LexAnt",
            StrategyLabel::SimpleNeg => "SimpleNeg",
            StrategyLabel::AnWeakSent => "AnWeakSent",
            StrategyLabel::AnInterrogToDecl => "AnInterrogToDecl",
            StrategyLabel::AnDesiderative => "AnDesiderative",
            StrategyLabel::AntPhrasePragInf => "AntPhrasePragInf",
        }
    }

    /// Name used in printed tables.
    pub fn table_name(self) -> &'static str {
        match self {
            StrategyLabel::LexAnt => "Lex_ant",
            StrategyLabel::SimpleNeg => "Simple_neg",
            StrategyLabel::AnWeakSent => "AN_weaksent",
            StrategyLabel::AnInterrogToDecl => "AN_I->D",
            StrategyLabel::AnDesiderative => "AN_desiderative",
            StrategyLabel::AntPhrasePragInf => "AntPhrase+PragInf",
        }
    }

    /// Labels that combine antonym/negation evidence with another device.
    pub fn is_combined(self) -> bool {
        matches!(
            self,
            StrategyLabel::AnWeakSent | StrategyLabel::AnInterrogToDecl | StrategyLabel::AnDesiderative
        )
    }
}

impl fmt::Display for StrategyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel(pub String);

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown strategy label `{}`", self.0)
    }
}

impl std::error::Error for UnknownLabel {}

impl FromStr for StrategyLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        StrategyLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s || l.table_name() == s)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Incongruity {
    Explicit,
    Implicit,
    #[default]
    Unknown,
}

impl Incongruity {
    pub fn as_str(self) -> &'static str {
        match self {
            Incongruity::Explicit => "explicit",
            Incongruity::Implicit => "implicit",
            Incongruity::Unknown => "",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "explicit" | "exp" | "e" => Some(Incongruity::Explicit),
            "implicit" | "imp" | "i" => Some(Incongruity::Implicit),
            "" | "unknown" | "_" | "-" => Some(Incongruity::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub strategies: BTreeSet<StrategyLabel>,
    pub incongruity: Incongruity,
    pub markers_present: Option<bool>,
    pub valid: bool,
}

impl Default for GoldAnnotation {
    fn default() -> Self {
        GoldAnnotation {
            strategies: BTreeSet::new(),
            incongruity: Incongruity::Unknown,
            markers_present: None,
            valid: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IronyPair {
    pub pair_id: String,
    pub s_im: Utterance,
    pub h_int: Utterance,
    pub hearer_id: String,
    pub gold: Option<GoldAnnotation>,
}

impl IronyPair {
    /// Pairs flagged invalid by annotators are left out of analyses.
    pub fn is_valid(&self) -> bool {
        self.gold.as_ref().is_none_or(|g| g.valid)
    }

    pub fn incongruity(&self) -> Incongruity {
        self.gold.as_ref().map_or(Incongruity::Unknown, |g| g.incongruity)
    }
}

/// Universal POS tags (UD v2). `CONJ` from UD v1 is read as `CCONJ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum Upos {
    ADJ,
    ADP,
    ADV,
    AUX,
    CCONJ,
    DET,
    INTJ,
    NOUN,
    NUM,
    PART,
    PRON,
    PROPN,
    PUNCT,
    SCONJ,
    SYM,
    VERB,
    X,
}

impl Upos {
    pub fn as_str(self) -> &'static str {
        match self {
            Upos::ADJ => "ADJ",
            Upos::ADP => "ADP",
            Upos::ADV => "ADV",
            Upos::AUX => "AUX",
            Upos::CCONJ => "CCONJ",
            Upos::DET => "DET",
            Upos::INTJ => "INTJ",
            Upos::NOUN => "NOUN",
            Upos::NUM => "NUM",
            Upos::PART => "PART",
            Upos::PRON => "PRON",
            Upos::PROPN => "PROPN",
            Upos::PUNCT => "PUNCT",
            Upos::SCONJ => "SCONJ",
            Upos::SYM => "SYM",
            Upos::VERB => "VERB",
            Upos::X => "X",
        }
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "ADJ" => Upos::ADJ,
            "ADP" => Upos::ADP,
            "ADV" => Upos::ADV,
            "AUX" => Upos::AUX,
            "CCONJ" | "CONJ" => Upos::CCONJ,
            "DET" => Upos::DET,
            "INTJ" => Upos::INTJ,
            "NOUN" => Upos::NOUN,
            "NUM" => Upos::NUM,
            "PART" => Upos::PART,
            "PRON" => Upos::PRON,
            "PROPN" => Upos::PROPN,
            "PUNCT" => Upos::PUNCT,
            "SCONJ" => Upos::SCONJ,
            "SYM" => Upos::SYM,
            "VERB" => Upos::VERB,
            "X" | "_" => Upos::X,
            other => return Err(format!("unknown UPOS tag `{other}`")),
        })
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
