//! Pairs file I/O (TSV and JSONL).
//!
//! TSV columns: `pair_id hearer_id s_im_text h_int_text gold_strategies
//! incongruity valid`, with an optional eighth `s_im_id` column. A header row
//! starting with `pair_id` is skipped. JSONL objects use the same field names.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{GoldAnnotation, Incongruity, IronyPair, Role, StrategyLabel, UnknownLabel, Utterance};
use super::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairsFormat {
    Tsv,
    Jsonl,
}

impl PairsFormat {
    /// `.jsonl`/`.json` means JSONL, anything else TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => PairsFormat::Jsonl,
            _ => PairsFormat::Tsv,
        }
    }
}

pub const TSV_HEADER: &str = "pair_id\thearer_id\ts_im_text\th_int_text\tgold_strategies\tincongruity\tvalid";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum LabelField {
    Joined(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PairRecord {
    pair_id: String,
    hearer_id: String,
    s_im_text: String,
    h_int_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold_strategies: Option<LabelField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    incongruity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    valid: Option<ValidField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    markers_present: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s_im_id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ValidField {
    Bool(bool),
    Text(String),
}

pub fn load_pairs(path: impl AsRef<Path>, format: PairsFormat) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(&text, format, &path.display().to_string())
}

pub fn parse_pairs(text: &str, format: PairsFormat, origin: &str) -> Result<Corpus> {
    let mut records = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let record = match format {
            PairsFormat::Tsv => {
                if n == 0 && line.starts_with("pair_id\t") {
                    continue;
                }
                tsv_record(line, origin, lineno)?
            }
            PairsFormat::Jsonl => serde_json::from_str::<PairRecord>(line)
                .map_err(|e| Error::malformed(origin, lineno, e.to_string()))?,
        };
        records.push((lineno, record));
    }
    build_corpus(records, origin)
}

fn tsv_record(line: &str, origin: &str, lineno: usize) -> Result<PairRecord> {
    let fields: Vec<&str> = line.split('\t').collect();
    if !(4..=8).contains(&fields.len()) {
        return Err(Error::malformed(
            origin,
            lineno,
            format!("expected 4 to 8 tab-separated columns, found {}", fields.len()),
        ));
    }
    let get = |i: usize| fields.get(i).map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
    Ok(PairRecord {
        pair_id: fields[0].trim().to_string(),
        hearer_id: fields[1].trim().to_string(),
        s_im_text: fields[2].to_string(),
        h_int_text: fields[3].to_string(),
        gold_strategies: get(4).map(LabelField::Joined),
        incongruity: get(5),
        valid: get(6).map(ValidField::Text),
        markers_present: None,
        s_im_id: get(7),
    })
}

fn parse_valid(v: &ValidField) -> Option<bool> {
    match v {
        ValidField::Bool(b) => Some(*b),
        ValidField::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" | "valid" => Some(true),
            "false" | "0" | "no" | "invalid" => Some(false),
            _ => None,
        },
    }
}

fn build_corpus(records: Vec<(usize, PairRecord)>, origin: &str) -> Result<Corpus> {
    let mut seen_ids = HashSet::new();
    let mut message_ids: HashMap<String, String> = HashMap::new();
    let mut pairs = Vec::with_capacity(records.len());

    for (lineno, rec) in records {
        if rec.pair_id.is_empty() {
            return Err(Error::malformed(origin, lineno, "empty pair_id"));
        }
        if !seen_ids.insert(rec.pair_id.clone()) {
            return Err(Error::DuplicatePairId {
                origin: origin.to_string(),
                line: lineno,
                id: rec.pair_id,
            });
        }
        if rec.s_im_text.trim().is_empty() || rec.h_int_text.trim().is_empty() {
            return Err(Error::malformed(origin, lineno, "empty utterance text"));
        }

        let strategies: BTreeSet<StrategyLabel> = match &rec.gold_strategies {
            None => BTreeSet::new(),
            Some(LabelField::Joined(s)) => s
                .split('|')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<StrategyLabel>())
                .collect::<Result<_, _>>()
                .map_err(|e: UnknownLabel| Error::malformed(origin, lineno, e.to_string()))?,
            Some(LabelField::List(v)) => v
                .iter()
                .map(|x| x.trim().parse::<StrategyLabel>())
                .collect::<Result<_, _>>()
                .map_err(|e: UnknownLabel| Error::malformed(origin, lineno, e.to_string()))?,
        };
        let incongruity = match &rec.incongruity {
            None => Incongruity::Unknown,
            Some(s) => Incongruity::parse(s)
                .ok_or_else(|| Error::malformed(origin, lineno, format!("bad incongruity `{s}`")))?,
        };
        let valid = match &rec.valid {
            None => true,
            Some(v) => parse_valid(v).ok_or_else(|| Error::malformed(origin, lineno, "bad valid flag"))?,
        };
        let has_gold = rec.gold_strategies.is_some()
            || rec.incongruity.is_some()
            || rec.valid.is_some()
            || rec.markers_present.is_some();
        let gold = has_gold.then_some(GoldAnnotation {
            strategies,
            incongruity,
            markers_present: rec.markers_present,
            valid,
        });

        let s_key = rec.s_im_text.trim().to_string();
        let s_id = match rec.s_im_id {
            Some(id) => id,
            None => message_ids
                .entry(s_key)
                .or_insert_with(|| format!("{}.s", rec.pair_id))
                .clone(),
        };
        pairs.push(IronyPair {
            s_im: Utterance::new(s_id, rec.s_im_text, Role::SpeakerIronic),
            h_int: Utterance::new(format!("{}.h", rec.pair_id), rec.h_int_text, Role::HearerInterpretation),
            hearer_id: rec.hearer_id,
            gold,
            pair_id: rec.pair_id,
        });
    }
    Ok(Corpus::new(pairs))
}

/// Default s_im ids as assigned on load: first pair id carrying the text, plus `.s`.
fn derived_message_ids(corpus: &Corpus) -> Vec<String> {
    let mut first: HashMap<&str, String> = HashMap::new();
    corpus
        .pairs()
        .iter()
        .map(|p| {
            first
                .entry(p.s_im.text.trim())
                .or_insert_with(|| format!("{}.s", p.pair_id))
                .clone()
        })
        .collect()
}

fn to_record(pair: &IronyPair, include_s_id: bool) -> PairRecord {
    let gold = pair.gold.as_ref();
    PairRecord {
        pair_id: pair.pair_id.clone(),
        hearer_id: pair.hearer_id.clone(),
        s_im_text: pair.s_im.text.clone(),
        h_int_text: pair.h_int.text.clone(),
        gold_strategies: gold.map(|g| {
            LabelField::Joined(g.strategies.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("|"))
        }),
        incongruity: gold.map(|g| g.incongruity.as_str().to_string()),
        valid: gold.map(|g| ValidField::Bool(g.valid)),
        markers_present: gold.and_then(|g| g.markers_present),
        s_im_id: include_s_id.then(|| pair.s_im.id.clone()),
    }
}

pub fn write_pairs<W: Write>(corpus: &Corpus, format: PairsFormat, mut out: W) -> Result<()> {
    let derived = derived_message_ids(corpus);
    let include_s_id = corpus.pairs().iter().zip(&derived).any(|(p, d)| &p.s_im.id != d);
    let io = |e| Error::io("<output>", e);
    match format {
        PairsFormat::Tsv => {
            if include_s_id {
                writeln!(out, "{TSV_HEADER}\ts_im_id").map_err(io)?;
            } else {
                writeln!(out, "{TSV_HEADER}").map_err(io)?;
            }
            for pair in corpus.pairs() {
                let rec = to_record(pair, include_s_id);
                let labels = match rec.gold_strategies {
                    Some(LabelField::Joined(s)) => s,
                    _ => String::new(),
                };
                let valid = match rec.valid {
                    Some(ValidField::Bool(b)) => b.to_string(),
                    _ => String::new(),
                };
                write!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    rec.pair_id,
                    rec.hearer_id,
                    rec.s_im_text,
                    rec.h_int_text,
                    labels,
                    rec.incongruity.unwrap_or_default(),
                    valid
                )
                .map_err(io)?;
                if let Some(id) = rec.s_im_id {
                    write!(out, "\t{id}").map_err(io)?;
                }
                writeln!(out).map_err(io)?;
            }
        }
        PairsFormat::Jsonl => {
            for pair in corpus.pairs() {
                serde_json::to_writer(&mut out, &to_record(pair, include_s_id))?;
                writeln!(out).map_err(io)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tsv(rows: &[&str]) -> String {
        rows.join("\n")
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let c = parse_pairs("", PairsFormat::Tsv, "t").unwrap();
        assert!(c.is_empty());
        let c = parse_pairs("", PairsFormat::Jsonl, "t").unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn duplicate_pair_id_names_second_row() {
        let text = tsv(&["p1\th1\tso healthy\tnot healthy", "p1\th2\tso healthy\tunhealthy"]);
        match parse_pairs(&text, PairsFormat::Tsv, "f.tsv").unwrap_err() {
            Error::DuplicatePairId { line, id, .. } => {
                assert_eq!(line, 2);
                assert_eq!(id, "p1");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_row_carries_line_number() {
        let text = tsv(&[TSV_HEADER, "p1\th1\tonly three"]);
        match parse_pairs(&text, PairsFormat::Tsv, "f.tsv").unwrap_err() {
            Error::Malformed { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        let text = tsv(&["p1\th1\ta\tb\tNotALabel\t\t"]);
        assert!(matches!(
            parse_pairs(&text, PairsFormat::Tsv, "f").unwrap_err(),
            Error::Malformed { line: 1, .. }
        ));
    }

    #[test]
    fn absent_gold_fields() {
        let c = parse_pairs("p1\th1\tso healthy\tnot healthy", PairsFormat::Tsv, "t").unwrap();
        let p = &c.pairs()[0];
        assert!(p.gold.is_none());
        assert_eq!(p.incongruity(), Incongruity::Unknown);
        assert!(p.is_valid());
        assert_eq!(p.s_im.id, "p1.s");
        assert_eq!(p.h_int.id, "p1.h");
    }

    #[test]
    fn shared_message_gets_one_id() {
        let text = tsv(&[
            "p1\th1\tso healthy\tnot healthy\tSimpleNeg\texplicit\ttrue",
            "p2\th2\tso healthy\tunhealthy\tLexAnt|AnWeakSent\timplicit\tfalse",
        ]);
        let c = parse_pairs(&text, PairsFormat::Tsv, "t").unwrap();
        assert_eq!(c.pairs()[1].s_im.id, "p1.s");
        let g = c.pairs()[1].gold.as_ref().unwrap();
        assert_eq!(g.strategies.len(), 2);
        assert!(!g.valid);
        assert_eq!(g.incongruity, Incongruity::Implicit);
    }

    #[test]
    fn jsonl_accepts_lists_and_strings() {
        let text = r#"{"pair_id":"a","hearer_id":"h","s_im_text":"x","h_int_text":"y","gold_strategies":["LexAnt"],"incongruity":"explicit","valid":true}
{"pair_id":"b","hearer_id":"h","s_im_text":"x","h_int_text":"z","gold_strategies":"SimpleNeg|LexAnt","valid":"false","markers_present":true}"#;
        let c = parse_pairs(text, PairsFormat::Jsonl, "t").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.pairs()[1].gold.as_ref().unwrap().markers_present, Some(true));
        assert!(!c.pairs()[1].is_valid());
    }

    fn arb_corpus() -> impl Strategy<Value = Vec<(String, String, String, String, Option<(Vec<usize>, u8, bool)>)>> {
        let word = "[a-z]{1,6}";
        let text = prop::collection::vec(word, 1..5).prop_map(|w| w.join(" "));
        let gold = prop::option::of((prop::collection::vec(0usize..6, 0..3), 0u8..3, any::<bool>()));
        prop::collection::vec(("[a-z]{1,3}", text.clone(), text, gold), 0..8).prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (h, s, t, g))| (format!("p{i}"), h, s, t, g))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn serialize_load_round_trip(rows in arb_corpus(), jsonl in any::<bool>()) {
            let pairs: Vec<IronyPair> = rows
                .into_iter()
                .map(|(id, h, s, t, g)| IronyPair {
                    s_im: Utterance::new(format!("{id}.s"), s, Role::SpeakerIronic),
                    h_int: Utterance::new(format!("{id}.h"), t, Role::HearerInterpretation),
                    hearer_id: h,
                    gold: g.map(|(labels, inc, valid)| GoldAnnotation {
                        strategies: labels.into_iter().map(|i| StrategyLabel::ALL[i]).collect(),
                        incongruity: [Incongruity::Explicit, Incongruity::Implicit, Incongruity::Unknown][inc as usize],
                        markers_present: None,
                        valid,
                    }),
                    pair_id: id,
                })
                .collect();
            let corpus = Corpus::new(pairs);
            let format = if jsonl { PairsFormat::Jsonl } else { PairsFormat::Tsv };
            let mut buf = Vec::new();
            write_pairs(&corpus, format, &mut buf).unwrap();
            let back = parse_pairs(std::str::from_utf8(&buf).unwrap(), format, "rt").unwrap();
            prop_assert_eq!(back.pairs(), corpus.pairs());
        }
    }
}
