use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hmm::viterbi_hmm;
use super::io::{read_jump_model, read_translation_table, write_jump_model, write_translation_table};
use super::{
    extract_phrases, score_and_filter, symmetrize, train_hmm, train_model1, Alignment, Bitext, Heuristic,
    HmmJumpModel, OppositePhraseTable, PhraseTable, SentencePair, TranslationTable, DEFAULT_MAX_PHRASE_LEN,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignerConfig {
    pub model1_iterations: usize,
    /// Zero keeps the Model-1 alignments.
    pub hmm_iterations: usize,
    pub heuristic: Heuristic,
    pub max_phrase_len: usize,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        AlignerConfig {
            model1_iterations: 5,
            hmm_iterations: 5,
            heuristic: Heuristic::GrowDiagFinal,
            max_phrase_len: DEFAULT_MAX_PHRASE_LEN,
        }
    }
}

/// One translation direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalModel {
    pub table: TranslationTable,
    pub jump: Option<HmmJumpModel>,
}

impl DirectionalModel {
    pub fn viterbi(&self, pair: &SentencePair) -> Alignment {
        match &self.jump {
            Some(jump) => viterbi_hmm(&self.table, jump, pair),
            None => self.table.viterbi_model1(pair),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricAligner {
    /// Trained source → target.
    pub forward: DirectionalModel,
    /// Trained target → source.
    pub reverse: DirectionalModel,
    pub heuristic: Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub config: AlignerConfig,
    pub sentence_pairs: usize,
    pub forward_model1: Vec<f64>,
    pub forward_hmm: Vec<f64>,
    pub reverse_model1: Vec<f64>,
    pub reverse_hmm: Vec<f64>,
}

fn train_direction(bitext: &Bitext, config: &AlignerConfig) -> Result<(DirectionalModel, Vec<f64>, Vec<f64>)> {
    let m1 = train_model1(bitext, config.model1_iterations)?;
    if config.hmm_iterations == 0 {
        let model = DirectionalModel {
            table: m1.table,
            jump: None,
        };
        return Ok((model, m1.log_likelihood, Vec::new()));
    }
    let hmm = train_hmm(bitext, &m1.table, config.hmm_iterations)?;
    let model = DirectionalModel {
        table: hmm.table,
        jump: Some(hmm.jump),
    };
    Ok((model, m1.log_likelihood, hmm.log_likelihood))
}

/// Trains both directions and records the likelihood curves.
pub fn train_aligner(bitext: &Bitext, config: &AlignerConfig) -> Result<(SymmetricAligner, TrainingLog)> {
    let flipped = bitext.flipped();
    let (fwd, rev) = rayon::join(|| train_direction(bitext, config), || train_direction(&flipped, config));
    let (forward, forward_model1, forward_hmm) = fwd?;
    let (reverse, reverse_model1, reverse_hmm) = rev?;
    let log = TrainingLog {
        config: *config,
        sentence_pairs: bitext.len(),
        forward_model1,
        forward_hmm,
        reverse_model1,
        reverse_hmm,
    };
    let aligner = SymmetricAligner {
        forward,
        reverse,
        heuristic: config.heuristic,
    };
    Ok((aligner, log))
}

const FORWARD_T: &str = "forward.t.tsv";
const FORWARD_JUMP: &str = "forward.jump.tsv";
const REVERSE_T: &str = "reverse.t.tsv";
const REVERSE_JUMP: &str = "reverse.jump.tsv";
const TRAINING_LOG: &str = "training.json";

impl SymmetricAligner {
    /// Symmetrized links in (source, target) coordinates.
    pub fn align(&self, pair: &SentencePair) -> Alignment {
        let fwd = self.forward.viterbi(pair);
        let rev = self.reverse.viterbi(&pair.flipped()).transposed();
        symmetrize(&fwd, &rev, self.heuristic).expect("both directions cover the same pair")
    }

    pub fn save(&self, dir: impl AsRef<Path>, log: &TrainingLog) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_translation_table(&self.forward.table, dir.join(FORWARD_T))?;
        write_translation_table(&self.reverse.table, dir.join(REVERSE_T))?;
        for (model, name) in [(&self.forward, FORWARD_JUMP), (&self.reverse, REVERSE_JUMP)] {
            if let Some(jump) = &model.jump {
                write_jump_model(jump, dir.join(name))?;
            }
        }
        let path = dir.join(TRAINING_LOG);
        fs::write(&path, serde_json::to_string_pretty(log)?).map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<(Self, TrainingLog)> {
        let dir = dir.as_ref();
        let path = dir.join(TRAINING_LOG);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let log: TrainingLog = serde_json::from_str(&text)?;
        let load_dir = |t: &str, j: &str| -> Result<DirectionalModel> {
            let jump = if log.config.hmm_iterations > 0 {
                Some(read_jump_model(dir.join(j))?)
            } else {
                None
            };
            Ok(DirectionalModel {
                table: read_translation_table(dir.join(t))?,
                jump,
            })
        };
        let aligner = SymmetricAligner {
            forward: load_dir(FORWARD_T, FORWARD_JUMP)?,
            reverse: load_dir(REVERSE_T, REVERSE_JUMP)?,
            heuristic: log.config.heuristic,
        };
        Ok((aligner, log))
    }

    fn phrase_table(&self, bitext: &Bitext, max_len: usize) -> PhraseTable {
        let occurrences: Vec<(String, String)> = bitext
            .pairs()
            .par_iter()
            .flat_map_iter(|pair| {
                let a = self.align(pair);
                extract_phrases(pair, &a, max_len)
                    .into_iter()
                    .map(|p| (p.source, p.target))
            })
            .collect();
        PhraseTable::from_occurrences(occurrences.iter().map(|(e, f)| (e.as_str(), f.as_str())))
    }
}

/// Builds the message→interpretation phrase table with `aligner`, trains a
/// separate aligner on the interpretation/interpretation bitext, and filters.
pub fn mine_opposite_phrases(
    st_bitext: &Bitext,
    aligner: &SymmetricAligner,
    hh_bitext: &Bitext,
    config: &AlignerConfig,
) -> Result<OppositePhraseTable> {
    let st = aligner.phrase_table(st_bitext, config.max_phrase_len);
    let hh = if hh_bitext.is_empty() {
        PhraseTable::default()
    } else {
        let (hh_aligner, _) = train_aligner(hh_bitext, config)?;
        hh_aligner.phrase_table(hh_bitext, config.max_phrase_len)
    };
    let out = score_and_filter(&st, &hh);
    log::info!(
        "phrase mining: {} pairs, {} shared with paraphrases, {} below threshold, {} kept",
        out.report.input_pairs,
        out.report.removed_shared,
        out.report.removed_low_phi,
        out.report.retained
    );
    Ok(out)
}
