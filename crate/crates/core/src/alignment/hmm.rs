use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model1::{m_step, merge_counts, Encoded, TranslationTable, CHUNK};
use super::{Alignment, Bitext, SentencePair};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_JUMP: usize = 5;
pub const DEFAULT_P_NULL: f64 = 0.2;

/// Emission floor used only while decoding, so that one unseen word does not
/// zero out the whole lattice.
const DECODE_FLOOR: f64 = 1e-12;

/// Jump-width distribution over [-max_jump, max_jump] plus the probability of
/// moving to the empty word. Wider jumps are clamped to the boundary class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmJumpModel {
    pub max_jump: usize,
    probs: Vec<f64>,
    pub p_null: f64,
}

impl HmmJumpModel {
    pub fn uniform(max_jump: usize, p_null: f64) -> Self {
        let n = 2 * max_jump + 1;
        HmmJumpModel {
            max_jump,
            probs: vec![1.0 / n as f64; n],
            p_null,
        }
    }

    /// `probs[k]` is p(jump = k − max_jump). The distribution is renormalized.
    pub fn from_parts(max_jump: usize, probs: Vec<f64>, p_null: f64) -> Result<Self> {
        if probs.len() != 2 * max_jump + 1 {
            return Err(Error::Config(format!(
                "jump model with max_jump {max_jump} needs {} classes, found {}",
                2 * max_jump + 1,
                probs.len()
            )));
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) || probs.iter().any(|p| *p < 0.0) || !(0.0..=1.0).contains(&p_null) {
            return Err(Error::Config("jump probabilities must be non-negative and not all zero".into()));
        }
        Ok(HmmJumpModel {
            max_jump,
            probs: probs.into_iter().map(|p| p / total).collect(),
            p_null,
        })
    }

    pub fn class(&self, jump: i64) -> usize {
        let m = self.max_jump as i64;
        (jump.clamp(-m, m) + m) as usize
    }

    /// p(jump) after clamping.
    pub fn prob(&self, jump: i64) -> f64 {
        self.probs[self.class(jump)]
    }

    /// `(jump, probability)` for every class.
    pub fn distribution(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m = self.max_jump as i64;
        self.probs.iter().enumerate().map(move |(k, &p)| (k as i64 - m, p))
    }

    fn trans_real(&self, from: usize, to: usize) -> f64 {
        (1.0 - self.p_null) * self.prob(to as i64 - from as i64)
    }
}

impl Default for HmmJumpModel {
    fn default() -> Self {
        HmmJumpModel::uniform(DEFAULT_MAX_JUMP, DEFAULT_P_NULL)
    }
}

/// Expected counts for one sentence pair.
#[derive(Debug, Clone, Default)]
pub(crate) struct SentenceStats {
    pub(crate) ll: f64,
    pub(crate) jumps: Vec<f64>,
    pub(crate) null_transitions: f64,
    pub(crate) transitions: f64,
    pub(crate) lexical: Vec<((u32, u32), f64)>,
}

/// Forward–backward over states "real word i" (i = 1..=I) and "NULL after
/// last real position p" (p = 0..=I). Position 0 is the sentence start.
/// `src[0]` is NULL. Returns `None` when the pair has zero likelihood.
pub(crate) fn forward_backward(
    table: &TranslationTable,
    jump: &HmmJumpModel,
    src: &[u32],
    tgt: &[u32],
) -> Option<SentenceStats> {
    let n = src.len() - 1;
    let len = tgt.len();
    let em: Vec<Vec<f64>> = tgt
        .iter()
        .map(|&f| (0..=n).map(|i| table.p(f, src[i])).collect())
        .collect();
    let p0 = jump.p_null;

    // Scaled forward variables; index 0 of `real` is unused.
    let mut real = vec![vec![0.0; n + 1]; len];
    let mut null = vec![vec![0.0; n + 1]; len];
    let mut scale = vec![0.0; len];
    let mut memory = vec![0.0; n + 1];
    memory[0] = 1.0;
    let mut memories = Vec::with_capacity(len);
    for j in 0..len {
        memories.push(memory.clone());
        let mut c = 0.0;
        for i in 1..=n {
            let into: f64 = (0..=n).map(|p| memory[p] * jump.trans_real(p, i)).sum();
            real[j][i] = em[j][i] * into;
            c += real[j][i];
        }
        for p in 0..=n {
            null[j][p] = em[j][0] * p0 * memory[p];
            c += null[j][p];
        }
        if !(c > 0.0) {
            return None;
        }
        scale[j] = c;
        for p in 0..=n {
            real[j][p] /= c;
            null[j][p] /= c;
            memory[p] = real[j][p] + null[j][p];
        }
    }

    // Scaled backward variables depend only on the remembered position.
    let mut beta = vec![vec![1.0; n + 1]; len];
    for j in (0..len.saturating_sub(1)).rev() {
        for p in 0..=n {
            let to_real: f64 = (1..=n)
                .map(|i| jump.trans_real(p, i) * em[j + 1][i] * beta[j + 1][i])
                .sum();
            let to_null = p0 * em[j + 1][0] * beta[j + 1][p];
            beta[j][p] = (to_real + to_null) / scale[j + 1];
        }
    }

    let mut stats = SentenceStats {
        ll: scale.iter().map(|c| c.ln()).sum(),
        jumps: vec![0.0; jump.probs.len()],
        ..Default::default()
    };
    for j in 0..len {
        let f = tgt[j];
        let prev = &memories[j];
        for i in 1..=n {
            let gamma = real[j][i] * beta[j][i];
            if gamma > 0.0 {
                stats.lexical.push(((src[i], f), gamma));
            }
            for (p, &m) in prev.iter().enumerate() {
                if m > 0.0 {
                    let xi = m * jump.trans_real(p, i) * em[j][i] * beta[j][i] / scale[j];
                    stats.jumps[jump.class(i as i64 - p as i64)] += xi;
                }
            }
        }
        let null_mass: f64 = (0..=n).map(|p| null[j][p] * beta[j][p]).sum();
        if null_mass > 0.0 {
            stats.lexical.push(((src[0], f), null_mass));
        }
        stats.null_transitions += null_mass;
        stats.transitions += 1.0;
    }
    Some(stats)
}

#[derive(Debug, Clone)]
pub struct HmmTraining {
    pub table: TranslationTable,
    pub jump: HmmJumpModel,
    /// Corpus log-likelihood before the first iteration and after each one.
    pub log_likelihood: Vec<f64>,
}

/// Forward–backward EM refinement of `init`. The jump model starts uniform
/// with the default NULL probability.
pub fn train_hmm(bitext: &Bitext, init: &TranslationTable, iterations: usize) -> Result<HmmTraining> {
    train_hmm_with(bitext, init, HmmJumpModel::default(), iterations)
}

pub fn train_hmm_with(
    bitext: &Bitext,
    init: &TranslationTable,
    jump: HmmJumpModel,
    iterations: usize,
) -> Result<HmmTraining> {
    if bitext.is_empty() {
        return Err(Error::EmptyBitext);
    }
    if iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    if init.normalization_error() > 1e-6 {
        return Err(Error::Config("initial translation table is not normalized".into()));
    }
    let mut table = init.clone();
    let mut jump = jump;
    let enc = table.encode(bitext)?;
    let mut history = Vec::with_capacity(iterations + 1);
    for _ in 0..iterations {
        let (ll, agg) = e_step(&table, &jump, &enc);
        history.push(ll);
        m_step(&mut table, agg.lexical);
        let total: f64 = agg.jumps.iter().sum();
        if total > 0.0 {
            jump.probs = agg.jumps.iter().map(|c| c / total).collect();
        }
        if agg.transitions > 0.0 {
            jump.p_null = agg.null_transitions / agg.transitions;
        }
        log::debug!("hmm iteration: log-likelihood {ll:.6}, p_null {:.4}", jump.p_null);
    }
    history.push(e_step(&table, &jump, &enc).0);
    Ok(HmmTraining {
        table,
        jump,
        log_likelihood: history,
    })
}

struct Aggregate {
    lexical: Vec<BTreeMap<u32, f64>>,
    jumps: Vec<f64>,
    null_transitions: f64,
    transitions: f64,
}

fn e_step(table: &TranslationTable, jump: &HmmJumpModel, enc: &Encoded) -> (f64, Aggregate) {
    let parts: Vec<(f64, HashMap<(u32, u32), f64>, Vec<f64>, f64, f64)> = enc
        .pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut ll = 0.0;
            let mut lex: HashMap<(u32, u32), f64> = HashMap::new();
            let mut jumps = vec![0.0; jump.probs.len()];
            let (mut nt, mut tr) = (0.0, 0.0);
            for (s, t) in chunk {
                match forward_backward(table, jump, s, t) {
                    Some(st) => {
                        ll += st.ll;
                        for (k, c) in st.lexical {
                            *lex.entry(k).or_insert(0.0) += c;
                        }
                        jumps.iter_mut().zip(&st.jumps).for_each(|(a, b)| *a += b);
                        nt += st.null_transitions;
                        tr += st.transitions;
                    }
                    None => ll = f64::NEG_INFINITY,
                }
            }
            (ll, lex, jumps, nt, tr)
        })
        .collect();
    let mut ll = 0.0;
    let mut jumps = vec![0.0; jump.probs.len()];
    let (mut nt, mut tr) = (0.0, 0.0);
    let mut lex_parts = Vec::with_capacity(parts.len());
    for (l, lex, j, n, t) in parts {
        ll += l;
        jumps.iter_mut().zip(&j).for_each(|(a, b)| *a += b);
        nt += n;
        tr += t;
        lex_parts.push(lex);
    }
    let lexical = merge_counts(lex_parts, table.src.len());
    (
        ll,
        Aggregate {
            lexical,
            jumps,
            null_transitions: nt,
            transitions: tr,
        },
    )
}

/// Most probable state sequence; links to NULL and links whose lexical
/// probability is zero are omitted.
pub(crate) fn viterbi_hmm(table: &TranslationTable, jump: &HmmJumpModel, pair: &SentencePair) -> Alignment {
    let (src, tgt) = table.lookup(pair);
    let n = src.len();
    let len = tgt.len();
    let empty = Alignment::empty(pair.source.len(), pair.target.len());
    if n == 0 || len == 0 {
        return empty;
    }
    let emit = |f: Option<u32>, e: Option<u32>| table.p_opt(f, e).max(DECODE_FLOOR).ln();
    let ln_null = jump.p_null.ln();
    // State k < n is real word k+1; state n + p is NULL remembering p.
    let states = 2 * n + 1;
    let memory_of = |k: usize| if k < n { k + 1 } else { k - n };
    let mut delta = vec![f64::NEG_INFINITY; states];
    let mut back = vec![vec![usize::MAX; states]; len];

    for j in 0..len {
        let f = tgt[j];
        let mut next = vec![f64::NEG_INFINITY; states];
        for i in 1..=n {
            let e = emit(f, src[i - 1]);
            let (best, arg) = if j == 0 {
                (jump.trans_real(0, i).ln(), usize::MAX)
            } else {
                (0..states)
                    .map(|k| (delta[k] + jump.trans_real(memory_of(k), i).ln(), k))
                    .fold((f64::NEG_INFINITY, usize::MAX), |a, b| if b.0 > a.0 { b } else { a })
            };
            next[i - 1] = best + e;
            back[j][i - 1] = arg;
        }
        let e0 = emit(f, Some(TranslationTable::null_id()));
        for p in 0..=n {
            let (best, arg) = if j == 0 {
                (if p == 0 { 0.0 } else { f64::NEG_INFINITY }, usize::MAX)
            } else {
                let mut cands = vec![(delta[n + p], n + p)];
                if p >= 1 {
                    cands.push((delta[p - 1], p - 1));
                }
                cands
                    .into_iter()
                    .fold((f64::NEG_INFINITY, usize::MAX), |a, b| if b.0 > a.0 { b } else { a })
            };
            next[n + p] = best + ln_null + e0;
            back[j][n + p] = arg;
        }
        delta = next;
    }

    let (best, mut k) = delta
        .iter()
        .enumerate()
        .map(|(k, &d)| (d, k))
        .fold((f64::NEG_INFINITY, usize::MAX), |a, b| if b.0 > a.0 { b } else { a });
    if !best.is_finite() {
        return empty;
    }
    let mut links = Vec::new();
    for j in (0..len).rev() {
        if k < n && table.p_opt(tgt[j], src[k]) > 0.0 {
            links.push((k + 1, j + 1));
        }
        k = back[j][k];
        if k == usize::MAX {
            break;
        }
    }
    Alignment::new(pair.source.len(), pair.target.len(), links).expect("links within bounds")
}
