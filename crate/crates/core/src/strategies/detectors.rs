use std::collections::{BTreeSet, HashSet};

use super::view::{PairView, UtteranceView, ViewToken};
use super::{EvidenceMethod, Span, StrategyEvidence};
use crate::alignment::OppositePhraseTable;
use crate::corpus::StrategyLabel;
use crate::lexicons::LexiconBundle;
use crate::rq::{predict_rq, Embeddings, RqLabel, RqModel};

/// Which utterance of the pair a token belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Speaker,
    Hearer,
}

fn span(view: &UtteranceView, a: usize, b: usize) -> Span {
    let (start, end) = (a.min(b), a.max(b));
    Span {
        start,
        end,
        sentence: view.token(start).sentence,
    }
}

fn word_span(view: &UtteranceView, i: usize) -> Span {
    span(view, i, i)
}

fn antonym_match(lex: &LexiconBundle, a: &ViewToken, b: &ViewToken) -> bool {
    [&a.lemma, &a.form]
        .iter()
        .any(|x| [&b.lemma, &b.form].iter().any(|y| lex.antonyms.matches(x, a.upos, y, b.upos)))
}

fn lemma_set<'v>(tokens: &[&'v ViewToken]) -> HashSet<&'v str> {
    tokens
        .iter()
        .filter(|t| t.deprel.as_deref() != Some("punct"))
        .map(|t| t.lemma.as_str())
        .collect()
}

/// Both main roots, parents sharing a lemma, or children sharing a lemma.
fn dependency_related(view: &PairView, i: usize, j: usize) -> bool {
    if !view.s.is_parsed() || !view.h.is_parsed() {
        return false;
    }
    if view.s.is_main_root(i) && view.h.is_main_root(j) {
        return true;
    }
    if let (Some(p), Some(q)) = (view.s.parent(i), view.h.parent(j)) {
        if p.lemma == q.lemma {
            return true;
        }
    }
    let a = lemma_set(&view.s.children(i));
    let b = lemma_set(&view.h.children(j));
    !a.is_disjoint(&b)
}

/// Lexicon antonym pairs (a_S, a_H) where a_H does not already occur in S_im.
/// Aligned and dependency-licensed pairs are preferred; the plain lexicon
/// search runs only when neither licenses any pair. Each token takes part in
/// at most one pair.
pub fn detect_lexical_antonym(view: &PairView, lexicons: &LexiconBundle) -> Vec<StrategyEvidence> {
    let s_vocab = view.s.vocabulary();
    let mut licensed = Vec::new();
    let mut fallback = Vec::new();
    for a in &view.s.tokens {
        for b in &view.h.tokens {
            if s_vocab.contains(b.lemma.as_str()) || s_vocab.contains(b.form.as_str()) {
                continue;
            }
            if !antonym_match(lexicons, a, b) {
                continue;
            }
            if view.aligned(a.index, b.index) {
                licensed.push((EvidenceMethod::AlignedAntonym, a.index, b.index));
            } else if dependency_related(view, a.index, b.index) {
                licensed.push((EvidenceMethod::DependencyAntonym, a.index, b.index));
            } else {
                fallback.push((EvidenceMethod::FallbackAntonym, a.index, b.index));
            }
        }
    }
    let mut chosen = if licensed.is_empty() { fallback } else { licensed };
    chosen.sort();
    let mut used_s = HashSet::new();
    let mut used_h = HashSet::new();
    let mut out = Vec::new();
    for (method, i, j) in chosen {
        if used_s.contains(&i) || used_h.contains(&j) {
            continue;
        }
        used_s.insert(i);
        used_h.insert(j);
        let mut ev = StrategyEvidence::new(StrategyLabel::LexAnt, method);
        ev.s_span = Some(word_span(&view.s, i));
        ev.h_span = Some(word_span(&view.h, j));
        ev.s_focus = Some(i);
        ev.h_focus = Some(j);
        ev.triggers = vec![view.s.token(i).lemma.clone(), view.h.token(j).lemma.clone()];
        out.push(ev);
    }
    out
}

/// A negation marker whose parent lemma has no match on the other side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegatedTerm {
    pub side: Side,
    pub marker: usize,
    pub term: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NegationFindings {
    pub evidence: Vec<StrategyEvidence>,
    pub unanchored: Vec<NegatedTerm>,
    /// Sides skipped for lack of a parse.
    pub skipped: Vec<Side>,
}

fn negation_keys(view: &UtteranceView, lexicons: &LexiconBundle) -> BTreeSet<String> {
    view.tokens.iter().filter_map(|t| marker_key(t, lexicons)).collect()
}

fn marker_key(t: &ViewToken, lexicons: &LexiconBundle) -> Option<String> {
    lexicons.negation.key(&t.form).or_else(|| lexicons.negation.key(&t.lemma))
}

/// Negation on exactly one side whose dependency parent lemma also occurs in
/// the other utterance.
pub fn detect_simple_negation(view: &PairView, lexicons: &LexiconBundle) -> NegationFindings {
    let mut findings = NegationFindings::default();
    let s_keys = negation_keys(&view.s, lexicons);
    let h_keys = negation_keys(&view.h, lexicons);
    for (side, this, other, other_keys) in [
        (Side::Hearer, &view.h, &view.s, &s_keys),
        (Side::Speaker, &view.s, &view.h, &h_keys),
    ] {
        if !this.is_parsed() {
            if this.tokens.iter().any(|t| marker_key(t, lexicons).is_some()) {
                findings.skipped.push(side);
            }
            continue;
        }
        let mut seen_terms = HashSet::new();
        for t in &this.tokens {
            let Some(key) = marker_key(t, lexicons) else { continue };
            if other_keys.contains(&key) {
                continue;
            }
            let Some(parent) = this.parent(t.index) else { continue };
            if !seen_terms.insert(parent.index) {
                continue;
            }
            let anchor = other
                .tokens
                .iter()
                .find(|o| o.lemma == parent.lemma || o.form == parent.form);
            match anchor {
                Some(o) => {
                    let mut ev = StrategyEvidence::new(StrategyLabel::SimpleNeg, EvidenceMethod::NegationScope);
                    let marked = span(this, t.index, parent.index);
                    let matched = word_span(other, o.index);
                    let (s_span, h_span, s_focus, h_focus) = match side {
                        Side::Hearer => (matched, marked, o.index, parent.index),
                        Side::Speaker => (marked, matched, parent.index, o.index),
                    };
                    ev.s_span = Some(s_span);
                    ev.h_span = Some(h_span);
                    ev.s_focus = Some(s_focus);
                    ev.h_focus = Some(h_focus);
                    ev.triggers = vec![t.lemma.clone(), parent.lemma.clone()];
                    findings.evidence.push(ev);
                }
                None => findings.unanchored.push(NegatedTerm {
                    side,
                    marker: t.index,
                    term: parent.index,
                }),
            }
        }
    }
    findings
}

fn has_intensifier(view: &UtteranceView, index: usize, lexicons: &LexiconBundle) -> Option<usize> {
    view.children(index)
        .into_iter()
        .find(|c| c.upos.is_some_and(|pos| lexicons.intensifiers.contains(&c.lemma, pos)))
        .map(|c| c.index)
}

/// S tokens standing in the same structural slot as H token `j`: the main
/// root for a main root, otherwise tokens with the same relation under a
/// parent of the same lemma.
fn structural_counterparts(view: &PairView, j: usize) -> Vec<usize> {
    if view.h.is_main_root(j) {
        return view.s.main_root().into_iter().collect();
    }
    let (Some(hp), Some(rel)) = (view.h.parent(j), view.h.token(j).deprel.as_deref()) else {
        return Vec::new();
    };
    view.s
        .tokens
        .iter()
        .filter(|t| t.deprel.as_deref() == Some(rel) && view.s.parent(t.index).is_some_and(|p| p.lemma == hp.lemma))
        .map(|t| t.index)
        .collect()
}

/// Weakening of sentiment. Pushes new evidence into `evidence` and marks the
/// antonym/negation items it builds on as consumed.
pub fn detect_weaken_sentiment(
    view: &PairView,
    lexicons: &LexiconBundle,
    evidence: &mut Vec<StrategyEvidence>,
    unanchored: &[NegatedTerm],
    margin: f64,
) {
    if !view.s.is_parsed() || !view.h.is_parsed() {
        return;
    }
    // Neutralization: H negates a word that replaces a stronger S word.
    for neg in unanchored.iter().filter(|n| n.side == Side::Hearer) {
        let j = neg.term;
        let h_tok = view.h.token(j);
        let Some(h_strength) = lexicons.sentiment_strength(&h_tok.lemma) else { continue };
        let mut candidates = view.s_links(j);
        candidates.extend(structural_counterparts(view, j));
        let hit = candidates.into_iter().find(|&i| {
            let s_tok = view.s.token(i);
            s_tok.lemma != h_tok.lemma
                && lexicons
                    .sentiment_strength(&s_tok.lemma)
                    .is_some_and(|s| s > h_strength && s - h_strength >= margin)
        });
        if let Some(i) = hit {
            let mut base = StrategyEvidence::new(StrategyLabel::SimpleNeg, EvidenceMethod::NegationScope);
            base.s_span = Some(word_span(&view.s, i));
            base.h_span = Some(span(&view.h, neg.marker, j));
            base.s_focus = Some(i);
            base.h_focus = Some(j);
            base.triggers = vec![view.h.token(neg.marker).lemma.clone(), h_tok.lemma.clone()];
            let mut weak = StrategyEvidence::new(StrategyLabel::AnWeakSent, EvidenceMethod::WeakenNeutralize);
            weak.s_span = base.s_span;
            weak.h_span = base.h_span;
            weak.s_focus = Some(i);
            weak.h_focus = Some(j);
            weak.triggers = vec![view.s.token(i).lemma.clone(), h_tok.lemma.clone()];
            let at = evidence.len();
            base.consume(at + 1);
            evidence.push(base);
            evidence.push(weak);
        }
    }
    // Dropped intensifier, over antonym and H-side negation evidence.
    for k in 0..evidence.len() {
        let ev = &evidence[k];
        if ev.consumed || !matches!(ev.label, StrategyLabel::LexAnt | StrategyLabel::SimpleNeg) {
            continue;
        }
        let (Some(i0), Some(j)) = (ev.s_focus, ev.h_focus) else { continue };
        let counterparts: Vec<usize> = match ev.label {
            StrategyLabel::LexAnt => vec![i0],
            _ => {
                // Only negation introduced by the hearer.
                let h_neg = view.h.children(j).iter().any(|c| marker_key(c, lexicons).is_some());
                if !h_neg {
                    continue;
                }
                let lemma = &view.h.token(j).lemma;
                let mut c = view.s_links(j);
                c.extend(view.s.tokens.iter().filter(|t| &t.lemma == lemma).map(|t| t.index));
                c
            }
        };
        if has_intensifier(&view.h, j, lexicons).is_some() {
            continue;
        }
        let hit = counterparts
            .into_iter()
            .find_map(|i| has_intensifier(&view.s, i, lexicons).map(|m| (i, m)));
        if let Some((i, m)) = hit {
            let mut weak = StrategyEvidence::new(StrategyLabel::AnWeakSent, EvidenceMethod::WeakenDropIntensifier);
            weak.s_span = Some(span(&view.s, m, i));
            weak.h_span = ev.h_span;
            weak.s_focus = Some(i);
            weak.h_focus = Some(j);
            weak.triggers = vec![view.s.token(m).lemma.clone(), view.s.token(i).lemma.clone()];
            let at = evidence.len();
            evidence[k].consume(at);
            evidence.push(weak);
        }
    }
}

/// The rhetorical-question classifier and the lookups it needs.
#[derive(Debug, Clone, Copy)]
pub struct RqGate<'a> {
    pub model: &'a RqModel,
    pub lexicons: &'a LexiconBundle,
    pub embeddings: Option<&'a Embeddings>,
}

/// S_im is a rhetorical question, H_int is declarative, and antonym or
/// negation evidence exists; that evidence is folded into the new item.
pub fn detect_interrog_to_decl(view: &PairView, gate: RqGate, evidence: &mut Vec<StrategyEvidence>) {
    if !view.s.has_question_mark() || view.h.has_question_mark() {
        return;
    }
    let questions = view.s.question_sentences();
    let base: Vec<usize> = evidence
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            !e.consumed
                && matches!(e.label, StrategyLabel::LexAnt | StrategyLabel::SimpleNeg)
                && e.s_span.is_none_or(|s| questions.contains(&s.sentence))
        })
        .map(|(k, _)| k)
        .collect();
    if base.is_empty() {
        return;
    }
    let rhetorical = predict_rq(gate.model, view.s_text, &gate.lexicons.negation, gate.embeddings)
        .is_ok_and(|p| p.label == RqLabel::Rq);
    if !rhetorical {
        return;
    }
    let q = view.s.tokens.iter().find(|t| t.form.contains('?')).map(|t| t.index);
    let mut ev = StrategyEvidence::new(StrategyLabel::AnInterrogToDecl, EvidenceMethod::RqTransform);
    ev.s_span = q.map(|q| word_span(&view.s, q));
    ev.h_span = evidence[base[0]].h_span;
    ev.triggers = base.iter().flat_map(|&k| evidence[k].triggers.clone()).collect();
    let at = evidence.len();
    for k in base {
        evidence[k].consume(at);
    }
    evidence.push(ev);
}

/// `I` followed by up to `max_gap` word tokens and then `wish`, matched on
/// H_int tokens case-insensitively.
pub fn detect_desiderative(h: &UtteranceView, max_gap: usize) -> Vec<StrategyEvidence> {
    let mut out = Vec::new();
    let toks = &h.tokens;
    for (k, t) in toks.iter().enumerate() {
        if t.form != "i" {
            continue;
        }
        for gap in 0..=max_gap {
            let Some(w) = toks.get(k + 1 + gap) else { break };
            let between = &toks[k + 1..k + 1 + gap];
            if between.iter().any(|b| b.form.chars().all(|c| !c.is_alphanumeric()) || b.sentence != t.sentence) {
                break;
            }
            if w.form == "wish" && w.sentence == t.sentence {
                let mut ev = StrategyEvidence::new(StrategyLabel::AnDesiderative, EvidenceMethod::DesiderativePattern);
                ev.h_span = Some(span(h, t.index, w.index));
                ev.h_focus = Some(w.index);
                ev.triggers = toks[k..=k + 1 + gap].iter().map(|x| x.form.clone()).collect();
                out.push(ev);
                break;
            }
        }
    }
    out
}

/// Last resort: an opposite phrase pair found in S_im and H_int. Runs only
/// when nothing else left unconsumed evidence.
pub fn detect_phrasal_pragmatic(
    view: &PairView,
    table: &OppositePhraseTable,
    evidence: &[StrategyEvidence],
) -> Vec<StrategyEvidence> {
    if evidence.iter().any(|e| !e.consumed) || view.s.is_empty() || view.h.is_empty() {
        return Vec::new();
    }
    table
        .find(&view.s.forms(), &view.h.forms())
        .into_iter()
        .map(|m| {
            let mut ev = StrategyEvidence::new(StrategyLabel::AntPhrasePragInf, EvidenceMethod::OppositePhrase);
            ev.s_span = Some(span(&view.s, m.source_span.0, m.source_span.1));
            ev.h_span = Some(span(&view.h, m.target_span.0, m.target_span.1));
            ev.triggers = vec![m.source, m.target];
            ev
        })
        .collect()
}
