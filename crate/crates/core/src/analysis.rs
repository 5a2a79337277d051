//! Aggregate tables over strategy sets, agreement statistics and evaluation
//! against gold labels. Every report serializes to JSON and prints as an
//! aligned text table.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Incongruity, IronyPair, StrategyLabel};
use crate::error::{Error, Result};
use crate::markers::MarkerSet;
use crate::strategies::StrategySet;

/// Rounds to one decimal, halves away from zero.
pub fn round1(x: f64) -> f64 {
    let scaled = x * 10.0;
    // Absorb representation error such as 0.15 * 10 = 1.4999999999999998.
    let nudged = scaled + scaled.signum() * 1e-9;
    nudged.round() / 10.0
}

fn fmt_percent(p: Option<f64>) -> String {
    p.map_or_else(|| "-".to_string(), |v| format!("{:.1}", round1(v)))
}

fn percent(part: usize, whole: usize) -> Option<f64> {
    (whole > 0).then(|| 100.0 * part as f64 / whole as f64)
}

/// What a distribution's percentages are relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Denominator {
    /// Every label of every pair counts once.
    #[default]
    Instances,
    /// Share of pairs carrying the label; columns may exceed 100.
    Pairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub label: StrategyLabel,
    pub count: usize,
    /// Absent when the denominator is zero.
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub dataset: String,
    pub denominator: Denominator,
    pub pairs: usize,
    pub instances: usize,
    pub rows: Vec<DistributionRow>,
}

impl DistributionTable {
    pub fn row(&self, label: StrategyLabel) -> &DistributionRow {
        self.rows.iter().find(|r| r.label == label).expect("every label has a row")
    }

    /// Labels by descending count, ties in precedence order.
    pub fn ranking(&self) -> Vec<StrategyLabel> {
        let mut rows: Vec<&DistributionRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.label.cmp(&b.label)));
        rows.into_iter().map(|r| r.label).collect()
    }
}

fn count_labels<'a>(sets: impl IntoIterator<Item = &'a StrategySet>) -> (BTreeMap<StrategyLabel, usize>, usize) {
    let mut counts: BTreeMap<StrategyLabel, usize> = StrategyLabel::ALL.iter().map(|l| (*l, 0)).collect();
    let mut pairs = 0;
    for s in sets {
        pairs += 1;
        for l in &s.labels {
            *counts.entry(*l).or_default() += 1;
        }
    }
    (counts, pairs)
}

pub fn strategy_distribution(sets: &[StrategySet], dataset: &str) -> DistributionTable {
    strategy_distribution_with(sets, dataset, Denominator::Instances)
}

pub fn strategy_distribution_with(sets: &[StrategySet], dataset: &str, denominator: Denominator) -> DistributionTable {
    distribution_of(sets.iter(), dataset, denominator)
}

fn distribution_of<'a>(
    sets: impl IntoIterator<Item = &'a StrategySet>,
    dataset: &str,
    denominator: Denominator,
) -> DistributionTable {
    let (counts, pairs) = count_labels(sets);
    let instances: usize = counts.values().sum();
    let whole = match denominator {
        Denominator::Instances => instances,
        Denominator::Pairs => pairs,
    };
    DistributionTable {
        dataset: dataset.to_string(),
        denominator,
        pairs,
        instances,
        rows: counts
            .into_iter()
            .map(|(label, count)| DistributionRow {
                label,
                count,
                percent: percent(count, whole),
            })
            .collect(),
    }
}

impl fmt::Display for DistributionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Distribution ({}; {} pairs, {} instances)",
            self.dataset, self.pairs, self.instances
        )?;
        writeln!(f, "{:<20} {:>8} {:>7}", "Strategy", "Count", "%")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<20} {:>8} {:>7}",
                r.label.table_name(),
                r.count,
                fmt_percent(r.percent)
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTabColumn {
    pub condition: String,
    pub pairs: usize,
    pub instances: usize,
    pub shares: BTreeMap<StrategyLabel, f64>,
}

/// Strategy shares per condition. A condition without strategy instances
/// has no column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTab {
    pub title: String,
    pub columns: Vec<CrossTabColumn>,
    /// Pairs whose condition could not be determined.
    pub unassigned_pairs: usize,
}

impl CrossTab {
    pub fn column(&self, condition: &str) -> Option<&CrossTabColumn> {
        self.columns.iter().find(|c| c.condition == condition)
    }

    pub fn share(&self, condition: &str, label: StrategyLabel) -> Option<f64> {
        self.column(condition).and_then(|c| c.shares.get(&label).copied())
    }
}

fn crosstab<'a>(
    title: &str,
    conditions: &[&str],
    assigned: impl IntoIterator<Item = (Option<usize>, &'a StrategySet)>,
) -> CrossTab {
    let mut groups: Vec<Vec<&StrategySet>> = vec![Vec::new(); conditions.len()];
    let mut unassigned = 0;
    for (cond, set) in assigned {
        match cond {
            Some(k) => groups[k].push(set),
            None => unassigned += 1,
        }
    }
    let columns = conditions
        .iter()
        .zip(groups)
        .filter_map(|(name, sets)| {
            let (counts, pairs) = count_labels(sets);
            let instances: usize = counts.values().sum();
            (instances > 0).then(|| CrossTabColumn {
                condition: name.to_string(),
                pairs,
                instances,
                shares: counts
                    .into_iter()
                    .map(|(l, c)| (l, 100.0 * c as f64 / instances as f64))
                    .collect(),
            })
        })
        .collect();
    CrossTab {
        title: title.to_string(),
        columns,
        unassigned_pairs: unassigned,
    }
}

fn pair_index(corpus: &Corpus) -> HashMap<&str, &IronyPair> {
    corpus.pairs().iter().map(|p| (p.pair_id.as_str(), p)).collect()
}

/// Sets of valid pairs joined with their corpus entry.
fn joined<'a>(sets: &'a [StrategySet], corpus: &'a Corpus) -> Vec<(&'a IronyPair, &'a StrategySet)> {
    let index = pair_index(corpus);
    sets.iter()
        .filter_map(|s| index.get(s.pair_id.as_str()).map(|p| (*p, s)))
        .filter(|(p, _)| p.is_valid())
        .collect()
}

pub const EXPLICIT: &str = "explicit";
pub const IMPLICIT: &str = "implicit";
pub const MARKER_PRESENT: &str = "marker+";
pub const MARKER_ABSENT: &str = "marker-";

/// Strategy shares under explicit and implicit incongruity (gold).
pub fn incongruity_crosstab(sets: &[StrategySet], corpus: &Corpus) -> CrossTab {
    let assigned = joined(sets, corpus).into_iter().map(|(p, s)| {
        let k = match p.incongruity() {
            Incongruity::Explicit => Some(0),
            Incongruity::Implicit => Some(1),
            Incongruity::Unknown => None,
        };
        (k, s)
    });
    crosstab("incongruity", &[EXPLICIT, IMPLICIT], assigned)
}

/// Strategy shares by whether the ironic message carries a marker. Detected
/// markers take priority; the gold flag is used for messages without a
/// marker set.
pub fn marker_crosstab(sets: &[StrategySet], corpus: &Corpus, markers: &BTreeMap<String, MarkerSet>) -> CrossTab {
    let assigned = joined(sets, corpus).into_iter().map(|(p, s)| {
        let present = markers
            .get(&p.s_im.id)
            .map(MarkerSet::any_marker)
            .or_else(|| p.gold.as_ref().and_then(|g| g.markers_present));
        (present.map(|m| if m { 0 } else { 1 }), s)
    });
    crosstab("markers", &[MARKER_PRESENT, MARKER_ABSENT], assigned)
}

impl fmt::Display for CrossTab {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Crosstab by {}", self.title)?;
        write!(f, "{:<20}", "Strategy")?;
        for c in &self.columns {
            write!(f, " {:>10}", c.condition)?;
        }
        writeln!(f)?;
        for l in StrategyLabel::ALL {
            write!(f, "{:<20}", l.table_name())?;
            for c in &self.columns {
                write!(f, " {:>10}", fmt_percent(c.shares.get(&l).copied()))?;
            }
            writeln!(f)?;
        }
        write!(f, "{:<20}", "pairs")?;
        for c in &self.columns {
            write!(f, " {:>10}", c.pairs)?;
        }
        writeln!(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HearerDistribution {
    pub hearer_id: String,
    pub table: DistributionTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerHearerReport {
    pub min_shared: usize,
    /// Largest group of hearers that pairwise share `min_shared` messages.
    pub hearers: Vec<String>,
    /// Messages interpreted by every hearer in the group.
    pub shared_messages: usize,
    pub distributions: Vec<HearerDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Maximum clique by Bron-Kerbosch with pivoting. Ties are broken by the
/// lexicographically smallest member list.
fn max_clique(adj: &[BTreeSet<usize>]) -> Vec<usize> {
    fn expand(adj: &[BTreeSet<usize>], r: &mut Vec<usize>, p: BTreeSet<usize>, mut x: BTreeSet<usize>, best: &mut Vec<usize>) {
        if p.is_empty() && x.is_empty() {
            let mut cand = r.clone();
            cand.sort_unstable();
            if cand.len() > best.len() || (cand.len() == best.len() && cand < *best) {
                *best = cand;
            }
            return;
        }
        if r.len() + p.len() < best.len() {
            return;
        }
        let pivot = p
            .union(&x)
            .max_by_key(|u| adj[**u].intersection(&p).count())
            .copied()
            .expect("p or x is non-empty");
        let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
        let mut p = p;
        for v in candidates {
            r.push(v);
            let np = p.intersection(&adj[v]).copied().collect();
            let nx = x.intersection(&adj[v]).copied().collect();
            expand(adj, r, np, nx, best);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut best = Vec::new();
    expand(adj, &mut Vec::new(), (0..adj.len()).collect(), BTreeSet::new(), &mut best);
    best
}

/// Per-hearer distributions over the messages shared by the largest group
/// of hearers whose message sets pairwise overlap in at least `min_shared`
/// messages.
pub fn per_hearer_distribution(sets: &[StrategySet], corpus: &Corpus, min_shared: usize) -> PerHearerReport {
    let rows = joined(sets, corpus);
    let mut by_hearer: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (p, _) in &rows {
        by_hearer.entry(p.hearer_id.as_str()).or_default().insert(p.s_im.id.as_str());
    }
    let names: Vec<&str> = by_hearer.keys().copied().collect();
    let messages: Vec<&BTreeSet<&str>> = by_hearer.values().collect();
    let mut adj = vec![BTreeSet::new(); names.len()];
    for a in 0..names.len() {
        for b in a + 1..names.len() {
            if messages[a].intersection(messages[b]).count() >= min_shared {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let clique = if names.len() >= 2 { max_clique(&adj) } else { Vec::new() };
    if clique.len() < 2 {
        return PerHearerReport {
            min_shared,
            hearers: Vec::new(),
            shared_messages: 0,
            distributions: Vec::new(),
            note: Some(format!(
                "fewer than 2 hearers share at least {min_shared} messages pairwise ({} hearers seen)",
                names.len()
            )),
        };
    }
    let mut shared: BTreeSet<&str> = messages[clique[0]].clone();
    for &k in &clique[1..] {
        shared = shared.intersection(messages[k]).copied().collect();
    }
    let distributions = clique
        .iter()
        .map(|&k| {
            let hearer = names[k];
            let subset = rows
                .iter()
                .filter(|(p, _)| p.hearer_id == hearer && shared.contains(p.s_im.id.as_str()))
                .map(|(_, s)| *s);
            HearerDistribution {
                hearer_id: hearer.to_string(),
                table: distribution_of(subset, hearer, Denominator::Instances),
            }
        })
        .collect();
    PerHearerReport {
        min_shared,
        hearers: clique.iter().map(|&k| names[k].to_string()).collect(),
        shared_messages: shared.len(),
        distributions,
        note: None,
    }
}

impl fmt::Display for PerHearerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Per-hearer distribution (min shared {})", self.min_shared)?;
        if let Some(note) = &self.note {
            return writeln!(f, "{note}");
        }
        writeln!(f, "{} shared messages", self.shared_messages)?;
        write!(f, "{:<20}", "Strategy")?;
        for d in &self.distributions {
            write!(f, " {:>10}", d.hearer_id)?;
        }
        writeln!(f)?;
        for l in StrategyLabel::ALL {
            write!(f, "{:<20}", l.table_name())?;
            for d in &self.distributions {
                write!(f, " {:>10}", fmt_percent(d.table.row(l).percent))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Group-size patterns for five interpretations, largest groups first.
pub const AGREEMENT_PATTERNS: [&[usize]; 7] = [
    &[5],
    &[4, 1],
    &[3, 2],
    &[3, 1, 1],
    &[2, 2, 1],
    &[2, 1, 1, 1],
    &[1, 1, 1, 1, 1],
];

pub const INTERPRETATIONS_PER_MESSAGE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternShare {
    /// Group sizes joined by `+`, e.g. `4+1`.
    pub pattern: String,
    pub messages: usize,
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementHistogram {
    pub qualifying_messages: usize,
    /// Messages with a number of interpretations other than five.
    pub excluded_messages: usize,
    pub patterns: Vec<PatternShare>,
}

impl AgreementHistogram {
    pub fn share(&self, pattern: &[usize]) -> Option<f64> {
        let key = pattern_key(pattern);
        self.patterns.iter().find(|p| p.pattern == key).and_then(|p| p.percent)
    }
}

fn pattern_key(sizes: &[usize]) -> String {
    sizes.iter().map(usize::to_string).collect::<Vec<_>>().join("+")
}

/// The label a multi-label pair is counted under: the first in precedence
/// order; `None` for an empty set.
pub fn primary_label(set: &StrategySet) -> Option<StrategyLabel> {
    set.labels.iter().next().copied()
}

/// How the primary labels of each message's five interpretations group.
/// Pairs with no label form their own group.
pub fn agreement_histogram(sets: &[StrategySet], corpus: &Corpus) -> AgreementHistogram {
    let mut by_message: BTreeMap<&str, Vec<Option<StrategyLabel>>> = BTreeMap::new();
    for (p, s) in joined(sets, corpus) {
        by_message.entry(p.s_im.id.as_str()).or_default().push(primary_label(s));
    }
    let mut tallies = vec![0usize; AGREEMENT_PATTERNS.len()];
    let (mut qualifying, mut excluded) = (0, 0);
    for labels in by_message.values() {
        if labels.len() != INTERPRETATIONS_PER_MESSAGE {
            excluded += 1;
            continue;
        }
        let mut groups: BTreeMap<Option<StrategyLabel>, usize> = BTreeMap::new();
        for l in labels {
            *groups.entry(*l).or_default() += 1;
        }
        let mut sizes: Vec<usize> = groups.into_values().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let k = AGREEMENT_PATTERNS
            .iter()
            .position(|p| *p == sizes.as_slice())
            .expect("partitions of five are enumerated");
        tallies[k] += 1;
        qualifying += 1;
    }
    AgreementHistogram {
        qualifying_messages: qualifying,
        excluded_messages: excluded,
        patterns: AGREEMENT_PATTERNS
            .iter()
            .zip(tallies)
            .map(|(p, n)| PatternShare {
                pattern: pattern_key(p),
                messages: n,
                percent: percent(n, qualifying),
            })
            .collect(),
    }
}

impl fmt::Display for AgreementHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Agreement ({} messages with 5 interpretations, {} excluded)",
            self.qualifying_messages, self.excluded_messages
        )?;
        writeln!(f, "{:<12} {:>8} {:>7}", "Pattern", "Messages", "%")?;
        for p in &self.patterns {
            writeln!(f, "{:<12} {:>8} {:>7}", p.pattern, p.messages, fmt_percent(p.percent))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub n: usize,
    pub observed: f64,
    pub expected: f64,
    pub kappa: f64,
}

impl fmt::Display for KappaResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n = {}, p_o = {:.4}, p_e = {:.4}, kappa = {:.4}",
            self.n, self.observed, self.expected, self.kappa
        )
    }
}

/// Two-rater Cohen's kappa. When chance agreement is certain (both raters
/// use one and the same category) kappa is 1.
pub fn cohen_kappa<T: Eq + Hash>(a: &[T], b: &[T]) -> Result<KappaResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("kappa needs at least one item".into()));
    }
    let n = a.len() as f64;
    let mut margins: HashMap<&T, (usize, usize)> = HashMap::new();
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        margins.entry(x).or_default().0 += 1;
        margins.entry(y).or_default().1 += 1;
        agree += usize::from(x == y);
    }
    let observed = agree as f64 / n;
    let expected: f64 = margins.values().map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n)).sum();
    let kappa = if (1.0 - expected).abs() < 1e-12 {
        1.0
    } else {
        (observed - expected) / (1.0 - expected)
    };
    Ok(KappaResult {
        n: a.len(),
        observed,
        expected,
        kappa,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Prf {
            precision,
            recall,
            f1: harmonic(precision, recall),
        }
    }

    fn rounded(self) -> Self {
        Prf {
            precision: round1(self.precision),
            recall: round1(self.recall),
            f1: round1(self.f1),
        }
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub label: StrategyLabel,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    #[serde(flatten)]
    pub scores: Prf,
}

/// Scores are percentages rounded to one decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub pairs: usize,
    /// Gold pairs without a prediction, scored as predicting nothing.
    pub missing_predictions: usize,
    /// Labels seen in gold or predictions.
    pub rows: Vec<EvalRow>,
    pub micro: Prf,
    #[serde(rename = "macro")]
    pub macro_avg: Prf,
}

impl EvalReport {
    pub fn row(&self, label: StrategyLabel) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Per-label scores over label-set pairs, each label a binary decision.
pub fn evaluate_sets(pairs: &[(BTreeSet<StrategyLabel>, BTreeSet<StrategyLabel>)]) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("no gold-labeled pairs to evaluate".into()));
    }
    let mut rows = Vec::new();
    let (mut tp_all, mut fp_all, mut fn_all) = (0, 0, 0);
    let mut macro_sum = (0.0, 0.0, 0.0);
    for label in StrategyLabel::ALL {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for (pred, gold) in pairs {
            match (pred.contains(&label), gold.contains(&label)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        if tp + fp + fn_ == 0 {
            continue;
        }
        let scores = Prf::from_counts(tp, fp, fn_);
        macro_sum.0 += scores.precision;
        macro_sum.1 += scores.recall;
        macro_sum.2 += scores.f1;
        tp_all += tp;
        fp_all += fp;
        fn_all += fn_;
        rows.push(EvalRow {
            label,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            scores: scores.rounded(),
        });
    }
    let k = rows.len().max(1) as f64;
    let macro_avg = Prf {
        precision: macro_sum.0 / k,
        recall: macro_sum.1 / k,
        f1: macro_sum.2 / k,
    };
    Ok(EvalReport {
        pairs: pairs.len(),
        missing_predictions: 0,
        rows,
        micro: Prf::from_counts(tp_all, fp_all, fn_all).rounded(),
        macro_avg: macro_avg.rounded(),
    })
}

/// Scores predictions against the gold strategies of every valid pair that
/// has at least one gold strategy.
pub fn evaluate(predicted: &[StrategySet], gold: &Corpus) -> Result<EvalReport> {
    let by_id: HashMap<&str, &StrategySet> = predicted.iter().map(|s| (s.pair_id.as_str(), s)).collect();
    let mut missing = 0;
    let pairs: Vec<_> = gold
        .valid_pairs()
        .filter_map(|p| p.gold.as_ref().filter(|g| !g.strategies.is_empty()).map(|g| (p, g)))
        .map(|(p, g)| {
            let pred = match by_id.get(p.pair_id.as_str()) {
                Some(s) => s.labels.clone(),
                None => {
                    missing += 1;
                    BTreeSet::new()
                }
            };
            (pred, g.strategies.clone())
        })
        .collect();
    let mut report = evaluate_sets(&pairs)?;
    report.missing_predictions = missing;
    Ok(report)
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Evaluation over {} pairs", self.pairs)?;
        writeln!(
            f,
            "{:<20} {:>5} {:>5} {:>5} {:>7} {:>7} {:>7}",
            "Strategy", "TP", "FP", "FN", "P", "R", "F1"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<20} {:>5} {:>5} {:>5} {:>7.1} {:>7.1} {:>7.1}",
                r.label.table_name(),
                r.true_positives,
                r.false_positives,
                r.false_negatives,
                r.scores.precision,
                r.scores.recall,
                r.scores.f1
            )?;
        }
        for (name, s) in [("micro", self.micro), ("macro", self.macro_avg)] {
            writeln!(
                f,
                "{:<20} {:>5} {:>5} {:>5} {:>7.1} {:>7.1} {:>7.1}",
                name, "", "", "", s.precision, s.recall, s.f1
            )?;
        }
        Ok(())
    }
}
