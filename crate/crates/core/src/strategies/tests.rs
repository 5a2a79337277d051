use proptest::prelude::*;

use super::*;
use crate::corpus::{parse_conllu, parse_pairs, DependencyTree, PairsFormat, Token, Upos};
use crate::lexicons::LexiconConfig;
use crate::rq::{parse_training_data, train_rq_classifier, RqConfig};

const PAIRS: &str = include_str!("../../tests/fixtures/quoted_pairs.tsv");
const PARSES: &str = include_str!("../../tests/fixtures/quoted_pairs.conllu");
const RQ_SEED: &str = include_str!("../../tests/fixtures/rq_seed.tsv");

struct Fixture {
    corpus: Corpus,
    parses: ParseMap,
    lexicons: LexiconBundle,
    rq: RqModel,
}

fn fixture() -> Fixture {
    let lexicons = LexiconBundle::bundled();
    let data = parse_training_data(RQ_SEED, "seed").unwrap();
    let rq = train_rq_classifier(&data, &RqConfig::default(), &lexicons.negation, None).unwrap();
    Fixture {
        corpus: parse_pairs(PAIRS, PairsFormat::Tsv, "pairs").unwrap(),
        parses: parse_conllu(PARSES, "parses").unwrap(),
        lexicons,
        rq,
    }
}

fn run(f: &Fixture, id: &str, phrases: Option<&OppositePhraseTable>) -> StrategySet {
    let mut res = Resources::new(&f.lexicons, &f.parses);
    res.rq_model = Some(&f.rq);
    res.opposite_phrases = phrases;
    let set = classify_pair(f.corpus.get(id).unwrap(), &res);
    set.check().unwrap();
    set
}

fn labels(xs: &[StrategyLabel]) -> BTreeSet<StrategyLabel> {
    xs.iter().copied().collect()
}

fn methods(set: &StrategySet) -> Vec<(EvidenceMethod, bool)> {
    set.evidence.iter().map(|e| (e.method, e.consumed)).collect()
}

fn pair(id: &str, s: &str, h: &str) -> IronyPair {
    let c = parse_pairs(&format!("{id}\th\t{s}\t{h}\n"), PairsFormat::Tsv, "t").unwrap();
    c.pairs()[0].clone()
}

#[test]
fn antonyms_licensed_by_shared_predicate() {
    let f = fixture();
    let set = run(&f, "x01", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::LexAnt]));
    let ev = &set.evidence[0];
    assert_eq!(ev.method, EvidenceMethod::DependencyAntonym);
    assert_eq!(ev.triggers, vec!["more", "less"]);
    assert_eq!((ev.s_focus, ev.h_focus), (Some(5), Some(2)));
}

#[test]
fn antonyms_found_only_by_lexicon_search() {
    let f = fixture();
    let set = run(&f, "x02", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::LexAnt]));
    assert_eq!(set.evidence[0].method, EvidenceMethod::FallbackAntonym);
    assert_eq!(set.evidence[0].triggers, vec!["yay", "awful"]);
    assert_eq!(set.evidence[0].h_span.unwrap().sentence, 1);
}

#[test]
fn copies_carry_no_evidence() {
    let lex = LexiconBundle::bundled();
    let parses = ParseMap::new();
    let res = Resources::new(&lex, &parses);
    for text in ["I love and hate mondays", "no rain today", "so great, not terrible"] {
        let set = classify_pair(&pair("c", text, text), &res);
        assert!(set.evidence.is_empty(), "{text}: {:?}", set.evidence);
    }
}

#[test]
fn negation_of_the_shared_predicate() {
    let f = fixture();
    let set = run(&f, "x03", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::SimpleNeg]));
    assert_eq!(set.evidence[0].triggers, vec!["not", "look"]);
    assert_eq!(set.evidence[0].h_span.map(|s| (s.start, s.end)), Some((2, 3)));
}

fn tree(id: &str, rows: &[(&str, Upos, usize, &str)]) -> DependencyTree {
    let tokens = rows
        .iter()
        .enumerate()
        .map(|(k, &(form, upos, head, deprel))| Token {
            index: k + 1,
            surface: form.to_string(),
            lemma: form.to_lowercase(),
            upos,
            head,
            deprel: deprel.to_string(),
        })
        .collect();
    DependencyTree::new(id, tokens).unwrap()
}

#[test]
fn negation_in_the_message_counts_too() {
    let lex = LexiconBundle::bundled();
    let mut parses = ParseMap::new();
    parses.insert(
        "b.s".into(),
        tree(
            "b.s",
            &[("not", Upos::PART, 3, "advmod"), ("a", Upos::DET, 3, "det"), ("biggie", Upos::NOUN, 0, "root")],
        ),
    );
    parses.insert(
        "b.h".into(),
        tree("b.h", &[("a", Upos::DET, 2, "det"), ("biggie", Upos::NOUN, 0, "root")]),
    );
    let p = pair("b", "not a biggie", "a biggie");
    let set = classify_pair(&p, &Resources::new(&lex, &parses));
    assert_eq!(set.labels, labels(&[StrategyLabel::SimpleNeg]));
    assert_eq!(set.evidence[0].s_span.map(|s| (s.start, s.end)), Some((1, 3)));

    parses.insert(
        "n.s".into(),
        tree(
            "n.s",
            &[("no", Upos::DET, 2, "det"), ("rain", Upos::NOUN, 0, "root"), ("today", Upos::NOUN, 2, "obl")],
        ),
    );
    parses.insert("n.h".into(), parses["n.s"].clone());
    let set = classify_pair(&pair("n", "no rain today", "no rain today"), &Resources::new(&lex, &parses));
    assert!(set.evidence.is_empty());
}

#[test]
fn unparsed_negation_side_is_skipped_and_reported() {
    let lex = LexiconBundle::bundled();
    let parses = ParseMap::new();
    let set = classify_pair(&pair("u", "looks like me", "does not look like me"), &Resources::new(&lex, &parses));
    assert!(set.labels.is_empty());
    assert!(set.notes.iter().any(|n| n.contains("negation skipped")));
    assert!(set.notes.iter().any(|n| n == NOTE_NO_PARSE_H));
}

#[test]
fn neutralizing_a_strong_word_under_negation() {
    let f = fixture();
    let set = run(&f, "x04", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::AnWeakSent]));
    assert_eq!(
        methods(&set),
        vec![(EvidenceMethod::NegationScope, true), (EvidenceMethod::WeakenNeutralize, false)]
    );
    assert_eq!(set.evidence[1].triggers, vec!["love", "like"]);
    // Same predicate on both sides: no strength difference to exploit.
    let set = run(&f, "x03", None);
    assert!(set.evidence.iter().all(|e| e.method != EvidenceMethod::WeakenNeutralize));
}

#[test]
fn neutralization_respects_the_margin() {
    let f = fixture();
    let mut res = Resources::new(&f.lexicons, &f.parses);
    res.config.weaken_margin = 0.9;
    let set = classify_pair(f.corpus.get("x04").unwrap(), &res);
    assert!(set.labels.is_empty());
}

#[test]
fn dropped_intensifier() {
    let f = fixture();
    let set = run(&f, "x05", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::AnWeakSent]));
    assert_eq!(
        methods(&set),
        vec![(EvidenceMethod::NegationScope, true), (EvidenceMethod::WeakenDropIntensifier, false)]
    );
    assert_eq!(set.evidence[1].triggers, vec!["so", "healthy"]);
    // Antonym variant: "so flattering" against "an unflattering look".
    let set = run(&f, "t3h2", None);
    assert_eq!(
        methods(&set),
        vec![(EvidenceMethod::FallbackAntonym, true), (EvidenceMethod::WeakenDropIntensifier, false)]
    );
    // Intensifier kept on both sides: plain antonym.
    assert_eq!(run(&f, "t3h1", None).labels, labels(&[StrategyLabel::LexAnt]));
}

#[test]
fn configured_intensifier_turns_negation_into_weakening() {
    let f = fixture();
    assert_eq!(run(&f, "t1h3", None).labels, labels(&[StrategyLabel::SimpleNeg]));
    let config = LexiconConfig {
        extra_intensifiers: vec!["such/ADJ".into()],
        ..Default::default()
    };
    let lex = LexiconBundle::from_config(&config, std::path::Path::new(".")).unwrap();
    let res = Resources::new(&lex, &f.parses);
    let set = classify_pair(f.corpus.get("t1h3").unwrap(), &res);
    assert_eq!(set.labels, labels(&[StrategyLabel::AnWeakSent]));
}

#[test]
fn rhetorical_question_to_statement() {
    let f = fixture();
    let set = run(&f, "x06", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::AnInterrogToDecl]));
    assert_eq!(set.evidence[0].label, StrategyLabel::LexAnt);
    assert!(set.evidence[0].consumed);
    assert_eq!(set.evidence[1].triggers, vec!["love", "hate"]);

    let mut res = Resources::new(&f.lexicons, &f.parses);
    res.rq_model = Some(&f.rq);
    let asked = pair("q", "don't you love fighting?", "do I hate fighting?");
    assert_eq!(classify_pair(&asked, &res).labels, labels(&[StrategyLabel::LexAnt]));
    let plain = pair("p", "you love fighting", "I hate fighting");
    assert_eq!(classify_pair(&plain, &res).labels, labels(&[StrategyLabel::LexAnt]));
    // Without a model the gate stays closed.
    let set = classify_pair(f.corpus.get("x06").unwrap(), &Resources::new(&f.lexicons, &f.parses));
    assert_eq!(set.labels, labels(&[StrategyLabel::LexAnt]));
}

#[test]
fn desiderative_pattern() {
    let hit = |t: &str| !detect_desiderative(&UtteranceView::from_text(t), 2).is_empty();
    assert!(hit("I wish you hadn't relayed this news"));
    assert!(hit("I really wish my friends and family would check up on me"));
    assert!(hit("I just really wish it stopped"));
    assert!(hit("i WISH"));
    assert!(!hit("the wishbone broke"));
    assert!(!hit("you wish"));
    assert!(!hit("I am so sure they wish"));
    assert!(!hit("I know. wish me luck"));
    assert!(!hit("I wished for it"));
}

#[test]
fn desiderative_absorbs_negation_in_its_sentence() {
    let f = fixture();
    let set = run(&f, "x07", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::AnDesiderative]));
    assert_eq!(
        methods(&set),
        vec![(EvidenceMethod::NegationScope, true), (EvidenceMethod::DesiderativePattern, false)]
    );
}

#[test]
fn phrasal_strategy_is_a_last_resort() {
    let f = fixture();
    let table = OppositePhraseTable::from_pairs([("buy a yacht", "so poor"), ("love", "hate")]);
    let set = run(&f, "x08", Some(&table));
    assert_eq!(set.labels, labels(&[StrategyLabel::AntPhrasePragInf]));
    assert_eq!(set.evidence[0].s_span.map(|s| (s.start, s.end)), Some((10, 12)));
    assert!(run(&f, "x08", Some(&OppositePhraseTable::default())).labels.is_empty());
    assert!(run(&f, "x08", None).labels.is_empty());
    // "love"/"hate" is in the table, but the pair already has antonym evidence.
    let set = run(&f, "x06", Some(&table));
    assert!(!set.labels.contains(&StrategyLabel::AntPhrasePragInf));
}

#[test]
fn two_strategies_in_one_pair() {
    let f = fixture();
    let set = run(&f, "x09", None);
    assert_eq!(set.labels, labels(&[StrategyLabel::LexAnt, StrategyLabel::SimpleNeg]));
    assert!(set.evidence.iter().all(|e| !e.consumed));
}

#[test]
fn unrelated_sentences_get_no_label() {
    let lex = LexiconBundle::bundled();
    let parses = ParseMap::new();
    let table = OppositePhraseTable::from_pairs([("buy a yacht", "so poor")]);
    let mut res = Resources::new(&lex, &parses);
    res.opposite_phrases = Some(&table);
    let set = classify_pair(&pair("z", "the train left at noon", "my cat sleeps a lot"), &res);
    assert!(set.labels.is_empty() && set.evidence.is_empty());
}

#[test]
fn corpus_classification_is_sorted_and_round_trips() {
    let f = fixture();
    let mut res = Resources::new(&f.lexicons, &f.parses);
    res.rq_model = Some(&f.rq);
    let sets = classify_corpus(&f.corpus, &res, false);
    assert_eq!(sets.len(), f.corpus.len());
    assert!(sets.windows(2).all(|w| w[0].pair_id < w[1].pair_id));
    let mut buf = Vec::new();
    write_labels(&sets, &mut buf).unwrap();
    let back = parse_labels(std::str::from_utf8(&buf).unwrap(), "l").unwrap();
    assert_eq!(back, sets);
    assert!(parse_labels("{\"pair_id\": 3}\n", "l.jsonl").unwrap_err().to_string().starts_with("l.jsonl:1:"));
}

#[test]
fn check_rejects_broken_bookkeeping() {
    let mut ev = StrategyEvidence::new(StrategyLabel::LexAnt, EvidenceMethod::FallbackAntonym);
    let set = StrategySet::from_evidence("a", vec![ev.clone()], vec![]);
    assert!(set.check().is_ok());
    ev.consume(5);
    let set = StrategySet::from_evidence("a", vec![ev.clone()], vec![]);
    assert!(set.check().is_err());
    let mut bad = StrategySet::from_evidence("a", vec![StrategyEvidence::new(StrategyLabel::LexAnt, EvidenceMethod::FallbackAntonym)], vec![]);
    bad.labels.insert(StrategyLabel::AnWeakSent);
    assert!(matches!(bad.check(), Err(Error::Invariant(_))));
}

const WORDS: [&str; 22] = [
    "i", "love", "like", "hate", "not", "n't", "so", "very", "healthy", "sick", "wish", "nice", "mean", "great",
    "terrible", "?", ".", "you", "buy", "a", "yacht", "poor",
];
const TAGS: [Upos; 6] = [Upos::PRON, Upos::VERB, Upos::ADV, Upos::ADJ, Upos::PART, Upos::PUNCT];

fn random_tree(id: &str, words: &[(usize, usize, usize)]) -> DependencyTree {
    let tokens = words
        .iter()
        .enumerate()
        .map(|(k, &(w, t, h))| Token {
            index: k + 1,
            surface: WORDS[w].to_string(),
            lemma: WORDS[w].to_string(),
            upos: TAGS[t],
            head: if k == 0 { 0 } else { h % (k + 1) },
            deprel: if k == 0 { "root".into() } else { "dep".into() },
        })
        .collect();
    DependencyTree::new(id, tokens).unwrap()
}

fn side() -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec((0..WORDS.len(), 0..TAGS.len(), 0usize..10), 1..8)
}

proptest! {
    #[test]
    fn cascade_invariants(s in side(), h in side(), parsed in any::<bool>()) {
        let lex = LexiconBundle::bundled();
        let text = |v: &[(usize, usize, usize)]| v.iter().map(|x| WORDS[x.0]).collect::<Vec<_>>().join(" ");
        let p = pair("r", &text(&s), &text(&h));
        let mut parses = ParseMap::new();
        if parsed {
            parses.insert("r.s".into(), random_tree("r.s", &s));
            parses.insert("r.h".into(), random_tree("r.h", &h));
        }
        let table = OppositePhraseTable::from_pairs([("buy a yacht", "so poor"), ("yacht", "poor")]);
        let mut res = Resources::new(&lex, &parses);
        res.opposite_phrases = Some(&table);
        let set = classify_pair(&p, &res);
        prop_assert!(set.check().is_ok(), "{:?}", set.check());
        prop_assert_eq!(&set, &classify_pair(&p, &res));
        if set.labels.contains(&StrategyLabel::AntPhrasePragInf) {
            prop_assert_eq!(set.labels.len(), 1);
        }
        for e in &set.evidence {
            if let Some(sp) = e.s_span { prop_assert!(sp.start >= 1 && sp.end <= s.len()); }
            if let Some(sp) = e.h_span { prop_assert!(sp.start >= 1 && sp.end <= h.len()); }
        }
        // The desiderative detector sees only H_int.
        let hv = PairView::new(&p, &parses, None).h;
        let alone = detect_desiderative(&hv, 2);
        let in_set: Vec<_> = set.evidence.iter().filter(|e| e.method == EvidenceMethod::DesiderativePattern).cloned().collect();
        prop_assert_eq!(alone, in_set);
    }
}
