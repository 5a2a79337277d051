use std::collections::HashSet;

use crate::alignment::{Alignment, SentencePair, SymmetricAligner};
use crate::corpus::{fallback_tokenize, is_punctuation, normalize_word, DependencyTree, IronyPair, ParseMap, Upos, Utterance};

/// A token as the detectors see it; unparsed utterances carry no POS or heads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewToken {
    /// 1-based position.
    pub index: usize,
    /// Lowercased surface.
    pub form: String,
    pub lemma: String,
    pub upos: Option<Upos>,
    pub deprel: Option<String>,
    /// 0-based sentence number.
    pub sentence: usize,
}

#[derive(Debug, Clone)]
pub struct UtteranceView<'a> {
    pub tokens: Vec<ViewToken>,
    pub tree: Option<&'a DependencyTree>,
}

fn sentence_final(token: &str) -> bool {
    is_punctuation(token) && token.chars().any(|c| matches!(c, '.' | '!' | '?' | '…'))
}

impl<'a> UtteranceView<'a> {
    pub fn new(utterance: &Utterance, parses: &'a ParseMap) -> Self {
        match parses.get(&utterance.id) {
            Some(tree) => Self::from_tree(tree),
            None => Self::from_text(&utterance.text),
        }
    }

    pub fn from_tree(tree: &'a DependencyTree) -> Self {
        let tokens = tree
            .tokens()
            .iter()
            .map(|t| ViewToken {
                index: t.index,
                form: normalize_word(&t.surface),
                lemma: t.lemma.clone(),
                upos: Some(t.upos),
                deprel: Some(t.deprel.clone()),
                sentence: tree.sentence_of(t.index),
            })
            .collect();
        UtteranceView { tokens, tree: Some(tree) }
    }

    /// Fallback tokens; sentences split after final punctuation.
    pub fn from_text(text: &str) -> Self {
        let raw = fallback_tokenize(text);
        let mut sentence = 0;
        let mut tokens = Vec::with_capacity(raw.len());
        for (k, t) in raw.iter().enumerate() {
            let form = normalize_word(t);
            tokens.push(ViewToken {
                index: k + 1,
                lemma: form.clone(),
                form,
                upos: None,
                deprel: None,
                sentence,
            });
            if sentence_final(t) && k + 1 < raw.len() {
                sentence += 1;
            }
        }
        UtteranceView { tokens, tree: None }
    }

    pub fn is_parsed(&self) -> bool {
        self.tree.is_some()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, index: usize) -> &ViewToken {
        &self.tokens[index - 1]
    }

    pub fn forms(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.form.clone()).collect()
    }

    pub fn parent(&self, index: usize) -> Option<&ViewToken> {
        let tree = self.tree?;
        tree.parent(index).map(|p| self.token(p.index))
    }

    pub fn children(&self, index: usize) -> Vec<&ViewToken> {
        match self.tree {
            Some(tree) => tree.children(index).map(|c| self.token(c.index)).collect(),
            None => Vec::new(),
        }
    }

    pub fn is_main_root(&self, index: usize) -> bool {
        self.tree.is_some_and(|t| t.main_root() == index)
    }

    pub fn main_root(&self) -> Option<usize> {
        self.tree.map(DependencyTree::main_root)
    }

    /// Lemmas and surface forms, for membership tests.
    pub fn vocabulary(&self) -> HashSet<&str> {
        self.tokens
            .iter()
            .flat_map(|t| [t.lemma.as_str(), t.form.as_str()])
            .collect()
    }

    pub fn has_question_mark(&self) -> bool {
        self.tokens.iter().any(|t| t.form.contains('?'))
    }

    /// Sentences containing a question mark.
    pub fn question_sentences(&self) -> HashSet<usize> {
        self.tokens
            .iter()
            .filter(|t| t.form.contains('?'))
            .map(|t| t.sentence)
            .collect()
    }
}

/// Both sides of a pair plus the symmetrized word alignment when available.
#[derive(Debug, Clone)]
pub struct PairView<'a> {
    pub pair_id: &'a str,
    pub s: UtteranceView<'a>,
    pub h: UtteranceView<'a>,
    pub s_text: &'a str,
    pub h_text: &'a str,
    pub alignment: Option<Alignment>,
}

impl<'a> PairView<'a> {
    pub fn new(pair: &'a IronyPair, parses: &'a ParseMap, aligner: Option<&SymmetricAligner>) -> Self {
        let s = UtteranceView::new(&pair.s_im, parses);
        let h = UtteranceView::new(&pair.h_int, parses);
        let alignment = aligner
            .filter(|_| !s.is_empty() && !h.is_empty())
            .map(|a| a.align(&SentencePair::new(s.forms(), h.forms())));
        PairView {
            pair_id: &pair.pair_id,
            s,
            h,
            s_text: &pair.s_im.text,
            h_text: &pair.h_int.text,
            alignment,
        }
    }

    pub fn aligned(&self, i: usize, j: usize) -> bool {
        self.alignment.as_ref().is_some_and(|a| a.contains(i, j))
    }

    /// S positions linked to H position `j`.
    pub fn s_links(&self, j: usize) -> Vec<usize> {
        self.alignment
            .as_ref()
            .map_or_else(Vec::new, |a| a.sources_of(j).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fallback_view_tracks_sentences() {
        let v = UtteranceView::from_text("cake for breakfast. so healthy");
        assert_eq!(v.len(), 6);
        assert_eq!(v.token(4).sentence, 0);
        assert_eq!(v.token(5).sentence, 1);
        assert!(!v.is_parsed());
        assert!(v.parent(5).is_none());
        let q = UtteranceView::from_text("really? yes.");
        assert!(q.has_question_mark());
        assert_eq!(q.question_sentences().into_iter().collect::<Vec<_>>(), vec![0]);
    }
}
