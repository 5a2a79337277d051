//! Minimal CoNLL-U reader keyed by `# utterance_id = <id>` comments.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::tree::{DependencyTree, Token};
use super::types::Upos;
use crate::error::{Error, Result};

pub type ParseMap = HashMap<String, DependencyTree>;

pub fn load_parses(path: impl AsRef<Path>) -> Result<ParseMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(&text, &path.display().to_string())
}

struct Block {
    id: Option<String>,
    first_line: usize,
    tokens: Vec<Token>,
}

/// Parses CoNLL-U text. Consecutive or repeated blocks with the same
/// utterance id are concatenated into one multi-root tree.
pub fn parse_conllu(text: &str, origin: &str) -> Result<ParseMap> {
    let mut map: ParseMap = HashMap::new();
    let mut block: Option<Block> = None;

    let flush = |block: Block, map: &mut ParseMap| -> Result<()> {
        if block.tokens.is_empty() {
            return Ok(());
        }
        let id = block
            .id
            .ok_or_else(|| Error::malformed(origin, block.first_line, "sentence without `# utterance_id` comment"))?;
        let tree = DependencyTree::new(id.clone(), block.tokens)?;
        let merged = match map.remove(&id) {
            Some(prev) => prev.extend(tree)?,
            None => tree,
        };
        map.insert(id, merged);
        Ok(())
    };

    for (n, raw) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(b) = block.take() {
                flush(b, &mut map)?;
            }
            continue;
        }
        let current = block.get_or_insert_with(|| Block {
            id: None,
            first_line: lineno,
            tokens: Vec::new(),
        });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "utterance_id" {
                    if !current.tokens.is_empty() {
                        return Err(Error::malformed(origin, lineno, "utterance_id comment after token lines"));
                    }
                    current.id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 10 {
            return Err(Error::malformed(
                origin,
                lineno,
                format!("expected 10 tab-separated fields, found {}", fields.len()),
            ));
        }
        // Multiword ranges (3-4) and empty nodes (5.1) are not part of the basic tree.
        if fields[0].contains('-') || fields[0].contains('.') {
            continue;
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| Error::malformed(origin, lineno, format!("bad token id `{}`", fields[0])))?;
        let head: usize = fields[6]
            .parse()
            .map_err(|_| Error::malformed(origin, lineno, format!("bad head `{}`", fields[6])))?;
        let upos: Upos = fields[3].parse().map_err(|e: String| Error::malformed(origin, lineno, e))?;
        let surface = fields[1].to_string();
        let lemma = match fields[2] {
            "_" | "" => surface.to_lowercase(),
            l => l.to_lowercase(),
        };
        current.tokens.push(Token {
            index,
            surface,
            lemma,
            upos,
            head,
            deprel: fields[7].to_string(),
        });
    }
    if let Some(b) = block.take() {
        flush(b, &mut map)?;
    }
    Ok(map)
}

/// Serializes a tree back to CoNLL-U (one block per utterance).
pub fn write_conllu(tree: &DependencyTree) -> String {
    let mut out = format!("# utterance_id = {}\n", tree.utterance_id);
    for t in tree.tokens() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_\n",
            t.index, t.surface, t.lemma, t.upos, t.head, t.deprel
        ));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const NOT_LOOK: &str = "# utterance_id = p1.h
1\tdoes\tdo\tAUX\t_\t_\t3\taux\t_\t_
2\tnot\tnot\tPART\t_\t_\t3\tadvmod\t_\t_
3\tlook\tlook\tVERB\t_\t_\t0\troot\t_\t_
4\tlike\tlike\tADP\t_\t_\t5\tcase\t_\t_
5\tme\tI\tPRON\t_\t_\t3\tobl\t_\t_

";

    #[test]
    fn reads_negation_attachment() {
        let map = parse_conllu(NOT_LOOK, "t").unwrap();
        let tree = &map["p1.h"];
        assert_eq!(tree.len(), 5);
        assert_eq!(tree.parent(2).unwrap().lemma, "look");
        assert_eq!(tree.token(5).lemma, "i");
    }

    #[test]
    fn one_token_sentence() {
        let map = parse_conllu("# utterance_id = u\n1\tYay\tyay\tINTJ\t_\t_\t0\troot\t_\t_\n", "t").unwrap();
        assert_eq!(map["u"].root_indices(), &[1]);
    }

    #[test]
    fn self_headed_token_is_rejected() {
        let text = "# utterance_id = bad\n1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t2\tdep\t_\t_\n";
        let err = parse_conllu(text, "t").unwrap_err();
        assert!(matches!(err, Error::CyclicTree { ref utterance, .. } if utterance == "bad"));
    }

    #[test]
    fn out_of_range_head_is_rejected() {
        let text = "# utterance_id = bad\n1\ta\ta\tX\t_\t_\t7\tdep\t_\t_\n";
        assert!(matches!(parse_conllu(text, "t"), Err(Error::HeadOutOfRange { .. })));
    }

    #[test]
    fn repeated_ids_merge_into_one_tree() {
        let text = "# utterance_id = u\n1\tcake\tcake\tNOUN\t_\t_\t0\troot\t_\t_\n\n\
                    # utterance_id = u\n1\tso\tso\tADV\t_\t_\t2\tadvmod\t_\t_\n2\thealthy\thealthy\tADJ\t_\t_\t0\troot\t_\t_\n";
        let map = parse_conllu(text, "t").unwrap();
        let tree = &map["u"];
        assert_eq!(tree.root_indices(), &[1, 3]);
        assert_eq!(tree.token(2).head, 3);
    }

    #[test]
    fn multiword_ranges_are_skipped() {
        let text = "# utterance_id = u\n1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n";
        let map = parse_conllu(text, "t").unwrap();
        assert_eq!(map["u"].len(), 3);
    }

    #[test]
    fn missing_id_is_an_error_with_line() {
        let err = parse_conllu("1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n", "f.conllu").unwrap_err();
        assert!(err.to_string().starts_with("f.conllu:1:"));
    }

    #[test]
    fn write_then_read() {
        let map = parse_conllu(NOT_LOOK, "t").unwrap();
        let again = parse_conllu(&write_conllu(&map["p1.h"]), "t").unwrap();
        assert_eq!(again["p1.h"], map["p1.h"]);
    }
}
