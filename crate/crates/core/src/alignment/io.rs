//! Plain-text model files. Probabilities are written with 9 decimals.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Bitext, HmmJumpModel, PhraseEntry, PhraseTable, SentencePair, TranslationTable};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<(String, String)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok((text, path.display().to_string()))
}

fn write(path: &Path, text: String) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').split('\t').collect()))
}

fn number<T: std::str::FromStr>(field: &str, origin: &str, line: usize) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::malformed(origin, line, format!("bad number `{field}`")))
}

pub(crate) fn format_translation_table(table: &TranslationTable) -> String {
    let mut out = String::new();
    for (e, f, p) in table.entries() {
        let _ = writeln!(out, "{e}\t{f}\t{p:.9}");
    }
    out
}

pub(crate) fn parse_translation_table(text: &str, origin: &str) -> Result<TranslationTable> {
    let mut entries = Vec::new();
    for (line, fields) in rows(text) {
        let [e, f, p] = fields.as_slice() else {
            return Err(Error::malformed(origin, line, "expected `e<TAB>f<TAB>t`"));
        };
        entries.push((*e, *f, number::<f64>(p, origin, line)?));
    }
    Ok(TranslationTable::from_entries(entries))
}

/// `e  f  t(f|e)` per line.
pub fn write_translation_table(table: &TranslationTable, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), format_translation_table(table))
}

/// Reads a table written by [`write_translation_table`]; rows are renormalized
/// to undo rounding.
pub fn read_translation_table(path: impl AsRef<Path>) -> Result<TranslationTable> {
    let (text, origin) = read(path.as_ref())?;
    parse_translation_table(&text, &origin)
}

pub(crate) fn format_jump_model(model: &HmmJumpModel) -> String {
    let mut out = String::new();
    for (jump, p) in model.distribution() {
        let _ = writeln!(out, "{jump}\t{p:.9}");
    }
    let _ = writeln!(out, "null\t{:.9}", model.p_null);
    out
}

pub(crate) fn parse_jump_model(text: &str, origin: &str) -> Result<HmmJumpModel> {
    let mut jumps: Vec<(i64, f64)> = Vec::new();
    let mut p_null = None;
    for (line, fields) in rows(text) {
        let [k, p] = fields.as_slice() else {
            return Err(Error::malformed(origin, line, "expected `jump<TAB>prob`"));
        };
        let p: f64 = number(p, origin, line)?;
        if k.trim() == "null" {
            p_null = Some(p);
        } else {
            jumps.push((number(k, origin, line)?, p));
        }
    }
    jumps.sort_by_key(|j| j.0);
    let max_jump = jumps.last().map_or(0, |j| j.0.max(0) as usize);
    let expected: Vec<i64> = (-(max_jump as i64)..=max_jump as i64).collect();
    if jumps.iter().map(|j| j.0).collect::<Vec<_>>() != expected {
        return Err(Error::malformed(origin, 1, "jump classes must cover -max..=max exactly once"));
    }
    let p_null = p_null.ok_or_else(|| Error::malformed(origin, 1, "missing `null` row"))?;
    HmmJumpModel::from_parts(max_jump, jumps.into_iter().map(|j| j.1).collect(), p_null)
}

/// `jump  prob` per line, followed by `null  p`.
pub fn write_jump_model(model: &HmmJumpModel, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), format_jump_model(model))
}

pub fn read_jump_model(path: impl AsRef<Path>) -> Result<HmmJumpModel> {
    let (text, origin) = read(path.as_ref())?;
    parse_jump_model(&text, &origin)
}

pub(crate) fn format_phrase_table(table: &PhraseTable) -> String {
    let mut out = String::new();
    for (e, f, x) in table.iter() {
        let _ = writeln!(
            out,
            "{e}\t{f}\t{}\t{:.9}\t{:.9}",
            x.count, x.phi_f_given_e, x.phi_e_given_f
        );
    }
    out
}

pub(crate) fn parse_phrase_table(text: &str, origin: &str) -> Result<PhraseTable> {
    let mut entries = Vec::new();
    for (line, fields) in rows(text) {
        let [e, f, c, pf, pe] = fields.as_slice() else {
            return Err(Error::malformed(
                origin,
                line,
                "expected `e_phrase<TAB>f_phrase<TAB>count<TAB>phi_f_given_e<TAB>phi_e_given_f`",
            ));
        };
        let entry = PhraseEntry {
            count: number(c, origin, line)?,
            phi_f_given_e: number(pf, origin, line)?,
            phi_e_given_f: number(pe, origin, line)?,
        };
        if !(entry.phi_f_given_e > 0.0 && entry.phi_f_given_e <= 1.0 + 1e-9) {
            return Err(Error::malformed(origin, line, "phi must lie in (0, 1]"));
        }
        entries.push((e.to_lowercase(), f.to_lowercase(), entry));
    }
    Ok(PhraseTable::from_entries(entries))
}

/// `e_phrase  f_phrase  count  phi_f_given_e  phi_e_given_f` per line.
pub fn write_phrase_table(table: &PhraseTable, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), format_phrase_table(table))
}

pub fn read_phrase_table(path: impl AsRef<Path>) -> Result<PhraseTable> {
    let (text, origin) = read(path.as_ref())?;
    parse_phrase_table(&text, &origin)
}

/// Space-joined source and target tokens separated by a tab.
pub fn write_bitext(bitext: &Bitext, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for p in bitext.pairs() {
        let _ = writeln!(out, "{}\t{}", p.source.join(" "), p.target.join(" "));
    }
    write(path.as_ref(), out)
}

pub fn read_bitext(path: impl AsRef<Path>) -> Result<Bitext> {
    let (text, origin) = read(path.as_ref())?;
    let mut pairs = Vec::new();
    for (line, fields) in rows(&text) {
        let [s, t] = fields.as_slice() else {
            return Err(Error::malformed(&origin, line, "expected `source<TAB>target`"));
        };
        let pair = SentencePair::from_text(s, t);
        if pair.source.is_empty() || pair.target.is_empty() {
            return Err(Error::malformed(&origin, line, "empty side"));
        }
        pairs.push(pair);
    }
    Bitext::new(pairs)
}

#[cfg(test)]
mod tests {
    use super::super::train_model1;
    use super::*;

    #[test]
    fn translation_table_round_trip() {
        let b = Bitext::new(vec![
            SentencePair::from_text("la maison", "the house"),
            SentencePair::from_text("la fleur", "the flower"),
        ])
        .unwrap();
        let table = train_model1(&b, 5).unwrap().table;
        let text = format_translation_table(&table);
        assert!(text.lines().all(|l| l.rsplit('\t').next().unwrap().split('.').nth(1).unwrap().len() == 9));
        let back = parse_translation_table(&text, "t").unwrap();
        assert!(back.normalization_error() < 1e-9);
        for (e, f, p) in table.entries() {
            assert!((back.prob(f, e) - p).abs() < 1e-8);
        }
        assert_eq!(format_translation_table(&back), text);
    }

    #[test]
    fn jump_model_round_trip() {
        let m = HmmJumpModel::from_parts(1, vec![0.2, 0.3, 0.5], 0.1).unwrap();
        let back = parse_jump_model(&format_jump_model(&m), "t").unwrap();
        assert_eq!(back.max_jump, 1);
        assert!((back.prob(1) - 0.5).abs() < 1e-9);
        assert!((back.p_null - 0.1).abs() < 1e-9);
        assert!(parse_jump_model("0\t1\n", "t").is_err());
    }

    #[test]
    fn phrase_table_round_trip_and_errors() {
        let t = PhraseTable::from_occurrences([("a b", "x"), ("a b", "y"), ("c", "y")]);
        let back = parse_phrase_table(&format_phrase_table(&t), "t").unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.get("a b", "y").unwrap().count, 1);
        let err = parse_phrase_table("a\tb\t1\t0.5\n", "p.tsv").unwrap_err();
        assert!(err.to_string().starts_with("p.tsv:1:"));
        assert!(parse_phrase_table("a\tb\t1\t0\t1\n", "p").is_err());
    }

    #[test]
    fn bitext_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.tsv");
        let b = Bitext::new(vec![SentencePair::from_text("so healthy", "not healthy")]).unwrap();
        write_bitext(&b, &path).unwrap();
        assert_eq!(read_bitext(&path).unwrap(), b);
        assert!(read_bitext(dir.path().join("missing.tsv")).is_err());
    }
}
