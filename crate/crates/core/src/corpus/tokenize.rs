//! Fallback tokenization for utterances without a dependency parse.

const TRAILING_PUNCT: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\'', ')', '(', '…', '“', '”'];

/// Whitespace split, then peel trailing (and leading) punctuation into
/// separate tokens. Runs such as `!!!` stay together; apostrophes inside
/// words (`don't`) are kept.
pub fn fallback_tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if chunk.chars().all(|c| TRAILING_PUNCT.contains(&c)) {
            out.push(chunk.to_string());
            continue;
        }
        // Hashtags, mentions, emoticons and URLs are left intact.
        if chunk.starts_with('#') || chunk.starts_with('@') || chunk.contains("://") {
            out.push(chunk.to_string());
            continue;
        }
        let body_start = chunk
            .char_indices()
            .find(|(_, c)| !matches!(c, '"' | '(' | '“' | '\''))
            .map_or(0, |(i, _)| i);
        if body_start > 0 {
            out.push(chunk[..body_start].to_string());
        }
        let rest = &chunk[body_start..];
        let body_end = rest.trim_end_matches(TRAILING_PUNCT).len();
        if body_end == 0 {
            out.push(rest.to_string());
            continue;
        }
        out.push(rest[..body_end].to_string());
        let tail = &rest[body_end..];
        if !tail.is_empty() {
            // Keep repeated sentence punctuation as one run, split the rest.
            let mut run = String::new();
            for c in tail.chars() {
                if !run.is_empty() && !run.ends_with(c) {
                    out.push(std::mem::take(&mut run));
                }
                run.push(c);
            }
            out.push(run);
        }
    }
    out
}

/// Lowercase and map typographic apostrophes to ASCII.
pub fn normalize_word(word: &str) -> String {
    word.to_lowercase().replace(['’', '‘'], "'")
}

pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(
            fallback_tokenize("don't you love fighting?"),
            vec!["don't", "you", "love", "fighting", "?"]
        );
        assert_eq!(fallback_tokenize("so healthy!!!"), vec!["so", "healthy", "!!!"]);
        assert_eq!(fallback_tokenize("bowl. Yay"), vec!["bowl", ".", "Yay"]);
        assert_eq!(fallback_tokenize("what?!"), vec!["what", "?", "!"]);
    }

    #[test]
    fn keeps_hashtags_and_quotes() {
        assert_eq!(
            fallback_tokenize("\"great\" #worstsaturdaynight"),
            vec!["\"", "great", "\"", "#worstsaturdaynight"]
        );
        assert_eq!(fallback_tokenize("..."), vec!["..."]);
        assert!(fallback_tokenize("   ").is_empty());
    }
}
