//! Paragraph segmentation.
//!
//! Paragraphs are separated by blank-line boundaries: one or more lines that
//! are empty after trimming. Paragraphs with fewer than [`MIN_WORDS`]
//! whitespace-delimited tokens are dropped and the survivors re-indexed from 0.

use serde::{Deserialize, Serialize};

/// Paragraphs shorter than this many words are discarded.
pub const MIN_WORDS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub index: usize,
    pub text: String,
    pub word_count: usize,
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Splits decoded book text into retained paragraphs, in textual order.
pub fn segment_text(raw_text: &str) -> Vec<Paragraph> {
    let text = raw_text.replace("\r\n", "\n");
    let mut paragraphs = Vec::new();
    let mut current: Vec<&str> = Vec::new();

    let flush = |lines: &mut Vec<&str>, out: &mut Vec<Paragraph>| {
        if lines.is_empty() {
            return;
        }
        let joined = lines.join("\n");
        lines.clear();
        let trimmed = joined.trim();
        let words = word_count(trimmed);
        if words >= MIN_WORDS {
            out.push(Paragraph {
                index: out.len(),
                text: trimmed.to_owned(),
                word_count: words,
            });
        }
    };

    for line in text.split('\n') {
        if line.trim().is_empty() {
            flush(&mut current, &mut paragraphs);
        } else {
            current.push(line);
        }
    }
    flush(&mut current, &mut paragraphs);
    paragraphs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn drops_short_middle_paragraph() {
        let paras =
            segment_text("one two three four five six\n\nshort bit\n\nseven eight nine ten eleven");
        assert_eq!(paras.len(), 2);
        assert_eq!(paras[0].index, 0);
        assert_eq!(paras[0].word_count, 6);
        assert_eq!(paras[1].index, 1);
        assert_eq!(paras[1].text, "seven eight nine ten eleven");
    }

    #[test]
    fn empty_input() {
        assert!(segment_text("").is_empty());
        assert!(segment_text("\n\n\n  \n").is_empty());
    }

    #[test]
    fn single_paragraph_without_delimiter() {
        let paras = segment_text("alpha beta gamma delta epsilon");
        assert_eq!(
            paras,
            vec![Paragraph {
                index: 0,
                text: "alpha beta gamma delta epsilon".into(),
                word_count: 5
            }]
        );
    }

    #[test]
    fn crlf_and_whitespace_only_lines_are_boundaries() {
        let raw = "a b c d e\r\nf g\r\n  \t \r\n\r\n\r\nh i j k l m  \r\n";
        let paras = segment_text(raw);
        assert_eq!(paras.len(), 2);
        assert_eq!(paras[0].text, "a b c d e\nf g");
        assert_eq!(paras[0].word_count, 7);
        assert_eq!(paras[1].text, "h i j k l m");
    }

    #[test]
    fn single_newline_does_not_split() {
        let paras = segment_text("one two three\nfour five");
        assert_eq!(paras.len(), 1);
        assert_eq!(paras[0].word_count, 5);
    }

    #[test]
    fn hyphenated_compound_is_one_word() {
        assert_eq!(segment_text("well-known four-word hyphen-joined phrase").len(), 0);
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        let token = prop_oneof![
            "[a-z]{1,6}".prop_map(|s| s),
            Just("\n".to_owned()),
            Just("\n\n".to_owned()),
            Just("\r\n".to_owned()),
            Just("  ".to_owned()),
            Just(" \n \n".to_owned()),
        ];
        prop::collection::vec(token, 0..80).prop_map(|toks| toks.join(" "))
    }

    proptest! {
        #[test]
        fn filter_soundness_and_reindexing(raw in text_strategy()) {
            let paras = segment_text(&raw);
            for (i, p) in paras.iter().enumerate() {
                prop_assert_eq!(p.index, i);
                prop_assert!(p.word_count >= MIN_WORDS);
                prop_assert_eq!(p.word_count, word_count(&p.text));
                prop_assert!(!p.text.contains("\n\n"));
                prop_assert_eq!(p.text.trim(), p.text.as_str());
            }
        }

        #[test]
        fn resegmenting_joined_output_is_idempotent(raw in text_strategy()) {
            let paras = segment_text(&raw);
            let joined = paras.iter().map(|p| p.text.as_str()).collect::<Vec<_>>().join("\n\n");
            prop_assert_eq!(segment_text(&joined), paras);
        }

        #[test]
        fn order_is_preserved(raw in text_strategy()) {
            let paras = segment_text(&raw);
            let normalized = raw.replace("\r\n", "\n");
            let mut cursor = 0;
            for p in &paras {
                let pos = normalized[cursor..].find(&p.text);
                prop_assert!(pos.is_some());
                cursor += pos.unwrap() + p.text.len();
            }
        }
    }
}
