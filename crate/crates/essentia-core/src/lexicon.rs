//! Small built-in lexica: number words for masking and a verb-form list
//! used to decide whether a phrase starts with a verb when no part-of-speech
//! tags were supplied with the input.

use std::collections::HashSet;
use std::sync::OnceLock;

/// English number words recognized by the NUM masking rule. Hyphenated
/// compounds ("twenty-two") are handled by the caller splitting on '-'.
const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    "hundred", "thousand", "million", "billion", "first", "second", "third", "fourth", "fifth",
    "sixth", "seventh", "eighth", "ninth", "tenth", "eleventh", "twelfth", "thirteenth",
    "fourteenth", "fifteenth", "sixteenth", "seventeenth", "eighteenth", "nineteenth",
    "twentieth", "thirtieth", "fortieth", "fiftieth", "sixtieth", "seventieth", "eightieth",
    "ninetieth", "hundredth", "thousandth", "millionth",
];

fn number_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| NUMBER_WORDS.iter().copied().collect())
}

/// True for a lowercased English number word ("two", "ninth", "hundred").
pub fn is_number_word(lower: &str) -> bool {
    number_set().contains(lower)
}

/// Inflected English verb forms, one per line, lowercase.
const VERB_DATA: &str = include_str!("../data/verbs.txt");

/// Lookup table of common English verb forms (all inflections). Used as the
/// fallback part-of-speech evidence for the verb-phrase filter.
#[derive(Debug, Clone)]
pub struct VerbLexicon {
    forms: HashSet<&'static str>,
}

impl VerbLexicon {
    /// The built-in lexicon, parsed once per process.
    pub fn builtin() -> &'static VerbLexicon {
        static LEX: OnceLock<VerbLexicon> = OnceLock::new();
        LEX.get_or_init(|| VerbLexicon {
            forms: VERB_DATA
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect(),
        })
    }

    /// True when the lowercased word is a known verb form.
    pub fn is_verb(&self, lower: &str) -> bool {
        self.forms.contains(lower)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_words_recognized() {
        for w in ["two", "twenty", "ninth", "hundred", "first"] {
            assert!(is_number_word(w), "{w}");
        }
        for w in ["tooth", "once", "none", "Two"] {
            assert!(!is_number_word(w), "{w}");
        }
    }

    #[test]
    fn verb_lexicon_contains_inflections() {
        let lex = VerbLexicon::builtin();
        for w in [
            "shrugged", "gotten", "recovered", "get", "gets", "getting", "got", "share",
            "shared", "sharing", "send", "sent", "book", "booked", "is", "are", "logged",
        ] {
            assert!(lex.is_verb(w), "{w} should be a verb form");
        }
        for w in ["fully", "economy", "crisis", "completely", "already", "the"] {
            assert!(!lex.is_verb(w), "{w} should not be a verb form");
        }
    }

    #[test]
    fn verb_lexicon_is_substantial() {
        assert!(VerbLexicon::builtin().len() > 1500);
    }
}
