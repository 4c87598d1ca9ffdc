//! Label tokenizer: punctuation, camel-case and letter/digit splitting.

use crate::profile::TokenizerConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenList {
    pub label: String,
    pub tokens: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Lower,
    Upper,
    Digit,
    Other,
}

fn class(c: char) -> Class {
    if c.is_numeric() {
        Class::Digit
    } else if c.is_uppercase() {
        Class::Upper
    } else if c.is_lowercase() {
        Class::Lower
    } else {
        Class::Other
    }
}

fn split_camel(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    for i in 1..chars.len() {
        let (prev, cur) = (class(chars[i - 1]), class(chars[i]));
        let next = chars.get(i + 1).map(|c| class(*c));
        let boundary = match (prev, cur) {
            (Class::Lower, Class::Upper) => true,
            (Class::Digit, Class::Lower | Class::Upper) | (Class::Lower | Class::Upper, Class::Digit) => true,
            // End of an acronym run: "HTTPServer" splits before the "S".
            (Class::Upper, Class::Upper) => next == Some(Class::Lower),
            _ => false,
        };
        if boundary {
            out.push(chars[start..i].iter().collect());
            start = i;
        }
    }
    out.push(chars[start..].iter().collect());
}

pub fn tokenize(label: &str, cfg: &TokenizerConfig) -> TokenList {
    let text = if cfg.trim_whitespace { label.trim() } else { label };
    let chunks: Vec<&str> = if cfg.split_punctuation {
        text.split(|c: char| !c.is_alphanumeric()).collect()
    } else {
        text.split(char::is_whitespace).collect()
    };
    let mut pieces = Vec::new();
    for chunk in chunks.into_iter().filter(|c| !c.is_empty()) {
        if cfg.split_camel_case {
            split_camel(chunk, &mut pieces);
        } else {
            pieces.push(chunk.to_string());
        }
    }
    let tokens = pieces
        .into_iter()
        .filter(|t| !t.is_empty())
        .filter(|t| cfg.keep_numbers || !t.chars().all(char::is_numeric))
        .map(|t| if cfg.lowercase { t.to_lowercase() } else { t })
        .collect();
    TokenList {
        label: label.to_string(),
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s, &TokenizerConfig::default()).tokens
    }

    #[test]
    fn defaults() {
        assert_eq!(toks("CustomerInformationService"), ["customer", "information", "service"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("Order-Line 42"), ["order", "line", "42"]);
        assert_eq!(toks("HTTPServer"), ["http", "server"]);
        assert_eq!(toks("ISO9001Audit"), ["iso", "9001", "audit"]);
    }

    #[test]
    fn switches() {
        let mut cfg = TokenizerConfig { keep_numbers: false, ..TokenizerConfig::default() };
        assert_eq!(tokenize("Order 42", &cfg).tokens, ["order"]);
        cfg = TokenizerConfig::default();
        cfg.split_camel_case = false;
        assert_eq!(tokenize("OrderLine", &cfg).tokens, ["orderline"]);
        cfg.lowercase = false;
        cfg.split_punctuation = false;
        assert_eq!(tokenize(" Order-Line  x ", &cfg).tokens, ["Order-Line", "x"]);
    }

    proptest! {
        #[test]
        fn tokens_are_clean_and_idempotent(label in "[A-Za-z0-9 _.\\-äöüÄÖÜ]{0,40}") {
            let cfg = TokenizerConfig::default();
            for t in tokenize(&label, &cfg).tokens {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.chars().any(char::is_whitespace));
                prop_assert_eq!(tokenize(&t, &cfg).tokens, vec![t.clone()]);
            }
        }
    }
}
