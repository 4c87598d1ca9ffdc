//! Natural-language identification of label text behind a pluggable interface.

use std::sync::OnceLock;

/// Identifies the predominant natural language of a text.
pub trait LanguageDetector: Send + Sync {
    fn name(&self) -> &str;

    fn available(&self) -> bool {
        true
    }

    /// Language code (ISO 639-1 where one exists), or `None` when undecidable.
    fn detect(&self, text: &str) -> Option<String>;
}

/// N-gram detector backed by `lingua`, covering all of its bundled languages.
/// Language models are loaded lazily and shared across threads.
#[derive(Clone, Copy, Debug, Default)]
pub struct LinguaDetector;

fn shared() -> &'static lingua::LanguageDetector {
    static DETECTOR: OnceLock<lingua::LanguageDetector> = OnceLock::new();
    DETECTOR.get_or_init(|| lingua::LanguageDetectorBuilder::from_all_languages().build())
}

impl LanguageDetector for LinguaDetector {
    fn name(&self) -> &str {
        "lingua"
    }

    fn detect(&self, text: &str) -> Option<String> {
        shared()
            .detect_language_of(text)
            .map(|l| l.iso_code_639_1().to_string())
    }
}
