//! Generation-quality metrics and score retention.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Duration;

use parking_lot::{Condvar, Mutex};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::Histogram;

/// Spelling gate: below this spelling score grammaticality is zero.
pub const SPELLING_GATE: f64 = 0.5;

/// Frequency-ordered word list, one word per line.
#[derive(Debug, Clone, Default)]
pub struct WordList {
    ordered: Vec<String>,
    set: HashSet<String>,
}

impl WordList {
    pub fn from_text(text: &str) -> Self {
        let ordered: Vec<String> = text
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        let set = ordered.iter().cloned().collect();
        WordList { ordered, set }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(WordList::from_text(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.set.contains(word)
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// Words in frequency order.
    pub fn words(&self) -> &[String] {
        &self.ordered
    }
}

fn edge_punctuation() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[\p{P}\p{S}]+|[\p{P}\p{S}]+$").expect("valid regex"))
}

/// Lowercased whitespace-delimited words longer than one character, with
/// surrounding punctuation removed (interior apostrophes and hyphens stay).
pub fn spelling_words(generation: &str) -> Vec<String> {
    generation
        .split_whitespace()
        .map(|w| edge_punctuation().replace_all(w, "").to_lowercase())
        .filter(|w| w.chars().count() > 1)
        .collect()
}

/// Fraction of qualifying words found in `wordlist`; 0 without any.
pub fn spelling_score(generation: &str, wordlist: &WordList) -> f64 {
    let words = spelling_words(generation);
    if words.is_empty() {
        return 0.0;
    }
    words.iter().filter(|w| wordlist.contains(w)).count() as f64 / words.len() as f64
}

pub fn word_count(generation: &str) -> usize {
    generation.split_whitespace().count()
}

/// `1 - mistakes / words`, floored at 0, and forced to 0 when the spelling
/// score is under the gate.
pub fn grammaticality_score(mistakes: usize, words: usize, spelling: f64) -> Result<f64> {
    if words == 0 {
        return Err(Error::invalid(
            "grammaticality of a generation without words",
        ));
    }
    if spelling < SPELLING_GATE {
        return Ok(0.0);
    }
    Ok((1.0 - mistakes as f64 / words as f64).max(0.0))
}

/// Alternative score as a percentage of the canonical score.
pub fn retention(canon: f64, alt: f64) -> Result<f64> {
    if canon.is_nan() || canon <= 0.0 {
        return Err(Error::invalid(format!(
            "retention needs a positive canonical score, got {canon}"
        )));
    }
    Ok(100.0 * alt / canon)
}

/// Counts grammar mistakes in a text.
pub trait GrammarProvider: Send + Sync {
    fn count_mistakes(&self, text: &str) -> Result<usize>;
}

/// Mistake counts supplied up front, keyed by text.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedGrammar {
    counts: std::collections::HashMap<String, usize>,
}

impl PrecomputedGrammar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, text: impl Into<String>, mistakes: usize) {
        self.counts.insert(text.into(), mistakes);
    }
}

impl GrammarProvider for PrecomputedGrammar {
    fn count_mistakes(&self, text: &str) -> Result<usize> {
        self.counts
            .get(text)
            .copied()
            .ok_or_else(|| Error::Provider("no precomputed mistake count for text".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarEndpoint {
    pub url: String,
    #[serde(with = "secs")]
    pub timeout: Duration,
    pub max_in_flight: usize,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Duration::try_from_secs_f64(secs).map_err(serde::de::Error::custom)
    }
}

/// HTTP grammar service client. The request body is the plain text; the
/// response is either a bare integer, `{"mistakes": n}`, or a
/// LanguageTool-style `{"matches": [...]}` whose length is the count.
pub struct HttpGrammar {
    endpoint: GrammarEndpoint,
    client: reqwest::blocking::Client,
    in_flight: Mutex<usize>,
    slot_free: Condvar,
}

impl HttpGrammar {
    pub fn new(endpoint: GrammarEndpoint) -> Result<Self> {
        if endpoint.max_in_flight == 0 {
            return Err(Error::invalid("max_in_flight must be at least 1"));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(endpoint.timeout)
            .build()
            .map_err(|e| Error::Provider(e.to_string()))?;
        Ok(HttpGrammar {
            endpoint,
            client,
            in_flight: Mutex::new(0),
            slot_free: Condvar::new(),
        })
    }

    fn acquire(&self) {
        let mut n = self.in_flight.lock();
        while *n >= self.endpoint.max_in_flight {
            self.slot_free.wait(&mut n);
        }
        *n += 1;
    }

    fn release(&self) {
        *self.in_flight.lock() -= 1;
        self.slot_free.notify_one();
    }

    fn request(&self, text: &str) -> Result<usize> {
        let response = self
            .client
            .post(&self.endpoint.url)
            .header("content-type", "text/plain; charset=utf-8")
            .body(text.to_string())
            .send()
            .map_err(|e| Error::Provider(e.to_string()))?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| Error::Provider(e.to_string()))?;
        if !status.is_success() {
            return Err(Error::Provider(format!("{status}: {body}")));
        }
        parse_mistake_count(&body)
    }
}

impl GrammarProvider for HttpGrammar {
    fn count_mistakes(&self, text: &str) -> Result<usize> {
        self.acquire();
        let result = self.request(text);
        self.release();
        result
    }
}

pub fn parse_mistake_count(body: &str) -> Result<usize> {
    let bad = || Error::Provider(format!("unrecognised grammar response: {body}"));
    let value: serde_json::Value = serde_json::from_str(body.trim()).map_err(|_| bad())?;
    if let Some(n) = value.as_u64() {
        return Ok(n as usize);
    }
    if let Some(n) = value.get("mistakes").and_then(serde_json::Value::as_u64) {
        return Ok(n as usize);
    }
    if let Some(matches) = value.get("matches").and_then(serde_json::Value::as_array) {
        return Ok(matches.len());
    }
    Err(bad())
}

/// Scores of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationScore {
    pub id: String,
    pub spelling: f64,
    pub words: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mistakes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grammaticality: Option<f64>,
}

/// Score one generation; grammaticality is left out when no mistake count is
/// available.
pub fn score_generation(
    id: &str,
    generation: &str,
    wordlist: &WordList,
    mistakes: Option<usize>,
) -> GenerationScore {
    let spelling = spelling_score(generation, wordlist);
    let words = word_count(generation);
    let grammaticality = match mistakes {
        Some(m) if words > 0 => Some(grammaticality_score(m, words, spelling).expect("words > 0")),
        Some(_) => Some(0.0),
        None => None,
    };
    GenerationScore {
        id: id.to_string(),
        spelling,
        words,
        mistakes,
        grammaticality,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MetricReport {
    pub records: usize,
    pub spelling: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grammaticality: Option<f64>,
    pub word_count: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub retention: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_ratio_histogram: Option<Histogram>,
}

impl MetricReport {
    /// Means over `scores`. Grammaticality is averaged over the records that
    /// have it and omitted when none do.
    pub fn from_scores(scores: &[GenerationScore]) -> Self {
        let records = scores.len();
        let spelling = if records == 0 {
            0.0
        } else {
            scores.iter().map(|s| s.spelling).sum::<f64>() / records as f64
        };
        let graded: Vec<f64> = scores.iter().filter_map(|s| s.grammaticality).collect();
        let grammaticality =
            (!graded.is_empty()).then(|| graded.iter().sum::<f64>() / graded.len() as f64);
        MetricReport {
            records,
            spelling,
            grammaticality,
            word_count: scores.iter().map(|s| s.words).sum(),
            retention: BTreeMap::new(),
            length_ratio_histogram: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;
    use std::thread;

    use super::*;

    fn list(words: &[&str]) -> WordList {
        WordList::from_text(&words.join("\n"))
    }

    #[test]
    fn spelling_counts_multi_char_words() {
        let wl = list(&["hello", "world", "i"]);
        assert_eq!(spelling_score("Hello, world!", &wl), 1.0);
        assert_eq!(spelling_score("hello wrld", &wl), 0.5);
        // single characters are ignored entirely
        assert_eq!(spelling_score("I a hello", &wl), 1.0);
        assert_eq!(spelling_score("", &wl), 0.0);
        assert_eq!(spelling_score("a b c", &wl), 0.0);
    }

    #[test]
    fn interior_punctuation_is_kept() {
        assert_eq!(
            spelling_words("\"don't\" well-known (x) «mot»"),
            ["don't", "well-known", "mot"]
        );
    }

    #[test]
    fn grammaticality_formula_and_gate() {
        assert_eq!(grammaticality_score(0, 20, 0.9).unwrap(), 1.0);
        assert_eq!(grammaticality_score(5, 20, 0.9).unwrap(), 0.75);
        assert_eq!(grammaticality_score(0, 20, 0.3).unwrap(), 0.0);
        assert_eq!(grammaticality_score(30, 20, 0.9).unwrap(), 0.0);
        assert_eq!(grammaticality_score(0, 20, 0.5).unwrap(), 1.0);
        assert!(grammaticality_score(0, 0, 0.9).is_err());
    }

    #[test]
    fn retention_percentages() {
        assert!((retention(86.4, 84.6).unwrap() - 97.9167).abs() < 1e-3);
        assert!((retention(50.0, 46.3).unwrap() - 92.6).abs() < 1e-9);
        assert_eq!(retention(42.0, 42.0).unwrap(), 100.0);
        assert!(retention(0.0, 1.0).is_err());
        assert!(retention(-1.0, 1.0).is_err());
    }

    #[test]
    fn mistake_count_formats() {
        assert_eq!(parse_mistake_count("3").unwrap(), 3);
        assert_eq!(parse_mistake_count(r#"{"mistakes": 2}"#).unwrap(), 2);
        assert_eq!(
            parse_mistake_count(r#"{"matches": [{}, {}, {}, {}]}"#).unwrap(),
            4
        );
        assert!(parse_mistake_count("nope").is_err());
    }

    #[test]
    fn report_omits_missing_grammaticality() {
        let wl = list(&["good", "text"]);
        let scores = vec![
            score_generation("a", "good text", &wl, None),
            score_generation("b", "bad txet", &wl, None),
        ];
        let report = MetricReport::from_scores(&scores);
        assert_eq!(report.spelling, 0.5);
        assert_eq!(report.grammaticality, None);
        let json = serde_json::to_string(&report).unwrap();
        assert!(!json.contains("grammaticality"));
    }

    fn serve(responses: usize, peak: Arc<AtomicUsize>) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let active = Arc::new(AtomicUsize::new(0));
        thread::spawn(move || {
            for stream in listener.incoming().take(responses) {
                let mut stream = stream.unwrap();
                let active = Arc::clone(&active);
                let peak = Arc::clone(&peak);
                thread::spawn(move || {
                    let now = active.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(now, Ordering::SeqCst);
                    let mut reader = BufReader::new(stream.try_clone().unwrap());
                    let mut length = 0;
                    loop {
                        let mut line = String::new();
                        reader.read_line(&mut line).unwrap();
                        if line == "\r\n" {
                            break;
                        }
                        if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                            length = v.trim().parse().unwrap();
                        }
                    }
                    let mut body = vec![0; length];
                    reader.read_exact(&mut body).unwrap();
                    thread::sleep(Duration::from_millis(30));
                    let mistakes = String::from_utf8(body).unwrap().matches("teh").count();
                    let payload = format!("{{\"mistakes\": {mistakes}}}");
                    active.fetch_sub(1, Ordering::SeqCst);
                    write!(stream, "HTTP/1.1 200 OK\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}", payload.len()).unwrap();
                });
            }
        });
        format!("http://{addr}/check")
    }

    #[test]
    fn http_provider_counts_and_bounds_concurrency() {
        let peak = Arc::new(AtomicUsize::new(0));
        let url = serve(8, Arc::clone(&peak));
        let provider = Arc::new(
            HttpGrammar::new(GrammarEndpoint {
                url,
                timeout: Duration::from_secs(5),
                max_in_flight: 2,
            })
            .unwrap(),
        );
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let provider = Arc::clone(&provider);
                thread::spawn(move || provider.count_mistakes(&"teh ".repeat(i)).unwrap())
            })
            .collect();
        let counts: Vec<usize> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert_eq!(counts, (0..8).collect::<Vec<_>>());
        assert!(
            peak.load(Ordering::SeqCst) <= 2,
            "peak {}",
            peak.load(Ordering::SeqCst)
        );
    }

    #[test]
    fn http_provider_times_out() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/", listener.local_addr().unwrap());
        let _hold = thread::spawn(move || {
            let (_stream, _) = listener.accept().unwrap();
            thread::sleep(Duration::from_secs(2));
        });
        let provider = HttpGrammar::new(GrammarEndpoint {
            url,
            timeout: Duration::from_millis(200),
            max_in_flight: 1,
        })
        .unwrap();
        assert!(matches!(
            provider.count_mistakes("text"),
            Err(Error::Provider(_))
        ));
    }
}
