//! Rate-limited, retrying access to the Arxiv query endpoint.

use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use tracing::{debug, warn};

use crate::feed::{parse_feed, ArxivEntry};
use crate::ArxivError;

pub const DEFAULT_ENDPOINT: &str = "http://export.arxiv.org/api/query";
pub const MIN_INTERVAL: Duration = Duration::from_secs(3);
pub const MAX_RETRIES: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: Vec<u8>,
}

/// Network failure below the HTTP layer; these are retried.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct TransportError(pub String);

pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<Response, TransportError>;
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn get(&self, url: &str) -> Result<Response, TransportError> {
        (**self).get(url)
    }
}

/// Plain HTTP transport.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self { agent }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(30))
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<Response, TransportError> {
        let mut resp = self.agent.get(url).call().map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_vec()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(Response { status, body })
    }
}

/// Serves feeds from a directory: `<slug>.xml` for the request's
/// `search_query`, falling back to `default.xml`.
#[derive(Debug, Clone)]
pub struct FixtureTransport {
    dir: PathBuf,
}

impl FixtureTransport {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &std::path::Path {
        &self.dir
    }
}

/// File-name slug for a query string.
pub fn fixture_slug(search_query: &str) -> String {
    let mut slug: String = search_query
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    slug.truncate(100);
    slug
}

fn query_param<'a>(url: &'a str, key: &str) -> Option<&'a str> {
    let query = url.split_once('?')?.1;
    query.split('&').find_map(|kv| {
        let (k, v) = kv.split_once('=')?;
        (k == key).then_some(v)
    })
}

impl Transport for FixtureTransport {
    fn get(&self, url: &str) -> Result<Response, TransportError> {
        let slug = query_param(url, "search_query").map(fixture_slug).unwrap_or_default();
        let specific = self.dir.join(format!("{slug}.xml"));
        let path = if !slug.is_empty() && specific.is_file() {
            specific
        } else {
            self.dir.join("default.xml")
        };
        debug!(path = %path.display(), "serving fixture");
        let body = fs::read(&path).map_err(|e| TransportError(format!("{}: {e}", path.display())))?;
        Ok(Response { status: 200, body })
    }
}

pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

impl<C: Clock + ?Sized> Clock for Arc<C> {
    fn now(&self) -> Duration {
        (**self).now()
    }
    fn sleep(&self, d: Duration) {
        (**self).sleep(d)
    }
}

#[derive(Debug, Clone)]
pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
    fn sleep(&self, d: Duration) {
        std::thread::sleep(d)
    }
}

/// Virtual clock: `sleep` advances time instantly and is recorded.
#[derive(Debug, Default)]
pub struct MockClock {
    now: Mutex<Duration>,
    sleeps: Mutex<Vec<Duration>>,
}

impl MockClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, d: Duration) {
        *self.now.lock().unwrap() += d;
    }

    pub fn sleeps(&self) -> Vec<Duration> {
        self.sleeps.lock().unwrap().clone()
    }
}

impl Clock for MockClock {
    fn now(&self) -> Duration {
        *self.now.lock().unwrap()
    }
    fn sleep(&self, d: Duration) {
        self.sleeps.lock().unwrap().push(d);
        *self.now.lock().unwrap() += d;
    }
}

/// Enforces a minimum spacing between consecutive requests.
#[derive(Debug, Clone)]
pub struct RateLimiter {
    interval: Duration,
    last: Option<Duration>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        Self { interval, last: None }
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Blocks until a request may be issued and marks it as issued.
    pub fn acquire(&mut self, clock: &dyn Clock) -> Duration {
        if let Some(last) = self.last {
            let ready = last + self.interval;
            let now = clock.now();
            if now < ready {
                clock.sleep(ready - now);
            }
        }
        let t = clock.now();
        self.last = Some(t);
        t
    }
}

/// Percent-encodes the characters of an already translated query that
/// would otherwise break the URL.
pub fn encode_search_query(q: &str) -> String {
    let mut out = String::with_capacity(q.len());
    for c in q.chars() {
        match c {
            ' ' => out.push('+'),
            '(' => out.push_str("%28"),
            ')' => out.push_str("%29"),
            '"' => out.push_str("%22"),
            '&' => out.push_str("%26"),
            '#' => out.push_str("%23"),
            _ => out.push(c),
        }
    }
    out
}

pub fn query_url(endpoint: &str, search_query: &str, max_results: usize) -> String {
    format!(
        "{endpoint}?search_query={}&start=0&max_results={max_results}",
        encode_search_query(search_query)
    )
}

pub struct ArxivClient {
    transport: Box<dyn Transport>,
    clock: Box<dyn Clock>,
    limiter: Mutex<RateLimiter>,
    endpoint: String,
    backoff: Duration,
}

impl ArxivClient {
    pub fn new(transport: impl Transport + 'static, clock: impl Clock + 'static) -> Self {
        Self {
            transport: Box::new(transport),
            clock: Box::new(clock),
            limiter: Mutex::new(RateLimiter::new(MIN_INTERVAL)),
            endpoint: DEFAULT_ENDPOINT.to_owned(),
            backoff: Duration::from_secs(1),
        }
    }

    pub fn http() -> Self {
        Self::new(HttpTransport::default(), SystemClock::default())
    }

    /// Fixture-backed client. Nothing reaches the API, so requests are neither
    /// spaced nor delayed between retries.
    pub fn offline(dir: impl Into<PathBuf>) -> Self {
        Self::new(FixtureTransport::new(dir), SystemClock::default())
            .with_interval(Duration::ZERO)
            .with_backoff(Duration::ZERO)
    }

    pub fn with_endpoint(mut self, endpoint: impl Into<String>) -> Self {
        self.endpoint = endpoint.into();
        self
    }

    /// Base delay before the first retry; doubles on each further attempt.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn with_interval(self, interval: Duration) -> Self {
        *self.limiter.lock().unwrap() = RateLimiter::new(interval);
        self
    }

    /// Runs one search and returns at most `max_results` entries.
    pub fn fetch(&self, search_query: &str, max_results: usize) -> Result<Vec<ArxivEntry>, ArxivError> {
        if max_results == 0 {
            return Err(ArxivError::InvalidArgument("max_results must be positive".into()));
        }
        let url = query_url(&self.endpoint, search_query, max_results);
        // Holding the limiter for the whole exchange keeps requests strictly serial.
        let mut limiter = self.limiter.lock().unwrap_or_else(|e| e.into_inner());
        let mut attempt = 0;
        let response = loop {
            limiter.acquire(self.clock.as_ref());
            match self.transport.get(&url) {
                Ok(r) => break r,
                Err(e) if attempt < MAX_RETRIES => {
                    let delay = self.backoff * 2u32.pow(attempt);
                    warn!(%url, attempt, error = %e, "request failed, retrying");
                    self.clock.sleep(delay);
                    attempt += 1;
                }
                Err(e) => {
                    return Err(ArxivError::Network {
                        attempts: attempt + 1,
                        message: e.0,
                    })
                }
            }
        };
        drop(limiter);
        if response.status != 200 {
            return Err(ArxivError::Status(response.status));
        }
        let mut feed = parse_feed(&response.body)?;
        if feed.skipped > 0 {
            warn!(skipped = feed.skipped, "entries without id were skipped");
        }
        feed.entries.truncate(max_results);
        Ok(feed.entries)
    }
}
