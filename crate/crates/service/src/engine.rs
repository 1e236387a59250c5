//! Search, facet, navigation and history operations over stored sessions.
//! Shared by the HTTP layer and the command-line tool.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use dataedron_arxiv::{contextual_sentence, to_entities, ArxivClient, ArxivEntry};
use dataedron_core::facet::{self, reference_view, ReducedFacet};
use dataedron_core::keyword::Tagger;
use dataedron_core::query::{parse, to_external_query};
use dataedron_core::schema::SchemaConfig;
use dataedron_core::{Corpus, ExtraNodeLayout, QueryHistory, SearchResult};
use serde::{Deserialize, Serialize};
use tracing::info;

use crate::store::{Params, Session, SessionStore};
use crate::ServiceError;

pub const DEFAULT_N: usize = 50;
pub const MAX_N: usize = 200;
pub const DEFAULT_W: usize = 10;
pub const MAX_W: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchRequest {
    pub query: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub w: Option<usize>,
    #[serde(default)]
    pub rho: Option<String>,
    /// Continue an existing session: its results are replaced and the query
    /// joins its history.
    #[serde(default)]
    pub session_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntrySummary {
    pub id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub categories: Vec<String>,
    pub sentence: String,
    pub abs_url: String,
    pub pdf_url: Option<String>,
    pub published: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub query: String,
    pub rho: String,
    pub params: Params,
    /// Types that can be shown as facets, the reference type included.
    pub facets: Vec<String>,
    pub history_id: Option<String>,
    pub entries: Vec<EntrySummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigateRequest {
    pub sid: String,
    pub alpha: String,
    pub selection: Vec<String>,
    pub target_alpha: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavigateResponse {
    pub facet: ReducedFacet,
    /// Reference values reached from the selection.
    pub values: BTreeSet<String>,
    /// Physical references involving the selection.
    pub sub_search: BTreeSet<String>,
}

type Now = Arc<dyn Fn() -> u64 + Send + Sync>;
type IdSource = Arc<dyn Fn() -> String + Send + Sync>;

fn system_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub struct Engine {
    store: SessionStore,
    client: ArxivClient,
    schema: SchemaConfig,
    tagger: Tagger,
    now: Now,
    ids: IdSource,
}

impl Engine {
    pub fn new(store: SessionStore, client: ArxivClient) -> Self {
        Self {
            store,
            client,
            schema: SchemaConfig::arxiv(),
            tagger: Tagger::default(),
            now: Arc::new(system_now),
            ids: Arc::new(|| uuid::Uuid::new_v4().simple().to_string()),
        }
    }

    pub fn with_schema(mut self, schema: SchemaConfig) -> Self {
        self.schema = schema;
        self
    }

    pub fn with_tagger(mut self, tagger: Tagger) -> Self {
        self.tagger = tagger;
        self
    }

    /// Replaces the millisecond clock used for timestamps.
    pub fn with_clock(mut self, now: impl Fn() -> u64 + Send + Sync + 'static) -> Self {
        self.now = Arc::new(now);
        self
    }

    pub fn with_id_source(mut self, ids: impl Fn() -> String + Send + Sync + 'static) -> Self {
        self.ids = Arc::new(ids);
        self
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }

    pub fn schema(&self) -> &SchemaConfig {
        &self.schema
    }

    fn default_rho(&self) -> String {
        self.schema.default_reference().unwrap_or("pubid").to_owned()
    }

    /// Types that may be requested as a facet under `rho`.
    pub fn facet_types(&self, rho: &str) -> Result<BTreeSet<String>, ServiceError> {
        let ctx = self
            .schema
            .context(rho)
            .map_err(|e| ServiceError::InvalidParams(e.to_string()))?;
        let mut types = ctx
            .navigation_hyperedge()
            .map_err(|e| ServiceError::InvalidParams(e.to_string()))?;
        types.insert(rho.to_owned());
        Ok(types)
    }

    pub fn search(&self, req: &SearchRequest) -> Result<SessionSummary, ServiceError> {
        let query = parse(&req.query)?;
        let n = req.n.unwrap_or(DEFAULT_N);
        let w = req.w.unwrap_or(DEFAULT_W);
        if !(1..=MAX_N).contains(&n) {
            return Err(ServiceError::InvalidParams(format!(
                "n must be in 1..={MAX_N}, got {n}"
            )));
        }
        if !(1..=MAX_W).contains(&w) {
            return Err(ServiceError::InvalidParams(format!(
                "w must be in 1..={MAX_W}, got {w}"
            )));
        }
        let rho = req.rho.clone().unwrap_or_else(|| self.default_rho());
        let facets = self.facet_types(&rho)?;
        let external = to_external_query(&query)?;

        if let Some(sid) = &req.session_id {
            if !self.store.exists(sid) {
                return Err(ServiceError::UnknownSession(sid.clone()));
            }
        }

        let entries = self.client.fetch(&external, n)?;
        let entities = to_entities(&entries, w, &self.tagger);
        let corpus = Corpus::new(self.schema.types.iter().cloned(), entities)?;
        let search = corpus.everything();
        let now = (self.now)();
        info!(query = %query, results = entries.len(), "search");

        let build = |mut session: Session| -> Result<(Session, String), ServiceError> {
            session.updated = now;
            session.params = Params { n, w };
            session.rho = rho.clone();
            session.query = query.print();
            session.search = search.clone();
            session.corpus = corpus.clone();
            session.entries = entries.clone();
            let hid = session.history.append(&query, now);
            self.store.save(&session)?;
            Ok((session, hid))
        };

        let (session, hid) = match &req.session_id {
            Some(sid) => self.store.with_lock(sid, || build(self.store.load(sid)?))?,
            None => {
                let id = (self.ids)();
                let fresh = Session {
                    id: id.clone(),
                    created: now,
                    updated: now,
                    params: Params { n, w },
                    rho: rho.clone(),
                    query: String::new(),
                    search: SearchResult::default(),
                    corpus: Corpus::new(self.schema.types.iter().cloned(), [])?,
                    entries: Vec::new(),
                    history: QueryHistory::new(id.clone()),
                };
                self.store.with_lock(&id, || build(fresh))?
            }
        };
        Ok(summarize(&session, facets, Some(hid)))
    }

    pub fn session(&self, sid: &str) -> Result<Session, ServiceError> {
        self.store.load(sid)
    }

    pub fn summary(&self, sid: &str) -> Result<SessionSummary, ServiceError> {
        let session = self.store.load(sid)?;
        let facets = self.facet_types(&session.rho)?;
        Ok(summarize(&session, facets, None))
    }

    fn check_navigable(&self, session: &Session, alpha: &str) -> Result<(), ServiceError> {
        if self.facet_types(&session.rho)?.contains(alpha) {
            Ok(())
        } else {
            Err(ServiceError::NotNavigable(alpha.to_owned()))
        }
    }

    fn facet_of(&self, session: &Session, alpha: &str) -> Result<ReducedFacet, ServiceError> {
        self.check_navigable(session, alpha)?;
        let f = if alpha == session.rho {
            reference_view(&session.corpus, &session.search, &session.rho)?
        } else {
            facet::facet(&session.corpus, &session.search, alpha, &session.rho)?
        };
        Ok(f)
    }

    /// Reduced facet of `alpha`; the reference view when `alpha` is the
    /// session's reference type.
    pub fn facet(&self, sid: &str, alpha: &str) -> Result<ReducedFacet, ServiceError> {
        let session = self.store.load(sid)?;
        self.facet_of(&session, alpha)
    }

    pub fn layout(&self, sid: &str, alpha: &str, t_min: f64, t_max: f64) -> Result<ExtraNodeLayout, ServiceError> {
        let f = self.facet(sid, alpha)?;
        f.hbgraph()
            .extra_node_layout(t_min, t_max)
            .map_err(|e| ServiceError::InvalidParams(e.to_string()))
    }

    pub fn navigate(&self, req: &NavigateRequest) -> Result<NavigateResponse, ServiceError> {
        let session = self.store.load(&req.sid)?;
        let source = self.facet_of(&session, &req.alpha)?;
        self.check_navigable(&session, &req.target_alpha)?;
        let selection: BTreeSet<String> = req.selection.iter().cloned().collect();
        let rho = &session.rho;

        if &req.target_alpha != rho {
            let nav = facet::navigate(&session.corpus, &source, &selection, &req.target_alpha)?;
            return Ok(NavigateResponse {
                facet: nav.facet,
                values: nav.values,
                sub_search: nav.sub_search,
            });
        }
        // Targeting the reference type: find the references through any other
        // type, then show the reference view restricted to them.
        let via = if &req.alpha != rho {
            req.alpha.clone()
        } else {
            self.facet_types(rho)?
                .into_iter()
                .find(|t| t != rho)
                .ok_or_else(|| ServiceError::NotNavigable(req.target_alpha.clone()))?
        };
        let nav = facet::navigate(&session.corpus, &source, &selection, &via)?;
        let sub = SearchResult::new(
            session
                .search
                .references()
                .iter()
                .filter(|r| nav.sub_search.contains(*r))
                .cloned(),
        )?;
        Ok(NavigateResponse {
            facet: reference_view(&session.corpus, &sub, rho)?,
            values: nav.values,
            sub_search: nav.sub_search,
        })
    }

    pub fn history(&self, sid: &str) -> Result<QueryHistory, ServiceError> {
        Ok(self.store.load(sid)?.history)
    }

    /// Appends the history of `other_sid` to that of `sid` and persists `sid`.
    pub fn merge_history(&self, sid: &str, other_sid: &str) -> Result<QueryHistory, ServiceError> {
        self.store.with_locks(sid, other_sid, || {
            let mut session = self.store.load(sid)?;
            let other = self.store.load(other_sid)?;
            session.history.merge(&other.history);
            session.updated = (self.now)();
            self.store.save(&session)?;
            Ok(session.history)
        })
    }
}

fn summarize(session: &Session, facets: BTreeSet<String>, history_id: Option<String>) -> SessionSummary {
    let terms: Vec<String> = parse(&session.query)
        .map(|q| q.term_counts().support().into_iter().collect())
        .unwrap_or_default();
    SessionSummary {
        session_id: session.id.clone(),
        query: session.query.clone(),
        rho: session.rho.clone(),
        params: session.params,
        facets: facets.into_iter().collect(),
        history_id,
        entries: session.entries.iter().map(|e| entry_summary(e, &terms)).collect(),
    }
}

fn entry_summary(e: &ArxivEntry, terms: &[String]) -> EntrySummary {
    EntrySummary {
        id: e.id.clone(),
        title: e.title.clone(),
        authors: e.authors.clone(),
        categories: e.categories.clone(),
        sentence: contextual_sentence(&e.abstract_text, terms),
        abs_url: e.abs_url.clone(),
        pdf_url: e.pdf_url.clone(),
        published: e.published.clone(),
    }
}
