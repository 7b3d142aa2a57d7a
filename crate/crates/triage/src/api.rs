//! HTTP routes of the triage service.

use std::collections::BTreeSet;
use std::sync::Arc;

use aspectmine::assess::{compute_metrics, labeled_seeds, LabelError, SeedLabel, Verdict, ACCEPTANCE_BAR};
use aspectmine::combine::{intersect_fanin_grouped, refine_report, union_seeds};
use aspectmine::facts::Sort;
use aspectmine::redirect::RedirectionPair;
use aspectmine::{Candidate, Technique};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::session::{PutError, Session, UI_DIR};

pub type Shared = Arc<Session>;

const DEFAULT_PAGE_SIZE: usize = 50;
const MAX_PAGE_SIZE: usize = 1000;

const PLACEHOLDER_INDEX: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>aspectmine triage</title></head>
<body><h1>aspectmine triage</h1>
<p>No UI bundle is installed. Place one under <code>ui/</code> in the state directory.</p>
<ul><li><a href=\"/techniques\">/techniques</a></li><li><a href=\"/seeds\">/seeds</a></li></ul>
</body></html>
";

pub fn router(session: Shared) -> Router {
    let api = Router::new()
        .route("/techniques", get(techniques))
        .route("/candidates/{technique}", get(candidates))
        .route("/candidate/{id}", get(candidate))
        .route("/candidate/{id}/label", put(put_label))
        .route("/seeds", get(seeds))
        .route("/metrics/{scope}", get(metrics))
        .route("/combine/{mode}", post(combine));
    let ui = session.state_dir().join(UI_DIR);
    let api = if ui.join("index.html").exists() {
        api.fallback_service(ServeDir::new(ui))
    } else {
        api.route("/", get(|| async { Html(PLACEHOLDER_INDEX) }))
    };
    api.with_state(session)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn not_found(what: impl std::fmt::Display) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            body: json!({ "error": format!("{what} not found") }),
        }
    }

    fn unprocessable(error: impl std::fmt::Display, field: Option<&str>, element: Option<&str>) -> Self {
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({ "error": error.to_string(), "field": field, "element": element }),
        }
    }

    fn bad_request(error: impl std::fmt::Display) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": error.to_string() }),
        }
    }

    fn internal(error: impl std::fmt::Display) -> Self {
        log::error!("{error}");
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: json!({ "error": error.to_string() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Serialize)]
struct TechniqueSummary {
    name: String,
    technique: Technique,
    candidate_count: usize,
    fingerprint: String,
}

async fn techniques(State(s): State<Shared>) -> Json<Vec<TechniqueSummary>> {
    Json(s.with_reports(|reports| {
        reports
            .values()
            .map(|r| TechniqueSummary {
                name: r.name.clone(),
                technique: r.technique,
                candidate_count: r.candidates.len(),
                fingerprint: r.fingerprint.clone(),
            })
            .collect()
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ListQuery {
    sort: Option<String>,
    #[serde(default)]
    desc: Option<bool>,
    #[serde(default)]
    page: usize,
    page_size: Option<usize>,
}

#[derive(Serialize)]
struct CandidateSummary {
    id: String,
    kind: Technique,
    callees: Vec<String>,
    caller_count: usize,
    size: usize,
    pair_count: Option<usize>,
    verdict: Verdict,
    sort: Option<Sort>,
    quality: Option<String>,
    highlighted: bool,
}

#[derive(Serialize)]
struct CandidatePage {
    technique: String,
    total: usize,
    page: usize,
    page_size: usize,
    sort: String,
    items: Vec<CandidateSummary>,
}

fn pair_count(c: &Candidate) -> Option<usize> {
    match c {
        Candidate::Redirection(r) => Some(r.pairs.len()),
        _ => None,
    }
}

async fn candidates(
    State(s): State<Shared>,
    Path(technique): Path<String>,
    query: Result<Query<ListQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<CandidatePage> {
    let Query(q) = query.map_err(ApiError::bad_request)?;
    let page_size = q.page_size.unwrap_or(DEFAULT_PAGE_SIZE).clamp(1, MAX_PAGE_SIZE);
    let sort = q.sort.unwrap_or_else(|| "report".into());
    let (kind, mut rows) = s
        .with_report(&technique, |r| {
            (
                r.technique,
                r.candidates
                    .iter()
                    .map(|e| (e.id.clone(), e.candidate.clone()))
                    .collect::<Vec<_>>(),
            )
        })
        .ok_or_else(|| ApiError::not_found(format_args!("technique `{technique}`")))?;

    let key_desc = match sort.as_str() {
        "report" => None,
        "caller_count" => Some(true),
        "size" => Some(true),
        "pair_count" => Some(true),
        "id" => Some(false),
        other => return Err(ApiError::bad_request(format!("unknown sort key `{other}`"))),
    };
    if let Some(default_desc) = key_desc {
        let desc = q.desc.unwrap_or(default_desc);
        rows.sort_by(|(ia, a), (ib, b)| {
            let ord = match sort.as_str() {
                "caller_count" => a.callers().len().cmp(&b.callers().len()),
                "size" => a.size().cmp(&b.size()),
                "pair_count" => pair_count(a).cmp(&pair_count(b)),
                _ => std::cmp::Ordering::Equal,
            };
            let ord = if desc { ord.reverse() } else { ord };
            let id_ord = if sort == "id" && desc { ib.cmp(ia) } else { ia.cmp(ib) };
            ord.then(id_ord)
        });
    }

    let highlight = s.highlight_set(kind);
    let total = rows.len();
    let items = s.with_registry(|reg| {
        rows.into_iter()
            .skip(q.page.saturating_mul(page_size))
            .take(page_size)
            .map(|(id, c)| {
                let label = reg.get(&id);
                let quality = label.and_then(|l| aspectmine::assess::candidate_quality(&c, l).ok());
                CandidateSummary {
                    highlighted: c.callees().iter().any(|x| highlight.contains(*x)),
                    callees: c.callees().into_iter().map(str::to_string).collect(),
                    caller_count: c.callers().len(),
                    size: c.size(),
                    pair_count: pair_count(&c),
                    verdict: label.map_or(Verdict::Undecided, |l| l.verdict),
                    sort: label.and_then(|l| l.sort),
                    quality: quality.map(|q| q.to_string()),
                    kind,
                    id,
                }
            })
            .collect()
    });
    Ok(Json(CandidatePage {
        technique,
        total,
        page: q.page,
        page_size,
        sort,
        items,
    }))
}

#[derive(Serialize)]
struct QualityView {
    percent: String,
    value: aspectmine::Fraction,
    above_bar: bool,
}

impl QualityView {
    fn of(q: aspectmine::Fraction) -> Self {
        Self {
            percent: q.to_string(),
            above_bar: q.exceeds_percent(ACCEPTANCE_BAR),
            value: q,
        }
    }
}

#[derive(Serialize)]
struct CandidateDetail {
    id: String,
    reports: Vec<String>,
    candidate: Candidate,
    verdict: Verdict,
    label: Option<SeedLabel>,
    quality: Option<QualityView>,
    history_len: usize,
    acceptance_bar: u32,
}

async fn candidate(State(s): State<Shared>, Path(id): Path<String>) -> ApiResult<CandidateDetail> {
    let c = s
        .candidate(&id)
        .ok_or_else(|| ApiError::not_found(format_args!("candidate `{id}`")))?;
    let (label, history_len) = s.with_registry(|reg| (reg.get(&id).cloned(), reg.history(&id).len()));
    let quality = label
        .as_ref()
        .and_then(|l| aspectmine::assess::candidate_quality(&c, l).ok())
        .map(QualityView::of);
    Ok(Json(CandidateDetail {
        reports: s.reports_of(&id),
        verdict: label.as_ref().map_or(Verdict::Undecided, |l| l.verdict),
        candidate: c,
        label,
        quality,
        history_len,
        acceptance_bar: ACCEPTANCE_BAR,
        id,
    }))
}

/// Body of `PUT /candidate/{id}/label`; the id comes from the path.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelPayload {
    #[serde(default)]
    candidate_id: Option<String>,
    verdict: Verdict,
    #[serde(default)]
    sort: Option<Sort>,
    #[serde(default)]
    valid_callers: BTreeSet<String>,
    #[serde(default)]
    relevant_callees: BTreeSet<String>,
    #[serde(default)]
    valid_pairs: BTreeSet<RedirectionPair>,
    #[serde(default)]
    note: String,
}

#[derive(Serialize)]
struct LabelResponse {
    label: SeedLabel,
    quality: Option<QualityView>,
}

async fn put_label(State(s): State<Shared>, Path(id): Path<String>, body: Bytes) -> ApiResult<LabelResponse> {
    let payload: LabelPayload = serde_json::from_slice(&body).map_err(|e| {
        let field = e.to_string().split('`').nth(1).map(str::to_string);
        ApiError::unprocessable(format!("invalid label: {e}"), field.as_deref(), None)
    })?;
    if payload.candidate_id.as_ref().is_some_and(|c| *c != id) {
        return Err(ApiError::unprocessable(
            "candidate_id differs from the path",
            Some("candidate_id"),
            None,
        ));
    }
    let label = SeedLabel {
        candidate_id: id.clone(),
        verdict: payload.verdict,
        sort: payload.sort,
        valid_callers: payload.valid_callers,
        relevant_callees: payload.relevant_callees,
        valid_pairs: payload.valid_pairs,
        note: payload.note,
        timestamp: Some(chrono::Utc::now()),
    };
    match s.put_label(label) {
        Ok((label, quality)) => Ok(Json(LabelResponse {
            label,
            quality: quality.map(QualityView::of),
        })),
        Err(PutError::Label(LabelError::UnknownCandidate(_))) => {
            Err(ApiError::not_found(format_args!("candidate `{id}`")))
        }
        Err(PutError::Label(e @ LabelError::MissingSort(_))) => Err(ApiError::unprocessable(&e, Some("sort"), None)),
        Err(PutError::Label(LabelError::ForeignElement {
            candidate,
            field,
            element,
        })) => Err(ApiError::unprocessable(
            format!("{field} of `{candidate}` names `{element}`, which is not part of the candidate"),
            Some(field),
            Some(&element),
        )),
        Err(e) => Err(ApiError::internal(e)),
    }
}

#[derive(Serialize)]
struct SeedView {
    candidate_id: String,
    sort: Option<Sort>,
    note: String,
    reports: Vec<String>,
    quality: Option<String>,
}

#[derive(Serialize)]
struct SeedsView {
    count: usize,
    seeds: Vec<SeedView>,
}

async fn seeds(State(s): State<Shared>) -> Json<SeedsView> {
    let labels: Vec<SeedLabel> = s.with_registry(|reg| reg.seeds().cloned().collect());
    let seeds: Vec<SeedView> = labels
        .into_iter()
        .map(|l| {
            let quality = s
                .candidate(&l.candidate_id)
                .and_then(|c| aspectmine::assess::candidate_quality(&c, &l).ok())
                .map(|q| q.to_string());
            SeedView {
                reports: s.reports_of(&l.candidate_id),
                candidate_id: l.candidate_id,
                sort: l.sort,
                note: l.note,
                quality,
            }
        })
        .collect();
    Json(SeedsView {
        count: seeds.len(),
        seeds,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnionQuery {
    /// Comma-separated report names; all non-combined reports by default.
    of: Option<String>,
}

fn union_of(s: &Session, names: &[String]) -> Result<Value, ApiError> {
    s.with_reports(|reports| {
        let mut sets = Vec::new();
        for n in names {
            let r = reports
                .get(n)
                .ok_or_else(|| ApiError::not_found(format_args!("report `{n}`")))?;
            sets.push((n.clone(), s.with_registry(|reg| labeled_seeds(r, reg))));
        }
        serde_json::to_value(union_seeds(&sets)).map_err(ApiError::internal)
    })
}

fn base_reports(s: &Session) -> Vec<String> {
    s.with_reports(|reports| {
        reports
            .values()
            .filter(|r| r.technique != Technique::Combined)
            .map(|r| r.name.clone())
            .collect()
    })
}

fn split_names(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_string)
        .collect()
}

async fn metrics(
    State(s): State<Shared>,
    Path(scope): Path<String>,
    query: Result<Query<UnionQuery>, axum::extract::rejection::QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let Query(q) = query.map_err(ApiError::bad_request)?;
    if scope == "union" {
        let names = q.of.as_deref().map(split_names).unwrap_or_else(|| base_reports(&s));
        return union_of(&s, &names).map(Json);
    }
    let m = s
        .with_report(&scope, |r| s.with_registry(|reg| compute_metrics(r, reg)))
        .ok_or_else(|| ApiError::not_found(format_args!("scope `{scope}`")))?;
    Ok(Json(serde_json::to_value(m).map_err(ApiError::internal)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CombineRequest {
    #[serde(default)]
    fanin: Option<String>,
    #[serde(default)]
    grouped: Option<String>,
    #[serde(default)]
    reports: Vec<String>,
}

async fn combine(State(s): State<Shared>, Path(mode): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let req: CombineRequest = if body.is_empty() {
        CombineRequest {
            fanin: None,
            grouped: None,
            reports: Vec::new(),
        }
    } else {
        serde_json::from_slice(&body)
            .map_err(|e| ApiError::unprocessable(format!("invalid request: {e}"), None, None))?
    };
    if mode == "union" {
        let names = if req.reports.is_empty() {
            base_reports(&s)
        } else {
            req.reports
        };
        return union_of(&s, &names).map(Json);
    }
    if mode != "intersect" && mode != "refine" {
        return Err(ApiError::not_found(format_args!("combination mode `{mode}`")));
    }
    let pick = |given: Option<String>, technique: Technique, field: &str| -> Result<String, ApiError> {
        if let Some(name) = given {
            return Ok(name);
        }
        let all: Vec<String> = s.with_reports(|r| {
            r.values()
                .filter(|r| r.technique == technique)
                .map(|r| r.name.clone())
                .collect()
        });
        match all.as_slice() {
            [one] => Ok(one.clone()),
            _ => Err(ApiError::unprocessable(
                format!("name the {field} report; {} are loaded", all.len()),
                Some(field),
                None,
            )),
        }
    };
    let fi_name = pick(req.fanin, Technique::Fanin, "fanin")?;
    let gc_name = pick(req.grouped, Technique::Grouped, "grouped")?;
    let fi = s
        .with_report(&fi_name, Clone::clone)
        .ok_or_else(|| ApiError::not_found(format_args!("report `{fi_name}`")))?;
    let gc = s
        .with_report(&gc_name, Clone::clone)
        .ok_or_else(|| ApiError::not_found(format_args!("report `{gc_name}`")))?;
    let combined = if mode == "intersect" {
        intersect_fanin_grouped(&fi, &gc)
    } else {
        refine_report(&fi, &gc)
    }
    .map_err(|e| ApiError::unprocessable(e, None, None))?;
    let summary = json!({
        "name": combined.name,
        "technique": combined.technique,
        "candidate_count": combined.candidates.len(),
    });
    s.add_report(combined).map_err(ApiError::internal)?;
    Ok(Json(summary))
}
