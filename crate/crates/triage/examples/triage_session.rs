//! Prepares a triage state directory from a generated corpus and either
//! walks through the API in process or serves it.
//!
//! cargo run -p aspectmine-triage --example triage_session -- [STATE_DIR] [--serve PORT]

use std::path::PathBuf;
use std::sync::Arc;

use aspectmine::concepts::GroupedCallsConfig;
use aspectmine::facts::FilterConfig;
use aspectmine::fanin::FanInConfig;
use aspectmine::forge::{generate, Background, CallPlant, CorpusSpec, PlantSpec};
use aspectmine::redirect::RedirectionConfig;
use aspectmine::Report;
use aspectmine_triage::session::{report_file_name, REPORTS_DIR};
use aspectmine_triage::{router, Session};
use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use tower::ServiceExt;

async fn show(app: &axum::Router, method: &str, uri: &str, body: Option<serde_json::Value>) -> serde_json::Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    let req = req
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap_or_default();
    println!("{method} {uri} -> {status}");
    value
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let state = args
        .first()
        .filter(|a| !a.starts_with("--"))
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("aspectmine-triage-example"));
    let port = args
        .iter()
        .position(|a| a == "--serve")
        .map(|i| args.get(i + 1).map_or(Ok(8080), |p| p.parse()));

    let mut observer = CallPlant::new(18, 6);
    observer.callees = 2;
    let corpus = generate(
        &CorpusSpec {
            background: Background::default(),
            plants: vec![PlantSpec::ConsistentBehavior(observer), PlantSpec::redirection(8, 9)],
        },
        17,
    )?;
    let call = FilterConfig::call_analysis_default();
    let reports = [
        Report::fanin(&corpus.facts, &call, &FanInConfig::default())?,
        Report::grouped(&corpus.facts, &call, &GroupedCallsConfig::profile(1))?,
        Report::redirections(
            &corpus.facts,
            &FilterConfig::redirection_default(),
            &RedirectionConfig::default(),
        )?,
    ];
    std::fs::create_dir_all(state.join(REPORTS_DIR))?;
    for r in &reports {
        r.save(&state.join(REPORTS_DIR).join(report_file_name(&r.name)))?;
    }
    let app = router(Arc::new(Session::open(&state)?));

    if let Some(port) = port {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port?)).await?;
        println!("serving {} on http://{}", state.display(), listener.local_addr()?);
        axum::serve(listener, app).await?;
        return Ok(());
    }

    let page = show(&app, "GET", "/candidates/fanin?sort=caller_count", None).await;
    let first = &page["items"][0];
    println!(
        "  top candidate {} ({} callers, highlighted {})",
        first["callees"][0], first["caller_count"], first["highlighted"]
    );
    let id = first["id"].as_str().unwrap().to_string();
    let concern = &corpus.truth.concerns[0].callers;
    let label = serde_json::json!({ "verdict": "seed", "sort": "ConsistentBehavior", "valid_callers": concern });
    let saved = show(&app, "PUT", &format!("/candidate/{id}/label"), Some(label)).await;
    println!("  quality {}", saved["quality"]["percent"]);
    let refined = show(&app, "POST", "/combine/refine", None).await;
    println!("  {} with {} candidates", refined["name"], refined["candidate_count"]);
    let metrics = show(&app, "GET", "/metrics/fanin", None).await;
    println!("  precision {}", metrics["precision_display"]);
    println!("state kept in {}", state.display());
    Ok(())
}
