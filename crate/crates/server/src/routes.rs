//! HTTP routes.
//!
//! | role      | routes |
//! |-----------|--------|
//! | anonymous | `/health`, `/assets/*`, `/api/extruders`, `/api/search`, `/api/parttree/*`, `/api/info-requests` |
//! | customer  | `/api/my/extruders`, `/api/solutions/*`, `/api/tickets`, `/api/spare-parts` |
//! | admin     | `/api/admin/*`, `/sparql` |

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header::{CONTENT_TYPE, ORIGIN};
use axum::http::{HeaderMap, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post, put};
use axum::{Extension, Json, Router};
use extrucat_core::annotation::{
    delete_extruder, extruder_iri, save_extruder, set_visible, Annotator, ExtruderSubmission, WriteMode,
};
use extrucat_core::cad::{CadSync, ImportRequest};
use extrucat_core::catalogue::{ExtruderView, InfoRequest, SearchParams};
use extrucat_core::rdf::iri;
use extrucat_core::rdf::vocab::{extruont, rdf};
use extrucat_core::sparql::{evaluate, parse_query};
use extrucat_core::technician::{extruder_of, HistoryEntry};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::auth::{gate, Principal, Role};
use crate::error::{ApiError, ApiJson};
use crate::state::SharedState;

/// Every route with the least role that may call it.
pub const ROUTES: &[(&str, &str, Role)] = &[
    ("GET", "/health", Role::Anonymous),
    ("GET", "/api/extruders", Role::Anonymous),
    ("GET", "/api/extruders/{id}", Role::Anonymous),
    ("POST", "/api/search", Role::Anonymous),
    ("GET", "/api/search/schema/{class}", Role::Anonymous),
    ("GET", "/api/parttree/{class}", Role::Anonymous),
    ("POST", "/api/info-requests", Role::Anonymous),
    ("GET", "/api/my/extruders", Role::Customer),
    ("GET", "/api/solutions/{component}", Role::Customer),
    ("POST", "/api/tickets", Role::Customer),
    ("POST", "/api/spare-parts", Role::Customer),
    ("GET", "/api/admin/extruders", Role::Admin),
    ("POST", "/api/admin/extruders", Role::Admin),
    ("PUT", "/api/admin/extruders/{id}", Role::Admin),
    ("PATCH", "/api/admin/extruders/{id}/visible", Role::Admin),
    ("DELETE", "/api/admin/extruders/{id}", Role::Admin),
    ("GET", "/api/admin/form-schema/{class}", Role::Admin),
    ("GET", "/api/admin/cad/documents", Role::Admin),
    ("POST", "/api/admin/cad/import", Role::Admin),
    ("POST", "/api/admin/sync", Role::Admin),
    ("GET", "/api/admin/info-requests", Role::Admin),
    ("POST", "/sparql", Role::Admin),
];

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/assets/{*path}", get(asset))
        .route("/api/extruders", get(list_extruders))
        .route("/api/extruders/{id}", get(show_extruder))
        .route("/api/search", post(search))
        .route("/api/search/schema/{class}", get(form_schema))
        .route("/api/parttree/{class}", get(part_tree))
        .route("/api/info-requests", post(submit_info_request))
        .route("/api/my/extruders", get(my_extruders))
        .route("/api/solutions/{component}", get(solutions))
        .route("/api/tickets", post(open_ticket))
        .route("/api/spare-parts", post(spare_part))
        .route("/api/admin/extruders", get(admin_extruders).post(create_extruder))
        .route(
            "/api/admin/extruders/{id}",
            put(replace_extruder).delete(remove_extruder),
        )
        .route("/api/admin/extruders/{id}/visible", patch(change_visibility))
        .route("/api/admin/form-schema/{class}", get(form_schema))
        .route("/api/admin/cad/documents", get(cad_documents))
        .route("/api/admin/cad/import", post(cad_import))
        .route("/api/admin/sync", post(cad_sync))
        .route("/api/admin/info-requests", get(list_info_requests))
        .route("/sparql", post(sparql))
        .fallback(|| async { ApiError::not_found("no such route") })
        .layer(middleware::from_fn_with_state(state.clone(), gate))
        .layer(middleware::from_fn_with_state(state.clone(), origin_check))
        .with_state(state)
}

/// Runs blocking work (store writes, outbound HTTP) off the async workers.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(ApiError::internal)?
}

/// Rejects browser requests from unlisted origins and answers CORS
/// preflights for listed ones. Requests without `Origin` pass untouched.
async fn origin_check(State(state): State<SharedState>, req: axum::extract::Request, next: Next) -> Response {
    let Some(origin) = req.headers().get(ORIGIN).cloned() else {
        return next.run(req).await;
    };
    let allowed = origin
        .to_str()
        .is_ok_and(|o| state.config.allowed_origins.iter().any(|a| a == o));
    if !allowed {
        return ApiError::new(StatusCode::FORBIDDEN, "origin_not_allowed", "origin not allowed").into_response();
    }
    let preflight = req.method() == Method::OPTIONS;
    let mut resp = if preflight {
        let mut r = StatusCode::NO_CONTENT.into_response();
        let h = r.headers_mut();
        h.insert(
            "access-control-allow-methods",
            HeaderValue::from_static("GET, POST, PUT, PATCH, DELETE"),
        );
        h.insert(
            "access-control-allow-headers",
            HeaderValue::from_static("authorization, content-type"),
        );
        h.insert("access-control-max-age", HeaderValue::from_static("600"));
        r
    } else {
        next.run(req).await
    };
    resp.headers_mut().insert("access-control-allow-origin", origin);
    resp.headers_mut().insert("vary", HeaderValue::from_static("origin"));
    resp
}

async fn health(State(state): State<SharedState>) -> Json<Value> {
    Json(json!({
        "status": "ok",
        "revision": state.store.revision(),
        "asset_problems": state.asset_problems,
    }))
}

async fn asset(State(state): State<SharedState>, Path(path): Path<String>) -> Result<Response, ApiError> {
    let bytes = state
        .assets
        .read(&path)
        .map_err(|e| ApiError::not_found(e.to_string()))?;
    let mime = match path.rsplit('.').next() {
        Some("gltf") => "model/gltf+json",
        Some("obj") => "model/obj",
        Some("stl") => "model/stl",
        Some("x3d") => "model/x3d+xml",
        _ => "application/octet-stream",
    };
    Ok(([(CONTENT_TYPE, mime)], bytes).into_response())
}

/// Accepts a local id (`E01`, `E01.M1`) or a full IRI.
fn instance_iri(id: &str) -> String {
    if id.contains(':') {
        id.to_owned()
    } else {
        extruder_iri(id)
    }
}

async fn list_extruders(State(state): State<SharedState>) -> Result<Json<Vec<ExtruderView>>, ApiError> {
    Ok(Json(state.catalogue.get_all_extruders(&state.store.snapshot())?))
}

async fn show_extruder(
    State(state): State<SharedState>,
    Extension(principal): Extension<Principal>,
    Path(id): Path<String>,
) -> Result<Json<ExtruderView>, ApiError> {
    let iri = instance_iri(&id);
    if state.cad.is_some() {
        let s = state.clone();
        blocking(move || {
            if let Some(report) = s.cad.as_ref().and_then(|c| c.sync_on_view(&s.store, None)) {
                log::info!("on-view sync: {} updated, {} failed", report.updated, report.failed);
            }
            Ok(())
        })
        .await?;
    }
    let view = state.catalogue.extruder_view(&state.store.snapshot(), &iri)?;
    if !view.visible && !principal.can(Role::Admin) {
        return Err(ApiError::not_found(format!("unknown extruder {iri}")));
    }
    Ok(Json(view))
}

async fn search(
    State(state): State<SharedState>,
    ApiJson(params): ApiJson<SearchParams>,
) -> Result<Json<Vec<ExtruderView>>, ApiError> {
    Ok(Json(state.catalogue.search(&state.ontology(), &params)?))
}

fn resolve_class(state: &SharedState, class: &str) -> Result<String, ApiError> {
    state
        .ontologies
        .config()
        .resolve(class)
        .map_err(|e| ApiError::bad_request(e.to_string()))
}

async fn form_schema(State(state): State<SharedState>, Path(class): Path<String>) -> Result<Response, ApiError> {
    let class = resolve_class(&state, &class)?;
    Ok(Json(state.ontology().derive_form_schema(&class)?).into_response())
}

async fn part_tree(State(state): State<SharedState>, Path(class): Path<String>) -> Result<Response, ApiError> {
    let class = resolve_class(&state, &class)?;
    Ok(Json(state.ontology().part_tree(&class)?).into_response())
}

async fn submit_info_request(
    State(state): State<SharedState>,
    ApiJson(request): ApiJson<InfoRequest>,
) -> Result<Response, ApiError> {
    let record = blocking(move || Ok(state.leads.submit(&state.store.snapshot(), &request)?)).await?;
    Ok((StatusCode::CREATED, Json(record)).into_response())
}

async fn list_info_requests(State(state): State<SharedState>) -> Result<Response, ApiError> {
    Ok(Json(state.leads.list()?).into_response())
}

fn customer_of(principal: &Principal) -> Result<&str, ApiError> {
    principal
        .customer
        .as_deref()
        .ok_or_else(|| ApiError::forbidden("token has no customer account"))
}

#[derive(Debug, Deserialize)]
struct CustomerQuery {
    customer: Option<String>,
}

/// Admins name the customer with `?customer=`.
async fn my_extruders(
    State(state): State<SharedState>,
    Extension(principal): Extension<Principal>,
    Query(query): Query<CustomerQuery>,
) -> Result<Response, ApiError> {
    let customer = match (principal.can(Role::Admin), query.customer.as_deref()) {
        (true, Some(c)) => c,
        (true, None) => return Err(ApiError::bad_request("admins must pass ?customer=")),
        (false, _) => customer_of(&principal)?,
    };
    let owned = state
        .technician
        .list_owned(&state.store.snapshot(), &state.catalogue, customer)?;
    Ok(Json(owned).into_response())
}

/// Customers reach only components of extruders they own; admins reach all.
fn check_component_access(state: &SharedState, principal: &Principal, component: &str) -> Result<(), ApiError> {
    let graph = state.store.snapshot();
    if extruder_of(&graph, component).is_none() {
        return Err(ApiError::not_found(format!("unknown component {component}")));
    }
    if principal.can(Role::Admin) {
        return Ok(());
    }
    let customer = customer_of(principal)?;
    if state.technician.owns_component(&graph, customer, component) {
        Ok(())
    } else {
        Err(ApiError::forbidden(format!(
            "customer {customer} does not own the extruder of {component}"
        )))
    }
}

async fn solutions(
    State(state): State<SharedState>,
    Extension(principal): Extension<Principal>,
    Path(component): Path<String>,
) -> Result<Response, ApiError> {
    let component = instance_iri(&component);
    check_component_access(&state, &principal, &component)?;
    Ok(Json(state.technician.solutions_for(&state.ontology(), &component)?).into_response())
}

#[derive(Debug, Deserialize)]
struct TicketBody {
    extruder: String,
    component: String,
    #[serde(default)]
    history: Vec<HistoryEntry>,
}

async fn open_ticket(
    State(state): State<SharedState>,
    Extension(principal): Extension<Principal>,
    ApiJson(body): ApiJson<TicketBody>,
) -> Result<Response, ApiError> {
    let customer = customer_of(&principal)?.to_owned();
    let ticket = blocking(move || {
        let graph = state.store.snapshot();
        Ok(state.technician.open_ticket(
            &graph,
            &customer,
            &body.extruder,
            &instance_iri(&body.component),
            body.history,
        )?)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(ticket)).into_response())
}

#[derive(Debug, Deserialize)]
struct SparePartBody {
    component: String,
    #[serde(default)]
    provider: Option<String>,
}

async fn spare_part(
    State(state): State<SharedState>,
    Extension(principal): Extension<Principal>,
    ApiJson(mut body): ApiJson<SparePartBody>,
) -> Result<Response, ApiError> {
    body.component = instance_iri(&body.component);
    check_component_access(&state, &principal, &body.component)?;
    let result = blocking(move || {
        let ontology = state.ontology();
        Ok(state
            .technician
            .request_spare_part(&ontology, &body.component, body.provider.as_deref())?)
    })
    .await?;
    Ok(Json(result).into_response())
}

async fn admin_extruders(State(state): State<SharedState>) -> Result<Json<Vec<ExtruderView>>, ApiError> {
    let graph = state.store.snapshot();
    let mut ids: Vec<String> = graph
        .subjects(rdf::TYPE, &iri(extruont::EXTRUDER))
        .into_iter()
        .filter_map(|t| t.as_iri().map(str::to_owned))
        .collect();
    ids.sort();
    Ok(Json(
        ids.iter()
            .filter_map(|id| state.catalogue.extruder_view(&graph, id).ok())
            .collect(),
    ))
}

fn save(state: &SharedState, submission: &ExtruderSubmission, mode: WriteMode) -> Result<Value, ApiError> {
    let ontology = state.ontology();
    let annotator = Annotator::new(&ontology)
        .with_irdi(&state.irdi)
        .with_assets(&state.assets);
    let outcome = save_extruder(&state.store, &annotator, submission, mode)?;
    serde_json::to_value(outcome).map_err(ApiError::internal)
}

async fn create_extruder(
    State(state): State<SharedState>,
    ApiJson(submission): ApiJson<ExtruderSubmission>,
) -> Result<Response, ApiError> {
    let outcome = blocking(move || save(&state, &submission, WriteMode::Create)).await?;
    Ok((StatusCode::CREATED, Json(outcome)).into_response())
}

async fn replace_extruder(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    ApiJson(submission): ApiJson<ExtruderSubmission>,
) -> Result<Response, ApiError> {
    if instance_iri(&id) != extruder_iri(&submission.local_id) {
        return Err(ApiError::bad_request(format!(
            "body local_id {} does not match {id}",
            submission.local_id
        )));
    }
    let outcome = blocking(move || {
        if !state.store.snapshot().contains(&extrucat_core::rdf::Triple::new(
            iri(instance_iri(&id)),
            iri(rdf::TYPE),
            iri(extruont::EXTRUDER),
        )) {
            return Err(ApiError::not_found(format!("unknown extruder {id}")));
        }
        save(&state, &submission, WriteMode::Replace)
    })
    .await?;
    Ok(Json(outcome).into_response())
}

#[derive(Debug, Deserialize)]
struct Visibility {
    visible: bool,
}

async fn change_visibility(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    ApiJson(body): ApiJson<Visibility>,
) -> Result<Response, ApiError> {
    let revision = blocking(move || {
        let visible_property = state.ontologies.config().visible_property.clone();
        Ok(set_visible(
            &state.store,
            &instance_iri(&id),
            body.visible,
            &visible_property,
        )?)
    })
    .await?;
    Ok(Json(json!({ "revision": revision, "visible": body.visible })).into_response())
}

async fn remove_extruder(State(state): State<SharedState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let report = blocking(move || Ok(delete_extruder(&state.store, &instance_iri(&id))?)).await?;
    Ok(Json(report).into_response())
}

fn cad(state: &SharedState) -> Result<&CadSync, ApiError> {
    state.cad.as_ref().ok_or_else(|| {
        ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "cad_not_configured",
            "no CAD platform configured",
        )
    })
}

async fn cad_documents(State(state): State<SharedState>) -> Result<Response, ApiError> {
    cad(&state)?;
    let docs = blocking(move || Ok(cad(&state)?.client().list_documents()?)).await?;
    Ok(Json(docs).into_response())
}

async fn cad_import(
    State(state): State<SharedState>,
    ApiJson(mut req): ApiJson<ImportRequest>,
) -> Result<Response, ApiError> {
    cad(&state)?;
    req.component = instance_iri(&req.component);
    let outcome = blocking(move || Ok(cad(&state)?.import(&state.store, &req)?)).await?;
    Ok(Json(outcome).into_response())
}

async fn cad_sync(State(state): State<SharedState>) -> Result<Response, ApiError> {
    cad(&state)?;
    let report = blocking(move || Ok(cad(&state)?.sync(&state.store)?)).await?;
    Ok(Json(report).into_response())
}

#[derive(Debug, Deserialize)]
struct SparqlBody {
    query: String,
}

/// Accepts `application/sparql-query` text or JSON `{"query": ...}` and
/// answers SPARQL JSON results.
async fn sparql(State(state): State<SharedState>, headers: HeaderMap, body: Bytes) -> Result<Response, ApiError> {
    let is_json = headers
        .get(CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let text = if is_json {
        serde_json::from_slice::<SparqlBody>(&body)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_json", e.to_string()))?
            .query
    } else {
        String::from_utf8(body.to_vec()).map_err(|_| ApiError::bad_request("query is not UTF-8"))?
    };
    let query = parse_query(&text)?;
    let solution = blocking(move || Ok(evaluate(&state.store.snapshot(), &query))).await?;
    let mut resp = Json(solution.to_sparql_json()).into_response();
    resp.headers_mut().insert(
        CONTENT_TYPE,
        HeaderValue::from_static("application/sparql-results+json"),
    );
    Ok(resp)
}
