//! End-to-end flows over HTTP against a seeded server.

mod common;

use common::{TestServer, ADMIN, CUSTOMER, ORIGIN};
use extrucat_core::assets::sha256_hex;
use extrucat_core::cad::SyncMode;
use serde_json::{json, Value};

fn motor_submission(id: &str) -> Value {
    json!({
        "local_id": id,
        "name": "Roundtrip 900",
        "manufacturer": "Urola",
        "description": "Added over the API.",
        "batch": { "item_label": "0.5 l bottle", "size": 200.0 },
        "dimensions": { "width": 2.0, "height": 2.2, "length": 4.0 },
        "throughput": 900.0,
        "product": { "min_volume": 0.4, "max_volume": 0.6, "max_width": 0.08, "max_height": 0.25 },
        "components": [
            {
                "local_id": "M1",
                "component_type": "eo:ACMotor",
                "label": "Drive motor",
                "part_code": "URO-M-100",
                "features": [
                    { "measure_type": "om:Frequency", "unit": "om:hertz", "value": 60.0, "qualifier": "exact" },
                    { "measure_type": "om:ElectricPotential", "unit": "om:volt", "value": 230.0, "qualifier": "minimum" },
                    { "measure_type": "om:ElectricPotential", "unit": "om:volt", "value": 460.0, "qualifier": "maximum" }
                ]
            },
            { "local_id": "H1", "component_type": "eo:FeedHopper", "label": "Hopper", "part_code": "URO-FH-20" }
        ]
    })
}

fn property<'a>(view: &'a Value, component: &str, label: &str, qualifier: &str) -> Option<&'a Value> {
    view["parts"]
        .as_array()?
        .iter()
        .find(|p| p["id"].as_str().is_some_and(|id| id.ends_with(component)))?["properties"]
        .as_array()?
        .iter()
        .find(|p| p["label"] == label && p["qualifier"] == qualifier)
}

#[test]
fn annotate_import_and_read_back() {
    let server = TestServer::start_with(Some(SyncMode::Manual));

    let (status, schema) = server.call("GET", "/api/admin/form-schema/eo:ACMotor", Some(ADMIN), None);
    assert_eq!(status, 200);
    let measures: Vec<&str> = schema["allowed_measure_types"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["label"].as_str().unwrap())
        .collect();
    assert!(
        measures.contains(&"Frequency") && measures.contains(&"Electric potential"),
        "{measures:?}"
    );

    let (status, saved) = server.call(
        "POST",
        "/api/admin/extruders",
        Some(ADMIN),
        Some(&motor_submission("E10")),
    );
    assert_eq!(status, 201, "{saved}");
    let (status, _) = server.call(
        "POST",
        "/api/admin/extruders",
        Some(ADMIN),
        Some(&motor_submission("E10")),
    );
    assert_eq!(status, 409);

    let (status, docs) = server.call("GET", "/api/admin/cad/documents", Some(ADMIN), None);
    assert_eq!(status, 200);
    assert_eq!(docs.as_array().unwrap().len(), 2);
    let import = json!({
        "component": "E10.H1",
        "document": "urola-e01",
        "element": "hopper",
        "position": { "x": 0.0, "y": 0.0, "z": -1.0 }
    });
    let (status, outcome) = server.call("POST", "/api/admin/cad/import", Some(ADMIN), Some(&import));
    assert_eq!(status, 200, "{outcome}");

    let (status, view) = server.call("GET", "/api/extruders/E10", None, None);
    assert_eq!(status, 200);
    assert_eq!(property(&view, "M1", "Frequency", "exact").unwrap()["value"], 60.0);
    assert_eq!(
        property(&view, "M1", "Frequency", "exact").unwrap()["unit_symbol"],
        "Hz"
    );
    assert_eq!(
        property(&view, "M1", "Electric potential", "minimum").unwrap()["value"],
        230.0
    );
    assert_eq!(
        property(&view, "M1", "Electric potential", "maximum").unwrap()["value"],
        460.0
    );
    let hopper = view["parts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["id"].as_str().unwrap().ends_with("E10.H1"))
        .unwrap();
    let model = &hopper["model"];
    assert_eq!(model["position"], json!({ "x": 0.0, "y": 0.0, "z": -1.0 }));
    assert_eq!(model["viewable"], true);

    let (status, _, text) = server.raw(
        "GET",
        &format!("/assets/{}", model["file_path"].as_str().unwrap()),
        None,
        None,
        &[],
    );
    assert_eq!(status, 200);
    assert_eq!(sha256_hex(text.as_bytes()), model["checksum"].as_str().unwrap());
}

#[test]
fn edit_hide_and_delete() {
    let server = TestServer::start();
    server.call(
        "POST",
        "/api/admin/extruders",
        Some(ADMIN),
        Some(&motor_submission("E11")),
    );

    let mut changed = motor_submission("E11");
    changed["name"] = json!("Roundtrip 950");
    let (status, _) = server.call("PUT", "/api/admin/extruders/E11", Some(ADMIN), Some(&changed));
    assert_eq!(status, 200);
    assert_eq!(
        server.call("GET", "/api/extruders/E11", None, None).1["name"],
        "Roundtrip 950"
    );
    assert_eq!(
        server
            .call("PUT", "/api/admin/extruders/E12", Some(ADMIN), Some(&changed))
            .0,
        400
    );

    let hide = json!({ "visible": false });
    assert_eq!(
        server
            .call("PATCH", "/api/admin/extruders/E11/visible", Some(ADMIN), Some(&hide))
            .0,
        200
    );
    assert_eq!(server.call("GET", "/api/extruders/E11", None, None).0, 404);

    let (status, report) = server.call("DELETE", "/api/admin/extruders/E11", Some(ADMIN), None);
    assert_eq!(status, 200);
    assert!(report["removed"].as_u64().unwrap() > 10);
    assert_eq!(server.call("GET", "/api/extruders/E11", Some(ADMIN), None).0, 404);
    assert_eq!(
        server.call("DELETE", "/api/admin/extruders/E11", Some(ADMIN), None).0,
        404
    );
}

#[test]
fn invalid_submissions_list_the_fields() {
    let server = TestServer::start();
    let mut bad = motor_submission("E13");
    bad["throughput"] = json!(-1.0);
    bad["components"][0]["component_type"] = json!("eo:NoSuchClass");
    let (status, body) = server.call("POST", "/api/admin/extruders", Some(ADMIN), Some(&bad));
    assert_eq!(status, 422);
    assert_eq!(body["code"], "invalid_submission");
    let fields: Vec<&str> = body["details"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["field"].as_str().unwrap())
        .collect();
    assert!(fields.iter().any(|f| f.contains("throughput")), "{fields:?}");
    assert!(fields.iter().any(|f| f.contains("component_type")), "{fields:?}");
}

#[test]
fn search_and_leads() {
    let server = TestServer::start();
    let (status, hits) = server.call(
        "POST",
        "/api/search",
        None,
        Some(&json!({ "bottle_volume": { "value": 1.0, "unit": "om:litre" } })),
    );
    assert_eq!(status, 200);
    let ids: Vec<&str> = hits
        .as_array()
        .unwrap()
        .iter()
        .map(|h| h["local_id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["E01", "E02"]);

    let (status, body) = server.call("POST", "/api/search", None, Some(&json!({ "bottles_per_day": 5000.0 })));
    assert_eq!(status, 400);
    assert_eq!(body["details"][0]["field"], "bottles_per_day");

    let lead = json!({ "name": "Ana", "email": "ana@example.com", "extruder": "E01", "message": "Price?" });
    let (status, record) = server.call("POST", "/api/info-requests", None, Some(&lead));
    assert_eq!(status, 201, "{record}");
    let bad = json!({ "name": "Ana", "email": "nope", "extruder": "E01" });
    let (status, body) = server.call("POST", "/api/info-requests", None, Some(&bad));
    assert_eq!(status, 422);
    assert_eq!(body["details"][0]["field"], "email");
    let (_, leads) = server.call("GET", "/api/admin/info-requests", Some(ADMIN), None);
    assert_eq!(leads.as_array().unwrap().len(), 1);

    let (status, tree) = server.call("GET", "/api/parttree/eo:Extruder", None, None);
    assert_eq!(status, 200, "{tree}");
    assert_eq!(server.call("GET", "/api/parttree/eo:Nothing", None, None).0, 404);
}

#[test]
fn technician_flow() {
    let server = TestServer::start();
    let (status, solutions) = server.call("GET", "/api/solutions/E01.M1", Some(CUSTOMER), None);
    assert_eq!(status, 200);
    assert!(!solutions.as_array().unwrap().is_empty());

    let ticket = json!({
        "extruder": "E01",
        "component": "E01.M1",
        "history": [{ "action": "viewed-solution", "detail": "checked the fuse" }]
    });
    let (status, body) = server.call("POST", "/api/tickets", Some(CUSTOMER), Some(&ticket));
    assert_eq!(status, 201, "{body}");
    assert_eq!(body["status"], "open");

    let (status, result) = server.call(
        "POST",
        "/api/spare-parts",
        Some(CUSTOMER),
        Some(&json!({ "component": "E01.M1" })),
    );
    assert_eq!(status, 200, "{result}");
    assert_eq!(result["result"], "Order");
    assert_eq!(result["order"]["source"], "warehouse");

    let (status, body) = server.call(
        "POST",
        "/api/spare-parts",
        Some(CUSTOMER),
        Some(&json!({ "component": "E01.B1" })),
    );
    assert_eq!(status, 422);
    assert_eq!(body["code"], "missing_part_code");
}

#[test]
fn sparql_endpoint() {
    let server = TestServer::start();
    let q = "PREFIX eo: <http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#> SELECT ?e WHERE { ?e a eo:Extruder }";
    let (status, headers, text) = server.raw(
        "POST",
        "/sparql",
        Some(ADMIN),
        Some(("application/sparql-query", q.into())),
        &[],
    );
    assert_eq!(status, 200, "{text}");
    assert!(headers["content-type"]
        .to_str()
        .unwrap()
        .contains("sparql-results+json"));
    let body: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(body["head"]["vars"], json!(["e"]));
    assert_eq!(body["results"]["bindings"].as_array().unwrap().len(), 3);

    let (status, body) = server.call("POST", "/sparql", Some(ADMIN), Some(&json!({ "query": q })));
    assert_eq!(status, 200);
    assert_eq!(body["results"]["bindings"].as_array().unwrap().len(), 3);

    let (status, body) = server.call(
        "POST",
        "/sparql",
        Some(ADMIN),
        Some(&json!({ "query": "SELECT ?x WHERE {" })),
    );
    assert_eq!(status, 400);
    assert_eq!(body["code"], "invalid_query");
}

#[test]
fn error_envelope_for_malformed_json() {
    let server = TestServer::start();
    let (status, _, text) = server.raw(
        "POST",
        "/api/search",
        None,
        Some(("application/json", "{not json".into())),
        &[],
    );
    assert_eq!(status, 400);
    let body: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(body["code"], "invalid_json");
    assert!(body["message"].is_string());
    let (status, body) = server.call("GET", "/no/such/route", None, None);
    assert_eq!(status, 404);
    assert_eq!(body["code"], "not_found");
}

#[test]
fn origin_policy() {
    let server = TestServer::start();
    let (status, body) = server.call_with(
        "GET",
        "/api/extruders",
        None,
        None,
        &[("origin", "http://evil.example")],
    );
    assert_eq!(status, 403);
    assert_eq!(body["code"], "origin_not_allowed");

    let (status, headers, _) = server.raw("GET", "/api/extruders", None, None, &[("origin", ORIGIN)]);
    assert_eq!(status, 200);
    assert_eq!(headers["access-control-allow-origin"], ORIGIN);

    let preflight = [("origin", ORIGIN), ("access-control-request-method", "POST")];
    let (status, headers, _) = server.raw("OPTIONS", "/api/admin/extruders", None, None, &preflight);
    assert_eq!(status, 204);
    assert!(headers["access-control-allow-headers"]
        .to_str()
        .unwrap()
        .contains("authorization"));
}

#[test]
fn cad_endpoints_without_a_platform() {
    let server = TestServer::start();
    let (status, body) = server.call("POST", "/api/admin/sync", Some(ADMIN), None);
    assert_eq!(status, 503);
    assert_eq!(body["code"], "cad_not_configured");
}

#[test]
fn manual_sync_is_idempotent() {
    let server = TestServer::start_with(Some(SyncMode::Manual));
    let (status, first) = server.call("POST", "/api/admin/sync", Some(ADMIN), None);
    assert_eq!(status, 200, "{first}");
    assert_eq!(
        (first["updated"].as_u64(), first["failed"].as_u64()),
        (Some(1), Some(0))
    );
    let (_, second) = server.call("POST", "/api/admin/sync", Some(ADMIN), None);
    assert_eq!(
        (second["updated"].as_u64(), second["skipped"].as_u64()),
        (Some(0), Some(1))
    );
    let (fixture, _) = server.cad.as_ref().unwrap();
    fixture.touch("urola-e01", "hopper").unwrap();
    assert_eq!(
        server.call("POST", "/api/admin/sync", Some(ADMIN), None).1["updated"],
        1
    );
    assert_eq!(
        server.call("POST", "/api/admin/sync", Some(ADMIN), None).1["updated"],
        0
    );
}

#[test]
fn viewing_an_extruder_syncs_in_on_view_mode() {
    let server = TestServer::start_with(Some(SyncMode::OnView));
    let (fixture, _) = server.cad.as_ref().unwrap();
    let before = fixture.export_count();
    assert_eq!(server.call("GET", "/api/extruders/E01", None, None).0, 200);
    assert_eq!(fixture.export_count(), before + 1);
    assert_eq!(server.call("GET", "/api/extruders/E01", None, None).0, 200);
    assert_eq!(fixture.export_count(), before + 1);
}
