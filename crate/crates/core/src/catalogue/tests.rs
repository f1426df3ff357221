use super::*;
use crate::assets::AssetStore;
use crate::ontology::{Ontology, OntologyConfig};
use crate::rdf::vocab::extruont;
use crate::rdf::Store;
use crate::seed::seed_demo;

fn eo(local: &str) -> String {
    format!("{}{local}", extruont::NS)
}

pub(crate) fn demo() -> (Store, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::new();
    seed_demo(&store, &OntologyConfig::default(), &AssetStore::new(dir.path())).unwrap();
    (store, dir)
}

fn ids(views: &[ExtruderView]) -> Vec<&str> {
    views.iter().map(|v| v.local_id.as_deref().unwrap()).collect()
}

#[test]
fn empty_store_lists_nothing() {
    let store = Store::new();
    assert!(Catalogue::default()
        .get_all_extruders(&store.snapshot())
        .unwrap()
        .is_empty());
}

#[test]
fn invisible_extruders_are_hidden() {
    let (store, _dir) = demo();
    let cat = Catalogue::default();
    let g = store.snapshot();
    let views = cat.get_all_extruders(&g).unwrap();
    assert_eq!(ids(&views), ["E01", "E02"]);
    let hidden = cat.extruder_view(&g, &crate::annotation::extruder_iri("E03")).unwrap();
    assert!(!hidden.visible);
}

#[test]
fn e01_detail_view() {
    let (store, _dir) = demo();
    let views = Catalogue::default().get_all_extruders(&store.snapshot()).unwrap();
    let e01 = &views[0];
    assert_eq!(e01.name, "Blowmatic 1300");
    assert_eq!(e01.production.bottles_per_hour, 1300.0);
    assert_eq!(e01.production.batch_size, Some(500.0));
    assert_eq!(e01.production.batch.as_deref(), Some("500 x 1 l bottle"));
    assert_eq!(e01.parts.len(), 6);
    let ids: Vec<_> = e01.parts.iter().map(|p| p.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let motor = e01.parts.iter().find(|p| p.type_class == eo("ACMotor")).unwrap();
    assert_eq!(motor.part_code.as_deref(), Some("URO-M-100"));
    assert_eq!(motor.irdi.as_deref(), Some("0173-1#01-AAD014#007"));
    let props: Vec<_> = motor
        .properties
        .iter()
        .map(|p| (p.label.as_str(), p.qualifier, p.value, p.unit_symbol.as_str()))
        .collect();
    assert_eq!(
        props,
        [
            ("Frequency", Qualifier::Exact, 60.0, "Hz"),
            ("Electric potential", Qualifier::Minimum, 230.0, "V"),
            ("Electric potential", Qualifier::Maximum, 460.0, "V"),
        ]
    );

    let hopper = e01.parts.iter().find(|p| p.type_class == eo("FeedHopper")).unwrap();
    let model = hopper.model.as_ref().unwrap();
    assert_eq!(
        model.position,
        Point {
            x: 0.0,
            y: 0.0,
            z: -1.0
        }
    );
    assert!(model.viewable);
    assert_eq!(model.format, "gltf");
}

#[test]
fn unknown_extruder() {
    let (store, _dir) = demo();
    let err = Catalogue::default()
        .extruder_view(&store.snapshot(), "http://nowhere/x")
        .unwrap_err();
    assert!(matches!(err, CatalogueError::UnknownExtruder(_)));
}

fn ontology(store: &Store) -> Ontology {
    Ontology::new(store.snapshot(), OntologyConfig::default())
}

fn search(store: &Store, params: &SearchParams) -> Vec<String> {
    Catalogue::default()
        .search(&ontology(store), params)
        .unwrap()
        .into_iter()
        .map(|v| v.local_id.unwrap())
        .collect()
}

#[test]
fn rate_filter() {
    let (store, _dir) = demo();
    let p = SearchParams {
        bottles_per_day: Some(10_000.0),
        hours_per_day: Some(8.0),
        ..Default::default()
    };
    assert_eq!(search(&store, &p), ["E01"]);
    assert_eq!(search(&store, &SearchParams::default()), ["E01", "E02"]);
}

#[test]
fn space_filter_excludes_wide_machine() {
    let (store, _dir) = demo();
    let p = SearchParams {
        extruder_space: Some(Space {
            width: 3.0,
            height: 3.0,
            length: 6.0,
        }),
        ..Default::default()
    };
    assert_eq!(search(&store, &p), ["E01"]);
}

#[test]
fn volume_tolerance_for_single_volume_machines() {
    let (store, _dir) = demo();
    let vol = |value: f64, unit: &str| SearchParams {
        bottle_volume: Some(Volume {
            value,
            unit: unit.into(),
        }),
        ..Default::default()
    };
    // E02 holds exactly 1 l: 0.95 l is within 10%, 1.2 l is not.
    assert_eq!(search(&store, &vol(0.95, "om:litre")), ["E01", "E02"]);
    assert_eq!(search(&store, &vol(1.2, "om:litre")), ["E01"]);
    assert_eq!(search(&store, &vol(2500.0, "om:millilitre")), Vec::<String>::new());
    assert_eq!(search(&store, &vol(900.0, "om:millilitre")), ["E01", "E02"]);
}

#[test]
fn bottle_size_filter() {
    let (store, _dir) = demo();
    let p = SearchParams {
        bottle_size: Some(BottleSize {
            width: 0.11,
            height: 0.2,
        }),
        ..Default::default()
    };
    assert_eq!(search(&store, &p), ["E01"]);
}

#[test]
fn advanced_condition_on_profile_shape() {
    let (store, _dir) = demo();
    let cond = |shape: &str| SearchParams {
        advanced: vec![AdvancedCondition {
            class: "eo:ExtrusionHeadForProfiles".into(),
            constraints: vec![PropertyConstraint {
                property: "eo:hasShapeOfProfile".into(),
                value: shape.into(),
            }],
        }],
        ..Default::default()
    };
    assert_eq!(search(&store, &cond("eo:Circular")), ["E01"]);
    assert_eq!(search(&store, &cond("eo:NonCircular")), ["E02"]);

    let any_head = SearchParams {
        advanced: vec![AdvancedCondition {
            class: "eo:ExtrusionHeadForProfiles".into(),
            constraints: vec![],
        }],
        ..Default::default()
    };
    assert_eq!(search(&store, &any_head), ["E01", "E02"]);
}

#[test]
fn advanced_condition_rejects_non_refinement_property() {
    let (store, _dir) = demo();
    let p = SearchParams {
        advanced: vec![AdvancedCondition {
            class: "eo:ExtrusionHeadForProfiles".into(),
            constraints: vec![PropertyConstraint {
                property: "eo:hasTypeOfExtrudate".into(),
                value: "eo:Profile".into(),
            }],
        }],
        ..Default::default()
    };
    let err = Catalogue::default().search(&ontology(&store), &p).unwrap_err();
    assert!(matches!(err, SearchError::NotRefinement { .. }));
    assert_eq!(err.field(), Some("advanced"));
}

#[test]
fn filter_validation() {
    let rate_only = SearchParams {
        bottles_per_day: Some(100.0),
        ..Default::default()
    };
    assert!(matches!(
        validate_filters(&rate_only),
        Err(SearchError::RateWithoutHours)
    ));
    let hours_only = SearchParams {
        hours_per_day: Some(8.0),
        ..Default::default()
    };
    assert_eq!(validate_filters(&hours_only).unwrap(), "");
    let too_many_hours = SearchParams {
        bottles_per_day: Some(100.0),
        hours_per_day: Some(25.0),
        ..Default::default()
    };
    assert!(matches!(
        validate_filters(&too_many_hours),
        Err(SearchError::HoursOutOfRange)
    ));
    let negative = SearchParams {
        bottle_size: Some(BottleSize {
            width: -1.0,
            height: 1.0,
        }),
        ..Default::default()
    };
    assert_eq!(validate_filters(&negative).unwrap_err().field(), Some("bottle_size"));
    let bad_unit = SearchParams {
        bottle_volume: Some(Volume {
            value: 1.0,
            unit: "om:metre".into(),
        }),
        ..Default::default()
    };
    assert!(matches!(validate_filters(&bad_unit), Err(SearchError::VolumeUnit(_))));
}

#[test]
fn search_params_reject_unknown_fields() {
    assert!(serde_json::from_str::<SearchParams>(r#"{"colour": "red"}"#).is_err());
    let p: SearchParams = serde_json::from_str(r#"{"bottle_volume": {"value": 1}}"#).unwrap();
    assert_eq!(p.bottle_volume.unwrap().unit, crate::rdf::vocab::om::LITRE);
}

#[test]
fn leads_are_numbered_and_persisted() {
    let (store, dir) = demo();
    let path = dir.path().join("leads.jsonl");
    let leads = LeadStore::open(&path).unwrap();
    let req = InfoRequest {
        name: "Ana".into(),
        email: "ana@example.com".into(),
        message: "Price?".into(),
        extruder: "E01".into(),
        search_params: None,
    };
    let g = store.snapshot();
    let first = leads.submit(&g, &req).unwrap();
    assert_eq!(first.id, "LEAD-000001");
    assert_eq!(first.origin, LeadOrigin::Catalogue);
    assert_eq!(first.extruder_name, "Blowmatic 1300");
    let from_search = InfoRequest {
        search_params: Some(SearchParams {
            hours_per_day: Some(8.0),
            ..Default::default()
        }),
        ..req.clone()
    };
    assert_eq!(leads.submit(&g, &from_search).unwrap().origin, LeadOrigin::Search);

    let reopened = LeadStore::open(&path).unwrap();
    assert_eq!(reopened.list().unwrap().len(), 2);
    assert_eq!(reopened.submit(&g, &req).unwrap().id, "LEAD-000003");

    let bad = InfoRequest {
        email: "ana@example".into(),
        ..req.clone()
    };
    assert!(matches!(
        leads.submit(&g, &bad),
        Err(LeadError::Invalid { field: "email", .. })
    ));
    let unknown = InfoRequest {
        extruder: "E99".into(),
        ..req
    };
    assert!(matches!(leads.submit(&g, &unknown), Err(LeadError::UnknownExtruder(_))));
}

#[test]
fn email_check() {
    for ok in ["a@b.co", "first.last+tag@sub.example.org"] {
        assert!(is_valid_email(ok), "{ok}");
    }
    for bad in ["", "a", "@b.co", "a@b", "a@@b.co", "a b@c.de", "a@b..co"] {
        assert!(!is_valid_email(bad), "{bad}");
    }
}
