//! Demo and benchmark catalogue content.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::annotation::{
    save_extruder, AnnotationError, Annotator, BatchSpec, ComponentSubmission, Dimensions, ExtruderSubmission,
    FeatureSubmission, ProductSpec, Qualifier, WriteMode,
};
use crate::annotation::{CadModelRef, IrdiMapping, ModelFormat, Point, BUNDLED_IRDI};
use crate::assets::{AssetError, AssetStore};
use crate::ontology::{Ontology, OntologyConfig};
use crate::rdf::vocab::{app, extruont, owl, rdf};
use crate::rdf::{iri, Store, StoreError, Triple};

/// Solutions and supplier products used by the demo.
pub const DEMO_SUPPORT: &str = include_str!("../data/demo-support.ttl");
const DEMO_SUPPORT_MARKER: &str = "https://w3id.org/extrucat/data/sol-motor-overheating";
/// The feed-hopper model of the demo extruder.
pub const DEMO_CUBE_GLTF: &[u8] = include_bytes!("../data/cube.gltf");
/// CAD platform document and element the hopper model was exported from.
pub const DEMO_CAD_DOCUMENT: &str = "urola-e01";
pub const DEMO_CAD_ELEMENT: &str = "hopper";

#[derive(Debug, thiserror::Error)]
pub enum SeedError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedReport {
    pub extruders: Vec<String>,
    pub revision: u64,
}

/// Loads the bundled ontology unless `eo:Extruder` is already declared.
pub fn ensure_ontology(store: &Store) -> Result<u64, StoreError> {
    let declared = Triple::new(iri(extruont::EXTRUDER), iri(rdf::TYPE), iri(owl::CLASS));
    if store.snapshot().contains(&declared) {
        return Ok(store.revision());
    }
    store.load_turtle(crate::MINI_EXTRUONT, None)
}

fn feature(measure: &str, unit: &str, value: f64, qualifier: Qualifier, description: &str) -> FeatureSubmission {
    FeatureSubmission {
        measure_type: measure.into(),
        unit: unit.into(),
        value,
        qualifier,
        description: description.into(),
    }
}

fn component(
    local: &str,
    class: &str,
    label: &str,
    code: Option<&str>,
    features: Vec<FeatureSubmission>,
) -> ComponentSubmission {
    ComponentSubmission {
        local_id: local.into(),
        component_type: class.into(),
        label: label.into(),
        part_code: code.map(str::to_owned),
        features,
        cad: None,
    }
}

fn batch(item: &str, size: f64) -> BatchSpec {
    BatchSpec {
        item_label: item.into(),
        size,
        unit: "om:one".into(),
        description: "Bottles per batch".into(),
    }
}

/// The three demo extruders. `hopper_model` is attached to E01's feed
/// hopper.
pub fn demo_submissions(hopper_model: Option<CadModelRef>) -> Vec<ExtruderSubmission> {
    use Qualifier::*;
    let mut hopper = component(
        "H1",
        "eo:FeedHopper",
        "Feed hopper",
        Some("URO-FH-20"),
        vec![feature("om:Volume", "om:litre", 20.0, Exact, "Hopper capacity")],
    );
    hopper.cad = hopper_model;
    vec![
        ExtruderSubmission {
            local_id: "E01".into(),
            name: "Blowmatic 1300".into(),
            manufacturer: "Urola".into(),
            description: "Continuous extrusion blow moulder for round bottles.".into(),
            visible: true,
            batch: batch("1 l bottle", 500.0),
            dimensions: Dimensions {
                width: 2.5,
                height: 2.8,
                length: 5.0,
            },
            throughput: 1300.0,
            product: ProductSpec {
                min_volume: 0.5,
                max_volume: 2.0,
                volume_unit: "om:litre".into(),
                max_width: 0.12,
                max_height: 0.35,
            },
            components: vec![
                component(
                    "M1",
                    "eo:ACMotor",
                    "Main motor",
                    Some("URO-M-100"),
                    vec![
                        feature("om:Frequency", "om:hertz", 60.0, Exact, "Supply frequency"),
                        feature("om:ElectricPotential", "om:volt", 230.0, Minimum, "Supply voltage"),
                        feature("om:ElectricPotential", "om:volt", 460.0, Maximum, "Supply voltage"),
                    ],
                ),
                component(
                    "G1",
                    "eo:Gearbox",
                    "Gearbox",
                    Some("URO-G-7"),
                    vec![feature("om:Power", "om:kilowatt", 15.0, Exact, "Rated power")],
                ),
                hopper,
                component(
                    "B1",
                    "eo:Barrel",
                    "Barrel",
                    None,
                    vec![
                        feature("om:Temperature", "om:degreeCelsius", 230.0, Maximum, "Zone temperature"),
                        feature("om:Length", "om:metre", 1.2, Exact, "Barrel length"),
                    ],
                ),
                component(
                    "S1",
                    "eo:Screw",
                    "Screw",
                    Some("URO-S-55"),
                    vec![feature("om:Length", "om:metre", 1.1, Exact, "Screw length")],
                ),
                component(
                    "X1",
                    "eo:ExtrusionHeadForCircularProfiles",
                    "Parison head",
                    None,
                    vec![feature(
                        "om:Temperature",
                        "om:degreeCelsius",
                        210.0,
                        Exact,
                        "Head temperature",
                    )],
                ),
            ],
        },
        ExtruderSubmission {
            local_id: "E02".into(),
            name: "Profiler 1000".into(),
            manufacturer: "Urola".into(),
            description: "Single-volume machine for flat containers.".into(),
            visible: true,
            batch: batch("1 l flask", 300.0),
            dimensions: Dimensions {
                width: 3.5,
                height: 3.0,
                length: 6.5,
            },
            throughput: 1000.0,
            product: ProductSpec {
                min_volume: 1.0,
                max_volume: 1.0,
                volume_unit: "om:litre".into(),
                max_width: 0.10,
                max_height: 0.30,
            },
            components: vec![
                component(
                    "M1",
                    "eo:DCMotor",
                    "DC motor",
                    Some("URO-M-200"),
                    vec![feature("om:Frequency", "om:hertz", 50.0, Exact, "Supply frequency")],
                ),
                component(
                    "X1",
                    "eo:ExtrusionHeadForNonCircularProfiles",
                    "Flat head",
                    None,
                    vec![],
                ),
            ],
        },
        ExtruderSubmission {
            local_id: "E03".into(),
            name: "Sheetline 1500 (prototype)".into(),
            manufacturer: "Urola".into(),
            description: "Sheet line, not yet released.".into(),
            visible: false,
            batch: batch("sheet", 100.0),
            dimensions: Dimensions {
                width: 2.0,
                height: 2.0,
                length: 4.0,
            },
            throughput: 1500.0,
            product: ProductSpec {
                min_volume: 0.2,
                max_volume: 5.0,
                volume_unit: "om:litre".into(),
                max_width: 0.3,
                max_height: 0.5,
            },
            components: vec![component(
                "X1",
                "eo:ExtrusionHeadForSheetsWithOnePlate",
                "Sheet head",
                None,
                vec![],
            )],
        },
    ]
}

fn save_all(
    store: &Store,
    config: &OntologyConfig,
    assets: Option<&AssetStore>,
    subs: &[ExtruderSubmission],
) -> Result<SeedReport, SeedError> {
    let ontology = Ontology::new(store.snapshot(), config.clone());
    let irdi = IrdiMapping::from_csv(BUNDLED_IRDI).expect("bundled mapping parses");
    let mut annotator = Annotator::new(&ontology).with_irdi(&irdi);
    if let Some(a) = assets {
        annotator = annotator.with_assets(a);
    }
    let mut extruders = Vec::new();
    let mut revision = store.revision();
    for s in subs {
        let out = save_extruder(store, &annotator, s, WriteMode::Replace)?;
        revision = out.revision;
        extruders.push(out.iri);
    }
    Ok(SeedReport { extruders, revision })
}

/// Loads the ontology, demo solutions and suppliers, writes the hopper model
/// and saves the three demo extruders. Running it twice changes nothing.
pub fn seed_demo(store: &Store, config: &OntologyConfig, assets: &AssetStore) -> Result<SeedReport, SeedError> {
    ensure_ontology(store)?;
    // The support data has list blank nodes, so reloading would duplicate it.
    let marker = Triple::new(iri(DEMO_SUPPORT_MARKER), iri(rdf::TYPE), iri(app::SOLUTION));
    if !store.snapshot().contains(&marker) {
        store.load_turtle(DEMO_SUPPORT, None)?;
    }
    let path = AssetStore::relative_path(DEMO_CAD_DOCUMENT, DEMO_CAD_ELEMENT, ModelFormat::Gltf.extension())?;
    let checksum = assets.write(&path, DEMO_CUBE_GLTF)?;
    let hopper = CadModelRef {
        document: DEMO_CAD_DOCUMENT.into(),
        element: DEMO_CAD_ELEMENT.into(),
        path,
        format: ModelFormat::Gltf,
        position: Point {
            x: 0.0,
            y: 0.0,
            z: -1.0,
        },
        checksum,
        modified_at: None,
    };
    save_all(store, config, Some(assets), &demo_submissions(Some(hopper)))
}

/// `count` varied extruders named `B0001`, `B0002`, ... from a fixed seed.
pub fn bench_submissions(count: usize, seed: u64) -> Vec<ExtruderSubmission> {
    let mut rng = StdRng::seed_from_u64(seed);
    let heads = [
        "eo:ExtrusionHeadForCircularProfiles",
        "eo:ExtrusionHeadForNonCircularProfiles",
        "eo:ExtrusionHeadForSheetsWithOnePlate",
        "eo:ExtrusionHeadForSheetsWithTwoPlates",
    ];
    let round = |v: f64, step: f64| (v / step).round() * step;
    (1..=count)
        .map(|i| {
            let min_volume = round(rng.gen_range(0.1..2.0), 0.05);
            let single = rng.gen_bool(0.2);
            let max_volume = if single {
                min_volume
            } else {
                round(min_volume + rng.gen_range(0.1..3.0), 0.05)
            };
            let motor = if rng.gen_bool(0.5) { "eo:ACMotor" } else { "eo:DCMotor" };
            let mut components = vec![
                component(
                    "M1",
                    motor,
                    "Motor",
                    Some(&format!("BEN-M-{i:03}")),
                    vec![feature(
                        "om:Frequency",
                        "om:hertz",
                        if rng.gen_bool(0.5) { 50.0 } else { 60.0 },
                        Qualifier::Exact,
                        "Supply frequency",
                    )],
                ),
                component("X1", heads[rng.gen_range(0..heads.len())], "Head", None, vec![]),
            ];
            if rng.gen_bool(0.6) {
                components.push(component(
                    "H1",
                    "eo:FeedHopper",
                    "Hopper",
                    None,
                    vec![feature(
                        "om:Volume",
                        "om:litre",
                        round(rng.gen_range(5.0..60.0), 1.0),
                        Qualifier::Exact,
                        "Capacity",
                    )],
                ));
            }
            ExtruderSubmission {
                local_id: format!("B{i:04}"),
                name: format!("Bench extruder {i}"),
                manufacturer: ["Urola", "Kautex", "Bekum"][rng.gen_range(0..3)].into(),
                description: "Generated for benchmarks.".into(),
                visible: rng.gen_bool(0.9),
                batch: batch("bottle", round(rng.gen_range(100.0..1000.0), 10.0)),
                dimensions: Dimensions {
                    width: round(rng.gen_range(1.5..4.0), 0.1),
                    height: round(rng.gen_range(1.5..4.0), 0.1),
                    length: round(rng.gen_range(3.0..8.0), 0.1),
                },
                throughput: round(rng.gen_range(200.0..3000.0), 10.0),
                product: ProductSpec {
                    min_volume,
                    max_volume,
                    volume_unit: "om:litre".into(),
                    max_width: round(rng.gen_range(0.05..0.3), 0.01),
                    max_height: round(rng.gen_range(0.1..0.6), 0.01),
                },
                components,
            }
        })
        .collect()
}

/// Loads the ontology and saves `count` benchmark extruders.
pub fn seed_bench(store: &Store, config: &OntologyConfig, count: usize, seed: u64) -> Result<SeedReport, SeedError> {
    ensure_ontology(store)?;
    save_all(store, config, None, &bench_submissions(count, seed))
}
