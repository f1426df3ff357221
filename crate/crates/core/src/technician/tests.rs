use super::*;
use crate::annotation::{component_iri, BUNDLED_IRDI};
use crate::catalogue::tests::demo;
use crate::ontology::OntologyConfig;
use crate::rdf::{Literal, Store, Triple};

fn tech(dir: &Path, stock: Arc<dyn StockService>) -> Technician {
    Technician::new(
        CustomerDirectory::demo(),
        TicketLog::open(&dir.join("tickets.jsonl")).unwrap(),
        stock,
        IrdiMapping::from_csv(BUNDLED_IRDI).unwrap(),
    )
}

fn ontology(store: &Store) -> Ontology {
    Ontology::new(store.snapshot(), OntologyConfig::default())
}

fn titles(entries: &[SolutionEntry]) -> Vec<&str> {
    entries.iter().map(|s| s.title.as_str()).collect()
}

#[test]
fn owned_extruders_ignore_visibility() {
    let (store, dir) = demo();
    let t = tech(dir.path(), Arc::new(MockStockService::demo()));
    let g = store.snapshot();
    let cat = Catalogue::default();
    let owned = t.list_owned(&g, &cat, "C001").unwrap();
    let got: Vec<_> = owned
        .iter()
        .map(|o| (o.extruder.local_id.as_deref().unwrap(), o.acquisition))
        .collect();
    assert_eq!(got, [("E01", Acquisition::Bought), ("E03", Acquisition::Rented)]);
    assert!(!owned[1].extruder.visible);
    assert_eq!(owned[0].extruder, cat.get_all_extruders(&g).unwrap()[0]);
    assert!(t.list_owned(&g, &cat, "C003").unwrap().is_empty());
    assert!(matches!(
        t.list_owned(&g, &cat, "C404"),
        Err(TechnicianError::UnknownCustomer(_))
    ));
}

#[test]
fn solution_library_follows_the_class_hierarchy() {
    let (store, dir) = demo();
    let t = tech(dir.path(), Arc::new(MockStockService::demo()));
    let o = ontology(&store);
    let motor = t.solutions_for(&o, &component_iri("E01", "M1")).unwrap();
    assert_eq!(titles(&motor), ["General component inspection", "Motor overheating"]);
    assert_eq!(motor[1].steps.len(), 3);
    let barrel = t.solutions_for(&o, &component_iri("E01", "B1")).unwrap();
    assert_eq!(titles(&barrel), ["General component inspection"]);
    assert!(matches!(
        t.solutions_for(&o, "http://x/none"),
        Err(TechnicianError::UnknownComponent(_))
    ));
}

#[test]
fn tickets_require_ownership() {
    let (store, dir) = demo();
    let t = tech(dir.path(), Arc::new(MockStockService::demo()));
    let g = store.snapshot();
    let m1 = component_iri("E01", "M1");
    let history = vec![HistoryEntry {
        timestamp: chrono::Utc::now(),
        action: TicketAction::ViewedSolution,
        detail: "Motor overheating".into(),
    }];
    let ticket = t.open_ticket(&g, "C001", "E01", &m1, history.clone()).unwrap();
    assert_eq!(ticket.history, history);
    assert_ne!(t.open_ticket(&g, "C001", "E01", &m1, vec![]).unwrap().id, ticket.id);
    assert!(matches!(
        t.open_ticket(&g, "C002", "E01", &m1, vec![]),
        Err(TechnicianError::NotOwner { .. })
    ));
    assert!(matches!(
        t.open_ticket(&g, "C001", "E03", &m1, vec![]),
        Err(TechnicianError::NotAComponentOf { .. })
    ));
    assert!(t.owns_component(&g, "C001", &m1));
    assert!(!t.owns_component(&g, "C002", &m1));
}

/// Gearbox URO-G-7: stocked by acme only.
fn gearbox_case(warehouse: u32, provider: Option<&str>) -> (SparePartResult, Vec<Reservation>) {
    let (store, dir) = demo();
    let mock = Arc::new(MockStockService::demo());
    mock.set_warehouse("URO-G-7", warehouse);
    let t = tech(dir.path(), mock.clone());
    let result = t
        .request_spare_part(&ontology(&store), &component_iri("E01", "G1"), provider)
        .unwrap();
    (result, mock.reservations())
}

#[test]
fn algorithm_three_decision_table() {
    // (warehouse stock, provider argument, expected source or None for a list)
    let cases: [(u32, Option<&str>, Option<&str>); 6] = [
        (1, None, Some(WAREHOUSE)),
        (1, Some("acme"), Some(WAREHOUSE)),
        (1, Some("nobody"), Some(WAREHOUSE)),
        (0, None, None),
        (0, Some("acme"), Some("acme")),
        (0, Some("nobody"), None),
    ];
    for (stock, provider, expected) in cases {
        let (result, reservations) = gearbox_case(stock, provider);
        match (expected, result) {
            (Some(source), SparePartResult::Order { order }) => {
                assert_eq!(order.source, source, "{stock} {provider:?}");
                assert_eq!(reservations.len(), 1);
                assert_eq!(reservations[0].order_id, order.order_id);
                let prefix = if source == WAREHOUSE { "WH-" } else { "PRV-acme-" };
                assert!(order.order_id.starts_with(prefix));
            }
            (None, SparePartResult::Providers { providers }) => {
                assert!(reservations.is_empty(), "{stock} {provider:?}");
                assert_eq!(providers.len(), 1);
                assert_eq!(providers[0].provider_id, "acme");
                assert_eq!(providers[0].matched_by, MatchKind::Code);
            }
            (e, r) => panic!("stock={stock} provider={provider:?}: expected {e:?}, got {r:?}"),
        }
    }
}

#[test]
fn irdi_broadening() {
    let (store, dir) = demo();
    let t = tech(dir.path(), Arc::new(MockStockService::demo()));
    let o = ontology(&store);
    let hopper = t.get_providers_by_part_id(&o, &component_iri("E01", "H1")).unwrap();
    assert_eq!(hopper.len(), 1);
    assert_eq!(
        (hopper[0].provider_id.as_str(), hopper[0].matched_by),
        ("hopperco", MatchKind::IrdiMatch)
    );

    // DCMotor has no code of its own; it inherits Motor's IRDI.
    let dc = t.get_providers_by_part_id(&o, &component_iri("E02", "M1")).unwrap();
    assert_eq!(
        (dc[0].provider_id.as_str(), dc[0].matched_by),
        ("acme", MatchKind::IrdiMatch)
    );

    // An IRDI match can be ordered; the provider ships its own part.
    let ordered = t
        .request_spare_part(&o, &component_iri("E02", "M1"), Some("acme"))
        .unwrap();
    assert!(matches!(ordered, SparePartResult::Order { order } if order.source == "acme"));
}

#[test]
fn unknown_code_without_irdi_gives_empty_list() {
    let (store, dir) = demo();
    let barrel = component_iri("E01", "B1");
    store
        .insert([Triple::new(
            iri(&barrel),
            iri(app::PART_CODE),
            Literal::string("URO-B-1"),
        )])
        .unwrap();
    let t = tech(dir.path(), Arc::new(MockStockService::demo()));
    let o = ontology(&store);
    assert!(t.get_providers_by_part_id(&o, &barrel).unwrap().is_empty());
    assert_eq!(
        t.request_spare_part(&o, &barrel, None).unwrap(),
        SparePartResult::Providers { providers: vec![] }
    );
}

#[test]
fn missing_part_code_and_unknown_component() {
    let (store, dir) = demo();
    let t = tech(dir.path(), Arc::new(MockStockService::demo()));
    let o = ontology(&store);
    assert!(matches!(
        t.request_spare_part(&o, &component_iri("E01", "X1"), None),
        Err(TechnicianError::MissingPartCode(_))
    ));
    assert!(matches!(
        t.request_spare_part(&o, "http://x/none", None),
        Err(TechnicianError::UnknownComponent(_))
    ));
}

struct Down;

impl StockService for Down {
    fn stock(&self, _: &str) -> Result<StockLevel, StockError> {
        Err(StockError::Unreachable("connection refused".into()))
    }
    fn providers(&self, _: &ProviderQuery) -> Result<Vec<Provider>, StockError> {
        Err(StockError::Unreachable("connection refused".into()))
    }
    fn place_order(&self, _: &OrderRequest) -> Result<OrderReceipt, StockError> {
        Err(StockError::Unreachable("connection refused".into()))
    }
}

#[test]
fn unreachable_stock_service_is_an_error_not_an_empty_list() {
    let (store, dir) = demo();
    let t = tech(dir.path(), Arc::new(Down));
    let o = ontology(&store);
    assert!(matches!(
        t.get_providers_by_part_id(&o, &component_iri("E01", "G1")),
        Err(TechnicianError::Stock(StockError::Unreachable(_)))
    ));
    assert!(matches!(
        t.request_spare_part(&o, &component_iri("E01", "G1"), None),
        Err(TechnicianError::Stock(StockError::Unreachable(_)))
    ));
}

#[test]
fn warehouse_reservation_is_atomic() {
    let mock = Arc::new(MockStockService::demo());
    mock.set_warehouse("P", 3);
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let m = mock.clone();
            std::thread::spawn(move || {
                m.place_order(&OrderRequest {
                    code: "P".into(),
                    source: WAREHOUSE.into(),
                    quantity: 1,
                    irdi: None,
                })
                .is_ok()
            })
        })
        .collect();
    let ok = handles.into_iter().map(|h| h.join().unwrap()).filter(|ok| *ok).count();
    assert_eq!(ok, 3);
    assert_eq!(mock.reservations().len(), 3);
    assert_eq!(mock.stock("P").unwrap().count, 0);
}

#[test]
fn spare_part_result_is_tagged() {
    let r = SparePartResult::Providers { providers: vec![] };
    assert_eq!(
        serde_json::to_value(&r).unwrap(),
        serde_json::json!({"result": "Providers", "providers": []})
    );
}
