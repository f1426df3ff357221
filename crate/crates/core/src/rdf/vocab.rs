//! Namespace and term constants.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    pub const SUB_PROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
    pub const CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
    pub const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
}

pub mod owl {
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    pub const CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const THING: &str = "http://www.w3.org/2002/07/owl#Thing";
    pub const RESTRICTION: &str = "http://www.w3.org/2002/07/owl#Restriction";
    pub const ON_PROPERTY: &str = "http://www.w3.org/2002/07/owl#onProperty";
    pub const ALL_VALUES_FROM: &str = "http://www.w3.org/2002/07/owl#allValuesFrom";
    pub const SOME_VALUES_FROM: &str = "http://www.w3.org/2002/07/owl#someValuesFrom";
    pub const HAS_VALUE: &str = "http://www.w3.org/2002/07/owl#hasValue";
    pub const INTERSECTION_OF: &str = "http://www.w3.org/2002/07/owl#intersectionOf";
    pub const UNION_OF: &str = "http://www.w3.org/2002/07/owl#unionOf";
    pub const INVERSE_OF: &str = "http://www.w3.org/2002/07/owl#inverseOf";
    pub const EQUIVALENT_CLASS: &str = "http://www.w3.org/2002/07/owl#equivalentClass";
    pub const ONE_OF: &str = "http://www.w3.org/2002/07/owl#oneOf";
    pub const NAMED_INDIVIDUAL: &str = "http://www.w3.org/2002/07/owl#NamedIndividual";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

    const NUMERIC_LOCAL: &[&str] = &[
        "integer",
        "decimal",
        "double",
        "float",
        "int",
        "long",
        "short",
        "byte",
        "nonNegativeInteger",
        "nonPositiveInteger",
        "negativeInteger",
        "positiveInteger",
        "unsignedLong",
        "unsignedInt",
        "unsignedShort",
        "unsignedByte",
    ];

    pub fn is_numeric(datatype: &str) -> bool {
        datatype
            .strip_prefix(NS)
            .is_some_and(|local| NUMERIC_LOCAL.contains(&local))
    }
}

pub mod dcterms {
    pub const NS: &str = "http://purl.org/dc/terms/";
    pub const DESCRIPTION: &str = "http://purl.org/dc/terms/description";
}

/// Ontology of units of measure 2.0.
pub mod om {
    pub const NS: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/";
    pub const HAS_PHENOMENON: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/hasPhenomenon";
    pub const HAS_NUMERICAL_VALUE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/hasNumericalValue";
    pub const HAS_UNIT: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/hasUnit";
    pub const SYMBOL: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/symbol";
    pub const QUANTITY: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/Quantity";
    pub const ONE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/one";
    pub const METRE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/metre";
    pub const LITRE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/litre";
    pub const MILLILITRE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/millilitre";
    pub const CUBIC_METRE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/cubicMetre";
    pub const MILLIMETRE: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/millimetre";
}

/// SAREF extension for industry and manufacturing.
pub mod s4inma {
    pub const NS: &str = "https://w3id.org/def/saref4inma#";
    pub const ITEM_BATCH: &str = "https://w3id.org/def/saref4inma#ItemBatch";
    pub const NEEDS_EQUIPMENT: &str = "https://w3id.org/def/saref4inma#needsEquipment";
}

/// Extruder ontology classes and properties.
pub mod extruont {
    pub const NS: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#";
    pub const EXTRUDER: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#Extruder";
    pub const EXTRUDER_COMPONENT: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#ExtruderComponent";
    pub const HAS_COMPONENT: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#hasComponent";
    pub const HAS_SUBCOMPONENT: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#hasSubcomponent";
    pub const HAS_QUANTITY: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/ExtruOnt#hasQuantity";
    /// Namespace for extruder instances, as used by the competency queries.
    pub const INSTANCES: &str = "http://bdi.si.ehu.es/bdi/ontologies/ExtruOnt/Extruder01#";
}

/// Application vocabulary for catalogue plumbing not covered by the
/// domain ontologies.
pub mod app {
    pub const NS: &str = "https://w3id.org/extrucat/vocab#";

    macro_rules! app_terms {
        ($($name:ident = $local:literal),* $(,)?) => {
            $(pub const $name: &str = concat!("https://w3id.org/extrucat/vocab#", $local);)*
        };
    }

    app_terms! {
        VISIBLE = "visible",
        MANUFACTURER = "manufacturer",
        RATED_THROUGHPUT = "ratedThroughput",
        WIDTH = "width",
        HEIGHT = "height",
        LENGTH = "length",
        MIN_BOTTLE_VOLUME = "minBottleVolume",
        MAX_BOTTLE_VOLUME = "maxBottleVolume",
        MAX_BOTTLE_WIDTH = "maxBottleWidth",
        MAX_BOTTLE_HEIGHT = "maxBottleHeight",
        PRODUCES_BATCH = "producesBatch",
        HAS_BATCH_SIZE = "hasBatchSize",
        HAS_EXACT_QUANTITY = "hasExactQuantity",
        HAS_MINIMUM_QUANTITY = "hasMinimumQuantity",
        HAS_MAXIMUM_QUANTITY = "hasMaximumQuantity",
        RELATED_TO = "relatedTo",
        SOLUTION = "Solution",
        STEPS = "steps",
        IRDI = "irdi",
        PART_CODE = "partCode",
        HAS_MODEL = "hasModel",
        CAD_MODEL = "CadModel",
        FILE_PATH = "filePath",
        FORMAT = "format",
        CHECKSUM = "checksum",
        SOURCE_DOCUMENT = "sourceDocument",
        SOURCE_ELEMENT = "sourceElement",
        SOURCE_MODIFIED_AT = "sourceModifiedAt",
        HAS_POSITION = "hasPosition",
        POINT = "Point",
        X = "x",
        Y = "y",
        Z = "z",
        SUPPLIER = "Supplier",
        SUPPLIED_BY = "suppliedBy",
        SUPPLIER_PRODUCT = "SupplierProduct",
    }
}
