use grpd_tribe::error::TribeError;
use grpd_tribe::exchange::{parse_json, parse_spec, Document, FunctorJson, GroupoidJson};
use grpd_tribe::groupoid::{codiscrete, cyclic, discrete, product, FinGroupoid};

#[test]
fn constructors_have_expected_sizes_and_laws() {
    let cases = [
        (discrete(0), 0, 0),
        (discrete(4), 4, 4),
        (cyclic(3), 1, 3),
        (codiscrete(2), 2, 4),
        (product(&cyclic(2), &codiscrete(2)), 2, 8),
    ];
    for (g, o, m) in cases {
        assert_eq!((g.object_count(), g.morphism_count()), (o, m));
        g.validate().unwrap();
    }
}

#[test]
fn cyclic_group_structure() {
    let g = cyclic(3);
    let gen = g.morphisms().find(|&m| !g.is_identity(m)).unwrap();
    let twice = g.compose(gen, gen);
    assert!(!g.is_identity(twice));
    assert!(g.is_identity(g.compose(twice, gen)));
    assert_eq!(g.inv(gen), twice);
    assert_eq!(g.component_count(), 1);
    assert!(discrete(3).is_discrete());
    assert_eq!(discrete(3).component_count(), 3);
}

fn bz2_tables() -> (Vec<(u32, u32)>, Vec<(u32, u32, u32)>) {
    let ends = vec![(0, 0), (0, 0)];
    let compose = vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)];
    (ends, compose)
}

#[test]
fn tables_build_a_groupoid() {
    let (ends, compose) = bz2_tables();
    let g = FinGroupoid::from_tables(1, &ends, &compose, &[0]).unwrap();
    assert_eq!(*g.structure().components[0].aut, [0, 1]);
    assert_eq!(g.inv(1), 1);
}

#[test]
fn broken_tables_are_rejected() {
    let (ends, mut compose) = bz2_tables();
    compose[3] = (1, 1, 1);
    assert!(matches!(
        FinGroupoid::from_tables(1, &ends, &compose, &[0]),
        Err(TribeError::Invalid { .. })
    ));
    let (ends, compose) = bz2_tables();
    assert!(FinGroupoid::from_tables(1, &ends, &compose[..3], &[0]).is_err());
    assert!(FinGroupoid::from_tables(1, &ends, &compose, &[1]).is_err());
    assert!(FinGroupoid::from_tables(2, &ends, &compose, &[0, 0]).is_err());
    // Associative with identity, but 1 has no inverse.
    let mono = vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)];
    assert!(FinGroupoid::from_tables(1, &ends, &mono, &[0]).is_err());
}

#[test]
fn json_roundtrip() {
    for g in [discrete(3), cyclic(3), codiscrete(2), product(&cyclic(2), &discrete(2))] {
        let json = serde_json::to_string(&GroupoidJson::from_groupoid(&g)).unwrap();
        let back = parse_json(&json).unwrap().to_groupoid().unwrap();
        assert_eq!(*back, *g);
    }
}

#[test]
fn json_document_with_functors() {
    let mut doc = Document::default();
    doc.groupoids.insert("A".into(), GroupoidJson::from_groupoid(&discrete(2)));
    doc.groupoids.insert("B".into(), GroupoidJson::from_groupoid(&discrete(1)));
    doc.functors.insert(
        "p".into(),
        FunctorJson {
            dom: "A".into(),
            cod: "B".into(),
            objects: vec![0, 0],
            morphisms: vec![0, 0],
        },
    );
    let text = serde_json::to_string(&doc).unwrap();
    let doc: Document = serde_json::from_str(&text).unwrap();
    let p = doc.fibration("p").unwrap();
    assert_eq!(p.total().object_count(), 2);
    assert!(doc.functor("q").is_err());
    assert!(doc.groupoid("C").is_err());
}

#[test]
fn malformed_json_is_an_exchange_error() {
    assert!(matches!(parse_json("{\"objects\": 1}"), Err(TribeError::Exchange(_))));
    let dup = r#"{"objects":1,"morphisms":[{"id":0,"src":0,"dst":0},{"id":0,"src":0,"dst":0}],"compose":[],"identities":[0]}"#;
    assert!(parse_json(dup).unwrap().to_groupoid().is_err());
}

#[test]
fn spec_shorthand() {
    let sizes = |s: &str| {
        let g = parse_spec(s).unwrap();
        (g.object_count(), g.morphism_count())
    };
    assert_eq!(sizes("d3"), (3, 3));
    assert_eq!(sizes("BZ2"), (1, 2));
    assert_eq!(sizes("K2"), (2, 4));
    assert_eq!(sizes("1"), (1, 1));
    assert_eq!(sizes("d2*BZ2"), (2, 4));
    assert_eq!(sizes(" K2 * d2 "), (4, 8));
    for bad in ["", "X3", "d", "BZ0", "dd2"] {
        assert!(parse_spec(bad).is_err(), "{bad}");
    }
}

#[test]
fn spec_shorthand_respects_input_caps() {
    assert!(matches!(parse_spec("d9"), Err(TribeError::ResourceCap { .. })));
    assert!(matches!(parse_spec("K3*K3"), Err(TribeError::ResourceCap { .. })));
}
