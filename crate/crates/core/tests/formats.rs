use oga_core::formats::{convert, detect_format, parse, serialize, FormatError, FormatId, LossKind};

const GML: &str = r#"graph [ directed 0 node [ id 0 label "a" ] node [ id 1 label "b" ] edge [ source 0 target 1 ] ]"#;

#[test]
fn documented_examples_parse() {
    let g = parse(GML.as_bytes(), FormatId::Gml).unwrap();
    assert!(!g.is_directed());
    let labels: Vec<_> = g.nodes().iter().map(|n| n.label.as_deref().unwrap()).collect();
    assert_eq!(labels, ["a", "b"]);

    let d = parse(b"p edge 3 2\ne 1 2\ne 2 3\n", FormatId::Dimacs).unwrap();
    assert_eq!((d.is_directed(), d.node_count(), d.edge_count()), (false, 3, 2));

    let mm = "%%MatrixMarket matrix coordinate real general\n3 3 2\n1 2 1.0\n2 3 1.0\n";
    let m = parse(mm.as_bytes(), FormatId::MatrixMarket).unwrap();
    assert!(m.is_directed());
    assert_eq!((m.node_count(), m.edge_count()), (3, 2));
    assert!(m.edges().iter().all(|e| e.weight.as_ref().unwrap().value() == 1.0));
}

#[test]
fn conversions() {
    let (same, report) = convert(GML.as_bytes(), FormatId::Gml, FormatId::Gml).unwrap();
    assert!(report.lossless());
    assert_eq!(parse(&same, FormatId::Gml).unwrap(), parse(GML.as_bytes(), FormatId::Gml).unwrap());

    let (_, report) = convert(GML.as_bytes(), FormatId::Gml, FormatId::Dimacs).unwrap();
    assert!(!report.lossless());
    assert_eq!(report.count(LossKind::NodeLabel), 2);

    let dimacs = b"c test\np edge 4 3\ne 1 2\ne 2 3 7\ne 3 4\n";
    let (gml, report) = convert(dimacs, FormatId::Dimacs, FormatId::Gml).unwrap();
    assert!(report.lossless(), "{report}");
    assert_eq!(parse(&gml, FormatId::Gml).unwrap(), parse(dimacs, FormatId::Dimacs).unwrap());
}

#[test]
fn weighted_directed_matrix_market_is_lossless() {
    let gml = "graph [ directed 1 node [ id 1 ] node [ id 2 ] node [ id 3 ] \
               edge [ source 1 target 2 weight 0.5 ] edge [ source 3 target 1 weight -2 ] ]";
    let (mm, report) = convert(gml.as_bytes(), FormatId::Gml, FormatId::MatrixMarket).unwrap();
    assert!(report.lossless(), "{report}");
    let text = String::from_utf8(mm.clone()).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate real general\n"));
    let back = parse(&mm, FormatId::MatrixMarket).unwrap();
    assert_eq!(back, parse(gml.as_bytes(), FormatId::Gml).unwrap());
}

#[test]
fn detection() {
    assert_eq!(detect_format(b"%%MatrixMarket matrix coordinate pattern symmetric\n1 1 0\n").unwrap(), FormatId::MatrixMarket);
    assert_eq!(detect_format(b"<?xml version=\"1.0\"?><graphml><graph/></graphml>").unwrap(), FormatId::GraphMl);
    assert_eq!(detect_format(GML.as_bytes()).unwrap(), FormatId::Gml);
    assert_eq!(detect_format(b"p edge 1 0\n").unwrap(), FormatId::Dimacs);
    assert!(matches!(detect_format(b""), Err(FormatError::UnknownFormat)));
    assert!(matches!(detect_format(b"\x00\x01garbage"), Err(FormatError::UnknownFormat)));
}

#[test]
fn empty_input_is_rejected() {
    for f in FormatId::ALL {
        assert!(matches!(parse(b"", f), Err(FormatError::EmptyInput)));
    }
}

#[test]
fn serializers_are_deterministic_and_use_lf() {
    let g = parse(GML.as_bytes(), FormatId::Gml).unwrap();
    for f in FormatId::ALL {
        let (a, _) = serialize(&g, f).unwrap();
        assert_eq!(a, serialize(&g, f).unwrap().0);
        assert!(!a.contains(&b'\r'), "{f}");
        assert!(a.ends_with(b"\n"), "{f}");
    }
    let (dimacs, _) = serialize(&g, FormatId::Dimacs).unwrap();
    assert!(dimacs.starts_with(b"c generated by the open graph archive\n"));
}
