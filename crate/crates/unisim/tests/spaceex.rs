use unicycle_core::linearize::{assemble_bounded_model, fit_affine, LOC_FALLEN, LOC_NORMAL};
use unicycle_core::{Bounds, FitSpec, Params};
use unisim::spaceex::{export_verification_model, parse_xml, read_companion, read_verification_model, write_xml};

fn model() -> (unicycle_core::AffineModel, unicycle_core::BoundedHybridModel) {
    let p = Params::default();
    let affine = fit_affine(&p, &FitSpec::for_params(&p), Bounds::default()).unwrap();
    let m = assemble_bounded_model(&affine, &p);
    (affine, m)
}

#[test]
fn xml_is_well_formed_and_complete() {
    let (_, m) = model();
    let xml = write_xml(&m);
    let doc = roxmltree::Document::parse(&xml).unwrap();
    let count = |tag: &str| doc.descendants().filter(|n| n.tag_name().name() == tag).count();
    assert_eq!(count("component"), 1);
    assert_eq!(count("location"), 4);
    assert_eq!(count("transition"), 22);
    assert!(xml.contains("&lt;="));
    assert!(xml.contains(r#"<param name="u" type="real" local="false" d1="1" d2="1" dynamics="any" controlled="false"/>"#));
}

#[test]
fn export_writes_three_files_that_read_back() {
    let (affine, m) = model();
    let tmp = tempfile::tempdir().unwrap();
    let paths = export_verification_model(&m, &affine, tmp.path().join("out/unicycle.xml")).unwrap();
    for p in [&paths.xml, &paths.cfg, &paths.json] {
        assert!(p.exists(), "{}", p.display());
    }
    let back = read_verification_model(&paths.xml).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.initial_location, LOC_NORMAL);
    assert_eq!(back.forbidden_location, LOC_FALLEN);
    let c = read_companion(&paths.json).unwrap();
    assert_eq!(c.format_version, 1);
    assert_eq!(c.affine_model, affine);
    let cfg = std::fs::read_to_string(&paths.cfg).unwrap();
    assert!(cfg.contains("initially = \"loc(unicycle)==riding_normal & v == 0 & th == 0 & w == 0\""), "{cfg}");
}

#[test]
fn export_is_deterministic() {
    let (_, m) = model();
    assert_eq!(write_xml(&m), write_xml(&model().1));
}

#[test]
fn malformed_xml_is_rejected() {
    assert!(parse_xml("<sspaceex>").is_err());
    assert!(parse_xml("<sspaceex xmlns=\"x\"/>").is_err());
}
