use defeature::config::parse;
use defeature::Format;
use defeature_core::geometry::ExtensionChoice;

#[test]
fn catalog_base_with_overrides() {
    let cfg = parse(
        r#"
[output]
dir = "out"
formats = ["csv", "json"]
threads = 2
timing = false

[case.hd]
catalog = "fig7.neg.halfdisk"
sweep = { first = 0.02, ratio = 0.5, count = 4 }
resolution = 10
m = 2

[case.hd.data]
f = "1 + x"
"#,
    )
    .unwrap();
    assert_eq!(cfg.output.dir.to_str(), Some("out"));
    assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Json]);
    assert_eq!(cfg.output.threads, 2);
    assert!(!cfg.output.timing);
    let c = &cfg.cases[0];
    assert_eq!(c.id, "hd");
    assert_eq!(c.eps, vec![0.02, 0.01, 0.005, 0.0025]);
    assert_eq!(c.mesh.resolution, 10);
    assert_eq!(c.m, 2);
    assert_eq!(c.compiled.f.eval(&[2.0, 0.0, 0.0], 0.1), 3.0);
    // Unset data keeps the catalog value.
    assert_eq!(c.data.h, "0");
}

#[test]
fn family_case_with_defaults() {
    let cfg = parse(
        r#"
[case.fillet]
family = "fillet"
extension = "custom-arc"
eps = [0.5]
reference_factor = 2
direct = false

[case.fillet.data]
h = "cos(pi*x)"
"#,
    )
    .unwrap();
    let c = &cfg.cases[0];
    assert_eq!(c.extension, ExtensionChoice::CustomArc);
    assert_eq!(c.reference_factor, 2);
    assert!(!c.solver.direct);
    assert_eq!(cfg.output.formats, vec![Format::Csv]);
    assert!(cfg.output.timing);
}

#[test]
fn invalid_configurations() {
    for text in [
        "",
        "[case.a]\neps = [0.1]\n",
        "[case.a]\nfamily = \"nope\"\neps = [0.1]\n",
        "[case.a]\nfamily = \"round\"\neps = [0.1, 0.2]\n",
        "[case.a]\nfamily = \"round\"\neps = [-0.1]\n",
        "[case.a]\nfamily = \"round\"\neps = [0.1]\nsweep = { first = 0.1, ratio = 0.5, count = 2 }\n",
        "[case.a]\nfamily = \"round\"\nsweep = { first = 0.1, ratio = 2.0, count = 2 }\n",
        "[case.a]\nfamily = \"round\"\neps = [0.1]\nresolution = 1\n",
        "[case.a]\nfamily = \"round\"\neps = [0.1]\nbogus = 1\n",
        "[case.a]\nfamily = \"round\"\neps = [0.1]\n[case.a.data]\nf = \"x +\"\n",
        "[case.a]\ncatalog = \"no.such\"\n",
        "[output]\nformats = [\"xml\"]\n[case.a]\nfamily = \"round\"\neps = [0.1]\n",
    ] {
        let e = parse(text);
        assert!(e.is_err(), "accepted: {text}");
        assert_eq!(e.unwrap_err().exit_code(), 2);
    }
}
