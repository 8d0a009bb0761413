use defeature::report::{from_json, strip_timing, to_csv, to_json, CSV_HEADER};
use defeature::run::{run_points, summarize, SweepReport};
use defeature::{catalog, emit_report, Format};

fn empty() -> SweepReport {
    SweepReport { case: "empty".into(), title: String::new(), cases: Vec::new(), summary: summarize(&[]), failure: None }
}

fn small(id: &str, eps: Vec<f64>) -> SweepReport {
    let mut spec = catalog::case(id).unwrap();
    spec.eps = eps;
    run_points(&spec, 2).unwrap()
}

#[test]
fn empty_sweep_is_header_only() {
    assert_eq!(to_csv(&empty()), format!("{CSV_HEADER}\n"));
}

#[test]
fn csv_rows_have_seventeen_digits() {
    let r = small("fig7.neg.corner", vec![1e-2, 5e-3]);
    let csv = to_csv(&r);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 8);
        for c in cells {
            let mantissa = c.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{c}");
            c.parse::<f64>().unwrap();
        }
    }
    assert_eq!(lines[1].split(',').next().unwrap().parse::<f64>().unwrap(), 1e-2);
}

#[test]
fn multi_feature_cases_list_each_feature_then_the_total() {
    let r = small("fig7.complex.offset", vec![1e-2]);
    assert_eq!(r.cases[0].features.len(), 1);
    let spec = catalog::case("table2.twoholes").unwrap();
    let r = run_points(&spec, 1).unwrap();
    let csv = to_csv(&r);
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], "nan");
    assert_ne!(rows[2][1], "nan");
    let e: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!((e[0] + e[1] - e[2]).abs() <= 1e-15 * e[2]);
}

#[test]
fn json_round_trip_is_exact() {
    let r = small("fig7.pos.halfdisk", vec![1e-2, 5e-3]);
    let back = from_json(&to_json(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn runs_are_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for threads in [1, 3] {
        let mut spec = catalog::case("fig7.neg.halfdisk").unwrap();
        spec.eps.truncate(3);
        let mut r = run_points(&spec, threads).unwrap();
        strip_timing(&mut r);
        let path = emit_report(&r, Format::Csv, dir.path()).unwrap();
        texts.push(std::fs::read(path).unwrap());
        let json = emit_report(&r, Format::Json, dir.path()).unwrap();
        texts.push(std::fs::read(json).unwrap());
    }
    assert_eq!(texts[0], texts[2]);
    assert_eq!(texts[1], texts[3]);
}

#[test]
fn failures_stop_the_sweep_and_keep_earlier_points() {
    let mut spec = catalog::case("fig7.neg.halfdisk").unwrap();
    // 0.6 is too large for a half disk on the unit square.
    spec.eps = vec![0.6, 0.01];
    let r = run_points(&spec, 1).unwrap();
    assert!(r.cases.is_empty());
    let f = r.failure.unwrap();
    assert_eq!(f.eps, 0.6);
    assert_eq!(f.exit_code, 2);
}
