//! Acceptance run: one PASS/FAIL line per criterion, with the measured values.
//!
//! Exits 0 after printing so that the remaining test targets still run; set
//! `ACCEPTANCE_STRICT=1` to exit non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use defeature::case::Expected;
use defeature::check;
use defeature::run::{run_points, SweepReport};
use defeature::{catalog, CaseReport};

fn run(id: &str) -> SweepReport {
    let spec = catalog::case(id).unwrap_or_else(|e| panic!("{id}: {e}"));
    let report = run_points(&spec, 0).unwrap_or_else(|e| panic!("{id}: {e}"));
    if let Some(f) = &report.failure {
        panic!("{id}: ε = {}: {}", f.eps, f.message);
    }
    report
}

fn expected(id: &str) -> Expected {
    catalog::case(id).expect("catalog id").expected
}

fn within_rel(value: f64, target: f64, tol: f64) -> bool {
    ((value - target) / target).abs() <= tol
}

fn single(r: &SweepReport) -> &CaseReport {
    &r.cases[0]
}

struct Line {
    ok: bool,
    detail: Vec<String>,
}

impl Line {
    fn new() -> Self {
        Line { ok: true, detail: Vec::new() }
    }

    fn item(&mut self, ok: bool, text: String) {
        self.ok &= ok;
        self.detail.push(format!("{}{text}", if ok { "" } else { "✗ " }));
    }
}

fn table1() -> Line {
    let mut l = Line::new();
    for id in ["table1.star.a", "table1.circle.a", "table1.square", "table1.circle.b", "table1.star.b"] {
        let r = run(id);
        let c = single(&r);
        let p = expected(id);
        let (e, err, eff) = (c.estimator, c.error.unwrap(), c.effectivity.unwrap());
        let ok = within_rel(e, p.estimator.unwrap(), 0.15)
            && within_rel(err, p.error.unwrap(), 0.15)
            && (eff - p.effectivity.unwrap()).abs() <= 0.2
            && c.runtime_s < 120.0;
        l.item(ok, format!("{id}: E {e:.3e} err {err:.3e} eff {eff:.2} ({:.1}s)", c.runtime_s));
    }
    l
}

fn table2() -> Line {
    let mut l = Line::new();
    let r = run("table2.twoholes");
    let c = single(&r);
    // F¹ is the small hole in the steep corner of the solution, F² the large one.
    let perimeter = |k: usize| c.sigma.iter().filter(|s| s.feature == k).map(|s| s.measure).sum::<f64>();
    let (i1, i2) = if perimeter(0) < perimeter(1) { (0, 1) } else { (1, 0) };
    let (e1, e2) = (c.features[i1].estimator, c.features[i2].estimator);
    let ratio = e1 / e2;
    l.item(ratio >= 1e3, format!("E¹ {e1:.3e} E² {e2:.3e} ratio {ratio:.3e}"));
    let eff = c.effectivity.unwrap();
    l.item((eff - 3.47).abs() <= 0.6, format!("eff {eff:.2}"));
    l
}

fn sweep_line(l: &mut Line, id: &str, r: &SweepReport, slope_tol: f64, eff_tol: f64, spread: Option<f64>) {
    let p = expected(id);
    let s = &r.summary;
    let target = p.slope.unwrap();
    let (se, sr) = (s.slope_error.unwrap(), s.slope_estimator.unwrap());
    let mean = s.effectivity_mean.unwrap();
    let ratio = s.effectivity_max.unwrap() / s.effectivity_min.unwrap();
    let mut ok = (se - target).abs() <= slope_tol
        && (sr - target).abs() <= slope_tol
        && within_rel(mean, p.effectivity.unwrap(), eff_tol);
    if let Some(max) = spread {
        ok &= ratio <= max;
    }
    l.item(ok, format!("{id}: slopes err {se:.2} E {sr:.2} (target {target}), eff mean {mean:.2} max/min {ratio:.3}"));
}

const FIG7: [(&str, f64); 6] = [
    ("fig7.neg.halfdisk", 0.15),
    ("fig7.neg.corner", 0.2),
    ("fig7.pos.halfdisk", 0.15),
    ("fig7.pos.corner", 0.2),
    ("fig7.complex.offset", 0.15),
    ("fig7.complex.straddle", 0.15),
];

fn fig7(sweeps: &[(&str, SweepReport)]) -> Line {
    let mut l = Line::new();
    for ((id, tol), (_, r)) in FIG7.iter().zip(sweeps) {
        sweep_line(&mut l, id, r, *tol, 0.25, Some(1.25));
    }
    l
}

fn fig10() -> Line {
    let mut l = Line::new();
    let start = Instant::now();
    for (id, tol) in [("fig10.neg.box", 0.25), ("fig10.neg.corner", 0.3), ("fig10.pos.box", 0.25), ("fig10.pos.corner", 0.3)] {
        let r = run(id);
        sweep_line(&mut l, id, &r, tol, 0.30, None);
    }
    let t = start.elapsed().as_secs_f64();
    l.item(t < 1800.0, format!("total {t:.0}s"));
    l
}

fn fig11() -> Line {
    let mut l = Line::new();
    let r: Vec<SweepReport> = ["fig11.g1", "fig11.g2", "fig11.g3", "fig11.g4"].iter().map(|id| run(id)).collect();
    let se: Vec<f64> = r.iter().map(|r| r.summary.slope_error.unwrap()).collect();
    let sr: Vec<f64> = r.iter().map(|r| r.summary.slope_estimator.unwrap()).collect();
    l.item(se[0] > 0.0 && sr[0] > 0.0, format!("g1 slopes err {:.2} E {:.2}", se[0], sr[0]));
    l.item(se[1] < se[0] && sr[1] < sr[0], format!("g2 slopes err {:.2} E {:.2}", se[1], sr[1]));
    l.item(se[2].abs() <= 0.15 && sr[2].abs() <= 0.15, format!("g3 slopes err {:.2} E {:.2}", se[2], sr[2]));
    l.item(se[3] < -1.0 && sr[3] < -1.0, format!("g4 slopes err {:.2} E {:.2}", se[3], sr[3]));
    let mut tracked = 0;
    let mut pairs = 0;
    for s in &r {
        for w in s.cases.windows(2) {
            let de = w[1].error.unwrap() - w[0].error.unwrap();
            let dr = w[1].estimator - w[0].estimator;
            pairs += 1;
            tracked += usize::from(de.signum() == dr.signum());
        }
    }
    l.item(tracked == pairs, format!("direction tracked at {tracked}/{pairs} pairs"));
    l
}

fn rounds_fillets() -> Line {
    let mut l = Line::new();
    for id in ["table3.round.r1", "table3.round.r05", "table3.round.r025", "table3.round.r0125"] {
        let r = run(id);
        let eff = single(&r).effectivity.unwrap();
        let target = expected(id).effectivity.unwrap();
        l.item((eff - target).abs() <= 0.4, format!("{id}: eff {eff:.2} (expected {target})"));
    }
    let mut est = Vec::new();
    for id in ["table4.fillet.bbox", "table4.fillet.arc", "table4.fillet.identity"] {
        let r = run(id);
        let c = single(&r);
        let eff = c.effectivity.unwrap();
        let target = expected(id).effectivity.unwrap();
        l.item((eff - target).abs() <= 0.4, format!("{id}: E {:.3} eff {eff:.2} (expected {target})", c.estimator));
        est.push(c.estimator);
    }
    l.item(est[0] > est[1] && est[1] > est[2], String::from("ordering E(bbox) > E(arc) > E(identity)"));
    l
}

fn properties(fig7: &[(&str, SweepReport)]) -> Line {
    let mut l = Line::new();
    match check::run_all() {
        Ok(results) => {
            for r in results {
                l.item(r.passed, format!("{}: {}", r.name, r.detail));
            }
        }
        Err(e) => l.item(false, format!("invariant suite error: {e}")),
    }
    for (id, r) in fig7 {
        let (so, se) = (r.summary.slope_osc.unwrap(), r.summary.slope_estimator.unwrap());
        l.item(so > se + 0.3, format!("{id}: slope osc {so:.2} vs E {se:.2}"));
    }
    l
}

fn main() -> ExitCode {
    let fig7_sweeps: Vec<(&str, SweepReport)> = FIG7.iter().map(|(id, _)| (*id, run(id))).collect();
    let criteria: Vec<(&str, Box<dyn Fn() -> Line + '_>)> = vec![
        ("table 1 feature shapes", Box::new(table1)),
        ("table 2 feature sizes", Box::new(table2)),
        ("2D convergence", Box::new(|| fig7(&fig7_sweeps))),
        ("3D convergence", Box::new(fig10)),
        ("Neumann data study", Box::new(fig11)),
        ("rounds and fillets", Box::new(rounds_fillets)),
        ("property suite", Box::new(|| properties(&fig7_sweeps))),
    ];
    let mut passed = 0;
    let total = criteria.len();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = f();
        passed += usize::from(line.ok);
        println!(
            "criterion {} {name}: {} [{:.0}s] {}",
            i + 1,
            if line.ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            line.detail.join("; ")
        );
    }
    println!("acceptance: {passed}/{total} criteria passed");
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < total {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
