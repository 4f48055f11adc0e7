//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned here.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process fails when the set of failing criteria differs from
//! `EXPECTED_FAILURES`, and a criterion listed there must fail for exactly the
//! documented reason (see `equivalence_suite`).

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::process::{Command, ExitCode};

use nalgebra::DVector;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;
use slantsub::cli::{build_fixture, fixture_names, run, subject_from_fixture, Command as Run, Fixture, RunConfig};
use slantsub::geometry::{builtin_by_name, structure_residuals_at};
use slantsub::map_analysis::{frame_at, slant_angle, DEFAULT_TOL_RANK, MIN_DIRECTIONS};
use slantsub::oneill::{
    closed_form_a_residual, lemma_residuals, oneill_tensors, second_fundamental_form, skew_symmetry_residuals,
    tension_conformal_formula, tensoriality_residual, Extension,
};
use slantsub::sampling::sample_points;
use slantsub::{parse, Analysis, Neighborhood, SmoothMapSpec, Status, Tolerances, Truth};

const SEED: u64 = 0xACCE;
const SAMPLES: usize = 20;
const PAIRINGS: [&str; 2] = ["identity", "cross"];

const EQUIVALENCES: [&str; 8] = [
    "thm-integrability",
    "thm-homothety",
    "thm-horiz-geodesic",
    "thm-vert-geodesic",
    "cor-harmonic",
    "thm-eker-mu",
    "thm-tot-geodesic-map",
    "thm-local-product",
];

/// Criteria that are expected to fail, with the analysis recorded alongside
/// the equivalence suite.
const EXPECTED_FAILURES: [u32; 1] = [8];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Collects failures; the criterion passes when none were recorded.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    facts: Vec<String>,
}

impl Tally {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn fact(&mut self, what: impl Into<String>) {
        self.facts.push(what.into());
    }

    fn outcome(self) -> Outcome {
        let pass = self.failures.is_empty();
        let mut parts = self.facts;
        parts.extend(self.failures.into_iter().map(|f| format!("FAILED {f}")));
        Outcome::new(pass, parts.join("; "))
    }
}

fn fixture(name: &str, params: &[(&str, Value)]) -> Fixture {
    let p: BTreeMap<String, Value> = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    build_fixture(name, &p).unwrap()
}

fn with_pairing(name: &str, pairing: &str) -> Fixture {
    fixture(name, &[("pairing", Value::from(pairing))])
}

fn analysis(map: &SmoothMapSpec) -> Analysis<'_> {
    Analysis::new(map, SAMPLES, SEED, Tolerances::default()).unwrap()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn dilation_error(a: &Analysis<'_>, lambda: f64) -> f64 {
    relative(a.conformality.dilation_min, lambda).max(relative(a.conformality.dilation_max, lambda))
}

fn structure_suite() -> Outcome {
    let mut t = Tally::default();
    for name in ["cosym_r5", "cosym_r7"] {
        let (m, acs) = builtin_by_name(name).unwrap();
        let (mut algebraic, mut parallel) = (0.0_f64, 0.0_f64);
        for p in sample_points(m.domain_box(), 50, SEED) {
            let r = structure_residuals_at::<f64>(&m, &acs, &p).unwrap();
            algebraic = algebraic.max(r.algebraic).max(r.compatibility);
            parallel = parallel.max(r.parallel);
        }
        t.fact(format!("{name} algebraic {algebraic:.1e} parallel {parallel:.1e}"));
        t.require(algebraic < 1e-10, format!("{name} algebraic residual"));
        t.require(parallel < 1e-9, format!("{name} parallel residual"));
    }
    t.outcome()
}

fn psi2_reproduction() -> Outcome {
    let mut t = Tally::default();
    let f = with_pairing("psi2", "identity");
    let a = analysis(&f.map);
    let angle_err = (a.slant.mean - FRAC_PI_4).abs().max(a.slant.spread);
    let dil_err = dilation_error(&a, PI.powi(5));
    t.fact(format!("angle err {angle_err:.1e} dilation rel err {dil_err:.1e}"));
    t.require(angle_err < 1e-8, "slant angle pi/4");
    t.require(dil_err < 1e-8, "dilation pi^5");
    t.require(a.conformality.is_homothetic, "homothetic");
    // ∂u1 + ∂u2, ∂v1, ∂t
    let s = 0.5_f64.sqrt();
    let stated = [
        DVector::from_vec(vec![s, s, 0.0, 0.0, 0.0]),
        DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]),
        DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0, 1.0]),
    ];
    let mut worst = 0.0_f64;
    for p in &a.points {
        let frame = frame_at::<f64>(&f.map, p, DEFAULT_TOL_RANK).unwrap();
        for h in &stated {
            worst = worst.max((h - common::projection(&frame.vertical, h)).norm());
        }
    }
    t.fact(format!("kernel distance {worst:.1e}"));
    t.require(worst < 1e-10, "stated kernel directions");
    t.outcome()
}

fn psi3_reproduction() -> Outcome {
    let mut t = Tally::default();
    for pairing in PAIRINGS {
        let f = with_pairing("psi3", pairing);
        let a = analysis(&f.map);
        let dil_err = dilation_error(&a, 11f64.exp());
        t.fact(format!("{pairing}: angle {:.10} spread {:.1e}", a.slant.mean, a.slant.spread));
        t.require(dil_err < 1e-8, format!("{pairing} dilation e^11"));
        t.require(a.slant.spread < 1e-6, format!("{pairing} constant angle"));
        if pairing == "identity" {
            let oracle: Vec<f64> = a.points.iter().flat_map(|p| common::grid_angles(&f.map, p, 721)).collect();
            let gap = oracle.iter().map(|w| (w - a.slant.mean).abs()).fold(0.0, f64::max);
            t.fact(format!("identity vs grid oracle {gap:.1e}"));
            t.require(gap < 1e-4, "identity value against the grid oracle");
        }
        let subject = subject_from_fixture("psi3", &f.params).unwrap();
        let report = run(&subject, &RunConfig::default(), Run::Analyze, false).unwrap();
        let named = report.notes.iter().any(|n| n.contains(&format!("pairing '{pairing}'")));
        t.require(named, format!("{pairing} report names the pairing"));
        if pairing == "identity" {
            let flagged = report.notes.iter().any(|n| n.contains("is not reproduced under pairing 'identity'"));
            t.require(flagged, "identity report flags the documented angle");
        }
    }
    t.outcome()
}

fn psi1_formula() -> Outcome {
    let mut t = Tally::default();
    for (alpha, beta) in [(FRAC_PI_6, FRAC_PI_6), (FRAC_PI_4, FRAC_PI_8), (0.3, 0.9)] {
        let f = fixture(
            "psi1",
            &[
                ("alpha", Value::from(alpha)),
                ("beta", Value::from(beta)),
                ("pairing", Value::from("cross")),
            ],
        );
        let a = analysis(&f.map);
        let expected = (alpha + beta).cos().abs();
        let worst = a
            .slant
            .per_point
            .iter()
            .flat_map(|p| p.angles.iter())
            .map(|w| (w.cos() - expected).abs())
            .fold(0.0, f64::max);
        let dil_err = dilation_error(&a, 7f64.exp());
        t.fact(format!("({alpha:.4}, {beta:.4}) cos err {worst:.1e}"));
        t.require(worst < 1e-8, format!("cos w at ({alpha}, {beta})"));
        t.require(dil_err < 1e-8, format!("dilation e^7 at ({alpha}, {beta})"));
    }
    t.outcome()
}

fn d_calculus() -> Outcome {
    let mut t = Tally::default();
    let mut worst = 0.0_f64;
    let mut covered = 0;
    for name in fixture_names() {
        for pairing in PAIRINGS {
            let f = with_pairing(name, pairing);
            let a = analysis(&f.map);
            if !a.slant.classification.is_slant() {
                continue;
            }
            covered += 1;
            for id in ["thm-D2", "cor-3.14-3.15", "lemma-3.5-3.8"] {
                let v = a.run(id).unwrap();
                let r = v.lhs_residual.unwrap_or(0.0).max(v.rhs_residual.unwrap_or(0.0));
                worst = worst.max(r);
                t.require(
                    v.status == Status::Pass && r < 1e-8 && v.points_sampled >= 20,
                    format!("{id} on {name}/{pairing}"),
                );
            }
        }
    }
    t.fact(format!("{covered} slant fixtures, worst residual {worst:.1e}"));
    t.require(covered > 0, "no slant fixture");
    t.outcome()
}

fn neighborhood(m: &SmoothMapSpec, p: &[f64], ext: Extension) -> Neighborhood {
    let frame = frame_at::<f64>(m, p, DEFAULT_TOL_RANK).unwrap();
    Neighborhood::new(m, frame, ext).unwrap()
}

fn oneill_suite() -> Outcome {
    let mut t = Tally::default();
    let (mut skew, mut tensorial, mut lemma, mut closed) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for name in fixture_names() {
        for pairing in PAIRINGS {
            let f = with_pairing(name, pairing);
            for p in sample_points(f.map.source().domain_box(), 5, SEED) {
                let nb = neighborhood(&f.map, &p, Extension::Projected);
                let o = oneill_tensors(&nb);
                let s = second_fundamental_form(&nb, &o);
                let k = skew_symmetry_residuals(&nb, &o);
                skew = skew.max(k.a_skew).max(k.t_skew);
                let l = lemma_residuals(&nb, &o, &s);
                lemma = lemma.max(l.horizontal).max(l.vertical).max(l.mixed);
                let other = neighborhood(&f.map, &p, Extension::Scaled);
                tensorial = tensorial.max(tensoriality_residual(&nb, &other));
                if name == "psi2_squared" {
                    closed = closed.max(closed_form_a_residual(&f.map, &nb, &o).unwrap());
                }
            }
        }
    }
    t.fact(format!(
        "skew {skew:.1e} closed-form A {closed:.1e} tensoriality {tensorial:.1e} lemma {lemma:.1e}"
    ));
    t.require(skew < 1e-6, "skew-symmetry");
    t.require(closed < 1e-6, "closed-form A on psi2_squared");
    t.require(tensorial < 1e-6, "extension independence");
    t.require(lemma < 1e-6, "lemma closed forms");
    t.outcome()
}

fn tension_suite() -> Outcome {
    let mut t = Tally::default();
    let mut gap = 0.0_f64;
    let mut affine_tension = 0.0_f64;
    for name in fixture_names() {
        for pairing in PAIRINGS {
            let f = with_pairing(name, pairing);
            for p in sample_points(f.map.source().domain_box(), 8, SEED) {
                let nb = neighborhood(&f.map, &p, Extension::Projected);
                let o = oneill_tensors(&nb);
                let s = second_fundamental_form(&nb, &o);
                let formula = tension_conformal_formula(&nb, &s);
                gap = gap.max((&s.tension - formula).norm() / nb.dilation);
                if ["psi1", "psi2", "psi3"].contains(&name) {
                    affine_tension = affine_tension.max(s.tension.norm() / nb.dilation);
                }
            }
        }
    }
    t.fact(format!("trace vs formula {gap:.1e}, |tau|/lambda on psi1-3 {affine_tension:.1e}"));
    t.require(gap < 1e-5, "trace against the conformal formula");
    t.require(affine_tension < 1e-5, "harmonic linear fixtures");
    for name in ["psi2", "psi2_squared"] {
        for pairing in PAIRINGS {
            let f = with_pairing(name, pairing);
            let v = analysis(&f.map).run("cor-harmonic").unwrap();
            t.require(v.status == Status::Pass, format!("dim B = 2 corollary on {name}/{pairing}"));
        }
    }
    t.outcome()
}

/// Every disagreement found, as `fixture/pairing:check`.
fn equivalence_suite() -> (Outcome, BTreeSet<String>) {
    let mut t = Tally::default();
    let mut disagreements = BTreeSet::new();
    let mut false_side: BTreeMap<&str, Vec<String>> = EQUIVALENCES.iter().map(|id| (*id, Vec::new())).collect();
    let mut indeterminate = 0;
    for name in fixture_names() {
        for pairing in PAIRINGS {
            let f = with_pairing(name, pairing);
            let a = analysis(&f.map);
            for v in a.run_all(&EQUIVALENCES) {
                match v.status {
                    Status::Fail => {
                        disagreements.insert(format!("{name}/{pairing}:{}", v.check_id));
                    }
                    Status::Indeterminate => indeterminate += 1,
                    _ => {}
                }
                if v.status == Status::Pass && v.side_i == Some(Truth::False) && v.side_ii == Some(Truth::False) {
                    false_side.get_mut(v.check_id.as_str()).unwrap().push(format!("{name}/{pairing}"));
                }
            }
        }
    }
    t.require(indeterminate == 0, format!("{indeterminate} indeterminate verdicts"));
    for (id, witnesses) in &false_side {
        t.require(!witnesses.is_empty(), format!("{id} never agrees on false"));
    }
    if !disagreements.is_empty() {
        t.failures.push(format!(
            "sides disagree on {} (two-dimensional horizontal space with mu = 0: the dilation terms cancel \
             identically, so the identity holds on a non-homothetic map)",
            disagreements.iter().cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    (t.outcome(), disagreements)
}

/// The disagreements the equivalence suite is allowed to report.
fn documented_disagreements() -> BTreeSet<String> {
    PAIRINGS
        .iter()
        .flat_map(|p| {
            ["thm-homothety", "thm-horiz-geodesic"]
                .iter()
                .map(move |id| format!("psi2_squared/{p}:{id}"))
        })
        .collect()
}

fn oracle_suite() -> Outcome {
    let mut t = Tally::default();
    let mut worst_angle = 0.0_f64;
    for name in fixture_names() {
        for pairing in PAIRINGS {
            let f = with_pairing(name, pairing);
            for p in sample_points(f.map.source().domain_box(), 4, SEED) {
                let oracle = common::grid_angles(&f.map, &p, 721);
                let ours = slant_angle::<f64>(&f.map, std::slice::from_ref(&p), MIN_DIRECTIONS, 1e-6).unwrap();
                let (lo, hi) = oracle
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &w| (lo.min(w), hi.max(w)));
                let gap = (lo - ours.min).abs().max((hi - ours.max).abs());
                worst_angle = worst_angle.max(gap);
            }
        }
    }
    t.require(worst_angle < 1e-4, "projection angle against the grid oracle");

    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = (common::expression(4, 4), common::point(4));
    let mut worst_grad = 0.0_f64;
    for _ in 0..1000 {
        let (src, p) = strategy.new_tree(&mut runner).unwrap().current();
        let e = parse(&src, 4).unwrap();
        let dual = e.eval_dual(&p).unwrap();
        for (d, fd) in dual.derivatives.iter().zip(common::five_point_gradient(&e, &p)) {
            worst_grad = worst_grad.max((d - fd).abs() / d.abs().max(1.0));
        }
    }
    t.fact(format!("angle gap {worst_angle:.1e}, gradient rel err {worst_grad:.1e} over 1000 expressions"));
    t.require(worst_grad < 1e-6, "forward mode against central differences");
    t.outcome()
}

fn determinism() -> Outcome {
    let mut t = Tally::default();
    for args in [
        ["verify", "--fixture", "psi3_inverted", "--param", "pairing=cross"],
        ["verify", "--fixture", "psi1", "--param", "alpha=0.3"],
    ] {
        let invoke = || {
            Command::new(env!("CARGO_BIN_EXE_slantsub"))
                .args(args)
                .args(["--format", "json"])
                .output()
                .unwrap()
                .stdout
        };
        let (first, second) = (invoke(), invoke());
        t.require(!first.is_empty() && first == second, format!("{} differs", args[2]));
    }
    t.fact("two verify runs per fixture compared byte for byte");
    t.outcome()
}

fn main() -> ExitCode {
    let start = std::time::Instant::now();
    let (equivalence, disagreements) = equivalence_suite();
    let outcomes: Vec<(u32, &str, Outcome)> = vec![
        (1, "structure suite", structure_suite()),
        (2, "psi2 reproduction", psi2_reproduction()),
        (3, "psi3 reproduction", psi3_reproduction()),
        (4, "psi1 formula", psi1_formula()),
        (5, "D-calculus suite", d_calculus()),
        (6, "O'Neill suite", oneill_suite()),
        (7, "tension suite", tension_suite()),
        (8, "equivalence suite", equivalence),
        (9, "oracle suite", oracle_suite()),
        (10, "determinism", determinism()),
    ];
    let mut failed = BTreeSet::new();
    for (n, name, o) in &outcomes {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let expected = if !o.pass && EXPECTED_FAILURES.contains(n) { " (expected)" } else { "" };
        println!("criterion {n:>2} {name:<20} {verdict}{expected}: {}", o.detail);
        if !o.pass {
            failed.insert(*n);
        }
    }
    println!("acceptance ran in {:.1} s", start.elapsed().as_secs_f64());
    let expected: BTreeSet<u32> = EXPECTED_FAILURES.into_iter().collect();
    let mut ok = failed == expected;
    if disagreements != documented_disagreements() {
        println!("equivalence disagreements differ from the documented set: {disagreements:?}");
        ok = false;
    }
    if !ok {
        println!("failing criteria {failed:?}, expected {expected:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}

