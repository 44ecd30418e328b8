//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use addobs_core::chsh::{
    build_o_operators, certify_nonlocality, f_max_closed_form, f_value, find_anchor_entries,
    grid_verify, o_expectations, o_expectations_direct, GridConfig,
};
use addobs_core::corpus::{seed_from_env, Corpus};
use addobs_core::entanglement::{certify, find_crossed_entries, Status};
use addobs_core::higgs::{f12_parity, f13_parity, reproduce_tables, significance, Measurement};
use addobs_core::linalg::{eigenvalues_hermitian, partial_transpose, CMatrix, Complex, Hermitian};
use addobs_core::structure::{AdditiveStructure, DensityMatrix};
use addobs_core::Tolerances;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run(id: u8, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let pass = out.pass && in_time;
    println!(
        "criterion {id} {} {name}: {} [{:.2} s, budget {} s{}]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    pass
}

fn table_reproduction() -> Outcome {
    let report = reproduce_tables();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for col in &report.columns {
        for r in [col.f12, col.f13] {
            worst = worst.max((r.computed - r.printed).abs());
            count += 1;
        }
    }
    let spot12 = f12_parity(0.33, 0.20);
    let spot13 = f13_parity(0.20);
    let pass = count == 16
        && worst <= 0.02
        && (spot12 - 2.47).abs() <= 0.01
        && (spot13 - 2.33).abs() <= 0.01;
    outcome(
        pass,
        format!("{count} F values, max |computed - printed| = {worst:.4}; F12(0.33, 0.20) = {spot12:.4}, F13(0.20) = {spot13:.4}"),
    )
}

fn significance_reproduction() -> Outcome {
    let report = reproduce_tables();
    let mut admitted = 0;
    let mut total = 0;
    let mut notes = Vec::new();
    for col in &report.columns {
        for r in [col.f12_sigma, col.f13_sigma] {
            total += 1;
            if r.pass {
                admitted += 1;
            }
            if r.rounding_note {
                notes.push(format!("{:.2} vs printed {:.1}", r.computed, r.printed));
            }
        }
    }
    let example = significance(&Measurement::new(0.20, 0.12)).map(|s| format!("{s:.1}"));
    let pass = admitted == total && example.as_deref() == Ok("1.7");
    outcome(
        pass,
        format!(
            "{admitted}/{total} significances inside the rounding interval; 0.20/0.12 -> {}; admitted only through input rounding: {}",
            example.unwrap_or_else(|e| e.to_string()),
            if notes.is_empty() { "none".to_string() } else { notes.join(", ") }
        ),
    )
}

fn anchored_corpus(
    seed: u64,
    n: usize,
    tol: &Tolerances,
) -> Vec<(DensityMatrix, AdditiveStructure)> {
    let mut corpus = Corpus::new(seed);
    (0..n)
        .map(|_| {
            let (rho, s, _) = corpus.anchored_state(4, 5, tol);
            (rho, s)
        })
        .collect()
}

fn closed_form_vs_grid(states: &[(DensityMatrix, AdditiveStructure)], tol: &Tolerances) -> Outcome {
    let cfg = GridConfig::default();
    let mut worst_grid: f64 = 0.0;
    let mut worst_angles: f64 = 0.0;
    let mut above = 0;
    for (rho, s) in states {
        let anchor = find_anchor_entries(rho, s, tol).unwrap().remove(0);
        let cert = f_max_closed_form(rho, s, &anchor, tol).unwrap();
        let grid = grid_verify(rho, s, &anchor, &cfg).unwrap();
        worst_grid = worst_grid.max((cert.f_max - grid.f_max).abs());
        if grid.f_max > cert.f_max + 1e-9 {
            above += 1;
        }
        let reordered = cert.reorder.apply(rho.matrix());
        let at_opt = f_value(&reordered, &cert.observables()).unwrap();
        worst_angles = worst_angles.max((at_opt - cert.f_max).abs());
    }
    let pass = states.len() >= 200 && worst_grid <= 1e-4 && worst_angles <= 1e-10 && above == 0;
    outcome(
        pass,
        format!(
            "{} anchored states up to 4x5, max |closed - grid| = {worst_grid:.2e}, max |F(opt) - fMax| = {worst_angles:.2e}, grid above closed form: {above}",
            states.len()
        ),
    )
}

fn min_pt_eigenvalue(rho: &DensityMatrix, s: &AdditiveStructure) -> f64 {
    let pt = partial_transpose(rho.matrix(), s.d_a(), s.d_b()).unwrap();
    eigenvalues_hermitian(&Hermitian::new(pt).unwrap())[0]
}

fn crossed_entries_imply_npt(seed: u64, tol: &Tolerances) -> Outcome {
    let mut corpus = Corpus::new(seed);
    let mut checked = 0;
    let mut failures = 0;
    let mut largest: f64 = f64::NEG_INFINITY;
    while checked < 500 {
        let s = corpus.structure(4, 5);
        let sparsity = [0.0, 0.3, 0.6][checked % 3];
        let rho = corpus.shell_state(&s, 4, sparsity);
        if find_crossed_entries(&rho, &s, tol).unwrap().is_empty() {
            continue;
        }
        checked += 1;
        let min = min_pt_eigenvalue(&rho, &s);
        largest = largest.max(min);
        if min >= -1e-12 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{checked} states with a crossed entry, {failures} without a PT eigenvalue below -1e-12 (largest minimum {largest:.3e})"),
    )
}

fn type1_iff(seed: u64, tol: &Tolerances) -> Outcome {
    let mut corpus = Corpus::new(seed);
    let mut mismatches = 0;
    let (mut entangled, mut separable) = (0, 0);
    for k in 0..600 {
        let s = corpus.type1_structure(5);
        let rho = match k % 3 {
            0 => corpus.shell_state(&s, 3, 0.0),
            1 => corpus.shell_state(&s, 2, 0.7),
            _ => corpus.product_mixture(&s, 1 + k % 5),
        };
        let crossed = !find_crossed_entries(&rho, &s, tol).unwrap().is_empty();
        let status = certify(&rho, &s, tol).unwrap().status;
        if crossed != (status == Status::EntangledCertified) {
            mismatches += 1;
        }
        match status {
            Status::EntangledCertified => entangled += 1,
            Status::SeparableCertified => separable += 1,
            Status::InconclusivePptPasses => mismatches += 1,
        }
    }

    let mut false_positives = 0;
    for k in 0..300 {
        let s = corpus.type1_structure(5);
        let rho = corpus.product_mixture(&s, 1 + k % 6);
        if certify(&rho, &s, tol).unwrap().status != Status::SeparableCertified {
            false_positives += 1;
        }
    }
    outcome(
        mismatches == 0 && false_positives == 0 && entangled > 0 && separable > 0,
        format!(
            "600 Type1 states ({entangled} entangled, {separable} separable), {mismatches} iff mismatches; 300 product mixtures, {false_positives} false positives"
        ),
    )
}

fn bell() -> (DensityMatrix, AdditiveStructure) {
    let h = Complex::new(0.5, 0.0);
    let z = Complex::new(0.0, 0.0);
    let m = CMatrix::from_rows(&[
        vec![z, z, z, z],
        vec![z, h, h, z],
        vec![z, h, h, z],
        vec![z, z, z, z],
    ])
    .unwrap();
    (
        DensityMatrix::new(m).unwrap(),
        AdditiveStructure::new(vec![0.5, -0.5], vec![0.5, -0.5], 0.0).unwrap(),
    )
}

fn tsirelson(
    states: &[(DensityMatrix, AdditiveStructure)],
    seed: u64,
    tol: &Tolerances,
) -> Outcome {
    let (rho, s) = bell();
    let bell_max = certify_nonlocality(&rho, &s, tol).unwrap().unwrap().f_max;
    let bound = 2.0 * SQRT_2;

    let mut corpus = Corpus::new(seed);
    let extra: Vec<_> = (0..300)
        .map(|k| {
            let s = corpus.structure(4, 5);
            let rho = corpus.shell_state(&s, 1 + k % 3, [0.0, 0.4][k % 2]);
            (rho, s)
        })
        .collect();
    let mut highest: f64 = 0.0;
    let mut evaluated = 0;
    for (rho, s) in states.iter().chain(&extra) {
        for anchor in find_anchor_entries(rho, s, tol).unwrap() {
            highest = highest.max(f_max_closed_form(rho, s, &anchor, tol).unwrap().f_max);
            evaluated += 1;
        }
    }
    let pass = (bell_max - bound).abs() <= 1e-12 && highest <= bound + 1e-9;
    outcome(
        pass,
        format!("Bell fMax - 2sqrt2 = {:.1e}; {evaluated} anchors over {} states, highest fMax {highest:.12}", bell_max - bound, states.len() + extra.len()),
    )
}

/// Entry of the block layout: Alice blocks of size `d_b`, each filled by the
/// rule for that operator.
fn expected_o(which: char, d_a: usize, d_b: usize) -> CMatrix {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let sign = |i: usize| if i == 1 { -1.0 } else { 1.0 };
    CMatrix::from_fn(d_a * d_b, |r, c| {
        let (i, p) = (r / d_b, r % d_b);
        let (j, q) = (c / d_b, c % d_b);
        let alice_swap = (i < 2 && j < 2 && i != j) || (i >= 2 && i == j);
        match which {
            '0' if i == j && p == q && p >= 2 => one * sign(i),
            'z' if i == j && p == q && p < 2 => one * sign(i) * sign(p),
            'x' if alice_swap && p < 2 && q < 2 && p != q => one,
            'y' if alice_swap && p == 0 && q == 1 => Complex::new(0.0, -1.0),
            'y' if alice_swap && p == 1 && q == 0 => Complex::new(0.0, 1.0),
            _ => zero,
        }
    })
}

fn operator_layout(
    states: &[(DensityMatrix, AdditiveStructure)],
    seed: u64,
    tol: &Tolerances,
) -> Outcome {
    let mut layout_ok = true;
    for (d_a, d_b) in [(2, 2), (3, 3), (3, 4), (4, 3)] {
        let ops = build_o_operators(d_a, d_b).unwrap();
        for (op, key) in [
            (&ops.o0, '0'),
            (&ops.oz, 'z'),
            (&ops.ox, 'x'),
            (&ops.oy, 'y'),
        ] {
            layout_ok &= op.matrix() == &expected_o(key, d_a, d_b);
        }
    }

    let mut corpus = Corpus::new(seed);
    let mut matrices: Vec<(CMatrix, usize, usize)> = Vec::new();
    for (rho, s) in states {
        let anchor = find_anchor_entries(rho, s, tol).unwrap().remove(0);
        let cert = f_max_closed_form(rho, s, &anchor, tol).unwrap();
        matrices.push((cert.reorder.apply(rho.matrix()), s.d_a(), s.d_b()));
    }
    for _ in 0..200 {
        let s = corpus.structure(4, 5);
        matrices.push((
            corpus.shell_state(&s, 3, 0.2).matrix().clone(),
            s.d_a(),
            s.d_b(),
        ));
    }
    let mut worst: f64 = 0.0;
    for (m, d_a, d_b) in &matrices {
        let formula = o_expectations(m, *d_a, *d_b);
        let direct = o_expectations_direct(m, &build_o_operators(*d_a, *d_b).unwrap()).unwrap();
        for (x, y) in [
            (formula.o0, direct.o0),
            (formula.ox, direct.ox),
            (formula.oy, direct.oy),
            (formula.oz, direct.oz),
        ] {
            worst = worst.max((x - y).abs());
        }
    }
    outcome(
        layout_ok && worst <= 1e-12,
        format!(
            "block layout {} for (2,2), (3,3), (3,4), (4,3); entry formula vs Tr(rho O) on {} states, max diff {worst:.2e}",
            if layout_ok { "exact" } else { "MISMATCH" },
            matrices.len()
        ),
    )
}

fn anchor_simplifications(
    states: &[(DensityMatrix, AdditiveStructure)],
    tol: &Tolerances,
) -> Outcome {
    let mut worst_xy: f64 = 0.0;
    let mut worst_0z: f64 = 0.0;
    let mut anchors = 0;
    for (rho, s) in states {
        for anchor in find_anchor_entries(rho, s, tol).unwrap() {
            let o = f_max_closed_form(rho, s, &anchor, tol)
                .unwrap()
                .expectations;
            worst_xy =
                worst_xy.max((o.ox * o.ox + o.oy * o.oy - 4.0 * anchor.value.norm_sqr()).abs());
            worst_0z = worst_0z.max((o.o0 + o.oz - 1.0).abs());
            anchors += 1;
        }
    }
    outcome(
        worst_xy <= 1e-12 && worst_0z <= 1e-12,
        format!("{anchors} anchors, max |ox^2 + oy^2 - 4|a|^2| = {worst_xy:.2e}, max |o0 + oz - 1| = {worst_0z:.2e}"),
    )
}

fn main() -> ExitCode {
    let seed = seed_from_env();
    let tol = Tolerances::default();
    println!(
        "acceptance suite, seed {seed}, parallel = {}",
        addobs_core::par::is_parallel()
    );
    let secs = Duration::from_secs;

    let anchored = anchored_corpus(seed, 200, &tol);
    let results = [
        run(1, "table reproduction", secs(1), table_reproduction),
        run(
            2,
            "significance reproduction",
            secs(1),
            significance_reproduction,
        ),
        run(3, "closed form vs grid oracle", secs(60), || {
            closed_form_vs_grid(&anchored, &tol)
        }),
        run(
            4,
            "crossed entry implies negative partial transpose",
            secs(30),
            || crossed_entries_imply_npt(seed.wrapping_add(1), &tol),
        ),
        run(5, "Type1 iff and product mixtures", secs(30), || {
            type1_iff(seed.wrapping_add(2), &tol)
        }),
        run(6, "Tsirelson bound and Bell state", secs(5), || {
            tsirelson(&anchored, seed.wrapping_add(3), &tol)
        }),
        run(7, "O-operator layout and trace formula", secs(10), || {
            operator_layout(&anchored, seed.wrapping_add(4), &tol)
        }),
        run(8, "anchor simplifications", secs(10), || {
            anchor_simplifications(&anchored, &tol)
        }),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
