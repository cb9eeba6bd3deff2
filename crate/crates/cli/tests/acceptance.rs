//! Acceptance suite. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p bosent-cli --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bosent::fock::GeneratorSpec;
use bosent::povm::{integrated_g2_second_quantized, second_quantized_g2, validate_povm, OutcomeRegion, PovmSet};
use bosent::witnesses::{
    csi_ratio, integrated_g2m, number_squeezing_direct, number_squeezing_from_g2, number_squeezing_symmetric,
    number_squeezing_via_correlations, per_sector_csi, qfi, twin_fock_csi_exact,
};
use bosent::{
    CoherentSpinState, Complex64, FockVector, NumberSectorMixture, SectorDensity, SeparableEnsemble,
};
use bosent_cli::fig1::Fig1Table;
use bosent_cli::scan::ScanReport;
use bosent_cli::witness::WitnessOutput;
use bosent_cli::Document;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("fig1 reproduction", fig1_reproduction),
        ("exp(eps^2 N/2) approximation", approximation_check),
        ("dual-path twin-Fock CSI", dual_path_csi),
        ("number-squeezing identity", number_squeezing_identity),
        ("coherent-split example", coherent_split),
        ("separable-bound certification", separable_certification),
        ("twin-Fock entanglement detection", entanglement_detection),
        ("QFI properties", qfi_properties),
        ("POVM sum rule", povm_sum_rule),
        ("sector masking", sector_masking),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
}

fn bosent(args: &[&str]) -> (i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_bosent")).args(args).output().expect("binary runs");
    let elapsed = start.elapsed();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"), elapsed)
}

fn witness_file(dir: &Path, name: &str, spec: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, spec).unwrap();
    path.to_str().unwrap().to_string()
}

/// `h! (h-2m)! / ((h-m)!)^2` as an exact integer fraction, reduced at
/// every step so it stays within `u128`.
fn factorial_ratio_oracle(n: usize, m: usize) -> f64 {
    fn gcd(a: u128, b: u128) -> u128 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let h = (n / 2) as u128;
    let m = m as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for j in 0..m {
        num *= h - j;
        den *= h - m - j;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num as f64 / den as f64
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn fig1_reproduction() -> Outcome {
    let (code, out, elapsed) = bosent(&["fig1", "--n", "100,250,500,1000", "--orders", "2,4,6,8", "--format", "json"]);
    ensure!(code == 0, "exit code {code}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    let doc: Document<Fig1Table> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let rows = &doc.report.rows;
    ensure!(rows.len() == 16, "{} rows", rows.len());
    for r in rows {
        ensure!(r.exact > 1.0, "(N, 2m) = ({}, {}): {} <= 1", r.n, r.order_2m, r.exact);
        let oracle = factorial_ratio_oracle(r.n, r.order_2m / 2);
        ensure!(rel(r.exact, oracle) <= 1e-12, "(N, 2m) = ({}, {}): {} vs {oracle}", r.n, r.order_2m, r.exact);
    }
    let at = |n: usize, o: usize| rows.iter().find(|r| r.n == n && r.order_2m == o).map(|r| r.exact).unwrap();
    for n in [100, 250, 500, 1000] {
        ensure!([2, 4, 6, 8].windows(2).all(|w| at(n, w[1]) > at(n, w[0])), "not increasing in 2m at N = {n}");
    }
    for o in [2, 4, 6, 8] {
        ensure!([100, 250, 500, 1000].windows(2).all(|w| at(w[1], o) < at(w[0], o)), "not decreasing in N at 2m = {o}");
    }
    ensure!(rel(at(100, 2), 50.0 / 49.0) <= 1e-12, "C_2(100) = {}", at(100, 2));
    ensure!(rel(at(100, 8), 5527200.0 / 3916440.0) <= 1e-12, "C_8(100) = {}", at(100, 8));
    Ok(format!("16 values match the integer oracle, monotone, {elapsed:.0?}"))
}

fn approximation_check() -> Outcome {
    let (code, out, _) = bosent(&["fig1", "--format", "json"]);
    ensure!(code == 0, "exit code {code}");
    let doc: Document<Fig1Table> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let mut worst = (0.0, 0, 0);
    for r in &doc.report.rows {
        let eps = r.order_2m as f64 / r.n as f64;
        let approx = (eps * eps * r.n as f64 / 2.0).exp();
        let reported = r.approx.ok_or("missing approximation")?;
        ensure!(rel(reported, approx) < 1e-14, "approximation {reported} vs {approx}");
        let dev = (r.exact - approx).abs() / r.exact;
        ensure!((r.rel_dev.unwrap() - dev).abs() < 1e-14, "rel_dev column {} vs {dev}", r.rel_dev.unwrap());
        ensure!(dev <= 0.03, "(N, 2m) = ({}, {}): deviation {dev}", r.n, r.order_2m);
        if eps <= 0.02 + 1e-15 {
            ensure!(dev <= 1e-3, "(N, 2m) = ({}, {}), eps = {eps}: deviation {dev}", r.n, r.order_2m);
        }
        if dev > worst.0 {
            worst = (dev, r.n, r.order_2m);
        }
    }
    Ok(format!("worst deviation {:.4}% at (N, 2m) = ({}, {})", 100.0 * worst.0, worst.1, worst.2))
}

fn dual_path_csi() -> Outcome {
    let mut checked = 0;
    for n in [4usize, 8, 20, 100] {
        let psi = FockVector::twin_fock(n).map_err(|e| e.to_string())?;
        for m in 1..=n / 4 {
            let closed = twin_fock_csi_exact(n, m).map_err(|e| e.to_string())?;
            let via = csi_ratio(&integrated_g2m(&psi, m).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            ensure!((via - closed).abs() <= 1e-10 * closed.max(1.0), "N = {n}, m = {m}: {via} vs {closed}");
            let oracle = factorial_ratio_oracle(n, m);
            ensure!(rel(closed, oracle) <= 1e-12, "N = {n}, m = {m}: {closed} vs oracle {oracle}");
            checked += 1;
        }
    }
    Ok(format!("{checked} (N, m) pairs agree"))
}

fn symmetrized(rng: &mut ChaCha8Rng, n: usize) -> FockVector {
    let raw = FockVector::random(rng, n);
    let amps: Vec<Complex64> = (0..=n).map(|k| raw.amplitudes()[k.min(n - k)]).collect();
    FockVector::from_unnormalized(amps).unwrap()
}

fn number_squeezing_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let n = rng.gen_range(1..=30);
        let (direct, via) = match i % 3 {
            0 => {
                let psi = FockVector::random(&mut rng, n);
                (number_squeezing_direct(&psi), number_squeezing_via_correlations(&psi))
            }
            1 => {
                let rank = rng.gen_range(1..=4);
                let rho = SectorDensity::random(&mut rng, n, rank);
                (number_squeezing_direct(&rho), number_squeezing_via_correlations(&rho))
            }
            _ => {
                // a second, distinct sector
                let n2 = (n + rng.gen_range(1..=30)) % 31;
                let p: f64 = rng.gen_range(0.05..0.95);
                let mix = NumberSectorMixture::new(vec![
                    (p, SectorDensity::random(&mut rng, n, 2)),
                    (1.0 - p, SectorDensity::random(&mut rng, n2, 3)),
                ])
                .map_err(|e| e.to_string())?;
                (number_squeezing_direct(&mix), number_squeezing_via_correlations(&mix))
            }
        };
        let (direct, via) = (direct.map_err(|e| e.to_string())?, via.map_err(|e| e.to_string())?);
        worst = worst.max((direct - via).abs());
        ensure!((direct - via).abs() <= 1e-10, "state {i}: {direct} vs {via}");
    }

    let tf = FockVector::twin_fock(20).unwrap();
    let (d, v) = (number_squeezing_direct(&tf).unwrap(), number_squeezing_via_correlations(&tf).unwrap());
    ensure!(d.abs() <= 1e-10 && v.abs() <= 1e-10, "twin-Fock eta^2: {d}, {v}");

    // Symmetric shortcut, sign as derived from the correlation identity.
    let mut symmetric: Vec<FockVector> = vec![tf];
    symmetric.extend((0..50).map(|_| {
        let half = rng.gen_range(1..=15);
        symmetrized(&mut rng, 2 * half)
    }));
    for psi in &symmetric {
        let c = integrated_g2m(psi, 1).unwrap();
        let n = psi.n_total() as f64;
        let c2 = csi_ratio(&c).unwrap();
        let shortcut = number_squeezing_symmetric(c2, c.g_aa, n).unwrap();
        let direct = number_squeezing_direct(psi).unwrap();
        let via = number_squeezing_from_g2(&c, 0.0, n).unwrap();
        ensure!((shortcut - direct).abs() <= 1e-9 && (shortcut - via).abs() <= 1e-9, "shortcut {shortcut} vs {direct}, {via}");
    }
    // The minus-sign variant disagrees: twin-Fock would come out at 2.
    let c = integrated_g2m(&symmetric[0], 1).unwrap();
    let minus_sign = 1.0 - 2.0 * (1.0 - csi_ratio(&c).unwrap()) * c.g_aa / 20.0;
    ensure!((minus_sign - 2.0).abs() < 1e-9, "minus-sign variant gives {minus_sign}");
    Ok(format!("500 states, worst gap {worst:.1e}; twin-Fock eta^2 = 0; shortcut on {} symmetric states", symmetric.len()))
}

fn coherent_split() -> Outcome {
    let css = CoherentSpinState::new(0.3, 0.0, 50).map_err(|e| e.to_string())?;
    let psi = css.to_fock();
    let c = integrated_g2m(&psi, 1).map_err(|e| e.to_string())?;
    ensure!((c.g_aa - 220.5).abs() <= 1e-9, "G_aa = {}", c.g_aa);
    ensure!((c.g_ab - 514.5).abs() <= 1e-9, "G_ab = {}", c.g_ab);
    let analytic = SeparableEnsemble::single(css).analytic_correlations(1);
    ensure!((analytic.g_aa - 220.5).abs() <= 1e-9 && (analytic.g_ab - 514.5).abs() <= 1e-9, "closed form {analytic:?}");
    let c2 = csi_ratio(&c).unwrap();
    ensure!((c2 - 1.0).abs() <= 1e-10, "C_2 = {c2}");
    let eta2 = number_squeezing_direct(&psi).unwrap();
    ensure!((eta2 - 0.84).abs() <= 1e-10, "eta^2 = {eta2}");
    let via = number_squeezing_via_correlations(&psi).unwrap();
    ensure!((via - 0.84).abs() <= 1e-10, "eta^2 via correlations = {via}");

    let dir = tempfile::tempdir().unwrap();
    let spec = witness_file(dir.path(), "split.toml", "kind = \"coherent_spin\"\nn = 50\nz = 0.3\n");
    let (code, out, _) = bosent(&["witness", &spec, "-w", "all"]);
    ensure!(code == 0, "exit code {code}");
    let doc: Document<WitnessOutput> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let v = doc.report.report.verdicts;
    ensure!(!v.any(), "separable state flagged: {v:?}");
    Ok(format!("G_aa = {}, G_ab = {}, C_2 = {c2}, eta^2 = {eta2}, no flags", c.g_aa, c.g_ab))
}

fn separable_certification() -> Outcome {
    let mut notes = Vec::new();
    for (label, args) in [
        ("fixed N = 40", vec!["scan-separable", "--samples", "1000", "--n", "40", "--directions", "10", "--seed", "6"]),
        (
            "poisson:20",
            vec!["scan-separable", "--samples", "200", "--fluctuating", "poisson:20", "--directions", "10", "--seed", "6"],
        ),
    ] {
        let (code, out, elapsed) = bosent(&args);
        let doc: Document<ScanReport> = serde_json::from_str(&out).map_err(|e| format!("{label}: {e}"))?;
        let r = doc.report;
        ensure!(elapsed < Duration::from_secs(60), "{label}: took {elapsed:?}");
        for b in &r.bounds {
            ensure!(b.violations == 0, "{label}: {} violated {} times, worst {:?}", b.name, b.violations, b.worst_value);
            ensure!(b.evaluated > 0, "{label}: {} never evaluated", b.name);
        }
        ensure!(code == 0 && r.violations == 0, "{label}: exit {code}, {} violations", r.violations);
        let tol = |name: &str| r.bounds.iter().find(|b| b.name == name).map(|b| b.tolerance);
        ensure!(tol("csi") == Some(1e-9) && tol("qfi") == Some(1e-6) && tol("spin_squeezing") == Some(1e-9), "tolerances");
        notes.push(format!("{label}: {} samples, 0 violations, {elapsed:.1?}", r.samples));
    }
    Ok(notes.join("; "))
}

/// Dense `J_n` built from its ladder matrix elements.
fn spin_matrix_oracle(n: usize, dir: [f64; 3]) -> Vec<Vec<Complex64>> {
    let mut j = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
    for k in 0..=n {
        j[k][k] += dir[2] * (k as f64 - n as f64 / 2.0);
        if k < n {
            // <k+1| a^dagger b |k> = sqrt((k+1)(N-k))
            let up = (((k + 1) * (n - k)) as f64).sqrt();
            // J_x = (a^dagger b + b^dagger a)/2, J_y = (a^dagger b - b^dagger a)/(2i)
            let raise = Complex64::new(dir[0] / 2.0, -dir[1] / 2.0) * up;
            j[k + 1][k] += raise;
            j[k][k + 1] += raise.conj();
        }
    }
    j
}

fn variance_oracle(psi: &FockVector, dir: [f64; 3]) -> f64 {
    let j = spin_matrix_oracle(psi.n_total(), dir);
    let a = psi.amplitudes();
    let jpsi: Vec<Complex64> = j.iter().map(|row| row.iter().zip(a).map(|(x, y)| x * y).sum()).collect();
    let mean: f64 = a.iter().zip(&jpsi).map(|(x, y)| (x.conj() * y).re).sum();
    jpsi.iter().map(|v| v.norm_sqr()).sum::<f64>() - mean * mean
}

fn entanglement_detection() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = witness_file(dir.path(), "tf.toml", "kind = \"twin_fock\"\nn = 20\n");
    let (code, out, _) = bosent(&["witness", &spec, "-w", "csi", "-w", "qfi:x"]);
    ensure!(code == 0, "exit code {code}");
    let doc: Document<WitnessOutput> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let r = doc.report.report;
    let c2 = r.csi_by_order[&2];
    ensure!(rel(c2, factorial_ratio_oracle(20, 1)) <= 1e-12 && rel(c2, 10.0 / 9.0) <= 1e-12, "C_2 = {c2}");
    let oracle = 4.0 * variance_oracle(&FockVector::twin_fock(20).unwrap(), [1.0, 0.0, 0.0]);
    let f = r.qfi_by_generator[0].value;
    ensure!((oracle - 220.0).abs() <= 1e-9, "ladder oracle gives {oracle}");
    ensure!((f - oracle).abs() <= 1e-9, "F_Q(J_x) = {f}");
    ensure!(f > r.bounds.qfi && r.bounds.qfi == 20.0, "bound {}", r.bounds.qfi);
    ensure!(r.verdicts.entangled_by_csi && r.verdicts.entangled_by_qfi, "{:?}", r.verdicts);
    Ok(format!("C_2 = {c2}, F_Q(J_x) = {f} > 20, both flags raised"))
}

fn qfi_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_gap = f64::INFINITY;
    for i in 0..100 {
        let n = rng.gen_range(1..=20);
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let (rank_a, rank_b) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = SectorDensity::random(&mut rng, n, rank_a);
        let b = SectorDensity::random(&mut rng, n, rank_b);
        let g = GeneratorSpec::random(&mut rng);
        let mixed = SectorDensity::convex_combination(&[(lambda, &a), (1.0 - lambda, &b)]).unwrap();
        let lhs = qfi(&mixed, &g).unwrap();
        let rhs = lambda * qfi(&a, &g).unwrap() + (1.0 - lambda) * qfi(&b, &g).unwrap();
        ensure!(lhs <= rhs + 1e-8, "pair {i}: {lhs} > {rhs}");
        worst_gap = worst_gap.min(rhs - lhs);
    }

    let rho = SectorDensity::random(&mut rng, 12, 3);
    for i in 0..20 {
        let g = GeneratorSpec::random(&mut rng);
        let direct = qfi(&rho, &g).unwrap();
        let rotated = qfi(&rho.rotate(g.rotation_to_z()), &GeneratorSpec::z()).unwrap();
        ensure!((direct - rotated).abs() <= 1e-8, "direction {i}: {direct} vs {rotated}");
    }

    for i in 0..50 {
        let n = rng.gen_range(1..=30);
        let psi = FockVector::random(&mut rng, n);
        let g = GeneratorSpec::random(&mut rng);
        let spectral = qfi(&psi.to_density(), &g).unwrap();
        let four_var = 4.0 * variance_oracle(&psi, g.direction());
        ensure!((spectral - four_var).abs() <= 1e-9, "state {i}: {spectral} vs {four_var}");
        ensure!((qfi(&psi, &g).unwrap() - four_var).abs() <= 1e-9, "state {i}: pure path");
    }
    Ok(format!("convexity on 100 pairs (min slack {worst_gap:.1e}), 20 directions, 50 pure states"))
}

fn povm_sum_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let povms: Vec<PovmSet> = (0..10).map(|i| PovmSet::random(&mut rng, 2, 2 + i % 4)).collect();
    for p in &povms {
        let report = validate_povm(p).map_err(|e| e.to_string())?;
        ensure!(report.completeness_deviation <= 1e-10, "incomplete POVM: {report:?}");
    }
    let mut worst: f64 = 0.0;
    for s in 0..50 {
        let n = rng.gen_range(0..=20);
        let psi = FockVector::random(&mut rng, n);
        for p in &povms {
            let labels: Vec<&str> = p.labels().collect();
            let mut total = 0.0;
            for x in &labels {
                for y in &labels {
                    total += second_quantized_g2(&psi, p, x, y).map_err(|e| e.to_string())?;
                }
            }
            let expected = (n * n.saturating_sub(1)) as f64;
            worst = worst.max((total - expected).abs());
            ensure!((total - expected).abs() <= 1e-8, "state {s}, N = {n}: {total} vs {expected}");
        }
        let direct = integrated_g2m(&psi, 1).unwrap();
        let via = integrated_g2_second_quantized(
            &psi,
            &PovmSet::mode_projective(),
            &OutcomeRegion::new(["a"]),
            &OutcomeRegion::new(["b"]),
        )
        .map_err(|e| e.to_string())?;
        for (d, v) in [(direct.g_aa, via.g_aa), (direct.g_bb, via.g_bb), (direct.g_ab, via.g_ab)] {
            ensure!((d - v).abs() <= 1e-9, "state {s}: mode POVM {v} vs {d}");
        }
    }
    Ok(format!("500 state/POVM pairs, worst sum-rule gap {worst:.1e}; mode POVM consistent"))
}

fn sector_masking() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let tf = FockVector::twin_fock(4).unwrap().to_density();
    let all_a = CoherentSpinState::new(1.0, 0.0, 20).unwrap();
    let all_b = CoherentSpinState::new(0.0, 0.0, 20).unwrap();
    let separable = SeparableEnsemble::new(20, vec![(0.5, all_a), (0.5, all_b)]).unwrap();
    let separable_rho = separable.to_density(64).unwrap();
    ensure!(csi_ratio(&integrated_g2m(&tf, 1).unwrap()).unwrap() > 1.0, "twin-Fock sector not violating");

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p: f64 = rng.gen_range(0.01..0.5);
        let mix = NumberSectorMixture::new(vec![(p, tf.clone()), (1.0 - p, separable_rho.clone())]).unwrap();
        let overall = csi_ratio(&integrated_g2m(&mix, 1).unwrap()).unwrap();
        // G_ab = 4p, G_aa = G_bb = 2p + 190(1 - p)
        let oracle = 4.0 * p / (2.0 * p + 190.0 * (1.0 - p));
        ensure!((overall - oracle).abs() <= 1e-12, "p = {p}: {overall} vs {oracle}");
        ensure!(overall <= 1.0, "p = {p}: overall C_2 = {overall}");
        let sectors = per_sector_csi(&mix, 1);
        let flagged: Vec<usize> = sectors.iter().filter(|s| s.ratio.is_some_and(|r| r > 1.0)).map(|s| s.n_total).collect();
        ensure!(flagged == [4], "p = {p}: flagged sectors {flagged:?}");
        let r4 = sectors.iter().find(|s| s.n_total == 4).and_then(|s| s.ratio).unwrap();
        ensure!((r4 - 2.0).abs() <= 1e-12, "twin-Fock sector ratio {r4}");
        worst = worst.max(overall);
    }

    let dir = tempfile::tempdir().unwrap();
    let spec = witness_file(
        dir.path(),
        "mask.toml",
        "kind = \"fluctuating\"\n\n[[sectors]]\nprobability = 0.2\nkind = \"twin_fock\"\nn = 4\n\n\
         [[sectors]]\nprobability = 0.8\nkind = \"mixture\"\nn = 20\n\n\
         [[sectors.components]]\nweight = 0.5\nkind = \"coherent_spin\"\nz = 0.0\n\n\
         [[sectors.components]]\nweight = 0.5\nkind = \"coherent_spin\"\nz = 1.0\n",
    );
    let (code, out, _) = bosent(&["witness", &spec, "-w", "csi"]);
    ensure!(code == 0, "exit code {code}");
    let doc: Document<WitnessOutput> = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure!(!doc.report.report.verdicts.entangled_by_csi, "overall verdict flags the mixture");
    let sectors = &doc.report.per_sector_csi[&2];
    ensure!(sectors.iter().any(|s| s.n_total == 4 && s.ratio.is_some_and(|r| r > 1.0)), "CLI per-sector {sectors:?}");
    Ok(format!("100 weights: overall C_2 <= {worst:.3}, only the N = 4 sector flagged (ratio 2)"))
}
