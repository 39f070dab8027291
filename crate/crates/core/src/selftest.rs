//! Desk-scale invariant suite behind the `selftest` command.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::borel::{borel_order, enumerate_borel, stabilizes, standard_flag};
use crate::gf::{Field, FieldCtx, Fq};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::oracle::{HidingOracle, Mode, OracleLabel};
use crate::quantum::hsp::mass_off_perp;
use crate::quantum::law::{perp_mass_exact, strictly_upper_rank_fraction, success_mass_exact};
use crate::quantum::{brute_force_distribution, exact_distribution, perp_of_coset, QftMatrix};
use crate::solver::{solve, SolverConfig};

pub type CheckResult = Result<(), String>;

/// A named check.
pub type Check = (&'static str, fn() -> CheckResult);

pub struct CheckOutcome {
    pub name: &'static str,
    pub result: CheckResult,
    pub seconds: f64,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn field(q: u64) -> Result<Field, String> {
    FieldCtx::of_order(q).map_err(|e| e.to_string())
}

fn all_matrices(f: &Field, n: usize) -> Vec<Matrix> {
    let q = f.order();
    (0..q.pow((n * n) as u32))
        .map(|code| {
            let enc: Vec<u64> = (0..n * n).map(|k| (code / q.pow(k as u32)) % q).collect();
            Matrix::from_encodings(f, n, n, &enc).expect("in range")
        })
        .collect()
}

const SMALL_FIELDS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 11, 16];

fn field_axioms() -> CheckResult {
    for q in SMALL_FIELDS {
        let f = field(q)?;
        let els: Vec<Fq> = f.elements().collect();
        for &a in &els {
            if !a.is_zero() {
                ensure(f.mul(a, f.inv(a).map_err(|e| e.to_string())?) == Fq::ONE, || format!("inverse q={q}"))?;
                ensure(f.pow(a, q - 1) == Fq::ONE, || format!("Lagrange q={q}"))?;
            }
            for &b in &els {
                for &c in &els {
                    ensure(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), || format!("assoc q={q}"))?;
                    ensure(
                        f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)),
                        || format!("distributivity q={q}"),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn trace_linear_surjective() -> CheckResult {
    for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81] {
        let f = field(q)?;
        let p = f.characteristic();
        let mut image = HashSet::new();
        for a in f.elements() {
            image.insert(f.trace(a));
            ensure(f.trace(a) == f.trace_by_frobenius(a), || format!("trace paths differ q={q}"))?;
            ensure(f.trace(f.pow(a, p)) == f.trace(a), || format!("Frobenius invariance q={q}"))?;
            for b in f.elements().step_by(((q / 16) as usize).max(1)) {
                ensure((f.trace(a) + f.trace(b)) % p == f.trace(f.add(a, b)), || format!("additivity q={q}"))?;
            }
        }
        ensure(image.len() as u64 == p, || format!("trace not surjective q={q}"))?;
    }
    Ok(())
}

/// `sum_a omega^{tr(a m)} = q [m = 0]` for the given trace map.
pub fn character_orthogonality_with(f: &Field, trace: &dyn Fn(Fq) -> u64) -> CheckResult {
    let q = f.order() as f64;
    for m in f.elements() {
        let sum: num_complex::Complex<f64> = f.elements().map(|a| f.root_of_unity::<f64>(trace(f.mul(a, m)))).sum();
        let want = if m.is_zero() { q } else { 0.0 };
        ensure((sum.re - want).abs() < 1e-9 && sum.im.abs() < 1e-9, || {
            format!("orthogonality fails at q={} m={m}: {sum}", f.order())
        })?;
    }
    Ok(())
}

fn character_orthogonality() -> CheckResult {
    for q in SMALL_FIELDS {
        let f = field(q)?;
        character_orthogonality_with(&f, &|x| f.trace(x))?;
    }
    Ok(())
}

fn nth_roots() -> CheckResult {
    for q in SMALL_FIELDS {
        let f = field(q)?;
        for n in 1..=6u64 {
            let d = crate::gf::gcd_u64(n, q - 1);
            for x in f.nonzero_elements() {
                let criterion = f.pow(x, (q - 1) / d) == Fq::ONE;
                let root = f.nth_root(x, n).map_err(|e| e.to_string())?;
                ensure(root.is_some() == criterion, || format!("root existence q={q} n={n} x={x}"))?;
                if let Some(z) = root {
                    ensure(f.pow(z, n) == x, || format!("bad root q={q} n={n}"))?;
                }
            }
        }
    }
    Ok(())
}

fn linear_algebra() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let f = field(q)?;
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let a = Matrix::random(&f, n, n, &mut rng);
            let b = Matrix::random(&f, n, n, &mut rng);
            let det = |m: &Matrix| m.det().map_err(|e| e.to_string());
            ensure(det(&a.mul(&b))? == f.mul(det(&a)?, det(&b)?), || "det not multiplicative".into())?;
            ensure(a.rank() == a.transpose().rank(), || "row rank != column rank".into())?;
            ensure(a.kernel().dim() + a.rank() == n, || "rank-nullity".into())?;
            let r = a.rref();
            ensure(r.reduced.rref().reduced == r.reduced, || "rref not idempotent".into())?;
            ensure(r.transform.mul(&a) == r.reduced, || "rref transform".into())?;
            let tr = |m: &Matrix| m.trace().map_err(|e| e.to_string());
            ensure(tr(&a.mul(&b))? == tr(&b.mul(&a))?, || "tr(AB) != tr(BA)".into())?;
        }
    }
    Ok(())
}

fn stabilizer_counts() -> CheckResult {
    for (n, q) in [(2, 2), (2, 3), (3, 2)] {
        let f = field(q)?;
        let flag = standard_flag(&f, n);
        let count = all_matrices(&f, n).iter().filter(|a| a.is_invertible() && stabilizes(a, &flag)).count();
        ensure(count as u64 == borel_order(q, n), || format!("stabilizer size n={n} q={q}"))?;
        let enumerated = enumerate_borel(&flag).map_err(|e| e.to_string())?;
        ensure(enumerated.len() as u64 == borel_order(q, n), || "enumeration size".into())?;
    }
    Ok(())
}

fn hiding_property() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (n, q) in [(2, 2), (2, 3), (3, 2)] {
        let f = field(q)?;
        let (o, desc) = HidingOracle::make_instance(&f, n, Mode::Gl, &mut rng);
        let gl: Vec<Matrix> = all_matrices(&f, n).into_iter().filter(|m| m.is_invertible()).collect();
        let mut classes: HashMap<OracleLabel, Matrix> = HashMap::new();
        for a in &gl {
            let label = o.query(a).map_err(|e| e.to_string())?;
            if let Some(rep) = classes.get(&label) {
                let inv = rep.inverse().map_err(|e| e.to_string())?;
                ensure(stabilizes(&a.mul(&inv), &desc.flag), || "label collision across cosets".into())?;
            } else {
                classes.insert(label, a.clone());
            }
        }
        ensure(classes.len() as u64 * borel_order(q, n) == gl.len() as u64, || format!("coset count n={n} q={q}"))?;
    }
    Ok(())
}

fn closed_form_certification() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, q) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
        let f = field(q)?;
        for _ in 0..2 {
            let x = Matrix::random_invertible(&f, n, &mut rng);
            let b = Matrix::random_invertible(&f, n, &mut rng);
            let exact = exact_distribution::<BigRational>(&x, &b).map_err(|e| e.to_string())?;
            let brute = brute_force_distribution::<f64>(&x, &b, 1).map_err(|e| e.to_string())?;
            ensure(exact.max_abs_diff(&brute) < 1e-9, || format!("closed form differs n={n} q={q}"))?;
            ensure(exact.total_mass().is_one(), || "mass".into())?;
            let perp = perp_of_coset(&x, &b).map_err(|e| e.to_string())?;
            let in_perp = |y: &Matrix| perp.contains(&Vector(y.entries().to_vec()));
            ensure(exact.mass_where(in_perp) == perp_mass_exact(q, n), || "perp mass".into())?;
            let success = exact.mass_where(|y| in_perp(y) && y.rank() + 1 == n);
            ensure(success == success_mass_exact(q, n), || "success mass".into())?;
        }
    }
    Ok(())
}

fn rank_fraction() -> CheckResult {
    for n in 1..=4 {
        for q in [2, 3, 4] {
            let f = field(q)?;
            let got = strictly_upper_rank_fraction(&f, n).map_err(|e| e.to_string())?;
            let want = BigRational::new((q - 1).into(), q.into());
            let want = (1..n).fold(BigRational::one(), |acc, _| acc * want.clone());
            ensure(got == want, || format!("rank fraction n={n} q={q}"))?;
        }
    }
    Ok(())
}

fn fourier() -> CheckResult {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let f = field(q)?;
        let h = QftMatrix::<f64>::new(&f).map_err(|e| e.to_string())?;
        ensure(h.unitarity_defect() < 1e-12, || format!("unitarity q={q}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for q in [2, 3] {
        let f = field(q)?;
        for m in 1..=4 {
            for k in 0..=m {
                let w = Subspace::span(&f, m, (0..k).map(|_| Vector::random(&f, m, &mut rng)).collect());
                let v0 = Vector::random(&f, m, &mut rng);
                let off = mass_off_perp::<f64>(&w, &v0).map_err(|e| e.to_string())?;
                ensure(off < 1e-12, || format!("mass off perp {off} q={q} m={m}"))?;
            }
        }
    }
    Ok(())
}

fn end_to_end() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, q, mode) in [(2, 3, Mode::Gl), (3, 2, Mode::Gl), (3, 4, Mode::Gl), (2, 5, Mode::Sl), (3, 3, Mode::Sl)] {
        let f = field(q)?;
        for seed in 0..10 {
            let (o, desc) = HidingOracle::make_instance(&f, n, mode, &mut rng);
            let report = solve(&o, &SolverConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed))
                .map_err(|e| e.to_string())?;
            ensure(report.flag.as_ref() == Some(&desc.flag), || format!("wrong flag n={n} q={q} {mode}"))?;
            ensure(report.oracle_queries == o.query_count(), || "query accounting".into())?;
        }
    }
    Ok(())
}

fn determinism() -> CheckResult {
    let f = field(3)?;
    let cfg = SolverConfig::default();
    let run = || -> Result<Vec<u8>, String> {
        let trials = crate::harness::run_trials(&f, 3, Mode::Gl, 99, 8, &cfg).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        crate::harness::write_solve_csv(&mut buf, 99, &trials).map_err(|e| e.to_string())?;
        Ok(buf)
    };
    ensure(run()? == run()?, || "reruns differ".into())
}

pub const CHECKS: &[Check] = &[
    ("field axioms", field_axioms),
    ("trace linear and surjective", trace_linear_surjective),
    ("character orthogonality", character_orthogonality),
    ("n-th root criterion", nth_roots),
    ("linear algebra identities", linear_algebra),
    ("stabilizer counts", stabilizer_counts),
    ("hiding property", hiding_property),
    ("closed form vs character sums", closed_form_certification),
    ("strictly upper rank fraction", rank_fraction),
    ("Fourier transform", fourier),
    ("end-to-end recovery", end_to_end),
    ("determinism", determinism),
];

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let result = check();
            CheckOutcome { name, result, seconds: start.elapsed().as_secs_f64() }
        })
        .collect()
}

/// Fixed-width pass/fail table.
pub fn render_table(outcomes: &[CheckOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for o in outcomes {
        let status = if o.result.is_ok() { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status}  {:<width$}  {:>7.2}s", o.name, o.seconds));
        if let Err(msg) = &o.result {
            out.push_str(&format!("  {msg}"));
        }
        out.push('\n');
    }
    let failed = outcomes.iter().filter(|o| o.result.is_err()).count();
    out.push_str(&format!("{} checks, {failed} failed\n", outcomes.len()));
    out
}
