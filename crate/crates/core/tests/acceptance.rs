//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false` so the lines reach stdout.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use periodpoly::gates::{compute_a_m, theorem_gate, GateCase};
use periodpoly::lfunc::{
    completed_lambda_at, completed_values, dirichlet_partial_sum, divisor_tail_bound, gamma_completed,
    l_value, verify_hypothesis, LFunctionData, SpecialValues, Violation,
};
use periodpoly::mp::Cplx;
use periodpoly::rv::{check_zeta_properties, resolve_closed_form, rv_transform};
use periodpoly::specialpoly::{approximant::q_decomposition, build_p_poly};
use periodpoly::sympow::{bundled_curve, bundled_eps, sym_lfunction_data};
use periodpoly::zerotools::{circle_report, disc_transitions, poly_roots};
use periodpoly::{Error, Precision};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Float, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(f: impl FnOnce() -> Result<Outcome, Error>) -> (Duration, Result<Outcome, Error>) {
    let t = Instant::now();
    let r = f();
    (t.elapsed(), r)
}

fn report(name: &str, t: Duration, r: Result<Outcome, Error>) -> bool {
    match r {
        Ok(o) => {
            println!("{} {name}: {} [{:.1?}]", if o.pass { "PASS" } else { "FAIL" }, o.detail, t);
            o.pass
        }
        Err(e) => {
            println!("FAIL {name}: error {e} [{t:.1?}]");
            false
        }
    }
}

struct Dataset {
    data: LFunctionData,
    vals: SpecialValues,
    elapsed: Duration,
}

fn sym_dataset(label: &str, n: u32, x: usize, bits: u32, target: f64) -> Result<Dataset, Error> {
    let t = Instant::now();
    let curve = bundled_curve(label).ok_or_else(|| Error::InvalidCurve(label.into()))?;
    let eps = bundled_eps()
        .get(label, n)
        .ok_or_else(|| Error::DataError(format!("no root number for {label} sym{n}")))?;
    let data = sym_lfunction_data(&curve, n, x, eps)?;
    let vals = completed_values(&data, &Precision::new(bits, target)?)?;
    Ok(Dataset {
        data,
        vals,
        elapsed: t.elapsed(),
    })
}

fn a_table() -> Result<Outcome, Error> {
    let t = Instant::now();
    let a2 = compute_a_m(2)?;
    let a3 = compute_a_m(3)?;
    let mut worst_mid: f64 = 0.0;
    for m in 4..=50 {
        worst_mid = worst_mid.max(compute_a_m(m)?);
    }
    let a1000 = compute_a_m(1000)?;
    let el = t.elapsed();
    let pass = a2 > 23.80 && a2 <= 23.83 && a3 > 11.90 && a3 <= 11.92 && worst_mid <= 8.0 && (a1000 - 2.0 * PI).abs() < 0.01 && el.as_secs_f64() < 5.0;
    Ok(Outcome {
        pass,
        detail: format!("A_2 = {a2:.5}, A_3 = {a3:.5}, max A_4..A_50 = {worst_mid:.5}, A_1000 - 2pi = {:.2e}, {el:.2?}", a1000 - 2.0 * PI),
    })
}

fn disc_tables() -> Result<Outcome, Error> {
    let t4 = disc_transitions(4, 800, 1.0)?;
    let zeros = common::bessel_j0_zeros(6);
    let mut oracle_mismatch = Vec::new();
    for n in 1..=800u64 {
        if t4.count_at(n) != Some(common::bessel_disc_count(n, &zeros)) {
            oracle_mismatch.push(n);
        }
    }
    let t = Instant::now();
    let t6 = disc_transitions(6, 50_000, 1.0)?;
    let el6 = t.elapsed();
    let tr4 = t4.transitions();
    let tr6 = t6.transitions();
    let pass = tr4 == [2, 5, 27, 746] && tr6 == [2, 7, 38, 495, 45607] && oracle_mismatch.is_empty() && el6.as_secs() < 120;
    Ok(Outcome {
        pass,
        detail: format!("d=4 transitions {tr4:?}, Bessel oracle mismatches {oracle_mismatch:?}, d=6 transitions {tr6:?} in {el6:.2?}"),
    })
}

fn angle_deviation(re: f64, im: f64) -> f64 {
    let a = im.atan2(re).rem_euclid(2.0 * PI);
    (a - PI / 2.0).abs().min((a - 1.5 * PI).abs())
}

fn m1_structure(odd: &[&Dataset]) -> Result<Outcome, Error> {
    let mut worst_pm1: f64 = 0.0;
    let mut checked = 0;
    let mut odd_sets: Vec<(LFunctionData, SpecialValues)> = odd.iter().map(|d| (d.data.clone(), d.vals.clone())).collect();
    for a in [1.0, 37.5, 1e6] {
        odd_sets.push(common::synthetic(&[1, 1], 3, 100, -1, &[-a, 0.0, a], 192));
    }
    for (data, vals) in &odd_sets {
        let p = build_p_poly(data, vals)?;
        let phat = periodpoly::rv::deflate_at_one(&p, -1)?;
        let mut roots: Vec<f64> = poly_roots(&p)?.iter().map(|r| r.re).collect();
        roots.sort_by(f64::total_cmp);
        let dev = (roots[0] + 1.0).abs().max((roots[1] - 1.0).abs());
        let hat_root = -phat.coeffs[0].mid_f64() / phat.coeffs[1].mid_f64();
        worst_pm1 = worst_pm1.max(dev).max((hat_root + 1.0).abs());
        checked += 1;
    }
    // ε = +1: Λ(1) = Λ(3) = 1, Λ(2) = δ
    let mut worst_ratio: f64 = 0.0;
    for hodge in [[1u32, 1], [2, 1], [3, 1]] {
        for k in 1..=10 {
            let delta = 10f64.powi(-k);
            let (data, vals) = common::synthetic(&hodge, 3, 100, 1, &[1.0, delta, 1.0], 192);
            let p = build_p_poly(&data, &vals)?;
            let bound = 2.0 * delta * 2f64.powi(hodge[0] as i32 - 1) + 1e-12;
            for r in poly_roots(&p)? {
                worst_ratio = worst_ratio.max(angle_deviation(r.re, r.im) / bound);
            }
        }
    }
    Ok(Outcome {
        pass: worst_pm1 < 1e-12 && worst_ratio <= 1.0,
        detail: format!(
            "{checked} odd datasets, max distance of roots from ±1 = {worst_pm1:.2e}; even families: max deviation / bound = {worst_ratio:.3}"
        ),
    })
}

fn sym3_end_to_end(ds: &Dataset) -> Result<Outcome, Error> {
    let (data, vals) = (&ds.data, &ds.vals);
    let p = build_p_poly(data, vals)?;
    let rep = circle_report(&poly_roots(&p)?);
    let worst_mod = rep.moduli_deviation.iter().cloned().fold(0.0, f64::max);
    let on = rep.roots.len() == 2 && worst_mod < 1e-6;

    let bits = 192;
    let x = data.coefficients.len();
    let coeffs = data.coefficients_float(bits + 32);
    // s = 3, where the direct series converges but slowly
    let afe_l3 = l_value(3, data, vals, bits)?;
    let direct3 = dirichlet_partial_sum(&coeffs, &Cplx::from_f64(bits + 32, 3.0, 0.0), bits + 32);
    let tail3 = divisor_tail_bound(data.degree, x as f64, 3.0 - data.weight as f64 / 2.0);
    let diff3 = Float::with_val(bits, &afe_l3.mid - &direct3.re).abs().to_f64();
    let agree3 = diff3 <= afe_l3.rad_f64() + tail3;
    let rel3 = vals.get(3)?.rad_f64() / vals.get(3)?.mid_f64().abs();

    // the first half-integer point where the direct tail is below 1e-17 relative
    let mut s = 3.5;
    while divisor_tail_bound(data.degree, x as f64, s - data.weight as f64 / 2.0) > 1e-17 {
        s += 1.0;
    }
    let sf = Float::with_val(bits, s);
    let prec = Precision::new(bits, 1e-25)?;
    let lam = completed_lambda_at(&sf, &Float::with_val(bits, 1), data, &prec)?;
    let sc = Cplx::from_f64(bits + 32, s, 0.0);
    let g = gamma_completed(&sc, data, bits + 32)?;
    let nf = Float::with_val(bits + 32, data.conductor).pow(Float::with_val(bits + 32, s / 2.0));
    let direct = dirichlet_partial_sum(&coeffs, &sc, bits + 32);
    let lam_direct = Float::with_val(bits + 32, &direct.re * &g.re) * &nf;
    let rel_shift = Float::with_val(bits, &lam.mid - &lam_direct).abs().to_f64() / lam.mid_f64().abs();

    let el = ds.elapsed;
    Ok(Outcome {
        pass: on && agree3 && rel3 < 1e-15 && rel_shift < 1e-15 && el.as_secs() < 60,
        detail: format!(
            "roots of p {} with max ||z|-1| = {worst_mod:.1e}; s=3: |AFE - direct| = {diff3:.2e} within {:.2e} (AFE radius {:.1e} + tail bound {tail3:.2e}), AFE relative radius {rel3:.1e}; s={s}: relative difference {rel_shift:.1e}; values in {el:.1?} with {x} coefficients",
            rep.roots.len(),
            afe_l3.rad_f64() + tail3,
            afe_l3.rad_f64(),
        ),
    })
}

fn sym5_criterion(ds: &Dataset) -> Result<Outcome, Error> {
    let l4 = ds.vals.get(4)?.scale_int(&rug::Integer::from(24));
    let r = l4.div(ds.vals.get(5)?)?;
    let upper = r.mid_f64().abs() + r.rad_f64();
    Ok(Outcome {
        pass: ds.data.root_number == -1 && upper <= 1.0 && ds.elapsed.as_secs() < 600,
        detail: format!(
            "{} (eps = {}): |24 Lambda(4)/Lambda(5)| = {:.6} +/- {:.1e}, values in {:.1?} with {} coefficients",
            ds.data.label,
            ds.data.root_number,
            r.mid_f64().abs(),
            r.rad_f64(),
            ds.elapsed,
            ds.data.coefficients.len()
        ),
    })
}

fn rv_suite() -> Result<Outcome, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let prec = 512;
    let (mut worst_line, mut worst_fe, mut worst_mac, mut worst_oracle): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut failures = 0;
    for _ in 0..200 {
        let deg = rng.random_range(1..=40);
        let u = common::random_circle_poly(&mut rng, deg);
        let up = common::rational_poly(&u, prec);
        let z = rv_transform(&up)?;
        let chk = check_zeta_properties(&z)?;
        // closed expansion oracle
        let direct = common::rv_direct(&u);
        for (a, b) in z.coeffs.iter().zip(&direct) {
            let bf = Float::with_val(prec, b);
            let scale = bf.to_f64().abs().max(1e-300);
            worst_oracle = worst_oracle.max(Float::with_val(prec, &a.mid - &bf).abs().to_f64() / scale);
        }
        // long division of U by (1 − z)^{e+1}
        let num: Vec<Float> = u.iter().map(|c| Float::with_val(prec, c)).collect();
        let series = common::long_division(&num, &common::one_minus_z_pow(deg + 1), 3 * deg + 1, prec);
        let poly = z.as_polynomial();
        let mut mac: f64 = 0.0;
        for (l, c) in series.iter().enumerate() {
            let (v, _) = poly.eval(&Cplx::from_f64(prec, -(l as f64), 0.0));
            mac = mac.max(Float::with_val(prec, &v.re - c).abs().to_f64() / c.to_f64().abs());
        }
        worst_line = worst_line.max(chk.max_line_deviation);
        worst_fe = worst_fe.max(chk.fe_residual);
        worst_mac = worst_mac.max(mac);
        if chk.max_line_deviation > 1e-8 || chk.fe_residual >= 1e-18 || mac >= 1e-12 {
            failures += 1;
        }
    }
    Ok(Outcome {
        pass: failures == 0 && worst_oracle < 1e-100,
        detail: format!(
            "200 polynomials: max |Re - 1/2| = {worst_line:.1e} (double-precision root centres), max FE residual = {worst_fe:.1e}, max Maclaurin relative error = {worst_mac:.1e}, closed expansion agreement {worst_oracle:.1e}, {failures} failures"
        ),
    })
}

fn oracle_equivalences(sym3: &Dataset, sym5: &Dataset, extra: &[&Dataset]) -> Result<Outcome, Error> {
    let mut cf = Vec::new();
    for ds in [sym3, sym5] {
        let (chk, _) = resolve_closed_form(&ds.data, &ds.vals, 1e-9)?;
        cf.push(format!("{} {:?}/eps prefactor {} at {:.1e}", ds.data.label, chk.convention, chk.with_eps, chk.max_rel_diff));
    }
    let mut worst_q: f64 = 0.0;
    let mut all: Vec<(LFunctionData, SpecialValues)> = [sym3, sym5].iter().chain(extra).map(|d| (d.data.clone(), d.vals.clone())).collect();
    for (data, vals) in &all {
        worst_q = worst_q.max(q_decomposition(data, vals, 256, 192)?.max_residual);
    }
    for hodge in [vec![1u32, 1, 1], vec![1, 0, 2], vec![2, 1, 1], vec![1, 1, 1, 1]] {
        let w = 2 * hodge.len() as u32 - 1;
        for n in [10u64, 10_000, 10_000_000, 1_000_000_000_000, 1_000_000_000_000_000] {
            all.push(common::zeta_power(&hodge, w, n, 192)?);
        }
    }
    let (mut large_n, mut violations) = (0, 0);
    for (data, vals) in &all {
        let g = theorem_gate(data, vals)?;
        if g.case == GateCase::LargeN {
            large_n += 1;
            if g.margins_positive != Some(true) {
                violations += 1;
            }
        }
    }
    Ok(Outcome {
        pass: worst_q < 1e-20 && violations == 0,
        detail: format!(
            "closed form: {}; max Q residual at 256 points = {worst_q:.1e}; gate: {} datasets, {large_n} LARGE_N, {violations} with a non-positive margin",
            cf.join(", "),
            all.len()
        ),
    })
}

fn hypothesis_suite(shipped: &[&Dataset]) -> Result<Outcome, Error> {
    let mut clean = 0;
    let mut dirty = Vec::new();
    for ds in shipped {
        let v = verify_hypothesis(&ds.data, &ds.vals);
        if v.is_empty() {
            clean += 1;
        } else {
            dirty.push(format!("{}: {}", ds.data.label, v[0]));
        }
    }
    let base = shipped[0];
    let prec = base.vals.central.prec();
    let mut caught = Vec::new();

    let mut grc = base.data.clone();
    grc.coefficients[1] = Rational::from(1_000_000);
    caught.push(("GRC", verify_hypothesis(&grc, &base.vals).iter().any(|v| matches!(v, Violation::Grc { .. }))));

    let mut sym = base.vals.clone();
    sym.values[0] = sym.values[0].scale(&Float::with_val(prec, 1.01));
    caught.push(("symmetry", verify_hypothesis(&base.data, &sym).iter().any(|v| matches!(v, Violation::FunctionalEquation { .. }))));

    let mut mono = base.vals.clone();
    let big = base.vals.get(3)?.scale(&Float::with_val(prec, 2));
    mono.values[1] = big.clone();
    mono.central = big;
    mono.central_alt = None;
    caught.push(("monotonicity", verify_hypothesis(&base.data, &mono).iter().any(|v| matches!(v, Violation::Monotonicity { .. }))));

    let mut neg = base.vals.clone();
    neg.values[1] = neg.values[1].neg();
    neg.central = neg.values[1].clone();
    neg.central_alt = None;
    caught.push(("central sign", verify_hypothesis(&base.data, &neg).iter().any(|v| matches!(v, Violation::CentralNegative { .. }))));

    let missed: Vec<&str> = caught.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok(Outcome {
        pass: dirty.is_empty() && missed.is_empty(),
        detail: format!(
            "{clean}/{} datasets clean {dirty:?}; broken fixtures caught: {}/{} (missed {missed:?})",
            shipped.len(),
            caught.len() - missed.len(),
            caught.len()
        ),
    })
}

fn main() {
    let mut ok = true;
    let (t, r) = timed(a_table);
    ok &= report("A_m table", t, r);
    let (t, r) = timed(disc_tables);
    ok &= report("disc-zero tables", t, r);

    let sym3 = sym_dataset("11a1", 3, 10_000, 192, 1e-18);
    let sym5 = sym_dataset("11a1", 5, 100_000, 128, 1e-15);
    let odd: Vec<Dataset> = ["37a1", "43a1"]
        .iter()
        .filter_map(|l| match sym_dataset(l, 3, 20_000, 128, 1e-12) {
            Ok(d) => Some(d),
            Err(e) => {
                println!("note: {l} sym3 unavailable: {e}");
                None
            }
        })
        .collect();
    let odd_refs: Vec<&Dataset> = odd.iter().collect();

    let (t, r) = timed(|| m1_structure(&odd_refs));
    ok &= report("m=1 structure", t, r);
    match (&sym3, &sym5) {
        (Ok(s3), Ok(s5)) => {
            let (t, r) = timed(|| sym3_end_to_end(s3));
            ok &= report("Sym^3 11a1 end to end", t + s3.elapsed, r);
            ok &= report("Sym^5 eps=-1 criterion", s5.elapsed, sym5_criterion(s5));
            let (t, r) = timed(rv_suite);
            ok &= report("RV suite", t, r);
            let (t, r) = timed(|| oracle_equivalences(s3, s5, &odd_refs));
            ok &= report("oracle equivalences", t, r);
            let mut shipped = vec![s3, s5];
            shipped.extend(odd_refs.iter().copied());
            let (t, r) = timed(|| hypothesis_suite(&shipped));
            ok &= report("hypothesis suite", t, r);
        }
        (a, b) => {
            for e in [a.as_ref().err(), b.as_ref().err()].into_iter().flatten() {
                println!("FAIL dataset construction: {e}");
            }
            ok = false;
        }
    }
    if !ok {
        std::process::exit(1);
    }
}
