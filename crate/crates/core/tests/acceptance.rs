use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use poslab::bergman::{
    check_hypotheses, coarea_limit, direct_image_curvature, dual_norm_track, liminf_bound_check, linspace,
    ot_bound_check, BasisSpec, DomainGrid, DualNormConfig, WeightFamily,
};
use poslab::bundle::{
    chern_curvature, conformal_twist, curvature_biform, duality_residual, fiber_schur_complement, fiber_weights,
    fubini_study_weight, projectivized_twist_curvature, quotient_metric, split_twist_criterion, split_twist_form,
    twist_residual, twisted_quotient, BiForm, LineWeight,
};
use poslab::cohomology::{adjoint_restriction_verdict, RestrictionVerdict};
use poslab::fd::DEFAULT_STEP;
use poslab::positivity::{
    brute_force_min, demailly_check_at, k_prop_identity, nakano_min, rank_k_min, raw_chain, PositivityQuery,
};
use poslab::schur::{verify_schur_positivity, SchurConfig};
use poslab::{sampling, HermitianMatrix, Result, TensorPoint, C64};
use rand::Rng;

/// Criteria that fail at full strength; see the notes in the README.
const KNOWN_FAILURES: &[usize] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn origin(n: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); n]
}

/// `|a·b̄|/(|a||b|)` for a rank-one witness `a⊗b`.
fn factor_angle(t: &TensorPoint) -> f64 {
    let m = t.coeffs();
    let (mut bi, mut bj, mut best) = (0, 0, 0.0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)].norm() > best {
                (bi, bj, best) = (i, j, m[(i, j)].norm());
            }
        }
    }
    let a = m.column(bj);
    let b: Vec<C64> = (0..m.cols()).map(|j| m[(bi, j)]).collect();
    let dot: C64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

fn quotient_thresholds() -> Result<Outcome> {
    let mut rng = sampling::rng(2024);
    let mut pass = true;
    let mut worst = [f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY];
    let mut angle: f64 = 0.0;
    for r in [3usize, 4] {
        let n = r - 1;
        let mut points = vec![origin(n)];
        points.extend((0..5).map(|_| sampling::chart_point(&mut rng, n, 0.8)));
        for (idx, z) in points.iter().enumerate() {
            let form = |k: u32| -> Result<BiForm> {
                let m = if k == 0 { quotient_metric(r) } else { twisted_quotient(r, k) };
                Ok(curvature_biform(&chern_curvature(&m, z)?))
            };
            let q0 = form(0)?;
            let v0 = rank_k_min(&PositivityQuery::new(q0.clone(), 1).seed(idx as u64))?;
            worst[0] = worst[0].max(v0.min_value.abs() / q0.scale());
            pass &= v0.min_value.abs() <= 1e-7 * q0.scale();
            if idx == 0 {
                angle = angle.max(factor_angle(&v0.witness));
                pass &= factor_angle(&v0.witness) <= 1e-6;
            }
            let q1 = form(1)?;
            let g = rank_k_min(&PositivityQuery::new(q1.clone(), 1).seed(idx as u64))?.min_value;
            let two = rank_k_min(&PositivityQuery::new(q1.clone(), 2).seed(idx as u64))?.min_value;
            worst[1] = worst[1].min(g / q1.scale());
            worst[2] = worst[2].max(two / q1.scale());
            pass &= g > 1e-6 * q1.scale() && two <= 1e-7 * q1.scale();
            let q2 = form(2)?;
            let nk = nakano_min(&q2);
            worst[3] = worst[3].min(nk / q2.scale());
            pass &= nk > 1e-6 * q2.scale();
        }
    }
    Ok(Outcome {
        pass,
        detail: format!(
            "k=0 |min|/scale {:.1e}, witness angle {angle:.1e}; k=1 griffiths {:.3e}, rank-2 {:.1e}; k=2 nakano {:.3e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    })
}

fn obstruction() -> Result<Outcome> {
    let mut pass = true;
    for d in 1..=5 {
        pass &= adjoint_restriction_verdict(2, d)?
            == RestrictionVerdict {
                surjective: false,
                coker_dim: 1,
            };
    }
    pass &= adjoint_restriction_verdict(3, 1)?.surjective;
    pass &= adjoint_restriction_verdict(4, 1)?.surjective;
    Ok(Outcome {
        pass,
        detail: "P²: coker 1 for d = 1..5; P³, P⁴: surjective".into(),
    })
}

fn schur_transfer() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [1, 2] {
        let cfg = SchurConfig {
            trials: 200,
            max_dims: (2, 2, 3),
            k,
            ..SchurConfig::default()
        };
        let rep = verify_schur_positivity(&cfg)?;
        pass &= rep.violations == 0 && rep.max_completion_residual < 1e-10 && rep.insufficient == 0;
        parts.push(format!(
            "k={k}: {} violations in {} trials, completion residual {:.1e}",
            rep.violations,
            rep.trials.len(),
            rep.max_completion_residual
        ));
    }
    Ok(Outcome {
        pass,
        detail: parts.join("; "),
    })
}

fn flat_extension() -> Result<Outcome> {
    let grid = DomainGrid::unit_disk(24, 48)?;
    let one = [C64::new(1.0, 0.0)];
    let flat = ot_bound_check(&WeightFamily::trivial(1, 0), &[], &one, 1.0, BasisSpec::new(12, 1), &grid)?;
    let flat_err = (flat.lhs - PI).abs() / PI;
    let g1 = ot_bound_check(&WeightFamily::diagonal_gaussian(&[1.0], 0), &[], &one, 1.0, BasisSpec::new(12, 1), &grid)?;
    let f0 = [C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
    let g2 = ot_bound_check(
        &WeightFamily::diagonal_gaussian(&[1.0, 2.0], 0),
        &[],
        &f0,
        1.0,
        BasisSpec::new(12, 2),
        &grid,
    )?;
    let pass = flat_err < 5e-3 && g1.lhs <= g1.rhs * 1.02 && g2.lhs <= g2.rhs * 1.02;
    Ok(Outcome {
        pass,
        detail: format!(
            "flat rel err {flat_err:.1e}; gaussian lhs/rhs {:.4} (r=1), {:.4} (r=2)",
            g1.lhs / g1.rhs,
            g2.lhs / g2.rhs
        ),
    })
}

fn direct_image() -> Result<Outcome> {
    let grid = DomainGrid::unit_disk(20, 40)?;
    let t0 = [C64::new(0.1, -0.05)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, w, k, basis) in [
        ("translated", WeightFamily::translated_gaussian(), 1, BasisSpec::new(6, 1)),
        ("coupled", WeightFamily::coupled_gaussian(1.0), 2, BasisSpec::new(4, 2)),
    ] {
        let h = check_hypotheses(&w, k, 8, 11)?;
        pass &= h.pass;
        let c = direct_image_curvature(&w, &t0, basis, &grid, DEFAULT_STEP)?;
        let rel = c.min_eigenvalue() / c.scale();
        pass &= rel >= -1e-4;
        parts.push(format!("{name}: hypotheses {}, min/scale {rel:.2e}", h.pass));
    }
    let w = WeightFamily::diagonal_gaussian(&[1.0, 2.0], 1);
    let flat = direct_image_curvature(&w, &t0, BasisSpec::new(4, 2), &grid, DEFAULT_STEP)?;
    let norm = flat.matrix().frobenius_norm();
    pass &= norm <= 1e-6;
    parts.push(format!("t-independent: |Θ| {norm:.1e}"));
    Ok(Outcome {
        pass,
        detail: parts.join("; "),
    })
}

fn dual_norm() -> Result<Outcome> {
    let ts = linspace(-6.0, -1.0, 26);
    let tr = dual_norm_track(
        &WeightFamily::trivial(1, 0),
        &[C64::new(1.0, 0.0)],
        8.0,
        &ts,
        &DualNormConfig::default(),
    )?;
    Ok(Outcome {
        pass: tr.min_first_difference >= -1e-6 && tr.min_second_difference >= -1e-6,
        detail: format!(
            "min Δ {:.3e}, min Δ² {:.3e} on {} points",
            tr.min_first_difference,
            tr.min_second_difference,
            ts.len()
        ),
    })
}

fn coarea() -> Result<Outcome> {
    let c1 = coarea_limit(|_| 1.0, -10.0)?;
    let c2 = coarea_limit(|z| 1.0 + z.re, -10.0)?;
    Ok(Outcome {
        pass: c1.error <= 1e-14 && c2.error < 1e-3,
        detail: format!("F≡1 err {:.1e}; F=1+Re z err {:.1e}", c1.error, c2.error),
    })
}

fn liminf() -> Result<Outcome> {
    let n = 300_000;
    let mut ts = linspace(-30.0, 0.0, n + 1);
    *ts.last_mut().unwrap() = 0.0;
    let nu: Vec<f64> = ts.iter().map(|t| t.exp()).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [2.0, 4.0, 8.0] {
        let c = liminf_bound_check(&ts, &nu, p, -20.0)?;
        let err = (c.min_value - 1.0 / (p - 1.0)).abs();
        pass &= err < 1e-6 && c.min_value <= 2.0 / (p - 1.0);
        parts.push(format!("p={p}: {:.8} (err {err:.1e})", c.min_value));
    }
    Ok(Outcome {
        pass,
        detail: parts.join("; "),
    })
}

fn curvature_identities() -> Result<Outcome> {
    let mut rng = sampling::rng(99);
    let dual_m = conformal_twist(&quotient_metric(3), &fubini_study_weight(3).scaled(2.0));
    let twist_m = quotient_metric(4);
    let psi = LineWeight::quadratic(3, 0.7);
    let (mut dual, mut twist, mut kprop): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..5 {
        let z = sampling::chart_point(&mut rng, 2, 0.8);
        dual = dual.max(duality_residual(&dual_m, &z)?);
        dual = dual.max(duality_residual(&dual_m.clone().finite_difference(1e-4), &z)?);
        let z = sampling::chart_point(&mut rng, 3, 0.8);
        twist = twist.max(twist_residual(&twist_m, &psi, &z)?);
        let m = conformal_twist(&twist_m, &psi);
        let form = curvature_biform(&chern_curvature(&m, &z)?);
        for k in 1..=3 {
            kprop = kprop.max(k_prop_identity(&m, &form, &z, k, rng.random())?.residual);
        }
    }
    let mut failures = 0;
    let mut min_op = f64::INFINITY;
    let bundle = twisted_quotient(3, 2);
    for _ in 0..50 {
        let z = sampling::chart_point(&mut rng, 2, 0.8);
        let c = chern_curvature(&bundle, &z)?;
        let form = curvature_biform(&c);
        assert!(nakano_min(&form) > 0.0);
        let g = sampling::positive_definite(&mut rng, 2);
        let d = demailly_check_at(&c, &g, 1, 2)?;
        min_op = min_op.min(d.min_eigenvalue);
        if !d.positive {
            failures += 1;
        }
    }
    Ok(Outcome {
        pass: dual < 1e-5 && twist < 1e-5 && kprop < 1e-4 && failures == 0,
        detail: format!(
            "duality {dual:.1e}; twist {twist:.1e}; sections {kprop:.1e}; contraction failures {failures}/50 (min {min_op:.3e})"
        ),
    })
}

fn split_example() -> Result<Outcome> {
    let scalar = |x: f64| HermitianMatrix::from_real_diagonal(&[x]);
    let mut pass = true;
    let mut rng = sampling::rng(7);
    let mut parts = Vec::new();
    for (name, om, expect) in [("ω=(1,10)", [1.0, 10.0], false), ("ω=(1,1)", [1.0, 1.0], true)] {
        let omegas = [scalar(om[0]), scalar(om[1])];
        let c = split_twist_criterion(&omegas, 200, 1)?;
        pass &= c.semipositive == expect;
        let phis: Vec<LineWeight> = omegas.iter().cloned().map(LineWeight::hermitian_quadratic).collect();
        let (mut agree, mut negative) = (0, 0);
        for _ in 0..20 {
            let z = sampling::chart_point(&mut rng, 1, 0.5);
            let w = [C64::from_polar(10f64.powf(rng.random_range(-2.0..0.4)), rng.random_range(0.0..2.0 * PI))];
            let h = projectivized_twist_curvature(&phis, &z, &w)?;
            let s = fiber_schur_complement(&h, 1)?;
            let form = split_twist_form(&omegas, &fiber_weights(&phis, &z, &w)?);
            let (ms, mf) = (s.min_eigenvalue(), form.min_eigenvalue());
            let consistent = (ms - mf).abs() <= 1e-5 * form.scale().max(1.0) && (mf >= 0.0 || !c.semipositive);
            if consistent {
                agree += 1;
            }
            if ms < -1e-6 {
                negative += 1;
            }
        }
        pass &= agree == 20 && (negative > 0) != expect;
        parts.push(format!(
            "{name}: semipositive {}, min {:.4}, agree {agree}/20, negative {negative}",
            c.semipositive, c.min_value
        ));
    }
    Ok(Outcome {
        pass,
        detail: parts.join("; "),
    })
}

fn optimizer() -> Result<Outcome> {
    let mut rng = sampling::rng(314);
    let (mut worst_gap, mut worst_chain): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    while count < 100 {
        let n = rng.random_range(1..=3usize);
        let r = rng.random_range(1..=3usize);
        if n * r > 9 {
            continue;
        }
        let form = BiForm::new(n, r, sampling::hermitian(&mut rng, n * r))?;
        let scale = form.scale();
        let k = rng.random_range(1..=n.min(r));
        let opt = rank_k_min(&PositivityQuery::new(form.clone(), k).seed(count))?.min_value;
        let brute = brute_force_min(&form, k, 0)?;
        worst_gap = worst_gap.max((opt - brute).abs() / scale);
        let ch = raw_chain(&form, count)?;
        for w in ch.windows(2) {
            worst_chain = worst_chain.max((w[1] - w[0]) / scale);
        }
        count += 1;
    }
    Ok(Outcome {
        pass: worst_gap <= 1e-3 && worst_chain <= 1e-9,
        detail: format!("max |opt − brute|/scale {worst_gap:.1e}; max chain increase {worst_chain:.1e}"),
    })
}

type Criterion = (usize, &'static str, fn() -> Result<Outcome>, Duration);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        (1, "quotient thresholds", quotient_thresholds, Duration::from_secs(60)),
        (2, "extension obstruction", obstruction, Duration::from_secs(1)),
        (3, "schur transfer", schur_transfer, Duration::from_secs(120)),
        (4, "flat extension constant", flat_extension, Duration::from_secs(30)),
        (5, "direct image positivity", direct_image, Duration::from_secs(120)),
        (6, "dual norm monotone and convex", dual_norm, Duration::from_secs(60)),
        (7, "coarea limit", coarea, Duration::from_secs(10)),
        (8, "liminf bound", liminf, Duration::from_secs(1)),
        (9, "curvature identities", curvature_identities, Duration::from_secs(120)),
        (10, "split bundle example", split_example, Duration::from_secs(30)),
        (11, "optimizer soundness", optimizer, Duration::from_secs(300)),
    ];
    // Written past the test harness capture so the lines show in plain `cargo test` output.
    let mut err = std::io::stderr();
    let _ = writeln!(err);
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && elapsed <= limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let _ = writeln!(
            err,
            "[{}] {id:>2} {name}: {detail} ({:.2} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    }
    assert_eq!(failed, KNOWN_FAILURES, "unexpected set of failing criteria");
}
