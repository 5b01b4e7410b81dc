use std::f64::consts::PI;

use poslab::bergman::{
    check_hypotheses, coarea_limit, direct_image_curvature, dual_norm_track, liminf_bound_check, linspace,
    ot_bound_check, BasisSpec, DomainGrid, DualNormConfig, WeightFamily,
};
use poslab::bundle::{
    chern_curvature, conformal_twist, curvature_biform, duality_residual, fiber_schur_complement, fiber_weights,
    fubini_study_weight, projectivized_twist_curvature, quotient_metric, split_twist_criterion, split_twist_form,
    twist_residual, twisted_quotient, BiForm, LineWeight,
};
use poslab::cohomology::adjoint_restriction_verdict;
use poslab::fd::DEFAULT_STEP;
use poslab::positivity::{demailly_check_at, k_prop_identity, nakano_min, rank_k_min, PositivityQuery};
use poslab::schur::{verify_schur_positivity, SchurConfig};
use poslab::{sampling, HermitianMatrix, Result, TensorPoint, C64};
use rand::Rng;

use crate::config::{Params, Suite};
use crate::report::{Check, Relation, Track};

pub struct SuiteOutput {
    pub checks: Vec<Check>,
    pub tracks: Vec<Track>,
}

impl From<Vec<Check>> for SuiteOutput {
    fn from(checks: Vec<Check>) -> Self {
        Self {
            checks,
            tracks: Vec::new(),
        }
    }
}

pub fn run_suite(suite: Suite, p: &Params) -> Result<SuiteOutput> {
    match suite {
        Suite::CurvatureIdentities => curvature_identities(p).map(Into::into),
        Suite::QuotientThresholds => quotient_thresholds(p).map(Into::into),
        Suite::Schur => schur(p).map(Into::into),
        Suite::ExtensionFlat => extension_flat(p).map(Into::into),
        Suite::DirectImage => direct_image(p).map(Into::into),
        Suite::DualNorm => dual_norm(p),
        Suite::Coarea => coarea(p).map(Into::into),
        Suite::Obstruction => obstruction(p).map(Into::into),
        Suite::SplitExample => split_example(p).map(Into::into),
        Suite::All => unreachable!("expanded by the caller"),
    }
}

fn origin(n: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); n]
}

/// `|a·b̄|/(|a||b|)` for a rank-one tensor `a⊗b`.
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

fn curvature_identities(p: &Params) -> Result<Vec<Check>> {
    let mut rng = sampling::rng(p.seed);
    let dual_m = conformal_twist(&quotient_metric(3), &fubini_study_weight(3).scaled(2.0));
    let twist_m = quotient_metric(4);
    let psi = LineWeight::quadratic(3, 0.7);
    let (mut dual, mut twist, mut sections): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..p.points.max(1) {
        let z = sampling::chart_point(&mut rng, 2, 0.8);
        dual = dual.max(duality_residual(&dual_m, &z)?);
        dual = dual.max(duality_residual(&dual_m.clone().finite_difference(1e-4), &z)?);
        let z = sampling::chart_point(&mut rng, 3, 0.8);
        twist = twist.max(twist_residual(&twist_m, &psi, &z)?);
        let m = conformal_twist(&twist_m, &psi);
        let form = curvature_biform(&chern_curvature(&m, &z)?);
        for k in 1..=3 {
            sections = sections.max(k_prop_identity(&m, &form, &z, k, rng.random())?.residual);
        }
    }
    let bundle = twisted_quotient(3, 2);
    let (mut failures, mut not_nakano, mut min_op) = (0, 0, f64::INFINITY);
    for _ in 0..p.instances {
        let z = sampling::chart_point(&mut rng, 2, 0.8);
        let c = chern_curvature(&bundle, &z)?;
        if nakano_min(&curvature_biform(&c)) <= 0.0 {
            not_nakano += 1;
        }
        let g = sampling::positive_definite(&mut rng, 2);
        let d = demailly_check_at(&c, &g, 1, 2)?;
        min_op = min_op.min(d.min_eigenvalue);
        if !d.positive {
            failures += 1;
        }
    }
    Ok(vec![
        Check::new("duality", "curvature of the dual bundle is minus the transpose", "dual curvature")
            .bound("relative residual", dual, Relation::Lt, 1e-5),
        Check::new("conformal-twist", "twisting by e^{−ψ} adds i∂∂̄ψ ⊗ Id", "conformal twist")
            .bound("relative residual", twist, Relation::Lt, 1e-5),
        Check::new(
            "sections",
            "second derivative of h(f_i, f_j) for sections with ∇f(x) = 0 equals minus the curvature form",
            "k-sections identity",
        )
        .bound("relative residual", sections, Relation::Lt, 1e-4),
        Check::new(
            "contraction",
            "curvature operator on (n,1)-forms is positive for Nakano-positive curvature, n = r = 2",
            "Nakano implies (n,q) positivity",
        )
        .bound("non-Nakano samples", not_nakano as f64, Relation::Eq, 0.0)
        .bound("failures", failures as f64, Relation::Eq, 0.0)
        .bound("min eigenvalue", min_op, Relation::Gt, 0.0),
    ])
}

fn quotient_thresholds(p: &Params) -> Result<Vec<Check>> {
    let r = p.r;
    let n = r - 1;
    let mut rng = sampling::rng(p.seed);
    let mut points = vec![origin(n)];
    points.extend((0..p.points).map(|_| sampling::chart_point(&mut rng, n, 0.8)));
    let (mut zero, mut angle, mut griffiths, mut rank2, mut nakano) =
        (0.0f64, 0.0f64, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
    for (idx, z) in points.iter().enumerate() {
        let form = |k: u32| -> Result<BiForm> {
            let m = if k == 0 { quotient_metric(r) } else { twisted_quotient(r, k) };
            Ok(curvature_biform(&chern_curvature(&m, z)?))
        };
        let seed = p.seed.wrapping_add(idx as u64);
        let q0 = form(0)?;
        let v0 = rank_k_min(&PositivityQuery::new(q0.clone(), 1).seed(seed))?;
        zero = zero.max(v0.min_value.abs() / q0.scale());
        if idx == 0 {
            angle = factor_angle(&v0.witness);
        }
        let q1 = form(1)?;
        griffiths = griffiths.min(rank_k_min(&PositivityQuery::new(q1.clone(), 1).seed(seed))?.min_value / q1.scale());
        if n >= 2 {
            rank2 = rank2.max(rank_k_min(&PositivityQuery::new(q1.clone(), 2).seed(seed))?.min_value / q1.scale());
        }
        let q2 = form(2)?;
        nakano = nakano.min(nakano_min(&q2) / q2.scale());
    }
    let mut k1 = Check::new(
        "k1",
        "Q⊗𝒪(1) is Griffiths positive and not 2-positive",
        "quotient twisted once",
    )
    .bound("griffiths min / scale", griffiths, Relation::Gt, 1e-6);
    if n >= 2 {
        k1 = k1.bound("rank-2 min / scale", rank2, Relation::Le, 1e-7);
    }
    Ok(vec![
        Check::new("k0", "Q has Griffiths minimum 0 on a⊗b with a·b̄ = 0", "untwisted quotient")
            .bound("|griffiths min| / scale", zero, Relation::Le, 1e-7)
            .bound("witness |a·b̄|/(|a||b|) at origin", angle, Relation::Le, 1e-6),
        k1,
        Check::new("k2", "Q⊗𝒪(2) is Nakano positive", "quotient twisted twice").bound(
            "nakano min / scale",
            nakano,
            Relation::Gt,
            1e-6,
        ),
    ])
}

fn schur(p: &Params) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in [1, 2] {
        let rep = verify_schur_positivity(&SchurConfig {
            trials: p.trials,
            max_dims: (2, 2, 3),
            k,
            seed: p.seed,
            ..SchurConfig::default()
        })?;
        out.push(
            Check::new(
                &format!("k{k}"),
                &format!("Schur complement of a {k}-positive block form is {k}-positive"),
                "Schur complement transfer",
            )
            .bound("violations below −1e-8·scale", rep.violations as f64, Relation::Eq, 0.0)
            .bound("max completion residual", rep.max_completion_residual, Relation::Lt, 1e-10)
            .bound("trials without a sample", rep.insufficient as f64, Relation::Eq, 0.0),
        );
    }
    Ok(out)
}

fn extension_flat(p: &Params) -> Result<Vec<Check>> {
    let grid = DomainGrid::unit_disk(p.n_r, p.n_theta)?;
    let one = [C64::new(1.0, 0.0)];
    let flat = ot_bound_check(&WeightFamily::trivial(1, 0), &[], &one, 1.0, BasisSpec::new(p.degree, 1), &grid)?;
    let g1 = ot_bound_check(
        &WeightFamily::diagonal_gaussian(&[1.0], 0),
        &[],
        &one,
        1.0,
        BasisSpec::new(p.degree, 1),
        &grid,
    )?;
    let g2 = ot_bound_check(
        &WeightFamily::diagonal_gaussian(&[1.0, 2.0], 0),
        &[],
        &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        1.0,
        BasisSpec::new(p.degree, 2),
        &grid,
    )?;
    Ok(vec![
        Check::new("trivial", "minimal extension from the origin has norm π", "flat extension constant").bound(
            "|lhs − π| / π",
            (flat.lhs - PI).abs() / PI,
            Relation::Le,
            5e-3,
        ),
        Check::new("gaussian-r1", "rank-one Gaussian weight respects the flat bound", "flat extension constant")
            .bound("lhs / rhs", g1.lhs / g1.rhs, Relation::Le, 1.02),
        Check::new("gaussian-r2", "rank-two diagonal Gaussian weight respects the flat bound", "flat extension constant")
            .bound("lhs / rhs", g2.lhs / g2.rhs, Relation::Le, 1.02),
    ])
}

fn direct_image(p: &Params) -> Result<Vec<Check>> {
    let grid = DomainGrid::unit_disk(20, 40)?;
    let t0 = [C64::new(0.1, -0.05)];
    let mut out = Vec::new();
    for (id, w, k, basis) in [
        ("translated", WeightFamily::translated_gaussian(), 1, BasisSpec::new(6, 1)),
        ("coupled", WeightFamily::coupled_gaussian(1.0), 2, BasisSpec::new(4, 2)),
    ] {
        let h = check_hypotheses(&w, k, p.samples, p.seed)?;
        let c = direct_image_curvature(&w, &t0, basis, &grid, DEFAULT_STEP)?;
        out.push(
            Check::new(
                id,
                &format!("Bergman direct image of the {id} Gaussian family is {k}-positive"),
                "direct image positivity",
            )
            .bound("fiber curvature min / scale", h.fiber_min, Relation::Ge, -p.tol)
            .bound("total curvature min / scale", h.total_min, Relation::Ge, -p.tol)
            .bound("direct image min eigenvalue / scale", c.min_eigenvalue() / c.scale(), Relation::Ge, -1e-4),
        );
    }
    let w = WeightFamily::diagonal_gaussian(&[1.0, 2.0], 1);
    let flat = direct_image_curvature(&w, &t0, BasisSpec::new(4, 2), &grid, DEFAULT_STEP)?;
    out.push(
        Check::new("t-independent", "weight without parameter gives a flat direct image", "direct image positivity")
            .bound("curvature norm", flat.matrix().frobenius_norm(), Relation::Le, 1e-6),
    );
    Ok(out)
}

fn dual_norm(p: &Params) -> Result<SuiteOutput> {
    let ts = linspace(p.t_min, p.t_max, p.t_points);
    let cfg = DualNormConfig {
        degree: p.degree,
        ..DualNormConfig::default()
    };
    let tr = dual_norm_track(&WeightFamily::trivial(1, 0), &[C64::new(1.0, 0.0)], p.p, &ts, &cfg)?;
    let closed = |t: f64| (1.0 / (PI * (1.0 + (1.0 - ((p.p - 1.0) * t).exp()) / (p.p - 1.0)))).ln();
    let err = tr
        .t
        .iter()
        .zip(&tr.log_norm)
        .map(|(&t, &v)| (v - closed(t)).abs())
        .fold(0.0, f64::max);
    let track = Track {
        name: "track".into(),
        header: vec!["t".into(), "log_dual_norm".into()],
        rows: tr.t.iter().zip(&tr.log_norm).map(|(&t, &v)| vec![t, v]).collect(),
    };
    Ok(SuiteOutput {
        checks: vec![
            Check::new("monotone", "log dual norm is non-decreasing in t", "dual norm along the degeneration").bound(
                "min first difference",
                tr.min_first_difference,
                Relation::Ge,
                -p.tol,
            ),
            Check::new("convex", "log dual norm is convex in t", "dual norm along the degeneration").bound(
                "min second difference",
                tr.min_second_difference,
                Relation::Ge,
                -p.tol,
            ),
            Check::new("closed-form", "trivial weight matches the closed form", "dual norm along the degeneration")
                .bound("max |log error|", err, Relation::Le, 1e-8),
        ],
        tracks: vec![track],
    })
}

fn coarea(p: &Params) -> Result<Vec<Check>> {
    let c1 = coarea_limit(|_| 1.0, p.coarea_t)?;
    let c2 = coarea_limit(|z| 1.0 + z.re, p.coarea_t)?;
    let mut ts = linspace(-30.0, 0.0, 300_001);
    *ts.last_mut().unwrap() = 0.0;
    let nu: Vec<f64> = ts.iter().map(|t| t.exp()).collect();
    let mut out = vec![
        Check::new("constant", "normalized integral of F ≡ 1 is π", "coarea limit").bound(
            "relative error",
            c1.error,
            Relation::Le,
            1e-14,
        ),
        Check::new("affine", "normalized integral of 1 + Re z tends to π", "coarea limit").bound(
            "relative error",
            c2.error,
            Relation::Lt,
            1e-3,
        ),
    ];
    for pp in [2.0, 4.0, 8.0] {
        let c = liminf_bound_check(&ts, &nu, pp, -20.0)?;
        out.push(
            Check::new(&format!("liminf-p{pp}"), "tail minimum for ν(t) = e^t", "liminf bound 2/(p−1)")
                .bound("|min − 1/(p−1)|", (c.min_value - 1.0 / (pp - 1.0)).abs(), Relation::Lt, 1e-6)
                .bound("min", c.min_value, Relation::Le, c.bound),
        );
    }
    Ok(out)
}

fn obstruction(p: &Params) -> Result<Vec<Check>> {
    // H¹(Pⁿ, K⊗T) = H^{n−1,1}, which is nonzero only on P².
    let expected = if p.n == 2 { 1.0 } else { 0.0 };
    (1..=p.d_max)
        .map(|d| {
            let v = adjoint_restriction_verdict(p.n, d)?;
            Ok(Check::new(
                &format!("d{d}"),
                &format!("restriction to a degree-{d} hypersurface in P^{}", p.n),
                "adjoint restriction cokernel",
            )
            .bound("cokernel dimension", v.coker_dim as f64, Relation::Eq, expected)
            .bound("surjective", f64::from(u8::from(v.surjective)), Relation::Eq, f64::from(u8::from(expected == 0.0))))
        })
        .collect()
}

fn split_example(p: &Params) -> Result<Vec<Check>> {
    let scalar = |x: f64| HermitianMatrix::from_real_diagonal(&[x]);
    let mut rng = sampling::rng(p.seed);
    let mut out = Vec::new();
    for (id, om, expect) in [("unequal", [1.0, 10.0], false), ("equal", [1.0, 1.0], true)] {
        let omegas = [scalar(om[0]), scalar(om[1])];
        let c = split_twist_criterion(&omegas, 200, p.seed)?;
        let phis: Vec<LineWeight> = omegas.iter().cloned().map(LineWeight::hermitian_quadratic).collect();
        let (mut disagree, mut gap, mut negative) = (0, 0.0f64, 0);
        for _ in 0..p.samples {
            let z = sampling::chart_point(&mut rng, 1, 0.5);
            let w = [C64::from_polar(10f64.powf(rng.random_range(-2.0..0.4)), rng.random_range(0.0..2.0 * PI))];
            let h = projectivized_twist_curvature(&phis, &z, &w)?;
            let s = fiber_schur_complement(&h, 1)?;
            let form = split_twist_form(&omegas, &fiber_weights(&phis, &z, &w)?);
            let (ms, mf) = (s.min_eigenvalue(), form.min_eigenvalue());
            gap = gap.max((ms - mf).abs() / form.scale().max(1.0));
            if mf < -p.tol && c.semipositive {
                disagree += 1;
            }
            if ms < -p.tol {
                negative += 1;
            }
        }
        let sampled = if expect { negative == 0 } else { negative > 0 };
        out.push(
            Check::new(
                id,
                &format!("ω = ({}, {}) on a rank-2 split bundle", om[0], om[1]),
                "split bundle twist criterion",
            )
            .bound("criterion semipositive", f64::from(u8::from(c.semipositive)), Relation::Eq, f64::from(u8::from(expect)))
            .bound("projectivized vs criterion gap", gap, Relation::Le, 1e-5)
            .bound("sign disagreements", disagree as f64, Relation::Eq, 0.0)
            .bound("sampled sign matches verdict", f64::from(u8::from(sampled)), Relation::Eq, 1.0),
        );
    }
    Ok(out)
}
