//! End-to-end acceptance checks. Run with `cargo test --test acceptance`; prints
//! one PASS/FAIL line per criterion and exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use s3pinch::catalog::{CatalogSurface, Side};
use s3pinch::certify::{eigen_certificate, gap_certificate};
use s3pinch::gridfile::{export_grid, parse_grid};
use s3pinch::pinch::{
    beta_solve, cubic_gap, f_inverse, f_pinch, f_series, gap_threshold, pair_gap_dtds, pair_gap_ds, pair_gap_st,
    pair_gap, S3_VOLUME,
};
use s3pinch::quadrature::{genus_report, genus_report_with, GenusOptions, QuadratureGrid};
use s3pinch::surface::Surface;
use s3pinch::tube::{monte_carlo_volume, sum_chain, DEFAULT_SAMPLES};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn grid(s: &dyn Surface, n: usize) -> QuadratureGrid {
    s.grid((n, n)).expect("grid")
}

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn clifford_equality() -> Outcome {
    let start = Instant::now();
    let c = CatalogSurface::clifford();
    let r = genus_report(&c, &grid(&c, 64)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let target = 4.0 * PI * PI;
    let rel = (r.integral_f - target).abs() / target;
    check(rel < 1e-8, format!("relative error {rel:e}"))?;
    check(r.genus == 1, format!("genus {}", r.genus))?;
    check(elapsed < 1.0, format!("took {elapsed:.3}s"))?;
    Ok(format!("rel err {rel:.2e}, {elapsed:.3}s"))
}

fn sphere_equality() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
        let s = CatalogSurface::geodesic_sphere(r).map_err(|e| e.to_string())?;
        let rep = genus_report(&s, &grid(&s, 64)).map_err(|e| e.to_string())?;
        check(rep.integral_f.abs() < 1e-10, format!("r={r}: integral of f {}", rep.integral_f))?;
        check(rep.genus == 0, format!("r={r}: genus {}", rep.genus))?;
        let gb = (rep.total_k - 4.0 * PI).abs();
        check(gb < 1e-6, format!("r={r}: Gauss-Bonnet residual {gb:e}"))?;
        worst = worst.max(gb);
    }
    Ok(format!("worst Gauss-Bonnet residual {worst:.2e}"))
}

fn hk_tightness() -> Outcome {
    let mut cases: Vec<(CatalogSurface, Vec<Side>)> = [PI / 4.0, PI / 3.0, PI / 2.0]
        .iter()
        .map(|&r| (CatalogSurface::geodesic_sphere(r).unwrap(), vec![Side::One]))
        .collect();
    cases.push((CatalogSurface::clifford(), vec![Side::One, Side::Two]));
    let mut worst: f64 = 0.0;
    for (s, sides) in &cases {
        let exact = s.exact().side_volumes;
        let chain = sum_chain(s, &grid(s, 64), Some(exact)).map_err(|e| e.to_string())?;
        for side in sides {
            let rep = &chain.sides[side.index()];
            let v = exact[side.index()].value;
            let err = (rep.hk_upper - v).abs();
            check(err < 1e-7 * (1.0 + v), format!("{s} side {side:?}: |{} - {v}| = {err:e}", rep.hk_upper))?;
            worst = worst.max(err);
        }
        let total = chain.sides[0].hk_upper + chain.sides[1].hk_upper;
        check(total >= S3_VOLUME - 1e-7, format!("{s}: side sum {total} below 2 pi^2"))?;
        check((total - S3_VOLUME).abs() < 1e-7, format!("{s}: side sum {total} not equal to 2 pi^2"))?;
    }
    Ok(format!("worst |hk - exact| {worst:.2e}"))
}

fn curvature_pair_suite() -> Outcome {
    let n = 400;
    let step = 20.0 / (n - 1) as f64;
    let mut min_gap = f64::INFINITY;
    let mut min_off_line = f64::INFINITY;
    for i in 0..n {
        for j in i..n {
            let (k1, k2) = (-10.0 + i as f64 * step, -10.0 + j as f64 * step);
            let g = pair_gap(k1, k2).map_err(|e| e.to_string())?;
            min_gap = min_gap.min(g);
            if (k1 - k2).abs() > 1e-6 && (k1 + k2).abs() > 1e-6 {
                min_off_line = min_off_line.min(g);
            }
        }
    }
    check(min_gap >= -1e-12, format!("grid minimum {min_gap:e}"))?;
    check(min_off_line > 0.0, format!("gap vanishes off k1 = +-k2: {min_off_line:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100_000 {
        let (a, b): (f64, f64) = (rng.gen_range(-10.0..=10.0), rng.gen_range(-10.0..=10.0));
        let g = pair_gap(a.min(b), a.max(b)).map_err(|e| e.to_string())?;
        check(g >= -1e-12, format!("random pair ({a}, {b}): {g:e}"))?;
    }

    let h = 1e-3;
    let mut worst_rel: f64 = 0.0;
    for _ in 0..2_000 {
        let (t, s): (f64, f64) = (rng.gen_range(0.05..10.0), rng.gen_range(0.05..10.0));
        // fourth-order central differences: of F in s, then of dF/ds in t
        let fd_s = (-pair_gap_st(t, s + 2.0 * h).unwrap() + 8.0 * pair_gap_st(t, s + h).unwrap()
            - 8.0 * pair_gap_st(t, s - h).unwrap()
            + pair_gap_st(t, s - 2.0 * h).unwrap())
            / (12.0 * h);
        let fd_ts = (-pair_gap_ds(t + 2.0 * h, s).unwrap() + 8.0 * pair_gap_ds(t + h, s).unwrap()
            - 8.0 * pair_gap_ds(t - h, s).unwrap()
            + pair_gap_ds(t - 2.0 * h, s).unwrap())
            / (12.0 * h);
        let ds = pair_gap_ds(t, s).unwrap();
        let dts = pair_gap_dtds(t, s).unwrap();
        check((fd_s - ds).abs() <= 1e-6 * ds.abs().max(1e-3), format!("dF/ds at ({t}, {s}): {ds} vs {fd_s}"))?;
        let rel = (fd_ts - dts).abs() / dts.abs();
        check(rel <= 1e-6, format!("d2F/dtds at ({t}, {s}): {dts} vs {fd_ts}"))?;
        worst_rel = worst_rel.max(rel);
    }
    for i in 0..=200 {
        for j in 0..=200 {
            let (t, s) = (i as f64 * 0.05, j as f64 * 0.05);
            let v = pair_gap_dtds(t, s).unwrap();
            check(v >= 0.0, format!("d2F/dtds({t}, {s}) = {v}"))?;
        }
    }
    Ok(format!("grid min {min_gap:.2e}, min off the lines {min_off_line:.2e}, mixed-partial rel err {worst_rel:.2e}"))
}

fn cubic_and_series() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let t = 10.0 * (1.0 - rng.gen::<f64>()); // (0, 10]
        let g = cubic_gap(t).map_err(|e| e.to_string())?;
        check(g > 0.0, format!("cubic gap at {t}: {g:e}"))?;
    }
    let mut worst: f64 = 0.0;
    for i in 1..140 {
        let t = i as f64 * 0.01;
        let f = f_pinch(t).unwrap();
        let mut terms = 1;
        loop {
            let a = f_series(t, terms).unwrap();
            // past this point the partial sums agree with f to rounding
            if a.error_bound <= 1e-13 * f || terms > 2000 {
                break;
            }
            let b = f_series(t, terms + 1).unwrap();
            let tol = 1e-15 * f;
            check(
                (a.value - f) * (b.value - f) <= tol * tol,
                format!("partial sums {terms},{} fail to bracket f({t})", terms + 1),
            )?;
            check((a.value - f).abs() <= a.error_bound + tol, format!("error bound at t={t}, L={terms}"))?;
            terms += 1;
        }
        if t <= 1.0 {
            let err = (f_series(t, 30).unwrap().value - f).abs();
            check(err < 1e-9, format!("L=30 at t={t}: {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("L=30 worst error {worst:.2e} on t <= 1"))
}

fn torus_sweep() -> Outcome {
    let rows: Vec<(f64, f64)> = (0..61)
        .map(|i| {
            let a = 0.3 + 0.01 * i as f64;
            let s = CatalogSurface::flat_torus(a).unwrap();
            let r = genus_report_with(&s, &grid(&s, 64), GenusOptions { refine: false, ..Default::default() })
                .unwrap();
            (a, r.slack)
        })
        .collect();
    let step = 0.01;
    for &(a, slack) in &rows {
        if (a - FRAC_1_SQRT_2).abs() > step {
            check(slack > 0.0, format!("slack {slack} at a={a}"))?;
        }
    }
    let argmin = rows.iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap();
    check((argmin.0 - FRAC_1_SQRT_2).abs() <= step, format!("argmin at a={}", argmin.0))?;
    let k = rows.iter().position(|r| r == argmin).unwrap();
    let unimodal = rows[..=k].windows(2).all(|w| w[1].1 < w[0].1) && rows[k..].windows(2).all(|w| w[1].1 > w[0].1);
    check(unimodal, "slack not unimodal".into())?;
    let c = CatalogSurface::flat_torus(FRAC_1_SQRT_2).unwrap();
    let at = genus_report(&c, &grid(&c, 64)).unwrap().slack;
    check(at.abs() < 1e-8, format!("slack at 1/sqrt(2): {at:e}"))?;
    Ok(format!("argmin a={:.2} (slack {:.3e}), slack at 1/sqrt(2) {at:.2e}", argmin.0, argmin.1))
}

fn solves() -> Outcome {
    let beta = beta_solve(1, S3_VOLUME).map_err(|e| e.to_string())?.value;
    check((beta - 1.0).abs() < 1e-10, format!("beta {beta}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(0.0..=10.0);
        let back = f_inverse(f_pinch(t).unwrap()).map_err(|e| e.to_string())?.value;
        let err = (back - t).abs();
        check(err < 1e-10, format!("f^-1(f({t})) = {back}"))?;
        worst = worst.max(err);
    }
    Ok(format!("beta - 1 = {:.1e}, worst round trip {worst:.1e}", beta - 1.0))
}

fn gap_certificates() -> Outcome {
    let e = CatalogSurface::equator();
    let ge = gap_certificate(&e, &grid(&e, 64)).map_err(|e| e.to_string())?;
    check(ge.below_threshold && ge.integral_a3.abs() < 1e-8, format!("equator {:?}", ge))?;
    let c = CatalogSurface::clifford();
    let gc = gap_certificate(&c, &grid(&c, 64)).map_err(|e| e.to_string())?;
    let expect = 4.0 * SQRT_2 * PI * PI;
    let rel = (gc.integral_a3 - expect).abs() / expect;
    check(!gc.below_threshold && rel < 1e-8, format!("Clifford {:?}", gc))?;
    check(((gc.threshold - gap_threshold()) / gap_threshold()).abs() < 1e-15, "threshold".into())?;
    Ok(format!("equator {:.1e}, Clifford rel err {rel:.1e}", ge.integral_a3))
}

fn eigen_certificates() -> Outcome {
    for r in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
        let s = CatalogSurface::geodesic_sphere(r).unwrap();
        let c = eigen_certificate(&s, &grid(&s, 64)).map_err(|e| e.to_string())?;
        check((c.product - 8.0 * PI).abs() < 1e-10, format!("r={r}: lambda1*Area {}", c.product))?;
        check(c.integral_f.abs() < 1e-10, format!("r={r}: integral of f {}", c.integral_f))?;
        let p = &c.bounds[0];
        check(p.holds && p.equality && !c.equality_discrepancy, format!("r={r}: {:?}", c))?;
    }
    let t = CatalogSurface::clifford();
    let c = eigen_certificate(&t, &grid(&t, 64)).map_err(|e| e.to_string())?;
    let p = &c.bounds[0];
    check((c.product - 4.0 * PI * PI).abs() < 1e-10, format!("Clifford product {}", c.product))?;
    check((p.rhs - 16.0 * PI).abs() < 1e-8, format!("Clifford bound {}", p.rhs))?;
    check(p.holds && !p.equality, "Clifford bound should hold strictly".into())?;
    check(c.equality_discrepancy && c.note.is_some(), "Clifford discrepancy not flagged".into())?;
    Ok(format!("spheres 8pi = 8pi; Clifford {:.4} < {:.4}, flagged", c.product, p.rhs))
}

fn monte_carlo() -> Outcome {
    let cases = [
        (CatalogSurface::equator(), Side::One),
        (CatalogSurface::equator(), Side::Two),
        (CatalogSurface::clifford(), Side::One),
        (CatalogSurface::clifford(), Side::Two),
        (CatalogSurface::flat_torus(0.6).unwrap(), Side::One),
        (CatalogSurface::flat_torus(0.6).unwrap(), Side::Two),
    ];
    let mut summary = Vec::new();
    for (s, side) in &cases {
        let exact = s.exact().side_volumes[side.index()].value;
        let hits = (0..100u64)
            .filter(|&seed| {
                let est = monte_carlo_volume(s, *side, DEFAULT_SAMPLES, seed);
                (est.value - exact).abs() <= 3.0 * est.stderr
            })
            .count();
        check(hits >= 95, format!("{s} side {side:?}: {hits}/100 within 3 sigma"))?;
        summary.push(hits.to_string());
    }
    Ok(format!("within 3 sigma per case: {}/100", summary.join(",")))
}

fn import_round_trip() -> Outcome {
    let c = CatalogSurface::clifford();
    let text = export_grid(&c, (64, 64)).map_err(|e| e.to_string())?;
    let imported = parse_grid(&text, "clifford.csv").map_err(|e| e.to_string())?;
    let r = genus_report(&imported, &grid(&imported, 64)).map_err(|e| e.to_string())?;
    check(r.genus == 1, format!("genus {}", r.genus))?;
    check(r.slack.abs() < 1e-4, format!("slack {:e}", r.slack))?;
    Ok(format!("genus 1, slack {:.2e}", r.slack))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Clifford torus equality", clifford_equality),
        ("geodesic sphere equality", sphere_equality),
        ("tube-volume tightness", hk_tightness),
        ("two-curvature comparison suite", curvature_pair_suite),
        ("cubic comparison and series", cubic_and_series),
        ("flat torus sweep", torus_sweep),
        ("beta and inverse solves", solves),
        ("gap certificates", gap_certificates),
        ("eigenvalue certificates", eigen_certificates),
        ("Monte-Carlo volume oracle", monte_carlo),
        ("import round trip", import_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
