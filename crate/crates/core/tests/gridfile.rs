use std::f64::consts::PI;

use s3pinch::catalog::CatalogSurface;
use s3pinch::gridfile::{export_grid, parse_grid, read_grid, write_grid};
use s3pinch::quadrature::genus_report;
use s3pinch::surface::Surface;
use s3pinch::Error;

#[test]
fn torus_round_trip_through_a_file() {
    let t = CatalogSurface::flat_torus(0.6).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.csv");
    write_grid(&t, (64, 48), &path).unwrap();
    let imported = read_grid(&path).unwrap();
    assert_eq!(imported.resolution(), (64, 48));
    assert!(!imported.refinable());

    let original = genus_report(&t, &t.grid((64, 48)).unwrap()).unwrap();
    let back = genus_report(&imported, &imported.grid((8, 8)).unwrap()).unwrap();
    assert_eq!(back.genus, 1);
    assert_eq!(back.resolution, (64, 48));
    assert!((back.integral_f - original.integral_f).abs() < 1e-4 * original.integral_f);
    assert!(back.convergence.is_none());
}

#[test]
fn perturbed_sphere_round_trip_uses_one_sided_stencils() {
    let s = CatalogSurface::perturbed_sphere(1.0, 0.1, 2, 1).unwrap();
    let text = export_grid(&s, (96, 96)).unwrap();
    let imported = parse_grid(&text, "psphere").unwrap();
    let rep = genus_report(&imported, &imported.grid((96, 96)).unwrap()).unwrap();
    assert_eq!(rep.genus, 0);
    let original = genus_report(&s, &s.grid((64, 64)).unwrap()).unwrap();
    assert!((rep.area - original.area).abs() < 1e-3 * original.area, "{} vs {}", rep.area, original.area);
}

#[test]
fn exported_text_is_deterministic() {
    let c = CatalogSurface::clifford();
    let a = export_grid(&c, (16, 16)).unwrap();
    assert_eq!(a, export_grid(&c, (16, 16)).unwrap());
    let mut lines = a.lines();
    assert!(lines.next().unwrap().starts_with("# periodic_u=true periodic_v=true domain_u=[0,"));
    assert_eq!(lines.next(), Some("u,v,x1,x2,x3,x4"));
    assert_eq!(a.lines().count(), 2 + 256);
}

#[test]
fn off_sphere_row_is_rejected() {
    let c = CatalogSurface::clifford();
    let text = export_grid(&c, (16, 16)).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let fields: Vec<f64> = lines[7].split(',').map(|f| f.parse().unwrap()).collect();
    lines[7] = format!(
        "{},{},{},{},{},{}",
        fields[0],
        fields[1],
        fields[2] * 1.01,
        fields[3] * 1.01,
        fields[4] * 1.01,
        fields[5] * 1.01
    );
    match parse_grid(&lines.join("\n"), "bad") {
        Err(Error::OffSphere { row, norm }) => {
            assert_eq!(row, 5);
            assert!((norm - 1.01).abs() < 1e-9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn truncated_file_is_a_format_error() {
    let c = CatalogSurface::clifford();
    let text = export_grid(&c, (16, 16)).unwrap();
    let cut = &text[..text.len() - 40];
    assert!(matches!(parse_grid(cut, "cut"), Err(Error::Format(_))));
    let lines: Vec<&str> = text.lines().collect();
    let missing_row = lines[..lines.len() - 1].join("\n");
    assert!(matches!(parse_grid(&missing_row, "short"), Err(Error::Format(_))));
}

#[test]
fn coarse_periodic_grid_is_rejected() {
    let c = CatalogSurface::clifford();
    let text = export_grid(&c, (8, 32)).unwrap();
    assert!(matches!(parse_grid(&text, "coarse"), Err(Error::ResolutionTooCoarse { n: 8, min: 16 })));
}

#[test]
fn points_off_the_lattice_are_rejected() {
    let c = CatalogSurface::clifford();
    let imported = parse_grid(&export_grid(&c, (16, 16)).unwrap(), "c").unwrap();
    assert!(imported.point(0.0, 0.0).is_ok());
    assert!(imported.point(2.0 * PI, 0.0).is_ok());
    assert!(matches!(imported.point(0.1, 0.0), Err(Error::OffGrid { .. })));
}

#[test]
fn shuffled_rows_are_not_a_lattice() {
    let c = CatalogSurface::clifford();
    let text = export_grid(&c, (16, 16)).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(3, 40);
    assert!(matches!(parse_grid(&lines.join("\n"), "shuffled"), Err(Error::Format(_))));
}
