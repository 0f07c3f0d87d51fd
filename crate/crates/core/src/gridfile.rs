//! Sampled surface grids on disk.
//!
//! Format (UTF-8 CSV):
//!
//! ```text
//! # periodic_u=true periodic_v=true domain_u=[0,6.283185307] domain_v=[0,6.283185307]
//! u,v,x1,x2,x3,x4
//! 0,0,0.7071067811865476,0,0.7071067811865476,0
//! ...
//! ```
//!
//! Rows are row-major over a uniform Nu x Nv lattice (v fastest). Periodic
//! directions hold N equispaced nodes without the duplicate endpoint;
//! non-periodic directions hold N cell-centred nodes. On import, partials are
//! recovered with 7-point finite-difference stencils on the lattice.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{SurfacePoint, Vec4};
use crate::quadrature::{QuadratureGrid, Rule1d};
use crate::surface::{Domain, Interval, Surface};

/// Minimum node count along a periodic direction.
pub const MIN_PERIODIC_NODES: usize = 16;
/// Minimum node count along a non-periodic direction (one full stencil).
pub const MIN_OPEN_NODES: usize = 8;
/// Largest accepted | |x| - 1 | for an imported row.
pub const SPHERE_TOLERANCE: f64 = 1e-6;
const STENCIL: usize = 7;

fn sample_rule(interval: Interval, n: usize) -> Rule1d {
    if interval.periodic {
        Rule1d::trapezoid(interval, n)
    } else {
        Rule1d::midpoint(interval, n)
    }
}

/// Samples `surface` on an export lattice and renders the grid file.
pub fn export_grid(surface: &dyn Surface, (nu, nv): (usize, usize)) -> Result<String> {
    let d = surface.domain();
    let (ru, rv) = (sample_rule(d.u, nu), sample_rule(d.v, nv));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# periodic_u={} periodic_v={} domain_u=[{},{}] domain_v=[{},{}]",
        d.u.periodic, d.v.periodic, d.u.lo, d.u.hi, d.v.lo, d.v.hi
    );
    out.push_str("u,v,x1,x2,x3,x4\n");
    for &u in &ru.nodes {
        for &v in &rv.nodes {
            let x = surface.point(u, v)?.position;
            let _ = writeln!(out, "{},{},{},{},{},{}", u, v, x[0], x[1], x[2], x[3]);
        }
    }
    Ok(out)
}

pub fn write_grid(surface: &dyn Surface, resolution: (usize, usize), path: &Path) -> Result<()> {
    std::fs::write(path, export_grid(surface, resolution)?)?;
    Ok(())
}

/// A surface known only through samples on a lattice.
#[derive(Debug, Clone)]
pub struct ImportedSurface {
    label: String,
    domain: Domain,
    rule_u: Rule1d,
    rule_v: Rule1d,
    positions: Vec<Vec4>,
}

fn parse_bool(s: &str) -> Result<bool> {
    s.parse().map_err(|_| Error::Format(format!("expected true/false, got `{s}`")))
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Format(format!("expected [lo,hi], got `{s}`")))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| Error::Format(format!("expected [lo,hi], got `{s}`")))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Format(format!("bad number `{t}`")));
    let (lo, hi) = (num(lo)?, num(hi)?);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Format(format!("empty or non-finite domain `{s}`")));
    }
    Ok((lo, hi))
}

fn parse_header(line: &str) -> Result<Domain> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Format("missing `# periodic_u=...` comment line".into()))?;
    let (mut pu, mut pv, mut du, mut dv) = (None, None, None, None);
    for token in body.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected key=value in header, got `{token}`")))?;
        match k {
            "periodic_u" => pu = Some(parse_bool(v)?),
            "periodic_v" => pv = Some(parse_bool(v)?),
            "domain_u" => du = Some(parse_range(v)?),
            "domain_v" => dv = Some(parse_range(v)?),
            _ => return Err(Error::Format(format!("unknown header key `{k}`"))),
        }
    }
    let missing = |k: &str| Error::Format(format!("header lacks `{k}`"));
    let (pu, pv) = (pu.ok_or_else(|| missing("periodic_u"))?, pv.ok_or_else(|| missing("periodic_v"))?);
    let (du, dv) = (du.ok_or_else(|| missing("domain_u"))?, dv.ok_or_else(|| missing("domain_v"))?);
    Ok(Domain {
        u: Interval { lo: du.0, hi: du.1, periodic: pu },
        v: Interval { lo: dv.0, hi: dv.1, periodic: pv },
    })
}

/// Parses a grid file held in memory.
pub fn parse_grid(text: &str, label: &str) -> Result<ImportedSurface> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let domain = parse_header(lines.next().ok_or_else(|| Error::Format("empty file".into()))?)?;
    match lines.next() {
        Some(h) if h.replace(' ', "") == "u,v,x1,x2,x3,x4" => {}
        other => return Err(Error::Format(format!("expected header `u,v,x1,x2,x3,x4`, got {other:?}"))),
    }

    let mut rows: Vec<[f64; 6]> = Vec::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Format(format!("row {row}: expected 6 fields, got {}", fields.len())));
        }
        let mut vals = [0.0; 6];
        for (slot, f) in vals.iter_mut().zip(&fields) {
            *slot = f
                .trim()
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| Error::Format(format!("row {row}: bad number `{f}`")))?;
        }
        let norm = Vec4::new(vals[2], vals[3], vals[4], vals[5]).norm();
        if (norm - 1.0).abs() > SPHERE_TOLERANCE {
            return Err(Error::OffSphere { row, norm });
        }
        rows.push(vals);
    }
    if rows.is_empty() {
        return Err(Error::Format("no data rows".into()));
    }

    let nv = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
    if !rows.len().is_multiple_of(nv) {
        return Err(Error::Format(format!("{} rows do not fill a lattice with {nv} columns", rows.len())));
    }
    let nu = rows.len() / nv;
    let (rule_u, rule_v) = (sample_rule(domain.u, nu), sample_rule(domain.v, nv));
    let (hu, hv) = (domain.u.length() / nu as f64, domain.v.length() / nv as f64);
    let mut positions = Vec::with_capacity(rows.len());
    for (idx, r) in rows.iter().enumerate() {
        let (i, j) = (idx / nv, idx % nv);
        if (r[0] - rule_u.nodes[i]).abs() > 1e-6 * hu || (r[1] - rule_v.nodes[j]).abs() > 1e-6 * hv {
            return Err(Error::Format(format!(
                "row {idx}: (u, v) = ({}, {}) is not lattice node ({i}, {j})",
                r[0], r[1]
            )));
        }
        let x = Vec4::new(r[2], r[3], r[4], r[5]);
        positions.push(x / x.norm());
    }

    for (interval, n) in [(domain.u, nu), (domain.v, nv)] {
        let min = if interval.periodic { MIN_PERIODIC_NODES } else { MIN_OPEN_NODES };
        if n < min {
            if interval.periodic {
                return Err(Error::ResolutionTooCoarse { n, min });
            }
            return Err(Error::Format(format!("{n} nodes along a non-periodic direction, need {min}")));
        }
    }

    Ok(ImportedSurface { label: label.to_string(), domain, rule_u, rule_v, positions })
}

pub fn read_grid(path: &Path) -> Result<ImportedSurface> {
    let text = std::fs::read_to_string(path)?;
    parse_grid(&text, &path.display().to_string())
}

/// Finite-difference weights for derivatives 0..=order at z from the given
/// abscissae (Fornberg's recursion). Returns weights[node][derivative].
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// Lattice indices and (first, second) derivative weights around node i.
fn stencil(rule: &Rule1d, i: usize) -> Vec<(usize, f64, f64)> {
    let n = rule.len();
    let h = rule.interval.length() / n as f64;
    let half = (STENCIL / 2) as isize;
    let indices: Vec<(usize, f64)> = if rule.interval.periodic {
        (-half..=half)
            .map(|o| (((i as isize + o).rem_euclid(n as isize)) as usize, o as f64 * h))
            .collect()
    } else {
        let start = (i as isize - half).clamp(0, (n - STENCIL) as isize) as usize;
        (start..start + STENCIL).map(|k| (k, (k as f64 - i as f64) * h)).collect()
    };
    let offsets: Vec<f64> = indices.iter().map(|&(_, o)| o).collect();
    let w = fd_weights(0.0, &offsets, 2);
    indices.iter().zip(&w).map(|(&(k, _), wk)| (k, wk[1], wk[2])).collect()
}

impl ImportedSurface {
    pub fn resolution(&self) -> (usize, usize) {
        (self.rule_u.len(), self.rule_v.len())
    }

    fn node_index(rule: &Rule1d, t: f64) -> Option<usize> {
        let n = rule.len();
        let h = rule.interval.length() / n as f64;
        let offset = if rule.interval.periodic { 0.0 } else { 0.5 };
        let raw = ((t - rule.interval.lo) / h - offset).round() as isize;
        let i = if rule.interval.periodic { raw.rem_euclid(n as isize) } else { raw };
        if i < 0 || i >= n as isize {
            return None;
        }
        let i = i as usize;
        let node = rule.nodes[i];
        let mut diff = (t - node).abs();
        if rule.interval.periodic {
            diff = diff.min((diff - rule.interval.length()).abs());
        }
        (diff <= 1e-6 * h).then_some(i)
    }

    fn at(&self, i: usize, j: usize) -> Vec4 {
        self.positions[i * self.rule_v.len() + j]
    }
}

impl Surface for ImportedSurface {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn point(&self, u: f64, v: f64) -> Result<SurfacePoint> {
        let i = Self::node_index(&self.rule_u, u).ok_or(Error::OffGrid { u, v })?;
        let j = Self::node_index(&self.rule_v, v).ok_or(Error::OffGrid { u, v })?;
        let (su, sv) = (stencil(&self.rule_u, i), stencil(&self.rule_v, j));

        let x = self.at(i, j);
        let (mut du, mut duu) = (Vec4::zeros(), Vec4::zeros());
        for &(k, w1, w2) in &su {
            du += self.at(k, j) * w1;
            duu += self.at(k, j) * w2;
        }
        let (mut dv, mut dvv) = (Vec4::zeros(), Vec4::zeros());
        for &(k, w1, w2) in &sv {
            dv += self.at(i, k) * w1;
            dvv += self.at(i, k) * w2;
        }
        let mut duv = Vec4::zeros();
        for &(a, wa, _) in &su {
            for &(b, wb, _) in &sv {
                duv += self.at(a, b) * (wa * wb);
            }
        }
        // keep the first partials tangent to S^3
        du -= x * x.dot(&du);
        dv -= x * x.dot(&dv);
        Ok(SurfacePoint { u, v, position: x, du, dv, duu, duv, dvv })
    }

    /// The native lattice, whatever resolution is asked for.
    fn grid(&self, _resolution: (usize, usize)) -> Result<QuadratureGrid> {
        Ok(QuadratureGrid::new(self.rule_u.clone(), self.rule_v.clone()))
    }

    fn refinable(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_weights() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        let first: Vec<f64> = w.iter().map(|r| r[1]).collect();
        let second: Vec<f64> = w.iter().map(|r| r[2]).collect();
        assert_eq!(first, vec![-0.5, 0.0, 0.5]);
        assert_eq!(second, vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn seven_point_stencil_is_exact_on_sextics() {
        let x: Vec<f64> = (-3..=3).map(|k| k as f64 * 0.1).collect();
        let w = fd_weights(0.0, &x, 2);
        let p = |t: f64| 1.0 + t - 2.0 * t * t + t.powi(5) - 0.5 * t.powi(6);
        let d1: f64 = x.iter().zip(&w).map(|(&t, r)| r[1] * p(t)).sum();
        let d2: f64 = x.iter().zip(&w).map(|(&t, r)| r[2] * p(t)).sum();
        assert!((d1 - 1.0).abs() < 1e-10);
        assert!((d2 + 4.0).abs() < 1e-8);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_grid("", "x"), Err(Error::Format(_))));
        assert!(matches!(parse_grid("u,v,x1,x2,x3,x4\n", "x"), Err(Error::Format(_))));
        let bad = "# periodic_u=true periodic_v=maybe domain_u=[0,1] domain_v=[0,1]\nu,v,x1,x2,x3,x4\n";
        assert!(matches!(parse_grid(bad, "x"), Err(Error::Format(_))));
    }
}
