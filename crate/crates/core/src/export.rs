//! Serialization of density grids and sweep curves.
//!
//! All text output is written with 17 significant digits and fixed
//! iteration order, so identical inputs produce byte-identical files
//! regardless of thread count.

use std::io::Write;

use serde::Serialize;

use crate::density::DensityGrid;
use crate::error::Result;
use crate::observables::SweepCurve;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Density CSV: `x,y,p` rows, row-major (y varies across rows, x within).
pub fn write_density_csv<W: Write>(grid: &DensityGrid, out: &mut W) -> Result<()> {
    let mut buf = String::with_capacity(grid.values.len() * 60);
    for iy in 0..grid.spec.ny {
        let y = fmt(grid.spec.y(iy));
        for ix in 0..grid.spec.nx {
            buf.push_str(&fmt(grid.spec.x(ix)));
            buf.push(',');
            buf.push_str(&y);
            buf.push(',');
            buf.push_str(&fmt(grid.value(ix, iy)));
            buf.push('\n');
        }
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Binary 8-bit PGM (P5), scaled so the grid maximum maps to 255.
/// Rows run top-down (largest y first) so the image matches the plots.
pub fn write_density_pgm<W: Write>(grid: &DensityGrid, out: &mut W) -> Result<()> {
    let max = grid.max_value();
    let scale = if max > 0.0 { 255.0 / max } else { 0.0 };
    write!(out, "P5\n{} {}\n255\n", grid.spec.nx, grid.spec.ny)?;
    let mut row = Vec::with_capacity(grid.spec.nx);
    for iy in (0..grid.spec.ny).rev() {
        row.clear();
        for ix in 0..grid.spec.nx {
            row.push((grid.value(ix, iy) * scale).round().clamp(0.0, 255.0) as u8);
        }
        out.write_all(&row)?;
    }
    Ok(())
}

/// Sweep CSV with a header row: `d`, then per-particle coherent
/// `x<i>,y<i>` columns, then the incoherent baseline columns.
pub fn write_sweep_csv<W: Write>(curve: &SweepCurve, out: &mut W) -> Result<()> {
    let n = curve.particle_count();
    let mut header = String::from("d");
    for p in 0..n {
        header.push_str(&format!(",x{0},y{0}", p + 1));
    }
    for p in 0..n {
        header.push_str(&format!(",inc_x{0},inc_y{0}", p + 1));
    }
    header.push('\n');
    let mut buf = header;
    for (i, d) in curve.d.iter().enumerate() {
        buf.push_str(&fmt(*d));
        for p in 0..n {
            let (x, y) = curve.coherent[p][i];
            buf.push(',');
            buf.push_str(&fmt(x));
            buf.push(',');
            buf.push_str(&fmt(y));
        }
        for p in 0..n {
            let (x, y) = curve.incoherent[p][i];
            buf.push(',');
            buf.push_str(&fmt(x));
            buf.push(',');
            buf.push_str(&fmt(y));
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct ParticleColumns {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Serialize)]
struct SweepJson<'a> {
    config: &'a crate::observables::SweepConfig,
    d: &'a [f64],
    particles: Vec<ParticleColumns>,
    incoherent: Vec<ParticleColumns>,
}

/// Sweep JSON embedding the configuration snapshot.
pub fn write_sweep_json<W: Write>(curve: &SweepCurve, out: &mut W) -> Result<()> {
    let split = |cols: &Vec<Vec<(f64, f64)>>| {
        cols.iter()
            .map(|c| ParticleColumns {
                x: c.iter().map(|p| p.0).collect(),
                y: c.iter().map(|p| p.1).collect(),
            })
            .collect()
    };
    let doc = SweepJson {
        config: &curve.config,
        d: &curve.d,
        particles: split(&curve.coherent),
        incoherent: split(&curve.incoherent),
    };
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::other)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{expand_postselected, DetectorPattern};
    use crate::density::{build_terms, probability_density, GridSpec};
    use crate::modes::InteractionConfig;
    use crate::observables::sweep;
    use std::f64::consts::FRAC_PI_2;

    fn small_grid() -> DensityGrid {
        let pattern = DetectorPattern::parse("AAA").unwrap();
        let state = expand_postselected(3, &pattern, FRAC_PI_2).unwrap();
        let terms = build_terms(&state, &InteractionConfig::phase_free(0.25), 0).unwrap();
        probability_density(&terms, &GridSpec::square(6.0, 33)).unwrap()
    }

    #[test]
    fn csv_shape_and_digits() {
        let grid = small_grid();
        let mut out = Vec::new();
        write_density_csv(&grid, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 33 * 33);
        let first: Vec<&str> = lines[0].split(',').collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[0], "-6.0000000000000000e0");
        // 17 significant digits: 16 after the decimal point.
        assert_eq!(
            first[2]
                .split('.')
                .nth(1)
                .unwrap()
                .split('e')
                .next()
                .unwrap()
                .len(),
            16
        );
    }

    #[test]
    fn pgm_header_and_peak() {
        let grid = small_grid();
        let mut out = Vec::new();
        write_density_pgm(&grid, &mut out).unwrap();
        assert!(out.starts_with(b"P5\n33 33\n255\n"));
        let header_len = b"P5\n33 33\n255\n".len();
        assert_eq!(out.len(), header_len + 33 * 33);
        assert_eq!(out[header_len..].iter().max(), Some(&255u8));
    }

    #[test]
    fn sweep_csv_header() {
        let pattern = DetectorPattern::parse("AA").unwrap();
        let curve = sweep(
            &pattern,
            FRAC_PI_2,
            &InteractionConfig::phase_free(0.0),
            &[0.0, 0.5, 1.0],
        )
        .unwrap();
        let mut out = Vec::new();
        write_sweep_csv(&curve, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "d,x1,y1,x2,y2,inc_x1,inc_y1,inc_x2,inc_y2"
        );
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn sweep_json_embeds_config() {
        let pattern = DetectorPattern::parse("AAA").unwrap();
        let curve = sweep(
            &pattern,
            FRAC_PI_2,
            &InteractionConfig::full(0.0, 5.0),
            &[0.0, 0.1],
        )
        .unwrap();
        let mut out = Vec::new();
        write_sweep_json(&curve, &mut out).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(doc["config"]["pattern"], "AAA");
        assert_eq!(doc["config"]["k"], 5.0);
        assert_eq!(doc["config"]["phase_model"], "geometric_plus_interaction");
        assert_eq!(doc["particles"].as_array().unwrap().len(), 3);
        assert_eq!(doc["d"].as_array().unwrap().len(), 2);
    }
}
