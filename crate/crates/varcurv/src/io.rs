//! File formats: 8-bit binary PGM for masks and images (255 = in-set,
//! loads threshold at 128), flat little-endian f64 rasters for fields
//! (bit-exact round trips), both with a JSON sidecar carrying the grid
//! metadata, plus CSV export of boundary point sets.

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::grid::{BinarySet, Grid, ScalarField};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterHeader {
    pub format: String,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: (f64, f64),
    #[serde(default)]
    pub vmin: Option<f64>,
    #[serde(default)]
    pub vmax: Option<f64>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_sidecar(path: &Path, header: &RasterHeader) -> Result<()> {
    let json = serde_json::to_string_pretty(header)
        .map_err(|e| Error::Format(format!("sidecar serialization: {e}")))?;
    std::fs::write(sidecar_path(path), json)?;
    Ok(())
}

fn read_sidecar(path: &Path) -> Result<Option<RasterHeader>> {
    let sp = sidecar_path(path);
    if !sp.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(sp)?;
    let header: RasterHeader =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("sidecar: {e}")))?;
    Ok(Some(header))
}

fn grid_from_header(header: &RasterHeader, nx: usize, ny: usize) -> Result<Grid> {
    if header.nx != nx || header.ny != ny {
        return Err(Error::GridMismatch("sidecar dimensions disagree with the raster"));
    }
    Grid::new(header.nx, header.ny, header.h, header.origin)
}

/// Fallback grid when no sidecar is present: unit extent, centered.
fn default_grid(nx: usize, ny: usize) -> Grid {
    let h = 1.0 / nx.max(ny) as f64;
    Grid {
        nx,
        ny,
        h,
        origin: (-(nx as f64 - 1.0) / 2.0 * h, -(ny as f64 - 1.0) / 2.0 * h),
    }
}

pub fn save_mask(path: &Path, mask: &BinarySet) -> Result<()> {
    let g = mask.grid;
    let mut bytes = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    bytes.extend(mask.mask.iter().map(|&b| if b { 255u8 } else { 0u8 }));
    std::fs::write(path, bytes)?;
    write_sidecar(
        path,
        &RasterHeader {
            format: "pgm_mask".into(),
            nx: g.nx,
            ny: g.ny,
            h: g.h,
            origin: g.origin,
            vmin: Some(0.0),
            vmax: Some(1.0),
        },
    )
}

struct PgmData {
    nx: usize,
    ny: usize,
    bytes: Vec<u8>,
}

fn parse_pgm(raw: &[u8]) -> Result<PgmData> {
    let mut pos = 0usize;
    let mut token = || -> Result<String> {
        // skip whitespace and comment lines
        loop {
            while pos < raw.len() && raw[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < raw.len() && raw[pos] == b'#' {
                while pos < raw.len() && raw[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < raw.len() && !raw[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&raw[start..pos]).into_owned())
    };
    let magic = token()?;
    if magic != "P5" {
        return Err(Error::Format(format!("expected P5 PGM, found {magic}")));
    }
    let nx: usize = token()?.parse().map_err(|_| Error::Format("bad width".into()))?;
    let ny: usize = token()?.parse().map_err(|_| Error::Format("bad height".into()))?;
    let maxval: usize = token()?.parse().map_err(|_| Error::Format("bad maxval".into()))?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!("unsupported maxval {maxval}")));
    }
    // single whitespace byte after maxval
    pos += 1;
    if raw.len() < pos + nx * ny {
        return Err(Error::Format("truncated PGM pixel data".into()));
    }
    Ok(PgmData { nx, ny, bytes: raw[pos..pos + nx * ny].to_vec() })
}

/// Load a PGM as a scalar field mapped to [0, 1] by value/255.
pub fn load_image(path: &Path) -> Result<ScalarField> {
    let raw = std::fs::read(path)?;
    let pgm = parse_pgm(&raw)?;
    let grid = match read_sidecar(path)? {
        Some(hd) => grid_from_header(&hd, pgm.nx, pgm.ny)?,
        None => default_grid(pgm.nx, pgm.ny),
    };
    Ok(ScalarField {
        grid,
        values: pgm.bytes.iter().map(|&b| b as f64 / 255.0).collect(),
    })
}

/// Load a PGM as a mask (threshold at 128).
pub fn load_mask(path: &Path) -> Result<BinarySet> {
    let raw = std::fs::read(path)?;
    let pgm = parse_pgm(&raw)?;
    let grid = match read_sidecar(path)? {
        Some(hd) => grid_from_header(&hd, pgm.nx, pgm.ny)?,
        None => default_grid(pgm.nx, pgm.ny),
    };
    Ok(BinarySet {
        grid,
        mask: pgm.bytes.iter().map(|&b| b >= 128).collect(),
    })
}

/// Save a field as flat little-endian f64s plus sidecar; round trips are
/// bit-exact.
pub fn save_field(path: &Path, field: &ScalarField) -> Result<()> {
    let g = field.grid;
    let mut bytes = Vec::with_capacity(8 * field.values.len());
    for v in &field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    write_sidecar(
        path,
        &RasterHeader {
            format: "f64_field".into(),
            nx: g.nx,
            ny: g.ny,
            h: g.h,
            origin: g.origin,
            vmin: Some(field.min()),
            vmax: Some(field.max()),
        },
    )
}

pub fn load_field(path: &Path) -> Result<ScalarField> {
    let header = read_sidecar(path)?
        .ok_or_else(|| Error::Format(format!("{} has no sidecar", path.display())))?;
    if header.format != "f64_field" {
        return Err(Error::Format(format!("sidecar format {} is not f64_field", header.format)));
    }
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    let n = header.nx * header.ny;
    if raw.len() != 8 * n {
        return Err(Error::GridMismatch("raster size disagrees with sidecar"));
    }
    let grid = Grid::new(header.nx, header.ny, header.h, header.origin)?;
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ScalarField { grid, values })
}

/// CSV of boundary points, one `x,y` pair per line.
pub fn save_boundary_csv(path: &Path, b: &BoundarySet) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "x,y")?;
    for &(x, y) in &b.points {
        writeln!(f, "{x},{y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn f64_raster_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("field.bin");
        let g = Grid::centered(17, 1.3);
        let f = ScalarField::from_fn(g, |x, y| (x * 12.3).sin() * (y * 7.7).cos() + 1e-17 * x);
        save_field(&p, &f).unwrap();
        let back = load_field(&p).unwrap();
        assert_eq!(back.grid, g);
        assert_eq!(back.values, f.values); // bitwise
    }

    #[test]
    fn mask_round_trip_and_threshold() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mask.pgm");
        let g = Grid::centered(32, 2.0);
        let m = BinarySet::disk(g, (0.1, -0.2), 0.6);
        save_mask(&p, &m).unwrap();
        let back = load_mask(&p).unwrap();
        assert_eq!(back, m);
        let img = load_image(&p).unwrap();
        assert_eq!(img.values.iter().filter(|&&v| v == 1.0).count(), m.count());
    }

    #[test]
    fn all_zero_pgm_loads_as_zero_field() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("zero.pgm");
        std::fs::write(&p, {
            let mut b = b"P5\n# a comment\n8 4\n255\n".to_vec();
            b.extend(std::iter::repeat(0u8).take(32));
            b
        })
        .unwrap();
        let f = load_image(&p).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
        assert_eq!(f.grid.nx, 8);
    }

    #[test]
    fn malformed_header_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.pgm");
        std::fs::write(&p, b"P6\n4 4\n255\n0123456789abcdef").unwrap();
        assert!(matches!(load_mask(&p), Err(Error::Format(_))));
    }

    #[test]
    fn sidecar_disagreement_is_grid_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.pgm");
        let g = Grid::centered(16, 1.0);
        save_mask(&p, &BinarySet::full(g)).unwrap();
        // corrupt the sidecar dimensions
        let sp = sidecar_path(&p);
        let txt = std::fs::read_to_string(&sp).unwrap().replace("16", "17");
        std::fs::write(&sp, txt).unwrap();
        assert!(matches!(load_mask(&p), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn rasterized_disk_area_matches() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("disk.pgm");
        let g = Grid::centered(512, 1.0);
        let r = 0.25;
        let m = BinarySet::disk(g, (0.0, 0.0), r);
        save_mask(&p, &m).unwrap();
        let back = load_mask(&p).unwrap();
        let area = back.area();
        let per = 2.0 * std::f64::consts::PI * r;
        assert!((area - std::f64::consts::PI * r * r).abs() <= g.h * per);
    }
}
