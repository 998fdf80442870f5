//! SVG overlays of two boundary point sets in physical coordinates,
//! ground truth and computed in distinct stroke styles, 1:1 aspect.

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

pub fn render_overlay(truth: &BoundarySet, computed: &BoundarySet, path: &Path) -> Result<()> {
    if truth.is_empty() || computed.is_empty() {
        return Err(Error::EmptyInput("overlay of an empty boundary set"));
    }
    let g = truth.grid;
    let (x0, y0, x1, y1) = g.bounds();
    let r = g.h / 3.0;
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {} {} {}\" width=\"800\" height=\"800\" preserveAspectRatio=\"xMidYMid meet\">",
        -y1,
        x1 - x0,
        y1 - y0
    )?;
    // flip y so the physical orientation is preserved
    writeln!(f, "<g transform=\"scale(1,-1)\">")?;
    writeln!(
        f,
        "<g fill=\"none\" stroke=\"#1a9850\" stroke-width=\"{}\">",
        g.h / 4.0
    )?;
    for &(x, y) in &truth.points {
        writeln!(f, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{r}\"/>")?;
    }
    writeln!(f, "</g>")?;
    writeln!(
        f,
        "<g fill=\"#d73027\" stroke=\"none\" opacity=\"0.8\">"
    )?;
    for &(x, y) in &computed.points {
        writeln!(f, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{}\"/>", r * 0.6)?;
    }
    writeln!(f, "</g>")?;
    writeln!(f, "</g>")?;
    writeln!(f, "</svg>")?;
    Ok(())
}
