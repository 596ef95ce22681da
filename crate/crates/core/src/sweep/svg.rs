use std::fmt::Write as _;
use std::path::Path;

use crate::qualify::MaxClass;

use super::{Result, SweepError, SweepRecord};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

fn color(r: &SweepRecord) -> &'static str {
    match (r.error.is_some(), r.max_class) {
        (true, _) | (false, None) => "#9e9e9e",
        (false, Some(MaxClass::NeumannVertex)) => "#4575b4",
        (false, Some(MaxClass::LongerNeumannInterior)) => "#d73027",
        (false, Some(MaxClass::Other)) => "#fdae61",
    }
}

/// Smallest positive gap between sorted distinct values; 1 when there is none.
fn spacing(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| w[1] - w[0]).reduce(f64::min).unwrap_or(1.0)
}

/// Standalone SVG 1.1 heatmap of `max_class` over the `(α, β)` plane, with the
/// diagonal `α = β` and the line `α + β = 90°`.
pub fn phase_svg(records: &[SweepRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(SweepError::EmptyRecords);
    }
    let da = spacing(records.iter().map(|r| r.alpha_deg).collect());
    let db = spacing(records.iter().map(|r| r.beta_deg).collect());
    let lo_a = records.iter().map(|r| r.alpha_deg).fold(f64::INFINITY, f64::min) - da / 2.0;
    let hi_a = records.iter().map(|r| r.alpha_deg).fold(f64::NEG_INFINITY, f64::max) + da / 2.0;
    let lo_b = records.iter().map(|r| r.beta_deg).fold(f64::INFINITY, f64::min) - db / 2.0;
    let hi_b = records.iter().map(|r| r.beta_deg).fold(f64::NEG_INFINITY, f64::max) + db / 2.0;
    let sx = SIZE / (hi_a - lo_a);
    let sy = SIZE / (hi_b - lo_b);
    let x = |a: f64| MARGIN + (a - lo_a) * sx;
    let y = |b: f64| MARGIN + SIZE - (b - lo_b) * sy;

    let total = SIZE + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total:.0}" height="{total:.0}" viewBox="0 0 {total:.0} {total:.0}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{total:.0}" height="{total:.0}" fill="white"/>"#
    );
    for r in records {
        let opacity = if r.thin { 0.4 } else { 1.0 };
        let _ = writeln!(
            s,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}" fill-opacity="{opacity}"><title>{} {} {}</title></rect>"#,
            x(r.alpha_deg - da / 2.0),
            y(r.beta_deg + db / 2.0),
            da * sx,
            db * sy,
            color(r),
            r.alpha_deg,
            r.beta_deg,
            r.max_class.map_or("error", |c| c.as_str()),
        );
    }
    // diagonal α = β and right Neumann angle α + β = 90°, clipped to the frame
    let lo = lo_a.max(lo_b);
    let hi = hi_a.min(hi_b);
    if lo < hi {
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1.5"/>"#,
            x(lo),
            y(lo),
            x(hi),
            y(hi)
        );
    }
    let a0 = lo_a.max(90.0 - hi_b);
    let a1 = hi_a.min(90.0 - lo_b);
    if a0 < a1 {
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            x(a0),
            y(90.0 - a0),
            x(a1),
            y(90.0 - a1)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle">alpha (deg)</text>"#,
        MARGIN + SIZE / 2.0,
        total - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.1})">beta (deg)</text>"#,
        MARGIN + SIZE / 2.0,
        MARGIN + SIZE / 2.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_phase(records: &[SweepRecord], path: &Path) -> Result<()> {
    let svg = phase_svg(records)?;
    std::fs::write(path, svg).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepRecord;

    #[test]
    fn heatmap() {
        let mut recs: Vec<SweepRecord> = [(40.0, 40.0), (40.0, 50.0), (50.0, 40.0), (50.0, 50.0)]
            .iter()
            .map(|&(a, b)| SweepRecord::blank(a, b))
            .collect();
        recs[0].max_class = Some(MaxClass::NeumannVertex);
        let svg = phase_svg(&recs).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 5);
        assert_eq!(svg.matches("<line").count(), 2);
        assert!(svg.contains("#4575b4") && svg.contains("#9e9e9e"));
        assert!(!svg.contains("href"));
        assert!(matches!(phase_svg(&[]), Err(SweepError::EmptyRecords)));
        assert_eq!(spacing(vec![40.0, 50.0, 40.0]), 10.0);
        assert_eq!(spacing(vec![40.0]), 1.0);
    }
}
