//! Static SVG overlay of BER curves on a logarithmic axis. Theory curves
//! are drawn as lines, simulations as markers joined by thin lines.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::output::Bundle;

const FLOOR: f64 = 1e-8;

fn draw_err<E: std::fmt::Debug>(e: E) -> Error {
    Error::Io(format!("cannot draw plot: {e:?}"))
}

pub fn write_svg(bundle: &Bundle, path: &Path) -> Result<()> {
    let positive = bundle
        .curves
        .iter()
        .flat_map(|c| c.rows.iter())
        .filter(|r| r.ber > 0.0 && r.snr_db.is_finite());
    let (mut x0, mut x1, mut ymin) = (f64::INFINITY, f64::NEG_INFINITY, 0.5f64);
    for r in positive {
        x0 = x0.min(r.snr_db);
        x1 = x1.max(r.snr_db);
        ymin = ymin.min(r.ber);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let ymin = 10f64.powf(ymin.max(FLOOR).log10().floor());

    let root = SVGBackend::new(path, (900, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(draw_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(&bundle.title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(42)
        .y_label_area_size(64)
        .build_cartesian_2d(x0..x1, (ymin..1.0).log_scale())
        .map_err(draw_err)?;
    chart
        .configure_mesh()
        .x_desc("Es/N0 (dB)")
        .y_desc("BER")
        .y_label_formatter(&|v| format!("{v:.0e}"))
        .draw()
        .map_err(draw_err)?;

    for (i, curve) in bundle.curves.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let pts: Vec<(f64, f64)> = curve
            .rows
            .iter()
            .filter(|r| r.ber > 0.0 && r.snr_db.is_finite())
            .map(|r| (r.snr_db, r.ber.max(ymin)))
            .collect();
        if curve.meta.source.is_theory() {
            chart
                .draw_series(LineSeries::new(pts, color.stroke_width(2)))
                .map_err(draw_err)?
                .label(curve.meta.label.clone())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        } else {
            chart
                .draw_series(LineSeries::new(pts.clone(), color.stroke_width(1)))
                .map_err(draw_err)?;
            chart
                .draw_series(pts.into_iter().map(|p| Circle::new(p, 4, color.stroke_width(2))))
                .map_err(draw_err)?
                .label(curve.meta.label.clone())
                .legend(move |(x, y)| Circle::new((x + 10, y), 4, color.stroke_width(2)));
        }
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::LowerLeft)
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(draw_err)?;
    root.present().map_err(draw_err)?;
    Ok(())
}
