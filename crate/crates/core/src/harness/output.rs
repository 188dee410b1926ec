//! CSV tables and log-log SVG plots for convergence runs.

use crate::analysis::ConvergenceTable;
use crate::error::Error;
use crate::Result;

/// CSV text for one table. Columns exactly:
/// `level,h,d_o,dofs,dg_error,l2_error,rate`; the rate of level 0 is empty.
/// Floats carry 17 significant digits so the table reparses losslessly.
pub fn csv_string(table: &ConvergenceTable) -> String {
    let mut out = String::from("level,h,d_o,dofs,dg_error,l2_error,rate\n");
    for (i, level) in table.levels.iter().enumerate() {
        let rate = match table.rates.get(i).copied().flatten() {
            Some(r) => format!("{:.16e}", r),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{},{:.16e},{:.16e},{}\n",
            level.level,
            level.report.h,
            level.report.overlap_width,
            level.dofs,
            level.report.dg_error,
            level.report.l2_error,
            rate
        ));
    }
    out
}

pub fn write_csv(table: &ConvergenceTable, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, csv_string(table))?;
    Ok(())
}

/// One reparsed CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub level: usize,
    pub h: f64,
    pub d_o: f64,
    pub dofs: usize,
    pub dg_error: f64,
    pub l2_error: f64,
    pub rate: Option<f64>,
}

/// Parse the CSV format back; the inverse of [`csv_string`].
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?;
    if header != "level,h,d_o,dofs,dg_error,l2_error,rate" {
        return Err(Error::Config(format!("unexpected CSV header {:?}", header)));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Config(format!(
                "line {}: expected 7 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 2, e)))
        };
        rows.push(CsvRow {
            level: fields[0]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 2, e)))?,
            h: parse_f(fields[1])?,
            d_o: parse_f(fields[2])?,
            dofs: fields[3]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 2, e)))?,
            dg_error: parse_f(fields[4])?,
            l2_error: parse_f(fields[5])?,
            rate: if fields[6].is_empty() {
                None
            } else {
                Some(parse_f(fields[6])?)
            },
        });
    }
    Ok(rows)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn lambda_label(lambda: f64) -> String {
    if lambda.is_infinite() {
        "matching".to_string()
    } else {
        format!("lambda={}", lambda)
    }
}

/// Log-log plot of DG error against mesh size, one polyline per table.
pub fn svg_plot(tables: &[ConvergenceTable], title: &str) -> String {
    let width = 640.0;
    let height = 480.0;
    let margin_l = 70.0;
    let margin_r = 150.0;
    let margin_t = 40.0;
    let margin_b = 55.0;

    let mut points: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for table in tables {
        let series: Vec<(f64, f64)> = table
            .levels
            .iter()
            .filter(|l| l.report.dg_error > 0.0)
            .map(|l| (l.report.h.log10(), l.report.dg_error.log10()))
            .collect();
        for &(x, y) in &series {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        points.push(series);
    }
    if !x_min.is_finite() {
        x_min = -1.0;
        x_max = 0.0;
        y_min = -1.0;
        y_max = 0.0;
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        if (*hi - *lo).abs() < 1e-12 {
            *lo -= 0.5;
            *hi += 0.5;
        } else {
            let d = 0.05 * (*hi - *lo);
            *lo -= d;
            *hi += d;
        }
    };
    pad(&mut x_min, &mut x_max);
    pad(&mut y_min, &mut y_max);

    let plot_w = width - margin_l - margin_r;
    let plot_h = height - margin_t - margin_b;
    // Mesh refinement progresses to the right: h decreasing.
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = margin_l + (x_max - x) / (x_max - x_min) * plot_w;
        let py = margin_t + (y_max - y) / (y_max - y_min) * plot_h;
        (px, py)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        width, height, width, height
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        margin_l + plot_w / 2.0,
        title
    ));
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        margin_l, margin_t, plot_w, plot_h
    ));

    // Decade grid lines and tick labels.
    let mut decade = x_min.ceil() as i64;
    while (decade as f64) <= x_max {
        let (px, _) = to_px(decade as f64, y_min);
        svg.push_str(&format!(
            "<line x1=\"{0:.1}\" y1=\"{1}\" x2=\"{0:.1}\" y2=\"{2}\" stroke=\"#ddd\"/>\n",
            px,
            margin_t,
            margin_t + plot_h
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">1e{}</text>\n",
            px,
            margin_t + plot_h + 18.0,
            decade
        ));
        decade += 1;
    }
    let mut decade = y_min.ceil() as i64;
    while (decade as f64) <= y_max {
        let (_, py) = to_px(x_min, decade as f64);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1:.1}\" x2=\"{2}\" y2=\"{1:.1}\" stroke=\"#ddd\"/>\n",
            margin_l,
            py,
            margin_l + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"end\">1e{}</text>\n",
            margin_l - 6.0,
            py + 4.0,
            decade
        ));
        decade += 1;
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">h (refinement to the right)</text>\n",
        margin_l + plot_w / 2.0,
        height - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">DG error</text>\n",
        margin_t + plot_h / 2.0,
        margin_t + plot_h / 2.0
    ));

    for (k, (table, series)) in tables.iter().zip(&points).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if series.len() > 1 {
            let path: Vec<String> = series
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = to_px(x, y);
                    format!("{:.2},{:.2}", px, py)
                })
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                path.join(" "),
                color
            ));
        }
        for &(x, y) in series {
            let (px, py) = to_px(x, y);
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{}\"/>\n",
                px, py, color
            ));
        }
        let ly = margin_t + 16.0 + 20.0 * k as f64;
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1:.1}\" x2=\"{2}\" y2=\"{1:.1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
            width - margin_r + 10.0,
            ly,
            width - margin_r + 34.0,
            color
        ));
        let rate_text = table
            .final_rate()
            .map(|r| format!(" (r={:.2})", r))
            .unwrap_or_default();
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}{}</text>\n",
            width - margin_r + 40.0,
            ly + 4.0,
            lambda_label(table.lambda),
            rate_text
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(tables: &[ConvergenceTable], title: &str, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, svg_plot(tables, title))?;
    Ok(())
}
