use std::fmt::Write as _;
use std::path::Path;

use super::{Experiment, InputState, Method, SweepRecord};
use crate::error::{Error, Result};

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 380.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const LEGEND_W: f64 = 190.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Series {
    label: String,
    color: &'static str,
    dash: Option<&'static str>,
    points: Vec<(f64, f64)>,
}

struct Panel {
    title: String,
    xlabel: &'static str,
    ylabel: &'static str,
    series: Vec<Series>,
}

fn dash(method: Method) -> Option<&'static str> {
    match method {
        Method::DirectKnown => Some("8,3,2,3"),
        Method::Mle => None,
        Method::DirectUnknown => Some("7,4"),
    }
}

fn input_label(input: &InputState) -> String {
    match input {
        InputState::Single(p) => format!("({}, {})", p.nbar, p.r),
        InputState::Two(p) if p.nbar1 == p.nbar2 => format!("({}, {})", p.nbar1, p.r),
        InputState::Two(p) => format!("({}, {}, {})", p.nbar1, p.nbar2, p.r),
    }
}

/// Groups records by input (in order of appearance) and method.
fn series_of(records: &[SweepRecord], value: impl Fn(&SweepRecord) -> Option<f64>) -> Vec<Series> {
    let mut inputs: Vec<InputState> = Vec::new();
    let mut out: Vec<(usize, Method, Series)> = Vec::new();
    for rec in records {
        let input = rec.input();
        let idx = match inputs.iter().position(|i| *i == input) {
            Some(i) => i,
            None => {
                inputs.push(input);
                inputs.len() - 1
            }
        };
        let pos = match out
            .iter()
            .position(|(i, m, _)| *i == idx && *m == rec.method)
        {
            Some(p) => p,
            None => {
                out.push((
                    idx,
                    rec.method,
                    Series {
                        label: format!("{} {}", input_label(&input), rec.method.label()),
                        color: PALETTE[idx % PALETTE.len()],
                        dash: dash(rec.method),
                        points: Vec::new(),
                    },
                ));
                out.len() - 1
            }
        };
        if let Some(v) = value(rec).filter(|v| v.is_finite()) {
            out[pos].2.points.push((rec.sigma, v));
        }
    }
    out.into_iter().map(|(_, _, s)| s).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Axis range widened to multiples of a 1-2-5 step, with that step.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64, f64) {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0, 0.2);
    }
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw * (1.0 - 1e-9))
        .unwrap_or(10.0 * mag);
    let lo = (lo / step + 1e-9).floor() * step;
    let hi = (hi / step - 1e-9).ceil() * step;
    (lo, hi, step)
}

fn text(svg: &mut String, x: f64, y: f64, anchor: &str, extra: &str, body: &str) {
    let _ = writeln!(
        svg,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="12"{extra}>{body}</text>"#
    );
}

fn axes(
    svg: &mut String,
    ox: f64,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    (x0, x1, xs): (f64, f64, f64),
    (y0, y1, ys): (f64, f64, f64),
) {
    let (left, top) = (ox + MARGIN_L, MARGIN_T);
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    );
    let xn = ((x1 - x0) / xs).round() as usize;
    for k in 0..=xn {
        let v = x0 + k as f64 * xs;
        let px = left + (v - x0) / (x1 - x0) * w;
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            top + h,
            top + h + 5.0
        );
        text(svg, px, top + h + 18.0, "middle", "", &tick_label(v));
    }
    let yn = ((y1 - y0) / ys).round() as usize;
    for k in 0..=yn {
        let v = y0 + k as f64 * ys;
        let py = top + h - (v - y0) / (y1 - y0) * h;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/>"#,
            left - 5.0
        );
        text(svg, left - 8.0, py + 4.0, "end", "", &tick_label(v));
    }
    text(svg, left + w / 2.0, top - 14.0, "middle", "", title);
    text(svg, left + w / 2.0, PANEL_H - 14.0, "middle", "", xlabel);
    let (lx, ly) = (ox + 16.0, top + h / 2.0);
    text(
        svg,
        lx,
        ly,
        "middle",
        &format!(r#" transform="rotate(-90 {lx:.2} {ly:.2})""#),
        ylabel,
    );
}

fn line_panel(svg: &mut String, ox: f64, panel: &Panel) {
    let xr = range(
        panel
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0)),
    );
    let yr = range(
        panel
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1)),
    );
    axes(svg, ox, &panel.title, panel.xlabel, panel.ylabel, xr, yr);
    let (left, top) = (ox + MARGIN_L, MARGIN_T);
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (xr, yr) = ((xr.0, xr.1), (yr.0, yr.1));
    let map = |(x, y): (f64, f64)| {
        (
            left + (x - xr.0) / (xr.1 - xr.0) * w,
            top + h - (y - yr.0) / (yr.1 - yr.0) * h,
        )
    };
    for (k, s) in panel.series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&p| {
                let (x, y) = map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let dash = s
            .dash
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#,
            pts.join(" "),
            s.color
        );
        let (lx, ly) = (left + w + 12.0, top + 10.0 + 16.0 * k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5"{dash}/>"#,
            ly - 4.0,
            lx + 30.0,
            ly - 4.0,
            s.color
        );
        text(svg, lx + 36.0, ly, "start", "", &s.label);
    }
}

/// Diverging color for `t` in `[-1, 1]`: blue, white, red.
fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!(
        "#{:02x}{:02x}{:02x}",
        r.round() as u8,
        g.round() as u8,
        b.round() as u8
    )
}

fn heatmap(svg: &mut String, records: &[SweepRecord]) {
    let mut sigmas: Vec<f64> = records.iter().map(|r| r.sigma).collect();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    let mut phis: Vec<f64> = records.iter().map(|r| r.phi).collect();
    phis.sort_by(f64::total_cmp);
    phis.dedup();
    let scale = records
        .iter()
        .filter_map(|r| r.angle_deviation)
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let (left, top) = (MARGIN_L, MARGIN_T);
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (cw, ch) = (w / sigmas.len().max(1) as f64, h / phis.len().max(1) as f64);
    for rec in records {
        let (Some(i), Some(j)) = (
            sigmas.iter().position(|s| *s == rec.sigma),
            phis.iter().position(|p| *p == rec.phi),
        ) else {
            continue;
        };
        let fill = rec
            .angle_deviation
            .map(|d| diverging(d / scale))
            .unwrap_or_else(|| "#808080".into());
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            left + i as f64 * cw,
            top + h - (j + 1) as f64 * ch,
            cw + 0.05,
            ch + 0.05
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    );
    let ticks = 5.min(sigmas.len().saturating_sub(1)).max(1);
    for k in 0..=ticks {
        let idx = k * sigmas.len().saturating_sub(1) / ticks;
        if let Some(&s) = sigmas.get(idx) {
            text(
                svg,
                left + (idx as f64 + 0.5) * cw,
                top + h + 18.0,
                "middle",
                "",
                &tick_label(s),
            );
        }
    }
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        text(
            svg,
            left - 8.0,
            top + h - t * h + 4.0,
            "end",
            "",
            &tick_label(t * std::f64::consts::PI),
        );
    }
    text(
        svg,
        left + w / 2.0,
        top - 14.0,
        "middle",
        "",
        &format!("Squeezing-angle deviation (max |dev| = {scale:.3e} rad)"),
    );
    text(
        svg,
        left + w / 2.0,
        PANEL_H - 14.0,
        "middle",
        "",
        "coarse-graining size sigma",
    );
    let (lx, ly) = (16.0, top + h / 2.0);
    text(
        svg,
        lx,
        ly,
        "middle",
        &format!(r#" transform="rotate(-90 {lx:.2} {ly:.2})""#),
        "input squeezing angle phi_i",
    );
}

/// SVG document for a sweep: a deviation map for `fig2c`, line charts otherwise.
pub fn render_svg(records: &[SweepRecord]) -> String {
    let experiment = records.first().map(|r| r.experiment);
    let two_mode = records.first().is_some_and(|r| r.modes == 2);
    let nc_label = if two_mode {
        "logarithmic negativity E_N"
    } else {
        "nonclassical squeezing r_nc"
    };
    let panels: Vec<Panel> = match experiment {
        Some(Experiment::Fig2c) => Vec::new(),
        Some(Experiment::Fig3) => vec![Panel {
            title: "Thermal-reservoir mixing fraction of MLE estimates".into(),
            xlabel: "coarse-graining size sigma",
            ylabel: "fraction y",
            series: series_of(records, |r| r.y),
        }],
        _ => vec![
            Panel {
                title: "Fidelity between input and reconstructed state".into(),
                xlabel: "coarse-graining size sigma",
                ylabel: "fidelity F",
                series: series_of(records, |r| r.fidelity),
            },
            Panel {
                title: format!("{} of the reconstructed state", capitalize(nc_label)),
                xlabel: "coarse-graining size sigma",
                ylabel: nc_label,
                series: series_of(records, |r| r.nonclassicality),
            },
        ],
    };
    let width = if panels.is_empty() {
        PANEL_W
    } else {
        (PANEL_W + LEGEND_W) * panels.len() as f64
    };
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width:.0}" height="{PANEL_H:.0}" fill="white"/>"#
    );
    if experiment == Some(Experiment::Fig2c) {
        heatmap(&mut svg, records);
    } else if panels.is_empty() {
        axes(
            &mut svg,
            0.0,
            "no records",
            "coarse-graining size sigma",
            "",
            (0.0, 1.0, 0.2),
            (0.0, 1.0, 0.2),
        );
    }
    for (k, panel) in panels.iter().enumerate() {
        line_panel(&mut svg, k as f64 * (PANEL_W + LEGEND_W), panel);
    }
    svg.push_str("</svg>\n");
    svg
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

pub fn emit_svg(records: &[SweepRecord], path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(records)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(experiment: Experiment, sigma: f64, phi: f64, method: Method, v: f64) -> SweepRecord {
        SweepRecord {
            experiment,
            modes: 1,
            nbar1: 0.0,
            nbar2: None,
            r: 1.0,
            phi,
            sigma,
            method,
            fidelity: Some(v),
            nonclassicality: Some(1.0 - v),
            angle_deviation: Some(v - 0.5),
            y: Some(1.0 + v),
            physical: Some(true),
            error: None,
            wall_time: 0.0,
        }
    }

    #[test]
    fn line_chart_has_one_polyline_per_series() {
        let recs: Vec<_> = [0.1, 0.5, 1.0]
            .iter()
            .flat_map(|&s| {
                Method::ALL
                    .iter()
                    .map(move |&m| rec(Experiment::Fig4, s, 0.0, m, 1.0 - s / 3.0))
            })
            .collect();
        let svg = render_svg(&recs);
        assert_eq!(svg.matches("<polyline").count(), 6);
        assert!(svg.contains("stroke-dasharray=\"7,4\""));
        assert!(svg.contains("fidelity F") && svg.contains("r_nc"));
        assert_eq!(svg, render_svg(&recs));
    }

    #[test]
    fn heatmap_cells() {
        let recs: Vec<_> = (0..4)
            .flat_map(|k| {
                [0.1, 0.2].map(|s| {
                    rec(
                        Experiment::Fig2c,
                        s,
                        k as f64 * 0.7,
                        Method::DirectUnknown,
                        0.1 * k as f64,
                    )
                })
            })
            .collect();
        let svg = render_svg(&recs);
        assert_eq!(svg.matches("<rect").count(), 2 + 8);
    }

    #[test]
    fn empty_records_render() {
        let svg = render_svg(&[]);
        assert!(svg.starts_with("<?xml") && svg.ends_with("</svg>\n"));
    }
}
