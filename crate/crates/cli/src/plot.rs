//! Minimal self-contained plot output: SVG line charts and heatmaps, and
//! gnuplot surface scripts for Wigner grids.

use std::fmt::Write as _;

use rabi_core::entanglement::EntropyPoint;
use rabi_core::phasespace::WignerGrid;
use rabi_core::spectra::SpectrumSweep;

use crate::config::Format;
use crate::error::CliError;
use crate::format::fmt_g12;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;
/// Heatmaps are drawn with at most this many cells per axis.
const MAX_CELLS: usize = 101;

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

#[derive(Debug, Clone, Copy)]
pub enum PlotData<'a> {
    Spectrum(&'a SpectrumSweep),
    Wigner(&'a WignerGrid),
    Entropy(&'a [EntropyPoint]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotFile {
    pub name: String,
    pub contents: String,
}

pub fn emit_plot(
    data: PlotData<'_>,
    format: Format,
    stem: &str,
    title: &str,
) -> Result<Vec<PlotFile>, CliError> {
    let file = |ext: &str, contents: String| PlotFile {
        name: format!("{stem}.{ext}"),
        contents,
    };
    match (format, data) {
        (Format::Svg, PlotData::Spectrum(s)) => Ok(vec![file("svg", spectrum_svg(s, title))]),
        (Format::Svg, PlotData::Entropy(rows)) => Ok(vec![file("svg", entropy_svg(rows, title))]),
        (Format::Svg, PlotData::Wigner(w)) => Ok(vec![file("svg", heatmap_svg(w, title))]),
        (Format::Gnuplot, PlotData::Wigner(w)) => Ok(vec![
            file("gp", gnuplot_script(w, stem, title)),
            file("dat", gnuplot_data(w)),
        ]),
        (format, _) => Err(CliError::Config(format!(
            "{format:?} output is not available for this kind of data"
        ))),
    }
}

struct Series<'a> {
    label: String,
    ys: &'a [f64],
    color: &'static str,
    dashed: bool,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: &[f64], ys: impl Iterator<Item = f64>) -> Self {
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys.filter(|y| y.is_finite()) {
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if y0 > y1 {
            (y0, y1) = (0.0, 1.0);
        } else if y0 == y1 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        let (mut x0, mut x1) = (xs[0], xs[xs.len() - 1]);
        if x0 >= x1 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        Self {
            x0,
            x1,
            y0: y0 - pad,
            y1: y1 + pad,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn svg_open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (left, right) = (MARGIN_L, WIDTH - MARGIN_R);
    let (top, bottom) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = writeln!(
        out,
        "<rect x=\"{left}\" y=\"{top}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        right - left,
        bottom - top
    );
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let x = f.x0 + t * (f.x1 - f.x0);
        let y = f.y0 + t * (f.y1 - f.y0);
        let (px, py) = (f.px(x), f.py(y));
        let _ = writeln!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{bottom}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/><text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            bottom + 5.0,
            bottom + 18.0,
            short(x)
        );
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{left}\" y2=\"{py:.2}\" stroke=\"black\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            left - 5.0,
            left - 8.0,
            py + 4.0,
            short(y)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        (left + right) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text transform=\"translate(18 {:.2}) rotate(-90)\" text-anchor=\"middle\">{}</text>",
        (top + bottom) / 2.0,
        escape(y_label)
    );
}

fn short(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    series: &[Series<'_>],
) -> String {
    let frame = Frame::fit(xs, series.iter().flat_map(|s| s.ys.iter().copied()));
    let mut out = String::new();
    svg_open(&mut out, title);
    axes(&mut out, &frame, x_label, y_label);
    for s in series {
        let points: Vec<String> = xs
            .iter()
            .zip(s.ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let dash = if s.dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash} points=\"{}\"><title>{}</title></polyline>",
            s.color,
            points.join(" "),
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn spectrum_svg(sweep: &SpectrumSweep, title: &str) -> String {
    let k = sweep.k_levels();
    let columns: Vec<Vec<f64>> = (0..k)
        .map(|j| sweep.levels.iter().map(|row| row[j]).collect())
        .collect();
    let series: Vec<Series<'_>> = columns
        .iter()
        .enumerate()
        .map(|(j, ys)| Series {
            label: format!("E{j}"),
            ys,
            color: PALETTE[j % PALETTE.len()],
            dashed: false,
        })
        .collect();
    line_chart(title, "g / ω_c", "E / ω_c", &sweep.g_grid, &series)
}

fn entropy_svg(rows: &[EntropyPoint], title: &str) -> String {
    let gs: Vec<f64> = rows.iter().map(|r| r.g).collect();
    let qrm: Vec<f64> = rows.iter().map(|r| r.s_qrm).collect();
    let qrma: Vec<f64> = rows.iter().map(|r| r.s_qrma).collect();
    let series = [
        Series {
            label: "QRM".into(),
            ys: &qrm,
            color: "#1a9641",
            dashed: false,
        },
        Series {
            label: "QRMA".into(),
            ys: &qrma,
            color: "#d7191c",
            dashed: true,
        },
    ];
    line_chart(title, "g / ω_c", "S (bits)", &gs, &series)
}

/// Blue for negative, white at zero, red for positive; `t` in [−1, 1].
fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (end, s) = if t < 0.0 {
        ((33.0, 102.0, 172.0), -t)
    } else {
        ((178.0, 24.0, 43.0), t)
    };
    let mix = |c: f64| (255.0 + (c - 255.0) * s).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

fn heatmap_svg(w: &WignerGrid, title: &str) -> String {
    let g = &w.grid;
    let scale = w
        .values
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let stride_q = g.n_q.div_ceil(MAX_CELLS);
    let stride_p = g.n_p.div_ceil(MAX_CELLS);
    let frame = Frame {
        x0: g.q_min,
        x1: g.q_max,
        y0: g.p_min,
        y1: g.p_max,
    };
    let cell_w = (frame.px(g.q_min + g.dq() * stride_q as f64) - frame.px(g.q_min)).abs();
    let cell_h = (frame.py(g.p_min + g.dp() * stride_p as f64) - frame.py(g.p_min)).abs();
    let (qs, ps) = (g.q_values(), g.p_values());

    let mut out = String::new();
    svg_open(&mut out, title);
    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for ip in (0..g.n_p).step_by(stride_p) {
        for iq in (0..g.n_q).step_by(stride_q) {
            let x = (frame.px(qs[iq]) - cell_w / 2.0).max(MARGIN_L);
            let y = (frame.py(ps[ip]) - cell_h / 2.0).max(MARGIN_T);
            let right = (x + cell_w).min(WIDTH - MARGIN_R);
            let bottom = (y + cell_h).min(HEIGHT - MARGIN_B);
            let _ = writeln!(
                out,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                right - x,
                bottom - y,
                diverging(w.at(ip, iq) / scale)
            );
        }
    }
    out.push_str("</g>\n");
    axes(&mut out, &frame, "q", "p");
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">colour scale ±{} (blue &lt; 0 &lt; red)</text>",
        WIDTH - MARGIN_R,
        MARGIN_T - 6.0,
        short(scale)
    );
    out.push_str("</svg>\n");
    out
}

fn gnuplot_data(w: &WignerGrid) -> String {
    let (qs, ps) = (w.grid.q_values(), w.grid.p_values());
    let mut out = String::from("# q p w\n");
    for (ip, p) in ps.iter().enumerate() {
        for (iq, q) in qs.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} {}",
                fmt_g12(*q),
                fmt_g12(*p),
                fmt_g12(w.at(ip, iq))
            );
        }
        out.push('\n');
    }
    out
}

fn gnuplot_script(w: &WignerGrid, stem: &str, title: &str) -> String {
    let scale = w
        .values
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let scale = fmt_g12(scale);
    format!(
        "# 3D surface of the Wigner function; run `gnuplot {stem}.gp`\n\
set terminal pngcairo size 900,700\n\
set output '{stem}.png'\n\
set title '{title}'\n\
set xlabel 'q'\n\
set ylabel 'p'\n\
set zlabel 'W(q,p)' rotate parallel\n\
set view 60, 30\n\
set pm3d depthorder\n\
set palette defined (-1 '#2166ac', 0 'white', 1 '#b2182b')\n\
set cbrange [-{scale}:{scale}]\n\
unset key\n\
splot '{stem}.dat' using 1:2:3 with pm3d\n",
        title = title.replace('\'', "")
    )
}
