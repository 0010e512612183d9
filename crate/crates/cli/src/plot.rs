//! Self-contained SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
/// Log axes never span more than this many decades below the maximum.
const MAX_DECADES: f64 = 8.0;
const COLORS: [&str; 4] = ["#000000", "#c0392b", "#2471a3", "#1e8449"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `y` values that are not finite break the line.
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlotError {
    Empty,
}

impl std::fmt::Display for PlotError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlotError::Empty => f.write_str("nothing to plot: no finite data points"),
        }
    }
}

impl std::error::Error for PlotError {}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    log_y: bool,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let v = if self.log_y {
            y.max(10f64.powf(self.y.0)).log10()
        } else {
            y
        };
        HEIGHT - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// 1, 2 or 5 times a power of ten, giving about `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let factor = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn linear_ticks(lo: f64, hi: f64) -> (f64, Vec<f64>) {
    let step = nice_step(hi - lo, 6.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (step, (first..=last).map(|k| k as f64 * step).collect())
}

/// Keeps the first, lowest, highest and last point of each pixel column so
/// narrow peaks survive the reduction.
fn decimate(points: &[(f64, f64)], frame: &Frame) -> Vec<(f64, f64)> {
    let columns = (WIDTH - LEFT - RIGHT) as usize;
    if points.len() <= 4 * columns {
        return points.to_vec();
    }
    let mut out = Vec::with_capacity(4 * columns + 2);
    let column = |x: f64| frame.px(x).floor() as i64;
    let mut start = 0;
    while start < points.len() {
        let c = column(points[start].0);
        let mut end = start;
        while end + 1 < points.len() && column(points[end + 1].0) == c {
            end += 1;
        }
        let bucket = &points[start..=end];
        if bucket.iter().any(|p| !p.1.is_finite()) {
            // keep breaks intact
            out.extend_from_slice(bucket);
        } else {
            let mut idx = vec![0, bucket.len() - 1];
            let (mut lo, mut hi) = (0, 0);
            for (i, p) in bucket.iter().enumerate() {
                if p.1 < bucket[lo].1 {
                    lo = i;
                }
                if p.1 > bucket[hi].1 {
                    hi = i;
                }
            }
            idx.extend([lo, hi]);
            idx.sort_unstable();
            idx.dedup();
            out.extend(idx.into_iter().map(|i| bucket[i]));
        }
        start = end + 1;
    }
    out
}

pub fn render_svg(plot: &Plot) -> Result<String, PlotError> {
    let finite: Vec<(f64, f64)> = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    if finite.is_empty() {
        return Err(PlotError::Empty);
    }
    let (mut x0, mut x1) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.0), b.max(p.0))
        });
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let y_max = finite.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let y_min = finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y = if plot.log_y {
        let top = if y_max > 0.0 { y_max } else { 1.0 };
        let smallest = finite
            .iter()
            .map(|p| p.1)
            .filter(|&v| v > 0.0)
            .fold(top, f64::min);
        let hi = top.log10().ceil();
        let lo = smallest.log10().floor().max(hi - MAX_DECADES);
        (lo, if hi > lo { hi } else { lo + 1.0 })
    } else {
        let lo = y_min.min(0.0);
        let hi = if y_max > lo { y_max * 1.05 } else { lo + 1.0 };
        (lo, hi)
    };
    let frame = Frame {
        x: (x0, x1),
        y,
        log_y: plot.log_y,
    };

    let mut svg = String::new();
    let w = |svg: &mut String, s: String| svg.push_str(&s);
    w(
        &mut svg,
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ),
    );
    w(
        &mut svg,
        format!("<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"),
    );
    w(
        &mut svg,
        format!(
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            WIDTH / 2.0,
            escape(&plot.title)
        ),
    );

    // axes and ticks
    let (left, right, top, bottom) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    w(
        &mut svg,
        format!(
            "<rect x=\"{left}\" y=\"{top}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#000000\"/>\n",
            right - left,
            bottom - top
        ),
    );
    let (x_step, x_ticks) = linear_ticks(x0, x1);
    for t in x_ticks {
        let px = frame.px(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{px:.2}\" y1=\"{bottom}\" x2=\"{px:.2}\" y2=\"{:.1}\" stroke=\"#000000\"/><text x=\"{px:.2}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            bottom + 5.0,
            bottom + 18.0,
            tick_label(t, x_step)
        );
    }
    let y_ticks: Vec<(f64, String)> = if plot.log_y {
        let (lo, hi) = (frame.y.0 as i64, frame.y.1 as i64);
        (lo..=hi)
            .map(|k| (10f64.powi(k as i32), format!("1e{k}")))
            .collect()
    } else {
        let (step, ticks) = linear_ticks(frame.y.0, frame.y.1);
        ticks
            .into_iter()
            .map(|t| (t, tick_label(t, step)))
            .collect()
    };
    for (t, label) in y_ticks {
        let py = frame.py(t);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{py:.2}\" x2=\"{left}\" y2=\"{py:.2}\" stroke=\"#000000\"/><text x=\"{:.1}\" y=\"{:.2}\" text-anchor=\"end\">{label}</text>",
            left - 5.0,
            left - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
        (left + right) / 2.0,
        HEIGHT - 18.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.1})\">{}</text>",
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(&plot.y_label)
    );

    // data
    for (i, series) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (x, y) in decimate(&series.points, &frame) {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            let _ = write!(d, "{cmd}{:.2} {:.2} ", frame.px(x), frame.py(y));
            pen_down = true;
        }
        if d.is_empty() {
            continue;
        }
        let dash = if series.dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"{dash}/>",
            d.trim_end()
        );
        let ly = top + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\"{dash}/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            right - 40.0,
            right - 10.0,
            right - 46.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(points: Vec<(f64, f64)>, log_y: bool) -> Plot {
        Plot {
            title: "S <test>".into(),
            x_label: "signal wavelength (nm)".into(),
            y_label: "S".into(),
            log_y,
            series: vec![Series {
                label: "S".into(),
                points,
                dashed: false,
            }],
        }
    }

    #[test]
    fn empty_series_is_an_error() {
        assert_eq!(render_svg(&plot(vec![], false)), Err(PlotError::Empty));
        let gaps = vec![(1.0, f64::NAN), (2.0, f64::INFINITY)];
        assert_eq!(render_svg(&plot(gaps, true)), Err(PlotError::Empty));
    }

    #[test]
    fn output_is_deterministic_and_escaped() {
        let pts: Vec<(f64, f64)> = (0..500)
            .map(|i| (i as f64, (i as f64 * 0.1).sin().abs()))
            .collect();
        let a = render_svg(&plot(pts.clone(), true)).unwrap();
        let b = render_svg(&plot(pts, true)).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("S &lt;test&gt;"));
        assert!(a.contains("signal wavelength (nm)"));
        assert!(a.contains("1e0"));
    }

    #[test]
    fn decimation_keeps_a_lone_spike() {
        let mut pts: Vec<(f64, f64)> = (0..200_000).map(|i| (i as f64, 0.0)).collect();
        pts[123_457].1 = 1.0;
        let frame = Frame {
            x: (0.0, 199_999.0),
            y: (0.0, 1.0),
            log_y: false,
        };
        let kept = decimate(&pts, &frame);
        assert!(kept.len() < 5_000);
        assert!(kept.contains(&(123_457.0, 1.0)));
    }

    #[test]
    fn non_finite_values_break_the_line() {
        let svg = render_svg(&plot(
            vec![
                (0.0, 1.0),
                (1.0, 2.0),
                (2.0, f64::NAN),
                (3.0, 1.0),
                (4.0, 2.0),
            ],
            false,
        ))
        .unwrap();
        let path = svg.lines().find(|l| l.starts_with("<path")).unwrap();
        assert_eq!(path.matches('M').count(), 2);
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(10.0, 5.0), 2.0);
        assert_eq!(nice_step(0.7, 6.0), 0.1);
        assert_eq!(nice_step(60.0, 6.0), 10.0);
    }
}
