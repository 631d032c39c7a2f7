//! Chain diagnostics for a recorded statistic series: histogram, path and
//! correlogram, with CSV and standalone SVG output.

use std::fmt::Write as _;
use std::io::{self, Write};

use super::special::chi_square_cdf;
use crate::{Error, Result};

/// One histogram bin `[left, right)`; the last bin is closed on the right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bin {
    pub left: f64,
    pub right: f64,
    pub count: u64,
}

/// Bins whose counts add up to the series length.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub bins: Vec<Bin>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Freedman–Diaconis bin count `range / (2 IQR n^{-1/3})`, clamped to
/// `1..=200`; Sturges' rule when the interquartile range is zero.
pub fn freedman_diaconis_bins(series: &[f64]) -> usize {
    let mut sorted: Vec<f64> = series.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.len() < 2 {
        return 1;
    }
    sorted.sort_by(f64::total_cmp);
    let range = sorted[sorted.len() - 1] - sorted[0];
    if range <= 0.0 {
        return 1;
    }
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let n = sorted.len() as f64;
    let bins = if iqr > 0.0 {
        (range / (2.0 * iqr * n.powf(-1.0 / 3.0))).ceil()
    } else {
        n.log2().ceil() + 1.0
    };
    (bins as usize).clamp(1, 200)
}

/// Histogram of the finite values of `series` over their range, with
/// `bins` equal-width bins or the Freedman–Diaconis count.
///
/// Infinite values (statistics of tables off the fitted support) have no
/// place on the axis and are an error.
pub fn histogram(series: &[f64], bins: Option<usize>) -> Result<Histogram> {
    if series.is_empty() {
        return Err(Error::invalid("histogram of an empty series"));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("histogram of a series with non-finite values"));
    }
    let k = match bins {
        Some(0) => return Err(Error::invalid("bin count must be at least 1")),
        Some(k) => k,
        None => freedman_diaconis_bins(series),
    };
    let lo = series.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let width = (hi - lo) / k as f64;
    let mut counts = vec![0u64; k];
    for &v in series {
        let i = (((v - lo) / width) as usize).min(k - 1);
        counts[i] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| Bin {
            left: lo + width * i as f64,
            right: if i + 1 == k { hi } else { lo + width * (i + 1) as f64 },
            count,
        })
        .collect();
    Ok(Histogram { bins })
}

/// Autocorrelations `rho(0..=max_lag)` with the biased normalization
/// `c(l) = (1/n) Σ (x_t - x̄)(x_{t+l} - x̄)`, `rho(l) = c(l) / c(0)`.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n <= max_lag {
        return Err(Error::invalid(format!(
            "series of length {n} is too short for lag {max_lag}"
        )));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum::<f64>() / n as f64;
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::ConstantSeries);
    }
    Ok((0..=max_lag)
        .map(|l| {
            let c: f64 = dev.iter().zip(&dev[l..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            c / c0
        })
        .collect())
}

/// At most `max_points` evenly spaced `(step, value)` pairs, steps 1-based.
pub fn path_subsample(series: &[f64], max_points: usize) -> Vec<(usize, f64)> {
    let n = series.len();
    if n == 0 || max_points == 0 {
        return Vec::new();
    }
    let stride = n.div_ceil(max_points);
    (0..n).step_by(stride).map(|i| (i + 1, series[i])).collect()
}

/// Histogram, correlogram and path of one statistic series.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub histogram: Histogram,
    /// `None` when the series is constant and the correlogram is undefined.
    pub autocorrelation: Option<Vec<f64>>,
    pub path: Vec<(usize, f64)>,
}

impl Diagnostics {
    pub fn compute(series: &[f64], bins: Option<usize>, max_lag: usize, path_points: usize) -> Result<Self> {
        let lag = max_lag.min(series.len().saturating_sub(1));
        let autocorrelation = match autocorrelation(series, lag) {
            Ok(rho) => Some(rho),
            Err(Error::ConstantSeries) => None,
            Err(e) => return Err(e),
        };
        Ok(Diagnostics {
            histogram: histogram(series, bins)?,
            autocorrelation,
            path: path_subsample(series, path_points),
        })
    }
}

pub fn write_histogram_csv(h: &Histogram, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "bin_left,bin_right,count")?;
    for b in &h.bins {
        writeln!(out, "{},{},{}", b.left, b.right, b.count)?;
    }
    Ok(())
}

pub fn write_correlogram_csv(rho: &[f64], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "lag,rho")?;
    for (l, r) in rho.iter().enumerate() {
        writeln!(out, "{l},{r}")?;
    }
    Ok(())
}

pub fn write_path_csv(path: &[(usize, f64)], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "step,value")?;
    for (s, v) in path {
        writeln!(out, "{s},{v}")?;
    }
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let (x1, y1) = (
            if x1 > x0 { x1 } else { x0 + 1.0 },
            if y1 > y0 { y1 } else { y0 + 1.0 },
        );
        Frame { x0, x1, y0, y1 }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_open(title: &str, f: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="25" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (bx, by) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{bx} {MARGIN} L{bx} {by} L{} {by}" stroke="black" fill="none"/>"#,
        WIDTH - MARGIN
    );
    for (v, anchor, x, y) in [
        (f.x0, "start", bx, by + 18.0),
        (f.x1, "end", WIDTH - MARGIN, by + 18.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            tick(v)
        );
    }
    for (v, y) in [(f.y0, by), (f.y1, MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            bx - 4.0,
            tick(v)
        );
    }
    s
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Density-scaled histogram with the chi-square law overlaid, each overlay
/// point being the probability of a thin slice divided by its width.
pub fn histogram_svg(h: &Histogram, df: Option<usize>, title: &str) -> String {
    let n = h.total().max(1) as f64;
    let x0 = h.bins.first().map_or(0.0, |b| b.left).min(0.0);
    let data_hi = h.bins.last().map_or(1.0, |b| b.right);
    let x1 = match df {
        Some(df) => data_hi.max(df as f64 + 4.0 * (2.0 * df as f64).sqrt()),
        None => data_hi,
    };
    let densities: Vec<f64> = h
        .bins
        .iter()
        .map(|b| b.count as f64 / n / (b.right - b.left).max(f64::MIN_POSITIVE))
        .collect();
    let curve: Vec<(f64, f64)> = match df {
        Some(df) => {
            let steps = 200;
            let dx = (x1 - x0.max(0.0)) / steps as f64;
            (0..steps)
                .map(|i| {
                    let a = x0.max(0.0) + dx * i as f64;
                    let b = a + dx;
                    ((a + b) / 2.0, (chi_square_cdf(b, df) - chi_square_cdf(a, df)) / dx)
                })
                .collect()
        }
        None => Vec::new(),
    };
    let top = densities
        .iter()
        .chain(curve.iter().map(|(_, d)| d))
        .copied()
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    let f = Frame::new(x0, x1, 0.0, top * 1.05);
    let mut s = svg_open(title, &f);
    for (b, d) in h.bins.iter().zip(&densities) {
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#9ab" stroke="#567"/>"##,
            px(f.x(b.left)),
            px(f.y(*d)),
            px(f.x(b.right) - f.x(b.left)),
            px(f.y(0.0) - f.y(*d))
        );
    }
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .map(|&(x, d)| format!("{},{}", px(f.x(x)), px(f.y(d))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Line plot of the statistic against the step number.
pub fn path_svg(path: &[(usize, f64)], title: &str) -> String {
    let finite = path.iter().map(|p| p.1).filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi) } else { (0.0, 1.0) };
    let x1 = path.last().map_or(1, |p| p.0) as f64;
    let f = Frame::new(0.0, x1, lo, hi);
    let mut s = svg_open(title, &f);
    let pts: Vec<String> = path
        .iter()
        .filter(|p| p.1.is_finite())
        .map(|&(step, v)| format!("{},{}", px(f.x(step as f64)), px(f.y(v))))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#345" stroke-width="0.8"/>"##,
        pts.join(" ")
    );
    s.push_str("</svg>\n");
    s
}

/// Bar plot of `rho(l)` against the lag.
pub fn correlogram_svg(rho: &[f64], title: &str) -> String {
    let lo = rho.iter().copied().fold(0.0, f64::min);
    let f = Frame::new(0.0, rho.len().max(1) as f64, lo, 1.0);
    let mut s = svg_open(title, &f);
    for (l, &r) in rho.iter().enumerate() {
        let x = f.x(l as f64 + 0.5);
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#345" stroke-width="2"/>"##,
            px(x),
            px(f.y(0.0)),
            px(f.y(r))
        );
    }
    s.push_str("</svg>\n");
    s
}
