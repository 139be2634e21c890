use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use plotters::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean, sample_std};
use super::{MetricSeries, SweepRow};
use crate::error::{Error, Result};

pub const SERIES_HEADER: &str = "episode,return,violations,asr_smoothed";
pub const SWEEP_HEADER: &str = "axis_value,mean_final_asr,std_final_asr,seeds";

const FONT: &str = "sans-serif";
const PALETTE: [RGBColor; 9] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
    RGBColor(188, 189, 34),
];

#[derive(Serialize, Deserialize)]
struct SeriesRow {
    episode: usize,
    #[serde(rename = "return")]
    ret: f64,
    violations: u32,
    asr_smoothed: f64,
}

/// Writes one row per episode. Floats use the shortest round-trip form, so
/// reading the file back reproduces the series exactly.
pub fn write_series_csv(path: impl AsRef<Path>, series: &MetricSeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for (i, ((&ret, &violations), &asr)) in series
        .returns
        .iter()
        .zip(&series.violations)
        .zip(&series.asr_smoothed)
        .enumerate()
    {
        w.serialize(SeriesRow {
            episode: i + 1,
            ret,
            violations,
            asr_smoothed: asr,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `<label>_seed<n>.csv` file; label and seed come from the name.
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<MetricSeries> {
    let path = path.as_ref();
    let (label, seed) = parse_series_name(path)
        .ok_or_else(|| Error::Render(format!("{} is not named <label>_seed<n>.csv", path.display())))?;
    let mut r = csv::Reader::from_path(path)?;
    check_header(r.headers()?, SERIES_HEADER, path)?;
    let mut series = MetricSeries {
        label,
        seed,
        returns: Vec::new(),
        violations: Vec::new(),
        asr_smoothed: Vec::new(),
    };
    for row in r.deserialize() {
        let row: SeriesRow = row?;
        if row.episode != series.returns.len() + 1 {
            return Err(Error::Render(format!(
                "{}: expected episode {}, found {}",
                path.display(),
                series.returns.len() + 1,
                row.episode
            )));
        }
        series.returns.push(row.ret);
        series.violations.push(row.violations);
        series.asr_smoothed.push(row.asr_smoothed);
    }
    Ok(series)
}

/// Every series CSV in `dir`, sorted by label then seed.
pub fn read_series_dir(dir: impl AsRef<Path>) -> Result<Vec<MetricSeries>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir.as_ref())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| parse_series_name(p).is_some())
        .collect();
    paths.sort();
    let mut all = paths.iter().map(read_series_csv).collect::<Result<Vec<_>>>()?;
    all.sort_by(|a, b| a.label.cmp(&b.label).then(a.seed.cmp(&b.seed)));
    Ok(all)
}

pub fn write_sweep_csv(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    check_header(r.headers()?, SWEEP_HEADER, path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn parse_series_name(path: &Path) -> Option<(String, u64)> {
    if path.extension()? != "csv" {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    let (label, seed) = stem.rsplit_once("_seed")?;
    if label.is_empty() {
        return None;
    }
    Some((label.to_string(), seed.parse().ok()?))
}

fn check_header(found: &csv::StringRecord, expected: &str, path: &Path) -> Result<()> {
    let found = found.iter().collect::<Vec<_>>().join(",");
    if found != expected {
        return Err(Error::Render(format!(
            "{}: header `{found}` does not match `{expected}`",
            path.display()
        )));
    }
    Ok(())
}

fn ensure_font() -> Result<()> {
    static REGISTERED: OnceLock<bool> = OnceLock::new();
    let ok = *REGISTERED.get_or_init(|| {
        plotters::style::register_font(
            FONT,
            FontStyle::Normal,
            include_bytes!("../../assets/DejaVuSans.ttf"),
        )
        .is_ok()
    });
    if ok {
        Ok(())
    } else {
        Err(Error::Render("embedded font failed to load".into()))
    }
}

fn render_err<E: std::fmt::Debug>(e: E) -> Error {
    Error::Render(format!("{e:?}"))
}

/// Per-label mean and std of the smoothed curve, episode by episode.
/// Seeds shorter than the longest run simply stop contributing.
fn band(group: &[&MetricSeries]) -> Vec<(f64, f64)> {
    let len = group.iter().map(|s| s.asr_smoothed.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let xs: Vec<f64> = group.iter().filter_map(|s| s.asr_smoothed.get(i).copied()).collect();
            (mean(&xs), sample_std(&xs))
        })
        .collect()
}

/// Smoothed ASR against episode, one line per label with a shaded
/// mean ± std band across seeds.
pub fn render_chart(series: &[MetricSeries], path: impl AsRef<Path>, title: &str) -> Result<()> {
    ensure_font()?;
    if series.is_empty() {
        return Err(Error::Render("nothing to plot".into()));
    }
    let mut groups: BTreeMap<&str, Vec<&MetricSeries>> = BTreeMap::new();
    for s in series {
        groups.entry(&s.label).or_default().push(s);
    }
    let bands: Vec<(&str, Vec<(f64, f64)>)> = groups.iter().map(|(l, g)| (*l, band(g))).collect();

    let episodes = bands.iter().map(|(_, b)| b.len()).max().unwrap_or(1).max(2);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, b) in &bands {
        for &(m, s) in b {
            lo = lo.min(m - s);
            hi = hi.max(m + s);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Render("series contain non-finite values".into()));
    }
    let pad = ((hi - lo) * 0.05).max(1e-6);

    let root = BitMapBackend::new(path.as_ref(), (1024, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(render_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, (FONT, 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(1f64..episodes as f64, (lo - pad)..(hi + pad))
        .map_err(render_err)?;
    chart
        .configure_mesh()
        .x_desc("episode")
        .y_desc("smoothed return")
        .label_style((FONT, 14))
        .draw()
        .map_err(render_err)?;

    for (k, (label, b)) in bands.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let upper = b.iter().enumerate().map(|(i, &(m, s))| ((i + 1) as f64, m + s));
        let lower = b.iter().enumerate().rev().map(|(i, &(m, s))| ((i + 1) as f64, m - s));
        chart
            .draw_series(std::iter::once(Polygon::new(
                upper.chain(lower).collect::<Vec<_>>(),
                color.mix(0.18).filled(),
            )))
            .map_err(render_err)?;
        chart
            .draw_series(LineSeries::new(
                b.iter().enumerate().map(|(i, &(m, _))| ((i + 1) as f64, m)),
                color.stroke_width(2),
            ))
            .map_err(render_err)?
            .label(*label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .label_font((FONT, 14))
        .position(SeriesLabelPosition::LowerRight)
        .draw()
        .map_err(render_err)?;
    root.present().map_err(render_err)?;
    Ok(())
}

/// Final ASR against the swept value with ± std error bars.
pub fn render_sweep_chart(rows: &[SweepRow], axis: &str, path: impl AsRef<Path>, title: &str) -> Result<()> {
    ensure_font()?;
    if rows.is_empty() {
        return Err(Error::Render("nothing to plot".into()));
    }
    let xs = rows.iter().map(|r| r.axis_value);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let xpad = ((x1 - x0) * 0.1).max(0.5);
    let lo = rows.iter().map(|r| r.mean_final_asr - r.std_final_asr).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.mean_final_asr + r.std_final_asr).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Render("sweep contains non-finite values".into()));
    }
    let ypad = ((hi - lo) * 0.1).max(1e-3);

    let root = BitMapBackend::new(path.as_ref(), (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(render_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, (FONT, 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d((x0 - xpad)..(x1 + xpad), (lo - ypad)..(hi + ypad))
        .map_err(render_err)?;
    chart
        .configure_mesh()
        .x_desc(axis)
        .y_desc("final ASR")
        .label_style((FONT, 14))
        .draw()
        .map_err(render_err)?;
    let color = PALETTE[0];
    chart
        .draw_series(LineSeries::new(
            rows.iter().map(|r| (r.axis_value, r.mean_final_asr)),
            color.stroke_width(2),
        ))
        .map_err(render_err)?;
    chart
        .draw_series(rows.iter().map(|r| {
            ErrorBar::new_vertical(
                r.axis_value,
                r.mean_final_asr - r.std_final_asr,
                r.mean_final_asr,
                r.mean_final_asr + r.std_final_asr,
                color.filled(),
                8,
            )
        }))
        .map_err(render_err)?;
    root.present().map_err(render_err)?;
    Ok(())
}

/// Renders every series CSV in `dir` into one chart at `out`.
pub fn render_dir(dir: impl AsRef<Path>, out: impl AsRef<Path>, title: &str) -> Result<()> {
    let series = read_series_dir(dir.as_ref())?;
    if series.is_empty() {
        return Err(Error::Render(format!("no <label>_seed<n>.csv files in {}", dir.as_ref().display())));
    }
    render_chart(&series, out, title)
}
