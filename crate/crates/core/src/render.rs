//! Standalone SVG figures: a Gantt chart of a schedule and the weight
//! profile (weight over processing time of the executing job).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule};
use crate::numeric::to_f64;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f"];

fn color(instance: &Instance, job: usize) -> &'static str {
    if instance.tags.long_jobs.iter().any(|j| j.0 == job) {
        "#333333"
    } else {
        PALETTE[job % PALETTE.len()]
    }
}

fn header(height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{height}\" viewBox=\"0 0 {w} {height}\">\n",
        w = WIDTH + 2.0 * MARGIN
    )
}

fn checked(schedule: &Schedule, instance: &Instance) -> Result<(f64, f64)> {
    if schedule.slices.is_empty() {
        return Err(Error::EmptySchedule);
    }
    schedule.validate(instance)?;
    let t0 = to_f64(&schedule.slices.iter().map(|s| &s.start).min().expect("non-empty").clone());
    let t1 = to_f64(schedule.makespan().expect("non-empty"));
    Ok((t0, t1))
}

fn axis(svg: &mut String, t0: f64, t1: f64, y: f64) {
    let _ = writeln!(svg, "<line class=\"axis\" x1=\"{MARGIN}\" y1=\"{y:.3}\" x2=\"{:.3}\" y2=\"{y:.3}\" stroke=\"black\"/>", MARGIN + WIDTH);
    for (x, t) in [(MARGIN, t0), (MARGIN + WIDTH, t1)] {
        let _ = writeln!(svg, "<text x=\"{x:.3}\" y=\"{:.3}\" font-size=\"10\" text-anchor=\"middle\">{t:.3}</text>", y + 12.0);
    }
}

/// One bar per slice on a single machine row.
pub fn render_gantt(schedule: &Schedule, instance: &Instance) -> Result<String> {
    let (t0, t1) = checked(schedule, instance)?;
    let scale = WIDTH / (t1 - t0).max(f64::MIN_POSITIVE);
    let mut svg = header(100.0);
    for s in &schedule.slices {
        let x = MARGIN + (to_f64(&s.start) - t0) * scale;
        let w = (to_f64(&s.end) - to_f64(&s.start)) * scale;
        let _ = writeln!(
            svg,
            "<rect class=\"slice\" x=\"{x:.3}\" y=\"20\" width=\"{w:.3}\" height=\"40\" fill=\"{}\" stroke=\"white\" stroke-width=\"0.2\"><title>{}</title></rect>",
            color(instance, s.job.0),
            s.job
        );
    }
    axis(&mut svg, t0, t1, 70.0);
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// One horizontal segment per slice at the executing job's weight over
/// processing time.
pub fn render_profile(schedule: &Schedule, instance: &Instance) -> Result<String> {
    let (t0, t1) = checked(schedule, instance)?;
    let scale = WIDTH / (t1 - t0).max(f64::MIN_POSITIVE);
    let density = |j: usize| to_f64(&instance.jobs()[j].density());
    let top = schedule.slices.iter().map(|s| density(s.job.0)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (plot_top, plot_bottom) = (20.0, 220.0);
    let mut svg = header(250.0);
    for s in &schedule.slices {
        let y = plot_bottom - density(s.job.0) / top * (plot_bottom - plot_top);
        let x1 = MARGIN + (to_f64(&s.start) - t0) * scale;
        let x2 = MARGIN + (to_f64(&s.end) - t0) * scale;
        let _ = writeln!(
            svg,
            "<line class=\"profile\" x1=\"{x1:.3}\" y1=\"{y:.3}\" x2=\"{x2:.3}\" y2=\"{y:.3}\" stroke=\"{}\" stroke-width=\"2\"/>",
            color(instance, s.job.0)
        );
    }
    let _ = writeln!(svg, "<text x=\"4\" y=\"{plot_top}\" font-size=\"10\">{top:.3}</text>");
    axis(&mut svg, t0, t1, plot_bottom + 10.0);
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg(svg: &str, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, svg)?;
    Ok(())
}
