//! Dependency-free SVG 1.1 rendering for benchmark reports: grouped bar
//! charts of aggregate metrics and stacked score-trace panels with drift
//! segments shaded.

const PALETTE: [&str; 6] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2",
];
/// Traces longer than this are peak-preserving downsampled per panel.
const MAX_TRACE_POINTS: usize = 2000;

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>\n"
    )
}

fn text(x: f64, y: f64, size: f64, anchor: &str, content: &str, extra: &str) -> String {
    format!(
        "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size:.0}\" \
         font-family=\"sans-serif\" text-anchor=\"{anchor}\"{extra}>{}</text>\n",
        xml_escape(content)
    )
}

/// One labelled cluster of bars, e.g. a detector with its metric values.
#[derive(Debug, Clone, PartialEq)]
pub struct BarGroup {
    pub label: String,
    /// (series name, value) pairs; series must repeat across groups.
    pub values: Vec<(String, f64)>,
}

/// Render a grouped bar chart.  The y-axis spans [0, max(1, data max)].
pub fn render_bar_chart(title: &str, groups: &[BarGroup]) -> String {
    let (left, right, top, bottom) = (54.0, 20.0, 46.0, 120.0);
    let plot_w = (groups.len().max(1) as f64 * 96.0).max(420.0);
    let plot_h = 260.0;
    let width = left + plot_w + right;
    let height = top + plot_h + bottom;
    let mut svg = svg_open(width, height);
    svg.push_str(&text(width / 2.0, 22.0, 14.0, "middle", title, ""));

    let data_max = groups
        .iter()
        .flat_map(|g| g.values.iter().map(|(_, v)| *v))
        .fold(0.0f64, f64::max);
    let y_max = data_max.max(1.0);
    let y_of = |v: f64| top + plot_h - (v.max(0.0) / y_max) * plot_h;

    // Axes and horizontal gridlines with tick labels.
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let y = y_of(frac * y_max);
        svg.push_str(&format!(
            "<line x1=\"{left:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            left + plot_w
        ));
        svg.push_str(&text(
            left - 6.0,
            y + 4.0,
            10.0,
            "end",
            &format!("{:.2}", frac * y_max),
            "",
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{left:.2}\" y1=\"{top:.2}\" x2=\"{left:.2}\" y2=\"{:.2}\" \
         stroke=\"black\" stroke-width=\"1\"/>\n\
         <line x1=\"{left:.2}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" \
         stroke=\"black\" stroke-width=\"1\"/>\n",
        top + plot_h,
        left + plot_w,
    ));

    // Legend from the first group's series names.
    if let Some(first) = groups.first() {
        let mut x = left;
        for (s, (name, _)) in first.values.iter().enumerate() {
            let color = PALETTE[s % PALETTE.len()];
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"30\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n"
            ));
            svg.push_str(&text(x + 14.0, 39.0, 10.0, "start", name, ""));
            x += 14.0 + 7.0 * name.len() as f64 + 18.0;
        }
    }

    let group_w = plot_w / groups.len().max(1) as f64;
    for (g, group) in groups.iter().enumerate() {
        let series = group.values.len().max(1) as f64;
        let bar_w = group_w * 0.72 / series;
        let x0 = left + g as f64 * group_w + group_w * 0.14;
        for (s, (_, value)) in group.values.iter().enumerate() {
            let x = x0 + s as f64 * bar_w;
            let y = y_of(*value);
            let h = top + plot_h - y;
            let color = PALETTE[s % PALETTE.len()];
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{h:.2}\" \
                 fill=\"{color}\"/>\n",
                bar_w.max(1.0)
            ));
        }
        let lx = left + g as f64 * group_w + group_w / 2.0;
        let ly = top + plot_h + 14.0;
        svg.push_str(&text(
            lx,
            ly,
            10.0,
            "end",
            &group.label,
            &format!(" transform=\"rotate(-35 {lx:.2} {ly:.2})\""),
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// One score series to draw as a horizontal band.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePanel {
    pub label: String,
    pub scores: Vec<f64>,
}

/// Peak-preserving downsample: keep the maximum of each stride so short
/// spikes survive plotting.
fn downsample(scores: &[f64]) -> Vec<(usize, f64)> {
    if scores.len() <= MAX_TRACE_POINTS {
        return scores.iter().cloned().enumerate().collect();
    }
    let stride = scores.len().div_ceil(MAX_TRACE_POINTS);
    scores
        .chunks(stride)
        .enumerate()
        .map(|(c, chunk)| {
            let (offset, value) = chunk
                .iter()
                .cloned()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| {
                    if v > acc.1 {
                        (i, v)
                    } else {
                        acc
                    }
                });
            (c * stride + offset, value)
        })
        .collect()
}

/// Render stacked score traces with ground-truth segments shaded behind
/// each band.  `segments` uses 1-based inclusive execution indices.
pub fn render_traces(title: &str, segments: &[(usize, usize)], panels: &[TracePanel]) -> String {
    let (left, right, top) = (60.0, 20.0, 46.0);
    let (band_h, gap) = (64.0, 22.0);
    let plot_w = 840.0;
    let width = left + plot_w + right;
    let executions = panels.iter().map(|p| p.scores.len()).max().unwrap_or(1);
    let height = top + panels.len() as f64 * (band_h + gap) + 36.0;
    let x_of = |t: usize| {
        // t is 0-based here; map [0, executions-1] onto the plot width.
        left + if executions > 1 {
            t as f64 / (executions - 1) as f64 * plot_w
        } else {
            0.0
        }
    };

    let mut svg = svg_open(width, height);
    svg.push_str(&text(width / 2.0, 22.0, 14.0, "middle", title, ""));

    for (p, panel) in panels.iter().enumerate() {
        let band_top = top + p as f64 * (band_h + gap);
        let band_bottom = band_top + band_h;
        for &(lo, hi) in segments {
            let x0 = x_of(lo.saturating_sub(1));
            let x1 = x_of(hi.saturating_sub(1));
            svg.push_str(&format!(
                "<rect x=\"{x0:.2}\" y=\"{band_top:.2}\" width=\"{:.2}\" \
                 height=\"{band_h:.2}\" fill=\"#f4c7c3\" fill-opacity=\"0.7\"/>\n",
                (x1 - x0).max(1.0)
            ));
        }
        let lo = panel.scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = panel.scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-12);
        let points: String = downsample(&panel.scores)
            .into_iter()
            .map(|(t, v)| {
                let y = band_bottom - (v - lo) / span * band_h;
                format!("{:.2},{:.2}", x_of(t), y)
            })
            .collect::<Vec<_>>()
            .join(" ");
        svg.push_str(&format!(
            "<polyline points=\"{points}\" fill=\"none\" stroke=\"{}\" \
             stroke-width=\"1\"/>\n",
            PALETTE[p % PALETTE.len()]
        ));
        svg.push_str(&format!(
            "<line x1=\"{left:.2}\" y1=\"{band_bottom:.2}\" x2=\"{:.2}\" \
             y2=\"{band_bottom:.2}\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
            left + plot_w
        ));
        svg.push_str(&text(
            left,
            band_top - 5.0,
            10.0,
            "start",
            &panel.label,
            "",
        ));
    }

    // Execution-index ticks under the last band.
    let axis_y = top + panels.len() as f64 * (band_h + gap) + 6.0;
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let t = ((executions.saturating_sub(1)) as f64 * frac) as usize;
        svg.push_str(&text(
            x_of(t),
            axis_y + 10.0,
            10.0,
            "middle",
            &format!("{}", t + 1),
            "",
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
