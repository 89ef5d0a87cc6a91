//! Static SVG output for trajectories: barycentric simplex projection for
//! three-species conservative systems, or per-species time series.

const WIDTH: f64 = 600.0;
const HEIGHT: f64 = 600.0;
const MAX_PATH_POINTS: usize = 2000;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

pub struct TrajectoryData {
    pub species: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Parses the trajectory CSV written by the simulate command.
pub fn parse_csv(text: &str) -> Result<TrajectoryData, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("empty CSV")?;
    let mut cols = header.split(',');
    if cols.next() != Some("t") {
        return Err("CSV header must start with `t`".into());
    }
    let species: Vec<String> = cols.map(|s| s.trim().to_string()).collect();
    if species.is_empty() {
        return Err("CSV header lists no species".into());
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != species.len() + 1 {
            return Err(format!("row {} has {} fields, expected {}", i + 2, fields.len(), species.len() + 1));
        }
        let parse = |s: &str| -> Result<f64, String> {
            s.trim().parse().map_err(|_| format!("bad number `{s}` in row {}", i + 2))
        };
        times.push(parse(fields[0])?);
        states.push(fields[1..].iter().map(|f| parse(f)).collect::<Result<Vec<_>, _>>()?);
    }
    if times.is_empty() {
        return Err("CSV contains no data rows".into());
    }
    Ok(TrajectoryData {
        species,
        times,
        states,
    })
}

fn thin<T: Clone>(items: &[T]) -> Vec<T> {
    if items.len() <= MAX_PATH_POINTS {
        return items.to_vec();
    }
    let step = items.len().div_ceil(MAX_PATH_POINTS);
    let mut out: Vec<T> = items.iter().step_by(step).cloned().collect();
    if let Some(last) = items.last() {
        out.push(last.clone());
    }
    out
}

fn svg_open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    )
}

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n",
        coords.join(" ")
    )
}

/// Barycentric projection onto a triangle; requires exactly three species.
pub fn simplex_svg(data: &TrajectoryData) -> Result<String, String> {
    if data.species.len() != 3 {
        return Err(format!(
            "simplex projection requires exactly 3 species, got {}",
            data.species.len()
        ));
    }
    let corners = [(300.0, 60.0), (60.0, 510.0), (540.0, 510.0)];
    let project = |state: &[f64]| -> (f64, f64) {
        let total: f64 = state.iter().sum::<f64>().max(1e-300);
        let mut x = 0.0;
        let mut y = 0.0;
        for (v, (cx, cy)) in state.iter().zip(&corners) {
            x += v / total * cx;
            y += v / total * cy;
        }
        (x, y)
    };

    let mut svg = svg_open();
    svg.push_str(&format!(
        "<polygon points=\"{},{} {},{} {},{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        corners[0].0, corners[0].1, corners[1].0, corners[1].1, corners[2].0, corners[2].1
    ));
    let labels = [(300.0, 45.0), (40.0, 535.0), (560.0, 535.0)];
    for (name, (lx, ly)) in data.species.iter().zip(&labels) {
        svg.push_str(&format!(
            "<text x=\"{lx}\" y=\"{ly}\" font-size=\"16\" text-anchor=\"middle\">{name}</text>\n"
        ));
    }
    let points: Vec<(f64, f64)> = thin(&data.states).iter().map(|s| project(s)).collect();
    svg.push_str(&polyline(&points, COLORS[0]));
    // Mark the initial condition.
    if let Some((x, y)) = points.first() {
        svg.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{}\"/>\n",
            COLORS[1]
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Concentration of each species against time.
pub fn time_series_svg(data: &TrajectoryData) -> Result<String, String> {
    let margin = 60.0;
    let plot_w = WIDTH - 2.0 * margin;
    let plot_h = HEIGHT - 2.0 * margin;
    let t0 = *data.times.first().unwrap();
    let t1 = *data.times.last().unwrap();
    let t_span = (t1 - t0).max(1e-300);
    let y_max = data
        .states
        .iter()
        .flatten()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(1e-300);

    let to_xy = |t: f64, v: f64| -> (f64, f64) {
        (
            margin + (t - t0) / t_span * plot_w,
            HEIGHT - margin - (v / y_max) * plot_h,
        )
    };

    let mut svg = svg_open();
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{margin}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - margin,
        WIDTH - margin,
        HEIGHT - margin
    ));
    svg.push_str(&format!(
        "<line x1=\"{margin}\" y1=\"{margin}\" x2=\"{margin}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - margin
    ));
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let t = t0 + frac * t_span;
        let (x, _) = to_xy(t, 0.0);
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{t:.4}</text>\n",
            HEIGHT - margin + 18.0
        ));
        let v = frac * y_max;
        let (_, y) = to_xy(t0, v);
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{y:.1}\" font-size=\"11\" text-anchor=\"end\">{v:.4}</text>\n",
            margin - 8.0
        ));
    }

    let times = thin(&data.times);
    let states = thin(&data.states);
    for (i, name) in data.species.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(&states)
            .map(|(&t, s)| to_xy(t, s[i]))
            .collect();
        svg.push_str(&polyline(&pts, color));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"{color}\">{name}</text>\n",
            WIDTH - margin + 6.0,
            margin + 16.0 * i as f64
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
