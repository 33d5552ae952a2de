use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvgError {
    #[error("figure has no data")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl Figure {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn with_series(mut self, label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        self.series.push(Series {
            label: label.into(),
            x,
            y,
        });
        self
    }
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-2..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Standalone SVG: one polyline per series, axes with ticks, and a legend.
/// The y axis tops out at 1.05× the largest plotted value; the root element
/// carries that value as `data-y-max`.
pub fn render_figure(fig: &Figure) -> Result<String, SvgError> {
    let keep = |y: f64| y.is_finite() && (!fig.log_y || y > 0.0);
    let pts: Vec<(f64, f64)> = fig
        .series
        .iter()
        .flat_map(|s| s.x.iter().zip(&s.y).map(|(&x, &y)| (x, y)))
        .filter(|&(x, y)| x.is_finite() && keep(y))
        .collect();
    if pts.is_empty() {
        return Err(SvgError::Empty);
    }
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
        (a.0.min(p.0), a.1.max(p.0))
    });
    if x1 == x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let ymax_data = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let ymin_data = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let y_top = if ymax_data > 0.0 {
        1.05 * ymax_data
    } else {
        1.0
    };
    let y_bottom = if fig.log_y {
        10f64.powf(ymin_data.log10().floor()).min(y_top / 10.0)
    } else {
        ymin_data.min(0.0)
    };
    let map_y = |y: f64| {
        let f = if fig.log_y {
            (y.log10() - y_bottom.log10()) / (y_top.log10() - y_bottom.log10())
        } else {
            (y - y_bottom) / (y_top - y_bottom)
        };
        TOP + (1.0 - f) * (H - TOP - BOTTOM)
    };
    let map_x = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" data-y-max="{y_top}" data-y-min="{y_bottom}" data-log-y="{}">"#,
        fig.log_y
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        escape(&fig.title)
    );
    let (px0, px1, py0, py1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(
        s,
        r#"<path class="axes" d="M{px0},{py0} L{px0},{py1} L{px1},{py1}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let xp = map_x(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{xp}" y1="{py1}" x2="{xp}" y2="{}" stroke="black"/><text x="{xp}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            py1 + 5.0,
            py1 + 18.0,
            tick_label(xv)
        );
        let yv = if fig.log_y {
            10f64.powf(y_bottom.log10() + (y_top.log10() - y_bottom.log10()) * k as f64 / 4.0)
        } else {
            y_bottom + (y_top - y_bottom) * k as f64 / 4.0
        };
        let yp = map_y(yv);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{yp}" x2="{px0}" y2="{yp}" stroke="black"/><text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            px0 - 5.0,
            px0 - 8.0,
            yp + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        (px0 + px1) / 2.0,
        H - 15.0,
        escape(&fig.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {0})">{1}</text>"#,
        (py0 + py1) / 2.0,
        escape(&fig.y_label)
    );
    for (i, series) in fig.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = series
            .x
            .iter()
            .zip(&series.y)
            .filter(|(x, y)| x.is_finite() && keep(**y))
            .map(|(&x, &y)| format!("{:.2},{:.2}", map_x(x), map_y(y)))
            .collect();
        if coords.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}" font-family="sans-serif" font-size="12">{4}</text></g>"#,
            W - RIGHT + 10.0,
            W - RIGHT + 30.0,
            W - RIGHT + 36.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_figure_rejected() {
        assert_eq!(
            render_figure(&Figure::new("t", "x", "y")),
            Err(SvgError::Empty)
        );
    }

    #[test]
    fn two_points_one_polyline() {
        let svg = render_figure(&Figure::new("t", "x", "y").with_series(
            "a",
            vec![0.0, 1.0],
            vec![1.0, 2.0],
        ))
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
