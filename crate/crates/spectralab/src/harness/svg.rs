//! Hand-rolled SVG line charts: polylines, axes, tick labels, and a
//! per-series color legend. Output bytes are a pure function of the input.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

/// One color per run, cycling for larger sweeps.
pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// `(legend label, points)` per series; colors cycle through the palette.
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

impl LineChart {
    pub fn render(&self) -> String {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for (_, pts) in &self.series {
            for &(x, y) in pts {
                min_x = min_x.min(x);
                max_x = max_x.max(x);
                min_y = min_y.min(y);
                max_y = max_y.max(y);
            }
        }
        if !min_x.is_finite() {
            min_x = 0.0;
            max_x = 1.0;
            min_y = 0.0;
            max_y = 1.0;
        }
        if (max_x - min_x).abs() < 1e-300 {
            max_x = min_x + 1.0;
        }
        if (max_y - min_y).abs() < 1e-300 {
            max_y = min_y + 1.0;
        }

        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = move |x: f64| MARGIN_LEFT + (x - min_x) / (max_x - min_x) * plot_w;
        let sy = move |y: f64| MARGIN_TOP + plot_h - (y - min_y) / (max_y - min_y) * plot_h;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        ));

        // Axes.
        svg.push_str(&format!(
            "<line x1=\"{l:.1}\" y1=\"{t:.1}\" x2=\"{l:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
            l = MARGIN_LEFT,
            t = MARGIN_TOP,
            b = MARGIN_TOP + plot_h
        ));
        svg.push_str(&format!(
            "<line x1=\"{l:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
            l = MARGIN_LEFT,
            b = MARGIN_TOP + plot_h,
            r = MARGIN_LEFT + plot_w
        ));

        // Ticks and grid.
        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let xv = min_x + f * (max_x - min_x);
            let yv = min_y + f * (max_y - min_y);
            let xp = sx(xv);
            let yp = sy(yv);
            svg.push_str(&format!(
                "<line x1=\"{xp:.1}\" y1=\"{b:.1}\" x2=\"{xp:.1}\" y2=\"{b2:.1}\" stroke=\"black\"/>\n",
                b = MARGIN_TOP + plot_h,
                b2 = MARGIN_TOP + plot_h + 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{xp:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\">{}</text>\n",
                MARGIN_TOP + plot_h + 18.0,
                tick_label(xv)
            ));
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{l:.1}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n",
                MARGIN_LEFT - 5.0,
                l = MARGIN_LEFT
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"end\">{}</text>\n",
                MARGIN_LEFT - 8.0,
                yp + 4.0,
                tick_label(yv)
            ));
        }

        // Axis labels.
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\" transform=\"rotate(-90 18 {mid:.1})\">{}</text>\n",
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label),
            mid = MARGIN_TOP + plot_h / 2.0
        ));

        // Series.
        for (idx, (label, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            if !pts.is_empty() {
                let coords: Vec<String> =
                    pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                svg.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                     points=\"{}\"/>\n",
                    coords.join(" ")
                ));
            }
            let ly = MARGIN_TOP + 16.0 * idx as f64;
            svg.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{ly:.1}\" x2=\"{x2:.1}\" y2=\"{ly:.1}\" \
                 stroke=\"{color}\" stroke-width=\"3\"/>\n",
                x = WIDTH - MARGIN_RIGHT + 10.0,
                x2 = WIDTH - MARGIN_RIGHT + 30.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                WIDTH - MARGIN_RIGHT + 36.0,
                ly + 4.0,
                escape(label)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
