//! Tiny SVG emitter used by the report figures. Fixed 800x500 viewBox,
//! linear scales with 5% padding, no external plotting dependency.

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
pub const MARGIN_LEFT: f64 = 72.0;
pub const MARGIN_RIGHT: f64 = 24.0;
pub const MARGIN_TOP: f64 = 44.0;
pub const MARGIN_BOTTOM: f64 = 64.0;

/// Linear data-to-pixel map.
#[derive(Debug, Clone, Copy)]
pub struct LinScale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl LinScale {
    pub fn new(d0: f64, d1: f64, r0: f64, r1: f64) -> Self {
        LinScale { d0, d1, r0, r1 }
    }

    /// Domain padded by 5% on each side (degenerate domains get a unit pad).
    pub fn padded(min: f64, max: f64, r0: f64, r1: f64) -> Self {
        let span = max - min;
        let pad = if span == 0.0 { 1.0 } else { span * 0.05 };
        LinScale::new(min - pad, max + pad, r0, r1)
    }

    pub fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.d0, self.d1)
    }
}

pub fn x_scale(min: f64, max: f64) -> LinScale {
    LinScale::padded(min, max, MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
}

pub fn y_scale(min: f64, max: f64) -> LinScale {
    // pixel y grows downward
    LinScale::padded(min, max, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)
}

/// Short tick label: up to four significant digits, trailing zeros trimmed.
pub fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (3 - mag).clamp(0, 6) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub struct Svg {
    body: String,
}

impl Svg {
    pub fn new(title: &str, subtitle: &str) -> Self {
        let mut body = String::new();
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
        ));
        body.push_str(&format!(
            "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        body.push_str(&format!(
            "  <text x=\"{}\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(title)
        ));
        if !subtitle.is_empty() {
            body.push_str(&format!(
                "  <text x=\"{}\" y=\"36\" font-size=\"11\" fill=\"#555\" text-anchor=\"middle\">{}</text>\n",
                WIDTH / 2.0,
                escape(subtitle)
            ));
        }
        Svg { body }
    }

    pub fn line(
        &mut self,
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        stroke: &str,
        width: f64,
        dash: Option<&str>,
    ) {
        let dash = dash
            .map(|d| format!(" stroke-dasharray=\"{d}\""))
            .unwrap_or_default();
        self.body.push_str(&format!(
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"{dash}/>\n"
        ));
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        let pts: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        self.body.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>\n",
            pts.join(" ")
        ));
    }

    pub fn polygon(&mut self, points: &[(f64, f64)], fill: &str, stroke: &str) {
        let pts: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        self.body.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.7\"/>\n",
            pts.join(" ")
        ));
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: &str) {
        self.body.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"0.8\"/>\n"
        ));
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        self.body.push_str(&format!(
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" fill=\"{fill}\"/>\n"
        ));
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        self.body.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size}\" text-anchor=\"{anchor}\">{}</text>\n",
            escape(content)
        ));
    }

    /// Frame, y-axis ticks, and axis labels.
    pub fn axes(&mut self, ys: &LinScale, x_label: &str, y_label: &str) {
        let x0 = MARGIN_LEFT;
        let x1 = WIDTH - MARGIN_RIGHT;
        let y0 = HEIGHT - MARGIN_BOTTOM;
        let y1 = MARGIN_TOP;
        self.line(x0, y0, x1, y0, "#333", 1.0, None);
        self.line(x0, y0, x0, y1, "#333", 1.0, None);
        let (d0, d1) = ys.domain();
        for i in 0..=5 {
            let v = d0 + (d1 - d0) * i as f64 / 5.0;
            let y = ys.map(v);
            self.line(x0 - 4.0, y, x0, y, "#333", 1.0, None);
            self.line(x0, y, x1, y, "#ddd", 0.5, None);
            self.text(x0 - 7.0, y + 3.5, 10.0, "end", &tick_label(v));
        }
        self.text((x0 + x1) / 2.0, HEIGHT - 14.0, 12.0, "middle", x_label);
        self.body.push_str(&format!(
            "  <text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        ));
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_maps_endpoints_with_padding() {
        let s = LinScale::padded(0.0, 10.0, 100.0, 200.0);
        let (d0, d1) = s.domain();
        assert_eq!(d0, -0.5);
        assert_eq!(d1, 10.5);
        assert!((s.map(-0.5) - 100.0).abs() < 1e-9);
        assert!((s.map(10.5) - 200.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_domain_is_widened() {
        let s = LinScale::padded(3.0, 3.0, 0.0, 1.0);
        let (d0, d1) = s.domain();
        assert!(d0 < 3.0 && d1 > 3.0);
    }

    #[test]
    fn tick_labels_are_short() {
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(26.613), "26.61");
        assert_eq!(tick_label(0.30000000000000004), "0.3");
        assert_eq!(tick_label(-1.5), "-1.5");
    }

    #[test]
    fn document_is_well_formed() {
        let mut svg = Svg::new("title", "sub");
        let ys = y_scale(0.0, 1.0);
        svg.axes(&ys, "x", "y");
        svg.circle(100.0, 100.0, 3.0, "red");
        let doc = svg.finish();
        assert!(doc.starts_with("<svg"));
        assert!(doc.ends_with("</svg>\n"));
        assert_eq!(doc.matches("<svg").count(), 1);
    }
}
