//! Sweep tables and their CSV and SVG renderings.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Flag(b) => u8::from(*b).to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }
}

/// One rendered curve: a legend label and the column holding its values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub series: Vec<Series>,
    pub y_label: String,
    pub log_x: bool,
}

/// `x` to 12 significant digits, trailing zeros dropped; exponent form
/// outside `[1e-5, 1e12)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Line plot of every series against the first column.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const LEFT: f64 = 70.0;
        const RIGHT: f64 = 170.0;
        const TOP: f64 = 20.0;
        const BOTTOM: f64 = 50.0;
        const COLOURS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

        let xs: Vec<f64> = self.rows.iter().map(|r| r[0].as_f64().unwrap_or(f64::NAN)).collect();
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let (x0, x1) = bounds(xs.iter().map(|&x| tx(x)));
        let ys = self
            .series
            .iter()
            .flat_map(|s| self.rows.iter().filter_map(move |r| r[s.column].as_f64()));
        let (_, y1) = bounds(ys.chain([0.0]));
        let y0 = 0.0;
        let y1 = if y1 > y0 { y1 * 1.05 } else { 1.0 };
        let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 0.5, x0 + 0.5) };
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let px = |x: f64| LEFT + (tx(x) - x0) / (x1 - x0) * pw;
        let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let y = y0 + f * (y1 - y0);
            let yy = py(y);
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                yy + 4.0,
                short(y)
            );
            let xv = x0 + f * (x1 - x0);
            let xx = LEFT + f * pw;
            let label = if self.log_x { 10f64.powf(xv) } else { xv };
            let _ = writeln!(
                s,
                r#"<text x="{xx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph + 18.0,
                short(label)
            );
        }
        let x_label = format!("{}{}", self.header[0], if self.log_x { " (log scale)" } else { "" });
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 10.0,
            escape(&x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let colour = COLOURS[i % COLOURS.len()];
            let points: Vec<String> = self
                .rows
                .iter()
                .zip(&xs)
                .filter_map(|(r, &x)| r[series.column].as_f64().map(|y| format!("{:.2},{:.2}", px(x), py(y))))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
                points.join(" ")
            );
            let ly = TOP + 14.0 + 18.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn short(x: f64) -> String {
    let s = format!("{x:.3}");
    trim(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(2.5), "2.5");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0 * 100.0), "66.6666666667");
        assert_eq!(format_sig(123456.789), "123456.789");
        assert_eq!(format_sig(9.999999999999999), "10");
        assert_eq!(format_sig(-0.5), "-0.5");
        assert_eq!(format_sig(1.5e-7), "1.5e-7");
        assert_eq!(format_sig(6.02214076e23), "6.02214076e23");
    }

    #[test]
    fn csv_layout() {
        let t = Table {
            header: vec!["power_w".into(), "k1_rate_bits_per_use".into(), "incomplete".into()],
            rows: vec![vec![Cell::Num(1.0), Cell::Num(0.25), Cell::Flag(false)], vec![Cell::Num(2.0), Cell::Empty, Cell::Flag(true)]],
            series: vec![Series {
                label: "k = 1".into(),
                column: 1,
            }],
            y_label: "rate".into(),
            log_x: false,
        };
        assert_eq!(t.to_csv(), "power_w,k1_rate_bits_per_use,incomplete\n1,0.25,0\n2,,1\n");
        let svg = t.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("k = 1"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
