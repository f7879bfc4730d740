//! Deterministic SVG rendering of SRG clouds, regions and margin witnesses.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::certifier::Witnesses;
use crate::error::{Error, Result};
use crate::regions::{boundary_curves, Region};
use crate::sampler::SrgCloud;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const REGION_FILL: [&str; 4] = ["#808080", "#1f77b4", "#d62728", "#2ca02c"];
const CELL_PX: f64 = 3.0;
const CURVE_SAMPLES: usize = 257;

#[derive(Debug, Clone)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    /// Outer padding in pixels.
    pub margin: f64,
    pub point_radius: f64,
    pub title: Option<String>,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            width: 640,
            height: 520,
            margin: 48.0,
            point_radius: 2.0,
            title: None,
        }
    }
}

pub enum Layer<'a> {
    Cloud { label: String, cloud: &'a SrgCloud },
    Region { label: String, region: &'a Region },
}

/// Affine map from the complex plane to SVG pixels; equal scale on both axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotTransform {
    pub scale: f64,
    pub x0: f64,
    pub y0: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl PlotTransform {
    pub fn to_px(&self, z: Complex64) -> (f64, f64) {
        (self.x0 + self.scale * z.re, self.y0 - self.scale * z.im)
    }

    fn px_to_z(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new((x - self.x0) / self.scale, (self.y0 - y) / self.scale)
    }
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn transform(layers: &[Layer], witnesses: Option<&Witnesses>, style: &PlotStyle) -> PlotTransform {
    let mut pts: Vec<Complex64> = vec![Complex64::default()];
    let mut unbounded_hint: f64 = 0.0;
    for layer in layers {
        match layer {
            Layer::Cloud { cloud, .. } => pts.extend(cloud.points.iter().map(|p| p.z())),
            Layer::Region { region, .. } => match region.sup_modulus() {
                Some(_) => {
                    for c in boundary_curves(region, 1.0) {
                        pts.extend((0..CURVE_SAMPLES).map(|k| c.eval(k as f64 / (CURVE_SAMPLES - 1) as f64)));
                    }
                }
                None => unbounded_hint = unbounded_hint.max(2.0 * region.scale_hint().max(1.0)),
            },
        }
    }
    if let Some(w) = witnesses {
        pts.push(w.z1.into());
        pts.push(w.z2.into());
    }
    let pts: Vec<Complex64> = pts.into_iter().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
    let re_lo = pts.iter().map(|z| z.re).fold(-unbounded_hint, f64::min);
    let re_hi = pts.iter().map(|z| z.re).fold(unbounded_hint, f64::max);
    let im_hi = pts.iter().map(|z| z.im.abs()).fold(unbounded_hint, f64::max);
    let span = (re_hi - re_lo).max(2.0 * im_hi).max(1e-3);
    let pad = 0.08 * span;
    let (mut re_min, mut re_max) = (re_lo - pad, re_hi + pad);
    let (mut im_min, mut im_max) = (-im_hi - pad, im_hi + pad);

    let pw = style.width as f64 - 2.0 * style.margin;
    let ph = style.height as f64 - 2.0 * style.margin;
    let scale = (pw / (re_max - re_min)).min(ph / (im_max - im_min));
    let extra_re = pw / scale - (re_max - re_min);
    re_min -= extra_re / 2.0;
    re_max += extra_re / 2.0;
    let extra_im = ph / scale - (im_max - im_min);
    im_min -= extra_im / 2.0;
    im_max += extra_im / 2.0;
    PlotTransform {
        scale,
        x0: style.margin - scale * re_min,
        y0: style.margin + scale * im_max,
        re_min,
        re_max,
        im_min,
        im_max,
    }
}

/// Horizontal runs of grid cells whose centres lie in the region.
fn fill_path(region: &Region, t: &PlotTransform, style: &PlotStyle) -> String {
    let (x_lo, y_lo) = (style.margin, style.margin);
    let cols = ((style.width as f64 - 2.0 * style.margin) / CELL_PX).floor() as usize;
    let rows = ((style.height as f64 - 2.0 * style.margin) / CELL_PX).floor() as usize;
    let mut d = String::new();
    for r in 0..rows {
        let y = y_lo + (r as f64 + 0.5) * CELL_PX;
        let mut run: Option<usize> = None;
        for c in 0..=cols {
            let inside = c < cols && region.contains(t.px_to_z(x_lo + (c as f64 + 0.5) * CELL_PX, y));
            match (inside, run) {
                (true, None) => run = Some(c),
                (false, Some(start)) => {
                    let _ = write!(
                        d,
                        "M{} {}h{}v{}h-{}z",
                        fmt(x_lo + start as f64 * CELL_PX),
                        fmt(y - CELL_PX / 2.0),
                        fmt((c - start) as f64 * CELL_PX),
                        fmt(CELL_PX),
                        fmt((c - start) as f64 * CELL_PX)
                    );
                    run = None;
                }
                _ => {}
            }
        }
    }
    d
}

fn boundary_path(region: &Region, t: &PlotTransform) -> String {
    let window = 2.0 * (t.im_max.abs().max(t.im_min.abs()) + t.re_max.abs().max(t.re_min.abs()));
    let limit = 4.0 * window;
    let mut d = String::new();
    for c in boundary_curves(region, window) {
        let mut pen_down = false;
        for k in 0..CURVE_SAMPLES {
            let z = c.eval(k as f64 / (CURVE_SAMPLES - 1) as f64);
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > limit {
                pen_down = false;
                continue;
            }
            let (x, y) = t.to_px(z);
            let _ = write!(d, "{}{} {}", if pen_down { "L" } else { "M" }, fmt(x), fmt(y));
            pen_down = true;
        }
    }
    d
}

/// Renders the layers in order over axes, with an optional witness segment.
pub fn render_svg(layers: &[Layer], witnesses: Option<&Witnesses>, style: &PlotStyle) -> Result<String> {
    if layers.is_empty() && witnesses.is_none() {
        return Err(Error::Domain("nothing to plot".into()));
    }
    for layer in layers {
        match layer {
            Layer::Cloud { cloud, .. } if cloud.is_empty() => {
                return Err(Error::EmptyCloud("cannot plot an empty cloud".into()))
            }
            Layer::Region { region, .. } => region.validate()?,
            _ => {}
        }
    }
    let t = transform(layers, witnesses, style);
    let (w, h) = (style.width, style.height);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-scale="{}">"#,
        t.scale
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot-area"><rect x="{m}" y="{m}" width="{}" height="{}"/></clipPath></defs>"#,
        fmt(w as f64 - 2.0 * style.margin),
        fmt(h as f64 - 2.0 * style.margin),
        m = fmt(style.margin)
    );
    let _ = writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    if let Some(title) = &style.title {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            fmt(w as f64 / 2.0),
            fmt(style.margin / 2.0),
            escape(title)
        );
    }
    write_axes(&mut s, &t, style);

    let _ = writeln!(s, r#"<g clip-path="url(#plot-area)">"#);
    let mut legend = Vec::new();
    let (mut ci, mut ri) = (0, 0);
    for layer in layers {
        match layer {
            Layer::Region { label, region } => {
                let colour = REGION_FILL[ri % REGION_FILL.len()];
                ri += 1;
                let _ = writeln!(
                    s,
                    r#"<path class="region-fill" d="{}" fill="{colour}" fill-opacity="0.3" stroke="none"/>"#,
                    fill_path(region, &t, style)
                );
                let _ = writeln!(
                    s,
                    r#"<path class="region-boundary" d="{}" fill="none" stroke="{colour}" stroke-width="1.2"/>"#,
                    boundary_path(region, &t)
                );
                legend.push((label.clone(), colour, true));
            }
            Layer::Cloud { label, cloud } => {
                let colour = PALETTE[ci % PALETTE.len()];
                ci += 1;
                let _ = writeln!(s, r#"<g class="cloud" fill="{colour}">"#);
                for p in &cloud.points {
                    let z = p.z();
                    let (x, y) = t.to_px(z);
                    let _ = writeln!(
                        s,
                        r#"<circle class="pt" cx="{}" cy="{}" r="{}"/>"#,
                        fmt(x),
                        fmt(y),
                        fmt(style.point_radius)
                    );
                    if z.im != 0.0 {
                        let (x, y) = t.to_px(z.conj());
                        let _ = writeln!(
                            s,
                            r#"<circle class="pt-conj" cx="{}" cy="{}" r="{}" fill-opacity="0.5"/>"#,
                            fmt(x),
                            fmt(y),
                            fmt(style.point_radius)
                        );
                    }
                }
                let _ = writeln!(s, "</g>");
                legend.push((label.clone(), colour, false));
            }
        }
    }
    if let Some(wit) = witnesses {
        let (x1, y1) = t.to_px(wit.z1.into());
        let (x2, y2) = t.to_px(wit.z2.into());
        let _ = writeln!(
            s,
            r##"<line class="witness" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000" stroke-width="1.5"/>"##,
            fmt(x1),
            fmt(y1),
            fmt(x2),
            fmt(y2)
        );
        for (x, y) in [(x1, y1), (x2, y2)] {
            let _ = writeln!(
                s,
                r##"<circle class="witness-end" cx="{}" cy="{}" r="3" fill="none" stroke="#000000"/>"##,
                fmt(x),
                fmt(y)
            );
        }
        legend.push(("margin witnesses".into(), "#000000", false));
    }
    let _ = writeln!(s, "</g>");
    write_legend(&mut s, &legend, style);
    s.push_str("</svg>\n");
    Ok(s)
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn write_axes(s: &mut String, t: &PlotTransform, style: &PlotStyle) {
    let (w, h) = (style.width as f64, style.height as f64);
    let m = style.margin;
    let _ = writeln!(
        s,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#cccccc"/>"##,
        fmt(m),
        fmt(m),
        fmt(w - 2.0 * m),
        fmt(h - 2.0 * m)
    );
    let (ox, oy) = t.to_px(Complex64::default());
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444444"/>"##,
        fmt(m),
        fmt(oy),
        fmt(w - m),
        fmt(oy)
    );
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#444444"/>"##,
        fmt(ox),
        fmt(m),
        fmt(ox),
        fmt(h - m)
    );
    let step = nice_step(t.re_max - t.re_min);
    let mut k = (t.re_min / step).ceil() as i64;
    while (k as f64) * step <= t.re_max {
        let v = k as f64 * step;
        let (x, _) = t.to_px(Complex64::new(v, 0.0));
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle" fill="#444444">{}</text>"##,
            fmt(x),
            fmt(h - m + 14.0),
            trim(v)
        );
        k += 1;
    }
    let mut k = (t.im_min / step).ceil() as i64;
    while (k as f64) * step <= t.im_max {
        let v = k as f64 * step;
        let (_, y) = t.to_px(Complex64::new(0.0, v));
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end" fill="#444444">{}</text>"##,
            fmt(m - 4.0),
            fmt(y + 3.0),
            trim(v)
        );
        k += 1;
    }
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">Re</text>"##,
        fmt(w - m),
        fmt(h - m + 30.0)
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-family="sans-serif" font-size="11">Im</text>"##,
        fmt(m - 40.0),
        fmt(m - 6.0)
    );
}

fn trim(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn write_legend(s: &mut String, items: &[(String, &str, bool)], style: &PlotStyle) {
    if items.is_empty() {
        return;
    }
    let x = style.width as f64 - style.margin - 150.0;
    let mut y = style.margin + 14.0;
    let _ = writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="11">"#);
    for (label, colour, filled_box) in items {
        if *filled_box {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="10" height="10" fill="{colour}" fill-opacity="0.3" stroke="{colour}"/>"#,
                fmt(x),
                fmt(y - 9.0)
            );
        } else {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="4" fill="{colour}"/>"#, fmt(x + 5.0), fmt(y - 4.0));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, fmt(x + 16.0), fmt(y), escape(label));
        y += 16.0;
    }
    let _ = writeln!(s, "</g>");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::Point;
    use crate::sampler::{SrgKind, SrgPoint};

    fn cloud(zs: &[(f64, f64)]) -> SrgCloud {
        let pts = zs
            .iter()
            .enumerate()
            .map(|(i, &(re, im))| {
                let z = Complex64::new(re, im);
                SrgPoint {
                    magnitude: z.norm(),
                    angle: z.arg().abs(),
                    kind: SrgKind::Soft,
                    horizon_t: None,
                    pair_id: i,
                }
            })
            .collect();
        SrgCloud::from_points(SrgKind::Soft, pts).unwrap()
    }

    fn attr(tag: &str, name: &str) -> f64 {
        let key = format!(" {name}=\"");
        let start = tag.find(&key).unwrap() + key.len();
        let end = start + tag[start..].find('"').unwrap();
        tag[start..end].parse().unwrap()
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_svg(&[], None, &PlotStyle::default()).is_err());
    }

    #[test]
    fn point_count_preserved_with_region_overlay() {
        let c = cloud(&[(0.5, 0.2), (0.3, 0.0), (0.8, -0.1), (1.0, 0.4)]);
        let d = Region::sector_disk(0.25, 0.25).unwrap();
        let svg = render_svg(
            &[
                Layer::Region { label: "D".into(), region: &d },
                Layer::Cloud { label: "P".into(), cloud: &c },
            ],
            None,
            &PlotStyle::default(),
        )
        .unwrap();
        assert_eq!(svg.matches(r#"class="pt""#).count(), 4);
        // One real point has no mirror image.
        assert_eq!(svg.matches(r#"class="pt-conj""#).count(), 3);
        assert!(svg.contains("<g class=\"legend\""));
    }

    #[test]
    fn sector_disk_fill_matches_membership() {
        let d = Region::sector_disk(0.25, 0.25).unwrap();
        let svg = render_svg(&[Layer::Region { label: "D".into(), region: &d }], None, &PlotStyle::default()).unwrap();
        let t = transform(&[Layer::Region { label: "D".into(), region: &d }], None, &PlotStyle::default());
        // Boundary reaches the arc at |z| = 4 and the vertical cut at Re = 0.25.
        assert!(t.re_max > 4.0 && t.re_min < 0.0);
        let fill = svg.lines().find(|l| l.contains("region-fill")).unwrap();
        assert!(fill.matches('M').count() > 100);
        let boundary = svg.lines().find(|l| l.contains("region-boundary")).unwrap();
        assert_eq!(boundary.matches('M').count(), 4, "cut, two angle lines, arc");
    }

    #[test]
    fn witness_length_matches_margin() {
        let c = cloud(&[(1.0, 0.5), (2.0, 0.0)]);
        let lhp = Region::half_plane(0.0, crate::regions::Side::Le).unwrap();
        let w = Witnesses {
            z1: Point { re: 1.0, im: 0.5 },
            z2: Point { re: 0.0, im: 0.5 },
        };
        let svg = render_svg(
            &[
                Layer::Region { label: "inv C".into(), region: &lhp },
                Layer::Cloud { label: "P".into(), cloud: &c },
            ],
            Some(&w),
            &PlotStyle::default(),
        )
        .unwrap();
        let root = svg.lines().next().unwrap();
        let scale = attr(root, "data-scale");
        let line = svg.lines().find(|l| l.contains("class=\"witness\"")).unwrap();
        let len = (attr(line, "x2") - attr(line, "x1")).hypot(attr(line, "y2") - attr(line, "y1"));
        assert!((len - scale).abs() <= 0.01 * scale);
    }

    #[test]
    fn deterministic_output() {
        let c = cloud(&[(0.5, 0.2), (0.3, 0.1)]);
        let style = PlotStyle {
            title: Some("a < b & c".into()),
            ..Default::default()
        };
        let a = render_svg(&[Layer::Cloud { label: "x".into(), cloud: &c }], None, &style).unwrap();
        let b = render_svg(&[Layer::Cloud { label: "x".into(), cloud: &c }], None, &style).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("a &lt; b &amp; c"));
    }
}
