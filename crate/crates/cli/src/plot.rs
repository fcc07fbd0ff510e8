//! Static SVG of the filtered reference signal with segment boundaries.

use std::fmt::Write;

use remo_core::segmentation::SegmentationTrace;

const WIDTH: f64 = 1200.0;
const HEIGHT: f64 = 320.0;
const PAD: f64 = 30.0;
/// Above this many samples the trace is reduced to per-bucket min/max pairs.
const MAX_POINTS: usize = 4000;

fn downsample(xs: &[f64]) -> Vec<(usize, f64)> {
    if xs.len() <= MAX_POINTS {
        return xs.iter().copied().enumerate().collect();
    }
    let buckets = MAX_POINTS / 2;
    let mut out = Vec::with_capacity(MAX_POINTS);
    for b in 0..buckets {
        let lo = b * xs.len() / buckets;
        let hi = ((b + 1) * xs.len() / buckets).max(lo + 1);
        let (mut imin, mut imax) = (lo, lo);
        for i in lo..hi {
            if xs[i] < xs[imin] {
                imin = i;
            }
            if xs[i] > xs[imax] {
                imax = i;
            }
        }
        out.push((imin.min(imax), xs[imin.min(imax)]));
        if imin != imax {
            out.push((imin.max(imax), xs[imin.max(imax)]));
        }
    }
    out
}

pub fn segmentation_svg(trace: &SegmentationTrace, title: &str) -> String {
    let xs = &trace.filtered;
    let n = xs.len().max(2);
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let px = |i: usize| PAD + (WIDTH - 2.0 * PAD) * i as f64 / (n - 1) as f64;
    let py = |v: f64| HEIGHT - PAD - (HEIGHT - 2.0 * PAD) * (v - lo) / span;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let title = title.replace('&', "&amp;").replace('<', "&lt;");
    writeln!(s, r#"<text x="{PAD}" y="18">{title} ({}, {} segments)</text>"#, trace.reference, trace.segments.len())
        .unwrap();
    if lo < 0.0 && hi > 0.0 {
        writeln!(
            s,
            r##"<line x1="{PAD}" x2="{}" y1="{:.2}" y2="{:.2}" stroke="#ccc"/>"##,
            WIDTH - PAD,
            py(0.0),
            py(0.0)
        )
        .unwrap();
    }
    for &(a, b) in &trace.bounds {
        writeln!(
            s,
            r##"<rect x="{:.2}" y="{PAD}" width="{:.2}" height="{}" fill="#2a9d8f" fill-opacity="0.12"/>"##,
            px(a),
            px(b) - px(a),
            HEIGHT - 2.0 * PAD
        )
        .unwrap();
        for i in [a, b] {
            writeln!(
                s,
                r##"<line class="boundary" x1="{:.2}" x2="{:.2}" y1="{PAD}" y2="{}" stroke="#e76f51"/>"##,
                px(i),
                px(i),
                HEIGHT - PAD
            )
            .unwrap();
        }
    }
    s.push_str(r##"<polyline fill="none" stroke="#264653" stroke-width="1" points=""##);
    for (k, (i, v)) in downsample(xs).into_iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        write!(s, "{:.2},{:.2}", px(i), py(v)).unwrap();
    }
    s.push_str("\"/>\n</svg>\n");
    s
}
