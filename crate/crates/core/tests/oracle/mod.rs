//! Independent reference implementations: plain loops over plain arrays,
//! no shared code with the library beyond the input types.

#![allow(dead_code)]

use rand::Rng;
use sodkit::BBox;

pub fn iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let iw = a[2].min(b[2]) - a[0].max(b[0]);
    let ih = a[3].min(b[3]) - a[1].max(b[1]);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

fn arr(b: &BBox) -> [f64; 4] {
    [b.x1, b.y1, b.x2, b.y2]
}

/// Center-size rows `(x, y, w, h)` of a box set.
fn rows(boxes: &[BBox]) -> Vec<[f64; 4]> {
    boxes
        .iter()
        .map(|b| {
            [
                (b.x1 + b.x2) / 2.0,
                (b.y1 + b.y2) / 2.0,
                b.x2 - b.x1,
                b.y2 - b.y1,
            ]
        })
        .collect()
}

pub fn center_distance(gts: &[BBox], props: &[BBox]) -> Vec<Vec<f64>> {
    let (g, p) = (rows(gts), rows(props));
    g.iter()
        .map(|a| {
            p.iter()
                .map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
                .collect()
        })
        .collect()
}

pub fn shape_sq(gts: &[BBox], props: &[BBox]) -> Vec<Vec<f64>> {
    let (g, p) = (rows(gts), rows(props));
    g.iter()
        .map(|a| {
            p.iter()
                .map(|b| (a[2] - b[2]).powi(2) + (a[3] - b[3]).powi(2))
                .collect()
        })
        .collect()
}

/// Score matrix step by step: E1, E2, whole-matrix min-max of E1, the three
/// criteria, then the normalized weighted sum.
pub fn mcla(
    gts: &[BBox],
    props: &[BBox],
    lambda: [f64; 3],
    c_poc: f64,
    c_scc: f64,
) -> Vec<Vec<f64>> {
    let e1 = center_distance(gts, props);
    let e2 = shape_sq(gts, props);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in &e1 {
        for &v in row {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let total = lambda[0] + lambda[1] + lambda[2];
    let mut out = vec![vec![0.0; props.len()]; gts.len()];
    for i in 0..gts.len() {
        for j in 0..props.len() {
            let e1n = if hi > lo {
                (e1[i][j] - lo) / (hi - lo)
            } else {
                0.0
            };
            let s1 = iou(arr(&gts[i]), arr(&props[j]));
            let s2 = 1.0 / (1.0 + (c_poc * e1n).sqrt());
            let s3 = 1.0 / (1.0 + (c_scc * e2[i][j]).sqrt());
            out[i][j] = (lambda[0] * s1 + lambda[1] * s2 + lambda[2] * s3) / total;
        }
    }
    out
}

pub fn iou_dense(gts: &[BBox], props: &[BBox]) -> Vec<Vec<f64>> {
    gts.iter()
        .map(|g| props.iter().map(|p| iou(arr(g), arr(p))).collect())
        .collect()
}

/// Max-quality labelling on a dense matrix: `-1` negative, `-2` ignored,
/// otherwise the GT index.
pub fn assign(
    s: &[Vec<f64>],
    n: usize,
    pos: f64,
    neg: f64,
    low_quality: bool,
    min_pos: f64,
) -> Vec<i64> {
    let m = s.len();
    let mut labels = vec![-1i64; n];
    if m == 0 {
        return labels;
    }
    for (j, label) in labels.iter_mut().enumerate() {
        let mut best = 0;
        for i in 1..m {
            if s[i][j] > s[best][j] {
                best = i;
            }
        }
        let q = s[best][j];
        *label = if q < neg {
            -1
        } else if q < pos {
            -2
        } else {
            best as i64
        };
    }
    if low_quality {
        for (i, row) in s.iter().enumerate() {
            let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top > 0.0 && top >= min_pos {
                for j in 0..n {
                    if row[j] == top {
                        labels[j] = i as i64;
                    }
                }
            }
        }
    }
    labels
}

/// Random box with corners in `[0, extent]` and sides in `[min_side, max_side]`.
pub fn random_box(rng: &mut impl Rng, extent: f64, min_side: f64, max_side: f64) -> BBox {
    let w = rng.gen_range(min_side..=max_side);
    let h = rng.gen_range(min_side..=max_side);
    let x = rng.gen_range(0.0..=extent);
    let y = rng.gen_range(0.0..=extent);
    BBox {
        x1: x,
        y1: y,
        x2: x + w,
        y2: y + h,
    }
}

/// An instance mixing small and large boxes, with some proposals copied
/// from GTs so exact ties and perfect matches occur.
pub fn random_instance(rng: &mut impl Rng, max_m: usize, max_n: usize) -> (Vec<BBox>, Vec<BBox>) {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(1..=max_n);
    let gts: Vec<BBox> = (0..m).map(|_| random_box(rng, 200.0, 1.0, 80.0)).collect();
    let props = (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                gts[rng.gen_range(0..m)]
            } else {
                let g = gts[rng.gen_range(0..m)];
                let jitter = rng.gen_range(0.0..20.0);
                let b = random_box(rng, 200.0, 1.0, 80.0);
                if rng.gen_bool(0.5) {
                    BBox {
                        x1: g.x1 + rng.gen_range(-jitter..=jitter),
                        y1: g.y1 + rng.gen_range(-jitter..=jitter),
                        x2: g.x2 + jitter,
                        y2: g.y2 + jitter,
                    }
                } else {
                    b
                }
            }
        })
        .collect();
    (gts, props)
}

/// Centered 2D DFT of one `h × w` plane by direct summation along rows
/// then columns. Output index `(u, v)` holds frequency
/// `(u − h/2, v − w/2)`.
pub fn dft2_centered(plane: &[f64], h: usize, w: usize) -> Vec<(f64, f64)> {
    use std::f64::consts::PI;
    let mut rowpass = vec![(0.0, 0.0); h * w];
    for i in 0..h {
        for v in 0..w {
            let k = v as f64 - (w / 2) as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..w {
                let a = -2.0 * PI * k * j as f64 / w as f64;
                re += plane[i * w + j] * a.cos();
                im += plane[i * w + j] * a.sin();
            }
            rowpass[i * w + v] = (re, im);
        }
    }
    let mut out = vec![(0.0, 0.0); h * w];
    for u in 0..h {
        let k = u as f64 - (h / 2) as f64;
        for v in 0..w {
            let (mut re, mut im) = (0.0, 0.0);
            for i in 0..h {
                let a = -2.0 * PI * k * i as f64 / h as f64;
                let (c, s) = (a.cos(), a.sin());
                let (xr, xi) = rowpass[i * w + v];
                re += xr * c - xi * s;
                im += xr * s + xi * c;
            }
            out[u * w + v] = (re, im);
        }
    }
    out
}
