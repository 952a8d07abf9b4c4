//! Moving least-squares cubic fit for unstructured clouds.
//!
//! Each query node gets its own weighted least-squares cubic in `(x, y)`,
//! fitted to the points inside a disc of radius `r` with the compactly
//! supported Wendland weight `(1 − d)⁴(4d + 1)`. The fitted value at the
//! node is the interpolant. Cubic polynomials are reproduced exactly.

use nalgebra::{DMatrix, DVector};

/// Bucketed point set for disc queries.
pub(crate) struct PointIndex<'a> {
    points: &'a [[f64; 3]],
    origin: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

impl<'a> PointIndex<'a> {
    pub fn new(points: &'a [[f64; 3]], cell: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let dims = [
            (((hi[0] - lo[0]) / cell).floor() as usize + 1).max(1),
            (((hi[1] - lo[1]) / cell).floor() as usize + 1).max(1),
        ];
        let mut buckets = vec![Vec::new(); dims[0] * dims[1]];
        for (i, p) in points.iter().enumerate() {
            let bx = (((p[0] - lo[0]) / cell) as usize).min(dims[0] - 1);
            let by = (((p[1] - lo[1]) / cell) as usize).min(dims[1] - 1);
            buckets[by * dims[0] + bx].push(i as u32);
        }
        PointIndex {
            points,
            origin: lo,
            cell,
            dims,
            buckets,
        }
    }

    /// Indices of points within `r` of `(x, y)`.
    pub fn within(&self, x: f64, y: f64, r: f64, out: &mut Vec<u32>) {
        out.clear();
        let r2 = r * r;
        let range = |c: f64, o: f64, n: usize| {
            let lo = ((c - r - o) / self.cell).floor().max(0.0) as usize;
            let hi = (((c + r - o) / self.cell).floor().max(0.0) as usize).min(n - 1);
            (lo, hi)
        };
        let (x0, x1) = range(x, self.origin[0], self.dims[0]);
        let (y0, y1) = range(y, self.origin[1], self.dims[1]);
        if x0 > x1 || y0 > y1 {
            return;
        }
        for by in y0..=y1 {
            for bx in x0..=x1 {
                for &i in &self.buckets[by * self.dims[0] + bx] {
                    let p = self.points[i as usize];
                    let (dx, dy) = (p[0] - x, p[1] - y);
                    if dx * dx + dy * dy < r2 {
                        out.push(i);
                    }
                }
            }
        }
    }
}

const N_BASIS: usize = 10;
/// Minimum neighbours before a fit is attempted.
const MIN_NEIGHBOURS: usize = 16;
/// Support radius may grow up to this multiple of the nominal radius.
const MAX_GROWTH: f64 = 3.0;
/// Fits whose singular-value ratio falls below this are rejected.
const RANK_TOL: f64 = 1e-10;

fn wendland(d: f64) -> f64 {
    if d >= 1.0 {
        0.0
    } else {
        let t = 1.0 - d;
        t * t * t * t * (4.0 * d + 1.0)
    }
}

fn basis(u: f64, v: f64) -> [f64; N_BASIS] {
    [
        1.0,
        u,
        v,
        u * u,
        u * v,
        v * v,
        u * u * u,
        u * u * v,
        u * v * v,
        v * v * v,
    ]
}

/// MLS value at `(x, y)`, or `None` when the neighbourhood cannot support a
/// cubic fit.
pub(crate) fn mls_value(
    index: &PointIndex,
    x: f64,
    y: f64,
    radius: f64,
    scratch: &mut Vec<u32>,
) -> Option<f64> {
    let mut r = radius;
    loop {
        index.within(x, y, r, scratch);
        if scratch.len() >= MIN_NEIGHBOURS {
            break;
        }
        r *= 1.25;
        if r > MAX_GROWTH * radius {
            return None;
        }
    }
    let m = scratch.len();
    let mut a = DMatrix::<f64>::zeros(m, N_BASIS);
    let mut b = DVector::<f64>::zeros(m);
    for (row, &i) in scratch.iter().enumerate() {
        let p = index.points[i as usize];
        let (u, v) = ((p[0] - x) / r, (p[1] - y) / r);
        let w = wendland((u * u + v * v).sqrt()).sqrt();
        for (col, phi) in basis(u, v).into_iter().enumerate() {
            a[(row, col)] = w * phi;
        }
        b[row] = w * p[2];
    }
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin < RANK_TOL * smax {
        return None;
    }
    let coef = svd.solve(&b, 0.0).ok()?;
    Some(coef[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_finds_neighbours() {
        let pts: Vec<[f64; 3]> = (0..100)
            .map(|i| [(i % 10) as f64, (i / 10) as f64, 0.0])
            .collect();
        let idx = PointIndex::new(&pts, 1.5);
        let mut out = Vec::new();
        idx.within(4.0, 4.0, 1.01, &mut out);
        assert_eq!(out.len(), 5);
        idx.within(-5.0, -5.0, 1.0, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn cubic_is_reproduced() {
        let pts: Vec<[f64; 3]> = (0..400)
            .map(|i| {
                let x = (i % 20) as f64 * 0.1 + 0.013 * ((i * 7) % 5) as f64;
                let y = (i / 20) as f64 * 0.1 + 0.017 * ((i * 3) % 4) as f64;
                [x, y, 1.0 + x * x * y - 2.0 * y * y * y]
            })
            .collect();
        let idx = PointIndex::new(&pts, 0.35);
        let mut s = Vec::new();
        let v = mls_value(&idx, 1.03, 0.97, 0.35, &mut s).unwrap();
        let expected = 1.0 + 1.03f64.powi(2) * 0.97 - 2.0 * 0.97f64.powi(3);
        assert!((v - expected).abs() < 1e-12);
    }
}
