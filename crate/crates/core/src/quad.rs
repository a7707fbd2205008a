//! Quadrature: globally adaptive 7/15-point Gauss-Kronrod and composite Gauss-Legendre.

use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// One G7/K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Adaptive integration over `[a, b]` with initial breakpoints; bisects the
/// worst panel until the summed error estimate is below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> Result<QuadResult> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidArgument("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut err = 0.0;
    for w in breakpoints.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    while err > tol {
        if heap.len() >= MAX_PANELS {
            return Err(Error::NonConvergence { iterations: heap.len(), last_step: err });
        }
        let p = heap.pop().expect("nonempty");
        let mid = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, mid);
        let (v2, e2) = gk15(&f, mid, p.b);
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult { value, error, panels: heap.len() })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("positive");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Nodes and weights of `panels` equal Gauss-Legendre panels on `[a, b]`.
pub fn composite_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w) in &rule {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_exact_for_degree_22() {
        let (v, _) = gk15(&|x: f64| x.powi(22), -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let s: f64 = WG[..3].iter().sum::<f64>() * 2.0 + WG[3];
        assert!((s - 2.0).abs() < 1e-14);
        let s: f64 = WGK[..7].iter().sum::<f64>() * 2.0 + WGK[7];
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_endpoint() {
        let r = integrate(|x: f64| x.sqrt(), &[0.0, 1.0], 1e-12).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn composite() {
        let s: f64 = composite_nodes(0.0, 3.0, 4, 5).iter().map(|(x, w)| w * x * x).sum();
        assert!((s - 9.0).abs() < 1e-12);
    }
}
