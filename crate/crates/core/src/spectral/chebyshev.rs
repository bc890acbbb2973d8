//! Vertical discretization on `[0, 1]`: Chebyshev–Gauss–Lobatto nodes,
//! barycentric interpolation and differentiation, Gauss–Legendre quadrature
//! and shifted Legendre polynomials.

use std::f64::consts::PI;

/// Chebyshev–Gauss–Lobatto nodes mapped to `[0, 1]`, increasing.
pub fn cgl_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|j| 0.5 * (1.0 - (PI * j as f64 / (n - 1) as f64).cos()))
        .collect()
}

/// Barycentric weights of the Chebyshev–Gauss–Lobatto nodes.
pub fn cgl_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * sign
            } else {
                sign
            }
        })
        .collect()
}

/// Row-major `targets.len() x nodes.len()` matrix evaluating the Lagrange
/// interpolant through `nodes` at `targets`.
pub fn interp_matrix(nodes: &[f64], bary: &[f64], targets: &[f64]) -> Vec<Vec<f64>> {
    targets
        .iter()
        .map(|&x| {
            let mut row = vec![0.0; nodes.len()];
            if let Some(j) = nodes.iter().position(|&y| (x - y).abs() < 1e-15) {
                row[j] = 1.0;
                return row;
            }
            let mut den = 0.0;
            for (j, (&y, &w)) in nodes.iter().zip(bary).enumerate() {
                let t = w / (x - y);
                row[j] = t;
                den += t;
            }
            row.iter_mut().for_each(|r| *r /= den);
            row
        })
        .collect()
}

/// First-derivative collocation matrix for the Lagrange basis on `nodes`.
pub fn diff_matrix(nodes: &[f64], bary: &[f64]) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                d[i][j] = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                diag -= d[i][j];
            }
        }
        d[i][i] = diag;
    }
    d
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum())
                .collect()
        })
        .collect()
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pair(n, t);
                let dt = p / dp;
                t -= dt;
                if dt.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, t);
            (0.5 * (1.0 + t), 1.0 / ((1.0 - t * t) * dp * dp))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Legendre `P_n(t)` and its derivative on `[-1, 1]`.
fn legendre_pair(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// Shifted Legendre polynomials `P_0..=P_deg` on `[0, 1]` evaluated at `y`.
pub fn shifted_legendre(deg: usize, y: f64) -> Vec<f64> {
    let t = 2.0 * y - 1.0;
    let mut out = Vec::with_capacity(deg + 1);
    out.push(1.0);
    if deg >= 1 {
        out.push(t);
    }
    for k in 2..=deg {
        let v = ((2 * k - 1) as f64 * t * out[k - 1] - (k - 1) as f64 * out[k - 2]) / k as f64;
        out.push(v);
    }
    out
}

/// Quadrature weights integrating the nodal interpolant on `nodes` exactly.
pub fn nodal_quadrature_weights(nodes: &[f64], bary: &[f64]) -> Vec<f64> {
    let (xq, wq) = gauss_legendre(nodes.len() + 1);
    let e = interp_matrix(nodes, bary, &xq);
    (0..nodes.len())
        .map(|j| e.iter().zip(&wq).map(|(row, w)| row[j] * w).sum())
        .collect()
}

/// Tabulated vertical basis: Lagrange polynomials on the Chebyshev–Gauss–
/// Lobatto nodes together with a Gauss–Legendre rule exact for the products
/// used in the weak forms.
#[derive(Clone, Debug)]
pub struct VerticalBasis {
    pub nodes: Vec<f64>,
    pub bary: Vec<f64>,
    /// Differentiation matrices of order 1 and 2 at the nodes.
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<f64>>,
    pub quad_x: Vec<f64>,
    pub quad_w: Vec<f64>,
    /// `eval[d][q][j]`: `d`-th derivative of basis function `j` at quadrature point `q`.
    pub eval: [Vec<Vec<f64>>; 3],
}

impl VerticalBasis {
    pub fn new(n: usize) -> Self {
        let nodes = cgl_nodes(n);
        let bary = cgl_weights(n);
        let d1 = diff_matrix(&nodes, &bary);
        let d2 = matmul(&d1, &d1);
        let (quad_x, quad_w) = gauss_legendre(n + 4);
        let e0 = interp_matrix(&nodes, &bary, &quad_x);
        let e1 = matmul(&e0, &d1);
        let e2 = matmul(&e0, &d2);
        VerticalBasis {
            nodes,
            bary,
            d1,
            d2,
            quad_x,
            quad_w,
            eval: [e0, e1, e2],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Y[i][j] = int_0^1 y^p  phi_i^(dt)  phi_j^(da) dy` (test `i`, trial `j`).
    pub fn moment(&self, p: u32, d_test: usize, d_trial: usize) -> Vec<Vec<f64>> {
        let n = self.len();
        let et = &self.eval[d_test];
        let ea = &self.eval[d_trial];
        let wy: Vec<f64> = self
            .quad_x
            .iter()
            .zip(&self.quad_w)
            .map(|(x, w)| w * x.powi(p as i32))
            .collect();
        let mut out = vec![vec![0.0; n]; n];
        for (q, &wq) in wy.iter().enumerate() {
            for i in 0..n {
                let a = wq * et[q][i];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a * ea[q][j];
                }
            }
        }
        out
    }

    /// Interpolate nodal values to arbitrary points.
    pub fn interpolate(&self, values: &[f64], targets: &[f64]) -> Vec<f64> {
        interp_matrix(&self.nodes, &self.bary, targets)
            .iter()
            .map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        for p in 0..12 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn differentiation_exact_on_polynomials() {
        let vb = VerticalBasis::new(10);
        let f: Vec<f64> = vb.nodes.iter().map(|y| y.powi(7) - 3.0 * y * y).collect();
        for (i, y) in vb.nodes.iter().enumerate() {
            let d: f64 = vb.d1[i].iter().zip(&f).map(|(a, b)| a * b).sum();
            let dd: f64 = vb.d2[i].iter().zip(&f).map(|(a, b)| a * b).sum();
            assert!((d - (7.0 * y.powi(6) - 6.0 * y)).abs() < 1e-11);
            assert!((dd - (42.0 * y.powi(5) - 6.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn legendre_orthogonality() {
        let (x, w) = gauss_legendre(12);
        for a in 0..6 {
            for b in 0..6 {
                let s: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(y, w)| {
                        let p = shifted_legendre(6, *y);
                        w * p[a] * p[b]
                    })
                    .sum();
                let e = if a == b {
                    1.0 / (2 * a + 1) as f64
                } else {
                    0.0
                };
                assert!((s - e).abs() < 1e-14);
            }
        }
    }
}
