//! Univariate complex polynomials: products of linear factors, derivatives,
//! and roots via companion-matrix eigenvalues.

use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;

/// Coefficients are stored lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    /// Monic ∏(t − r).
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        Poly(c)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|z| *z != Complex64::new(0.0, 0.0)).unwrap_or(0)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * t + a)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect())
    }

    /// All roots with multiplicity. Leading coefficients that vanish relative
    /// to the largest coefficient are dropped first.
    pub fn roots(&self) -> Vec<Complex64> {
        let scale = self.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Vec::new();
        }
        let mut n = self.degree();
        while n > 0 && self.0[n].norm() <= 1e-15 * scale {
            n -= 1;
        }
        if n == 0 {
            return Vec::new();
        }
        let lead = self.0[n];
        let companion = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -self.0[i] / lead
            } else if i == j + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let eig = Schur::new(companion).eigenvalues().expect("complex Schur form is triangular");
        let trimmed = Poly(self.0[..=n].to_vec());
        let d = trimmed.derivative();
        let simple: Vec<Complex64> = eig.iter().map(|&z| polish(&trimmed, &d, z)).collect();
        merge_multiple(&trimmed, simple)
    }

    /// |p(t)| relative to Σ|a_k||t|^k.
    fn relative_residual(&self, t: Complex64) -> f64 {
        let bound = self.0.iter().rev().fold(0.0, |acc, a| acc * t.norm() + a.norm());
        if bound == 0.0 {
            0.0
        } else {
            self.eval(t).norm() / bound
        }
    }
}

/// Replaces clusters that approximate a root of multiplicity m by m copies
/// of the Newton root of p^(m−1) started from the cluster mean. A cluster is
/// replaced only if p, p′, …, p^(m−1) all vanish there to rounding level.
fn merge_multiple(p: &Poly, roots: Vec<Complex64>) -> Vec<Complex64> {
    let mut derivs = vec![p.clone()];
    for _ in 0..roots.len() {
        let next = derivs.last().expect("nonempty").derivative();
        derivs.push(next);
    }
    let mut used = vec![false; roots.len()];
    let mut out = Vec::with_capacity(roots.len());
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let radius = 1e-3 * (1.0 + roots[i].norm());
        let members: Vec<usize> = (i..roots.len()).filter(|&k| !used[k] && (roots[k] - roots[i]).norm() < radius).collect();
        let m = members.len();
        if m >= 2 {
            let mean = members.iter().map(|&k| roots[k]).sum::<Complex64>() / m as f64;
            let z = polish(&derivs[m - 1], &derivs[m], mean);
            if (0..m).all(|k| derivs[k].relative_residual(z) < 1e-12) {
                for &k in &members {
                    used[k] = true;
                }
                out.extend(std::iter::repeat(z).take(m));
                continue;
            }
        }
        used[i] = true;
        out.push(roots[i]);
    }
    out
}

/// A few Newton steps, kept only while they reduce the residual.
fn polish(p: &Poly, d: &Poly, mut z: Complex64) -> Complex64 {
    let mut res = p.eval(z).norm();
    for _ in 0..3 {
        let dz = d.eval(z);
        if dz.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(z) / dz;
        let r = p.eval(cand).norm();
        if !(r < res) {
            break;
        }
        z = cand;
        res = r;
    }
    z
}
