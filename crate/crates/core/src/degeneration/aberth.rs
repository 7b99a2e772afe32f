//! Simultaneous-iteration root finding for complex polynomials.

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 500;

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |a_i| |z|^i`, the natural scale of `p(z)` for residual tests.
fn magnitude(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Whether `|p(z)| ≤ tol · Σ |a_i||z|^i`.
pub fn residual_ok(coeffs: &[Complex64], z: Complex64, tol: f64) -> bool {
    let (p, _) = horner(coeffs, z);
    p.norm() <= tol * magnitude(coeffs, z).max(f64::MIN_POSITIVE)
}

fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        return [Complex64::new(0.0, 0.0); 2];
    }
    [q / a, c / q]
}

/// All roots of the polynomial with coefficients `coeffs` (lowest degree
/// first, nonzero leading coefficient), each accurate to relative residual
/// `tol`. Returns `None` when the iteration does not converge.
pub fn roots(coeffs: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    match n {
        0 => return Some(Vec::new()),
        1 => return Some(vec![-coeffs[0] / coeffs[1]]),
        2 => {
            let r = quadratic(coeffs[2], coeffs[1], coeffs[0]);
            return r.iter().all(|z| z.is_finite()).then(|| r.to_vec());
        }
        _ => {}
    }
    let lead = coeffs[n].norm();
    let low = coeffs[0].norm();
    let radius = if low > 0.0 {
        (low / lead).powf(1.0 / n as f64)
    } else {
        1.0 + coeffs[..n].iter().map(|c| c.norm() / lead).fold(0.0, f64::max)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut largest = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !w.is_finite() {
                continue;
            }
            z[k] -= w;
            largest = largest.max(w.norm() / z[k].norm().max(1.0));
        }
        if largest < 1e-15 {
            break;
        }
    }
    let ok = z
        .iter()
        .all(|&r| r.is_finite() && residual_ok(coeffs, r, tol.max(1e-10)));
    ok.then_some(z)
}
