//! Lag-polynomial utilities: admissibility tests, root finding and
//! psi-weight expansion.
//!
//! AR coefficients describe `1 - φ_1 B - … - φ_p B^p`; MA coefficients
//! describe `1 + θ_1 B + … + θ_q B^q`.

use num_complex::Complex64;

/// Every admissible root must satisfy `|z| > 1 + ROOT_MARGIN`.
pub const ROOT_MARGIN: f64 = 1e-6;

/// Largest reflection coefficient magnitude of `1 - Σ a_i B^i` after scaling
/// the lag by `1 + ROOT_MARGIN`. All roots lie outside the margin circle iff
/// the result is below 1.
///
/// Uses the Schur–Cohn step-down (reverse Levinson–Durbin) recursion, which
/// needs no root finding.
pub fn max_reflection(a: &[f64]) -> f64 {
    max_reflection_at(a, 1.0 + ROOT_MARGIN)
}

/// As [`max_reflection`], testing against the circle of the given radius.
pub fn max_reflection_at(a: &[f64], r: f64) -> f64 {
    let mut cur: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(i, c)| c * r.powi(i as i32 + 1))
        .collect();
    while cur.last() == Some(&0.0) {
        cur.pop();
    }
    let mut worst: f64 = 0.0;
    while let Some(&k) = cur.last() {
        worst = worst.max(k.abs());
        if k.abs() >= 1.0 || !k.is_finite() {
            return worst.max(1.0);
        }
        let m = cur.len();
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..m - 1)
            .map(|j| (cur[j] + k * cur[m - 2 - j]) / denom)
            .collect();
        cur = next;
    }
    worst
}

pub fn ar_is_stationary(ar: &[f64]) -> bool {
    max_reflection(ar) < 1.0
}

pub fn ma_is_invertible(ma: &[f64]) -> bool {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    max_reflection(&neg) < 1.0
}

/// All AR and MA roots lie outside the circle of radius `r`.
pub fn roots_outside(ar: &[f64], ma: &[f64], r: f64) -> bool {
    let neg: Vec<f64> = ma.iter().map(|t| -t).collect();
    max_reflection_at(ar, r) < 1.0 && max_reflection_at(&neg, r) < 1.0
}

/// Roots of `1 + c_1 z + … + c_m z^m` (trailing zero coefficients dropped).
///
/// Durand–Kerner iteration on the reversed monic polynomial, whose roots are
/// the reciprocals of the requested ones.
pub fn lag_polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let m = c.len();
    if m == 0 {
        return Vec::new();
    }
    // reversed monic polynomial: λ^m + c_1 λ^{m-1} + … + c_m
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for &ci in &c {
            acc = acc * x + ci;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let radius = 1.0 + c.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut lambdas: Vec<Complex64> = (0..m).map(|i| seed.powu(i as u32) * radius * 0.5).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..m {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..m {
                if i != j {
                    denom *= lambdas[i] - lambdas[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let step = eval(lambdas[i]) / denom;
            lambdas[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    lambdas
        .into_iter()
        .map(|l| {
            if l.norm() == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                l.inv()
            }
        })
        .collect()
}

/// Smallest root modulus of the AR polynomial `1 - Σ φ_i z^i` (`inf` if constant).
pub fn min_ar_root_modulus(ar: &[f64]) -> f64 {
    let neg: Vec<f64> = ar.iter().map(|p| -p).collect();
    lag_polynomial_roots(&neg)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

/// Smallest root modulus of the MA polynomial `1 + Σ θ_j z^j` (`inf` if constant).
pub fn min_ma_root_modulus(ma: &[f64]) -> f64 {
    lag_polynomial_roots(ma)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

/// AR coefficients of `φ(B)(1 - B)^d`, in the same `1 - Σ a_i B^i` convention.
pub fn integrated_ar(ar: &[f64], d: usize) -> Vec<f64> {
    // full polynomial coefficients starting at B^0
    let mut poly: Vec<f64> = std::iter::once(1.0).chain(ar.iter().map(|a| -a)).collect();
    for _ in 0..d {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c).collect()
}

/// First `n` weights of `θ(B) / φ(B)`, starting with `ψ_0 = 1`.
pub fn psi_weights(ar: &[f64], ma: &[f64], n: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n);
    for j in 0..n {
        if j == 0 {
            psi.push(1.0);
            continue;
        }
        let mut v = ma.get(j - 1).copied().unwrap_or(0.0);
        for (i, a) in ar.iter().enumerate().take(j) {
            v += a * psi[j - 1 - i];
        }
        psi.push(v);
    }
    psi
}
