//! Reference computations that share no code with the library routes they check.

use std::f64::consts::PI;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-34 * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectrum of the concentration form of trigonometric polynomials of degree
/// `degree` on a union of disjoint arcs, from the Toeplitz matrix
/// `T_{jk} = (2π)^{-1} ∫_E e^{i(k-j)θ} dθ` embedded as a real matrix of twice
/// the size (each eigenvalue then appears twice).
pub fn toeplitz_arc_spectrum(arcs: &[(f64, f64)], degree: usize) -> Vec<f64> {
    let n = 2 * degree + 1;
    let moment = |s: i64| -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for &(a, b) in arcs {
            if s == 0 {
                re += b - a;
            } else {
                let s = s as f64;
                // ∫_a^b e^{isθ} dθ
                re += ((s * b).sin() - (s * a).sin()) / s;
                im += ((s * a).cos() - (s * b).cos()) / s;
            }
        }
        (re / (2.0 * PI), im / (2.0 * PI))
    };
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for j in 0..n {
        for k in 0..n {
            let (re, im) = moment(k as i64 - j as i64);
            big[j][k] = re;
            big[j + n][k + n] = re;
            big[j][k + n] = -im;
            big[j + n][k] = im;
        }
    }
    jacobi_eigenvalues(big).into_iter().step_by(2).collect()
}

/// Gauss–Legendre nodes and weights on `[a, b]` by Newton on the recurrence.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w));
    }
    out
}

fn factorial_ratio(hi: usize, lo: usize) -> f64 {
    (lo + 1..=hi).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// `P_ℓ^m(x) / (1 - x^2)^{m/2}` from the explicit Rodrigues sum, normalized so
/// that `∫_{-1}^{1} (P_ℓ^m)^2 dx = 1`.
fn legendre_poly_part(ell: usize, m: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=ell / 2 {
        let power = ell - 2 * k;
        if power < m {
            break;
        }
        let c = binomial(ell, k) * binomial(2 * ell - 2 * k, ell) * factorial_ratio(power, power - m);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * c * x.powi((power - m) as i32);
    }
    let raw = sum / 2f64.powi(ell as i32);
    let norm_sq = 2.0 / (2.0 * ell as f64 + 1.0) * factorial_ratio(ell + m, ell - m);
    raw / norm_sq.sqrt()
}

/// Spectrum of the concentration form of `Π_L` on the cap `{θ <= radius}` of
/// `S^2`, assembled per azimuthal order with 1D Gauss–Legendre in `x = cos θ`.
pub fn axisymmetric_cap_spectrum(radius: f64, degree: usize) -> Vec<f64> {
    let nodes = gauss_legendre(degree + 2, radius.cos(), 1.0);
    let mut spectrum = Vec::with_capacity((degree + 1) * (degree + 1));
    for m in 0..=degree {
        let ells: Vec<usize> = (m..=degree).collect();
        let values: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&(x, _)| ells.iter().map(|&l| legendre_poly_part(l, m, x)).collect())
            .collect();
        let block: Vec<Vec<f64>> = (0..ells.len())
            .map(|i| {
                (0..ells.len())
                    .map(|j| {
                        nodes
                            .iter()
                            .zip(&values)
                            .map(|(&(x, w), v)| w * (1.0 - x * x).powi(m as i32) * v[i] * v[j])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let ev = jacobi_eigenvalues(block);
        let copies = if m == 0 { 1 } else { 2 };
        for e in ev {
            for _ in 0..copies {
                spectrum.push(e);
            }
        }
    }
    spectrum.sort_by(f64::total_cmp);
    spectrum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_on_known_matrix() {
        let ev = jacobi_eigenvalues(vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]]);
        let s = 2f64.sqrt();
        for (a, b) in ev.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        let rule = gauss_legendre(6, -1.0, 1.0);
        for k in 0..12 {
            let q: f64 = rule.iter().map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn full_circle_and_full_sphere_give_ones() {
        for e in toeplitz_arc_spectrum(&[(-PI, PI)], 5) {
            assert!((e - 1.0).abs() < 1e-13);
        }
        for e in axisymmetric_cap_spectrum(PI, 6) {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hemisphere_trace() {
        // Half of every zonal and tesseral function's mass pairs up: the trace is dim/2.
        let s = axisymmetric_cap_spectrum(PI / 2.0, 5);
        assert_eq!(s.len(), 36);
        assert!((s.iter().sum::<f64>() - 18.0).abs() < 1e-11);
    }
}
