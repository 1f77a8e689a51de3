//! Bessel functions, Jacobi–Anger coefficients and Chebyshev evaluation.

/// `J_0(x) … J_{n_max}(x)` by downward recurrence normalized with
/// `J_0 + 2Σ J_{2k} = 1`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = n_max.max(ax.ceil() as usize);
    let mut start = top + 30 + (40.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut j_next = 0.0_f64;
    let mut j_cur = 1e-30_f64;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        // j_cur holds J_k; step to J_{k−1}.
        let j_prev = 2.0 * k as f64 / ax * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = k - 1;
        if idx <= n_max {
            out[idx] = j_cur;
        }
        if idx % 2 == 0 {
            norm += if idx == 0 { j_cur } else { 2.0 * j_cur };
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    out.iter_mut().for_each(|v| *v /= norm);
    if x < 0.0 {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Chebyshev coefficients `c_0..c_degree` of `cos(τx)/2`.
pub fn cos_half_coefficients(tau: f64, degree: usize) -> Vec<f64> {
    let j = bessel_j_all(degree, tau);
    (0..=degree)
        .map(|n| match n {
            0 => 0.5 * j[0],
            n if n % 2 == 0 => sign(n / 2) * j[n],
            _ => 0.0,
        })
        .collect()
}

/// Chebyshev coefficients `c_0..c_degree` of `sin(τx)/2`.
pub fn sin_half_coefficients(tau: f64, degree: usize) -> Vec<f64> {
    let j = bessel_j_all(degree, tau);
    (0..=degree).map(|n| if n % 2 == 1 { sign(n / 2) * j[n] } else { 0.0 }).collect()
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `Σ c_n T_n(x)` by Clenshaw recurrence.
pub fn evaluate(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}
