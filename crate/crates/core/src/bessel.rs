//! Bessel functions J_n and modified Bessel functions K_n for the fiber
//! radial fields.
//!
//! J_n uses Miller's downward recurrence with the J_0 + 2*sum(J_2k) = 1
//! normalization; K_n integrates exp(-x cosh t) cosh(n t) with the
//! trapezoidal rule, which converges spectrally for this even, entire,
//! super-exponentially decaying integrand. Both cover the argument ranges
//! a guided-mode solver needs (n <= ~10, x up to ~60) at close to machine
//! precision.

/// Bessel function of the first kind J_n(x) for integer n >= 0 and x >= 0.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j requires x >= 0");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // Start the downward recurrence well above both n and x.
    let start = (x.ceil() as u32).max(n) + 16 + (40.0 * (n as f64 + 1.0)).sqrt() as u32;
    let m = (start + start % 2) as i64;

    let mut jp1 = 0.0f64; // J_{k+1}
    let mut jk = 1e-30f64; // J_k
    let mut result = if n as i64 >= m { 0.0 } else { f64::NAN };
    let mut norm = 0.0f64; // accumulates J_0 + 2*sum_{k even >0} J_k
    for k in (0..m).rev() {
        let jm1 = (2.0 * (k + 1) as f64 / x) * jk - jp1;
        jp1 = jk;
        jk = jm1;
        if k as u32 == n {
            result = jk;
        }
        if k % 2 == 0 {
            norm += if k == 0 { jk } else { 2.0 * jk };
        }
        // Rescale to avoid overflow for large orders.
        if jk.abs() > 1e250 {
            jk /= 1e250;
            jp1 /= 1e250;
            norm /= 1e250;
            if !result.is_nan() {
                result /= 1e250;
            }
        }
    }
    result / norm
}

/// Modified Bessel function of the second kind K_n(x) for integer n >= 0, x > 0.
pub fn bessel_k(n: u32, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k requires x > 0");
    if x > 700.0 {
        return 0.0; // underflows f64
    }
    // Integrand g(t) = exp(-x cosh t) cosh(n t) is negligible once
    // x cosh T - n T exceeds the f64 exponent range.
    let nf = n as f64;
    let mut t_max = 2.0f64;
    while x * t_max.cosh() - nf * t_max < 760.0 {
        t_max += 0.5;
    }
    let h = 0.02f64;
    let steps = (t_max / h).ceil() as usize;
    let mut sum = 0.5 * (-x).exp(); // g(0) / 2
    for k in 1..=steps {
        let t = k as f64 * h;
        let e = -x * t.cosh() + (nf * t).abs();
        // cosh(nt) = (e^{nt} + e^{-nt})/2 folded into the exponent to avoid overflow
        sum += 0.5 * (e.exp() + (-x * t.cosh() - nf * t).exp());
    }
    h * sum
}
