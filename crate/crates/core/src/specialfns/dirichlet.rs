use super::zeta::{em_cutoff, em_tail};
use crate::{Error, Result};
use num_complex::Complex64;

fn squarefree(mut n: u64) -> bool {
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// Fundamental discriminant test (either sign, excluding 1).
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

fn jacobi(a: i64, n: i64) -> i32 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol (d/n) for a fundamental discriminant d.
pub fn kronecker_chi(d: i64, n: i64) -> Result<i32> {
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(kronecker_unchecked(d, n))
}

pub(crate) fn kronecker_unchecked(d: i64, n: i64) -> i32 {
    if n == 0 {
        return 0;
    }
    let mut out = if n < 0 && d < 0 { -1 } else { 1 };
    let mut m = n.abs();
    while m % 2 == 0 {
        m /= 2;
        out *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    if out == 0 {
        return 0;
    }
    out * jacobi(d, m)
}

/// L(s, χ_d) for a negative fundamental discriminant d.
///
/// The terms n ≤ |d|N are summed directly; the remainder splits into residue
/// classes mod |d|, each a Hurwitz tail handled by Euler–Maclaurin.
pub fn dirichlet_l(s: Complex64, d: i64) -> Result<Complex64> {
    if d >= 0 || !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    let q = d.unsigned_abs() as usize;
    let chi: Vec<i32> = (0..q as i64).map(|a| kronecker_unchecked(d, a)).collect();
    let n = em_cutoff(s.im);
    let mut head = Complex64::new(0.0, 0.0);
    for k in 1..=(q * n) {
        let c = chi[k % q];
        if c != 0 {
            let term = (-s * (k as f64).ln()).exp();
            if c > 0 {
                head += term;
            } else {
                head -= term;
            }
        }
    }
    let mut tail = Complex64::new(0.0, 0.0);
    for (a, &c) in chi.iter().enumerate().skip(1) {
        if c != 0 {
            let x0 = n as f64 + a as f64 / q as f64;
            tail += em_tail(s, x0, true) * c as f64;
        }
    }
    let qs = (-s * (q as f64).ln()).exp();
    Ok(head + qs * tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Euler's criterion over the prime factorisation of n, independent of the
    // reciprocity-based implementation.
    fn chi_by_euler(d: i64, n: i64) -> i32 {
        fn legendre(d: i64, p: i64) -> i32 {
            if p == 2 {
                return match d.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                };
            }
            let a = d.rem_euclid(p);
            if a == 0 {
                return 0;
            }
            let mut r = 1i64;
            let mut b = a;
            let mut e = (p - 1) / 2;
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            if r == 1 {
                1
            } else {
                -1
            }
        }
        let mut out = if n < 0 { -1 } else { 1 };
        let mut m = n.abs();
        let mut p = 2;
        while m > 1 {
            while m % p == 0 {
                out *= legendre(d, p);
                m /= p;
            }
            p += 1;
        }
        out
    }

    #[test]
    fn character_values() {
        assert_eq!(kronecker_chi(-4, 3).unwrap(), -1);
        assert_eq!(kronecker_chi(-3, 1).unwrap(), 1);
        assert_eq!(kronecker_chi(-4, 2).unwrap(), 0);
        assert!(kronecker_chi(-12, 5).is_err());
        for d in [-3, -4, -7, -8, -15, -20, -23, -24, -163, -184] {
            for n in -40..200 {
                if n == 0 {
                    continue;
                }
                assert_eq!(kronecker_chi(d, n).unwrap(), chi_by_euler(d, n), "d={d} n={n}");
            }
        }
    }

    #[test]
    fn fundamental_test() {
        let good = [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -39, -40, -84];
        let bad = [-1, -2, -9, -12, -16, -25, -27, -28, -32, -36];
        assert!(good.iter().all(|&d| is_fundamental(d)));
        assert!(bad.iter().all(|&d| !is_fundamental(d)));
    }

    #[test]
    fn l_at_one_is_leibniz() {
        let l = dirichlet_l(c(1.0, 0.0), -4).unwrap();
        assert!((l - c(PI / 4.0, 0.0)).norm() < 1e-13);
        let l7 = dirichlet_l(c(1.0, 0.0), -7).unwrap();
        assert!((l7.re - PI / 7f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn l_at_two_matches_direct_series() {
        // Σ_{n ≤ 10^7} χ_{−3}(n)/n², with the O(N^{−2}) remainder below 1e-14
        let mut direct = 0.0;
        for n in 1..=10_000_000i64 {
            match n % 3 {
                1 => direct += 1.0 / (n as f64 * n as f64),
                2 => direct -= 1.0 / (n as f64 * n as f64),
                _ => {}
            }
        }
        let l = dirichlet_l(c(2.0, 0.0), -3).unwrap();
        assert!((l.re - direct).abs() < 1e-12);
        assert!((l.re - 0.78130241289648629687).abs() < 1e-14);
    }

    #[test]
    fn matches_arbitrary_precision_values() {
        let cases = [
            (c(0.5, 6.0), -4, c(0.0041991347896544142393, -0.027035327279699961114)),
            (c(0.7, 150.0), -7, c(0.36520870748241439604, 0.62160961585293433457)),
            (c(2.5, 0.0), -7, c(1.1212732332060295127, 0.0)),
        ];
        for (s, d, want) in cases {
            let got = dirichlet_l(s, d).unwrap();
            assert!((got - want).norm() < 1e-10 * want.norm(), "{s} {d}: {got}");
        }
    }

    #[test]
    fn completed_functional_equation() {
        // Λ(s) = (q/π)^{s/2} Γ((s+1)/2) L(s,χ) satisfies Λ(s) = Λ(1−s) for odd χ with root number 1.
        use crate::specialfns::log_gamma;
        let q = 4.0f64;
        let lam = |s: Complex64| {
            let pre = s * 0.5 * (q / PI).ln() + log_gamma((s + 1.0) * 0.5).unwrap();
            pre.exp() * dirichlet_l(s, -4).unwrap()
        };
        let s = c(0.5, 6.0);
        let a = lam(s);
        let b = lam(1.0 - s);
        assert!((a - b).norm() < 1e-8);
    }
}
