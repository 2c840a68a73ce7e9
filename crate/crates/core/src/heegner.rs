//! Reduced binary quadratic forms, Heegner points, class numbers and the
//! Eisenstein–Heegner spectral coefficients θE_s.

use crate::specialfns::{dirichlet_l, is_fundamental, riemann_zeta};
use crate::{Error, Result, UpperHalfPoint};
use num_complex::Complex64;
use serde::Serialize;

/// A negative fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d < 0 && is_fundamental(d) {
            Ok(Self(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// Number of units w(d) of the imaginary quadratic order.
    pub fn units(self) -> u32 {
        match self.0 {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }
}

/// A reduced positive-definite form Ax² + Bxy + Cy².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Root z = (−B + i√|d|)/(2A).
    pub fn heegner_point(&self) -> UpperHalfPoint {
        let d = self.discriminant();
        let two_a = 2.0 * self.a as f64;
        UpperHalfPoint {
            x: -(self.b as f64) / two_a,
            y: ((-d) as f64).sqrt() / two_a,
        }
    }
}

/// All reduced forms of discriminant d, ordered by A then B.
///
/// On the boundary (|B| = A or A = C) the representative with B ≥ 0 is kept,
/// except for d = −3 where (1, −1, 1) is used.
pub fn reduced_forms(d: FundamentalDiscriminant) -> Vec<ReducedForm> {
    let d = d.get();
    let a_max = ((-d) as f64 / 3.0).sqrt().floor() as i64;
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in -a..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            let boundary = b.abs() == a || a == c;
            if boundary && b != 0 {
                let keep_negative = d == -3;
                if (b < 0) != keep_negative {
                    continue;
                }
            }
            out.push(ReducedForm { a, b, c });
        }
    }
    out
}

/// Reduced forms, Heegner points and class number of one discriminant.
#[derive(Debug, Clone, PartialEq)]
pub struct HeegnerSet {
    pub d: FundamentalDiscriminant,
    pub forms: Vec<ReducedForm>,
    pub points: Vec<UpperHalfPoint>,
    pub h: usize,
}

/// JSON shape `{"d", "h", "forms": [[A,B,C]], "points": [[x,y]]}`.
#[derive(Debug, Clone, Serialize)]
pub struct HeegnerSetRecord {
    pub d: i64,
    pub h: usize,
    pub forms: Vec<[i64; 3]>,
    pub points: Vec<[f64; 2]>,
}

impl HeegnerSet {
    pub fn record(&self) -> HeegnerSetRecord {
        HeegnerSetRecord {
            d: self.d.get(),
            h: self.h,
            forms: self.forms.iter().map(|f| [f.a, f.b, f.c]).collect(),
            points: self.points.iter().map(|p| [p.x, p.y]).collect(),
        }
    }

    pub fn max_height(&self) -> f64 {
        self.points.iter().map(|p| p.y).fold(0.0, f64::max)
    }
}

pub fn heegner_set(d: FundamentalDiscriminant) -> HeegnerSet {
    let forms = reduced_forms(d);
    let points = forms.iter().map(ReducedForm::heegner_point).collect();
    HeegnerSet {
        d,
        h: forms.len(),
        forms,
        points,
    }
}

/// Class number h(d) by enumeration of reduced forms.
pub fn class_number(d: FundamentalDiscriminant) -> usize {
    reduced_forms(d).len()
}

/// Real-weighted combination θ = Σ ν_d θ_d of Eisenstein–Heegner distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCombination {
    terms: Vec<(HeegnerSet, f64)>,
    unit_correction: bool,
}

impl ThetaCombination {
    /// Default mode: d < −4. Repeated discriminants are merged.
    pub fn new(terms: &[(i64, f64)]) -> Result<Self> {
        Self::build(terms, false)
    }

    /// Also admits d ∈ {−3, −4}; their coefficients carry the factor w(d)/2.
    pub fn with_unit_correction(terms: &[(i64, f64)]) -> Result<Self> {
        Self::build(terms, true)
    }

    pub fn single(d: i64) -> Result<Self> {
        Self::new(&[(d, 1.0)])
    }

    fn build(terms: &[(i64, f64)], unit_correction: bool) -> Result<Self> {
        let mut out: Vec<(HeegnerSet, f64)> = Vec::with_capacity(terms.len());
        for &(d, nu) in terms {
            let fd = FundamentalDiscriminant::new(d)?;
            if !unit_correction && d >= -4 {
                return Err(Error::UnitCorrection(d));
            }
            if !nu.is_finite() {
                return Err(Error::Domain(format!("weight for d = {d} is not finite")));
            }
            // repeated discriminants are merged so that the stored d stay distinct
            if let Some(slot) = out.iter_mut().find(|(h, _)| h.d == fd) {
                slot.1 += nu;
            } else {
                out.push((heegner_set(fd), nu));
            }
        }
        Ok(Self {
            terms: out,
            unit_correction,
        })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HeegnerSet, f64)> {
        self.terms.iter().map(|(h, nu)| (h, *nu))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn unit_correction(&self) -> bool {
        self.unit_correction
    }

    /// Heegner points with their weights.
    pub fn weighted_points(&self) -> Vec<(UpperHalfPoint, f64)> {
        self.terms
            .iter()
            .flat_map(|(h, nu)| h.points.iter().map(move |p| (*p, *nu)))
            .collect()
    }

    /// Highest Heegner point among terms with nonzero weight.
    pub fn max_height(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(_, nu)| *nu != 0.0)
            .map(|(h, _)| h.max_height())
            .fold(0.0, f64::max)
    }

    /// (d, ν) pairs in input order.
    pub fn spec(&self) -> Vec<(i64, f64)> {
        self.terms.iter().map(|(h, nu)| (h.d.get(), *nu)).collect()
    }
}

fn unit_factor(d: FundamentalDiscriminant) -> f64 {
    d.units() as f64 / 2.0
}

/// θE_s = Σ ν_d (w(d)/2)(√|d|/2)^s ζ(s) L(s,χ_d)/ζ(2s).
pub fn theta_coefficient(theta: &ThetaCombination, s: Complex64) -> Result<Complex64> {
    if theta.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let common = riemann_zeta(s)? / riemann_zeta(s * 2.0)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (h, nu) in theta.terms() {
        if nu == 0.0 {
            continue;
        }
        let d = h.d.get();
        let scale = (s * (((-d) as f64).sqrt() / 2.0).ln()).exp();
        acc += scale * dirichlet_l(s, d)? * (nu * unit_factor(h.d));
    }
    Ok(acc * common)
}

/// θ(1) = Σ ν_d h(d).
pub fn theta_one(theta: &ThetaCombination) -> f64 {
    theta.terms().map(|(h, nu)| nu * h.h as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fd(d: i64) -> FundamentalDiscriminant {
        FundamentalDiscriminant::new(d).unwrap()
    }

    // Exhaustive scan over a box, independent of the enumeration bound.
    fn brute_reduced(d: i64) -> Vec<ReducedForm> {
        let lim = -d;
        let mut v = Vec::new();
        for a in 1..=lim {
            for b in -a..=a {
                for c in a..=lim {
                    if b * b - 4 * a * c != d {
                        continue;
                    }
                    let boundary = b.abs() == a || a == c;
                    if boundary && b < 0 && d != -3 {
                        continue;
                    }
                    if boundary && b > 0 && d == -3 {
                        continue;
                    }
                    v.push(ReducedForm { a, b, c });
                }
            }
        }
        v
    }

    #[test]
    fn forms_for_small_discriminants() {
        assert_eq!(reduced_forms(fd(-3)), vec![ReducedForm { a: 1, b: -1, c: 1 }]);
        assert_eq!(reduced_forms(fd(-4)), vec![ReducedForm { a: 1, b: 0, c: 1 }]);
        assert_eq!(
            reduced_forms(fd(-20)),
            vec![ReducedForm { a: 1, b: 0, c: 5 }, ReducedForm { a: 2, b: 2, c: 3 }]
        );
        for d in [-7, -15, -20, -23, -24, -39, -47, -56, -71, -84, -95, -104] {
            assert_eq!(reduced_forms(fd(d)), brute_reduced(d), "d={d}");
        }
    }

    #[test]
    fn heegner_points() {
        let s = heegner_set(fd(-4));
        assert_eq!(s.h, 1);
        assert_eq!(s.points[0], UpperHalfPoint { x: 0.0, y: 1.0 });
        let s = heegner_set(fd(-3));
        assert!((s.points[0].x - 0.5).abs() < 1e-15);
        assert!((s.points[0].y - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(heegner_set(fd(-23)).h, 3);
        assert!(FundamentalDiscriminant::new(-12).is_err());
        assert!(FundamentalDiscriminant::new(5).is_err());
    }

    #[test]
    fn enumeration_invariants() {
        for d in -500..0 {
            let Ok(d) = FundamentalDiscriminant::new(d) else {
                continue;
            };
            let set = heegner_set(d);
            assert_eq!(set.forms.len(), set.points.len());
            for f in &set.forms {
                assert_eq!(f.discriminant(), d.get());
                assert!((f.a as f64) <= ((-d.get()) as f64 / 3.0).sqrt());
            }
            for (i, p) in set.points.iter().enumerate() {
                assert!(p.in_fundamental_domain(), "{p:?} for {}", d.get());
                for q in &set.points[..i] {
                    assert!((p.x - q.x).abs() + (p.y - q.y).abs() > 1e-12);
                }
            }
        }
    }

    #[test]
    fn class_number_formula() {
        for d in [-3, -4, -7, -8, -15, -20, -23, -47, -71, -104, -163, -191] {
            let d = fd(d);
            let l1 = dirichlet_l(Complex64::new(1.0, 0.0), d.get()).unwrap().re;
            let h = d.units() as f64 * ((-d.get()) as f64).sqrt() * l1 / (2.0 * PI);
            assert!((h - class_number(d) as f64).abs() < 1e-6, "d={}: {h}", d.get());
        }
    }

    #[test]
    fn theta_one_values() {
        assert_eq!(theta_one(&ThetaCombination::single(-23).unwrap()), 3.0);
        assert_eq!(theta_one(&ThetaCombination::new(&[(-7, 2.0)]).unwrap()), 2.0);
        let cancelled = ThetaCombination::new(&[(-7, 1.0), (-7, -1.0)]).unwrap();
        assert_eq!(theta_one(&cancelled), 0.0);
        assert_eq!(cancelled.spec(), vec![(-7, 0.0)]);
        assert_eq!(
            theta_one(&ThetaCombination::new(&[(-7, 1.0), (-8, -1.0)]).unwrap()),
            0.0
        );
    }

    #[test]
    fn default_mode_rejects_small_discriminants() {
        assert_eq!(ThetaCombination::single(-4), Err(Error::UnitCorrection(-4)));
        assert!(ThetaCombination::with_unit_correction(&[(-4, 1.0)]).is_ok());
    }

    #[test]
    fn theta_coefficient_values() {
        let th = ThetaCombination::single(-7).unwrap();
        let v = theta_coefficient(&th, Complex64::new(2.5, 0.0)).unwrap();
        assert!((v.re - 2.9197594192309539627).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
        let empty = ThetaCombination::new(&[]).unwrap();
        assert_eq!(
            theta_coefficient(&empty, Complex64::new(0.5, 3.0)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }
}
