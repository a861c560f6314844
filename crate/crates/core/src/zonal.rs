//! Extended-precision `λ_min` for sets of `S^2` invariant under rotations
//! about an axis.
//!
//! For such a set the concentration form splits over the azimuthal order `m`.
//! In `x = ⟨u, pole⟩` block `m` is the pencil of moment matrices
//! `A_{ij} = ∫_E x^{i+j} (1-x^2)^m dx`, `B_{ij} = ∫_{-1}^{1} x^{i+j} (1-x^2)^m dx`,
//! `0 <= i, j <= L - m`. Its smallest eigenvalue is located by bisection on the
//! number of negative pivots of `A - λB`, carried out in binary floating point
//! with a few thousand bits, which resolves values far below `f64::EPSILON`.

use std::f64::consts::PI;

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpherePoint;
use crate::sets::SetSpec;

type F = FBig<HalfEven>;

/// A set `{u : ⟨u, pole⟩ ∈ ∪ [a_i, b_i]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalSet {
    pub pole: SpherePoint,
    /// Disjoint sorted intervals of `[-1, 1]` in `x = ⟨u, pole⟩`.
    pub intervals: Vec<(f64, f64)>,
}

impl ZonalSet {
    /// Recognizes full, empty, single-cap, band and complement sets.
    pub fn from_spec(set: &SetSpec) -> Option<Self> {
        match set {
            SetSpec::Full => Some(Self { pole: SpherePoint::north(2), intervals: vec![(-1.0, 1.0)] }),
            SetSpec::Empty => Some(Self { pole: SpherePoint::north(2), intervals: vec![] }),
            SetSpec::CapUnion { caps } if caps.is_empty() => {
                Some(Self { pole: SpherePoint::north(2), intervals: vec![] })
            }
            SetSpec::CapUnion { caps } if caps.len() == 1 => {
                let c = &caps[0];
                let lo = if c.radius >= PI { -1.0 } else { c.radius.cos() };
                Some(Self { pole: c.center.clone(), intervals: vec![(lo, 1.0)] })
            }
            SetSpec::Band { pole, inner, outer } => {
                Some(Self { pole: pole.clone(), intervals: vec![(outer.cos(), inner.cos())] })
            }
            SetSpec::Complement { of } => {
                let inner = Self::from_spec(of)?;
                let mut out = Vec::new();
                let mut start = -1.0;
                for &(a, b) in &inner.intervals {
                    if a > start {
                        out.push((start, a));
                    }
                    start = b;
                }
                if start < 1.0 {
                    out.push((start, 1.0));
                }
                Some(Self { pole: inner.pole, intervals: out })
            }
            _ => None,
        }
    }
}

/// Result of [`lambda_min_zonal`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalReport {
    pub lambda_min: f64,
    /// Azimuthal order attaining the minimum.
    pub order: usize,
    /// `floor(log2 λ_m)` for each order `m = 0..=L` (`None` when below the floor).
    pub block_exponents: Vec<Option<i64>>,
    pub bits: usize,
    /// False when `λ_min` lies below `2^-floor_exponent` and only that bound is known.
    pub resolved: bool,
    pub floor_exponent: i64,
}

/// Working precision used by [`lambda_min_zonal`] at degree `L`.
pub fn default_bits(degree: usize) -> usize {
    512 + 48 * degree
}

/// Smallest eigenvalue of the concentration pencil of a zonal set on `S^2`.
pub fn lambda_min_zonal(d: usize, degree: usize, set: &ZonalSet) -> Result<ZonalReport> {
    lambda_min_zonal_with(d, degree, set, default_bits(degree))
}

pub fn lambda_min_zonal_with(d: usize, degree: usize, set: &ZonalSet, bits: usize) -> Result<ZonalReport> {
    if d != 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    for &(a, b) in &set.intervals {
        if !(-1.0..=1.0).contains(&a) || !(-1.0..=1.0).contains(&b) || a > b {
            return Err(Error::Domain(format!("invalid interval [{a}, {b}]")));
        }
    }
    let floor_exponent = (bits / 4) as i64;
    if set.intervals.iter().all(|(a, b)| a == b) {
        return Ok(ZonalReport {
            lambda_min: 0.0,
            order: 0,
            block_exponents: vec![None; degree + 1],
            bits,
            resolved: true,
            floor_exponent,
        });
    }
    let ctx = Ctx { bits };
    let top = 2 * degree + 1;
    let set_d = ctx.differences(&set.intervals, top);
    let full_d = ctx.differences(&[(-1.0, 1.0)], top);

    let blocks: Vec<Block> = (0..=degree)
        .into_par_iter()
        .map(|m| Block::new(&ctx, m, degree - m + 1, &set_d, &full_d))
        .collect();
    let exponents: Vec<Option<i64>> = blocks.par_iter().map(|b| b.exponent(&ctx, floor_exponent)).collect();

    // Below the floor no order is resolved.
    if exponents.iter().any(|e| e.is_none()) {
        let order = exponents.iter().position(|e| e.is_none()).unwrap_or(0);
        return Ok(ZonalReport {
            lambda_min: (-(floor_exponent as f64)).exp2(),
            order,
            block_exponents: exponents,
            bits,
            resolved: false,
            floor_exponent,
        });
    }
    let deepest = exponents.iter().flatten().copied().max().expect("at least one block");
    let (order, lambda_min) = blocks
        .par_iter()
        .enumerate()
        .filter(|(m, _)| exponents[*m] == Some(deepest))
        .map(|(m, b)| (m, b.refine(&ctx, deepest)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, f64::INFINITY), |acc, (m, v)| if v < acc.1 { (m, v) } else { acc });
    Ok(ZonalReport { lambda_min, order, block_exponents: exponents, bits, resolved: true, floor_exponent })
}

struct Ctx {
    bits: usize,
}

impl Ctx {
    fn num(&self, x: f64) -> F {
        F::try_from(x).expect("finite").with_precision(self.bits).value()
    }

    fn int(&self, k: u128) -> F {
        F::from(k).with_precision(self.bits).value()
    }

    /// `D[e] = Σ_i (b_i^e - a_i^e) / e` for `e = 1..=top` (index 0 unused).
    fn differences(&self, intervals: &[(f64, f64)], top: usize) -> Vec<F> {
        let mut out = vec![self.int(0); top + 1];
        for &(a, b) in intervals {
            let (a, b) = (self.num(a), self.num(b));
            let (mut pa, mut pb) = (a.clone(), b.clone());
            for (e, slot) in out.iter_mut().enumerate().skip(1) {
                *slot = &*slot + (&pb - &pa) / self.int(e as u128);
                pa = &pa * &a;
                pb = &pb * &b;
            }
        }
        out
    }
}

struct Block {
    n: usize,
    /// Hankel moments `∫ x^k (1-x^2)^m dx`, `k = 0..2n-1`.
    set: Vec<F>,
    full: Vec<F>,
}

impl Block {
    fn new(ctx: &Ctx, m: usize, n: usize, set_d: &[F], full_d: &[F]) -> Self {
        let binom: Vec<u128> = binomials(m);
        let moments = |dd: &[F]| -> Vec<F> {
            (0..2 * n - 1)
                .map(|k| {
                    let mut s = ctx.int(0);
                    for (j, c) in binom.iter().enumerate() {
                        let term = &dd[k + 2 * j + 1] * ctx.int(*c);
                        s = if j % 2 == 0 { &s + &term } else { &s - &term };
                    }
                    s
                })
                .collect()
        };
        Self { n, set: moments(set_d), full: moments(full_d) }
    }

    /// Number of eigenvalues of the pencil below `lambda`, or `None` if a pivot vanishes.
    fn count_below(&self, lambda: &F) -> Option<usize> {
        let n = self.n;
        let hankel: Vec<F> = self.set.iter().zip(&self.full).map(|(a, b)| a - lambda * b).collect();
        let mut m: Vec<Vec<F>> = (0..n).map(|i| (0..n).map(|j| hankel[i + j].clone()).collect()).collect();
        let mut negatives = 0;
        for k in 0..n {
            let pivot = m[k][k].clone();
            if pivot == F::ZERO {
                return None;
            }
            if pivot < F::ZERO {
                negatives += 1;
            }
            for i in k + 1..n {
                let factor = &m[i][k] / &pivot;
                for j in i..n {
                    let v = &m[i][j] - &factor * &m[k][j];
                    m[i][j] = v;
                }
                for j in i + 1..n {
                    m[j][i] = m[i][j].clone();
                }
            }
        }
        Some(negatives)
    }

    fn count_at(&self, ctx: &Ctx, lambda: F) -> usize {
        let mut lambda = lambda;
        loop {
            if let Some(c) = self.count_below(&lambda) {
                return c;
            }
            lambda = &lambda + &lambda * (ctx.int(1) >> 40);
        }
    }

    fn pow2(ctx: &Ctx, k: i64) -> F {
        ctx.int(1) >> k as isize
    }

    /// `Some(k)` with `2^-k <= λ_m < 2^-k+1`, clamped at `k = 0` for `λ_m >= 1`;
    /// `None` when `λ_m < 2^-floor`.
    fn exponent(&self, ctx: &Ctx, floor: i64) -> Option<i64> {
        if self.count_at(ctx, Self::pow2(ctx, 0)) == 0 {
            return Some(0);
        }
        if self.count_at(ctx, Self::pow2(ctx, floor)) > 0 {
            return None;
        }
        // count(2^-lo) > 0, count(2^-hi) == 0.
        let (mut lo, mut hi) = (0i64, floor);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.count_at(ctx, Self::pow2(ctx, mid)) > 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }

    /// Bisection inside `[2^-k, 2^-k+1)` to double precision.
    fn refine(&self, ctx: &Ctx, k: i64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let mut lo = Self::pow2(ctx, k);
        let mut hi = Self::pow2(ctx, k - 1);
        for _ in 0..60 {
            let mid = (&lo + &hi) >> 1;
            if self.count_at(ctx, mid.clone()) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ((&lo + &hi) >> 1).to_f64().value()
    }
}

fn binomials(m: usize) -> Vec<u128> {
    let mut out = vec![1u128; m + 1];
    for j in 1..=m {
        out[j] = out[j - 1] * (m - j + 1) as u128 / j as u128;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Basis;
    use crate::concentration::lambda_min;
    use crate::measures::MeasureSpec;
    use crate::quadrature::cap_rule;

    #[test]
    fn full_and_empty() {
        let full = ZonalSet::from_spec(&SetSpec::Full).unwrap();
        let r = lambda_min_zonal(2, 6, &full).unwrap();
        assert_eq!(r.lambda_min, 1.0);
        let empty = ZonalSet::from_spec(&SetSpec::Empty).unwrap();
        assert_eq!(lambda_min_zonal(2, 6, &empty).unwrap().lambda_min, 0.0);
        assert_eq!(lambda_min_zonal(1, 6, &full).unwrap_err(), Error::UnsupportedDimension(1));
    }

    #[test]
    fn complement_intervals() {
        let cap = SetSpec::cap(SpherePoint::north(2), PI / 2.0).unwrap();
        let z = ZonalSet::from_spec(&cap.complement()).unwrap();
        assert_eq!(z.intervals.len(), 1);
        assert!((z.intervals[0].0 + 1.0).abs() < 1e-15 && z.intervals[0].1.abs() < 1e-15);
        let band = SetSpec::Band { pole: SpherePoint::north(2), inner: 0.5, outer: 1.0 };
        assert_eq!(ZonalSet::from_spec(&band.complement()).unwrap().intervals.len(), 2);
    }

    #[test]
    fn agrees_with_double_precision_where_resolvable() {
        for (radius, degree) in [(2.0, 6), (1.6, 4), (2.5, 10)] {
            let set = SetSpec::cap(SpherePoint::north(2), radius).unwrap();
            let basis = Basis::new(2, degree).unwrap();
            let rule = cap_rule(&SpherePoint::north(2), radius, 2 * degree, 1).unwrap();
            let double = lambda_min(&set, &MeasureSpec::Lebesgue, &basis, &rule).unwrap().lambda_min;
            let exact = lambda_min_zonal(2, degree, &ZonalSet::from_spec(&set).unwrap()).unwrap();
            assert!(exact.resolved);
            assert!(
                (double - exact.lambda_min).abs() <= 1e-12 + 1e-9 * double,
                "r={radius} L={degree}: {double} vs {}",
                exact.lambda_min
            );
        }
    }

    #[test]
    fn precision_independent() {
        let set = ZonalSet::from_spec(&SetSpec::cap(SpherePoint::north(2), PI / 3.0).unwrap()).unwrap();
        let a = lambda_min_zonal_with(2, 12, &set, default_bits(12)).unwrap();
        let b = lambda_min_zonal_with(2, 12, &set, 2 * default_bits(12)).unwrap();
        assert!(a.resolved && a.lambda_min < 1e-20);
        assert!((a.lambda_min - b.lambda_min).abs() <= 1e-12 * b.lambda_min);
    }

    #[test]
    fn monotone_in_the_set() {
        let small = ZonalSet::from_spec(&SetSpec::cap(SpherePoint::north(2), 1.5).unwrap()).unwrap();
        let large = ZonalSet::from_spec(&SetSpec::cap(SpherePoint::north(2), 2.0).unwrap()).unwrap();
        let a = lambda_min_zonal(2, 8, &small).unwrap().lambda_min;
        let b = lambda_min_zonal(2, 8, &large).unwrap().lambda_min;
        assert!(a < b);
    }
}
