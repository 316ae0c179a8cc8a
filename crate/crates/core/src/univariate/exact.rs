//! Exact rational polynomials for small oracle computations.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::poly::UniPoly;

#[derive(Debug, Clone, PartialEq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Exact conversion of each `f64` coefficient.
    pub fn from_f64(p: &UniPoly) -> Option<Self> {
        p.coeffs()
            .iter()
            .map(|&c| BigRational::from_float(c))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn to_f64(&self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn monic(&self) -> Self {
        let l = self.leading();
        Self::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::new(Vec::new()), self.clone());
        }
        let dd = d.degree();
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / &lead;
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &q * c;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    fn sturm(&self) -> Vec<Self> {
        let mut seq = vec![self.clone()];
        let mut cur = self.derivative();
        while !cur.is_zero() {
            let (_, r) = seq.last().unwrap().div_rem(&cur);
            seq.push(cur);
            cur = Self::new(r.coeffs.into_iter().map(|c| -c).collect());
        }
        seq
    }

    fn sign_at_infinity(&self, positive: bool) -> i32 {
        let s = self.leading().signum().to_i32().unwrap_or(0);
        if !positive && self.degree() % 2 == 1 {
            -s
        } else {
            s
        }
    }

    /// Number of distinct real roots.
    pub fn distinct_real_roots(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        let seq = self.sturm();
        let changes = |vals: Vec<i32>| {
            let nz: Vec<i32> = vals.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let neg = changes(seq.iter().map(|p| p.sign_at_infinity(false)).collect());
        let pos = changes(seq.iter().map(|p| p.sign_at_infinity(true)).collect());
        neg - pos
    }

    /// Real roots counted with multiplicity, via the square-free tower
    /// `p, gcd(p, p'), gcd(gcd(p,p'), ...)`.
    pub fn real_roots_with_multiplicity(&self) -> usize {
        let mut total = 0;
        let mut cur = self.clone();
        while !cur.is_zero() && cur.degree() > 0 {
            total += cur.distinct_real_roots();
            cur = cur.gcd(&cur.derivative());
        }
        total
    }

    pub fn is_real_rooted(&self) -> bool {
        !self.is_zero() && self.real_roots_with_multiplicity() == self.degree()
    }

    /// Distinct real roots as disjoint rational intervals `[lo, hi]` of width at most `width`,
    /// in increasing order; each interval contains exactly one root.
    pub fn isolate(&self, width: &BigRational) -> Vec<(BigRational, BigRational)> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        let sf = {
            let g = self.gcd(&self.derivative());
            if g.degree() == 0 {
                self.clone()
            } else {
                self.div_rem(&g).0
            }
        };
        let seq = sf.sturm();
        let changes = |x: &BigRational| {
            let nz: Vec<bool> = seq
                .iter()
                .map(|p| p.eval(x))
                .filter(|v| !v.is_zero())
                .map(|v| v.is_negative())
                .collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let bound = BigRational::one()
            + sf.coeffs[..sf.degree()]
                .iter()
                .map(|c| (c / sf.leading()).abs())
                .fold(BigRational::zero(), |m, c| if c > m { c } else { m });
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound)];
        let two = BigRational::from_integer(BigInt::from(2));
        while let Some((a, b)) = stack.pop() {
            let n = changes(&a) - changes(&b);
            if n == 0 {
                continue;
            }
            if n == 1 && &b - &a <= *width {
                out.push((a, b));
                continue;
            }
            let m = (&a + &b) / &two;
            stack.push((m.clone(), b));
            stack.push((a, m));
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicities() {
        // (x - 1)^2 (x + 2) = x^3 - 3x + 2
        let p = RationalPoly::from_ints(&[2, -3, 0, 1]);
        assert_eq!(p.distinct_real_roots(), 2);
        assert_eq!(p.real_roots_with_multiplicity(), 3);
        assert!(p.is_real_rooted());
        assert!(!RationalPoly::from_ints(&[1, 0, 1]).is_real_rooted());
    }

    #[test]
    fn isolating_intervals() {
        let p = RationalPoly::from_ints(&[2, -3, 0, 1]);
        let w = BigRational::new(BigInt::from(1), BigInt::from(1 << 20));
        let iv = p.isolate(&w);
        assert_eq!(iv.len(), 2);
        let mid = |(a, b): &(BigRational, BigRational)| ((a + b) / BigRational::from_integer(2.into())).to_f64().unwrap();
        assert!((mid(&iv[0]) + 2.0).abs() < 1e-5);
        assert!((mid(&iv[1]) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn exact_conversion_from_floats() {
        let p = UniPoly::new(vec![0.0, -1.0, 1.0]);
        let e = RationalPoly::from_f64(&p).unwrap();
        assert!(e.is_real_rooted());
        assert_eq!(e.to_f64(), p);
    }
}
