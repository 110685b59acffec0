//! Double-double real arithmetic: an unevaluated sum of two binary64 values
//! carrying roughly 106 significand bits.
//!
//! Representation is normalized: `lo` is at most half an ulp of `hi`. Sums and
//! products use the standard error-free transformations; transcendentals
//! follow the usual reduce/Taylor/rebuild constructions with the reductions
//! done in double-double so the constructions stay accurate to a few ulp.

use std::fmt;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    (s, (a - (s - v)) + (b - v))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = 134217729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    // Splitting overflows past 2^996; fall back to a fused multiply-add
    // there, which computes the residual exactly.
    if a.abs() > 6.69e299 || b.abs() > 6.69e299 {
        return (p, a.mul_add(b, -p));
    }
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const LN2: Self = Self {
        hi: 0.693_147_180_559_945_3,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const PI: Self = Self {
        hi: 3.141_592_653_589_793,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const FRAC_PI_2: Self = Self {
        hi: 1.570_796_326_794_896_6,
        lo: 6.123_233_995_736_766e-17,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    fn nan() -> Self {
        Self {
            hi: f64::NAN,
            lo: f64::NAN,
        }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Self { hi, lo }
    }

    /// Exact scaling by a power of two.
    #[inline]
    pub fn mul_pow2(self, p: f64) -> Self {
        Self {
            hi: self.hi * p,
            lo: self.lo * p,
        }
    }

    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        if self.hi < 0.0 {
            return Self::nan();
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let (sq_hi, sq_lo) = two_prod(ax, ax);
        let r = self - Self { hi: sq_hi, lo: sq_lo };
        let (hi, lo) = quick_two_sum(ax, r.hi * (x * 0.5));
        Self { hi, lo }
    }

    pub fn exp(self) -> Self {
        if self.hi >= 709.8 {
            return Self {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi <= -745.2 {
            return Self::ZERO;
        }
        let m = (self.hi / Self::LN2.hi).round();
        let r = (self - Self::LN2.mul_f64(m)).mul_pow2(1.0 / 512.0);
        // expm1 of the reduced argument, |r| <= ln2/1024
        let mut term = r;
        let mut s = r;
        let mut k = 2.0;
        while term.hi.abs() > 1e-38 && k < 24.0 {
            term = term * r / Self::from_f64(k);
            s = s + term;
            k += 1.0;
        }
        // undo the 2^-9 scaling through e^(2x)-1 = (e^x-1)^2 + 2(e^x-1)
        for _ in 0..9 {
            s = s * s + s.mul_pow2(2.0);
        }
        (s + Self::ONE).mul_pow2(pow2(m as i32))
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::nan();
        }
        let mut x = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp() - Self::ONE;
        }
        x
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self.hi / Self::FRAC_PI_2.hi).round();
        let r = self - Self::FRAC_PI_2.mul_f64(k);
        let (s, c) = (sin_taylor(r), cos_taylor(r));
        let q = (k as i64).rem_euclid(4);
        match q {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    pub fn hypot(x: Self, y: Self) -> Self {
        let ax = x.abs();
        let ay = y.abs();
        let m = ax.hi.max(ay.hi);
        if m == 0.0 {
            return Self::ZERO;
        }
        if !m.is_finite() {
            return Self {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        let scale = if m > 1e153 {
            2f64.powi(-540)
        } else if m < 1e-153 {
            2f64.powi(540)
        } else {
            1.0
        };
        let xs = ax.mul_pow2(scale);
        let ys = ay.mul_pow2(scale);
        (xs * xs + ys * ys).sqrt().mul_pow2(1.0 / scale)
    }

    /// Angle of the point (x, y), in (-pi, pi] up to the binary64 edge
    /// conventions of `f64::atan2`. A binary64 seed is refined by one
    /// rotation step, which leaves an error cubic in the seed's defect.
    pub fn atan2(y: Self, x: Self) -> Self {
        let th0 = y.to_f64().atan2(x.to_f64());
        let h = Self::hypot(x, y);
        if h.is_zero() || !h.is_finite() {
            return Self::from_f64(th0);
        }
        let u = x / h;
        let v = y / h;
        let (s0, c0) = Self::from_f64(th0).sin_cos();
        Self::from_f64(th0) + (v * c0 - u * s0)
    }

    /// Parses a decimal literal (optional sign, digits with at most one
    /// point, optional e-exponent) to the nearest double-double.
    pub fn from_decimal_str(text: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid decimal literal {text:?}"));
        let mut rest = text;
        let mut neg = false;
        if let Some(t) = rest.strip_prefix('-') {
            neg = true;
            rest = t;
        } else if let Some(t) = rest.strip_prefix('+') {
            rest = t;
        }
        let (mantissa, exp_part) = match rest.find(['e', 'E']) {
            Some(i) => (&rest[..i], Some(&rest[i + 1..])),
            None => (rest, None),
        };
        let exp10: i32 = match exp_part {
            Some(e) => e.parse().map_err(|_| bad())?,
            None => 0,
        };
        let mut acc = Self::ZERO;
        let mut frac_digits: i32 = 0;
        let mut seen_point = false;
        let mut seen_digit = false;
        for b in mantissa.bytes() {
            match b {
                b'0'..=b'9' => {
                    acc = acc.mul_f64(10.0) + Self::from_f64((b - b'0') as f64);
                    if seen_point {
                        frac_digits += 1;
                    }
                    seen_digit = true;
                }
                b'.' if !seen_point => seen_point = true,
                _ => return Err(bad()),
            }
        }
        if !seen_digit {
            return Err(bad());
        }
        let shift = exp10 - frac_digits;
        if shift.abs() > 340 {
            return Err(bad());
        }
        let v = scale10(acc, shift);
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(if neg { -v } else { v })
    }

    /// Scientific-notation rendering with 33 significant digits, enough to
    /// reconstruct the value exactly.
    pub fn to_decimal_string(self) -> String {
        if !self.is_finite() {
            return if self.hi.is_nan() {
                "nan".to_string()
            } else if self.hi > 0.0 {
                "inf".to_string()
            } else {
                "-inf".to_string()
            };
        }
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.hi < 0.0;
        let a = self.abs();
        let mut e10 = a.hi.log10().floor() as i32;
        let mut v = scale10(a, -e10);
        while v.hi >= 10.0 {
            v = v / Self::from_f64(10.0);
            e10 += 1;
        }
        while v.hi < 1.0 {
            v = v.mul_f64(10.0);
            e10 -= 1;
        }
        const NDIG: usize = 33;
        let mut digits = [0i32; NDIG + 1];
        for d in digits.iter_mut() {
            let q = v.hi.trunc();
            *d = q as i32;
            v = (v - Self::from_f64(q)).mul_f64(10.0);
        }
        for i in (1..=NDIG).rev() {
            if digits[i] < 0 {
                digits[i] += 10;
                digits[i - 1] -= 1;
            } else if digits[i] > 9 {
                digits[i] -= 10;
                digits[i - 1] += 1;
            }
        }
        if digits[NDIG] >= 5 {
            digits[NDIG - 1] += 1;
            for i in (1..NDIG).rev() {
                if digits[i] > 9 {
                    digits[i] -= 10;
                    digits[i - 1] += 1;
                }
            }
        }
        let mut ds: Vec<i32> = digits[..NDIG].to_vec();
        if ds[0] > 9 {
            ds[0] -= 10;
            ds.insert(0, 1);
            ds.pop();
            e10 += 1;
        } else if ds[0] == 0 {
            ds.remove(0);
            ds.push(0);
            e10 -= 1;
        }
        let mut out = String::with_capacity(NDIG + 8);
        if neg {
            out.push('-');
        }
        out.push((b'0' + ds[0] as u8) as char);
        out.push('.');
        for &d in &ds[1..] {
            out.push((b'0' + d as u8) as char);
        }
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
        out.push('e');
        out.push_str(&e10.to_string());
        out
    }
}

fn sin_taylor(r: Dd) -> Dd {
    if r.is_zero() {
        return Dd::ZERO;
    }
    let r2 = r * r;
    let mut term = r;
    let mut sum = r;
    let mut k = 1.0f64;
    while term.hi.abs() > 1e-35 && k < 26.0 {
        term = -(term * r2) / Dd::from_f64(2.0 * k * (2.0 * k + 1.0));
        sum = sum + term;
        k += 1.0;
    }
    sum
}

fn cos_taylor(r: Dd) -> Dd {
    let r2 = r * r;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut k = 1.0f64;
    while term.hi.abs() > 1e-35 && k < 26.0 {
        term = -(term * r2) / Dd::from_f64((2.0 * k - 1.0) * (2.0 * k));
        sum = sum + term;
        k += 1.0;
    }
    sum
}

fn pow2(p: i32) -> f64 {
    2f64.powi(p)
}

/// Multiplies by 10^k in two half-sized steps so the intermediate powers of
/// ten stay inside binary64 range for |k| up to 340.
fn scale10(v: Dd, k: i32) -> Dd {
    let h1 = k / 2;
    let h2 = k - h1;
    let step = |v: Dd, h: i32| {
        if h >= 0 {
            v * pow10(h as u32)
        } else {
            v / pow10((-h) as u32)
        }
    };
    step(step(v, h1), h2)
}

fn pow10(p: u32) -> Dd {
    let mut base = Dd::from_f64(10.0);
    let mut acc = Dd::ONE;
    let mut p = p;
    while p > 0 {
        if p & 1 == 1 {
            acc = acc * base;
        }
        p >>= 1;
        if p > 0 {
            base = base * base;
        }
    }
    acc
}

impl std::ops::Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * b.lo + self.lo * b.hi);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}
