//! Complex numbers with double-double components.

use std::fmt;

use num_complex::Complex64;

use super::dd::Dd;
use super::{split_literal, ComplexScalar, PrecisionProfile};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedComplex {
    pub re: Dd,
    pub im: Dd,
}

impl ExtendedComplex {
    pub fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    /// Embeds a binary64 complex value exactly.
    pub fn from_c64(z: Complex64) -> Self {
        Self {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    /// Rounds both components to binary64.
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn abs_dd(self) -> Dd {
        Dd::hypot(self.re, self.im)
    }
}

impl std::ops::Add for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        Self {
            re: self.re + b.re,
            im: self.im + b.im,
        }
    }
}

impl std::ops::Sub for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        Self {
            re: self.re - b.re,
            im: self.im - b.im,
        }
    }
}

impl std::ops::Neg for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl std::ops::Mul for ExtendedComplex {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        Self {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

impl std::ops::Div for ExtendedComplex {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        // Smith's scheme keeps intermediates in range.
        if b.re.abs().hi >= b.im.abs().hi {
            let r = b.im / b.re;
            let den = b.re + b.im * r;
            Self {
                re: (self.re + self.im * r) / den,
                im: (self.im - self.re * r) / den,
            }
        } else {
            let r = b.re / b.im;
            let den = b.re * r + b.im;
            Self {
                re: (self.re * r + self.im) / den,
                im: (self.im * r - self.re) / den,
            }
        }
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}

impl ComplexScalar for ExtendedComplex {
    const PROFILE: PrecisionProfile = PrecisionProfile::EXTENDED;

    fn zero() -> Self {
        Self {
            re: Dd::ZERO,
            im: Dd::ZERO,
        }
    }

    fn one() -> Self {
        Self {
            re: Dd::ONE,
            im: Dd::ZERO,
        }
    }

    fn from_f64(x: f64) -> Self {
        Self {
            re: Dd::from_f64(x),
            im: Dd::ZERO,
        }
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Self {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    fn re_f64(self) -> f64 {
        self.re.to_f64()
    }

    fn im_f64(self) -> f64 {
        self.im.to_f64()
    }

    fn abs(self) -> f64 {
        self.abs_dd().to_f64()
    }

    fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    fn ln(self) -> Self {
        Self {
            re: self.abs_dd().ln(),
            im: Dd::atan2(self.im, self.re),
        }
    }

    fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Self {
            re: m * c,
            im: m * s,
        }
    }

    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn parse(text: &str) -> Result<Self, Error> {
        let (re_txt, im_txt) = split_literal(text)?;
        let re = Dd::from_decimal_str(re_txt)?;
        let im = match im_txt {
            Some(t) => Dd::from_decimal_str(t)?,
            None => Dd::ZERO,
        };
        Ok(Self { re, im })
    }

    fn format_full(self) -> String {
        let re = self.re.to_decimal_string();
        let im = self.im.to_decimal_string();
        if im.starts_with('-') {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }
}
