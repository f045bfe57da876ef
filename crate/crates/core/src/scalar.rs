//! The scalar field tag and a tagged scalar value.

use std::fmt;

use num_complex::Complex64;

/// Which field a container's entries live in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "real"),
            Field::Complex => write!(f, "complex"),
        }
    }
}

/// A scalar tagged with its field.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Scalar {
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Real(_) => Field::Real,
            Scalar::Complex(_) => Field::Complex,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Scalar::Real(x) => Complex64::new(x, 0.0),
            Scalar::Complex(z) => z,
        }
    }

    pub fn abs(&self) -> f64 {
        match *self {
            Scalar::Real(x) => x.abs(),
            Scalar::Complex(z) => z.norm(),
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex(z)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Scalar::Real(x) => write!(f, "{x}"),
            Scalar::Complex(z) => {
                if z.im >= 0.0 {
                    write!(f, "{}+{}i", z.re, z.im)
                } else {
                    write!(f, "{}{}i", z.re, z.im)
                }
            }
        }
    }
}
