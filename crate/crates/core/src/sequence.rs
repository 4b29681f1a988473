//! Nonnegative sequences indexed by the radius `r = 0, 1, 2, ...`.
//!
//! Every degree, sphere size and edge weight of a graph family is a
//! [`SequenceSpec`]. Count-valued roles are evaluated exactly as
//! [`BigUint`]; real-valued roles (path weights) as `f64`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, Pow, Zero};

use crate::error::Error;

/// How a non-integral closed form is turned into a count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
    #[default]
    Nearest,
}

impl Rounding {
    fn apply(self, x: f64) -> f64 {
        match self {
            Rounding::Floor => libm::floor(x),
            Rounding::Ceil => libm::ceil(x),
            Rounding::Nearest => libm::round(x),
        }
    }
}

/// A user-supplied closed form. Only usable through the library API.
#[derive(Clone)]
pub struct ClosedForm {
    pub name: String,
    f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl ClosedForm {
    pub fn new(name: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        ClosedForm {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, r: u64) -> f64 {
        (self.f)(r)
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosedForm({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub enum SequenceSpec {
    /// `c` for every `r`.
    Constant(f64),
    /// `scale * (r + offset)^power`.
    Polynomial {
        power: f64,
        offset: f64,
        scale: f64,
        rounding: Rounding,
    },
    /// `scale * ratio^r`.
    Geometric {
        scale: f64,
        ratio: f64,
    },
    /// Explicit values for `r < values.len()`, then `tail` evaluated at the
    /// same absolute `r`.
    Table {
        values: Vec<f64>,
        tail: Box<SequenceSpec>,
    },
    Custom(ClosedForm),
}

/// Asymptotic size `~ base^r * r^power` of a sequence, up to a positive
/// constant factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Growth {
    /// Eventually identically zero.
    Zero,
    Order {
        base: f64,
        power: f64,
    },
}

impl Growth {
    pub const ONE: Growth = Growth::Order {
        base: 1.0,
        power: 0.0,
    };

    pub fn mul(self, other: Growth) -> Growth {
        match (self, other) {
            (Growth::Zero, _) | (_, Growth::Zero) => Growth::Zero,
            (
                Growth::Order {
                    base: b1,
                    power: p1,
                },
                Growth::Order {
                    base: b2,
                    power: p2,
                },
            ) => Growth::Order {
                base: b1 * b2,
                power: p1 + p2,
            },
        }
    }

    /// `None` when dividing by an eventually-zero sequence.
    pub fn div(self, other: Growth) -> Option<Growth> {
        match other {
            Growth::Zero => None,
            Growth::Order { base, power } => Some(self.mul(Growth::Order {
                base: 1.0 / base,
                power: -power,
            })),
        }
    }

    /// Growth of `f + g` for nonnegative `f`, `g`.
    pub fn max(self, other: Growth) -> Growth {
        match (self, other) {
            (Growth::Zero, g) | (g, Growth::Zero) => g,
            (
                Growth::Order {
                    base: b1,
                    power: p1,
                },
                Growth::Order {
                    base: b2,
                    power: p2,
                },
            ) => {
                if b1 > b2 || (b1 == b2 && p1 >= p2) {
                    self
                } else {
                    other
                }
            }
        }
    }

    /// Whether `sum_r a(r)` converges for a positive sequence of this growth.
    pub fn summable(self) -> bool {
        match self {
            Growth::Zero => true,
            Growth::Order { base, power } => base < 1.0 || (base == 1.0 && power < -1.0),
        }
    }

    /// Growth of the partial sums `sum_{i<=r} a(i)` of a positive sequence
    /// that does not decay.
    pub fn partial_sums(self) -> Option<Growth> {
        match self {
            Growth::Order { base, .. } if base > 1.0 => Some(self),
            Growth::Order { base, power } if base == 1.0 && power > -1.0 => Some(Growth::Order {
                base,
                power: power + 1.0,
            }),
            _ => None,
        }
    }
}

fn is_count(x: f64) -> bool {
    x.is_finite() && x >= 0.0 && libm::trunc(x) == x
}

fn biguint_of(x: f64) -> Option<BigUint> {
    if x.is_finite() && x >= 0.0 {
        BigUint::from_f64(x)
    } else {
        None
    }
}

impl SequenceSpec {
    pub fn constant(c: f64) -> Self {
        SequenceSpec::Constant(c)
    }

    /// `(r + 1)^power`.
    pub fn poly(power: f64) -> Self {
        SequenceSpec::Polynomial {
            power,
            offset: 1.0,
            scale: 1.0,
            rounding: Rounding::Nearest,
        }
    }

    /// `(r + offset)^power`.
    pub fn poly_shifted(power: f64, offset: f64) -> Self {
        SequenceSpec::Polynomial {
            power,
            offset,
            scale: 1.0,
            rounding: Rounding::Nearest,
        }
    }

    pub fn geometric(scale: f64, ratio: f64) -> Self {
        SequenceSpec::Geometric { scale, ratio }
    }

    pub fn table(values: Vec<f64>, tail: SequenceSpec) -> Self {
        SequenceSpec::Table {
            values,
            tail: Box::new(tail),
        }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        SequenceSpec::Custom(ClosedForm::new(name, f))
    }

    /// Checks the parameters that can be checked without evaluating.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |what: &'static str| Err(Error::InvalidSequence { radius: None, what });
        match self {
            SequenceSpec::Constant(c) if !(c.is_finite() && *c >= 0.0) => {
                bad("constant must be finite and nonnegative")
            }
            SequenceSpec::Polynomial {
                power,
                offset,
                scale,
                ..
            } => {
                if !(power.is_finite() && *power >= 0.0) {
                    bad("polynomial power must be finite and nonnegative")
                } else if !(offset.is_finite() && *offset >= 0.0) {
                    bad("polynomial offset must be finite and nonnegative")
                } else if !(scale.is_finite() && *scale >= 0.0) {
                    bad("polynomial scale must be finite and nonnegative")
                } else {
                    Ok(())
                }
            }
            SequenceSpec::Geometric { scale, ratio } => {
                if !(scale.is_finite() && *scale >= 0.0 && ratio.is_finite() && *ratio >= 0.0) {
                    bad("geometric scale and ratio must be finite and nonnegative")
                } else {
                    Ok(())
                }
            }
            SequenceSpec::Table { values, tail } => {
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return bad("table values must be finite and nonnegative");
                }
                tail.validate()
            }
            _ => Ok(()),
        }
    }

    /// Real value at `r`.
    pub fn value(&self, r: u64) -> f64 {
        match self {
            SequenceSpec::Constant(c) => *c,
            SequenceSpec::Polynomial {
                power,
                offset,
                scale,
                ..
            } => scale * libm::pow(r as f64 + offset, *power),
            SequenceSpec::Geometric { scale, ratio } => scale * libm::pow(*ratio, r as f64),
            SequenceSpec::Table { values, tail } => match values.get(r as usize) {
                Some(v) => *v,
                None => tail.value(r),
            },
            SequenceSpec::Custom(f) => f.eval(r),
        }
    }

    /// Exact count at `r`. Integral parameters give exact big-integer
    /// arithmetic; anything else is evaluated in `f64` and rounded.
    pub fn count(&self, r: u64) -> Result<BigUint, Error> {
        let invalid = |what: &'static str| Error::InvalidSequence {
            radius: Some(r),
            what,
        };
        match self {
            SequenceSpec::Constant(c) => {
                if !is_count(*c) {
                    return Err(invalid(
                        "count-valued constant must be a nonnegative integer",
                    ));
                }
                biguint_of(*c).ok_or_else(|| invalid("constant out of range"))
            }
            SequenceSpec::Polynomial {
                power,
                offset,
                scale,
                rounding,
            } => {
                if is_count(*power)
                    && is_count(*offset)
                    && is_count(*scale)
                    && *power <= u32::MAX as f64
                {
                    let base = BigUint::from(r) + biguint_of(*offset).unwrap_or_default();
                    let scale = biguint_of(*scale).unwrap_or_default();
                    Ok(scale * Pow::pow(base, *power as u32))
                } else {
                    let v = rounding.apply(self.value(r));
                    biguint_of(v).ok_or_else(|| invalid("polynomial value not representable"))
                }
            }
            SequenceSpec::Geometric { scale, ratio } => {
                if is_count(*scale) && is_count(*ratio) {
                    let scale = biguint_of(*scale).unwrap_or_default();
                    let ratio = biguint_of(*ratio).unwrap_or_default();
                    let exp = u32::try_from(r).map_err(|_| invalid("radius too large"))?;
                    Ok(scale * Pow::pow(ratio, exp))
                } else {
                    let v = libm::round(self.value(r));
                    biguint_of(v).ok_or_else(|| invalid("geometric value not representable"))
                }
            }
            SequenceSpec::Table { values, tail } => match values.get(r as usize) {
                Some(v) if is_count(*v) => Ok(biguint_of(*v).unwrap_or_default()),
                Some(_) => Err(invalid(
                    "count-valued table entry must be a nonnegative integer",
                )),
                None => tail.count(r),
            },
            SequenceSpec::Custom(f) => {
                let v = f.eval(r);
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(
                        "closed form returned a negative or non-finite value",
                    ));
                }
                biguint_of(libm::round(v))
                    .ok_or_else(|| invalid("closed form value not representable"))
            }
        }
    }

    /// Exact counts for `r = 0..=radius`.
    pub fn counts(&self, radius: u64) -> Result<Vec<BigUint>, Error> {
        (0..=radius).map(|r| self.count(r)).collect()
    }

    /// The declared asymptotic class, when the kind is parametric (a table
    /// inherits the class of its tail; a custom closed form has none).
    pub fn growth(&self) -> Option<Growth> {
        match self {
            SequenceSpec::Constant(c) => Some(if *c == 0.0 { Growth::Zero } else { Growth::ONE }),
            SequenceSpec::Polynomial { power, scale, .. } => Some(if *scale == 0.0 {
                Growth::Zero
            } else {
                Growth::Order {
                    base: 1.0,
                    power: *power,
                }
            }),
            SequenceSpec::Geometric { scale, ratio } => Some(if *scale == 0.0 || *ratio == 0.0 {
                Growth::Zero
            } else {
                Growth::Order {
                    base: *ratio,
                    power: 0.0,
                }
            }),
            SequenceSpec::Table { tail, .. } => tail.growth(),
            SequenceSpec::Custom(_) => None,
        }
    }

    /// True when the sequence is identically zero (used to detect `k̃ ≡ 0`).
    pub fn is_identically_zero(&self) -> bool {
        match self {
            SequenceSpec::Constant(c) => *c == 0.0,
            SequenceSpec::Polynomial { scale, .. } => *scale == 0.0,
            SequenceSpec::Geometric { scale, .. } => *scale == 0.0,
            SequenceSpec::Table { values, tail } => {
                values.iter().all(|v| v.is_zero()) && tail.is_identically_zero()
            }
            SequenceSpec::Custom(_) => false,
        }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Constant(c) => write!(f, "const:{c}"),
            SequenceSpec::Polynomial {
                power,
                offset,
                scale,
                ..
            } => {
                if *scale != 1.0 {
                    write!(f, "{scale}*")?;
                }
                write!(f, "(r+{offset})^{power}")
            }
            SequenceSpec::Geometric { scale, ratio } => write!(f, "{scale}*{ratio}^r"),
            SequenceSpec::Table { values, tail } => {
                write!(f, "table[")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "];tail={tail}")
            }
            SequenceSpec::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}
