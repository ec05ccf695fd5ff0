//! Integers extended with `-inf`/`+inf`, used for arc capacities and cut values.

/// An `i64` extended with signed infinities. The derived `Ord` puts
/// `NegInf < Fin(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Fin(i64),
    PosInf,
}

impl Ext {
    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    /// Finite value, panicking on infinities.
    pub fn finite(self) -> i64 {
        match self {
            Ext::Fin(v) => v,
            _ => panic!("expected finite value, got {self:?}"),
        }
    }

    /// Saturating addition. Adding opposite infinities is a logic error.
    pub fn add(self, other: Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => {
                panic!("adding opposite infinities")
            }
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Ext::PosInf,
        }
    }

    /// Multiply by a finite integer coefficient (sign-aware, `0 * inf = 0`).
    pub fn scale(self, by: i64) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v * by),
            _ if by == 0 => Ext::Fin(0),
            Ext::PosInf => {
                if by > 0 {
                    Ext::PosInf
                } else {
                    Ext::NegInf
                }
            }
            Ext::NegInf => {
                if by > 0 {
                    Ext::NegInf
                } else {
                    Ext::PosInf
                }
            }
        }
    }
}

impl From<i64> for Ext {
    fn from(v: i64) -> Self {
        Ext::Fin(v)
    }
}

impl core::fmt::Display for Ext {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Fin(v) => write!(f, "{v}"),
            Ext::PosInf => write!(f, "inf"),
        }
    }
}
