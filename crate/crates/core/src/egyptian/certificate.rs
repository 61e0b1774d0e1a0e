use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Decomposition, EgyptianError};
use crate::arith::{divisors, factorize, ExactRational, Natural};

/// A pair `(x, y)` with `x*y | n` and `x + y ≡ 0 (mod m)`; it produces
/// `m/n = 1/a + 1/b` with `a = t*(n/xy)*x`, `b = t*(n/xy)*y`, `t = (x+y)/m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DivisorCertificate {
    pub x: Natural,
    pub y: Natural,
}

impl DivisorCertificate {
    pub fn new(x: impl Into<Natural>, y: impl Into<Natural>) -> Self {
        Self {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn is_valid_for(&self, m: &Natural, n: &Natural) -> bool {
        if self.x.is_zero() || self.y.is_zero() || m.is_zero() {
            return false;
        }
        let xy = &self.x * &self.y;
        n.is_multiple_of(&xy) && (&self.x + &self.y).is_multiple_of(m)
    }
}

/// A certificate for `m/n`, choosing the smallest `x + y`, then the smallest `x`.
pub fn find_certificate(m: &Natural, n: &Natural) -> Result<Option<DivisorCertificate>, EgyptianError> {
    if m.is_zero() {
        return Err(EgyptianError::NonPositive("m"));
    }
    let divs = divisors(&factorize(n).map_err(|_| EgyptianError::NonPositive("n"))?)?;
    let mut best: Option<(Natural, DivisorCertificate)> = None;
    for (i, x) in divs.iter().enumerate() {
        for y in &divs[i..] {
            let xy = x * y;
            if xy > *n {
                break;
            }
            let sum = x + y;
            if !n.is_multiple_of(&xy) || !sum.is_multiple_of(m) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((s, c)) => sum < *s || (sum == *s && *x < c.x),
            };
            if better {
                best = Some((sum, DivisorCertificate::new(x.clone(), y.clone())));
            }
        }
    }
    Ok(best.map(|(_, c)| c))
}

/// The two-term decomposition of `m/n` induced by a valid certificate.
pub fn certificate_to_decomposition(
    m: &Natural,
    n: &Natural,
    c: &DivisorCertificate,
) -> Result<Decomposition, EgyptianError> {
    if !c.is_valid_for(m, n) {
        return Err(EgyptianError::InvalidCertificate {
            m: m.clone(),
            n: n.clone(),
            x: c.x.clone(),
            y: c.y.clone(),
        });
    }
    let scale = (&c.x + &c.y) / m * (n / (&c.x * &c.y));
    let target = ExactRational::from_naturals(m, n)?;
    Decomposition::new(target, vec![&scale * &c.x, &scale * &c.y])
}
