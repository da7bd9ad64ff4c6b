use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::eval::capacity_constant;
use crate::model::Instance;
use crate::rational::{Epsilon, Rational};

/// Largest integer ℓ with base^ℓ ≤ x; base > 1, x > 0.
pub fn floor_log(base: &Rational, x: &Rational) -> i64 {
    let guess = (x.to_f64().ln() / base.to_f64().ln()).floor();
    let mut l = if guess.is_finite() { guess as i64 } else { 0 };
    while base.pow(l + 1) <= *x {
        l += 1;
    }
    while base.pow(l) > *x {
        l -= 1;
    }
    l
}

/// Smallest integer ℓ with base^ℓ ≥ x; base > 1, x > 0.
pub fn ceil_log(base: &Rational, x: &Rational) -> i64 {
    let l = floor_log(base, x);
    if base.pow(l) == *x {
        l
    } else {
        l + 1
    }
}

/// Geometric size classes [(1+ε)^ℓ, (1+ε)^{ℓ+1}) covering [ε²C, 4C].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeClassLadder {
    pub epsilon: Epsilon,
    pub capacity_constant: Rational,
    pub ell_min: i64,
    pub ell_max: i64,
}

/// Ladder for `instance`; ε must be at most 1/2.
pub fn build_ladder(instance: &Instance, epsilon: Epsilon) -> Result<SizeClassLadder> {
    Ok(SizeClassLadder::new(capacity_constant(instance), epsilon))
}

impl SizeClassLadder {
    pub fn new(capacity_constant: Rational, epsilon: Epsilon) -> Self {
        let g = epsilon.growth();
        let eps = epsilon.value();
        let ell_min = floor_log(&g, &(&(&eps * &eps) * &capacity_constant));
        let ell_max = ceil_log(&g, &(Rational::from(4u64) * &capacity_constant));
        SizeClassLadder {
            epsilon,
            capacity_constant,
            ell_min,
            ell_max,
        }
    }

    /// |L|.
    pub fn len(&self) -> usize {
        (self.ell_max - self.ell_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn classes(&self) -> impl Iterator<Item = i64> {
        self.ell_min..=self.ell_max
    }

    /// ⌈log_{1+ε}(4/ε²)⌉ + 2.
    pub fn size_bound(epsilon: Epsilon) -> usize {
        let k = epsilon.inverse() as u64;
        ceil_log(&epsilon.growth(), &Rational::from(4 * k * k)) as usize + 2
    }

    /// The ℓ with size ∈ [(1+ε)^ℓ, (1+ε)^{ℓ+1}), if inside the ladder.
    pub fn class_of(&self, size: &Rational) -> Option<i64> {
        if !size.is_positive() {
            return None;
        }
        let l = floor_log(&self.epsilon.growth(), size);
        (self.ell_min..=self.ell_max).contains(&l).then_some(l)
    }

    /// (1+ε)^{ℓ+1}, the nominal capacity of a class-ℓ bag.
    pub fn class_capacity(&self, ell: i64) -> Rational {
        self.epsilon.growth_pow(ell + 1)
    }

    /// (1+ε)εC, the nominal capacity of a sand bag.
    pub fn sand_capacity(&self) -> Rational {
        &(self.epsilon.growth() * self.epsilon.value()) * &self.capacity_constant
    }

    /// Exact integer images of all capacities over one common denominator.
    pub fn scaled(&self) -> Result<ScaledCapacities> {
        let g = self.epsilon.growth();
        let mut values: Vec<Rational> = Vec::with_capacity(2 * self.len() + 2);
        for ell in self.classes() {
            values.push(self.class_capacity(ell));
        }
        for ell in self.classes() {
            values.push(&self.class_capacity(ell) * &g);
        }
        values.push(self.sand_capacity());
        values.push(&self.sand_capacity() * &g);
        let denom = values
            .iter()
            .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        let to_u128 = |v: BigInt| {
            v.to_u128()
                .ok_or_else(|| Error::capacity("ladder", "scaled capacities overflow u128"))
        };
        let scaled: Vec<u128> = values
            .iter()
            .map(|v| to_u128(v.numer() * (&denom / v.denom())))
            .collect::<Result<_>>()?;
        let n = self.len();
        // Headroom so that sums of up to 2^16 scaled items stay in range.
        if scaled.iter().any(|&v| v.leading_zeros() < 24) || denom.is_zero() {
            return Err(Error::capacity("ladder", "scaled capacities too large"));
        }
        Ok(ScaledCapacities {
            denom: to_u128(denom)?,
            nominal: scaled[..n].to_vec(),
            slack: scaled[n..2 * n].to_vec(),
            sand_nominal: scaled[2 * n],
            sand_slack: scaled[2 * n + 1],
        })
    }
}

/// Capacities multiplied by `denom`; `nominal[i]` belongs to class `ell_min + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCapacities {
    pub denom: u128,
    pub nominal: Vec<u128>,
    pub slack: Vec<u128>,
    pub sand_nominal: u128,
    pub sand_slack: u128,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(k: u32) -> Epsilon {
        Epsilon::new(k).unwrap()
    }

    #[test]
    fn ladder_examples() {
        let l = SizeClassLadder::new(Rational::one(), eps(2));
        assert_eq!((l.ell_min, l.ell_max, l.len()), (-4, 4, 9));
        let l = SizeClassLadder::new(Rational::one(), eps(4));
        assert_eq!((l.ell_min, l.ell_max, l.len()), (-13, 7, 21));
    }

    #[test]
    fn ladder_bound_values() {
        assert_eq!(SizeClassLadder::size_bound(eps(2)), 9);
        assert_eq!(SizeClassLadder::size_bound(eps(4)), 21);
    }

    #[test]
    fn boundaries_cover_range() {
        for k in 2..=5 {
            for c in [Rational::new(7, 2), Rational::from(1u64), Rational::new(100, 3), Rational::from(64u64)] {
                let l = SizeClassLadder::new(c.clone(), eps(k));
                let g = eps(k).growth();
                let e = eps(k).value();
                assert!(g.pow(l.ell_min) <= &(&e * &e) * &c);
                assert!(g.pow(l.ell_min + 1) > &(&e * &e) * &c);
                assert!(g.pow(l.ell_max) >= Rational::from(4u64) * c.clone());
                assert!(g.pow(l.ell_max - 1) < Rational::from(4u64) * c.clone());
                assert!(l.len() <= SizeClassLadder::size_bound(eps(k)));
            }
        }
    }

    #[test]
    fn logs_are_exact_at_powers() {
        let g = Rational::new(3, 2);
        assert_eq!(floor_log(&g, &Rational::new(9, 4)), 2);
        assert_eq!(ceil_log(&g, &Rational::new(9, 4)), 2);
        assert_eq!(floor_log(&g, &Rational::from(10u64)), 5);
        assert_eq!(ceil_log(&g, &Rational::from(10u64)), 6);
        assert_eq!(floor_log(&g, &Rational::new(1, 4)), -4);
    }

    #[test]
    fn class_of_uses_closed_lower_boundary() {
        let l = SizeClassLadder::new(Rational::one(), eps(2));
        assert_eq!(l.class_of(&Rational::new(9, 4)), Some(2));
        assert_eq!(l.class_of(&Rational::new(1, 4)), Some(-4));
        assert_eq!(l.class_of(&Rational::new(1, 100)), None);
    }

    #[test]
    fn scaled_capacities_are_exact() {
        let l = SizeClassLadder::new(Rational::new(7, 2), eps(2));
        let s = l.scaled().unwrap();
        for (i, ell) in l.classes().enumerate() {
            assert_eq!(Rational::new(s.nominal[i], s.denom), l.class_capacity(ell));
        }
        assert_eq!(Rational::new(s.sand_slack, s.denom), l.sand_capacity() * eps(2).growth());
    }
}
