use num_bigint::BigInt;
use num_traits::Pow;

use crate::error::{Error, Result};
use crate::makespan::floor_log;
use crate::model::Instance;
use crate::rational::{Epsilon, Rational};

/// Instance whose sizes are ⌈(1+ε)^ℓ_j⌉ after normalizing by the smallest size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundedInstance {
    pub instance: Instance,
    pub exponents: Vec<i64>,
    /// The smallest original size, used as the unit.
    pub scale: u64,
    /// c(ε): sizes are guaranteed to lie in [1, n^c] for the reference n.
    pub ratio_exponent: u32,
    pub original: Vec<u64>,
}

/// c(ε) = (3 + 1/ε)(1 + ⌈log2(1/ε)⌉); (n/ε)^{3+1/ε} ≤ n^{c(ε)} for n ≥ 2.
pub fn ratio_exponent(epsilon: Epsilon) -> u32 {
    let k = epsilon.inverse();
    let log2_ceil = 32 - (k - 1).leading_zeros();
    (3 + k) * (1 + log2_ceil)
}

/// Rounds with the job count of `instance` as the polynomial reference.
pub fn round_poly(instance: &Instance, epsilon: Epsilon) -> Result<RoundedInstance> {
    round_poly_with_reference(instance, epsilon, instance.job_count())
}

/// Rounds a subinstance whose size ratio is bounded in terms of the full
/// instance's job count `reference_n`.
pub fn round_poly_with_reference(
    instance: &Instance,
    epsilon: Epsilon,
    reference_n: usize,
) -> Result<RoundedInstance> {
    let p_min = instance.min_size();
    let p_max = instance.max_size();
    let c = ratio_exponent(epsilon);
    let limit: BigInt = Pow::pow(BigInt::from(reference_n.max(1)), c);
    if BigInt::from(p_max) > limit * BigInt::from(p_min) {
        return Err(Error::NeedsOuterDp {
            ratio: Rational::new(p_max, p_min).to_string(),
            exponent: c,
        });
    }
    let g = epsilon.growth();
    let mut exponents = Vec::with_capacity(instance.job_count());
    let mut sizes = Vec::with_capacity(instance.job_count());
    for &p in instance.processing_times() {
        let ell = floor_log(&g, &Rational::new(p, p_min));
        exponents.push(ell);
        sizes.push(g.pow(ell).ceil_u64()?);
    }
    Ok(RoundedInstance {
        instance: instance.with_processing_times(sizes)?,
        exponents,
        scale: p_min,
        ratio_exponent: c,
        original: instance.processing_times().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Epsilon {
        Epsilon::new(2).unwrap()
    }

    fn rounded(p: Vec<u64>) -> RoundedInstance {
        round_poly(&Instance::new(p, vec![1]).unwrap(), half()).unwrap()
    }

    #[test]
    fn examples() {
        let r = rounded(vec![1, 10]);
        assert_eq!(r.exponents, vec![0, 5]);
        assert_eq!(r.instance.processing_times(), &[1, 8]);
        let r = rounded(vec![1]);
        assert_eq!((r.exponents[0], r.instance.processing_times()[0]), (0, 1));
        let r = rounded(vec![2, 3]);
        assert_eq!(r.scale, 2);
        assert_eq!(r.exponents, vec![0, 1]);
        assert_eq!(r.instance.processing_times(), &[1, 2]);
    }

    #[test]
    fn never_below_original_over_growth() {
        for p in 1..200u64 {
            let r = rounded(vec![1, p]);
            let size = Rational::from(r.instance.processing_times()[1]);
            assert!(size.clone() * half().growth() > Rational::from(p));
            assert!(size <= Rational::from(p));
            assert_eq!(size, Rational::from(half().growth_pow(r.exponents[1]).ceil_u64().unwrap()));
        }
    }

    #[test]
    fn ratio_guard() {
        assert_eq!(ratio_exponent(half()), 10);
        assert_eq!(ratio_exponent(Epsilon::new(3).unwrap()), 18);
        let wide = Instance::new(vec![1, 1 << 40], vec![1]).unwrap();
        assert!(matches!(round_poly(&wide, half()), Err(Error::NeedsOuterDp { .. })));
        assert!(round_poly_with_reference(&wide, half(), 32).is_ok());
    }
}
