//! `|D_n(y)|`: length-`n` prefixes of infinite lifts of an image point.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factor::{EventuallyPeriodicPoint, FactorSystem, TailAutomaton};

/// Number of `X`-words `x_1 ... x_n` over `y_1 ... y_n` that extend to a full
/// preimage of `y`.
pub fn dn_count(fs: &FactorSystem, y: &EventuallyPeriodicPoint, n: usize) -> Result<BigUint> {
    Ok(dn_series(fs, y, n)?.pop().expect("n >= 1"))
}

/// `|D_1(y)|, ..., |D_n(y)|`.
pub fn dn_series(fs: &FactorSystem, y: &EventuallyPeriodicPoint, n: usize) -> Result<Vec<BigUint>> {
    if n == 0 {
        return Err(Error::Precondition("|D_n(y)| needs n >= 1".into()));
    }
    let viable = TailAutomaton::new(fs, y).viable;
    let (mut state, mut letter) = y.letter_state(0);
    let mut v = vec![BigUint::one(); fs.fiber(letter).len()];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let (s, b) = y.letter_state(i);
            v = fs.block(letter, b).apply(&v);
            state = s;
            letter = b;
        }
        let mut total = BigUint::zero();
        for (j, c) in v.iter().enumerate() {
            if viable[state][j] {
                total += c;
            }
        }
        out.push(total);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count::preimage_count;
    use crate::fixtures;
    use crate::sft::Sft;

    #[test]
    fn one_then_twos_has_n_minus_one_extendable_lifts() {
        let fs = fixtures::not_gibbs_continuous();
        let (one, two) = (fs.image_index("1").unwrap(), fs.image_index("2").unwrap());
        let y = EventuallyPeriodicPoint::new(&fs, vec![one], vec![two]).unwrap();
        for n in 2..=10 {
            assert_eq!(dn_count(&fs, &y, n).unwrap(), BigUint::from(n - 1));
        }
    }

    #[test]
    fn identity_has_one_lift() {
        let fs = FactorSystem::identity(Sft::full(2).unwrap());
        let y = EventuallyPeriodicPoint::new(&fs, vec![1, 0], vec![0, 1, 1]).unwrap();
        for n in 1..=9 {
            assert_eq!(dn_count(&fs, &y, n).unwrap(), BigUint::one());
        }
    }

    #[test]
    fn bounded_by_cylinder_count() {
        let fs = fixtures::clump_not_additive();
        let (one, two) = (fs.image_index("1").unwrap(), fs.image_index("2").unwrap());
        let y = EventuallyPeriodicPoint::new(&fs, vec![one, two], vec![two, two, one, two]).unwrap();
        for n in 1..=12 {
            assert!(dn_count(&fs, &y, n).unwrap() <= preimage_count(&fs, &y.prefix(n)).unwrap());
        }
        assert!(dn_count(&fs, &y, 0).is_err());
    }
}
