//! Carpets of the torus map `T(x, y) = (l x mod 1, m y mod 1)`.
//!
//! A digit pair `(a, b)` names the rectangle `[a/l, (a+1)/l] x [b/m, (b+1)/m]`.
//! The carpet is the image under the coding map of the shift of finite type
//! over the chosen digit pairs, and the factor map keeps the vertical digit.

use crate::error::{Error, Result};
use crate::factor::{induced_factor, FactorSystem};
use crate::sft::Sft;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarpetSpec {
    l: u32,
    m: u32,
    digits: Vec<(u32, u32)>,
    transitions: Vec<Vec<bool>>,
}

impl CarpetSpec {
    pub fn new(l: u32, m: u32, digits: Vec<(u32, u32)>, transitions: Vec<Vec<bool>>) -> Result<Self> {
        if m < 2 || l <= m {
            return Err(Error::InvalidSystem(format!(
                "carpet needs l > m >= 2, got l = {l}, m = {m}"
            )));
        }
        if digits.is_empty() {
            return Err(Error::InvalidSystem("carpet has no digits".into()));
        }
        for (i, &(a, b)) in digits.iter().enumerate() {
            if a >= l || b >= m {
                return Err(Error::InvalidSystem(format!(
                    "digit ({a},{b}) out of range for l = {l}, m = {m}"
                )));
            }
            if digits[..i].contains(&(a, b)) {
                return Err(Error::InvalidSystem(format!("duplicate digit ({a},{b})")));
            }
        }
        let r = digits.len();
        if transitions.len() != r || transitions.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidSystem(format!(
                "carpet transition matrix must be {r}x{r}"
            )));
        }
        let spec = CarpetSpec {
            l,
            m,
            digits,
            transitions,
        };
        // Surface stranded symbols at construction time.
        spec.sft()?;
        Ok(spec)
    }

    /// Carpet with every transition allowed.
    pub fn full(l: u32, m: u32, digits: Vec<(u32, u32)>) -> Result<Self> {
        let r = digits.len();
        CarpetSpec::new(l, m, digits, vec![vec![true; r]; r])
    }

    /// Full-shift carpet with `columns[j]` digits in row `j`, using the
    /// horizontal digits `0..columns[j]`.
    pub fn from_column_counts(l: u32, m: u32, columns: &[u32]) -> Result<Self> {
        let digits = columns
            .iter()
            .enumerate()
            .flat_map(|(j, &t)| (0..t).map(move |a| (a, j as u32)))
            .collect();
        CarpetSpec::full(l, m, digits)
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn digits(&self) -> &[(u32, u32)] {
        &self.digits
    }

    pub fn transitions(&self) -> &[Vec<bool>] {
        &self.transitions
    }

    pub fn is_full(&self) -> bool {
        self.transitions.iter().all(|row| row.iter().all(|&b| b))
    }

    /// `log l / log m - 1`.
    pub fn alpha(&self) -> f64 {
        (self.l as f64).ln() / (self.m as f64).ln() - 1.0
    }

    /// Exponent `1 / (alpha + 1) = log m / log l` applied to preimage counts.
    pub fn theta(&self) -> f64 {
        (self.m as f64).ln() / (self.l as f64).ln()
    }

    /// `t_j`: number of digits in row `j`, for `j` in `0..m`.
    pub fn column_counts(&self) -> Vec<u32> {
        let mut t = vec![0; self.m as usize];
        for &(_, b) in &self.digits {
            t[b as usize] += 1;
        }
        t
    }

    pub fn digit_name(a: u32, b: u32) -> String {
        format!("({a},{b})")
    }

    pub fn sft(&self) -> Result<Sft> {
        let names = self
            .digits
            .iter()
            .map(|&(a, b)| CarpetSpec::digit_name(a, b))
            .collect();
        Sft::new(names, self.transitions.clone())
    }
}

/// The factor system `(X, pi)` of a carpet together with `alpha`.
///
/// Image letters are the vertical digits that occur, in ascending order.
pub fn carpet_to_factor(spec: &CarpetSpec) -> Result<(FactorSystem, f64)> {
    let sft = spec.sft()?;
    let mut rows: Vec<u32> = spec.digits.iter().map(|&(_, b)| b).collect();
    rows.sort_unstable();
    rows.dedup();
    let letter_map = spec
        .digits
        .iter()
        .map(|&(_, b)| rows.binary_search(&b).expect("row present"))
        .collect();
    let names = rows.iter().map(|b| b.to_string()).collect();
    let fs = induced_factor(sft, names, letter_map)?;
    Ok((fs, spec.alpha()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_three_by_two() {
        let spec = CarpetSpec::from_column_counts(3, 2, &[3, 3]).unwrap();
        let (fs, alpha) = carpet_to_factor(&spec).unwrap();
        assert_eq!(fs.image_size(), 2);
        assert!(fs.source().is_full());
        assert!((alpha - (3f64.log2() - 1.0)).abs() < 1e-15);
        assert!((alpha - 0.584963).abs() < 1e-6);
    }

    #[test]
    fn projection_fibers() {
        let spec = CarpetSpec::full(3, 2, vec![(0, 0), (1, 1), (2, 0)]).unwrap();
        let (fs, _) = carpet_to_factor(&spec).unwrap();
        let zero = fs.image_index("0").unwrap();
        let one = fs.image_index("1").unwrap();
        let names = |b| -> Vec<&str> { fs.fiber(b).iter().map(|&x| fs.source().name(x)).collect() };
        assert_eq!(names(zero), vec!["(0,0)", "(2,0)"]);
        assert_eq!(names(one), vec!["(1,1)"]);
    }

    #[test]
    fn requires_l_greater_than_m() {
        assert!(CarpetSpec::full(2, 2, vec![(0, 0)]).is_err());
        assert!(CarpetSpec::full(3, 1, vec![(0, 0)]).is_err());
        assert!(CarpetSpec::full(3, 2, vec![(3, 0)]).is_err());
        assert!(CarpetSpec::full(3, 2, vec![(0, 0), (0, 0)]).is_err());
    }
}
