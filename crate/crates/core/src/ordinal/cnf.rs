use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Num;
use serde::{Serialize, Serializer};

/// Coefficient type of a Cantor normal form.
pub trait Coefficient: Clone + Ord + Num + fmt::Display + fmt::Debug {}

impl<T: Clone + Ord + Num + fmt::Display + fmt::Debug> Coefficient for T {}

/// An ordinal below ε₀ in Cantor normal form
/// `ω^{β₁}·c₁ + ... + ω^{β_l}·c_l`, with `β₁ > ... > β_l` themselves in
/// normal form and every `cᵢ ≥ 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cnf<C> {
    terms: Vec<(Cnf<C>, C)>,
}

pub type Ordinal = Cnf<u64>;
pub type BigOrdinal = Cnf<BigUint>;

impl<C: Coefficient> Cnf<C> {
    pub fn zero() -> Self {
        Cnf { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(C::one())
    }

    pub fn nat(n: C) -> Self {
        if n.is_zero() {
            Self::zero()
        } else {
            Cnf { terms: vec![(Self::zero(), n)] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: Self) -> Self {
        Cnf { terms: vec![(e, C::one())] }
    }

    /// `ω^e·c`.
    pub fn term(e: Self, c: C) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Cnf { terms: vec![(e, c)] }
        }
    }

    /// Builds a normal form from terms, which must have strictly decreasing
    /// exponents and nonzero coefficients.
    pub fn from_terms(terms: Vec<(Self, C)>) -> Option<Self> {
        let ok = terms.iter().all(|(_, c)| !c.is_zero()) && terms.windows(2).all(|w| w[0].0 > w[1].0);
        ok.then_some(Cnf { terms })
    }

    pub fn terms(&self) -> &[(Self, C)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value as a natural number, if finite.
    pub fn as_finite(&self) -> Option<C> {
        match self.terms.as_slice() {
            [] => Some(C::zero()),
            [(e, c)] if e.is_zero() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    /// Nonzero with no finite part.
    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|(e, _)| !e.is_zero())
    }

    /// `(β₁, c₁)`.
    pub fn leading(&self) -> Option<(&Self, &C)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    /// The finite part `c_l` when the last exponent is 0.
    pub fn finite_part(&self) -> C {
        match self.terms.last() {
            Some((e, c)) if e.is_zero() => c.clone(),
            _ => C::zero(),
        }
    }

    /// Ordinal sum; left terms below the leading exponent of `other` are
    /// absorbed.
    pub fn add(&self, other: &Self) -> Self {
        let Some((e, c)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Self, C)> = self.terms.iter().take_while(|(f, _)| f > e).cloned().collect();
        let mut rest = other.terms.clone();
        if let Some((f, d)) = self.terms.get(terms.len()) {
            if f == e {
                rest[0].1 = d.clone() + c.clone();
            }
        }
        terms.append(&mut rest);
        Cnf { terms }
    }

    /// `self·m` for a natural `m`.
    pub fn mul_nat(&self, m: &C) -> Self {
        if m.is_zero() || self.is_zero() {
            return Self::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].1 = terms[0].1.clone() * m.clone();
        Cnf { terms }
    }

    /// Ordinal product.
    pub fn mul(&self, other: &Self) -> Self {
        let Some((lead, _)) = self.leading() else {
            return Self::zero();
        };
        let mut out = Self::zero();
        for (b, d) in &other.terms {
            let part = if b.is_zero() { self.mul_nat(d) } else { Self::term(lead.add(b), d.clone()) };
            out = out.add(&part);
        }
        out
    }

    /// The unique `γ` with `other + γ = self`, if `other <= self`.
    pub fn left_sub(&self, other: &Self) -> Option<Self> {
        for (i, (f, d)) in other.terms.iter().enumerate() {
            let Some((e, c)) = self.terms.get(i) else {
                return None;
            };
            match e.cmp(f) {
                Ordering::Greater => return Some(Cnf { terms: self.terms[i..].to_vec() }),
                Ordering::Less => return None,
                Ordering::Equal => match c.cmp(d) {
                    Ordering::Greater => {
                        let mut terms = self.terms[i..].to_vec();
                        terms[0].1 = c.clone() - d.clone();
                        return Some(Cnf { terms });
                    }
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                },
            }
        }
        Some(Cnf { terms: self.terms[other.terms.len()..].to_vec() })
    }

    /// `self + 1`.
    pub fn succ(&self) -> Self {
        self.add(&Self::one())
    }
}

impl<C: Coefficient> Ord for Cnf<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((e, c), (f, d)) in self.terms.iter().zip(&other.terms) {
            match e.cmp(f).then_with(|| c.cmp(d)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl<C: Coefficient> PartialOrd for Cnf<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `⌊log₂ c⌋` for `c ≥ 1`.
pub fn floor_log2<C: Coefficient>(c: &C) -> u64 {
    let two = C::one() + C::one();
    let mut c = c.clone();
    let mut k = 0;
    while c >= two {
        c = c / two.clone();
        k += 1;
    }
    k
}

/// The coefficient `n` as a `C`.
pub fn coefficient<C: Coefficient>(n: u64) -> C {
    let mut out = C::zero();
    let mut bit = C::one();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            out = out + bit.clone();
        }
        bit = bit.clone() + bit;
        n >>= 1;
    }
    out
}

impl<C: Coefficient> fmt::Display for Cnf<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            f.write_str("w")?;
            if *e != Self::one() {
                if e.is_finite() || *e == Self::omega() {
                    write!(f, "^{e}")?;
                } else {
                    write!(f, "^({e})")?;
                }
            }
            if !c.is_one() {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for Cnf<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cnf({self})")
    }
}

impl<C: Coefficient> Serialize for Cnf<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    fn n(k: u64) -> Ordinal {
        Ordinal::nat(k)
    }

    #[test]
    fn addition() {
        assert_eq!(w().add(&n(5)).to_string(), "w+5");
        assert_eq!(n(5).add(&w()), w());
        let a = Ordinal::term(n(2), 3).add(&Ordinal::term(n(1), 5));
        assert_eq!(a.to_string(), "w^2*3+w*5");
        assert_eq!(a.add(&Ordinal::omega_pow(n(2))).to_string(), "w^2*4");
        assert_eq!(n(2).add(&n(3)), n(5));
    }

    #[test]
    fn comparison() {
        assert!(w().mul_nat(&2) > w().add(&n(100)));
        assert!(n(0) < n(1));
        assert!(Ordinal::omega_pow(w()) > Ordinal::term(n(7), 1000));
    }

    #[test]
    fn products() {
        assert_eq!(w().mul(&w()).to_string(), "w^2");
        assert_eq!(n(2).mul(&w()), w());
        assert_eq!(w().mul(&n(2)).to_string(), "w*2");
        let a = w().add(&n(1));
        assert_eq!(a.mul(&n(3)).to_string(), "w*3+1");
        assert_eq!(w().mul(&Ordinal::omega_pow(w())).to_string(), "w^w");
        assert_eq!(w().mul(&Ordinal::omega_pow(w().add(&n(1)))).to_string(), "w^(w+1)");
    }

    #[test]
    fn left_subtraction() {
        let w8 = w().mul_nat(&8);
        let cut = w().mul_nat(&4).succ();
        assert_eq!(w8.left_sub(&cut).unwrap(), w().mul_nat(&4));
        assert_eq!(w().add(&n(3)).left_sub(&w()).unwrap(), n(3));
        assert_eq!(w().left_sub(&n(1)).unwrap(), w());
        assert!(n(3).left_sub(&w()).is_none());
    }

    #[test]
    fn logs() {
        assert_eq!(floor_log2(&1u64), 0);
        assert_eq!(floor_log2(&8u64), 3);
        assert_eq!(floor_log2(&BigUint::from(1023u32)), 9);
        assert_eq!(coefficient::<BigUint>(77), BigUint::from(77u32));
    }
}
