//! Dirichlet characters mod q, built on an explicit presentation of the unit
//! group `(Z/q)^*`.
//!
//! The group is presented by canonical generators obtained from the prime
//! power decomposition of q: each odd prime power contributes its smallest
//! primitive root, `4` contributes `3`, and `2^k` (k >= 3) contributes
//! `{-1, 5}`. A character is an exponent vector against those generators, and
//! its values are exact roots of unity ([`RootOfUnity`]), so long character
//! sums accumulate no character-value error; conversion to a floating complex
//! number happens once per term with a documented radius.

use crate::ball::ErrorBoundedComplex;
use crate::{Error, Result};
use num_complex::Complex64;
use num_integer::Integer;
use std::sync::{Arc, OnceLock};

/// An exact root of unity `e^{2*pi*i*num/den}`, or zero (the value of a
/// character off the units).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootOfUnity {
    Zero,
    /// Reduced turn fraction, `num < den`.
    Turn { num: u64, den: u64 },
}

impl RootOfUnity {
    pub fn one() -> Self {
        RootOfUnity::Turn { num: 0, den: 1 }
    }

    /// Build from an unreduced turn `num/den` (taken mod 1).
    pub fn from_turn(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = num.gcd(&den);
        RootOfUnity::Turn {
            num: num / g,
            den: den / g,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RootOfUnity::Zero)
    }

    /// Exact product: turns add mod 1; anything times zero is zero.
    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (RootOfUnity::Zero, _) | (_, RootOfUnity::Zero) => RootOfUnity::Zero,
            (
                RootOfUnity::Turn { num: n1, den: d1 },
                RootOfUnity::Turn { num: n2, den: d2 },
            ) => {
                let g = d1.gcd(&d2);
                let den = d1 / g * d2;
                let num = (n1 as u128 * (d2 / g) as u128 + n2 as u128 * (d1 / g) as u128)
                    % den as u128;
                RootOfUnity::from_turn(num as u64, den)
            }
        }
    }

    pub fn conj(self) -> Self {
        match self {
            RootOfUnity::Zero => RootOfUnity::Zero,
            RootOfUnity::Turn { num, den } => RootOfUnity::from_turn(den - num, den),
        }
    }

    /// Floating value without a radius.
    pub fn to_complex(self) -> Complex64 {
        match self {
            RootOfUnity::Zero => Complex64::new(0.0, 0.0),
            RootOfUnity::Turn { num: 0, .. } => Complex64::new(1.0, 0.0),
            RootOfUnity::Turn { num, den } => {
                // special-case the half and quarter turns so cancellation in
                // character sums is exact where it can be
                if den == 2 {
                    return Complex64::new(-1.0, 0.0);
                }
                if den == 4 {
                    return if num == 1 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                let theta = 2.0 * std::f64::consts::PI * (num as f64) / (den as f64);
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }

    /// Conversion radius: the trig evaluation of a turn is correct to a few
    /// ulps of a unit-modulus value.
    pub const CONVERSION_RADIUS: f64 = 16.0 * f64::EPSILON;

    pub fn to_ball(self) -> ErrorBoundedComplex {
        match self {
            RootOfUnity::Zero => ErrorBoundedComplex::zero(),
            r => ErrorBoundedComplex::new(r.to_complex(), Self::CONVERSION_RADIUS),
        }
    }
}

/// Canonical generator presentation of `(Z/q)^*`.
#[derive(Debug, Clone)]
pub struct UnitGroupStructure {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    pub factorization: Vec<(u64, u32)>,
    phi: u64,
    /// Exponent vector of each unit residue; `None` off the units.
    dlog: Vec<Option<Vec<u64>>>,
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Smallest primitive root mod an odd prime power.
fn primitive_root_odd(p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    let phi = m / p * (p - 1);
    let phi_primes: Vec<u64> = factorize(phi).into_iter().map(|(r, _)| r).collect();
    for g in 2..m {
        if g.gcd(&m) != 1 {
            continue;
        }
        if phi_primes.iter().all(|&r| pow_mod(g, phi / r, m) != 1) {
            return g;
        }
    }
    unreachable!("odd prime powers have primitive roots");
}

/// CRT lift: x == a (mod m), x == 1 (mod n), gcd(m, n) = 1.
fn crt_lift(a: u64, m: u64, n: u64) -> u64 {
    let egcd = (m as i128).extended_gcd(&(n as i128));
    debug_assert_eq!(egcd.gcd, 1);
    let q = (m * n) as i128;
    // x = a * n * (n^{-1} mod m) + 1 * m * (m^{-1} mod n)
    let inv_n_mod_m = egcd.y.rem_euclid(m as i128);
    let inv_m_mod_n = egcd.x.rem_euclid(n as i128);
    let x = (a as i128 * n as i128 % q * inv_n_mod_m % q + m as i128 * inv_m_mod_n % q) % q;
    x.rem_euclid(q) as u64
}

impl UnitGroupStructure {
    pub fn new(q: u64) -> Self {
        assert!(q >= 1);
        let factorization = factorize(q);
        let mut generators: Vec<u64> = Vec::new();
        let mut orders: Vec<u64> = Vec::new();
        for &(p, e) in &factorization {
            let pe = p.pow(e);
            let cofactor = q / pe;
            let mut local: Vec<(u64, u64)> = Vec::new();
            if p == 2 {
                match e {
                    1 => {}
                    2 => local.push((3, 2)),
                    _ => {
                        local.push((pe - 1, 2));
                        local.push((5, 1 << (e - 2)));
                    }
                }
            } else {
                let phi = pe / p * (p - 1);
                local.push((primitive_root_odd(p, e), phi));
            }
            for (g, ord) in local {
                let lifted = if cofactor == 1 {
                    g
                } else {
                    crt_lift(g, pe, cofactor)
                };
                generators.push(lifted);
                orders.push(ord);
            }
        }
        let phi: u64 = orders.iter().product();

        // exponent vector of every unit, built by closing the generator span
        let mut dlog: Vec<Option<Vec<u64>>> = vec![None; q.max(1) as usize];
        let one = if q == 1 { 0 } else { 1 } as usize;
        let mut span: Vec<(u64, Vec<u64>)> = vec![(one as u64, vec![0; generators.len()])];
        for (i, (&g, &ord)) in generators.iter().zip(&orders).enumerate() {
            let mut next = Vec::with_capacity(span.len() * ord as usize);
            for (r, v) in &span {
                let mut x = *r;
                for k in 0..ord {
                    let mut vk = v.clone();
                    vk[i] = k;
                    next.push((x, vk));
                    x = (x as u128 * g as u128 % q as u128) as u64;
                }
            }
            span = next;
        }
        debug_assert_eq!(span.len() as u64, phi);
        for (r, v) in span {
            debug_assert!(dlog[r as usize].is_none(), "generators not independent");
            dlog[r as usize] = Some(v);
        }

        Self {
            modulus: q,
            generators,
            orders,
            factorization,
            phi,
            dlog,
        }
    }

    pub fn totient(&self) -> u64 {
        self.phi
    }

    /// Exponent of the group: lcm of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.orders.iter().fold(1u64, |l, &o| l.lcm(&o))
    }

    /// Exponent vector of `n` against the generators; `None` if `gcd(n,q)>1`.
    pub fn discrete_log(&self, n: u64) -> Option<&[u64]> {
        let r = (n % self.modulus.max(1)) as usize;
        self.dlog[r].as_deref()
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus.max(1)).filter(|&r| self.dlog[r as usize].is_some())
    }
}

/// `build_unit_group(q)`: canonical presentation of `(Z/q)^*`.
pub fn build_unit_group(q: u64) -> Arc<UnitGroupStructure> {
    Arc::new(UnitGroupStructure::new(q))
}

/// Euler's totient via the factorization.
pub fn totient(q: u64) -> u64 {
    assert!(q >= 1);
    factorize(q)
        .into_iter()
        .map(|(p, e)| p.pow(e) / p * (p - 1))
        .product::<u64>()
        .max(1)
}

/// A Dirichlet character mod q, as an exponent vector against the canonical
/// generators. Generator `g_i` maps to the turn `exponents[i]/orders[i]`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    structure: Arc<UnitGroupStructure>,
    exponents: Vec<u64>,
    /// Big-endian mixed-radix rank of the exponent vector; 0 is principal.
    index: u64,
    prefix: OnceLock<Arc<Vec<Complex64>>>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}

impl DirichletCharacter {
    pub fn new(structure: Arc<UnitGroupStructure>, exponents: Vec<u64>) -> Self {
        assert_eq!(exponents.len(), structure.orders.len());
        for (e, o) in exponents.iter().zip(&structure.orders) {
            assert!(e < o);
        }
        let index = exponents
            .iter()
            .zip(&structure.orders)
            .fold(0u64, |acc, (&e, &o)| acc * o + e);
        Self {
            structure,
            exponents,
            index,
            prefix: OnceLock::new(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.structure.modulus
    }

    pub fn structure(&self) -> &Arc<UnitGroupStructure> {
        &self.structure
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Rank within the canonical enumeration (principal is 0).
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn conjugate(&self) -> Self {
        let exps = self
            .exponents
            .iter()
            .zip(&self.structure.orders)
            .map(|(&e, &o)| if e == 0 { 0 } else { o - e })
            .collect();
        Self::new(self.structure.clone(), exps)
    }

    /// `chi(n)` as an exact root of unity; zero off the units.
    pub fn eval(&self, n: u64) -> RootOfUnity {
        let q = self.modulus();
        if q == 1 {
            return RootOfUnity::one();
        }
        match self.structure.discrete_log(n) {
            None => RootOfUnity::Zero,
            Some(vec) => {
                let ell = self.structure.exponent();
                let mut num: u128 = 0;
                for ((&e, &v), &o) in self.exponents.iter().zip(vec).zip(&self.structure.orders)
                {
                    num += e as u128 * v as u128 * (ell / o) as u128;
                }
                RootOfUnity::from_turn((num % ell as u128) as u64, ell)
            }
        }
    }

    fn prefix_table(&self) -> &Arc<Vec<Complex64>> {
        self.prefix.get_or_init(|| {
            let q = self.modulus();
            let mut table = Vec::with_capacity(q as usize);
            let mut acc = Complex64::new(0.0, 0.0);
            table.push(acc); // A(0) = 0
            for n in 1..q {
                acc += self.eval(n).to_complex();
                table.push(acc);
            }
            Arc::new(table)
        })
    }

    /// Character partial sum `A(N) = sum_{n <= N} chi(n)`, for non-principal
    /// chi. Uses the one-period prefix table and `A(N) = A(N mod q)` (the
    /// full-period sum vanishes by orthogonality), so `A` is exactly zero at
    /// multiples of q and each returned value carries at most `q` rounded
    /// additions of unit vectors.
    pub fn partial_sum(&self, n: u64) -> Result<Complex64> {
        if self.is_principal() {
            return Err(Error::PrincipalCharacter(self.modulus()));
        }
        let r = (n % self.modulus()) as usize;
        Ok(self.prefix_table()[r])
    }

    /// Upper bound for `|A(N)|` including the prefix-table rounding slack.
    pub fn partial_sum_abs_upper(&self, n: u64) -> Result<f64> {
        let a = self.partial_sum(n)?;
        if n % self.modulus() == 0 {
            return Ok(0.0);
        }
        Ok(a.norm() + crate::ball::ROUNDING_INFLATION * self.modulus() as f64)
    }
}

/// Enumerate the characters mod q in canonical (big-endian exponent) order.
/// Exactly `phi(q)` with the principal included, `phi(q) - 1` without; for
/// q in {1, 2} the non-principal list is empty.
pub fn enumerate_characters(
    structure: &Arc<UnitGroupStructure>,
    include_principal: bool,
) -> Vec<DirichletCharacter> {
    let orders = &structure.orders;
    let phi = structure.totient();
    let mut out = Vec::with_capacity(phi as usize);
    let mut exps = vec![0u64; orders.len()];
    loop {
        let principal = exps.iter().all(|&e| e == 0);
        if include_principal || !principal {
            out.push(DirichletCharacter::new(structure.clone(), exps.clone()));
        }
        // big-endian odometer: last exponent fastest
        let mut i = exps.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

/// Convenience: enumerate mod q directly.
pub fn enumerate_characters_mod(q: u64, include_principal: bool) -> Vec<DirichletCharacter> {
    enumerate_characters(&build_unit_group(q), include_principal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_q8_is_klein() {
        let g = UnitGroupStructure::new(8);
        assert_eq!(g.totient(), 4);
        let mut orders = g.orders.clone();
        orders.sort();
        assert_eq!(orders, vec![2, 2]);
    }

    #[test]
    fn unit_group_q3() {
        let g = UnitGroupStructure::new(3);
        assert_eq!(g.generators, vec![2]);
        assert_eq!(g.orders, vec![2]);
    }

    #[test]
    fn unit_group_q15_orders_multiply_to_phi() {
        // brute-force phi(15) by counting coprime residues
        let brute = (1..15u64).filter(|n| n.gcd(&15) == 1).count() as u64;
        assert_eq!(brute, 8);
        let g = UnitGroupStructure::new(15);
        assert_eq!(g.orders.iter().product::<u64>(), brute);
        // every generator really has its claimed order
        for (&gen, &ord) in g.generators.iter().zip(&g.orders) {
            assert_eq!(pow_mod(gen, ord, 15), 1);
            for k in 1..ord {
                assert_ne!(pow_mod(gen, k, 15), 1, "generator {gen} order not {ord}");
            }
        }
    }

    #[test]
    fn trivial_moduli() {
        for q in [1u64, 2] {
            assert!(enumerate_characters_mod(q, false).is_empty());
            assert_eq!(enumerate_characters_mod(q, true).len(), 1);
        }
        assert_eq!(totient(1), 1);
        assert_eq!(totient(10), 4);
        assert_eq!(totient(97), 96);
    }

    #[test]
    fn character_counts() {
        assert_eq!(enumerate_characters_mod(5, false).len(), 3);
        assert_eq!(enumerate_characters_mod(12, false).len(), 3);
    }

    #[test]
    fn mod3_character_values() {
        let chis = enumerate_characters_mod(3, false);
        assert_eq!(chis.len(), 1);
        let chi = &chis[0];
        assert_eq!(chi.eval(2), RootOfUnity::Turn { num: 1, den: 2 });
        assert_eq!(chi.eval(6), RootOfUnity::Zero);
        assert_eq!(chi.eval(1), RootOfUnity::one());
    }

    #[test]
    fn mod5_generator_convention() {
        // 2 generates (Z/5)^*; the character with exponent 1 sends 2 to turn 1/4
        let g = build_unit_group(5);
        assert_eq!(g.generators, vec![2]);
        let chi = DirichletCharacter::new(g, vec![1]);
        assert_eq!(chi.eval(2), RootOfUnity::Turn { num: 1, den: 4 });
        // brute-force check over the whole cyclic group
        for (n, pow) in [(2u64, 1u64), (4, 2), (3, 3), (1, 0)] {
            assert_eq!(chi.eval(n), RootOfUnity::from_turn(pow, 4));
        }
    }

    #[test]
    fn partial_sum_period_and_small_values() {
        let chis = enumerate_characters_mod(3, false);
        let chi = &chis[0];
        assert_eq!(chi.partial_sum(3).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(chi.partial_sum(300).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(chi.partial_sum(1).unwrap(), Complex64::new(1.0, 0.0));
        let principal = &enumerate_characters_mod(3, true)[0];
        assert!(principal.is_principal());
        assert!(principal.partial_sum(1).is_err());
    }

    #[test]
    fn partial_sum_bound_small_moduli() {
        for q in 3..=100u64 {
            let group = build_unit_group(q);
            let half_phi = group.totient() as f64 / 2.0;
            for chi in enumerate_characters(&group, false) {
                for n in 0..q {
                    let a = chi.partial_sum(n).unwrap().norm();
                    assert!(
                        a <= half_phi + 1e-9,
                        "q={q} chi={:?} N={n}: |A|={a} > phi/2={half_phi}",
                        chi.exponents()
                    );
                }
            }
        }
    }

    #[test]
    fn multiplicativity_and_periodicity() {
        for q in [7u64, 12, 16, 45] {
            for chi in enumerate_characters_mod(q, true) {
                for m in 0..2 * q {
                    assert_eq!(chi.eval(m), chi.eval(m + q));
                    for n in 0..q {
                        assert_eq!(chi.eval(m * n), chi.eval(m).mul(chi.eval(n)));
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality() {
        for q in [3u64, 8, 9, 24, 35] {
            for chi in enumerate_characters_mod(q, false) {
                let sum: Complex64 = (1..=q).map(|a| chi.eval(a).to_complex()).sum();
                assert!(sum.norm() < 1e-12, "q={q}: |sum|={}", sum.norm());
            }
        }
    }

    #[test]
    fn characters_pairwise_distinct() {
        for q in [8u64, 15, 16, 40] {
            let group = build_unit_group(q);
            let chis = enumerate_characters(&group, true);
            assert_eq!(chis.len() as u64, group.totient());
            for i in 0..chis.len() {
                for j in i + 1..chis.len() {
                    assert!(
                        group.units().any(|u| chis[i].eval(u) != chis[j].eval(u)),
                        "q={q}: characters {i} and {j} agree on all units"
                    );
                }
            }
        }
    }

    #[test]
    fn conjugate_inverts_values() {
        for chi in enumerate_characters_mod(7, false) {
            let bar = chi.conjugate();
            for n in 1..7 {
                assert_eq!(chi.eval(n).conj(), bar.eval(n));
            }
        }
    }
}
