//! Dense truncated power series in a handful of variables.
//!
//! A [`TruncatedSeries`] stores one coefficient per monomial of total degree
//! at most `N`, in graded order. Products, derivatives, canonical Poisson
//! brackets and substitutions all truncate at `N`. The exponent tables are
//! shared between series of the same shape through a process-wide cache.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::{One, Zero};

const NONE: u32 = u32::MAX;
const MAX_VARS: usize = 8;
const MAX_DEGREE: usize = 24;

/// Scalar type usable as a series coefficient.
pub trait Coeff:
    Copy
    + Send
    + Sync
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn from_real(x: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Coeff for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Coeff for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Monomial bookkeeping for a fixed (variable count, maximal degree).
pub struct Basis {
    nvars: usize,
    max_degree: usize,
    exponents: Vec<[u8; MAX_VARS]>,
    degrees: Vec<usize>,
    /// Number of monomials of degree `<= d`, indexed by `d`.
    upto: Vec<usize>,
    lookup: HashMap<u64, u32>,
    /// `products[i * len + j]` is the index of `x^(e_i + e_j)`, or `NONE`.
    products: Vec<u32>,
    /// `lower[v * len + i]` is the index of `x^(e_i - u_v)`, or `NONE`.
    lower: Vec<u32>,
}

fn key(e: &[u8; MAX_VARS]) -> u64 {
    e.iter().enumerate().fold(0u64, |k, (i, &x)| k | ((x as u64) << (8 * i)))
}

impl Basis {
    fn build(nvars: usize, max_degree: usize) -> Basis {
        assert!((1..=MAX_VARS).contains(&nvars), "series support 1..=8 variables");
        assert!(max_degree <= MAX_DEGREE, "series degree capped at {MAX_DEGREE}");

        let mut exponents = Vec::new();
        let mut degrees = Vec::new();
        let mut upto = Vec::with_capacity(max_degree + 1);
        for d in 0..=max_degree {
            let mut current = [0u8; MAX_VARS];
            push_compositions(d, 0, nvars, &mut current, &mut exponents);
            degrees.resize(exponents.len(), d);
            upto.push(exponents.len());
        }
        let len = exponents.len();
        let lookup: HashMap<u64, u32> =
            exponents.iter().enumerate().map(|(i, e)| (key(e), i as u32)).collect();

        let mut products = vec![NONE; len * len];
        for i in 0..len {
            let room = max_degree - degrees[i];
            for j in 0..upto[room] {
                let mut e = exponents[i];
                for v in 0..nvars {
                    e[v] += exponents[j][v];
                }
                products[i * len + j] = lookup[&key(&e)];
            }
        }

        let mut lower = vec![NONE; nvars * len];
        for v in 0..nvars {
            for (i, e) in exponents.iter().enumerate() {
                if e[v] > 0 {
                    let mut f = *e;
                    f[v] -= 1;
                    lower[v * len + i] = lookup[&key(&f)];
                }
            }
        }

        Basis { nvars, max_degree, exponents, degrees, upto, lookup, products, lower }
    }

    /// Shared basis for the given shape.
    pub fn get(nvars: usize, max_degree: usize) -> Arc<Basis> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<Basis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("series basis cache poisoned");
        guard
            .entry((nvars, max_degree))
            .or_insert_with(|| Arc::new(Basis::build(nvars, max_degree)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn exponent(&self, i: usize) -> &[u8] {
        &self.exponents[i][..self.nvars]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// Index range holding the monomials of exactly degree `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        let start = if d == 0 { 0 } else { self.upto[d - 1] };
        start..self.upto[d]
    }

    pub fn index_of(&self, exponent: &[u8]) -> Option<usize> {
        if exponent.len() != self.nvars {
            return None;
        }
        let mut e = [0u8; MAX_VARS];
        e[..self.nvars].copy_from_slice(exponent);
        self.lookup.get(&key(&e)).map(|&i| i as usize)
    }
}

fn push_compositions(
    remaining: usize,
    var: usize,
    nvars: usize,
    current: &mut [u8; MAX_VARS],
    out: &mut Vec<[u8; MAX_VARS]>,
) {
    if var == nvars - 1 {
        current[var] = remaining as u8;
        out.push(*current);
        current[var] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_compositions(remaining - k, var + 1, nvars, current, out);
    }
    current[var] = 0;
}

/// Multivariate polynomial truncated at a fixed total degree.
#[derive(Clone)]
pub struct TruncatedSeries<T: Coeff> {
    basis: Arc<Basis>,
    coeffs: Vec<T>,
}

impl<T: Coeff> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                list.entry(&self.basis.exponent(i), c);
            }
        }
        list.finish()
    }
}

impl<T: Coeff> TruncatedSeries<T> {
    pub fn zero(nvars: usize, max_degree: usize) -> Self {
        let basis = Basis::get(nvars, max_degree);
        let coeffs = vec![T::zero(); basis.len()];
        TruncatedSeries { basis, coeffs }
    }

    pub fn constant(nvars: usize, max_degree: usize, c: T) -> Self {
        let mut s = Self::zero(nvars, max_degree);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function `x_var`.
    pub fn variable(nvars: usize, max_degree: usize, var: usize) -> Self {
        let mut s = Self::zero(nvars, max_degree);
        if max_degree >= 1 {
            let mut e = vec![0u8; nvars];
            e[var] = 1;
            s.set(&e, T::one());
        }
        s
    }

    /// Zero series of the same shape.
    pub fn zero_like(&self) -> Self {
        TruncatedSeries { basis: self.basis.clone(), coeffs: vec![T::zero(); self.coeffs.len()] }
    }

    pub fn constant_like(&self, c: T) -> Self {
        let mut s = self.zero_like();
        s.coeffs[0] = c;
        s
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.basis.max_degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, exponent: &[u8]) -> T {
        self.basis.index_of(exponent).map_or(T::zero(), |i| self.coeffs[i])
    }

    /// Sets a coefficient; exponents beyond the truncation degree are ignored.
    pub fn set(&mut self, exponent: &[u8], value: T) {
        if let Some(i) = self.basis.index_of(exponent) {
            self.coeffs[i] = value;
        }
    }

    pub fn constant_term(&self) -> T {
        self.coeffs[0]
    }

    /// Nonzero terms as (exponent, coefficient) pairs in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.basis.exponent(i), c))
    }

    /// Keeps only the terms whose degree lies in `lo..=hi`.
    pub fn degree_slice(&self, lo: usize, hi: usize) -> Self {
        let mut out = self.zero_like();
        for d in lo..=hi.min(self.max_degree()) {
            for i in self.basis.degree_range(d) {
                out.coeffs[i] = self.coeffs[i];
            }
        }
        out
    }

    pub fn homogeneous(&self, d: usize) -> Self {
        self.degree_slice(d, d)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Lowest degree carrying a coefficient above `tol`, if any.
    pub fn order(&self, tol: f64) -> Option<usize> {
        (0..=self.max_degree()).find(|&d| {
            self.basis.degree_range(d).any(|i| self.coeffs[i].magnitude() > tol)
        })
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> TruncatedSeries<U> {
        TruncatedSeries { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    /// Same series reinterpreted with a different truncation degree.
    pub fn retruncate(&self, max_degree: usize) -> Self {
        let mut out = Self::zero(self.nvars(), max_degree);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if self.basis.degree(i) <= max_degree && !c.is_zero() {
                out.set(self.basis.exponent(i), c);
            }
        }
        out
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|x| x * c)
    }

    fn assert_same_shape(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.basis, &other.basis)
                || (self.nvars() == other.nvars() && self.max_degree() == other.max_degree()),
            "series shape mismatch"
        );
    }

    /// Truncated product.
    pub fn mul_series(&self, other: &Self) -> Self {
        self.assert_same_shape(other);
        let b = &*self.basis;
        let len = b.len();
        let mut out = vec![T::zero(); len];
        let nz: Vec<(usize, T)> =
            other.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, &c)| (j, c)).collect();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let room = b.upto[b.max_degree - b.degrees[i]];
            let row = &b.products[i * len..(i + 1) * len];
            for &(j, c) in &nz {
                if j >= room {
                    break;
                }
                out[row[j] as usize] += a * c;
            }
        }
        TruncatedSeries { basis: self.basis.clone(), coeffs: out }
    }

    pub fn powi(&self, k: usize) -> Self {
        let mut acc = self.constant_like(T::one());
        for _ in 0..k {
            acc = acc.mul_series(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let b = &*self.basis;
        let len = b.len();
        let mut out = vec![T::zero(); len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = b.exponents[i][var];
            if k == 0 || c.is_zero() {
                continue;
            }
            let target = b.lower[var * len + i] as usize;
            out[target] += c * T::from_real(k as f64);
        }
        TruncatedSeries { basis: self.basis.clone(), coeffs: out }
    }

    /// Canonical Poisson bracket for variables ordered `(q_1..q_n, p_1..p_n)`
    /// with `{q_i, p_i} = 1`.
    pub fn poisson(&self, other: &Self) -> Self {
        let n = self.nvars();
        assert!(n.is_multiple_of(2), "canonical bracket needs an even number of variables");
        let half = n / 2;
        let mut acc = self.zero_like();
        for i in 0..half {
            let fq = self.derivative(i);
            let fp = self.derivative(i + half);
            let gq = other.derivative(i);
            let gp = other.derivative(i + half);
            acc = acc + fq.mul_series(&gp) - fp.mul_series(&gq);
        }
        acc
    }

    /// `sum_k coeffs[k] * self^k`; `self` must have no constant term.
    pub fn compose_univariate(&self, coeffs: &[T]) -> Self {
        let mut acc = self.zero_like();
        let mut power = self.constant_like(T::one());
        for (k, &c) in coeffs.iter().enumerate() {
            if k > self.max_degree() {
                break;
            }
            if !c.is_zero() {
                acc = acc + power.scale(c);
            }
            power = power.mul_series(self);
        }
        acc
    }

    /// Substitutes `x_v = subs[v]` for every variable. The substitutions all
    /// share one shape, which becomes the shape of the result; they must not
    /// carry constant terms.
    pub fn compose<U: Coeff + From<T>>(&self, subs: &[TruncatedSeries<U>]) -> TruncatedSeries<U> {
        assert_eq!(subs.len(), self.nvars(), "one substitution per variable");
        let target = subs[0].basis.clone();
        let mut result = TruncatedSeries::<U> { basis: target.clone(), coeffs: vec![U::zero(); target.len()] };
        let b = &*self.basis;
        let len = b.len();
        let top = b.max_degree.min(target.max_degree);

        // Images of the monomials of the previous degree only.
        let mut prev: Vec<TruncatedSeries<U>> = vec![result.constant_like(U::one())];
        let mut prev_start = 0usize;
        result.coeffs[0] += U::from(self.coeffs[0]);
        for d in 1..=top {
            let range = b.degree_range(d);
            let mut layer = Vec::with_capacity(range.len());
            for i in range.clone() {
                let e = &b.exponents[i];
                let v = (0..b.nvars).find(|&v| e[v] > 0).expect("degree >= 1");
                let parent = b.lower[v * len + i] as usize;
                let img = prev[parent - prev_start].mul_series(&subs[v]);
                let c = self.coeffs[i];
                if !c.is_zero() {
                    result = result + img.scale(U::from(c));
                }
                layer.push(img);
            }
            prev = layer;
            prev_start = range.start;
        }
        result
    }

    /// Evaluates the polynomial at a point.
    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars());
        let n = self.max_degree();
        let powers: Vec<Vec<T>> = point
            .iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(n + 1);
                let mut acc = T::one();
                for _ in 0..=n {
                    p.push(acc);
                    acc = acc * x;
                }
                p
            })
            .collect();
        let mut total = T::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = &self.basis.exponents[i];
            let mut m = c;
            for (v, pw) in powers.iter().enumerate() {
                m = m * pw[e[v] as usize];
            }
            total += m;
        }
        total
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.assert_same_shape(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a - b).magnitude())
            .fold(0.0, f64::max)
    }
}

impl TruncatedSeries<f64> {
    /// Symmetric matrix `S` of the quadratic part, `f_2 = x^T S x / 2`.
    pub fn hessian(&self) -> Vec<Vec<f64>> {
        let n = self.nvars();
        let mut h = vec![vec![0.0; n]; n];
        for i in self.basis.degree_range(2) {
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            let e = self.basis.exponent(i);
            let vars: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, e[v] as usize)).collect();
            let (a, b) = (vars[0], vars[1]);
            if a == b {
                h[a][a] = 2.0 * c;
            } else {
                h[a][b] = c;
                h[b][a] = c;
            }
        }
        h
    }

    /// Gradient (linear part).
    pub fn gradient(&self) -> Vec<f64> {
        let n = self.nvars();
        (0..n)
            .map(|v| {
                let mut e = vec![0u8; n];
                e[v] = 1;
                self.coeff(&e)
            })
            .collect()
    }

    /// `sqrt(1 - self)` for a series without constant term.
    pub fn sqrt_one_minus(&self) -> Self {
        // binomial(1/2, k) (-1)^k
        let mut coeffs = Vec::with_capacity(self.max_degree() + 1);
        let mut c = 1.0;
        for k in 0..=self.max_degree() {
            coeffs.push(c);
            let kf = k as f64;
            c *= -(0.5 - kf) / (kf + 1.0);
        }
        self.compose_univariate(&coeffs)
    }
}

impl TruncatedSeries<Complex64> {
    /// Real part, together with the largest imaginary coefficient dropped.
    pub fn real_part(&self) -> (TruncatedSeries<f64>, f64) {
        let im = self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        (self.map(|c| c.re), im)
    }
}

impl<T: Coeff> Add for TruncatedSeries<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.assert_same_shape(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl<T: Coeff> Sub for TruncatedSeries<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.assert_same_shape(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl<T: Coeff> Mul for TruncatedSeries<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_series(&rhs)
    }
}

impl<'a, T: Coeff> Mul<&'a TruncatedSeries<T>> for &'a TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        self.mul_series(rhs)
    }
}

impl<T: Coeff> Neg for TruncatedSeries<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl<T: Coeff> Add<T> for TruncatedSeries<T> {
    type Output = Self;
    fn add(mut self, rhs: T) -> Self {
        self.coeffs[0] += rhs;
        self
    }
}

impl<T: Coeff> Mul<T> for TruncatedSeries<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

/// Arithmetic needed to evaluate the catalog observables, either on plain
/// numbers or on truncated series (which yields exact Taylor expansions).
pub trait Field:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Add<f64, Output = Self> + Mul<f64, Output = Self>
{
    /// `sqrt(1 - self)`, for arguments near zero.
    fn sqrt_one_minus(&self) -> Self;
}

impl Field for f64 {
    fn sqrt_one_minus(&self) -> Self {
        (1.0 - self).sqrt()
    }
}

impl Field for TruncatedSeries<f64> {
    fn sqrt_one_minus(&self) -> Self {
        let c = self.constant_term();
        if c == 0.0 {
            TruncatedSeries::sqrt_one_minus(self)
        } else {
            // sqrt(1 - c - x) = sqrt(1 - c) * sqrt(1 - x / (1 - c))
            let k = 1.0 - c;
            let x = (self.clone() + (-c)) * (1.0 / k);
            TruncatedSeries::sqrt_one_minus(&x) * k.sqrt()
        }
    }
}
