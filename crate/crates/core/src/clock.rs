//! Clocks: time units of power-of-two size structured by graduations, their
//! dual cubes, factorizations into nested clocks, and 2-adic coloring.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClockError {
    #[error("{what} {value} is not a power of two")]
    NotPowerOfTwo { what: &'static str, value: u64 },
    #[error("a clock needs at least one graduation")]
    Empty,
    #[error("graduation {next} does not strictly divide {prev}")]
    NotNested { prev: u64, next: u64 },
    #[error("unit span {unit} does not divide clock span {clock}")]
    NotDivisible { clock: u64, unit: u64 },
    #[error("clock {unit} is not a factor of clock {clock}")]
    NotAFactor { clock: String, unit: String },
    #[error("clock span overflows u64")]
    Overflow,
}

pub fn is_pow2(v: u64) -> bool {
    v != 0 && v & (v - 1) == 0
}

/// Ordered power-of-two graduations. A point of the clock is a linear
/// combination of graduations with coefficients in `0..rate`; for uniform
/// clocks each graduation is `rate` times the next one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clock {
    graduations: Vec<u64>,
    rate: u64,
}

impl Clock {
    pub fn new(graduations: Vec<u64>, rate: u64) -> Result<Self, ClockError> {
        if graduations.is_empty() {
            return Err(ClockError::Empty);
        }
        if !is_pow2(rate) || rate < 2 {
            return Err(ClockError::NotPowerOfTwo { what: "rate", value: rate });
        }
        for &g in &graduations {
            if !is_pow2(g) {
                return Err(ClockError::NotPowerOfTwo { what: "graduation", value: g });
            }
        }
        for w in graduations.windows(2) {
            if w[1] >= w[0] {
                return Err(ClockError::NotNested { prev: w[0], next: w[1] });
            }
        }
        graduations[0].checked_mul(rate).ok_or(ClockError::Overflow)?;
        Ok(Clock { graduations, rate })
    }

    pub fn graduations(&self) -> &[u64] {
        &self.graduations
    }

    pub fn rate(&self) -> u64 {
        self.rate
    }

    pub fn dimension(&self) -> usize {
        self.graduations.len()
    }

    /// Size of the time unit: largest graduation times the rate.
    pub fn span(&self) -> u64 {
        self.graduations[0] * self.rate
    }

    pub fn point_count(&self) -> u64 {
        self.rate.pow(self.graduations.len() as u32)
    }

    pub fn is_uniform(&self) -> bool {
        self.graduations.windows(2).all(|w| w[0] == w[1] * self.rate)
    }

    /// Uniform with finest graduation 1: the points are exactly `0..span`.
    pub fn is_dense(&self) -> bool {
        self.is_uniform() && *self.graduations.last().unwrap() == 1
    }

    pub fn contains(&self, graduation: u64) -> bool {
        self.graduations.contains(&graduation)
    }

    /// Same shape with every graduation multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Clock, ClockError> {
        if !is_pow2(factor) {
            return Err(ClockError::NotPowerOfTwo { what: "scale", value: factor });
        }
        let grads =
            self.graduations.iter().map(|g| g.checked_mul(factor).ok_or(ClockError::Overflow)).collect::<Result<Vec<_>, _>>()?;
        Clock::new(grads, self.rate)
    }
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.graduations.iter().map(u64::to_string).collect();
        write!(f, "({}) rate {}", parts.join(","), self.rate)
    }
}

/// A uniform `k`-clock with the given rate and finest graduation 1.
pub fn make_clock(k: usize, rate: u64) -> Result<Clock, ClockError> {
    if k == 0 {
        return Err(ClockError::Empty);
    }
    if !is_pow2(rate) || rate < 2 {
        return Err(ClockError::NotPowerOfTwo { what: "rate", value: rate });
    }
    let mut grads = Vec::with_capacity(k);
    let mut g: u64 = 1;
    for _ in 0..k {
        grads.push(g);
        g = g.checked_mul(rate).ok_or(ClockError::Overflow)?;
    }
    grads.reverse();
    Clock::new(grads, rate)
}

/// Coefficient tuples in lexicographic order, outermost graduation most
/// significant.
pub fn clock_tuples(clock: &Clock) -> Vec<Vec<u64>> {
    let k = clock.dimension();
    let mut out = Vec::with_capacity(clock.point_count() as usize);
    let mut cur = vec![0u64; k];
    for _ in 0..clock.point_count() {
        out.push(cur.clone());
        for d in (0..k).rev() {
            cur[d] += 1;
            if cur[d] < clock.rate {
                break;
            }
            cur[d] = 0;
        }
    }
    out
}

/// Time values of the clock points, in [`clock_tuples`] order.
pub fn clock_points(clock: &Clock) -> Vec<u64> {
    clock_tuples(clock).into_iter().map(|t| t.iter().zip(&clock.graduations).map(|(c, g)| c * g).sum()).collect()
}

/// `k` segments of `side` points each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub dimension: usize,
    pub side: u64,
}

impl Cube {
    pub fn point_count(&self) -> u64 {
        self.side.pow(self.dimension as u32)
    }

    /// Cube points in lexicographic order.
    pub fn points(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(self.point_count() as usize);
        let mut cur = vec![0u64; self.dimension];
        for _ in 0..self.point_count() {
            out.push(cur.clone());
            for d in (0..self.dimension).rev() {
                cur[d] += 1;
                if cur[d] < self.side {
                    break;
                }
                cur[d] = 0;
            }
        }
        out
    }
}

/// The clock of a cube: one graduation per main-diagonal direction, rate
/// equal to the side.
pub fn cube_to_clock(cube: Cube) -> Result<Clock, ClockError> {
    if !is_pow2(cube.side) || cube.side < 2 {
        return Err(ClockError::NotPowerOfTwo { what: "cube side", value: cube.side });
    }
    make_clock(cube.dimension, cube.side)
}

/// Recovers cube coordinates from a time value of a dense clock by
/// successive division.
pub fn decode_time(clock: &Clock, time: u64) -> Vec<u64> {
    clock.graduations.iter().map(|g| (time / g) % clock.rate).collect()
}

/// Splits `clock` into nested clocks, outermost first, the last one being
/// `unit`. Each point of an outer clock is the origin of a copy of the next
/// inner clock.
pub fn factorize(clock: &Clock, unit: &Clock) -> Result<Vec<Clock>, ClockError> {
    let (span, unit_span) = (clock.span(), unit.span());
    if unit_span > span || span % unit_span != 0 {
        return Err(ClockError::NotDivisible { clock: span, unit: unit_span });
    }
    let factors = if span == unit_span {
        vec![unit.clone()]
    } else {
        let ratio = span / unit_span;
        let rate = if is_power_of(ratio, unit.rate) { unit.rate } else { 2 };
        let mut grads = Vec::new();
        let mut g = span / rate;
        while g >= unit_span {
            grads.push(g);
            g /= rate;
        }
        vec![Clock::new(grads, rate)?, unit.clone()]
    };
    let mut composed = compose(&factors);
    let mut expected = clock_points(clock);
    composed.sort_unstable();
    expected.sort_unstable();
    if composed != expected {
        return Err(ClockError::NotAFactor { clock: clock.to_string(), unit: unit.to_string() });
    }
    Ok(factors)
}

fn is_power_of(v: u64, base: u64) -> bool {
    let mut x = 1u64;
    while x < v {
        x = x.saturating_mul(base);
    }
    x == v
}

/// Enumerates nested clocks: every point of `factors[i]` is an origin for
/// the points of `factors[i + 1]`.
pub fn compose(factors: &[Clock]) -> Vec<u64> {
    factors.iter().fold(vec![0u64], |origins, clock| {
        let inner = clock_points(clock);
        origins.iter().flat_map(|o| inner.iter().map(move |p| o + p)).collect()
    })
}

/// Exponent of the smallest power of two in a value's binary decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Color(pub u32);

/// 2-adic valuation clamped to `k`; the origin gets the dedicated color `k`.
pub fn color_of(value: u64, k: u32) -> Color {
    if value == 0 {
        Color(k)
    } else {
        Color(value.trailing_zeros().min(k))
    }
}

pub fn color_histogram(values: impl IntoIterator<Item = u64>, k: u32) -> BTreeMap<u32, u64> {
    let mut hist = BTreeMap::new();
    for v in values {
        *hist.entry(color_of(v, k).0).or_insert(0) += 1;
    }
    hist
}
