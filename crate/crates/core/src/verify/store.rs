use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{FromPrimitive, Num};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ir::ComputationSpec;

/// Exact scalar the interpreter computes with.
pub trait Scalar: Num + Clone + Debug + PartialEq + FromPrimitive + Send + Sync {}

impl<T: Num + Clone + Debug + PartialEq + FromPrimitive + Send + Sync> Scalar for T {}

/// Row-major dense array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseArray<S> {
    pub shape: Vec<u64>,
    pub data: Vec<S>,
}

impl<S: Scalar> DenseArray<S> {
    pub fn zeros(shape: Vec<u64>) -> Self {
        let n = shape.iter().product::<u64>() as usize;
        DenseArray { shape, data: vec![S::zero(); n] }
    }

    fn offset(&self, loc: &[u64]) -> Option<usize> {
        if loc.len() != self.shape.len() {
            return None;
        }
        let mut off = 0u64;
        for (&x, &n) in loc.iter().zip(&self.shape) {
            if x >= n {
                return None;
            }
            off = off * n + x;
        }
        Some(off as usize)
    }

    pub fn get(&self, loc: &[u64]) -> Option<&S> {
        self.offset(loc).map(|o| &self.data[o])
    }
}

/// Named arrays of a computation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayStore<S> {
    pub arrays: BTreeMap<String, DenseArray<S>>,
}

impl<S: Scalar> ArrayStore<S> {
    /// Every array of `spec`, zero filled.
    pub fn zeros(spec: &ComputationSpec) -> Self {
        let arrays = spec.array_shapes().into_iter().map(|(a, shape)| (a, DenseArray::zeros(shape))).collect();
        ArrayStore { arrays }
    }

    /// Every array of `spec` (outputs too, since accumulations and
    /// self-references read their initial values) filled with integers in
    /// `-range..=range`.
    pub fn random(spec: &ComputationSpec, rng: &mut impl Rng, range: i64) -> Self {
        let mut store = Self::zeros(spec);
        for arr in store.arrays.values_mut() {
            for x in &mut arr.data {
                *x = S::from_i64(rng.gen_range(-range..=range)).expect("scalar holds small integers");
            }
        }
        store
    }

    /// Builds a store from explicit row-major values.
    pub fn with_array(mut self, name: &str, shape: Vec<u64>, values: &[i64]) -> Self {
        let mut arr = DenseArray::zeros(shape);
        assert_eq!(arr.data.len(), values.len(), "value count does not match shape");
        for (x, &v) in arr.data.iter_mut().zip(values) {
            *x = S::from_i64(v).expect("scalar holds small integers");
        }
        self.arrays.insert(name.to_string(), arr);
        self
    }

    /// Same arrays with every value converted by `f`.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ArrayStore<T> {
        let arrays = self
            .arrays
            .iter()
            .map(|(n, a)| (n.clone(), DenseArray { shape: a.shape.clone(), data: a.data.iter().map(&f).collect() }))
            .collect();
        ArrayStore { arrays }
    }

    /// Value at `loc`; missing arrays and out-of-range locations read zero.
    pub fn get(&self, array: &str, loc: &[u64]) -> S {
        self.arrays.get(array).and_then(|a| a.get(loc)).cloned().unwrap_or_else(S::zero)
    }

    /// Returns false when the location does not exist.
    pub fn set(&mut self, array: &str, loc: &[u64], value: S) -> bool {
        match self.arrays.get_mut(array).and_then(|a| a.offset(loc).map(|o| (o, a))) {
            Some((o, a)) => {
                a.data[o] = value;
                true
            }
            None => false,
        }
    }

    /// Values of a 2-D array as rows.
    pub fn rows(&self, array: &str) -> Vec<Vec<S>> {
        let a = &self.arrays[array];
        let cols = a.shape.get(1).copied().unwrap_or(1).max(1) as usize;
        a.data.chunks(cols).map(<[S]>::to_vec).collect()
    }

    /// Cells where the two stores differ, as `array[loc]: left != right`.
    pub fn diff(&self, other: &Self) -> Vec<String> {
        let mut out = Vec::new();
        let names: std::collections::BTreeSet<&String> = self.arrays.keys().chain(other.arrays.keys()).collect();
        for name in names {
            match (self.arrays.get(name), other.arrays.get(name)) {
                (Some(a), Some(b)) if a.shape == b.shape => {
                    let idx = DenseArray::<S>::zeros(a.shape.clone());
                    for (i, (x, y)) in a.data.iter().zip(&b.data).enumerate() {
                        if x != y {
                            out.push(format!("{name}{:?}: {x:?} != {y:?}", unflatten(&idx.shape, i)));
                        }
                    }
                }
                _ => out.push(format!("{name}: present or shaped differently on one side")),
            }
        }
        out
    }
}

fn unflatten(shape: &[u64], mut i: usize) -> Vec<u64> {
    let mut out = vec![0; shape.len()];
    for d in (0..shape.len()).rev() {
        let n = shape[d] as usize;
        out[d] = (i % n) as u64;
        i /= n;
    }
    out
}
