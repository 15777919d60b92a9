//! Mixed binary/continuous observations and two-class datasets.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Class label. Class 1 is the logistic "success" class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    One,
    Two,
}

impl Class {
    pub fn index(self) -> u8 {
        match self {
            Class::One => 1,
            Class::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Class::One),
            2 => Some(Class::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Class::One => Class::Two,
            Class::Two => Class::One,
        }
    }
}

/// One observation: continuous features `z` and binary location `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedObservation {
    pub z: Vec<f64>,
    pub u: Vec<u8>,
}

impl MixedObservation {
    pub fn new(z: Vec<f64>, u: Vec<u8>) -> Result<Self> {
        if u.iter().any(|&b| b > 1) {
            return Err(Error::NonBinaryLocation);
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation features"));
        }
        Ok(MixedObservation { z, u })
    }
}

/// Two labelled samples sharing feature width `p` and location width `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDataset {
    class1: Vec<MixedObservation>,
    class2: Vec<MixedObservation>,
    p: usize,
    d: usize,
}

impl MixedDataset {
    pub fn new(class1: Vec<MixedObservation>, class2: Vec<MixedObservation>) -> Result<Self> {
        let first = class1.first().or(class2.first()).ok_or(Error::EmptySample("dataset"))?;
        let (p, d) = (first.z.len(), first.u.len());
        Self::with_dims(class1, class2, p, d)
    }

    /// Like [`MixedDataset::new`] but with explicit widths; allows an empty class
    /// (used for test sets that only contain one label).
    pub fn with_dims(class1: Vec<MixedObservation>, class2: Vec<MixedObservation>, p: usize, d: usize) -> Result<Self> {
        for obs in class1.iter().chain(&class2) {
            if obs.z.len() != p {
                return Err(Error::mismatch("feature width", p, obs.z.len()));
            }
            if obs.u.len() != d {
                return Err(Error::mismatch("location width", d, obs.u.len()));
            }
            if obs.u.iter().any(|&b| b > 1) {
                return Err(Error::NonBinaryLocation);
            }
            if obs.z.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("observation features"));
            }
        }
        Ok(MixedDataset { class1, class2, p, d })
    }

    pub fn class(&self, c: Class) -> &[MixedObservation] {
        match c {
            Class::One => &self.class1,
            Class::Two => &self.class2,
        }
    }

    pub fn class1(&self) -> &[MixedObservation] {
        &self.class1
    }

    pub fn class2(&self) -> &[MixedObservation] {
        &self.class2
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n1(&self) -> usize {
        self.class1.len()
    }

    pub fn n2(&self) -> usize {
        self.class2.len()
    }

    pub fn len(&self) -> usize {
        self.class1.len() + self.class2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_both_classes(&self) -> bool {
        !self.class1.is_empty() && !self.class2.is_empty()
    }

    /// All observations with their labels, class 1 first.
    pub fn iter_labelled(&self) -> impl Iterator<Item = (Class, &MixedObservation)> {
        self.class1
            .iter()
            .map(|o| (Class::One, o))
            .chain(self.class2.iter().map(|o| (Class::Two, o)))
    }

    /// Copy of the dataset with one observation physically removed.
    pub fn without(&self, class: Class, index: usize) -> Self {
        let mut out = self.clone();
        match class {
            Class::One => out.class1.remove(index),
            Class::Two => out.class2.remove(index),
        };
        out
    }

    /// Same observations with every label flipped.
    pub fn swapped(&self) -> Self {
        MixedDataset {
            class1: self.class2.clone(),
            class2: self.class1.clone(),
            p: self.p,
            d: self.d,
        }
    }
}
