use crate::error::{Error, Result};
use crate::linalg::{c64, identity, Mat};
use crate::words::Word;

/// An `n`-tuple of equally sized square complex matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorTuple {
    mats: Vec<Mat>,
}

impl OperatorTuple {
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::Shape("operator tuple needs at least one component".into()));
        };
        let d = first.nrows();
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Shape(format!(
                    "component {} is {}x{}, expected {d}x{d}",
                    i + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { mats })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self { mats: vec![Mat::zeros(d, d); n] }
    }

    /// Scalar tuple (`d = 1`).
    pub fn scalars(values: &[f64]) -> Self {
        Self { mats: values.iter().map(|&v| Mat::from_element(1, 1, c64(v))).collect() }
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn get(&self, i: usize) -> &Mat {
        &self.mats[i]
    }

    pub fn components(&self) -> &[Mat] {
        &self.mats
    }

    pub fn into_components(self) -> Vec<Mat> {
        self.mats
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { mats: self.mats.iter().map(|m| m * c64(s)).collect() }
    }

    pub fn expect_n(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::GeneratorMismatch { expected: n, found: self.n() });
        }
        Ok(())
    }

    /// `X_α = X_{i_1} ⋯ X_{i_k}`.
    pub fn monomial(&self, word: &Word) -> Mat {
        let mut acc = identity(self.dim());
        for &l in word.letters() {
            acc = &acc * &self.mats[l];
        }
        acc
    }

    /// Monomials for many words, sharing prefix products.
    pub fn monomials<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> Vec<Mat> {
        let mut order: Vec<(usize, &Word)> = words.into_iter().enumerate().collect();
        order.sort_by(|a, b| a.1.letters().cmp(b.1.letters()));
        let mut out = vec![Mat::zeros(0, 0); order.len()];
        // stack[k] = product of the first k letters of the current path
        let mut path: Vec<usize> = Vec::new();
        let mut stack: Vec<Mat> = vec![identity(self.dim())];
        for (slot, w) in order {
            let letters = w.letters();
            let common = path.iter().zip(letters).take_while(|(a, b)| a == b).count();
            path.truncate(common);
            stack.truncate(common + 1);
            for &l in &letters[common..] {
                let next = stack.last().unwrap() * &self.mats[l];
                stack.push(next);
                path.push(l);
            }
            out[slot] = stack.last().unwrap().clone();
        }
        out
    }
}
