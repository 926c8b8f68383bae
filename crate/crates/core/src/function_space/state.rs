use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which modes of a state contribute to the field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mask {
    /// Gaussian prior: every mode active.
    Full,
    /// Random truncation: modes `1..=d_u` active.
    Truncated(usize),
    /// Sieve prior: individual on/off switches.
    Switches(Vec<bool>),
}

/// A function in whitened Karhunen–Loève coordinates plus an optional mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientState {
    z: Vec<f64>,
    mask: Mask,
}

impl CoefficientState {
    pub fn new(z: Vec<f64>) -> Self {
        Self { z, mask: Mask::Full }
    }

    pub fn truncated(z: Vec<f64>, level: usize) -> Result<Self> {
        let mut s = Self::new(z);
        s.set_truncation(level)?;
        Ok(s)
    }

    pub fn with_switches(z: Vec<f64>, switches: Vec<bool>) -> Result<Self> {
        if switches.len() != z.len() {
            return Err(Error::invalid(
                "switches",
                format!("length {} differs from mode count {}", switches.len(), z.len()),
            ));
        }
        Ok(Self {
            z,
            mask: Mask::Switches(switches),
        })
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn z_mut(&mut self) -> &mut [f64] {
        &mut self.z
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn truncation(&self) -> Option<usize> {
        match self.mask {
            Mask::Truncated(d) => Some(d),
            _ => None,
        }
    }

    pub fn switches(&self) -> Option<&[bool]> {
        match &self.mask {
            Mask::Switches(s) => Some(s),
            _ => None,
        }
    }

    pub fn set_truncation(&mut self, level: usize) -> Result<()> {
        if level == 0 || level > self.z.len() {
            return Err(Error::OutOfRange {
                index: level,
                max: self.z.len(),
            });
        }
        self.mask = Mask::Truncated(level);
        Ok(())
    }

    pub(crate) fn switches_mut(&mut self) -> Option<&mut Vec<bool>> {
        match &mut self.mask {
            Mask::Switches(s) => Some(s),
            _ => None,
        }
    }

    #[inline]
    pub fn is_active(&self, i: usize) -> bool {
        match &self.mask {
            Mask::Full => true,
            Mask::Truncated(d) => i < *d,
            Mask::Switches(s) => s[i],
        }
    }

    pub fn active_count(&self) -> usize {
        match &self.mask {
            Mask::Full => self.z.len(),
            Mask::Truncated(d) => *d,
            Mask::Switches(s) => s.iter().filter(|&&b| b).count(),
        }
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.z.len()).filter(move |&i| self.is_active(i))
    }

    /// Zero the coefficients of modes `d+1, d+2, ...`; the mask is kept.
    pub fn project(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.z.len() {
            return Err(Error::OutOfRange {
                index: d,
                max: self.z.len(),
            });
        }
        let mut out = self.clone();
        out.z[d..].iter_mut().for_each(|z| *z = 0.0);
        Ok(out)
    }

    /// `0.5 * sum of z_i^2` over active modes: half the squared Cameron–Martin
    /// norm of the field.
    pub fn prior_sq_norm(&self) -> f64 {
        0.5 * self.active_indices().map(|i| self.z[i] * self.z[i]).sum::<f64>()
    }
}
