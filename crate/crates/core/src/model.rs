//! SSH-Hubbard chain parameters and the single-particle hopping matrix.
//!
//! Sites are 0-indexed internally. The bond rule is easiest to state with
//! 1-indexed sites: bond `(i, i+1)` carries `-(t + δt)` for odd `i` and
//! `-(t - δt)` for even `i`. Two neighbouring sites `(odd, even)` form a unit
//! cell, so the chain length must be even. On a ring the wrap bond `(L, 1)`
//! starts from the even site `L` and therefore carries `-(t - δt)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of sites `L`.
    #[serde(rename = "L")]
    pub sites: usize,
    /// Reference hopping amplitude.
    pub t: f64,
    /// Dimerization `δt`.
    pub delta_t: f64,
    /// On-site Hubbard interaction.
    #[serde(rename = "U")]
    pub u: f64,
}

impl ModelParams {
    pub fn new(sites: usize, t: f64, delta_t: f64, u: f64) -> Self {
        Self {
            sites,
            t,
            delta_t,
            u,
        }
    }

    /// Parameters with `t = 1`.
    pub fn unit_hopping(sites: usize, delta_t: f64, u: f64) -> Self {
        Self::new(sites, 1.0, delta_t, u)
    }

    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }

    /// Hopping amplitude on the bond leaving 0-indexed site `s` towards `s + 1`.
    pub fn bond_amplitude(&self, s: usize) -> f64 {
        if s % 2 == 0 {
            -(self.t + self.delta_t)
        } else {
            -(self.t - self.delta_t)
        }
    }
}

pub fn validate_params(raw: ModelParams) -> Result<ModelParams> {
    if raw.sites < 4 {
        return Err(Error::InvalidParams(format!(
            "L = {} is below the minimum of 4 sites",
            raw.sites
        )));
    }
    if raw.sites % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "L = {} is odd; the chain is built from two-site unit cells",
            raw.sites
        )));
    }
    if !(raw.t.is_finite() && raw.delta_t.is_finite() && raw.u.is_finite()) {
        return Err(Error::InvalidParams(
            "t, delta_t and U must be finite".into(),
        ));
    }
    if raw.t <= 0.0 {
        return Err(Error::InvalidParams(format!("t = {} must be positive", raw.t)));
    }
    Ok(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BoundaryCondition {
    /// Closed ring.
    Pbc,
    /// Open chain.
    Obc,
}

/// Subsystem made of the first `len` sites of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSpec {
    #[serde(rename = "L_A")]
    pub len: usize,
}

impl CutSpec {
    pub fn new(len: usize) -> Self {
        Self { len }
    }

    /// Half of the chain.
    pub fn half(params: &ModelParams) -> Self {
        Self::new(params.sites / 2)
    }

    pub fn validate(self, sites: usize) -> Result<Self> {
        if self.len % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "L_A = {} is odd; cuts must fall between unit cells",
                self.len
            )));
        }
        if self.len < 2 || self.len + 2 > sites {
            return Err(Error::InvalidParams(format!(
                "L_A = {} must satisfy 2 <= L_A <= L - 2 = {}",
                self.len,
                sites.saturating_sub(2)
            )));
        }
        Ok(self)
    }
}

/// One nearest-neighbour bond, 0-indexed, with its hopping amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub amplitude: f64,
}

/// Bonds of the chain: `(s, s+1)` for every `s < L-1`, plus `(L-1, 0)` on a ring.
pub fn bonds(params: &ModelParams, bc: BoundaryCondition) -> Vec<Bond> {
    let l = params.sites;
    let mut out: Vec<Bond> = (0..l - 1)
        .map(|s| Bond {
            i: s,
            j: s + 1,
            amplitude: params.bond_amplitude(s),
        })
        .collect();
    if bc == BoundaryCondition::Pbc {
        out.push(Bond {
            i: l - 1,
            j: 0,
            amplitude: params.bond_amplitude(l - 1),
        });
    }
    out
}

/// Dense single-particle hopping matrix (identical for both spin species).
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMatrix(DMatrix<f64>);

impl HoppingMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

impl From<DMatrix<f64>> for HoppingMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "hopping matrix must be square");
        Self(m)
    }
}

pub fn build_hopping_matrix(params: &ModelParams, bc: BoundaryCondition) -> HoppingMatrix {
    let l = params.sites;
    let mut m = DMatrix::zeros(l, l);
    for b in bonds(params, bc) {
        m[(b.i, b.j)] = b.amplitude;
        m[(b.j, b.i)] = b.amplitude;
    }
    HoppingMatrix(m)
}
