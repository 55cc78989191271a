//! Plain-text channel description.
//!
//! A spec is a TOML document:
//!
//! ```toml
//! nx = 2
//! ns = 2
//! ny = 2
//! state_prior = [0.5, 0.5]
//! # one row per (x, s), x-major: (0,0), (0,1), (1,0), (1,1)
//! w = [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]]
//! d_min = 0
//! d_max = 1
//! ```
//!
//! `d_min` and `d_max` default to 0. Each row of `w` and the prior must sum to
//! one within 1e-9.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{DelaySet, StateChannel};
use crate::error::{Error, Result};
use crate::prob::Pmf;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    nx: usize,
    ns: usize,
    ny: usize,
    state_prior: Vec<f64>,
    w: Vec<Vec<f64>>,
    #[serde(default)]
    d_min: usize,
    #[serde(default)]
    d_max: usize,
}

fn spec_err(e: impl std::fmt::Display) -> Error {
    Error::Spec(e.to_string())
}

pub fn parse_channel_spec(text: &str) -> Result<(StateChannel, DelaySet)> {
    let doc: SpecDocument = toml::from_str(text).map_err(spec_err)?;
    if doc.state_prior.len() != doc.ns {
        return Err(spec_err(format!("state_prior has {} entries, ns = {}", doc.state_prior.len(), doc.ns)));
    }
    if doc.w.len() != doc.nx * doc.ns {
        return Err(spec_err(format!("w has {} rows, expected nx*ns = {}", doc.w.len(), doc.nx * doc.ns)));
    }
    if let Some(r) = doc.w.iter().position(|row| row.len() != doc.ny) {
        return Err(spec_err(format!("row {r} of w has length {}, ny = {}", doc.w[r].len(), doc.ny)));
    }
    let prior = Pmf::new(doc.state_prior).map_err(spec_err)?;
    let flat = doc.w.into_iter().flatten().collect();
    let channel = StateChannel::new(doc.nx, doc.ns, doc.ny, flat, prior).map_err(spec_err)?;
    Ok((channel, DelaySet::new(doc.d_min, doc.d_max)))
}

pub fn load_channel_spec(path: &Path) -> Result<(StateChannel, DelaySet)> {
    let text = std::fs::read_to_string(path).map_err(|e| spec_err(format!("{}: {e}", path.display())))?;
    parse_channel_spec(&text)
}

pub fn render_channel_spec(channel: &StateChannel, delays: &DelaySet) -> String {
    let doc = SpecDocument {
        nx: channel.nx(),
        ns: channel.ns(),
        ny: channel.ny(),
        state_prior: channel.prior().probs().to_vec(),
        w: channel.table().chunks(channel.ny()).map(<[f64]>::to_vec).collect(),
        d_min: delays.d_min(),
        d_max: delays.d_max(),
    };
    toml::to_string(&doc).expect("spec document serializes")
}
