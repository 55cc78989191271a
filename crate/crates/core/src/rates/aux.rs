use crate::channel::StateChannel;
use crate::error::{dim, invalid, Result};
use crate::prob::normalized;

/// Conditional law `P(u, x | a)` of the auxiliary and the input given the
/// encoder's state observation. Layout `[(a * nu + u) * nx + x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxDistribution {
    nu: usize,
    nx: usize,
    na: usize,
    table: Vec<f64>,
}

impl AuxDistribution {
    pub fn new(nu: usize, nx: usize, na: usize, table: Vec<f64>) -> Result<Self> {
        if nu == 0 || nx == 0 || na == 0 {
            return Err(invalid("empty auxiliary alphabet"));
        }
        if table.len() != nu * nx * na {
            return Err(dim(format!(
                "auxiliary table has {} entries, expected {}",
                table.len(),
                nu * nx * na
            )));
        }
        let mut out = Vec::with_capacity(table.len());
        for (a, slice) in table.chunks(nu * nx).enumerate() {
            out.extend(normalized(slice.to_vec(), &format!("auxiliary slice a={a}"))?);
        }
        Ok(Self {
            nu,
            nx,
            na,
            table: out,
        })
    }

    /// Builds from non-negative weights `f(a, u, x)`, normalizing each `a`-slice.
    pub fn from_fn(nu: usize, nx: usize, na: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut table = Vec::with_capacity(nu * nx * na);
        for a in 0..na {
            let start = table.len();
            for u in 0..nu {
                for x in 0..nx {
                    table.push(f(a, u, x));
                }
            }
            let total: f64 = table[start..].iter().sum();
            if !(total > 0.0) {
                return Err(invalid(format!("auxiliary slice a={a} has no mass")));
            }
            table[start..].iter_mut().for_each(|p| *p /= total);
        }
        Self::new(nu, nx, na, table)
    }

    /// `P(u|a)` from `pu(a, u)` combined with a deterministic input map `x = f(u, a)`.
    pub fn deterministic(
        nu: usize,
        nx: usize,
        na: usize,
        pu: impl Fn(usize, usize) -> f64,
        f: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        Self::from_fn(nu, nx, na, |a, u, x| if f(u, a) == x { pu(a, u) } else { 0.0 })
    }

    /// Default auxiliary cardinality for a channel, `nx * ns`.
    pub fn default_cardinality(channel: &StateChannel) -> usize {
        channel.nx() * channel.ns()
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn get(&self, a: usize, u: usize, x: usize) -> f64 {
        self.table[(a * self.nu + u) * self.nx + x]
    }

    pub fn slice(&self, a: usize) -> &[f64] {
        let w = self.nu * self.nx;
        &self.table[a * w..(a + 1) * w]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Checks alphabets against a channel and the cardinality bound `|U| <= nx * ns`.
    pub fn check(&self, channel: &StateChannel) -> Result<()> {
        if self.nx != channel.nx() || self.na != channel.ns() {
            return Err(dim(format!(
                "auxiliary over (x={}, a={}) for channel with nx={}, ns={}",
                self.nx,
                self.na,
                channel.nx(),
                channel.ns()
            )));
        }
        if self.nu > Self::default_cardinality(channel) {
            return Err(invalid(format!(
                "auxiliary alphabet {} exceeds the bound {}",
                self.nu,
                Self::default_cardinality(channel)
            )));
        }
        Ok(())
    }
}
