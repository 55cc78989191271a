use crate::error::{dim, invalid, Error, Result};

/// Normalization slack tolerated (and silently corrected) by constructors.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// Checks non-negativity and rescales a vector whose total is within
/// [`RENORMALIZE_TOL`] of one.
pub(crate) fn normalized(mut probs: Vec<f64>, what: &str) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(invalid(format!("{what}: empty probability vector")));
    }
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(invalid(format!("{what}: entry {bad} is not a probability")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > RENORMALIZE_TOL {
        return Err(invalid(format!("{what}: entries sum to {total}, not 1")));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}

/// Probability vector over the alphabet `{0, .., len-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Ok(Self {
            probs: normalized(probs, "pmf")?,
        })
    }

    pub fn uniform(size: usize) -> Self {
        assert!(size > 0, "alphabet must be non-empty");
        Self {
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        assert!(at < size, "point mass outside alphabet");
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Self { probs }
    }

    /// Bernoulli law on `{0, 1}` with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("bernoulli parameter {p} outside [0,1]")));
        }
        Ok(Self {
            probs: vec![1.0 - p, p],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

/// Dense probability tensor over named finite axes, last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new<S: Into<String>>(axes: Vec<(S, usize)>, probs: Vec<f64>) -> Result<Self> {
        let axes: Vec<Axis> = axes
            .into_iter()
            .map(|(name, size)| Axis {
                name: name.into(),
                size,
            })
            .collect();
        if axes.is_empty() {
            return Err(invalid("joint pmf needs at least one axis"));
        }
        if axes.iter().any(|a| a.size == 0) {
            return Err(invalid("joint pmf axis of size zero"));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(invalid(format!("duplicate axis name {}", a.name)));
            }
        }
        let cells: usize = axes.iter().map(|a| a.size).product();
        if cells != probs.len() {
            return Err(dim(format!(
                "joint pmf has {} entries, axes imply {cells}",
                probs.len()
            )));
        }
        Ok(Self {
            axes,
            probs: normalized(probs, "joint pmf")?,
        })
    }

    /// Builds the tensor by evaluating `f` at every multi-index.
    pub fn from_fn<S: Into<String>>(
        axes: Vec<(S, usize)>,
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> Result<Self> {
        let axes: Vec<(String, usize)> = axes.into_iter().map(|(n, s)| (n.into(), s)).collect();
        let sizes: Vec<usize> = axes.iter().map(|a| a.1).collect();
        let mut probs = Vec::with_capacity(sizes.iter().product());
        for_each_index(&sizes, |idx| probs.push(f(idx)));
        Self::new(axes, probs)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| invalid(format!("no axis named {name}")))
    }

    /// Probability of a full multi-index.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        for (a, &i) in self.axes.iter().zip(idx) {
            flat = flat * a.size + i;
        }
        self.probs[flat]
    }

    /// Marginal over the named axes, in the order given.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let idx = keep
            .iter()
            .map(|n| self.axis_index(n))
            .collect::<Result<Vec<_>>>()?;
        self.marginalize_indices(&idx)
    }

    pub fn marginalize_indices(&self, keep: &[usize]) -> Result<JointPmf> {
        self.group_indices(&keep.iter().map(|&k| vec![k]).collect::<Vec<_>>(), None)
    }

    /// Merges groups of axes into composite axes (row-major within a group)
    /// and sums out every axis that appears in no group.
    pub fn group(&self, groups: &[(&str, &[&str])]) -> Result<JointPmf> {
        let idx = groups
            .iter()
            .map(|(_, members)| {
                members
                    .iter()
                    .map(|n| self.axis_index(n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<String> = groups.iter().map(|(n, _)| n.to_string()).collect();
        self.group_indices(&idx, Some(names))
    }

    fn group_indices(&self, groups: &[Vec<usize>], names: Option<Vec<String>>) -> Result<JointPmf> {
        let mut seen = vec![false; self.axes.len()];
        for &k in groups.iter().flatten() {
            if k >= self.axes.len() || seen[k] {
                return Err(invalid("axis listed twice or out of range"));
            }
            seen[k] = true;
        }
        let out_axes: Vec<Axis> = groups
            .iter()
            .enumerate()
            .map(|(g, members)| Axis {
                name: match &names {
                    Some(n) => n[g].clone(),
                    None => members
                        .iter()
                        .map(|&k| self.axes[k].name.as_str())
                        .collect::<Vec<_>>()
                        .join(","),
                },
                size: members.iter().map(|&k| self.axes[k].size).product(),
            })
            .collect();
        if out_axes.is_empty() {
            return Err(invalid("marginal must keep at least one axis"));
        }
        let mut out = vec![0.0; out_axes.iter().map(|a| a.size).product()];
        let sizes = self.sizes();
        let mut flat = 0;
        for_each_index(&sizes, |idx| {
            let mut target = 0;
            for members in groups {
                for &k in members {
                    target = target * sizes[k] + idx[k];
                }
            }
            out[target] += self.probs[flat];
            flat += 1;
        });
        Ok(JointPmf {
            axes: out_axes,
            probs: out,
        })
    }

    /// Conditional law of the remaining axes given `axis = value`.
    pub fn condition(&self, axis: &str, value: usize) -> Result<JointPmf> {
        let k = self.axis_index(axis)?;
        if value >= self.axes[k].size {
            return Err(invalid(format!("value {value} outside axis {axis}")));
        }
        if self.axes.len() == 1 {
            return Err(invalid("cannot condition a single-axis pmf on itself"));
        }
        let sizes = self.sizes();
        let mut kept = Vec::new();
        let mut flat = 0;
        for_each_index(&sizes, |idx| {
            if idx[k] == value {
                kept.push(self.probs[flat]);
            }
            flat += 1;
        });
        let mass: f64 = kept.iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroProbability(format!("{axis} = {value}")));
        }
        kept.iter_mut().for_each(|p| *p /= mass);
        let axes = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, a)| a.clone())
            .collect();
        Ok(JointPmf { axes, probs: kept })
    }

    /// Joint entropy of all axes, in bits.
    pub fn entropy(&self) -> f64 {
        super::info::entropy_of(&self.probs)
    }

    /// The single-axis case as a [`Pmf`].
    pub fn to_pmf(&self) -> Result<Pmf> {
        if self.axes.len() != 1 {
            return Err(dim("to_pmf needs exactly one axis"));
        }
        Ok(Pmf {
            probs: self.probs.clone(),
        })
    }
}

/// Calls `f` on every multi-index of a row-major tensor, last index fastest.
pub(crate) fn for_each_index(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.iter().any(|&s| s == 0) {
        return;
    }
    let mut idx = vec![0usize; sizes.len()];
    loop {
        f(&idx);
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(px: &[f64], py: &[f64]) -> JointPmf {
        JointPmf::from_fn(vec![("X", px.len()), ("Y", py.len())], |i| px[i[0]] * py[i[1]]).unwrap()
    }

    #[test]
    fn constructor_renormalizes_small_slack_and_rejects_large() {
        let p = Pmf::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn marginal_of_product_is_factor() {
        let j = product(&[0.2, 0.8], &[0.1, 0.6, 0.3]);
        let y = j.marginalize(&["Y"]).unwrap();
        for (a, b) in y.probs().iter().zip([0.1, 0.6, 0.3]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn chain_rule_reassembles_joint() {
        let probs = [0.1, 0.25, 0.05, 0.3, 0.2, 0.1];
        let j = JointPmf::new(vec![("X", 2), ("Y", 3)], probs.to_vec()).unwrap();
        let x = j.marginalize(&["X"]).unwrap();
        for xv in 0..2 {
            let cond = j.condition("X", xv).unwrap();
            for yv in 0..3 {
                let back = x.probs()[xv] * cond.probs()[yv];
                assert!((back - j.get(&[xv, yv])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn condition_on_identity_coupling() {
        let j = JointPmf::new(vec![("X", 2), ("Y", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let c = j.condition("X", 0).unwrap();
        assert_eq!(c.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn condition_on_null_event_fails() {
        let j = JointPmf::new(vec![("X", 2), ("Y", 2)], vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(matches!(j.condition("X", 1), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn grouping_orders_members_row_major() {
        let j = JointPmf::from_fn(vec![("A", 2), ("B", 3), ("C", 2)], |i| {
            (1 + i[0] * 6 + i[1] * 2 + i[2]) as f64 / 78.0
        })
        .unwrap();
        let g = j.group(&[("CA", &["C", "A"])]).unwrap();
        assert_eq!(g.sizes(), vec![4]);
        // C=1, A=0 -> composite 2
        let want: f64 = (0..3).map(|b| (1 + b * 2 + 1) as f64 / 78.0).sum();
        assert!((g.probs()[2] - want).abs() < 1e-15);
    }

    #[test]
    fn full_marginalization_has_unit_mass() {
        let j = product(&[0.3, 0.7], &[0.5, 0.5]);
        let total: f64 = j.marginalize(&["X"]).unwrap().probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
