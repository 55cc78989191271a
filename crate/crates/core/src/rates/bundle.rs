use rayon::prelude::*;

use crate::channel::{window_symbols, StateChannel};
use crate::error::{dim, guard, invalid, Result};
use crate::prob::{conditional_mutual_information, normalized, JointPmf, Pmf};
use crate::rates::gp::SearchConfig;
use crate::rates::report::{Argument, SolveReport};
use crate::rates::simplex::project;
use crate::rng;

/// Largest window width for which all `2^D - 1` receiver subsets are enumerated.
pub const MAX_BUNDLE_WIDTH: usize = 6;

/// Alphabet sizes of the time-sharing, common and private auxiliaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleCardinalities {
    pub t: usize,
    pub w: usize,
    /// shared by every `U_k`
    pub u: usize,
}

impl Default for BundleCardinalities {
    fn default() -> Self {
        Self { t: 1, w: 2, u: 2 }
    }
}

/// `P_T` together with `P(w, u_1..u_D, x | v, t)`, where `v` ranges over
/// windows of `D` states with product law. Table layout:
/// `[(t * nv + v) * slice + ((w * nu + u_1) * nu + .. + u_D) * nx + x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompoundAuxBundle {
    p_t: Pmf,
    width: usize,
    ns: usize,
    nw: usize,
    nu: usize,
    nx: usize,
    table: Vec<f64>,
}

impl CompoundAuxBundle {
    pub fn new(p_t: Pmf, width: usize, ns: usize, nw: usize, nu: usize, nx: usize, table: Vec<f64>) -> Result<Self> {
        if width == 0 || ns == 0 || nw == 0 || nu == 0 || nx == 0 {
            return Err(invalid("empty bundle alphabet"));
        }
        if width > MAX_BUNDLE_WIDTH {
            return Err(guard(format!("window width {width} exceeds {MAX_BUNDLE_WIDTH}")));
        }
        let nv = ns.pow(width as u32);
        let slice = nw * nu.pow(width as u32) * nx;
        if table.len() != p_t.alphabet_size() * nv * slice {
            return Err(dim(format!(
                "bundle table has {} entries, expected {}",
                table.len(),
                p_t.alphabet_size() * nv * slice
            )));
        }
        let mut rows = Vec::with_capacity(table.len());
        for (i, chunk) in table.chunks(slice).enumerate() {
            rows.extend(normalized(chunk.to_vec(), &format!("bundle slice {i}"))?);
        }
        Ok(Self {
            p_t,
            width,
            ns,
            nw,
            nu,
            nx,
            table: rows,
        })
    }

    /// Builds from non-negative weights `f(t, v_symbols, w, u, x)`, normalizing each slice.
    pub fn from_fn(
        p_t: Pmf,
        width: usize,
        ns: usize,
        cards: (usize, usize),
        nx: usize,
        f: impl Fn(usize, &[usize], usize, &[usize], usize) -> f64,
    ) -> Result<Self> {
        let (nw, nu) = cards;
        let nv = ns.pow(width as u32);
        let nuu = nu.pow(width as u32);
        let mut table = Vec::with_capacity(p_t.alphabet_size() * nv * nw * nuu * nx);
        for t in 0..p_t.alphabet_size() {
            for v in 0..nv {
                let vs = window_symbols(v, ns, width);
                let start = table.len();
                for w in 0..nw {
                    for ui in 0..nuu {
                        let us = window_symbols(ui, nu, width);
                        for x in 0..nx {
                            table.push(f(t, &vs, w, &us, x));
                        }
                    }
                }
                let total: f64 = table[start..].iter().sum();
                if !(total > 0.0) {
                    return Err(invalid(format!("bundle slice (t={t}, v={v}) has no mass")));
                }
                table[start..].iter_mut().for_each(|p| *p /= total);
            }
        }
        Self::new(p_t, width, ns, nw, nu, nx, table)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn p_t(&self) -> &Pmf {
        &self.p_t
    }

    pub fn cardinalities(&self) -> BundleCardinalities {
        BundleCardinalities {
            t: self.p_t.alphabet_size(),
            w: self.nw,
            u: self.nu,
        }
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    fn nv(&self) -> usize {
        self.ns.pow(self.width as u32)
    }

    fn slice_len(&self) -> usize {
        self.nw * self.nu.pow(self.width as u32) * self.nx
    }

    fn check(&self, channel: &StateChannel) -> Result<()> {
        if channel.ns() != self.ns || channel.nx() != self.nx {
            return Err(dim("bundle alphabets do not match the channel"));
        }
        Ok(())
    }

    fn axes(&self) -> Vec<(String, usize)> {
        let mut axes = vec![("T".to_string(), self.p_t.alphabet_size()), ("V".to_string(), self.nv()), ("W".to_string(), self.nw)];
        axes.extend((1..=self.width).map(|k| (format!("U{k}"), self.nu)));
        axes.push(("X".to_string(), self.nx));
        axes
    }

    /// Joint of `(T, V, W, U_1..U_D, X, Y)` where `Y` sees state `V_k` (`k` 0-based).
    fn joint_with_output(&self, channel: &StateChannel, k: usize) -> Result<JointPmf> {
        let nv = self.nv();
        let windows: Vec<Vec<usize>> = (0..nv).map(|v| window_symbols(v, self.ns, self.width)).collect();
        let pv: Vec<f64> = windows.iter().map(|w| w.iter().map(|&s| channel.prior().get(s)).product()).collect();
        let mut axes = self.axes();
        axes.push(("Y".to_string(), channel.ny()));
        let slice = self.slice_len();
        let ny = channel.ny();
        let mut probs = Vec::with_capacity(self.table.len() * ny);
        for t in 0..self.p_t.alphabet_size() {
            for v in 0..nv {
                let base = self.p_t.get(t) * pv[v];
                let row = &self.table[(t * nv + v) * slice..(t * nv + v + 1) * slice];
                for (cell, &q) in row.iter().enumerate() {
                    let x = cell % self.nx;
                    for y in 0..ny {
                        probs.push(base * q * channel.prob(x, windows[v][k], y));
                    }
                }
            }
        }
        JointPmf::new(axes, probs)
    }
}

fn cmi(joint: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    let keep: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    let grouped = joint.marginalize(&keep)?.group(&[("A", a), ("B", b), ("C", c)])?;
    conditional_mutual_information(&grouped)
}

/// The three expressions for two receivers: per receiver
/// `I(W,U_k;Y_k|T) - I(W,U_k;V|T)`, and half their sum minus `I(U_1;U_2|W,V,T)`.
pub fn theorem2_terms(channel: &StateChannel, bundle: &CompoundAuxBundle) -> Result<[f64; 3]> {
    bundle.check(channel)?;
    if bundle.width() != 2 {
        return Err(dim(format!("two-receiver expression needs a window of 2, got {}", bundle.width())));
    }
    let mut single = [0.0; 2];
    for (k, slot) in single.iter_mut().enumerate() {
        let joint = bundle.joint_with_output(channel, k)?;
        let u = format!("U{}", k + 1);
        let gain = cmi(&joint, &["W", &u], &["Y"], &["T"])?;
        let cost = cmi(&joint, &["W", &u], &["V"], &["T"])?;
        *slot = gain - cost;
    }
    let joint = bundle.joint_with_output(channel, 0)?;
    let coupling = cmi(&joint, &["U1"], &["U2"], &["W", "V", "T"])?;
    Ok([single[0], single[1], 0.5 * (single[0] + single[1] - coupling)])
}

pub fn theorem2_rate_eval(channel: &StateChannel, bundle: &CompoundAuxBundle) -> Result<f64> {
    Ok(theorem2_terms(channel, bundle)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Value of the subset expression for every nonempty `L`, indexed by bitmask `1..2^D`.
pub fn theorem3_subset_terms(channel: &StateChannel, bundle: &CompoundAuxBundle) -> Result<Vec<f64>> {
    bundle.check(channel)?;
    let d = bundle.width();
    let joints: Vec<JointPmf> = (0..d).map(|k| bundle.joint_with_output(channel, k)).collect::<Result<_>>()?;
    let h = |k: usize, axes: &[&str]| -> Result<f64> { Ok(joints[k].marginalize(axes)?.entropy()) };
    let names: Vec<String> = (1..=d).map(|k| format!("U{k}")).collect();
    let h_t = h(0, &["T"])?;
    let h_wt = h(0, &["W", "T"])?;
    let h_wvt = h(0, &["W", "V", "T"])?;
    let i_wv = h_wt + h(0, &["V", "T"])? - h_wvt - h_t;
    let mut gain = Vec::with_capacity(d);
    let mut private = Vec::with_capacity(d);
    for k in 0..d {
        let u = names[k].as_str();
        gain.push(h(k, &["W", u, "T"])? + h(k, &["Y", "T"])? - h(k, &["W", u, "Y", "T"])? - h_t);
        private.push(h(0, &[u, "W", "T"])? - h_wt);
    }
    let mut out = vec![f64::NAN; 1 << d];
    for mask in 1usize..(1 << d) {
        let members: Vec<usize> = (0..d).filter(|k| mask >> k & 1 == 1).collect();
        let size = members.len() as f64;
        let mut axes: Vec<&str> = members.iter().map(|&k| names[k].as_str()).collect();
        axes.extend(["W", "V", "T"]);
        let joint_private = h(0, &axes)? - h_wvt;
        let sum_gain: f64 = members.iter().map(|&k| gain[k]).sum();
        let sum_private: f64 = members.iter().map(|&k| private[k]).sum();
        out[mask] = (sum_gain - size * i_wv + joint_private - sum_private) / size;
    }
    Ok(out)
}

/// Minimum of the subset expression over every nonempty subset of receivers.
pub fn theorem3_rate_eval(channel: &StateChannel, bundle: &CompoundAuxBundle) -> Result<f64> {
    Ok(theorem3_subset_terms(channel, bundle)?
        .into_iter()
        .skip(1)
        .fold(f64::INFINITY, f64::min))
}

/// Array form of the subset expressions as linear combinations of marginal
/// entropies, with analytic gradients, used by the local search.
struct Program {
    nt: usize,
    nv: usize,
    slice: usize,
    nx: usize,
    ny: usize,
    pv: Vec<f64>,
    /// `W(y|x, v_k)` at `[(k * nv + v) * nx * ny + x * ny + y]`
    kernel: Vec<f64>,
    width: usize,
    marginals: Vec<Marginal>,
    /// per subset: `(marginal, coefficient)`
    terms: Vec<Vec<(usize, f64)>>,
}

struct Marginal {
    /// `None` for the joint without output, `Some(k)` with `Y_k` as last axis
    receiver: Option<usize>,
    map: Vec<u32>,
    size: usize,
}

impl Program {
    fn new(channel: &StateChannel, width: usize, cards: BundleCardinalities, subsets: &[usize]) -> Self {
        let ns = channel.ns();
        let (nx, ny) = (channel.nx(), channel.ny());
        let nv = ns.pow(width as u32);
        let windows: Vec<Vec<usize>> = (0..nv).map(|v| window_symbols(v, ns, width)).collect();
        let pv = windows.iter().map(|w| w.iter().map(|&s| channel.prior().get(s)).product()).collect();
        let mut kernel = vec![0.0; width * nv * nx * ny];
        for k in 0..width {
            for v in 0..nv {
                for x in 0..nx {
                    for y in 0..ny {
                        kernel[(k * nv + v) * nx * ny + x * ny + y] = channel.prob(x, windows[v][k], y);
                    }
                }
            }
        }
        // axis order: T, V, W, U1..UD, X, [Y]
        let mut sizes = vec![cards.t, nv, cards.w];
        sizes.extend(std::iter::repeat_n(cards.u, width));
        sizes.push(nx);
        let slice = cards.w * cards.u.pow(width as u32) * nx;
        let (t_ax, v_ax, w_ax) = (0usize, 1usize, 2usize);
        let u_ax = |k: usize| 3 + k;
        let y_ax = 3 + width + 1;

        let mut marginals: Vec<Marginal> = Vec::new();
        let mut lookup: Vec<(Option<usize>, Vec<usize>)> = Vec::new();
        let mut marginal = |receiver: Option<usize>, mut keep: Vec<usize>| -> usize {
            keep.sort_unstable();
            if let Some(i) = lookup.iter().position(|(r, k)| *r == receiver && *k == keep) {
                return i;
            }
            let mut all = sizes.clone();
            if receiver.is_some() {
                all.push(ny);
            }
            let total: usize = all.iter().product();
            let mut map = vec![0u32; total];
            let mut idx = vec![0usize; all.len()];
            for cell in map.iter_mut() {
                let mut m = 0usize;
                for &a in &keep {
                    m = m * all[a] + idx[a];
                }
                *cell = m as u32;
                for a in (0..all.len()).rev() {
                    idx[a] += 1;
                    if idx[a] < all[a] {
                        break;
                    }
                    idx[a] = 0;
                }
            }
            let size = keep.iter().map(|&a| all[a]).product();
            marginals.push(Marginal { receiver, map, size });
            lookup.push((receiver, keep));
            marginals.len() - 1
        };

        let h_t = marginal(None, vec![t_ax]);
        let h_wt = marginal(None, vec![w_ax, t_ax]);
        let h_vt = marginal(None, vec![v_ax, t_ax]);
        let h_wvt = marginal(None, vec![w_ax, v_ax, t_ax]);
        let mut terms = Vec::new();
        for &mask in subsets {
            let members: Vec<usize> = (0..width).filter(|k| mask >> k & 1 == 1).collect();
            let size = members.len() as f64;
            let mut parts: Vec<(usize, f64)> = Vec::new();
            for &k in &members {
                parts.push((marginal(Some(k), vec![w_ax, u_ax(k), t_ax]), 1.0));
                parts.push((marginal(Some(k), vec![y_ax, t_ax]), 1.0));
                parts.push((marginal(Some(k), vec![w_ax, u_ax(k), y_ax, t_ax]), -1.0));
                parts.push((h_t, -1.0));
                parts.push((marginal(None, vec![u_ax(k), w_ax, t_ax]), -1.0));
                parts.push((h_wt, 1.0));
            }
            // -|L| I(W;V|T)
            parts.push((h_wt, -size));
            parts.push((h_vt, -size));
            parts.push((h_wvt, size));
            parts.push((h_t, size));
            let mut joint = members.iter().map(|&k| u_ax(k)).collect::<Vec<_>>();
            joint.extend([w_ax, v_ax, t_ax]);
            parts.push((marginal(None, joint), 1.0));
            parts.push((h_wvt, -1.0));
            terms.push(parts.into_iter().map(|(m, c)| (m, c / size)).collect());
        }
        Self {
            nt: cards.t,
            nv,
            slice,
            nx,
            ny,
            pv,
            kernel,
            width,
            marginals,
            terms,
        }
    }

    fn dims(&self) -> usize {
        self.nt + self.nt * self.nv * self.slice
    }

    /// Builds the joint without output from the packed variables `(P_T, table)`.
    fn base(&self, z: &[f64]) -> Vec<f64> {
        let (pt, table) = z.split_at(self.nt);
        let mut b = vec![0.0; table.len()];
        for t in 0..self.nt {
            for v in 0..self.nv {
                let m = pt[t] * self.pv[v];
                let off = (t * self.nv + v) * self.slice;
                for i in 0..self.slice {
                    b[off + i] = m * table[off + i];
                }
            }
        }
        b
    }

    fn receiver_joint(&self, base: &[f64], k: usize) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = vec![0.0; base.len() * ny];
        for (cell, &p) in base.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let v = (cell / self.slice) % self.nv;
            let x = cell % nx;
            let row = &self.kernel[(k * self.nv + v) * nx * ny + x * ny..][..ny];
            for y in 0..ny {
                out[cell * ny + y] = p * row[y];
            }
        }
        out
    }

    /// Subset values and, per marginal, the vector of `-log2` marginal masses.
    fn evaluate(&self, z: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
        let base = self.base(z);
        let joints: Vec<Vec<f64>> = (0..self.width).map(|k| self.receiver_joint(&base, k)).collect();
        let mut entropies = Vec::with_capacity(self.marginals.len());
        let mut neglogs = Vec::with_capacity(self.marginals.len());
        for m in &self.marginals {
            let src = match m.receiver {
                None => &base,
                Some(k) => &joints[k],
            };
            let mut mass = vec![0.0; m.size];
            for (cell, &p) in src.iter().enumerate() {
                mass[m.map[cell] as usize] += p;
            }
            let mut h = 0.0;
            let nl: Vec<f64> = mass
                .iter()
                .map(|&p| {
                    if p > 0.0 {
                        h -= p * p.log2();
                    }
                    -(p.max(1e-300)).log2()
                })
                .collect();
            entropies.push(h);
            neglogs.push(nl);
        }
        let values = self
            .terms
            .iter()
            .map(|parts| parts.iter().map(|&(m, c)| c * entropies[m]).sum())
            .collect();
        (values, neglogs, base, joints)
    }

    /// Gradient of `sum_L weight_L term_L` with respect to `(P_T, table)`.
    fn gradient(&self, z: &[f64], weights: &[f64], neglogs: &[Vec<f64>]) -> Vec<f64> {
        let mut coef = vec![0.0; self.marginals.len()];
        for (parts, &wl) in self.terms.iter().zip(weights) {
            for &(m, c) in parts {
                coef[m] += wl * c;
            }
        }
        let cells = self.nt * self.nv * self.slice;
        let ny = self.ny;
        // d objective / d base cell
        let mut db = vec![0.0; cells];
        for (m, marg) in self.marginals.iter().enumerate() {
            if coef[m] == 0.0 {
                continue;
            }
            let nl = &neglogs[m];
            match marg.receiver {
                None => {
                    for cell in 0..cells {
                        db[cell] += coef[m] * nl[marg.map[cell] as usize];
                    }
                }
                Some(k) => {
                    for cell in 0..cells {
                        let v = (cell / self.slice) % self.nv;
                        let x = cell % self.nx;
                        let row = &self.kernel[(k * self.nv + v) * self.nx * ny + x * ny..][..ny];
                        let mut s = 0.0;
                        for y in 0..ny {
                            s += row[y] * nl[marg.map[cell * ny + y] as usize];
                        }
                        db[cell] += coef[m] * s;
                    }
                }
            }
        }
        let (pt, table) = z.split_at(self.nt);
        let mut g = vec![0.0; self.dims()];
        for t in 0..self.nt {
            for v in 0..self.nv {
                let off = (t * self.nv + v) * self.slice;
                for i in 0..self.slice {
                    g[self.nt + off + i] = pt[t] * self.pv[v] * db[off + i];
                    g[t] += self.pv[v] * table[off + i] * db[off + i];
                }
            }
        }
        g
    }

    fn project(&self, z: &mut [f64]) {
        let (pt, table) = z.split_at_mut(self.nt);
        project(pt);
        table.chunks_mut(self.slice).for_each(project);
    }
}

fn softmin(values: &[f64], tau: f64) -> (f64, Vec<f64>) {
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    let e: Vec<f64> = values.iter().map(|v| (-(v - m) / tau).exp()).collect();
    let total: f64 = e.iter().sum();
    (m - tau * total.ln(), e.into_iter().map(|x| x / total).collect())
}

const TEMPERATURES: [f64; 6] = [0.1, 0.03, 0.01, 0.003, 0.001, 0.0003];

fn anneal(program: &Program, mut z: Vec<f64>, max_iterations: usize) -> (Vec<f64>, f64, usize) {
    let per_stage = (max_iterations / TEMPERATURES.len()).max(1);
    let mut iterations = 0;
    for &tau in &TEMPERATURES {
        let (values, mut neglogs, _, _) = program.evaluate(&z);
        let (mut f, mut weights) = softmin(&values, tau);
        let mut step = 1.0;
        for _ in 0..per_stage {
            iterations += 1;
            let g = program.gradient(&z, &weights, &neglogs);
            let mut accepted = false;
            while step > 1e-14 {
                let mut cand: Vec<f64> = z.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                program.project(&mut cand);
                let slope: f64 = g.iter().zip(cand.iter().zip(&z)).map(|(gi, (c, o))| gi * (c - o)).sum();
                let (cv, cn, _, _) = program.evaluate(&cand);
                let (cf, cw) = softmin(&cv, tau);
                if cf >= f + 1e-4 * slope {
                    let gain = cf - f;
                    z = cand;
                    f = cf;
                    weights = cw;
                    neglogs = cn;
                    accepted = gain > 1e-13 || slope > 1e-13;
                    step = (step * 2.0).min(1e4);
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }
    let (values, _, _, _) = program.evaluate(&z);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    (z, min, iterations)
}

fn bundle_search(
    channel: &StateChannel,
    width: usize,
    cards: BundleCardinalities,
    cfg: &SearchConfig,
) -> Result<(CompoundAuxBundle, usize, f64)> {
    if width == 0 || width > MAX_BUNDLE_WIDTH {
        return Err(guard(format!("window width {width} outside 1..={MAX_BUNDLE_WIDTH}")));
    }
    if cards.t == 0 || cards.w == 0 || cards.u == 0 {
        return Err(invalid("bundle cardinalities must be at least 1"));
    }
    if cfg.starts == 0 {
        return Err(invalid("search needs at least one start"));
    }
    let cells = cards.t as u64
        * (channel.ns() as u64).pow(width as u32)
        * cards.w as u64
        * (cards.u as u64).pow(width as u32)
        * channel.nx() as u64
        * channel.ny() as u64;
    if cells > 1 << 22 {
        return Err(guard(format!("bundle joint of {cells} cells is too large to search")));
    }
    let subsets: Vec<usize> = (1..(1usize << width)).collect();
    let program = Program::new(channel, width, cards, &subsets);
    let results: Vec<(Vec<f64>, f64, usize)> = (0..cfg.starts)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::substream(cfg.seed, &[0x4255, k as u64]);
            let mut z = rng::dirichlet_ones(&mut r, program.nt);
            for _ in 0..program.nt * program.nv {
                z.extend(rng::dirichlet_ones(&mut r, program.slice));
            }
            anneal(&program, z, cfg.max_iterations)
        })
        .collect();
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.1 > results[best].1 {
            best = k;
        }
    }
    let iterations = results.iter().map(|r| r.2).sum();
    let z = &results[best].0;
    let p_t = Pmf::new(z[..program.nt].to_vec())?;
    let bundle = CompoundAuxBundle::new(p_t, width, channel.ns(), cards.w, cards.u, channel.nx(), z[program.nt..].to_vec())?;
    let second = results
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != best)
        .map(|(_, r)| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let gap = if second.is_finite() { (results[best].1 - second).max(0.0) } else { 0.0 };
    Ok((bundle, iterations, gap))
}

/// Heuristic search of the two-receiver expression over bundles of the given
/// cardinalities. The value is a lower bound on the maximum.
pub fn theorem2_rate_search(channel: &StateChannel, cards: BundleCardinalities, cfg: &SearchConfig) -> Result<SolveReport> {
    let (bundle, iterations, gap) = bundle_search(channel, 2, cards, cfg)?;
    let value = theorem2_rate_eval(channel, &bundle)?;
    let mut report = SolveReport::new("theorem2", value, Argument::Bundle(bundle), "annealed_softmin_ascent_heuristic");
    report.iterations = iterations;
    report.convergence_gap = gap;
    Ok(report)
}

/// Heuristic search of the subset expression for a window of `width` receivers.
pub fn theorem3_rate_search(
    channel: &StateChannel,
    width: usize,
    cards: BundleCardinalities,
    cfg: &SearchConfig,
) -> Result<SolveReport> {
    let (bundle, iterations, gap) = bundle_search(channel, width, cards, cfg)?;
    let value = theorem3_rate_eval(channel, &bundle)?;
    let mut report = SolveReport::new("theorem3", value, Argument::Bundle(bundle), "annealed_softmin_ascent_heuristic");
    report.iterations = iterations;
    report.convergence_gap = gap;
    Ok(report)
}
