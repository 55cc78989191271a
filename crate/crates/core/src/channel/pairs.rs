use crate::channel::StateChannel;
use crate::error::Result;
use crate::prob::JointPmf;
use crate::rates::AuxDistribution;

/// `p1(u,y) = sum_{a,x} P_S(a) P(u,x|a) W(y|x,a)`: the encoder's view is the true state.
pub fn synced_pair_pmf(channel: &StateChannel, aux: &AuxDistribution) -> Result<JointPmf> {
    aux.check(channel)?;
    pair(channel, aux, |x, a, y| channel.prob(x, a, y))
}

/// `p2(u,y) = sum_{s,a,x} P_S(a) P(u,x|a) P_S(s) W(y|x,s)`: the view is independent of the state.
pub fn product_pair_pmf(channel: &StateChannel, aux: &AuxDistribution) -> Result<JointPmf> {
    aux.check(channel)?;
    let avg = channel.averaged();
    let ny = channel.ny();
    pair(channel, aux, |x, _, y| avg[x * ny + y])
}

/// `P(u,a) = P_S(a) sum_x P(u,x|a)`.
pub fn aux_state_pmf(channel: &StateChannel, aux: &AuxDistribution) -> Result<JointPmf> {
    aux.check(channel)?;
    let prior = channel.prior();
    JointPmf::from_fn(vec![("U", aux.nu()), ("A", aux.na())], |idx| {
        prior.get(idx[1]) * (0..aux.nx()).map(|x| aux.get(idx[1], idx[0], x)).sum::<f64>()
    })
}

fn pair(channel: &StateChannel, aux: &AuxDistribution, kernel: impl Fn(usize, usize, usize) -> f64) -> Result<JointPmf> {
    let (nu, ny) = (aux.nu(), channel.ny());
    let mut probs = vec![0.0; nu * ny];
    for a in 0..aux.na() {
        let pa = channel.prior().get(a);
        if pa == 0.0 {
            continue;
        }
        for u in 0..nu {
            for x in 0..aux.nx() {
                let q = pa * aux.get(a, u, x);
                if q == 0.0 {
                    continue;
                }
                for y in 0..ny {
                    probs[u * ny + y] += q * kernel(x, a, y);
                }
            }
        }
    }
    JointPmf::new(vec![("U", nu), ("Y", ny)], probs)
}
