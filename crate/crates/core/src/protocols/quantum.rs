//! Constructions on top of ideal weak-coin-flip resources.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::prob::{report_value, Prob, Scalar};
use crate::tree::{Node, NodeRef, ProtocolTree};
use crate::types::{CoinFlipSpec, Outcome, Party, WcfSpec};

use super::{computed, label, snap_zero};

/// The `k`-bit binary truncation of `z` and its bits, most significant first.
pub fn binary_truncation<T: Scalar>(z: &Prob<T>, k: usize) -> (Prob<T>, Vec<bool>) {
    let two = T::from_ratio(2, 1);
    let mut rest = z.get();
    let mut weight = T::one();
    let mut value = T::zero();
    let mut bits = Vec::with_capacity(k);
    for _ in 0..k {
        rest = rest * two.clone();
        weight = weight / two.clone();
        let bit = rest >= T::one();
        if bit {
            rest = rest - T::one();
            value = value + weight.clone();
        }
        bits.push(bit);
    }
    (
        Prob::from_computed(value).expect("truncation lies in [0, 1]"),
        bits,
    )
}

/// Unbalanced weak coin flip from `k` balanced ones.
///
/// Round `i` flips a balanced coin. If bit `i` of `z` is 1, an Alice win
/// ends the protocol in her favour; if it is 0, a Bob win ends it in his.
/// Otherwise the next round follows, and Bob wins after the last round.
/// Output 0 means Alice wins. The honest Alice-win probability is the
/// `k`-bit truncation of `z`.
pub fn build_unbalanced_wcf<T: Scalar>(
    z: &Prob<T>,
    k: usize,
    eps: &Prob<T>,
) -> Result<ProtocolTree<T>> {
    if k == 0 {
        return Err(Error::PreconditionViolation("k >= 1 fails: k = 0".into()));
    }
    let (_, bits) = binary_truncation(z, k);
    let spec = WcfSpec::new(Prob::new(T::half())?, eps.clone());
    let mut node: NodeRef<T> = Node::leaf(Outcome::One);
    for bit in bits.into_iter().rev() {
        node = if bit {
            Node::wcf(spec.clone(), Node::leaf(Outcome::Zero), node)
        } else {
            Node::wcf(spec.clone(), node, Node::leaf(Outcome::One))
        };
    }
    Ok(ProtocolTree::new(node))
}

/// Lowers a weak coin flip's Alice-win probability from `z_prime` to `z`:
/// after winning, Alice gives up her win with probability `1 − z/z_prime`.
pub fn shift_wcf<T: Scalar>(
    z_prime: &Prob<T>,
    eps: &Prob<T>,
    z: &Prob<T>,
) -> Result<ProtocolTree<T>> {
    if !(z.value() > &T::zero() && z < z_prime && z_prime.value() < &T::one()) {
        return Err(Error::PreconditionViolation(format!(
            "0 < z < z' < 1 fails: z = {z}, z' = {z_prime}"
        )));
    }
    let keep = computed(z.get() / z_prime.get())?;
    let won = Node::send_pruned(
        Party::Alice,
        [
            ("keep", keep.clone(), Node::leaf(Outcome::Zero)),
            ("flip", keep.complement(), Node::leaf(Outcome::One)),
        ],
    );
    Ok(ProtocolTree::new(Node::wcf(
        WcfSpec::new(z_prime.clone(), eps.clone()),
        won,
        Node::leaf(Outcome::One),
    )))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QCoinFlip1Params<T> {
    pub x: Prob<T>,
    pub z0: Prob<T>,
    pub z1: Prob<T>,
    pub p0: Prob<T>,
    pub p1: Prob<T>,
}

impl<T: Scalar> QCoinFlip1Params<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "x": report_value(self.x.value()),
            "z0": report_value(self.z0.value()),
            "z1": report_value(self.z1.value()),
            "p0": report_value(self.p0.value()),
            "p1": report_value(self.p1.value()),
        })
    }
}

/// Parameters for cheat values with `p0*·p*0 + p1*·p*1 = 1` and both cheat
/// sums above 1.
pub fn qcoinflip1_params<T: Scalar>(
    p0s: &Prob<T>,
    p1s: &Prob<T>,
    ps0: &Prob<T>,
    ps1: &Prob<T>,
) -> Result<QCoinFlip1Params<T>> {
    let one = T::one();
    let fail = |m: String| Err(Error::PreconditionViolation(m));
    let bob_sum = ps0.get() + ps1.get();
    if !bob_sum.definitely_gt(&one) {
        return fail(format!("p*0 + p*1 > 1 fails: {ps0} + {ps1} = {bob_sum}"));
    }
    let alice_sum = p0s.get() + p1s.get();
    if !alice_sum.definitely_gt(&one) {
        return fail(format!("p0* + p1* > 1 fails: {p0s} + {p1s} = {alice_sum}"));
    }
    let product = p0s.get() * ps0.get() + p1s.get() * ps1.get();
    if !product.approx_eq(&one) {
        return fail(format!("p0*·p*0 + p1*·p*1 = 1 fails: got {product}"));
    }
    let excess = bob_sum - one.clone();
    Ok(QCoinFlip1Params {
        x: computed((p0s.get() * ps0.get() + ps1.get() - one) / excess.clone())?,
        z0: computed(excess.clone() / ps1.get())?,
        z1: computed(excess / ps0.get())?,
        p0: ps1.complement(),
        p1: ps0.complement(),
    })
}

/// Alice sends `a` (0 with probability `x`), then both run an ideal weak
/// coin flip with Alice-win probability `z_a`. Alice's win outputs `a`;
/// on Bob's win he sends `b`, equal to `a` with probability `p_a`.
pub fn build_qcoinflip1<T: Scalar>(params: &QCoinFlip1Params<T>) -> ProtocolTree<T> {
    let round = |a: Outcome, z: &Prob<T>, pa: &Prob<T>| {
        let b = a.flipped();
        let bob = Node::send_pruned(
            Party::Bob,
            [
                (label(a), pa.clone(), Node::leaf(a)),
                (label(b), pa.complement(), Node::leaf(b)),
            ],
        );
        Node::wcf(WcfSpec::ideal(z.clone()), Node::leaf(a), bob)
    };
    ProtocolTree::new(Node::send_pruned(
        Party::Alice,
        [
            (
                "0",
                params.x.clone(),
                round(Outcome::Zero, &params.z0, &params.p0),
            ),
            (
                "1",
                params.x.complement(),
                round(Outcome::One, &params.z1, &params.p1),
            ),
        ],
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QCoinFlip2Params<T> {
    pub p0s_prime: Prob<T>,
    pub ps1_prime: Prob<T>,
    pub eps0: Prob<T>,
    pub eps1: Prob<T>,
}

impl<T: Scalar> QCoinFlip2Params<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "p0s_prime": report_value(self.p0s_prime.value()),
            "ps1_prime": report_value(self.ps1_prime.value()),
            "eps0": report_value(self.eps0.value()),
            "eps1": report_value(self.eps1.value()),
        })
    }
}

/// Raises `p0*` and `p*1` until `p0*·p*0 + p1*·p*1 = 1` and returns the
/// veto probabilities that bring them back down.
///
/// The honest targets are `p00 = p0*·p*0` and `p11 = p1*·p*1`; requires
/// `p0*·p*0 + p1*·p*1 <= 1` and `p*0 + p1* > 1`.
pub fn qcoinflip2_params<T: Scalar>(spec: &CoinFlipSpec<T>) -> Result<QCoinFlip2Params<T>> {
    let one = T::one();
    let (p0s, p1s, ps0, ps1) = (
        spec.p0s().get(),
        spec.p1s().get(),
        spec.ps0().get(),
        spec.ps1().get(),
    );
    let fail = |m: String| Err(Error::PreconditionViolation(m));
    if !(ps0.clone() + ps1.clone()).definitely_gt(&one) {
        return fail(format!("p*0 + p*1 > 1 fails for {spec}"));
    }
    if !(p0s.clone() + p1s.clone()).definitely_gt(&one) {
        return fail(format!("p0* + p1* > 1 fails for {spec}"));
    }
    let product = p0s.clone() * ps0.clone() + p1s.clone() * ps1.clone();
    if !product.approx_le(&one) {
        return fail(format!("p0*·p*0 + p1*·p*1 <= 1 fails: got {product}"));
    }
    if !(ps0.clone() + p1s.clone()).definitely_gt(&one) {
        return fail(format!("p*0 + p1* > 1 fails for {spec}"));
    }
    let p0s_prime = ((one.clone() - p1s.clone() * ps1.clone()) / ps0.clone()).min_of(one.clone());
    let ps1_prime = (one.clone() - p0s_prime.clone() * ps0) / p1s;
    let veto = |low: T, high: &T| {
        if high.is_zero_value() {
            computed(T::zero())
        } else {
            computed(snap_zero(one.clone() - low / high.clone()))
        }
    };
    Ok(QCoinFlip2Params {
        eps0: veto(p0s, &p0s_prime)?,
        eps1: veto(ps1, &ps1_prime)?,
        p0s_prime: computed(p0s_prime)?,
        ps1_prime: computed(ps1_prime)?,
    })
}

/// After every 0-leaf Alice vetoes with probability `eps0`; after every
/// 1-leaf Bob vetoes with probability `eps1`. A veto outputs abort.
pub fn build_qcoinflip2<T: Scalar>(
    inner: &ProtocolTree<T>,
    eps0: &Prob<T>,
    eps1: &Prob<T>,
) -> ProtocolTree<T> {
    let wrap = |o: Outcome, sender: Party, eps: &Prob<T>| {
        if eps.value().is_zero_value() {
            Node::leaf(o)
        } else {
            Node::send_pruned(
                sender,
                [
                    ("keep", eps.complement(), Node::leaf(o)),
                    ("abort", eps.clone(), Node::leaf(Outcome::Abort)),
                ],
            )
        }
    };
    let zero = wrap(Outcome::Zero, Party::Alice, eps0);
    let one = wrap(Outcome::One, Party::Bob, eps1);
    let abort: NodeRef<T> = Node::leaf(Outcome::Abort);
    inner.map_leaves(&mut |o| match o {
        Outcome::Zero => zero.clone(),
        Outcome::One => one.clone(),
        Outcome::Abort => abort.clone(),
    })
}

/// Protocol implementing `p00 = p0*·p*0`, `p11 = p1*·p*1` with the spec's
/// cheat values, for specs with both cheat sums above 1.
pub(super) fn qcoinflip_tree<T: Scalar>(spec: &CoinFlipSpec<T>) -> Result<ProtocolTree<T>> {
    if !(spec.ps0().get() + spec.p1s().get()).definitely_gt(&T::one()) {
        return Ok(qcoinflip_tree(&spec.swap_parties())?.swap_parties());
    }
    let params = qcoinflip2_params(spec)?;
    let inner = qcoinflip1_params(&params.p0s_prime, spec.p1s(), spec.ps0(), &params.ps1_prime)?;
    Ok(build_qcoinflip2(
        &build_qcoinflip1(&inner),
        &params.eps0,
        &params.eps1,
    ))
}
