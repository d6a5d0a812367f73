//! Classical constructions: the announce-and-accept protocol, the
//! three-round protocol on the optimal boundary, and dilution.

use serde_json::{json, Value};

use crate::analyzer::analyze;
use crate::bounds::classical_bound_rhs;
use crate::error::{Error, Result};
use crate::prob::{report_value, Prob, Scalar};
use crate::tree::{Node, NodeRef, ProtocolTree};
use crate::types::{AnalysisResult, CoinFlipSpec, Outcome, Party};

use super::{computed, label};

/// Alice sends `a` in {0, 1, abort} with probabilities `(p0s, p1s, rest)`;
/// Bob echoes `a` with probability `ps_a` and aborts otherwise.
///
/// Honest outputs are `p0s·ps0` and `p1s·ps1`; Bob can force `b` with
/// probability `pb*`, Alice with `ps_b`.
pub fn build_coinflip1<T: Scalar>(
    p0s: &Prob<T>,
    p1s: &Prob<T>,
    ps0: &Prob<T>,
    ps1: &Prob<T>,
) -> Result<ProtocolTree<T>> {
    let sum = p0s.get() + p1s.get();
    if !sum.approx_le(&T::one()) {
        return Err(Error::PreconditionViolation(format!(
            "p0* + p1* <= 1 fails: {p0s} + {p1s} = {sum}"
        )));
    }
    let rest = computed(T::one() - sum)?;
    let reply = |o: Outcome, keep: &Prob<T>| {
        Node::send_pruned(
            Party::Bob,
            [
                (label(o), keep.clone(), Node::leaf(o)),
                (
                    label(Outcome::Abort),
                    keep.complement(),
                    Node::leaf(Outcome::Abort),
                ),
            ],
        )
    };
    Ok(ProtocolTree::new(Node::send_pruned(
        Party::Alice,
        [
            ("0", p0s.clone(), reply(Outcome::Zero, ps0)),
            ("1", p1s.clone(), reply(Outcome::One, ps1)),
            ("abort", rest, Node::leaf(Outcome::Abort)),
        ],
    )))
}

/// Parameters of the three-round protocol. `y0` is undefined when `p = 1`
/// and `y1` when `p = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinFlip2Params<T> {
    pub p: Prob<T>,
    pub x0: Prob<T>,
    pub x1: Prob<T>,
    pub y0: Option<Prob<T>>,
    pub y1: Option<Prob<T>>,
}

impl<T: Scalar> CoinFlip2Params<T> {
    pub fn to_json(&self) -> Value {
        let opt = |v: &Option<Prob<T>>| v.as_ref().map_or(Value::Null, |p| report_value(p.value()));
        json!({
            "p": report_value(self.p.value()),
            "x0": report_value(self.x0.value()),
            "x1": report_value(self.x1.value()),
            "y0": opt(&self.y0),
            "y1": opt(&self.y1),
        })
    }
}

/// Parameters for a spec whose honest sum sits exactly on the classical
/// boundary and whose both cheat sums exceed 1.
pub fn coinflip2_params<T: Scalar>(spec: &CoinFlipSpec<T>) -> Result<CoinFlip2Params<T>> {
    let (p00, p11) = (spec.p00().get(), spec.p11().get());
    let (p0s, p1s, ps0, ps1) = (
        spec.p0s().get(),
        spec.p1s().get(),
        spec.ps0().get(),
        spec.ps1().get(),
    );
    let one = T::one();
    let fail = |m: String| Err(Error::PreconditionViolation(m));
    if !(p0s.clone() + p1s.clone()).definitely_gt(&one) {
        return fail(format!("p0* + p1* > 1 fails for {spec}"));
    }
    let bob_sum = ps0.clone() + ps1.clone();
    if !bob_sum.definitely_gt(&one) {
        return fail(format!("p*0 + p*1 > 1 fails for {spec}"));
    }
    if !p00.approx_le(&(p0s.clone() * ps0.clone())) {
        return fail(format!("p00 <= p0*·p*0 fails for {spec}"));
    }
    if !p11.approx_le(&(p1s.clone() * ps1.clone())) {
        return fail(format!("p11 <= p1*·p*1 fails for {spec}"));
    }
    let boundary = classical_bound_rhs(&p0s, &p1s, &ps0, &ps1);
    let honest = p00.clone() + p11;
    if !honest.approx_eq(&boundary) {
        return fail(format!(
            "p00 + p11 = {honest} is not on the classical boundary {boundary}"
        ));
    }
    let p = (p00 - p0s.clone() + p0s.clone() * ps1.clone()) / (bob_sum - one.clone());
    let p = computed(p)?;
    let y0 = if p.value() < &one {
        Some(computed((p0s - p.get()) / (one.clone() - p.get()))?)
    } else {
        None
    };
    let y1 = if p.value().is_zero_value() {
        None
    } else {
        Some(computed((p1s + p.get() - one) / p.get())?)
    };
    Ok(CoinFlip2Params {
        p,
        x0: spec.ps0().clone(),
        x1: spec.ps1().clone(),
        y0,
        y1,
    })
}

/// Alice sends `a` (0 with probability `p`); Bob replies `b = a` with
/// probability `x_a`. On disagreement Alice confirms `b` with probability
/// `y_b` and aborts otherwise.
pub fn build_coinflip2<T: Scalar>(params: &CoinFlip2Params<T>) -> Result<ProtocolTree<T>> {
    let branch = |a: Outcome, keep: &Prob<T>, y: &Option<Prob<T>>| -> Result<NodeRef<T>> {
        let b = a.flipped();
        let confirm = if keep.value() < &T::one() {
            let y = y.clone().ok_or_else(|| {
                Error::PreconditionViolation(format!("y{} is undefined but needed", b.as_str()))
            })?;
            Node::send_pruned(
                Party::Alice,
                [
                    (label(b), y.clone(), Node::leaf(b)),
                    (
                        label(Outcome::Abort),
                        y.complement(),
                        Node::leaf(Outcome::Abort),
                    ),
                ],
            )
        } else {
            Node::leaf(b)
        };
        Ok(Node::send_pruned(
            Party::Bob,
            [
                (label(a), keep.clone(), Node::leaf(a)),
                (label(b), keep.complement(), confirm),
            ],
        ))
    };
    let zero = if params.p.value().is_zero_value() {
        Node::leaf(Outcome::Abort)
    } else {
        branch(Outcome::Zero, &params.x0, &params.y1)?
    };
    let one = if params.p.value() >= &T::one() {
        Node::leaf(Outcome::Abort)
    } else {
        branch(Outcome::One, &params.x1, &params.y0)?
    };
    Ok(ProtocolTree::new(Node::send_pruned(
        Party::Alice,
        [
            ("0", params.p.clone(), zero),
            ("1", params.p.complement(), one),
        ],
    )))
}

/// Lowers the honest output probabilities of `tree` from `from` to the
/// targets: after each value-`i` leaf Alice keeps `i` with probability
/// `target_ii / from_ii` and announces an abort otherwise.
pub fn dilute<T: Scalar>(
    tree: &ProtocolTree<T>,
    from: &AnalysisResult<T>,
    target_p00: &Prob<T>,
    target_p11: &Prob<T>,
) -> Result<ProtocolTree<T>> {
    let keep = |bit: u8, target: &Prob<T>| -> Result<Option<Prob<T>>> {
        let current = from.honest(bit);
        if target.value().definitely_gt(current.value()) {
            return Err(Error::PreconditionViolation(format!(
                "dilution target p{bit}{bit} = {target} exceeds current value {current}"
            )));
        }
        if current.value().is_zero_value() {
            return Ok(None);
        }
        let ratio = computed(target.get() / current.get())?;
        Ok((ratio.value() < &T::one()).then_some(ratio))
    };
    let wrap = |o: Outcome, keep: Option<Prob<T>>| match keep {
        None => Node::leaf(o),
        Some(k) => Node::send_pruned(
            Party::Alice,
            [
                ("keep", k.clone(), Node::leaf(o)),
                ("abort", k.complement(), Node::leaf(Outcome::Abort)),
            ],
        ),
    };
    let zero = wrap(Outcome::Zero, keep(0, target_p00)?);
    let one = wrap(Outcome::One, keep(1, target_p11)?);
    let abort: NodeRef<T> = Node::leaf(Outcome::Abort);
    Ok(tree.map_leaves(&mut |o| match o {
        Outcome::Zero => zero.clone(),
        Outcome::One => one.clone(),
        Outcome::Abort => abort.clone(),
    }))
}

/// Classical protocol implementing a classically feasible spec.
pub(super) fn synthesize_classical<T: Scalar>(spec: &CoinFlipSpec<T>) -> Result<ProtocolTree<T>> {
    let one = T::one();
    let (p0s, p1s, ps0, ps1) = (spec.p0s(), spec.p1s(), spec.ps0(), spec.ps1());
    let base = if (p0s.get() + p1s.get()).approx_le(&one) {
        build_coinflip1(p0s, p1s, ps0, ps1)?
    } else if (ps0.get() + ps1.get()).approx_le(&one) {
        build_coinflip1(ps0, ps1, p0s, p1s)?.swap_parties()
    } else {
        let (t00, t11) = boundary_targets(spec)?;
        let target = spec.with_honest(t00, t11)?;
        build_coinflip2(&coinflip2_params(&target)?)?
    };
    let from = analyze(&base)?;
    dilute(&base, &from, spec.p00(), spec.p11())
}

/// Honest targets on the classical boundary dominating the spec's honest
/// values: scale both proportionally, then clamp each at its product bound
/// and give the remainder to the other.
fn boundary_targets<T: Scalar>(spec: &CoinFlipSpec<T>) -> Result<(Prob<T>, Prob<T>)> {
    let (p0s, p1s, ps0, ps1) = (
        spec.p0s().get(),
        spec.p1s().get(),
        spec.ps0().get(),
        spec.ps1().get(),
    );
    let c0 = p0s.clone() * ps0.clone();
    let c1 = p1s.clone() * ps1.clone();
    let f = classical_bound_rhs(&p0s, &p1s, &ps0, &ps1);
    let (p00, p11) = (spec.p00().get(), spec.p11().get());
    let total = p00.clone() + p11;
    let mut t00 = if total.is_zero_value() {
        c0.clone().min_of(f.clone())
    } else {
        p00 * f.clone() / total
    };
    if t00 > c0 {
        t00 = c0;
    }
    let mut t11 = f.clone() - t00.clone();
    if t11 > c1 {
        t11 = c1;
        t00 = f - t11.clone();
    }
    Ok((computed(t00)?, computed(t11)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Exact;

    fn q(n: i64, d: i64) -> Prob<Exact> {
        Prob::ratio(n, d).unwrap()
    }

    fn spec(v: [(i64, i64); 6]) -> CoinFlipSpec<Exact> {
        CoinFlipSpec::from_ratios(v).unwrap()
    }

    #[test]
    fn coinflip1_fair_announcement() {
        let t = build_coinflip1(&q(1, 2), &q(1, 2), &q(1, 1), &q(1, 1)).unwrap();
        let r = analyze(&t).unwrap();
        assert_eq!((r.p00, r.p11, r.abort), (q(1, 2), q(1, 2), q(0, 1)));
        assert_eq!((r.force_a0, r.force_a1), (q(1, 1), q(1, 1)));
        assert_eq!((r.force_b0, r.force_b1), (q(1, 2), q(1, 2)));
    }

    #[test]
    fn coinflip1_edge_cases() {
        let r = analyze(&build_coinflip1(&q(1, 1), &q(0, 1), &q(1, 2), &q(1, 1)).unwrap()).unwrap();
        assert_eq!((r.p00, r.p11), (q(1, 2), q(0, 1)));

        let t = build_coinflip1(&q(0, 1), &q(0, 1), &q(1, 2), &q(1, 2)).unwrap();
        assert_eq!(analyze(&t).unwrap().abort, q(1, 1));

        let err = build_coinflip1(&q(3, 4), &q(1, 2), &q(1, 1), &q(1, 1)).unwrap_err();
        assert!(matches!(err, Error::PreconditionViolation(_)));
    }

    #[test]
    fn coinflip2_symmetric_params() {
        let s = spec([(7, 16), (7, 16), (3, 4), (3, 4), (3, 4), (3, 4)]);
        let p = coinflip2_params(&s).unwrap();
        assert_eq!(p.p, q(1, 2));
        assert_eq!((p.x0.clone(), p.x1.clone()), (q(3, 4), q(3, 4)));
        assert_eq!((p.y0.clone(), p.y1.clone()), (Some(q(1, 2)), Some(q(1, 2))));

        let r = analyze(&build_coinflip2(&p).unwrap()).unwrap();
        assert_eq!(
            (r.p00.clone(), r.p11.clone(), r.abort.clone()),
            (q(7, 16), q(7, 16), q(1, 8))
        );
        for (_, v) in &r.fields()[3..] {
            assert_eq!(**v, q(3, 4));
        }
    }

    #[test]
    fn coinflip2_degenerate_p() {
        let s = spec([(1, 2), (1, 4), (1, 1), (1, 2), (1, 2), (1, 1)]);
        let p = coinflip2_params(&s).unwrap();
        assert_eq!(p.p, q(1, 1));
        assert_eq!((p.x0.clone(), p.x1.clone()), (q(1, 2), q(1, 1)));
        assert_eq!((p.y0.clone(), p.y1.clone()), (None, Some(q(1, 2))));

        let t = build_coinflip2(&p).unwrap();
        let Node::Send { branches, .. } = &*t.root else {
            panic!()
        };
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].prob, q(1, 1));
        assert_eq!(analyze(&t).unwrap().force_b0, q(1, 1));
    }

    #[test]
    fn coinflip2_rejects_off_boundary() {
        let s = spec([(1, 4), (7, 16), (3, 4), (3, 4), (3, 4), (3, 4)]);
        let err = coinflip2_params(&s).unwrap_err().to_string();
        assert!(err.contains("boundary"), "{err}");
    }

    #[test]
    fn dilution() {
        let t = build_coinflip1(&q(1, 2), &q(1, 2), &q(1, 1), &q(1, 1)).unwrap();
        let from = analyze(&t).unwrap();

        let r = analyze(&dilute(&t, &from, &q(1, 4), &q(1, 2)).unwrap()).unwrap();
        assert_eq!((r.p00, r.p11), (q(1, 4), q(1, 2)));
        assert_eq!(r.force_a0, q(1, 1));

        assert_eq!(
            analyze(&dilute(&t, &from, &q(1, 2), &q(1, 2)).unwrap()).unwrap(),
            from
        );

        let r = analyze(&dilute(&t, &from, &q(0, 1), &q(0, 1)).unwrap()).unwrap();
        assert_eq!(r.abort, q(1, 1));
        assert!(r.force_b0 <= from.force_b0 && r.force_a1 <= from.force_a1);

        assert!(dilute(&t, &from, &q(3, 4), &q(0, 1)).is_err());
    }

    #[test]
    fn boundary_targets_clamp() {
        // c0 = 1/2·1/2 is below the proportional share of the boundary.
        let s = spec([(1, 4), (0, 1), (1, 2), (1, 1), (1, 2), (1, 1)]);
        let (t00, t11) = boundary_targets(&s).unwrap();
        let f = classical_bound_rhs(
            &q(1, 2).get(),
            &q(1, 1).get(),
            &q(1, 2).get(),
            &q(1, 1).get(),
        );
        assert_eq!(t00, q(1, 4));
        assert_eq!(t00.get() + t11.get(), f);
    }
}
