//! Protocol constructions and the spec-to-protocol synthesizer.

mod classical;
mod quantum;

use crate::analyzer::analyze;
use crate::bounds::{feasible, Setting};
use crate::error::{Error, Result};
use crate::prob::{Prob, Scalar};
use crate::tree::ProtocolTree;
use crate::types::{make_spec, CoinFlipSpec, Outcome};

pub use classical::{build_coinflip1, build_coinflip2, coinflip2_params, dilute, CoinFlip2Params};
pub use quantum::{
    binary_truncation, build_qcoinflip1, build_qcoinflip2, build_unbalanced_wcf, qcoinflip1_params,
    qcoinflip2_params, shift_wcf, QCoinFlip1Params, QCoinFlip2Params,
};

fn computed<T: Scalar>(value: T) -> Result<Prob<T>> {
    Prob::from_computed(value)
}

/// Treats float round-off around zero as zero.
fn snap_zero<T: Scalar>(value: T) -> T {
    if value.approx_eq(&T::zero()) {
        T::zero()
    } else {
        value
    }
}

fn label(o: Outcome) -> &'static str {
    o.as_str()
}

/// Builds a protocol tree implementing `spec` in the given setting.
///
/// Quantum trees use ideal weak-coin-flip nodes; replacing them by
/// `ε`-biased ones costs at most `2ε` on each forcing value.
pub fn synthesize<T: Scalar>(spec: &CoinFlipSpec<T>, setting: Setting) -> Result<ProtocolTree<T>> {
    let verdict = feasible(spec, setting);
    if !verdict.feasible {
        return Err(Error::InfeasibleSpec(verdict.to_string()));
    }
    let one = T::one();
    let (p0s, p1s, ps0, ps1) = (spec.p0s(), spec.p1s(), spec.ps0(), spec.ps1());
    if setting == Setting::Classical
        || (p0s.get() + p1s.get()).approx_le(&one)
        || (ps0.get() + ps1.get()).approx_le(&one)
    {
        return classical::synthesize_classical(spec);
    }

    // Lower Bob's cheat values to the least the honest targets allow.
    let reduce = |honest: &Prob<T>, other: &Prob<T>| -> Result<Prob<T>> {
        if other.value().is_zero_value() {
            Ok(Prob::zero())
        } else {
            computed(honest.get() / other.get())
        }
    };
    let r0 = reduce(spec.p00(), ps0)?;
    let r1 = reduce(spec.p11(), ps1)?;
    let base = if (r0.get() + r1.get()).approx_le(&one) {
        build_coinflip1(&r0, &r1, ps0, ps1)?
    } else {
        let reduced = reduced_spec(spec.p00(), spec.p11(), &r0, &r1, ps0, ps1)?;
        quantum::qcoinflip_tree(&reduced)?
    };
    let from = analyze(&base)?;
    dilute(&base, &from, spec.p00(), spec.p11())
}

/// The spec with Bob's cheat values lowered to `r0`, `r1`. Honest values
/// are clipped to absorb float round-off in the recomputed products.
fn reduced_spec<T: Scalar>(
    p00: &Prob<T>,
    p11: &Prob<T>,
    r0: &Prob<T>,
    r1: &Prob<T>,
    ps0: &Prob<T>,
    ps1: &Prob<T>,
) -> Result<CoinFlipSpec<T>> {
    let clip = |v: &Prob<T>, cap: T| computed(v.get().min_of(cap));
    make_spec(
        clip(p00, r0.get().min_of(ps0.get()))?,
        clip(p11, r1.get().min_of(ps1.get()))?,
        r0.clone(),
        r1.clone(),
        ps0.clone(),
        ps1.clone(),
    )
}
