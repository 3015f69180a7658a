//! Batch entry points over many mattes.

use crate::connectivity::refine;
use crate::error::Result;
use crate::exec::Execution;
use crate::image::AlphaMatte;
use crate::metrics::{evaluate_pair, EvalOptions, MetricReport, Reduction};
use crate::trimap::Trimap;

pub fn refine_all(alphas: &[AlphaMatte], exec: Execution) -> Vec<Result<AlphaMatte>> {
    exec.map(alphas, refine)
}

/// One prediction/ground-truth pair, optionally restricted to a trimap's
/// unknown band.
#[derive(Clone, Debug)]
pub struct EvalPair {
    pub pred: AlphaMatte,
    pub gt: AlphaMatte,
    pub trimap: Option<Trimap>,
}

pub fn evaluate_all(pairs: &[EvalPair], reduction: Reduction, exec: Execution) -> Vec<Result<MetricReport>> {
    exec.map(pairs, |p| {
        let options = EvalOptions {
            trimap: p.trimap.as_ref(),
            reduction,
        };
        evaluate_pair(&p.pred, &p.gt, &options)
    })
}
