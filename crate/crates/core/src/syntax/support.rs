//! Variable support, strengthening and context reordering.
//!
//! Supports are reported as de Bruijn *levels* (position from the start of
//! the context), which are stable under extension.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Item, Subst, Telescope};

/// Levels of the variables `item` mentions, closed under the dependencies
/// recorded in the types of `ctx`.
pub fn support(ctx: &Telescope, item: &Item) -> BTreeSet<usize> {
    let n = ctx.len();
    let mut seeds = Vec::new();
    item.for_each_var(&mut |i| {
        assert!(i < n, "variable {i} out of range for a context of length {n}");
        seeds.push(n - 1 - i);
    });
    close_levels(ctx, seeds)
}

/// Dependency closure of a set of levels.
pub fn close_levels(ctx: &Telescope, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<usize> = seeds.into_iter().collect();
    while let Some(l) = stack.pop() {
        if out.insert(l) {
            ctx.0[l].for_each_var(&mut |i| stack.push(l - 1 - i));
        }
    }
    out
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("depends on rigid variable {index}")]
pub struct DependsOnRigid {
    /// Index of the first offending variable, in left-to-right order.
    pub index: usize,
}

/// Moves `item` from `Γ.Δ` to `Γ` where `|Δ| = by`, failing if it mentions a
/// variable of `Δ`.
pub fn strengthen(item: &Item, by: usize) -> Result<Item, DependsOnRigid> {
    let mut first = None;
    item.for_each_var(&mut |i| {
        if i < by && first.is_none() {
            first = Some(i);
        }
    });
    if let Some(index) = first {
        return Err(DependsOnRigid { index });
    }
    Ok(item.rename(&|i| Some(i - by)).expect("all variables are past the cutoff"))
}

/// A permutation of a context that respects dependencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reordering {
    /// The permuted context `Γ'`.
    pub ctx: Telescope,
    /// `Γ' → Γ`: one term over `Γ'` per entry of `Γ`.
    pub fwd: Subst,
    /// `Γ → Γ'`: one term over `Γ` per entry of `Γ'`.
    pub inv: Subst,
    /// `order[j]` is the old level of the new entry `j`.
    pub order: Vec<usize>,
}

/// Permutes `ctx` so that new entry `j` is old level `order[j]`. `None` when
/// `order` is not a permutation or puts an entry before one it depends on.
pub fn reorder(ctx: &Telescope, order: &[usize]) -> Option<Reordering> {
    let n = ctx.len();
    if order.len() != n {
        return None;
    }
    let mut pos = vec![usize::MAX; n];
    for (j, &l) in order.iter().enumerate() {
        if l >= n || pos[l] != usize::MAX {
            return None;
        }
        pos[l] = j;
    }
    let mut new = Telescope::empty();
    for (j, &l) in order.iter().enumerate() {
        let ty = ctx.0[l].rename(&|i| {
            let p = pos[l - 1 - i];
            (p < j).then(|| j - 1 - p)
        })?;
        new.push(ty);
    }
    let fwd = Subst((0..n).map(|l| super::var_at_level(n, pos[l])).collect());
    let inv = Subst(order.iter().map(|&l| super::var_at_level(n, l)).collect());
    Some(Reordering { ctx: new, fwd, inv, order: order.to_vec() })
}

/// A stable partition of a context into a dependency-closed front and the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub reordering: Reordering,
    pub front_len: usize,
}

/// Puts the levels in `front` first (in their original order), then the
/// remaining entries. `None` if `front` is not closed under dependencies.
pub fn split_by_support(ctx: &Telescope, front: &BTreeSet<usize>) -> Option<Split> {
    let mut order: Vec<usize> = front.iter().copied().collect();
    order.extend((0..ctx.len()).filter(|l| !front.contains(l)));
    let reordering = reorder(ctx, &order)?;
    Some(Split { reordering, front_len: front.len() })
}
