//! Local simulation of greedy MIS and the approximate-MIS LCA built on it.

mod amis;
mod simulate;

pub use amis::{
    find_good_ordering, r_exhaustive, r_statistic, sample_vertices, AmisLca, AmisParams, DrawReport, GoodOrdering,
    RStatistic, DEFAULT_DELTA, MAX_ORDERING_INDEPENDENCE,
};
pub(crate) use amis::{check_eps_delta, sample_size, trials};
pub use simulate::{ls_mis, LsMis, LsOutcome, LsResult, Permutation, Priority};
