//! Message-length optimization by a trellis search over density-evolution
//! states, pruned per quantized syndrome information.
//!
//! Every trellis node carries the full density-evolution state of its
//! surviving path; the bin is only used to decide which paths compete. Among
//! the paths reaching the same bin at the same depth only the cheapest (total
//! number of sub-iterations) survives. The constant-`q_max` path is carried
//! alongside the bin winners and expanded like them, so the search never does
//! worse than fixed-length decoding at the largest length. Expansion continues past the first
//! converged path until no live path can still undercut the best converged one.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::{nearest_populated, DeEngine, DeState};
use crate::error::{Error, Result};
use crate::message::{w2l_from_distribution, W2lTable, MAX_Q};
use crate::state::state_bin;

/// Optimized per-iteration message lengths and the state-to-length map derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSchedule {
    /// Message length of each iteration along the optimal path.
    pub q_star: Vec<usize>,
    /// Message length to use after an iteration that ended in bin `b`; entry 0
    /// also serves the first iteration.
    pub f_q: Vec<usize>,
    pub bins: usize,
    pub q_max: usize,
    pub design_snr_db: f64,
    pub total_cost: usize,
    /// False when no path reached convergence within the depth limit.
    #[serde(default = "default_true")]
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

fn default_true() -> bool {
    true
}

/// Total number of sub-iterations of a length sequence.
pub fn path_cost(q: &[usize]) -> usize {
    q.iter().sum()
}

impl LengthSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 || self.f_q.len() != self.bins {
            return Err(Error::Config(format!(
                "schedule has {} entries for {} bins",
                self.f_q.len(),
                self.bins
            )));
        }
        if self.q_max == 0 || self.q_max > MAX_Q {
            return Err(Error::Config(format!(
                "q_max = {} out of range",
                self.q_max
            )));
        }
        if let Some(q) = self
            .q_star
            .iter()
            .chain(&self.f_q)
            .find(|&&q| q == 0 || q > self.q_max)
        {
            return Err(Error::Config(format!(
                "message length {q} outside 1..={}",
                self.q_max
            )));
        }
        if self.total_cost != path_cost(&self.q_star) {
            return Err(Error::Config("total_cost disagrees with q_star".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: LengthSchedule = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone)]
struct Node {
    bin: usize,
    cost: usize,
    state: Option<DeState>,
    // Index in the previous layer and the length chosen from it.
    back: Option<(usize, usize)>,
    // Part of the constant-`q_max` reference chain rather than a bin winner.
    reference: bool,
}

/// Counters collected while searching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub depth: usize,
    pub expanded: usize,
    pub pruned: usize,
    pub max_survivors: usize,
}

#[derive(Debug, Clone)]
pub struct Optimized {
    pub schedule: LengthSchedule,
    pub stats: SearchStats,
}

/// Candidate ordering: cost, then chosen length, then predecessor bin.
type CandidateKey = (usize, usize, usize);

fn candidate_key(cost: usize, q: usize, prev_bin: usize) -> CandidateKey {
    (cost, q, prev_bin)
}

/// Finds the cheapest length sequence reaching convergence.
pub fn optimize(
    engine: &DeEngine,
    q_max: usize,
    bins: usize,
    max_depth: usize,
) -> Result<Optimized> {
    if q_max == 0 || q_max > MAX_Q {
        return Err(Error::InvalidParameter(format!(
            "q_max = {q_max} out of range"
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    let mut layers: Vec<Vec<Node>> = vec![vec![Node {
        bin: 0,
        cost: 0,
        state: None,
        back: None,
        reference: true,
    }]];
    // (cost, depth, q, prev_bin, index in layer depth-1)
    let mut best_terminal: Option<(usize, usize, usize, usize, usize)> = None;
    let mut stats = SearchStats::default();

    for depth in 1..=max_depth {
        let prev = layers.last().expect("root layer");
        let mut winners: Vec<Option<(Node, CandidateKey)>> = vec![None; bins];
        let mut landed_min = vec![usize::MAX; bins];
        let mut reference: Option<Node> = None;
        for (idx, node) in prev.iter().enumerate() {
            if best_terminal.is_some_and(|t| node.cost + 1 >= t.0) {
                continue;
            }
            for q in 1..=q_max {
                let cost = node.cost + q;
                let state = engine.step(node.state.as_ref(), q)?;
                stats.expanded += 1;
                if state.converged() {
                    let cand = (cost, depth, q, node.bin, idx);
                    let better = match best_terminal {
                        None => true,
                        Some(t) => (cand.0, cand.1, cand.2, cand.3) < (t.0, t.1, t.2, t.3),
                    };
                    if better {
                        best_terminal = Some(cand);
                    }
                    continue;
                }
                let bin = state_bin(state.i_s, bins);
                landed_min[bin] = landed_min[bin].min(cost);
                if node.reference && q == q_max {
                    reference = Some(Node {
                        bin,
                        cost,
                        state: Some(state.clone()),
                        back: Some((idx, q)),
                        reference: true,
                    });
                }
                let key = candidate_key(cost, q, node.bin);
                let replace = match &winners[bin] {
                    None => true,
                    Some((_, k)) => key < *k,
                };
                if replace {
                    if winners[bin].is_some() {
                        stats.pruned += 1;
                    }
                    winners[bin] = Some((
                        Node {
                            bin,
                            cost,
                            state: Some(state),
                            back: Some((idx, q)),
                            reference: false,
                        },
                        key,
                    ));
                } else {
                    stats.pruned += 1;
                }
            }
        }
        let mut layer: Vec<Node> = winners.into_iter().flatten().map(|(n, _)| n).collect();
        for n in &layer {
            // Dominance: the survivor of a bin is the cheapest path landing there.
            assert_eq!(
                n.cost, landed_min[n.bin],
                "survivor in bin {} is not the cheapest",
                n.bin
            );
        }
        layer.extend(reference);
        stats.depth = depth;
        stats.max_survivors = stats.max_survivors.max(layer.len());
        let exhausted = layer.is_empty()
            || best_terminal.is_some_and(|t| layer.iter().all(|n| n.cost + 1 >= t.0));
        layers.push(layer);
        if exhausted {
            break;
        }
    }

    let design_snr_db = engine.channel.ebno_db;
    let (q_star, converged, diagnostic) = match best_terminal {
        Some((_, depth, q, _, idx)) => {
            let mut q_star = vec![q];
            q_star.extend(backtrack(&layers, depth - 1, idx));
            q_star.reverse();
            (q_star, true, None)
        }
        None => {
            // Best effort: the deepest layer's highest bin, cheapest within it.
            let (depth, layer) = layers
                .iter()
                .enumerate()
                .rev()
                .find(|(_, l)| !l.is_empty())
                .expect("root layer");
            let idx = (0..layer.len())
                .max_by(|&a, &b| {
                    layer[a]
                        .bin
                        .cmp(&layer[b].bin)
                        .then(layer[b].cost.cmp(&layer[a].cost))
                })
                .expect("non-empty layer");
            let mut q_star = backtrack(&layers, depth, idx);
            q_star.reverse();
            let reached = layer[idx].state.as_ref().map_or(0.0, |s| s.i_s);
            (
                q_star,
                false,
                Some(format!(
                    "no path converged within {max_depth} iterations at {design_snr_db} dB; best path reaches I_S = {reached:.6}"
                )),
            )
        }
    };
    if q_star.is_empty() {
        return Err(Error::InvalidParameter(
            "max_depth must be at least 1".into(),
        ));
    }
    let states = replay(engine, &q_star)?;
    let f_q = state_map(&states, &q_star, bins, |_, next_q| next_q);
    let schedule = LengthSchedule {
        total_cost: path_cost(&q_star),
        q_star,
        f_q,
        bins,
        q_max,
        design_snr_db,
        converged,
        diagnostic,
    };
    Ok(Optimized { schedule, stats })
}

/// Lengths from `layers[depth][idx]` back to the root, most recent first.
fn backtrack(layers: &[Vec<Node>], mut depth: usize, mut idx: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while let Some((prev, q)) = layers[depth][idx].back {
        out.push(q);
        idx = prev;
        depth -= 1;
    }
    out
}

fn replay(engine: &DeEngine, q_star: &[usize]) -> Result<Vec<DeState>> {
    let mut states: Vec<DeState> = Vec::with_capacity(q_star.len());
    for &q in q_star {
        let next = engine.step(states.last(), q)?;
        states.push(next);
    }
    Ok(states)
}

/// Assigns a value to every bin visited along the path: the launch bin of
/// iteration `t + 1` is the bin reached after iteration `t` (bin 0 before the
/// first). Later visits overwrite earlier ones; unvisited bins copy the
/// nearest visited bin, preferring the lower one.
fn state_map<T: Clone>(
    states: &[DeState],
    q_star: &[usize],
    bins: usize,
    value: impl Fn(usize, usize) -> T,
) -> Vec<T> {
    let mut slots: Vec<Option<T>> = vec![None; bins];
    for (t, &q) in q_star.iter().enumerate() {
        let launch = if t == 0 {
            0
        } else {
            state_bin(states[t - 1].i_s, bins)
        };
        slots[launch] = Some(value(t, q));
    }
    let populated: Vec<bool> = slots.iter().map(Option::is_some).collect();
    (0..bins)
        .map(|b| {
            let src = nearest_populated(&populated, b).expect("bin 0 is always visited");
            slots[src].clone().expect("populated")
        })
        .collect()
}

/// State table for adaptive decoding: the row of bin `b` converts the
/// check-to-variable messages of the iteration launched from `b`, at the
/// length `f_q[b]` chosen there.
pub fn tables_for_schedule(schedule: &LengthSchedule, engine: &DeEngine) -> Result<W2lTable> {
    schedule.validate()?;
    let states = replay(engine, &schedule.q_star)?;
    let l_max = engine.opts.l_max;
    let owners = state_map(&states, &schedule.q_star, schedule.bins, |t, _| t);
    let rows = owners
        .into_iter()
        .map(|t| w2l_from_distribution(states[t].c2v.pmf(), l_max))
        .collect::<Result<Vec<_>>>()?;
    let mut table = W2lTable::state(rows, l_max)?;
    table.design_snr_db = Some(schedule.design_snr_db);
    table.de_converged = Some(schedule.converged);
    Ok(table)
}
