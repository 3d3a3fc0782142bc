//! Synchronous CONGEST round engine with per-message bit accounting.
//!
//! A round has two phases: every live node emits messages to neighbors,
//! then every live node consumes the messages addressed to it. A message
//! larger than the bit budget aborts the run.

mod cluster;
mod tree;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub use cluster::{
    cluster, cluster_leader_solve, ClusterSolution, Clustering, ElementWeights, LeaderOutput,
    DEFAULT_GATHER_CAPACITY,
};
pub use tree::{bfs_tree, tree_aggregate, AggregateOp, Aggregate, RootedTree};

/// Default constant `c_B` in the bit budget `c_B·⌈log2 n⌉`.
pub const DEFAULT_BUDGET_FACTOR: usize = 4;

/// `⌈log2 n⌉`, at least 1.
pub fn log2_ceil(n: usize) -> usize {
    let n = n.max(2);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Bit budget `factor·⌈log2 n⌉`.
pub fn bit_budget(n: usize, factor: usize) -> usize {
    factor * log2_ceil(n)
}

/// Binary length of `x`, at least 1.
pub fn bit_len(x: u128) -> usize {
    (u128::BITS - x.leading_zeros()).max(1) as usize
}

/// Round and message accounting for a run or a composition of runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundStats {
    /// Rounds executed by the engine or charged for explicit data movement.
    pub rounds: u64,
    /// Rounds according to the cited bounds of subroutines solved at leaders;
    /// equals `rounds` for pure engine runs.
    pub rounds_cited: u64,
    pub max_bits_per_message: usize,
    pub messages_sent: u64,
    pub bit_budget: usize,
}

impl RoundStats {
    /// Composition of two phases that run one after the other.
    pub fn then(self, next: RoundStats) -> RoundStats {
        RoundStats {
            rounds: self.rounds + next.rounds,
            rounds_cited: self.rounds_cited + next.rounds_cited,
            max_bits_per_message: self.max_bits_per_message.max(next.max_bits_per_message),
            messages_sent: self.messages_sent + next.messages_sent,
            bit_budget: self.bit_budget.max(next.bit_budget),
        }
    }

    /// Composition of two phases that run concurrently on disjoint parts.
    pub fn alongside(self, other: RoundStats) -> RoundStats {
        RoundStats {
            rounds: self.rounds.max(other.rounds),
            rounds_cited: self.rounds_cited.max(other.rounds_cited),
            max_bits_per_message: self.max_bits_per_message.max(other.max_bits_per_message),
            messages_sent: self.messages_sent + other.messages_sent,
            bit_budget: self.bit_budget.max(other.bit_budget),
        }
    }

    /// Checks the message-size contract.
    /// Rounds charged for a step computed without per-message simulation.
    pub fn accounted(rounds: u64, config: &SimConfig) -> RoundStats {
        RoundStats {
            rounds,
            rounds_cited: rounds,
            bit_budget: config.bit_budget,
            ..RoundStats::default()
        }
    }

    pub fn within_budget(&self) -> bool {
        self.max_bits_per_message <= self.bit_budget
    }
}

/// A message payload with a known encoded size.
pub trait Message: Clone {
    fn bits(&self) -> usize;
}

impl Message for () {
    fn bits(&self) -> usize {
        1
    }
}

impl Message for bool {
    fn bits(&self) -> usize {
        1
    }
}

impl Message for u64 {
    fn bits(&self) -> usize {
        bit_len(u128::from(*self))
    }
}

impl Message for u128 {
    fn bits(&self) -> usize {
        bit_len(*self)
    }
}

impl<M: Message> Message for Vec<M> {
    fn bits(&self) -> usize {
        self.iter().map(Message::bits).sum::<usize>().max(1)
    }
}

/// What a node knows when it starts.
#[derive(Debug, Clone)]
pub struct NodeContext {
    pub id: usize,
    /// Network size, maximum degree and weight bound are global knowledge.
    pub n: usize,
    pub max_degree: usize,
    pub max_weight: u64,
    pub node_weight: u64,
    /// `(neighbor, edge id)` pairs sorted by neighbor.
    pub neighbors: Vec<(usize, usize)>,
    pub bit_budget: usize,
    /// Per-node seed derived from the run seed.
    pub seed: u64,
}

/// A per-node state machine.
pub trait NodeProgram {
    type Msg: Message;
    type Output;

    /// Messages for this round as `(neighbor, payload)`, at most one per neighbor.
    fn send(&mut self, round: u64) -> Vec<(usize, Self::Msg)>;

    /// Messages received this round as `(sender, payload)`, sorted by sender.
    fn receive(&mut self, round: u64, inbox: Vec<(usize, Self::Msg)>);

    fn halted(&self) -> bool;

    /// A passive node acts only on incoming messages. When no messages are
    /// in flight and every live node is passive the run ends.
    fn passive(&self) -> bool {
        false
    }

    fn output(self) -> Self::Output;
}

/// Engine parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub bit_budget: usize,
    pub max_rounds: u64,
    pub seed: u64,
}

impl SimConfig {
    /// Default budget `4·⌈log2 n⌉` and a generous round limit.
    pub fn for_graph(g: &WeightedGraph) -> Self {
        SimConfig {
            bit_budget: bit_budget(g.n(), DEFAULT_BUDGET_FACTOR),
            max_rounds: 1_000_000,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn empty_stats(&self) -> RoundStats {
        RoundStats {
            bit_budget: self.bit_budget,
            ..RoundStats::default()
        }
    }
}

fn node_seed(seed: u64, id: usize) -> u64 {
    // SplitMix64 finalizer over the pair.
    let mut z = seed ^ (id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one program instance per node in lockstep rounds.
pub fn run_protocol<P, F>(
    g: &WeightedGraph,
    config: &SimConfig,
    mut init: F,
) -> Result<(Vec<P::Output>, RoundStats)>
where
    P: NodeProgram,
    F: FnMut(&NodeContext) -> P,
{
    let max_degree = g.max_degree();
    let mut nodes: Vec<P> = (0..g.n())
        .map(|v| {
            init(&NodeContext {
                id: v,
                n: g.n(),
                max_degree,
                max_weight: g.max_weight(),
                node_weight: g.node_weight(v),
                neighbors: g.neighbors(v).to_vec(),
                bit_budget: config.bit_budget,
                seed: node_seed(config.seed, v),
            })
        })
        .collect();
    let mut stats = config.empty_stats();
    let mut last_target = vec![0u64; g.n()];
    let mut round = 0u64;
    loop {
        if nodes.iter().all(|p| p.halted()) {
            break;
        }
        if round == config.max_rounds {
            return Err(Error::Timeout {
                max_rounds: config.max_rounds,
            });
        }
        round += 1;
        let mut inboxes: Vec<Vec<(usize, P::Msg)>> = (0..g.n()).map(|_| Vec::new()).collect();
        let mut sent_any = false;
        for (v, node) in nodes.iter_mut().enumerate() {
            if node.halted() {
                continue;
            }
            for (to, msg) in node.send(round) {
                if g.edge_id(v, to).is_none() {
                    return Err(Error::Protocol {
                        round,
                        message: format!("node {v} addressed non-neighbor {to}"),
                    });
                }
                let key = round * (g.n() as u64 + 1) + v as u64 + 1;
                if last_target[to] == key {
                    return Err(Error::Protocol {
                        round,
                        message: format!("node {v} sent twice to {to}"),
                    });
                }
                last_target[to] = key;
                let bits = msg.bits();
                if bits > config.bit_budget {
                    return Err(Error::ProtocolViolation {
                        round,
                        from: v,
                        to,
                        bits,
                        budget: config.bit_budget,
                    });
                }
                stats.max_bits_per_message = stats.max_bits_per_message.max(bits);
                stats.messages_sent += 1;
                sent_any = true;
                inboxes[to].push((v, msg));
            }
        }
        if !sent_any && nodes.iter().all(|p| p.halted() || p.passive()) {
            round -= 1;
            break;
        }
        for (v, node) in nodes.iter_mut().enumerate() {
            if node.halted() {
                continue;
            }
            let mut inbox = std::mem::take(&mut inboxes[v]);
            inbox.sort_by_key(|&(from, _)| from);
            node.receive(round, inbox);
        }
    }
    stats.rounds = round;
    stats.rounds_cited = round;
    Ok((nodes.into_iter().map(NodeProgram::output).collect(), stats))
}
