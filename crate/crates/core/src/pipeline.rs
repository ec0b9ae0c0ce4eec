//! End-to-end reconstruction: relations, realization, orientation, layout.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{FromPrimitive, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    configuration_orientation, fundamental_cycle_basis, incidence_matrix, measure, sample_configuration, Configuration,
    Graph, Orientation,
};
use crate::layout::{integer_layout_within, least_squares_layout, tree_layout, LayoutError, LeastSquaresLayout};
use crate::orient::{compute_orientation, OrientError};
use crate::realize::{realize_graph_with_limit, RealizeError, DEFAULT_MAX_VERTICES};
use crate::relations::{
    compute_relations_with, default_delta, kbasis_relations, spans_cycle_space, CycleSpaceBasis, RelationsError,
    Selection,
};
use crate::{derive_seed, Int, IntMatrix, Rational};

/// Why a reconstruction stopped without an answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// No reduced lattice vector passed the medium-norm threshold.
    NoMediumVectors,
    /// The k-basis search found no short relation.
    NoRelationsFound,
    /// Labeled mode: the number of medium vectors differs from `c`.
    MediumCountMismatch { expected: usize, found: usize },
    /// The realized graph is too large for star enumeration.
    RealizationTooLarge { vertices: usize, limit: usize },
    /// The recovered space is not a consistent signed cycle space of the
    /// graph.
    OrientationConflict(OrientError),
    /// Per-cycle mode: the relation for one fundamental cycle was not a
    /// single full-support signed relation.
    CycleRelation { cycle: usize },
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NoMediumVectors => write!(f, "NoMediumVectors"),
            FailureReason::NoRelationsFound => write!(f, "NoRelationsFound"),
            FailureReason::MediumCountMismatch { expected, found } => {
                write!(f, "MediumCountMismatch(expected {expected}, found {found})")
            }
            FailureReason::RealizationTooLarge { vertices, limit } => {
                write!(f, "RealizationTooLarge({vertices} vertices, limit {limit})")
            }
            FailureReason::OrientationConflict(e) => write!(f, "OrientationConflict({e})"),
            FailureReason::CycleRelation { cycle } => write!(f, "CycleRelation(cycle {cycle})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    /// The output reproduces the lengths exactly.
    ExactSuccess,
    /// Graph and orientation recovered; positions agree with the lengths
    /// within the noise bound.
    CombinatorialSuccess,
    DetectedFailure(FailureReason),
    NotGraphic,
    /// No integer layout agrees with the lengths within the noise bound.
    Inconsistent,
}

impl Status {
    pub fn is_success(&self) -> bool {
        matches!(self, Status::ExactSuccess | Status::CombinatorialSuccess)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::ExactSuccess => write!(f, "ExactSuccess"),
            Status::CombinatorialSuccess => write!(f, "CombinatorialSuccess"),
            Status::DetectedFailure(r) => write!(f, "DetectedFailure({r})"),
            Status::NotGraphic => write!(f, "NotGraphic"),
            Status::Inconsistent => write!(f, "Inconsistent"),
        }
    }
}

/// Input errors, as opposed to reconstruction outcomes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("length vector is empty")]
    EmptyInput,
    #[error("graph has {expected} edges but {found} lengths were given")]
    LengthMismatch { expected: usize, found: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub relations: Duration,
    pub realize: Duration,
    pub orient: Duration,
    pub layout: Duration,
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub status: Status,
    pub graph: Option<Graph>,
    /// `coord_to_edge[k]` is the edge of `graph` measured by `l[k]`.
    pub coord_to_edge: Option<Vec<usize>>,
    pub orientation: Option<Orientation>,
    pub configuration: Option<Configuration<Int>>,
    pub least_squares: Option<LeastSquaresLayout<f64>>,
    /// Least-squares residual; 0 for exact layouts.
    pub residual: Option<f64>,
    /// Dimension of the recovered cycle space.
    pub cycle_rank: Option<usize>,
    pub medium_count: Option<usize>,
    pub three_connected: Option<bool>,
    /// Unlabeled mode cannot validate the medium-vector count, so a wrong
    /// cycle space may go unnoticed.
    pub undetected_risk: bool,
    pub timings: StageTimings,
}

impl ReconstructionResult {
    fn new(status: Status) -> Self {
        ReconstructionResult {
            status,
            graph: None,
            coord_to_edge: None,
            orientation: None,
            configuration: None,
            least_squares: None,
            residual: None,
            cycle_rank: None,
            medium_count: None,
            three_connected: None,
            undetected_risk: false,
            timings: StageTimings::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub delta: Rational,
    pub selection: Selection,
    /// Allowed per-edge deviation of a combinatorial success.
    pub noise_bound: u32,
    pub max_realize_vertices: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            delta: default_delta(),
            selection: Selection::Threshold,
            noise_bound: 1,
            max_realize_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

/// Error model for integer lengths.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum NoiseModel {
    #[default]
    None,
    /// Uniform on `{-1,0,1}^m`.
    Random,
    /// A fixed error vector (entries in `{-1,0,1}`).
    Fixed(Vec<i8>),
}

impl NoiseModel {
    pub fn sample(&self, m: usize, seed: u64) -> Vec<i8> {
        match self {
            NoiseModel::None => vec![0; m],
            NoiseModel::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..m).map(|_| rng.gen_range(-1..=1)).collect()
            }
            NoiseModel::Fixed(eps) => {
                assert_eq!(eps.len(), m, "fixed noise has the wrong length");
                assert!(eps.iter().all(|e| e.abs() <= 1), "noise entries must lie in {{-1,0,1}}");
                eps.clone()
            }
        }
    }

    pub fn apply(&self, l: &[Int], seed: u64) -> Vec<Int> {
        l.iter().zip(self.sample(l.len(), seed)).map(|(x, e)| x + e).collect()
    }
}

/// A sampled reconstruction problem.
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub configuration: Configuration<Int>,
    pub orientation: Orientation,
    pub exact_lengths: Vec<Int>,
    pub lengths: Vec<Int>,
}

/// Samples `p` uniformly from `[1, 2^bits]^n`, redrawing until no edge has
/// coincident endpoints, then measures and adds noise.
pub fn sample_instance(g: &Graph, bits: u32, noise: &NoiseModel, seed: u64) -> Instance {
    for attempt in 0u64.. {
        let p = sample_configuration(g.n(), bits, derive_seed(seed, &[0, attempt]));
        if let Ok(orientation) = configuration_orientation(g, &p) {
            let exact_lengths = measure(g, &p);
            let lengths = noise.apply(&exact_lengths, derive_seed(seed, &[1]));
            return Instance { graph: g.clone(), configuration: p, orientation, exact_lengths, lengths };
        }
    }
    unreachable!()
}

/// Nearest integers, ties to even.
pub fn round_real_lengths(l: &[f64]) -> Vec<Int> {
    l.iter().map(|&x| Int::from_f64(x.round_ties_even()).expect("finite length")).collect()
}

/// True iff the result carries a graph and configuration whose measured
/// lengths differ from `l` by at most `noise_bound` on every coordinate.
pub fn verify_result(result: &ReconstructionResult, l: &[Int], noise_bound: u32) -> bool {
    let (Some(g), Some(q), Some(map)) = (&result.graph, &result.configuration, &result.coord_to_edge) else {
        return false;
    };
    if map.len() != l.len() || q.len() != g.n() {
        return false;
    }
    let measured = measure(g, q);
    let bound = Int::from(noise_bound);
    l.iter().enumerate().all(|(k, x)| (&measured[map[k]] - x).abs() <= bound)
}

fn relations_failure(e: RelationsError) -> Result<Status, PipelineError> {
    match e {
        RelationsError::EmptyInput => Err(PipelineError::EmptyInput),
        RelationsError::NoMediumVectors => Ok(Status::DetectedFailure(FailureReason::NoMediumVectors)),
        RelationsError::NoRelationsFound => Ok(Status::DetectedFailure(FailureReason::NoRelationsFound)),
        RelationsError::Lll(_) => Ok(Status::DetectedFailure(FailureReason::NoMediumVectors)),
    }
}

/// Orientation and layout on a known graph with lengths `lg` in its edge
/// order.
fn orient_and_lay_out(result: &mut ReconstructionResult, g: &Graph, w: &IntMatrix, lg: &[Int], opts: &PipelineOptions) {
    let t = Instant::now();
    let sigma = compute_orientation(g, w);
    result.timings.orient = t.elapsed();
    let sigma = match sigma {
        Ok(s) => s,
        Err(e) => {
            result.status = Status::DetectedFailure(FailureReason::OrientationConflict(e));
            return;
        }
    };
    result.orientation = Some(sigma.clone());
    let t = Instant::now();
    match tree_layout(g, &sigma, lg) {
        Ok(p) => {
            result.configuration = Some(p);
            result.residual = Some(0.0);
            result.status = Status::ExactSuccess;
        }
        Err(LayoutError::InconsistentLengths { .. }) => {
            let ls = least_squares_layout::<f64>(g, &sigma, lg).expect("connected graph");
            result.residual = Some(ls.residual);
            let q =
                integer_layout_within(g, &sigma, lg, &Int::from(opts.noise_bound), Some(&ls)).expect("lengths match");
            result.status = if q.is_some() { Status::CombinatorialSuccess } else { Status::Inconsistent };
            result.configuration = q;
            result.least_squares = Some(ls);
        }
        Err(e) => unreachable!("layout on a validated graph: {e}"),
    }
    result.timings.layout = t.elapsed();
}

/// Realization, orientation and layout from a recovered cycle space.
fn finish_unlabeled(
    mut result: ReconstructionResult,
    w: &IntMatrix,
    l: &[Int],
    opts: &PipelineOptions,
) -> ReconstructionResult {
    result.undetected_risk = true;
    let t = Instant::now();
    let realization = realize_graph_with_limit(w, opts.max_realize_vertices);
    result.timings.realize = t.elapsed();
    let r = match realization {
        Ok(r) => r,
        Err(RealizeError::NotGraphic) | Err(RealizeError::RankDeficient) => {
            result.status = Status::NotGraphic;
            return result;
        }
        Err(RealizeError::TooLarge { vertices, limit }) => {
            result.status = Status::DetectedFailure(FailureReason::RealizationTooLarge { vertices, limit });
            return result;
        }
    };
    let wh = w.select_columns(&r.coordinate_order());
    let lh = r.to_edge_order(l);
    result.three_connected = Some(r.three_connected);
    result.coord_to_edge = Some(r.coord_to_edge.clone());
    orient_and_lay_out(&mut result, &r.graph, &wh, &lh, opts);
    result.graph = Some(r.graph);
    result
}

fn finish_labeled(
    mut result: ReconstructionResult,
    g: &Graph,
    w: &IntMatrix,
    l: &[Int],
    opts: &PipelineOptions,
) -> ReconstructionResult {
    result.coord_to_edge = Some((0..g.m()).collect());
    result.three_connected = Some(g.is_k_connected(3));
    orient_and_lay_out(&mut result, g, w, l, opts);
    result.graph = Some(g.clone());
    result
}

/// Algorithm without knowledge of `n` or `G`.
pub fn reconstruct_unlabeled(l: &[Int], opts: &PipelineOptions) -> Result<ReconstructionResult, PipelineError> {
    let t = Instant::now();
    let relations = compute_relations_with(l, &opts.delta, opts.selection);
    let elapsed = t.elapsed();
    let out = match relations {
        Ok(out) => out,
        Err(e) => {
            let mut r = ReconstructionResult::new(relations_failure(e)?);
            r.undetected_risk = true;
            r.timings.relations = elapsed;
            return Ok(r);
        }
    };
    let mut result = ReconstructionResult::new(Status::Inconsistent);
    result.timings.relations = elapsed;
    result.medium_count = Some(out.medium_count);
    result.cycle_rank = Some(out.basis.dimension());
    Ok(finish_unlabeled(result, out.basis.rows(), l, opts))
}

fn check_labeled_input(g: &Graph, l: &[Int]) -> Result<(), PipelineError> {
    if l.is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    if l.len() != g.m() {
        return Err(PipelineError::LengthMismatch { expected: g.m(), found: l.len() });
    }
    if !g.is_connected() {
        return Err(PipelineError::Disconnected);
    }
    Ok(())
}

/// `G` is known and `l[k]` measures edge `k` of `G`.
pub fn reconstruct_labeled(
    g: &Graph,
    l: &[Int],
    opts: &PipelineOptions,
) -> Result<ReconstructionResult, PipelineError> {
    check_labeled_input(g, l)?;
    let c = g.cycle_rank();
    let t = Instant::now();
    let relations = compute_relations_with(l, &opts.delta, opts.selection);
    let elapsed = t.elapsed();
    let out = match relations {
        Ok(out) => out,
        Err(e) => {
            let mut r = ReconstructionResult::new(relations_failure(e)?);
            r.timings.relations = elapsed;
            return Ok(r);
        }
    };
    let mut result = ReconstructionResult::new(Status::Inconsistent);
    result.timings.relations = elapsed;
    result.medium_count = Some(out.medium_count);
    result.cycle_rank = Some(out.basis.dimension());
    if opts.selection == Selection::Threshold && out.medium_count != c {
        result.status =
            Status::DetectedFailure(FailureReason::MediumCountMismatch { expected: c, found: out.medium_count });
        return Ok(result);
    }
    Ok(finish_labeled(result, g, out.basis.rows(), l, opts))
}

/// Labeled reconstruction running lattice reduction on one fundamental
/// cycle at a time.
pub fn reconstruct_labeled_percycle(
    g: &Graph,
    l: &[Int],
    opts: &PipelineOptions,
) -> Result<ReconstructionResult, PipelineError> {
    check_labeled_input(g, l)?;
    let (_, cycles) = fundamental_cycle_basis(g).map_err(|_| PipelineError::Disconnected)?;
    let t = Instant::now();
    let mut rows = Vec::with_capacity(cycles.len());
    let mut failure = None;
    for (i, cycle) in cycles.iter().enumerate() {
        let sub: Vec<Int> = cycle.edges.iter().map(|&e| l[e].clone()).collect();
        let ok = match compute_relations_with(&sub, &opts.delta, Selection::Threshold) {
            Ok(out) if out.medium_count == 1 && out.basis.dimension() == 1 => {
                let row = out.basis.rows().row(0);
                if row.iter().all(|x| x.abs() == Int::from(1)) {
                    let mut full = vec![Int::zero(); g.m()];
                    for (&e, x) in cycle.edges.iter().zip(row) {
                        full[e] = x.clone();
                    }
                    rows.push(full);
                    true
                } else {
                    false
                }
            }
            _ => false,
        };
        if !ok {
            failure = Some(i);
            break;
        }
    }
    let mut result = ReconstructionResult::new(Status::Inconsistent);
    result.timings.relations = t.elapsed();
    if let Some(cycle) = failure {
        result.status = Status::DetectedFailure(FailureReason::CycleRelation { cycle });
        return Ok(result);
    }
    let w = CycleSpaceBasis::from_vectors(g.m(), rows, Vec::new());
    result.cycle_rank = Some(w.dimension());
    result.medium_count = Some(cycles.len());
    Ok(finish_labeled(result, g, w.rows(), l, opts))
}

/// Reconstruction from the short-relation search instead of lattice
/// reduction; labeled when `g` is given.
pub fn reconstruct_kbasis(
    l: &[Int],
    k: usize,
    g: Option<&Graph>,
    opts: &PipelineOptions,
) -> Result<ReconstructionResult, PipelineError> {
    if let Some(g) = g {
        check_labeled_input(g, l)?;
    }
    let t = Instant::now();
    let relations = kbasis_relations(l, k, opts.noise_bound, g.map(Graph::cycle_rank));
    let elapsed = t.elapsed();
    let w = match relations {
        Ok(w) => w,
        Err(e) => {
            let mut r = ReconstructionResult::new(relations_failure(e)?);
            r.timings.relations = elapsed;
            return Ok(r);
        }
    };
    let mut result = ReconstructionResult::new(Status::Inconsistent);
    result.timings.relations = elapsed;
    result.cycle_rank = Some(w.dimension());
    Ok(match g {
        Some(g) => {
            if w.dimension() != g.cycle_rank() {
                result.status = Status::DetectedFailure(FailureReason::MediumCountMismatch {
                    expected: g.cycle_rank(),
                    found: w.dimension(),
                });
                return Ok(result);
            }
            finish_labeled(result, g, w.rows(), l, opts)
        }
        None => finish_unlabeled(result, w.rows(), l, opts),
    })
}

/// The experiment success event: the recovered span is exactly the signed
/// cycle space of the instance.
pub fn recovers_cycle_space(instance: &Instance, delta: &Rational, selection: Selection) -> bool {
    match compute_relations_with(&instance.lengths, delta, selection) {
        Ok(out) => {
            let inc: IntMatrix = incidence_matrix(&instance.graph, &instance.orientation);
            spans_cycle_space(out.basis.rows(), &inc)
        }
        Err(_) => false,
    }
}
