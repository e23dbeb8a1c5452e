//! The staged solve pipeline.
//!
//! Stage 1 scans `H`'s components in canonical order and, for each, computes
//! the unique maximal subgraph in which every edge `uv` has
//! `L(N[u] ∩ N[v])` equal to the label set of a vertex cover of `G` and every
//! isolated vertex's own label is one. The first nonempty such subgraph `S`
//! is shrunk vertex by vertex to a minimal `I`; if `I` is a clique its label
//! set is a minimum cover. Otherwise stage 2 repeats from the same grade
//! with the filtered edge neighbourhood, and stages `t >= 3` use the
//! hyperedge engine in [`crate::hyper`].

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bits::{self, BitMatrix};
use crate::graph::{self, pad_to_power_of_two, GraphError, LabeledGraph, PaddedGraph};
use crate::hyper::{self, HyperError, HyperState};
use crate::labels::LabelSet;
use crate::mcc::{Component, MccGraph};
use crate::oracle;

pub const DEFAULT_MAX_STAGE: u32 = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("graph needs k = {graph_k} but H was built for k = {h_k}")]
    KMismatch { graph_k: u32, h_k: u32 },
    #[error("edge ({u},{v}) is not present")]
    AbsentEdge { u: usize, v: usize },
    #[error("subgraph is empty")]
    EmptyState,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error("stage {stage} produced {labels}, which is not a minimum vertex cover: {detail}")]
    Unsound { stage: u32, labels: LabelSet, detail: String },
}

/// Edge condition used by the fixpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeRule {
    /// `N[uv] = N[u] ∩ N[v]`.
    Plain,
    /// `N[uv]` keeps only the `w ∈ N[u] ∩ N[v]` whose `N[u] ∩ N[v] ∩ N[w]`
    /// is itself a cover's label set. `matlab` exempts `u` and `v` from the
    /// filter.
    Filtered { matlab: bool },
}

impl EdgeRule {
    pub fn for_stage(stage: u32, matlab_2plus: bool) -> Self {
        if stage >= 2 {
            EdgeRule::Filtered { matlab: matlab_2plus }
        } else {
            EdgeRule::Plain
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ScanOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Default)]
struct MixHasher(u64);

impl Hasher for MixHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, x: u64) {
        let h = (self.0 ^ x).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        self.0 = h ^ (h >> 29);
    }
}

/// The "is `labels` the label set of some vertex cover of G" test, memoized
/// per solve.
pub struct CoverTest<'g> {
    graph: &'g PaddedGraph,
    memo: HashMap<u64, bool, BuildHasherDefault<MixHasher>>,
    pub queries: u64,
}

impl<'g> CoverTest<'g> {
    pub fn new(graph: &'g PaddedGraph) -> Self {
        CoverTest {
            graph,
            memo: HashMap::default(),
            queries: 0,
        }
    }

    pub fn graph(&self) -> &'g PaddedGraph {
        self.graph
    }

    #[inline]
    pub fn check(&mut self, labels: LabelSet) -> bool {
        self.queries += 1;
        let graph = self.graph;
        *self
            .memo
            .entry(labels.bits())
            .or_insert_with(|| graph.is_vertex_cover(labels))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }
}

/// Live vertex and edge presence over one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphState<'h> {
    comp: &'h Component,
    present: Vec<u64>,
    edges: BitMatrix,
}

impl<'h> SubgraphState<'h> {
    /// The whole component.
    pub fn full(comp: &'h Component) -> Self {
        let n = comp.vertex_count();
        let mut present = vec![0; bits::words_for(n)];
        for v in 0..n {
            bits::set(&mut present, v);
        }
        SubgraphState {
            comp,
            present,
            edges: comp.adjacency().clone(),
        }
    }

    pub fn component(&self) -> &'h Component {
        self.comp
    }

    pub fn is_empty(&self) -> bool {
        bits::is_empty(&self.present)
    }

    pub fn is_present(&self, v: usize) -> bool {
        bits::get(&self.present, v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.get(u, v)
    }

    pub fn present_mask(&self) -> &[u64] {
        &self.present
    }

    /// Present local vertex ids, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        bits::ones(&self.present).collect()
    }

    pub fn vertex_count(&self) -> usize {
        bits::count(&self.present)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.edge_count()
    }

    /// Present edges `(u, v)` with `u < v`, lexicographic.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in bits::ones(&self.present) {
            out.extend(bits::ones(self.edges.row(u)).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn edges(&self) -> &BitMatrix {
        &self.edges
    }

    /// `L(V(state))`.
    pub fn labels(&self) -> LabelSet {
        self.comp.labels_of(&self.present)
    }

    pub fn remove_vertex(&mut self, v: usize) {
        self.edges.isolate(v);
        bits::clear(&mut self.present, v);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.edges.clear_sym(u, v);
    }

    pub fn closed_neighborhood(&self, v: usize) -> Result<Vec<u64>, GraphError> {
        graph::closed_neighborhood(&self.edges, &self.present, v)
    }

    /// `N[u] ∩ N[v]` as a local bit set, into `out`.
    #[inline]
    fn common_closed(&self, u: usize, v: usize, out: &mut Vec<u64>) {
        out.clear();
        out.extend(self.edges.row(u).iter().zip(self.edges.row(v)).map(|(a, b)| a & b));
        bits::set(out, u);
        bits::set(out, v);
    }
}

/// Label set of `N[uv]` under `rule`.
pub fn edge_neighborhood(
    state: &SubgraphState<'_>,
    u: usize,
    v: usize,
    rule: EdgeRule,
    cover: &mut CoverTest<'_>,
) -> Result<LabelSet, EngineError> {
    if u == v || !state.has_edge(u, v) {
        return Err(EngineError::AbsentEdge { u, v });
    }
    let mut base = Vec::new();
    state.common_closed(u, v, &mut base);
    Ok(match rule {
        EdgeRule::Plain => state.comp.labels_of(&base),
        EdgeRule::Filtered { matlab } => {
            let mut scratch = Vec::new();
            filtered_labels(state, &base, u, v, matlab, cover, &mut scratch)
        }
    })
}

fn filtered_labels(
    state: &SubgraphState<'_>,
    base: &[u64],
    u: usize,
    v: usize,
    matlab: bool,
    cover: &mut CoverTest<'_>,
    scratch: &mut Vec<u64>,
) -> LabelSet {
    let comp = state.comp;
    let mut kept = 0u64;
    for w in bits::ones(base) {
        let label_bit = 1u64 << (comp.label(w) - 1);
        if kept & label_bit != 0 {
            continue;
        }
        let keep = if w == u || w == v {
            matlab || cover.check(comp.labels_of(base))
        } else {
            scratch.clear();
            scratch.extend(base.iter().zip(state.edges.row(w)).map(|(a, b)| a & b));
            bits::set(scratch, w);
            cover.check(comp.labels_of(scratch))
        };
        if keep {
            kept |= label_bit;
        }
    }
    LabelSet::from_bits(kept)
}

/// Counters from one fixpoint computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FixpointStats {
    pub rounds: u32,
    pub edges_deleted: u64,
    pub vertices_deleted: u64,
}

impl std::ops::AddAssign for FixpointStats {
    fn add_assign(&mut self, o: Self) {
        self.rounds += o.rounds;
        self.edges_deleted += o.edges_deleted;
        self.vertices_deleted += o.vertices_deleted;
    }
}

/// Whether edge `uv` survives: `L(N[uv])` must be a cover's label set.
#[inline]
fn edge_survives(
    state: &SubgraphState<'_>,
    u: usize,
    v: usize,
    rule: EdgeRule,
    cover: &mut CoverTest<'_>,
    base: &mut Vec<u64>,
    scratch: &mut Vec<u64>,
) -> bool {
    state.common_closed(u, v, base);
    let plain = state.comp.labels_of(base);
    if !cover.check(plain) {
        // Covers are upward closed, so no subset of a failing set passes.
        return false;
    }
    match rule {
        EdgeRule::Plain => true,
        EdgeRule::Filtered { matlab } => {
            let kept = filtered_labels(state, base, u, v, matlab, cover, scratch);
            cover.check(kept)
        }
    }
}

/// Greatest subgraph of `state` satisfying the vertex and edge conditions.
///
/// Full edge scans repeat, deleting failing edges immediately, until a scan
/// deletes nothing; then isolated vertices whose label alone is not a cover
/// are dropped.
pub fn max_satisfying_subgraph<'h>(
    mut state: SubgraphState<'h>,
    rule: EdgeRule,
    cover: &mut CoverTest<'_>,
    order: ScanOrder,
) -> (SubgraphState<'h>, FixpointStats) {
    let mut stats = FixpointStats::default();
    let mut base = Vec::with_capacity(state.present.len());
    let mut scratch = Vec::with_capacity(state.present.len());
    let mut lower = Vec::new();
    let mut rows: Vec<usize> = state.vertices();
    if order == ScanOrder::Descending {
        rows.reverse();
    }
    loop {
        stats.rounds += 1;
        let mut deleted = false;
        for &i in &rows {
            lower.clear();
            lower.extend(bits::ones(state.edges.row(i)).take_while(|&j| j < i));
            if order == ScanOrder::Descending {
                lower.reverse();
            }
            for &j in &lower {
                if !state.edges.get(i, j) {
                    continue;
                }
                if !edge_survives(&state, i, j, rule, cover, &mut base, &mut scratch) {
                    state.remove_edge(i, j);
                    stats.edges_deleted += 1;
                    deleted = true;
                }
            }
        }
        if !deleted {
            break;
        }
    }
    let comp = state.comp;
    for v in rows {
        if bits::is_empty(state.edges.row(v)) {
            if !cover.check(LabelSet::singleton(comp.label(v))) {
                bits::clear(&mut state.present, v);
                stats.vertices_deleted += 1;
            }
        } else {
            // A vertex with a surviving edge inherits a cover label set.
            debug_assert!({
                let mut nv = state.edges.row(v).to_vec();
                bits::set(&mut nv, v);
                cover.check(comp.labels_of(&nv))
            });
        }
    }
    (state, stats)
}

/// The subgraph recorded by a Step-4 scan.
#[derive(Clone, Debug)]
pub struct Found<S> {
    pub component: usize,
    pub grade: u32,
    pub state: S,
    pub components_scanned: usize,
    pub stats: FixpointStats,
}

/// Scans components from `from_grade` on and returns the first nonempty
/// fixpoint. Grade-1 components are skipped when `skip_grade_one` is set.
pub fn step4_scan<'h>(
    h: &'h MccGraph,
    rule: EdgeRule,
    cover: &mut CoverTest<'_>,
    from_grade: u32,
    skip_grade_one: bool,
) -> Option<Found<SubgraphState<'h>>> {
    let mut stats = FixpointStats::default();
    let start = h.first_of_grade(from_grade);
    for (id, comp) in h.components().iter().enumerate().skip(start) {
        if skip_grade_one && comp.grade() == 1 {
            continue;
        }
        let (state, s) =
            max_satisfying_subgraph(SubgraphState::full(comp), rule, cover, ScanOrder::Ascending);
        stats += s;
        if !state.is_empty() {
            return Some(Found {
                component: id,
                grade: comp.grade(),
                state,
                components_scanned: id + 1 - start,
                stats,
            });
        }
    }
    None
}

/// Deletes vertices one position at a time while a nonempty fixpoint
/// survives, replacing the working subgraph by that fixpoint each time.
pub fn step5_minimize<'h>(
    s: SubgraphState<'h>,
    rule: EdgeRule,
    cover: &mut CoverTest<'_>,
) -> (SubgraphState<'h>, FixpointStats) {
    let mut stats = FixpointStats::default();
    let mut current = s;
    let mut pos = 0;
    loop {
        let vertices = current.vertices();
        let Some(&v) = vertices.get(pos) else { break };
        let mut trial = current.clone();
        trial.remove_vertex(v);
        let (ss, st) = max_satisfying_subgraph(trial, rule, cover, ScanOrder::Ascending);
        stats += st;
        if ss.is_empty() {
            pos += 1;
        } else {
            current = ss;
        }
    }
    (current, stats)
}

/// Step-6 outcome: whether `I` is a clique, plus `L(V(I))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CliqueCheck {
    pub is_clique: bool,
    pub labels: LabelSet,
}

pub fn step6_check(i: &SubgraphState<'_>) -> Result<CliqueCheck, EngineError> {
    if i.is_empty() {
        return Err(EngineError::EmptyState);
    }
    Ok(CliqueCheck {
        is_clique: graph::is_clique(&i.edges, &i.vertices()),
        labels: i.labels(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_stage: u32,
    pub matlab_2plus: bool,
    /// Check applicable outputs against the exact oracle.
    pub verify_with_oracle: bool,
    /// Hyperedge budget for stages `t >= 3`.
    pub hyperedge_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_stage: DEFAULT_MAX_STAGE,
            matlab_2plus: false,
            verify_with_oracle: false,
            hyperedge_limit: hyper::DEFAULT_HYPEREDGE_LIMIT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Applicable { stage: u32 },
    NotApplicable { max_stage: u32 },
    EdgelessSpecialCase,
}

/// What one stage did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageTrace {
    pub stage: u32,
    pub from_grade: u32,
    pub found_component: Option<usize>,
    pub found_grade: Option<u32>,
    pub components_scanned: usize,
    pub s_vertices: usize,
    pub i_vertices: usize,
    pub i_labels: LabelSet,
    pub is_clique: bool,
    pub step4: FixpointStats,
    pub step5: FixpointStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Output labels; empty unless applicable.
    pub cover: LabelSet,
    pub stage_reached: u32,
    /// Component id and grade where the final stage recorded `S`.
    pub found: Option<(usize, u32)>,
    pub stages: Vec<StageTrace>,
    pub oracle_min: Option<usize>,
    pub cover_queries: u64,
}

impl SolveResult {
    pub fn is_applicable(&self) -> bool {
        matches!(self.status, SolveStatus::Applicable { .. })
    }

    /// Whether stage 1 alone yielded a clique (edgeless graphs count as yes).
    pub fn stage1_applicable(&self) -> bool {
        match self.status {
            SolveStatus::EdgelessSpecialCase => true,
            SolveStatus::Applicable { stage } => stage == 1,
            SolveStatus::NotApplicable { .. } => false,
        }
    }
}

/// Steps 4 to 6 of stage 1 or 2 starting at `from_grade`.
pub fn run_plain_stage(
    h: &MccGraph,
    stage: u32,
    from_grade: u32,
    rule: EdgeRule,
    cover: &mut CoverTest<'_>,
) -> StageTrace {
    let mut trace = StageTrace {
        stage,
        from_grade,
        found_component: None,
        found_grade: None,
        components_scanned: 0,
        s_vertices: 0,
        i_vertices: 0,
        i_labels: LabelSet::EMPTY,
        is_clique: false,
        step4: FixpointStats::default(),
        step5: FixpointStats::default(),
    };
    let Some(found) = step4_scan(h, rule, cover, from_grade, stage >= 2) else {
        return trace;
    };
    trace.found_component = Some(found.component);
    trace.found_grade = Some(found.grade);
    trace.components_scanned = found.components_scanned;
    trace.step4 = found.stats;
    trace.s_vertices = found.state.vertex_count();
    let (i, st) = step5_minimize(found.state, rule, cover);
    trace.step5 = st;
    let check = step6_check(&i).expect("minimized subgraph stays nonempty");
    trace.i_vertices = i.vertex_count();
    trace.i_labels = check.labels;
    trace.is_clique = check.is_clique;
    trace
}

/// Steps 4 to 6 with the stage-`t` hyperedge engine starting at `from_grade`.
pub fn run_hyper_stage(
    h: &MccGraph,
    t: u32,
    from_grade: u32,
    cover: &mut CoverTest<'_>,
    limit: usize,
) -> Result<StageTrace, EngineError> {
    let mut trace = StageTrace {
        stage: t,
        from_grade,
        found_component: None,
        found_grade: None,
        components_scanned: 0,
        s_vertices: 0,
        i_vertices: 0,
        i_labels: LabelSet::EMPTY,
        is_clique: false,
        step4: FixpointStats::default(),
        step5: FixpointStats::default(),
    };
    let Some(found) = hyper::step4_scan(h, t as usize, cover, from_grade, true, limit)? else {
        return Ok(trace);
    };
    trace.found_component = Some(found.component);
    trace.found_grade = Some(found.grade);
    trace.components_scanned = found.components_scanned;
    trace.s_vertices = found.state.vertex_count();
    let i: HyperState<'_> = hyper::step5_minimize(found.state, cover);
    trace.i_vertices = i.vertex_count();
    trace.i_labels = i.labels();
    trace.is_clique = i.is_clique();
    Ok(trace)
}

/// Runs stages `1..=max_stage` on `g` against the prebuilt `h`.
pub fn solve(g: &LabeledGraph, h: &MccGraph, opts: &SolveOptions) -> Result<SolveResult, EngineError> {
    let padded = pad_to_power_of_two(g);
    if padded.k() != h.k() {
        return Err(EngineError::KMismatch {
            graph_k: padded.k(),
            h_k: h.k(),
        });
    }
    if !g.has_edges() {
        return Ok(SolveResult {
            status: SolveStatus::EdgelessSpecialCase,
            cover: LabelSet::EMPTY,
            stage_reached: 0,
            found: None,
            stages: Vec::new(),
            oracle_min: None,
            cover_queries: 0,
        });
    }
    let mut cover = CoverTest::new(&padded);
    let mut stages = Vec::new();
    let mut from_grade = 1;
    let max_stage = opts.max_stage.max(1);
    let mut outcome = None;
    for stage in 1..=max_stage {
        let trace = if stage <= 2 {
            run_plain_stage(h, stage, from_grade, EdgeRule::for_stage(stage, opts.matlab_2plus), &mut cover)
        } else {
            run_hyper_stage(h, stage, from_grade, &mut cover, opts.hyperedge_limit)?
        };
        let done = trace.is_clique;
        if let Some(g) = trace.found_grade {
            from_grade = g;
        }
        stages.push(trace);
        if done {
            outcome = Some(stage);
            break;
        }
        if stages.last().unwrap().found_component.is_none() {
            break;
        }
    }
    let last = stages.last().expect("at least one stage ran");
    let found = last.found_component.zip(last.found_grade);
    let stage_reached = last.stage;
    let mut result = SolveResult {
        status: match outcome {
            Some(stage) => SolveStatus::Applicable { stage },
            None => SolveStatus::NotApplicable { max_stage },
        },
        cover: if outcome.is_some() { last.i_labels } else { LabelSet::EMPTY },
        stage_reached,
        found,
        stages,
        oracle_min: None,
        cover_queries: cover.queries,
    };
    if let SolveStatus::Applicable { stage } = result.status {
        if !g.is_vertex_cover(result.cover) {
            return Err(EngineError::Unsound {
                stage,
                labels: result.cover,
                detail: "not a vertex cover".into(),
            });
        }
        if opts.verify_with_oracle {
            let min = oracle::min_vertex_cover_size(g).map_err(|e| EngineError::Unsound {
                stage,
                labels: result.cover,
                detail: e.to_string(),
            })?;
            result.oracle_min = Some(min);
            if min != result.cover.len() {
                return Err(EngineError::Unsound {
                    stage,
                    labels: result.cover,
                    detail: format!("size {} but the minimum is {min}", result.cover.len()),
                });
            }
        }
    }
    Ok(result)
}

/// [`solve`] plus wall-clock time.
pub fn solve_timed(
    g: &LabeledGraph,
    h: &MccGraph,
    opts: &SolveOptions,
) -> Result<(SolveResult, Duration), EngineError> {
    let start = Instant::now();
    let r = solve(g, h, opts)?;
    Ok((r, start.elapsed()))
}
