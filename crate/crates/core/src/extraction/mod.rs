//! Constructive subsequence extraction with checkable certificates.
//!
//! Given a nontrivial move sequence `H` and a start configuration `γ`,
//! [`extract`] runs the case analysis (dual-bad arcs, long-radius arcs, the
//! last two chunks, overlap-heavy intervals, deletion of non-overlapping
//! pairs) and returns a triple `(B, τ, Q)`: a subsequence `B` of `H`, a
//! configuration `τ` of the nodes moved in `B`, and arcs `Q` of `B`, each
//! mapped to an arc of `H` with the identical improvement vector.
//!
//! Every existential step of the construction is an argmax search followed by
//! an assertion that the required inequality holds. A failed assertion is
//! reported as [`Error::Invariant`], never papered over.

mod case3;
mod cases;

pub use case3::{
    case31_quantiles, case32_delete, compute_overlap, overlaps, short_arc_setup, OverlapReport, ShortArcSetup,
};
pub use cases::{
    case1_dual_bad, case1_triggered, case2_long_radius, case2_triggered, case30_last_chunks, case30_triggered,
    select_group,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arcs::{
    classify, improvement_vector, is_nontrivial, rank_of_arcs, validate_arc, Arc, ArcClassification, Interval,
    MoveSequence, Params,
};
use crate::ensure_invariant;
use crate::error::{Error, Result};
use crate::flip::replay;
use crate::instance::{Configuration, Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "1")]
    DualBad,
    #[serde(rename = "2")]
    LongRadius,
    #[serde(rename = "3.0")]
    LastChunks,
    #[serde(rename = "3.1")]
    OverlapQuantiles,
    #[serde(rename = "3.2")]
    Deletion,
    #[serde(rename = "degenerate-short-interval")]
    Degenerate,
}

impl CaseTag {
    pub fn label(&self) -> &'static str {
        match self {
            CaseTag::DualBad => "1",
            CaseTag::LongRadius => "2",
            CaseTag::LastChunks => "3.0",
            CaseTag::OverlapQuantiles => "3.1",
            CaseTag::Deletion => "3.2",
            CaseTag::Degenerate => "degenerate-short-interval",
        }
    }

    pub const ALL: [CaseTag; 6] = [
        CaseTag::DualBad,
        CaseTag::LongRadius,
        CaseTag::LastChunks,
        CaseTag::OverlapQuantiles,
        CaseTag::Deletion,
        CaseTag::Degenerate,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub left: usize,
    pub right: usize,
}

/// An arc of `B` with the arc of `H` it was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertArc {
    pub left: usize,
    pub right: usize,
    pub node: NodeId,
    pub source: Span,
}

impl CertArc {
    pub fn arc(&self) -> Arc {
        Arc { left: self.left, right: self.right, node: self.node }
    }

    pub fn source_arc(&self) -> Arc {
        Arc { left: self.source.left, right: self.source.right, node: self.node }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub case: CaseTag,
    /// Positions of `H` kept in `B`, ascending.
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    pub tau: BTreeMap<NodeId, i8>,
    #[serde(rename = "Q")]
    pub q: Vec<CertArc>,
    pub rank: usize,
    pub ratio: f64,
}

impl Certificate {
    pub fn len_b(&self) -> usize {
        self.b.len()
    }
}

/// Diagnostics collected while extracting; not part of the certificate.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ExtractInfo {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub w: usize,
    pub t: usize,
    pub num_arcs: usize,
    pub num_bad: usize,
    pub group: Option<usize>,
    pub chunk: Option<usize>,
    pub ell: Option<usize>,
    pub interval: Option<Interval>,
    pub core_size: usize,
    pub overlap: Option<usize>,
    pub nonoverlap: Option<usize>,
    pub f_size: Option<usize>,
    /// Rows verified in a triangular full-rank check.
    pub triangular_rows: usize,
    /// Deletion batches whose parity checks passed.
    pub parity_batches: usize,
    /// Chunk-selection fell back to the last two chunks.
    pub last_chunk_fallback: bool,
    /// `(len(B), bound)` for the deletion case.
    pub size_bound: Option<(usize, usize)>,
    /// Largest number of dual-bad arcs of one node in the chosen interval.
    pub max_node_multiplicity: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub certificate: Certificate,
    pub info: ExtractInfo,
}

impl Extraction {
    /// `ratio * sqrt(log2 n)`, the monitored normalization.
    pub fn normalized_ratio(&self) -> f64 {
        self.certificate.ratio * (self.info.n as f64).log2().max(1.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExtractOptions {
    /// Accept sequences whose length is not `5n`.
    pub any_length: bool,
}

/// Shared state of one extraction.
pub struct Context<'a> {
    pub seq: &'a MoveSequence,
    pub graph: &'a Graph,
    pub gamma: &'a Configuration,
    pub cls: ArcClassification,
    pub info: ExtractInfo,
}

impl<'a> Context<'a> {
    pub fn new(seq: &'a MoveSequence, gamma: &'a Configuration, graph: &'a Graph) -> Self {
        let cls = classify(seq, graph);
        let Params { n, m, s, w, t } = cls.params;
        let info =
            ExtractInfo { n, m, s, w, t, num_arcs: cls.arcs.len(), num_bad: cls.num_bad(), ..Default::default() };
        Context { seq, graph, gamma, cls, info }
    }

    pub fn m(&self) -> usize {
        self.seq.len()
    }

    /// Configuration just before position `k`.
    fn config_before(&self, k: usize) -> Configuration {
        replay(self.gamma, self.seq.moves(), k - 1)
    }

    /// Certificate for a contiguous `B = H_I` with `Q` the arcs `q_src` shifted into `I`.
    fn contiguous_cert(&self, case: CaseTag, iv: Interval, q_src: &[Arc]) -> Result<Certificate> {
        let kept: Vec<usize> = iv.positions().collect();
        let tau = self.config_before(iv.start);
        self.build_cert(case, kept, &tau, q_src)
    }

    /// Certificate for `B = H_kept`, `τ = gamma_prime` restricted to `S(B)`.
    fn build_cert(
        &self,
        case: CaseTag,
        kept: Vec<usize>,
        gamma_prime: &Configuration,
        q_src: &[Arc],
    ) -> Result<Certificate> {
        let b = self.seq.select(&kept);
        let mut tau = BTreeMap::new();
        for v in b.active_nodes() {
            tau.insert(v, gamma_prime.get(v)?);
        }
        let rho = |k: usize| -> Result<usize> {
            kept.binary_search(&k).map(|i| i + 1).map_err(|_| Error::invariant(format!("arc endpoint {k} deleted")))
        };
        let mut q = Vec::with_capacity(q_src.len());
        for a in q_src {
            q.push(CertArc {
                left: rho(a.left)?,
                right: rho(a.right)?,
                node: a.node,
                source: Span { left: a.left, right: a.right },
            });
        }
        let q_arcs: Vec<Arc> = q.iter().map(CertArc::arc).collect();
        for a in &q_arcs {
            validate_arc(&b, a)
                .map_err(|e| Error::invariant(format!("image of a source arc is not an arc of B: {e}")))?;
        }
        let rank = rank_of_arcs(&b, &q_arcs, self.graph);
        let ratio = rank as f64 / kept.len() as f64;
        Ok(Certificate { case, b: kept, tau, q, rank, ratio })
    }

    /// Assert the triangular full-rank structure: for each `i`, arc `i` is
    /// nonzero on `edges[i]` and every earlier arc is zero there.
    fn check_triangular(&mut self, arcs: &[Arc], edges: &[(NodeId, NodeId)], what: &str) -> Result<()> {
        let init = Configuration::all_minus(self.seq.n());
        let vecs =
            arcs.iter().map(|a| improvement_vector(self.seq, a, &init, self.graph)).collect::<Result<Vec<_>>>()?;
        for (i, &(x, y)) in edges.iter().enumerate() {
            let e = self
                .graph
                .edge_id(x, y)
                .ok_or_else(|| Error::invariant(format!("{what}: ({x},{y}) is not an edge")))?;
            ensure_invariant!(vecs[i].get(e) != 0, "{what}: diagonal entry {i} on edge ({x},{y}) is zero");
            for (j, v) in vecs[..i].iter().enumerate() {
                ensure_invariant!(v.get(e) == 0, "{what}: entry of arc {j} on diagonal edge {i} ({x},{y}) is nonzero");
            }
        }
        self.info.triangular_rows += edges.len();
        Ok(())
    }
}

/// On-disk input for extraction: a move sequence and its start configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub n: usize,
    pub moves: Vec<NodeId>,
    /// `±1` per node, index `v - 1`.
    pub gamma: Vec<i8>,
}

impl SequenceFile {
    pub fn new(seq: &MoveSequence, gamma: &Configuration) -> Result<Self> {
        Ok(SequenceFile { n: seq.n(), moves: seq.moves().to_vec(), gamma: gamma.to_signs()? })
    }

    pub fn parts(&self) -> Result<(MoveSequence, Configuration)> {
        let gamma = Configuration::from_signs(&self.gamma)?;
        if gamma.n() != self.n {
            return Err(Error::validation(format!("'gamma' has {} entries for n = {}", gamma.n(), self.n)));
        }
        Ok((MoveSequence::new(self.n, self.moves.clone())?, gamma))
    }
}

/// Run the full case analysis and return a verified certificate.
pub fn extract(seq: &MoveSequence, gamma: &Configuration, graph: &Graph, opts: ExtractOptions) -> Result<Extraction> {
    if seq.n() != graph.n() {
        return Err(Error::validation("sequence and graph disagree on the node count"));
    }
    if !opts.any_length && seq.len() != 5 * graph.n() {
        return Err(Error::Precondition(format!(
            "sequence length {} is not 5n = {} (pass the any-length option to override)",
            seq.len(),
            5 * graph.n()
        )));
    }
    for v in seq.active_nodes() {
        gamma.get(v)?;
    }
    if !is_nontrivial(seq, graph) {
        return Err(Error::Precondition("sequence has a trivial arc".into()));
    }
    if seq.len() < 2 || crate::arcs::find_arcs(seq).is_empty() {
        return Err(Error::Precondition("sequence has no arcs".into()));
    }

    let mut ctx = Context::new(seq, gamma, graph);
    let cert = if cases::case1_triggered(&ctx) {
        cases::case1_dual_bad(&mut ctx)?
    } else {
        let istar = cases::select_group(&mut ctx)?;
        if cases::case2_triggered(&ctx, istar) {
            cases::case2_long_radius(&mut ctx, istar)?
        } else if cases::case30_triggered(&ctx, istar) {
            cases::case30_last_chunks(&mut ctx)?
        } else {
            case3::case3(&mut ctx, istar)?
        }
    };
    if let Err(e) = verify_certificate(seq, gamma, &cert, graph) {
        return Err(Error::invariant(format!("case {} produced an invalid certificate: {e}", cert.case.label())));
    }
    Ok(Extraction { certificate: cert, info: ctx.info })
}

/// Independent verifier: recomputes vectors in `(B, τ)` and `(H, γ)` and the rank.
pub fn check_certificate(seq: &MoveSequence, gamma: &Configuration, cert: &Certificate, graph: &Graph) -> bool {
    verify_certificate(seq, gamma, cert, graph).is_ok()
}

/// Like [`check_certificate`], with the first failing reason.
pub fn verify_certificate(seq: &MoveSequence, gamma: &Configuration, cert: &Certificate, graph: &Graph) -> Result<()> {
    let fail = |msg: String| Err(Error::validation(msg));
    if cert.b.is_empty() {
        return fail("B is empty".into());
    }
    if cert.b.windows(2).any(|w| w[0] >= w[1]) || cert.b[0] == 0 || *cert.b.last().unwrap() > seq.len() {
        return fail("B is not an ascending set of positions of H".into());
    }
    let b = seq.select(&cert.b);
    let mut tau = Configuration::empty(seq.n());
    for (&v, &s) in &cert.tau {
        tau.set(v, s)?;
    }
    for v in b.active_nodes() {
        if !tau.is_defined(v) {
            return fail(format!("tau is undefined on node {v} of B"));
        }
    }
    let mut q_arcs = Vec::with_capacity(cert.q.len());
    for qa in &cert.q {
        let a = qa.arc();
        let src = qa.source_arc();
        validate_arc(&b, &a)?;
        validate_arc(seq, &src)?;
        let va = improvement_vector(&b, &a, &tau, graph)?;
        let vs = improvement_vector(seq, &src, gamma, graph)?;
        if va != vs {
            return fail(format!(
                "vector of arc ({}, {}) differs from its source ({}, {})",
                a.left, a.right, src.left, src.right
            ));
        }
        q_arcs.push(a);
    }
    let rank = rank_of_arcs(&b, &q_arcs, graph);
    if rank != cert.rank {
        return fail(format!("recomputed rank {rank} != recorded {}", cert.rank));
    }
    let ratio = rank as f64 / cert.b.len() as f64;
    if (ratio - cert.ratio).abs() > 1e-12 {
        return fail(format!("recorded ratio {} != {ratio}", cert.ratio));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
