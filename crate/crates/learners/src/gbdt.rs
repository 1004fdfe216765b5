//! Second-order gradient-boosted regression trees for binary logistic loss,
//! grown level by level with exact greedy split enumeration over presorted
//! columns. A row goes left when its value is below the threshold; NaN follows
//! the node's default direction.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use repostlab_core::FeatureTable;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::matrix::{check_labels, log_loss, sigmoid, Matrix};

const PROB_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtParams {
    pub max_depth: usize,
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub min_child_weight: f64,
    pub subsample: f64,
    pub scale_pos_weight: f64,
    pub reg_lambda: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Rounds without validation improvement before stopping; only used with a validation set.
    pub early_stopping_rounds: Option<usize>,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            max_depth: 8,
            learning_rate: 0.3,
            n_estimators: 100,
            min_child_weight: 1.0,
            subsample: 1.0,
            scale_pos_weight: 1.0,
            reg_lambda: 1.0,
            gamma: 0.0,
            seed: 0,
            early_stopping_rounds: Some(10),
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LearnError::Params(m));
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!("learning_rate {} outside (0, 1]", self.learning_rate));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad(format!("subsample {} outside (0, 1]", self.subsample));
        }
        if !(self.scale_pos_weight > 0.0 && self.scale_pos_weight.is_finite()) {
            return bad(format!("scale_pos_weight {} must be positive", self.scale_pos_weight));
        }
        if !(self.reg_lambda >= 0.0 && self.gamma >= 0.0 && self.min_child_weight >= 0.0) {
            return bad("reg_lambda, gamma and min_child_weight must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        default_left: bool,
        left: usize,
        right: usize,
        /// Loss reduction of this split before the γ penalty.
        gain: f64,
        cover: f64,
    },
    Leaf {
        weight: f64,
        cover: f64,
    },
}

/// Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut k = 0;
        loop {
            match &self.nodes[k] {
                Node::Leaf { .. } => return k,
                Node::Split {
                    feature,
                    threshold,
                    default_left,
                    left,
                    right,
                    ..
                } => {
                    let x = row[*feature];
                    let go_left = if x.is_nan() { *default_left } else { x < *threshold };
                    k = if go_left { *left } else { *right };
                }
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.nodes[self.leaf_index(row)] {
            Node::Leaf { weight, .. } => *weight,
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, k: usize) -> usize {
            match &t.nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }

    pub fn splits(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, threshold, gain, .. } => Some((*feature, *threshold, *gain)),
            Node::Leaf { .. } => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub params: GbdtParams,
    pub feature_names: Vec<String>,
    /// Margin added to every prediction before the trees.
    pub base_margin: f64,
    pub trees: Vec<Tree>,
    /// Weighted training log loss after 0, 1, … rounds.
    #[serde(default)]
    pub train_loss: Vec<f64>,
    /// Validation log loss after 0, 1, … rounds, when a validation set was given.
    #[serde(default)]
    pub val_loss: Vec<f64>,
}

impl GbdtModel {
    /// A model with no trees.
    pub fn constant(base_margin: f64, feature_names: Vec<String>) -> Self {
        GbdtModel {
            params: GbdtParams::default(),
            feature_names,
            base_margin,
            trees: Vec::new(),
            train_loss: Vec::new(),
            val_loss: Vec::new(),
        }
    }

    fn check_width(&self, cols: usize) -> Result<()> {
        if cols != self.feature_names.len() {
            return Err(LearnError::SchemaMismatch {
                expected: format!("{} features", self.feature_names.len()),
                found: format!("{cols} columns"),
            });
        }
        Ok(())
    }

    pub fn margin_row(&self, row: &[f64]) -> f64 {
        self.base_margin + self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    pub fn predict_margin(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x.cols())?;
        Ok((0..x.rows()).into_par_iter().map(|i| self.margin_row(x.row(i))).collect())
    }

    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self.predict_margin(x)?.into_iter().map(sigmoid).collect())
    }

    /// Labels at the 0.5 probability threshold.
    pub fn predict_labels(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.predict_proba(x)?.into_iter().map(|p| u8::from(p >= 0.5)).collect())
    }

    /// Probabilities for a table, matching columns by name.
    pub fn predict_table(&self, table: &FeatureTable) -> Result<Vec<f64>> {
        let t = table.select_columns(&self.feature_names)?;
        self.predict_proba(&Matrix::from_table(&t))
    }

    /// Accumulated split gain per feature index.
    pub fn gain_by_feature(&self) -> Vec<f64> {
        let mut g = vec![0.0; self.feature_names.len()];
        for t in &self.trees {
            for (f, _, gain) in t.splits() {
                g[f] += gain;
            }
        }
        g
    }

    pub fn split_count(&self) -> usize {
        self.trees.iter().map(|t| t.splits().count()).sum()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    g: f64,
    h: f64,
    n: usize,
}

impl Stats {
    fn add(&mut self, g: f64, h: f64) {
        self.g += g;
        self.h += h;
        self.n += 1;
    }

    fn minus(self, o: Stats) -> Stats {
        Stats {
            g: self.g - o.g,
            h: self.h - o.h,
            n: self.n - o.n,
        }
    }

    fn plus(self, o: Stats) -> Stats {
        Stats {
            g: self.g + o.g,
            h: self.h + o.h,
            n: self.n + o.n,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
    default_left: bool,
    left: Stats,
    right: Stats,
}

struct Grower<'a> {
    x: &'a Matrix,
    sorted: &'a [SortedColumn],
    params: &'a GbdtParams,
}

const INACTIVE: u32 = u32::MAX;

fn score(s: Stats, lambda: f64) -> f64 {
    s.g * s.g / (s.h + lambda)
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m > a {
        m
    } else {
        b
    }
}

/// Running best split of one slot.
#[derive(Clone, Copy)]
struct SlotBest {
    gain: f64,
    threshold: f64,
    default_left: bool,
    left: Stats,
    right: Stats,
    found: bool,
}

impl SlotBest {
    const NONE: SlotBest = SlotBest {
        gain: f64::NEG_INFINITY,
        threshold: 0.0,
        default_left: false,
        left: Stats { g: 0.0, h: 0.0, n: 0 },
        right: Stats { g: 0.0, h: 0.0, n: 0 },
        found: false,
    };
}

impl Grower<'_> {
    /// Keeps `(left, right)` when both children are admissible and the gain is
    /// strictly larger than the current best, so the first maximum wins.
    #[inline]
    fn consider(&self, best: &mut SlotBest, parent_score: f64, left: Stats, right: Stats, threshold: f64, default_left: bool) {
        let p = self.params;
        if left.n == 0 || right.n == 0 || left.h < p.min_child_weight || right.h < p.min_child_weight {
            return;
        }
        let lambda = p.reg_lambda;
        let gain = 0.5 * (score(left, lambda) + score(right, lambda) - parent_score);
        if !best.found || gain > best.gain {
            *best = SlotBest {
                gain,
                threshold,
                default_left,
                left,
                right,
                found: true,
            };
        }
    }

    /// Best split on feature `j` for every active slot.
    fn best_for_feature(&self, j: usize, pos: &[u32], gh: &[(f64, f64)], totals: &[Stats]) -> Vec<Option<Candidate>> {
        let lambda = self.params.reg_lambda;
        let slots = totals.len();
        let col = &self.sorted[j];
        // Without NaNs in the column every active row is present.
        let present = if col.rows.len() == self.x.rows() {
            totals.to_vec()
        } else {
            let mut present = vec![Stats::default(); slots];
            for &r in &col.rows {
                let s = pos[r as usize];
                if s != INACTIVE {
                    let (g, h) = gh[r as usize];
                    present[s as usize].add(g, h);
                }
            }
            present
        };
        let missing: Vec<Stats> = totals.iter().zip(&present).map(|(t, p)| t.minus(*p)).collect();
        let parent: Vec<f64> = totals.iter().map(|t| score(*t, lambda)).collect();
        let mut acc = vec![Stats::default(); slots];
        let mut last = vec![f64::NAN; slots];
        let mut best = vec![SlotBest::NONE; slots];
        for (&r, &v) in col.rows.iter().zip(&col.values) {
            let r = r as usize;
            let s = pos[r];
            if s == INACTIVE {
                continue;
            }
            let s = s as usize;
            let a = acc[s];
            if a.n > 0 && v > last[s] {
                let threshold = midpoint(last[s], v);
                let rest = present[s].minus(a);
                let m = missing[s];
                self.consider(&mut best[s], parent[s], a, rest.plus(m), threshold, false);
                if m.n > 0 {
                    self.consider(&mut best[s], parent[s], a.plus(m), rest, threshold, true);
                }
            }
            let (g, h) = gh[r];
            acc[s].add(g, h);
            last[s] = v;
        }
        for s in 0..slots {
            if missing[s].n > 0 && present[s].n > 0 {
                self.consider(&mut best[s], parent[s], present[s], missing[s], f64::MAX, false);
            }
        }
        best.iter()
            .map(|b| {
                b.found.then_some(Candidate {
                    gain: b.gain,
                    feature: j,
                    threshold: b.threshold,
                    default_left: b.default_left,
                    left: b.left,
                    right: b.right,
                })
            })
            .collect()
    }

    fn leaf(&self, s: Stats) -> Node {
        Node::Leaf {
            weight: -s.g / (s.h + self.params.reg_lambda) * self.params.learning_rate,
            cover: s.h,
        }
    }

    fn grow(&self, rows: &[usize], g: &[f64], h: &[f64]) -> Tree {
        let n = self.x.rows();
        let mut pos = vec![INACTIVE; n];
        let mut root = Stats::default();
        for &r in rows {
            pos[r] = 0;
            root.add(g[r], h[r]);
        }
        let gh: Vec<(f64, f64)> = g.iter().copied().zip(h.iter().copied()).collect();
        let mut nodes = vec![self.leaf(root)];
        // frontier[s] = (tree node index, stats) for slot s.
        let mut frontier: Vec<(usize, Stats)> = vec![(0, root)];
        for _depth in 0..self.params.max_depth {
            if frontier.is_empty() {
                break;
            }
            let totals: Vec<Stats> = frontier.iter().map(|f| f.1).collect();
            let per_feature: Vec<Vec<Option<Candidate>>> =
                (0..self.x.cols()).into_par_iter().map(|j| self.best_for_feature(j, &pos, &gh, &totals)).collect();
            let mut next_slot = vec![INACTIVE; frontier.len() * 2];
            let mut decisions: Vec<Option<Candidate>> = vec![None; frontier.len()];
            for s in 0..frontier.len() {
                let mut best: Option<Candidate> = None;
                for cands in &per_feature {
                    if let Some(c) = cands[s] {
                        if best.is_none_or(|b| c.gain > b.gain) {
                            best = Some(c);
                        }
                    }
                }
                decisions[s] = best.filter(|c| c.gain - self.params.gamma > 0.0);
            }
            let mut next_frontier = Vec::new();
            for (s, d) in decisions.iter().enumerate() {
                let Some(c) = d else { continue };
                let (node, stats) = frontier[s];
                let left = nodes.len();
                nodes.push(self.leaf(c.left));
                nodes.push(self.leaf(c.right));
                nodes[node] = Node::Split {
                    feature: c.feature,
                    threshold: c.threshold,
                    default_left: c.default_left,
                    left,
                    right: left + 1,
                    gain: c.gain,
                    cover: stats.h,
                };
                next_slot[2 * s] = next_frontier.len() as u32;
                next_frontier.push((left, c.left));
                next_slot[2 * s + 1] = next_frontier.len() as u32;
                next_frontier.push((left + 1, c.right));
            }
            for &r in rows {
                let s = pos[r];
                if s == INACTIVE {
                    continue;
                }
                pos[r] = match &decisions[s as usize] {
                    None => INACTIVE,
                    Some(c) => {
                        let x = self.x.get(r, c.feature);
                        let go_left = if x.is_nan() { c.default_left } else { x < c.threshold };
                        next_slot[2 * s as usize + usize::from(!go_left)]
                    }
                };
            }
            frontier = next_frontier;
        }
        Tree { nodes }
    }
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    (p / (1.0 - p)).ln()
}

/// Non-NaN entries of one column, ascending by value then row.
pub(crate) struct SortedColumn {
    rows: Vec<u32>,
    values: Vec<f64>,
}

pub(crate) fn presort(x: &Matrix) -> Vec<SortedColumn> {
    (0..x.cols())
        .into_par_iter()
        .map(|j| {
            let mut idx: Vec<u32> = (0..x.rows() as u32).filter(|&i| !x.get(i as usize, j).is_nan()).collect();
            idx.sort_by(|&a, &b| x.get(a as usize, j).total_cmp(&x.get(b as usize, j)).then(a.cmp(&b)));
            let values = idx.iter().map(|&i| x.get(i as usize, j)).collect();
            SortedColumn { rows: idx, values }
        })
        .collect()
}

/// Trains a boosted ensemble. With `val`, training stops once validation log
/// loss has not improved for `early_stopping_rounds` rounds and the ensemble is
/// truncated to its best round.
pub fn gbdt_train(x: &Matrix, y: &[u8], params: &GbdtParams, val: Option<(&Matrix, &[u8])>, feature_names: Vec<String>) -> Result<GbdtModel> {
    params.validate()?;
    check_labels(y, x.rows())?;
    if feature_names.len() != x.cols() {
        return Err(LearnError::Shape(format!("{} feature names for {} columns", feature_names.len(), x.cols())));
    }
    if x.rows() == 0 {
        return Err(LearnError::Shape("no training rows".into()));
    }
    if let Some((vx, vy)) = val {
        check_labels(vy, vx.rows())?;
        if vx.cols() != x.cols() {
            return Err(LearnError::Shape(format!("validation has {} columns, training {}", vx.cols(), x.cols())));
        }
    }
    let spw = params.scale_pos_weight;
    let positives = y.iter().filter(|&&v| v == 1).count();
    let weighted_mean = spw * positives as f64 / (spw * positives as f64 + (y.len() - positives) as f64);
    let base_margin = logit(weighted_mean);
    let mut model = GbdtModel {
        params: *params,
        feature_names,
        base_margin,
        trees: Vec::new(),
        train_loss: Vec::new(),
        val_loss: Vec::new(),
    };
    if positives == 0 || positives == y.len() {
        log::warn!("all {} training labels are {}; returning a constant model", y.len(), y[0]);
        return Ok(model);
    }

    let n = x.rows();
    let sorted = presort(x);
    let grower = Grower { x, sorted: &sorted, params };
    let mut margin = vec![base_margin; n];
    let mut val_margin = val.map(|(vx, _)| vec![base_margin; vx.rows()]);
    let probs = |m: &[f64]| m.iter().map(|&z| sigmoid(z)).collect::<Vec<_>>();
    model.train_loss.push(log_loss(&probs(&margin), y, spw));
    if let (Some((_, vy)), Some(vm)) = (val, &val_margin) {
        model.val_loss.push(log_loss(&probs(vm), vy, 1.0));
    }
    let mut best_round = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let all_rows: Vec<usize> = (0..n).collect();
    let take = ((params.subsample * n as f64).round() as usize).clamp(1, n);
    let mut g = vec![0.0; n];
    let mut h = vec![0.0; n];

    for round in 0..params.n_estimators {
        for i in 0..n {
            let p = sigmoid(margin[i]);
            let w = if y[i] == 1 { spw } else { 1.0 };
            g[i] = w * (p - f64::from(y[i]));
            h[i] = w * p * (1.0 - p);
        }
        let sample: Vec<usize>;
        let rows: &[usize] = if take < n {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.partial_shuffle(&mut rng, take);
            let mut s = perm[..take].to_vec();
            s.sort_unstable();
            sample = s;
            &sample
        } else {
            &all_rows
        };
        let tree = grower.grow(rows, &g, &h);
        for (i, m) in margin.iter_mut().enumerate() {
            *m += tree.predict_row(x.row(i));
        }
        model.train_loss.push(log_loss(&probs(&margin), y, spw));
        if let (Some((vx, vy)), Some(vm)) = (val, val_margin.as_mut()) {
            for (i, m) in vm.iter_mut().enumerate() {
                *m += tree.predict_row(vx.row(i));
            }
            let loss = log_loss(&probs(vm), vy, 1.0);
            if loss < model.val_loss[best_round] {
                best_round = round + 1;
            }
            model.val_loss.push(loss);
        }
        model.trees.push(tree);
        if let (Some(_), Some(patience)) = (val, params.early_stopping_rounds) {
            if round + 1 - best_round >= patience {
                break;
            }
        }
    }
    if val.is_some() && params.early_stopping_rounds.is_some() {
        model.trees.truncate(best_round);
        model.train_loss.truncate(best_round + 1);
    }
    Ok(model)
}
