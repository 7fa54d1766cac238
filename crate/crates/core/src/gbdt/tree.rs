use serde::{Deserialize, Serialize};

use super::HESSIAN_FLOOR;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf(f64),
}

impl Node {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut n = self;
        loop {
            match n {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => n = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        match self {
            Node::Leaf(_) => None,
            Node::Split {
                feature, left, right, ..
            } => Some(*feature).max(left.max_feature()).max(right.max_feature()),
        }
    }
}

/// Candidate thresholds per feature: midpoints between distinct training
/// values, thinned to at most `max` by quantiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Binning {
    pub thresholds: Vec<Vec<f64>>,
}

impl Binning {
    pub fn fit(x: &[&[f64]], max: usize) -> Self {
        let n_features = x.first().map_or(0, |r| r.len());
        let max = max.min(u16::MAX as usize - 1);
        let thresholds = (0..n_features)
            .map(|f| {
                let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                let mids: Vec<f64> = vals.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect();
                if mids.len() <= max {
                    return mids;
                }
                let mut picked: Vec<f64> = (0..max).map(|k| mids[(k + 1) * mids.len() / (max + 1)]).collect();
                picked.dedup();
                picked
            })
            .collect();
        Binning { thresholds }
    }

}

/// Training rows in sparse binned form. Features without thresholds are
/// dropped; each row lists the flat histogram slots of the features whose
/// bin differs from that feature's most common bin.
#[derive(Clone, Debug)]
pub struct BinnedRows {
    /// Original index of each kept feature.
    features: Vec<usize>,
    /// Start of each kept feature's bins in the flat histogram.
    offset: Vec<usize>,
    /// Most common bin per kept feature.
    default: Vec<u16>,
    rows: Vec<Vec<u32>>,
}

impl BinnedRows {
    pub fn new(binning: &Binning, x: &[&[f64]]) -> Self {
        let mut out = BinnedRows {
            features: Vec::new(),
            offset: vec![0],
            default: Vec::new(),
            rows: vec![Vec::new(); x.len()],
        };
        let mut col = vec![0u16; x.len()];
        for (f, thr) in binning.thresholds.iter().enumerate() {
            if thr.is_empty() {
                continue;
            }
            let mut counts = vec![0usize; thr.len() + 1];
            for (i, r) in x.iter().enumerate() {
                col[i] = thr.partition_point(|&t| t < r[f]) as u16;
                counts[col[i] as usize] += 1;
            }
            // First maximum, so ties go to the lowest bin.
            let default = counts
                .iter()
                .enumerate()
                .fold(0, |best, (b, &c)| if c > counts[best] { b } else { best }) as u16;
            let base = *out.offset.last().unwrap();
            for (i, &b) in col.iter().enumerate() {
                if b != default {
                    out.rows[i].push((base + b as usize) as u32);
                }
            }
            out.features.push(f);
            out.default.push(default);
            out.offset.push(base + thr.len() + 1);
        }
        out
    }

    fn width(&self) -> usize {
        *self.offset.last().unwrap()
    }

    /// Bin of row `i` for kept feature `k`.
    pub fn bin(&self, i: usize, k: usize) -> u16 {
        let (lo, hi) = (self.offset[k] as u32, self.offset[k + 1] as u32);
        let r = &self.rows[i];
        let at = r.partition_point(|&e| e < lo);
        match r.get(at) {
            Some(&e) if e < hi => (e - lo) as u16,
            _ => self.default[k],
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Bin {
    g: f64,
    h: f64,
    n: usize,
}

fn score(g: f64, h: f64) -> f64 {
    g * g / h.max(HESSIAN_FLOOR)
}

fn histogram(data: &BinnedRows, grad: &[f64], hess: &[f64], rows: &[usize]) -> Vec<Bin> {
    let mut hist = vec![Bin::default(); data.width()];
    let (mut g, mut h) = (0.0, 0.0);
    for &i in rows {
        g += grad[i];
        h += hess[i];
        for &e in &data.rows[i] {
            let b = &mut hist[e as usize];
            b.g += grad[i];
            b.h += hess[i];
            b.n += 1;
        }
    }
    for k in 0..data.features.len() {
        let (lo, hi) = (data.offset[k], data.offset[k + 1]);
        let d = lo + data.default[k] as usize;
        let (mut sg, mut sh, mut sn) = (0.0, 0.0, 0);
        for b in &hist[lo..hi] {
            sg += b.g;
            sh += b.h;
            sn += b.n;
        }
        hist[d] = Bin {
            g: g - sg,
            h: h - sh,
            n: rows.len() - sn,
        };
    }
    hist
}

/// Grow one tree on `rows` (sorted ascending) by exact histogram search.
/// `grad` holds negative gradients.
pub fn grow(data: &BinnedRows, binning: &Binning, grad: &[f64], hess: &[f64], rows: Vec<usize>, depth: usize) -> Node {
    let hist = (depth > 0).then(|| histogram(data, grad, hess, &rows));
    grow_node(data, binning, grad, hess, rows, hist, depth)
}

fn grow_node(
    data: &BinnedRows,
    binning: &Binning,
    grad: &[f64],
    hess: &[f64],
    rows: Vec<usize>,
    hist: Option<Vec<Bin>>,
    depth: usize,
) -> Node {
    let g: f64 = rows.iter().map(|&i| grad[i]).sum();
    let h: f64 = rows.iter().map(|&i| hess[i]).sum();
    let leaf = Node::Leaf(g / h.max(HESSIAN_FLOOR));
    let Some(mut hist) = hist.filter(|_| depth > 0 && rows.len() >= 2) else {
        return leaf;
    };
    let parent = score(g, h);
    let mut best: Option<(f64, usize, usize)> = None;
    for k in 0..data.features.len() {
        let bins = &hist[data.offset[k]..data.offset[k + 1]];
        let (mut gl, mut hl, mut nl) = (0.0, 0.0, 0);
        for (j, b) in bins[..bins.len() - 1].iter().enumerate() {
            gl += b.g;
            hl += b.h;
            nl += b.n;
            if nl == 0 {
                continue;
            }
            if nl == rows.len() {
                break;
            }
            let gain = score(gl, hl) + score(g - gl, h - hl) - parent;
            if best.map_or(true, |(bg, _, _)| gain > bg) {
                best = Some((gain, k, j));
            }
        }
    }
    match best {
        Some((gain, k, j)) if gain > 1e-12 => {
            let (left, right): (Vec<usize>, Vec<usize>) =
                rows.into_iter().partition(|&i| data.bin(i, k) as usize <= j);
            let (lh, rh) = if depth > 1 {
                // Build the smaller child and derive the larger by subtraction.
                let small = histogram(data, grad, hess, if left.len() <= right.len() { &left } else { &right });
                for (p, c) in hist.iter_mut().zip(&small) {
                    p.g -= c.g;
                    p.h -= c.h;
                    p.n -= c.n;
                }
                if left.len() <= right.len() {
                    (Some(small), Some(hist))
                } else {
                    (Some(hist), Some(small))
                }
            } else {
                (None, None)
            };
            let f = data.features[k];
            Node::Split {
                feature: f,
                threshold: binning.thresholds[f][j],
                left: Box::new(grow_node(data, binning, grad, hess, left, lh, depth - 1)),
                right: Box::new(grow_node(data, binning, grad, hess, right, rh, depth - 1)),
            }
        }
        _ => leaf,
    }
}
