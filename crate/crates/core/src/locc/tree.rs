use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{codec, kron_vectors, CVector, HilbertLayout};
use crate::metrology::{Povm, PovmElement};

/// Orthonormality tolerance for node bases.
pub const GRAM_TOL: f64 = 1e-9;

/// One measurement stage: an orthonormal basis on `subsystem` and, unless
/// this is the last stage, one child per outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub subsystem: usize,
    #[serde(with = "codec::vectors")]
    pub basis: Vec<CVector>,
    #[serde(default)]
    pub children: Vec<TreeNode>,
}

/// Adaptive one-way measurement: subsystems are measured in `order`, each
/// basis chosen from the outcomes so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTree")]
pub struct MeasurementTree {
    layout: HilbertLayout,
    order: Vec<usize>,
    node: TreeNode,
}

#[derive(Deserialize)]
struct RawTree {
    layout: HilbertLayout,
    order: Vec<usize>,
    node: TreeNode,
}

impl TryFrom<RawTree> for MeasurementTree {
    type Error = Error;

    fn try_from(raw: RawTree) -> Result<Self> {
        Self::new(raw.layout, raw.order, raw.node)
    }
}

/// A root-to-leaf path with its product vector in layout order.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub path: Vec<usize>,
    pub vector: CVector,
}

pub fn path_label(path: &[usize]) -> String {
    path.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
}

pub(crate) fn check_order(layout: &HilbertLayout, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; layout.len()];
    if order.len() != layout.len() {
        return Err(Error::invalid(format!("order has {} entries, layout has {} subsystems", order.len(), layout.len())));
    }
    for &k in order {
        if k >= layout.len() || std::mem::replace(&mut seen[k], true) {
            return Err(Error::invalid(format!("order {order:?} is not a permutation of the subsystems")));
        }
    }
    Ok(())
}

fn check_node(node: &TreeNode, layout: &HilbertLayout, order: &[usize], depth: usize, path: &mut Vec<usize>) -> Result<()> {
    let at = || format!("node at path [{}]", path_label(path));
    if node.subsystem != order[depth] {
        return Err(Error::invalid(format!("{}: subsystem {} but order expects {}", at(), node.subsystem, order[depth])));
    }
    let d = layout.dim(node.subsystem);
    if node.basis.len() != d || node.basis.iter().any(|v| v.len() != d) {
        return Err(Error::dim(format!("{}: basis must be {d} vectors of length {d}", at())));
    }
    for (i, a) in node.basis.iter().enumerate() {
        for (j, b) in node.basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            let dev = (a.dotc(b) - crate::linalg::real(expected)).norm();
            if dev > GRAM_TOL {
                return Err(Error::invalid(format!("{}: basis is not orthonormal (deviation {dev:.3e})", at())));
            }
        }
    }
    let last = depth + 1 == order.len();
    if last && !node.children.is_empty() {
        return Err(Error::invalid(format!("{}: leaf stage has children", at())));
    }
    if !last && node.children.len() != d {
        return Err(Error::invalid(format!("{}: expected {d} children, found {}", at(), node.children.len())));
    }
    for (x, child) in node.children.iter().enumerate() {
        path.push(x);
        check_node(child, layout, order, depth + 1, path)?;
        path.pop();
    }
    Ok(())
}

impl MeasurementTree {
    pub fn new(layout: HilbertLayout, order: Vec<usize>, node: TreeNode) -> Result<Self> {
        check_order(&layout, &order)?;
        check_node(&node, &layout, &order, 0, &mut Vec::new())?;
        Ok(Self { layout, order, node })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn root(&self) -> &TreeNode {
        &self.node
    }

    /// Node reached by following `path` from the root.
    pub fn node_at(&self, path: &[usize]) -> Option<&TreeNode> {
        path.iter().try_fold(&self.node, |n, &x| n.children.get(x))
    }

    /// All leaves, depth first with outcomes in basis order.
    pub fn leaves(&self) -> Vec<Leaf> {
        let mut out = Vec::new();
        let mut factors: Vec<Option<CVector>> = vec![None; self.layout.len()];
        self.collect(&self.node, &mut Vec::new(), &mut factors, &mut out);
        out
    }

    fn collect(&self, node: &TreeNode, path: &mut Vec<usize>, factors: &mut Vec<Option<CVector>>, out: &mut Vec<Leaf>) {
        for (x, v) in node.basis.iter().enumerate() {
            path.push(x);
            factors[node.subsystem] = Some(v.clone());
            if node.children.is_empty() {
                let ordered: Vec<CVector> = factors.iter().map(|f| f.clone().expect("every subsystem visited")).collect();
                out.push(Leaf { path: path.clone(), vector: kron_vectors(&ordered) });
            } else {
                self.collect(&node.children[x], path, factors, out);
            }
            path.pop();
        }
        factors[node.subsystem] = None;
    }

    /// Rank-one product POVM, one element per leaf, labelled by outcome path.
    pub fn flatten(&self) -> Result<Povm> {
        let leaves = self.leaves();
        let labels = leaves.iter().map(|l| path_label(&l.path)).collect();
        Povm::new(leaves.into_iter().map(|l| PovmElement::Rank1(l.vector)).collect(), labels)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Bloch vectors of the first basis vector at every qubit node.
    pub fn bloch_rows(&self, theta: f64) -> Vec<BlochRow> {
        let mut rows = Vec::new();
        fn walk(node: &TreeNode, path: &mut Vec<usize>, theta: f64, rows: &mut Vec<BlochRow>) {
            if node.basis.len() == 2 {
                let [x, y, z] = bloch(&node.basis[0]);
                rows.push(BlochRow { theta, path: path_label(path), subsystem: node.subsystem, x, y, z });
            }
            for (k, child) in node.children.iter().enumerate() {
                path.push(k);
                walk(child, path, theta, rows);
                path.pop();
            }
        }
        walk(&self.node, &mut Vec::new(), theta, &mut rows);
        rows
    }
}

/// `(<e|X|e>, <e|Y|e>, <e|Z|e>)` of a qubit vector.
pub fn bloch(e: &CVector) -> [f64; 3] {
    let cross = e[0].conj() * e[1];
    [2.0 * cross.re, 2.0 * cross.im, e[0].norm_sqr() - e[1].norm_sqr()]
}

/// One CSV row of a Bloch export. `path` is the outcome prefix leading to the
/// node, dot separated, empty at the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochRow {
    pub theta: f64,
    pub path: String,
    pub subsystem: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn write_bloch_csv<W: Write>(rows: &[BlochRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
