//! Admissible trees: the automatic (*-)monomialization engine, branch
//! enumeration, an independent verifier and the `.qtree` text format.

use crate::error::{Error, Result};
use crate::exponents::{self, VariableSignature};
use crate::records::{self, Value};
use crate::series::{GenSeries, NormalDecomposition, Normality};
use crate::transforms::{self, ElementaryTransform, TransformChain, TransformKind};

pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesStatus {
    Normal(NormalDecomposition),
    Zero,
}

impl SeriesStatus {
    pub fn of(f: &GenSeries) -> Option<Self> {
        match f.normal_decompose() {
            Normality::Normal(nd) => Some(SeriesStatus::Normal(nd)),
            Normality::Zero => Some(SeriesStatus::Zero),
            Normality::NotNormal(..) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SeriesStatus::Normal(_) => "normal",
            SeriesStatus::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    /// Snapshots of every input series pulled back to this leaf.
    Leaf { snapshots: Vec<GenSeries> },
    Fork { children: Vec<(ElementaryTransform, AdmissibleTree)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleTree {
    signature: VariableSignature,
    node: TreeNode,
}

impl AdmissibleTree {
    pub fn leaf(signature: &VariableSignature, snapshots: Vec<GenSeries>) -> Self {
        Self {
            signature: signature.clone(),
            node: TreeNode::Leaf { snapshots },
        }
    }

    pub fn fork(signature: &VariableSignature, children: Vec<(ElementaryTransform, AdmissibleTree)>) -> Self {
        Self {
            signature: signature.clone(),
            node: TreeNode::Fork { children },
        }
    }

    pub fn signature(&self) -> &VariableSignature {
        &self.signature
    }

    pub fn node(&self) -> &TreeNode {
        &self.node
    }

    pub fn node_mut(&mut self) -> &mut TreeNode {
        &mut self.node
    }

    pub fn leaf_count(&self) -> usize {
        match &self.node {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Fork { children } => children.iter().map(|(_, t)| t.leaf_count()).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match &self.node {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Fork { children } => 1 + children.iter().map(|(_, t)| t.depth()).max().unwrap_or(0),
        }
    }

    /// Every leaf with its chain from the root, left to right.
    pub fn branches(&self) -> Vec<(TransformChain, &[GenSeries])> {
        let mut out = Vec::new();
        collect_branches(self, TransformChain::identity(&self.signature), &mut out);
        out
    }
}

fn collect_branches<'a>(t: &'a AdmissibleTree, chain: TransformChain, out: &mut Vec<(TransformChain, &'a [GenSeries])>) {
    match &t.node {
        TreeNode::Leaf { snapshots } => out.push((chain, snapshots)),
        TreeNode::Fork { children } => {
            for (step, sub) in children {
                let mut c = chain.clone();
                // A step that does not fit restarts the chain at the
                // subtree; the verifier reports the mismatch.
                if c.push(step.clone()).is_err() {
                    c = TransformChain::identity(&sub.signature);
                }
                collect_branches(sub, c, out);
            }
        }
    }
}

/// Chains in left-to-right branch order, one per leaf.
pub fn branch_charts(tree: &AdmissibleTree) -> Vec<TransformChain> {
    tree.branches().into_iter().map(|(c, _)| c).collect()
}

fn shared_signature(series: &[GenSeries]) -> Result<Option<VariableSignature>> {
    let Some(first) = series.first() else {
        return Ok(None);
    };
    if let Some(f) = series.iter().find(|f| f.signature() != first.signature()) {
        return Err(Error::Signature(format!(
            "inputs disagree: {} vs {}",
            first.signature(),
            f.signature()
        )));
    }
    Ok(Some(first.signature().clone()))
}

struct Engine {
    max_depth: usize,
    star: bool,
}

impl Engine {
    /// `inputs` are the user series pulled back to `sig`; `tracked` are the
    /// pulled-back critical variables of blow-up ancestors (star mode).
    fn grow(&self, sig: &VariableSignature, inputs: Vec<GenSeries>, tracked: Vec<GenSeries>, depth: usize) -> Result<AdmissibleTree> {
        let product = GenSeries::product(sig, inputs.iter().chain(&tracked).filter(|f| !f.is_zero()))?;
        let mins = product.min_support();
        if mins.len() <= 1 {
            return Ok(AdmissibleTree::leaf(sig, inputs));
        }
        if depth >= self.max_depth {
            return Err(Error::DepthExhausted(self.max_depth));
        }
        // Canonical-first incomparable pair, oriented so that α is the
        // lexicographically larger element; then i < j.
        let (beta, alpha) = exponents::incomparable_pairs(&mins)
            .into_iter()
            .next()
            .expect("two minimal elements are incomparable");
        let idx = |pred: &dyn Fn(usize) -> bool| (0..sig.len()).find(|&k| pred(k)).expect("pair differs");
        let i = idx(&|k| alpha.get(k) > beta.get(k));
        let j = idx(&|k| alpha.get(k) < beta.get(k));

        let kinds = if sig.is_standard(j) || sig.is_standard(i) {
            let r = if sig.is_standard(j) { j } else { i };
            vec![TransformKind::ReflectionPlus { i: r }, TransformKind::ReflectionMinus { i: r }]
        } else {
            let lambda = transforms::pair_weight(&alpha, &beta, i, j)?;
            vec![
                TransformKind::BlowupChartA { i, j, lambda: lambda.clone() },
                TransformKind::BlowupChartB { i, j, lambda },
            ]
        };
        let steps = kinds
            .into_iter()
            .map(|k| ElementaryTransform::new(k, sig))
            .collect::<Result<Vec<_>>>()?;

        let child = |step: &ElementaryTransform| -> Result<AdmissibleTree> {
            let src = step.source();
            let ins = inputs.iter().map(|f| step.apply(f)).collect::<Result<Vec<_>>>()?;
            let mut tr = tracked.iter().map(|f| step.apply(f)).collect::<Result<Vec<_>>>()?;
            if self.star {
                if let Some(w) = step.critical_variable() {
                    tr.push(GenSeries::variable(src, w)?);
                }
            }
            self.grow(src, ins, tr, depth + 1)
        };
        let (left, right) = rayon::join(|| child(&steps[0]), || child(&steps[1]));
        let children = vec![(steps[0].clone(), left?), (steps[1].clone(), right?)];
        Ok(AdmissibleTree::fork(sig, children))
    }
}

fn run_engine(series: &[GenSeries], max_depth: usize, star: bool) -> Result<AdmissibleTree> {
    if max_depth == 0 {
        return Err(Error::Precondition("max_depth must be at least 1".into()));
    }
    let sig = shared_signature(series)?.ok_or_else(|| Error::Precondition("no input series".into()))?;
    Engine { max_depth, star }.grow(&sig, series.to_vec(), Vec::new(), 0)
}

/// Tree whose every branch makes each input Normal or Zero. Works on the
/// product of the nonzero inputs.
pub fn monomialize(series: &[GenSeries], max_depth: usize) -> Result<AdmissibleTree> {
    run_engine(series, max_depth, false)
}

/// As [`monomialize`], additionally keeping every blow-up's critical
/// variable Normal or Zero along all branches below it.
pub fn star_monomialize(series: &[GenSeries], max_depth: usize) -> Result<AdmissibleTree> {
    run_engine(series, max_depth, true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    /// Position of the blow-up in the chain.
    pub step: usize,
    /// Critical variable index in that step's source signature.
    pub variable: usize,
    pub status: SeriesStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchReport {
    pub chain: TransformChain,
    pub statuses: Vec<SeriesStatus>,
    pub ledger: Vec<LedgerEntry>,
}

fn fail(branch: &str, reason: String) -> Error {
    Error::Verification {
        branch: branch.to_string(),
        reason,
    }
}

fn check_shape(branch: &str, sig: &VariableSignature, children: &[(ElementaryTransform, AdmissibleTree)]) -> Result<()> {
    for (step, sub) in children {
        let rebuilt = ElementaryTransform::new(step.kind().clone(), sig).map_err(|e| fail(branch, format!("step {step}: {e}")))?;
        if rebuilt != *step {
            return Err(fail(branch, format!("step {step} has inconsistent signatures")));
        }
        if sub.signature != *step.source() {
            return Err(fail(branch, format!("subtree below {step} lives on the wrong signature")));
        }
    }
    let kinds: Vec<&TransformKind> = children.iter().map(|(s, _)| s.kind()).collect();
    let ok = match kinds.as_slice() {
        [TransformKind::ReflectionPlus { i: a }, TransformKind::ReflectionMinus { i: b }] => a == b,
        [TransformKind::BlowupChartA { i, j, lambda }, TransformKind::BlowupChartB { i: i2, j: j2, lambda: l2 }] => {
            i == i2 && j == j2 && lambda == l2
        }
        [TransformKind::Ramification { .. }] | [TransformKind::Translation { .. }] => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        let names: Vec<String> = children.iter().map(|(s, _)| s.to_string()).collect();
        Err(fail(branch, format!("fork shape [{}] is not an elementary tree", names.join(", "))))
    }
}

fn verify_node(
    tree: &AdmissibleTree,
    series: &[GenSeries],
    chain: TransformChain,
    path: String,
    out: &mut Vec<BranchReport>,
) -> Result<()> {
    match &tree.node {
        TreeNode::Fork { children } => {
            check_shape(&path, &tree.signature, children)?;
            for (k, (step, sub)) in children.iter().enumerate() {
                let mut c = chain.clone();
                c.push(step.clone()).map_err(|e| fail(&path, e.to_string()))?;
                verify_node(sub, series, c, format!("{path}/{k}"), out)?;
            }
            Ok(())
        }
        TreeNode::Leaf { snapshots } => {
            let branch = format!("{path} [{chain}]");
            if snapshots.len() != series.len() {
                return Err(fail(&branch, format!("leaf holds {} snapshots for {} series", snapshots.len(), series.len())));
            }
            let mut statuses = Vec::new();
            for (k, (f, snap)) in series.iter().zip(snapshots).enumerate() {
                let status = SeriesStatus::of(snap).ok_or_else(|| {
                    fail(&branch, format!("series {}: leaf snapshot {snap} is not normal", k + 1))
                })?;
                let fresh = chain.apply(f).map_err(|e| fail(&branch, e.to_string()))?;
                if fresh != *snap {
                    return Err(fail(&branch, format!("series {}: snapshot differs from recomputed {fresh}", k + 1)));
                }
                statuses.push(status);
            }
            let mut ledger = Vec::new();
            for (step_idx, step) in chain.steps().iter().enumerate() {
                let Some(w) = step.critical_variable() else { continue };
                let rest = chain.suffix(step_idx + 1);
                let image = rest
                    .apply(&GenSeries::variable(step.source(), w).map_err(|e| fail(&branch, e.to_string()))?)
                    .map_err(|e| fail(&branch, e.to_string()))?;
                let status = SeriesStatus::of(&image).ok_or_else(|| {
                    fail(
                        &branch,
                        format!("critical variable {} of step {} maps to non-normal {image}", step.source().var_name(w), step),
                    )
                })?;
                ledger.push(LedgerEntry {
                    step: step_idx,
                    variable: w,
                    status,
                });
            }
            out.push(BranchReport { chain, statuses, ledger });
            Ok(())
        }
    }
}

/// Recomputes every branch from `series` and checks leaf statuses, the
/// critical-variable ledger and fork shapes.
pub fn verify_tree(tree: &AdmissibleTree, series: &[GenSeries]) -> Result<Vec<BranchReport>> {
    if let Some(sig) = shared_signature(series)? {
        if sig != tree.signature {
            return Err(fail("root", format!("tree root {} differs from input signature {sig}", tree.signature)));
        }
    }
    let mut out = Vec::new();
    verify_node(tree, series, TransformChain::identity(&tree.signature), "root".into(), &mut out)?;
    Ok(out)
}

// ---------------------------------------------------------------- .qtree

pub fn kind_value(kind: &TransformKind, children: Vec<Value>) -> Value {
    let idx = |k: usize| Value::usize(k + 1);
    let mut fields = vec![("kind", Value::atom(kind.name()))];
    match kind {
        TransformKind::Ramification { i, lambda } => {
            fields.push(("i", idx(*i)));
            fields.push(("lambda", Value::rational(lambda)));
        }
        TransformKind::Translation { j, c } => {
            fields.push(("j", idx(*j)));
            fields.push(("c", Value::rational(c)));
        }
        TransformKind::BlowupChartA { i, j, lambda } | TransformKind::BlowupChartB { i, j, lambda } => {
            fields.push(("i", idx(*i)));
            fields.push(("j", idx(*j)));
            fields.push(("lambda", Value::rational(lambda)));
        }
        TransformKind::ReflectionPlus { i } | TransformKind::ReflectionMinus { i } | TransformKind::FaceZero { i } => {
            fields.push(("i", idx(*i)));
        }
        TransformKind::SignFlip { j } => fields.push(("j", idx(*j))),
    }
    fields.push(("children", Value::List(children)));
    Value::record(fields)
}

pub fn kind_from(v: &Value) -> Result<TransformKind> {
    let index = |key: &str| -> Result<usize> {
        let k = v.field(key)?.as_usize()?;
        k.checked_sub(1).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("variable indices start at 1, got {key}: 0"),
        })
    };
    let lambda = || v.field("lambda").and_then(Value::as_rational);
    Ok(match v.field("kind")?.as_atom()? {
        "ramification" => TransformKind::Ramification { i: index("i")?, lambda: lambda()? },
        "translation" => TransformKind::Translation {
            j: index("j")?,
            c: v.field("c")?.as_rational()?,
        },
        "blowup_a" => TransformKind::BlowupChartA {
            i: index("i")?,
            j: index("j")?,
            lambda: lambda()?,
        },
        "blowup_b" => TransformKind::BlowupChartB {
            i: index("i")?,
            j: index("j")?,
            lambda: lambda()?,
        },
        "reflection_plus" => TransformKind::ReflectionPlus { i: index("i")? },
        "reflection_minus" => TransformKind::ReflectionMinus { i: index("i")? },
        "sign_flip" => TransformKind::SignFlip { j: index("j")? },
        "face_zero" => TransformKind::FaceZero { i: index("i")? },
        other => {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown transform kind `{other}`"),
            })
        }
    })
}

fn snapshot_value(f: &GenSeries) -> Value {
    match f.normal_decompose() {
        Normality::Zero => Value::record(vec![("status", Value::atom("zero"))]),
        Normality::Normal(nd) => Value::record(vec![
            ("status", Value::atom("normal")),
            ("monomial", records::exponent_value(&nd.monomial_exponent)),
            ("unit", records::terms_value(&nd.unit)),
        ]),
        Normality::NotNormal(..) => Value::record(vec![("status", Value::atom("raw")), ("terms", records::terms_value(f))]),
    }
}

fn snapshot_from(sig: &VariableSignature, v: &Value) -> Result<GenSeries> {
    match v.field("status")?.as_atom()? {
        "zero" => Ok(GenSeries::zero(sig)),
        "raw" => records::terms_from(sig, v.field("terms")?),
        "normal" => {
            let e = records::exponent_from(v.field("monomial")?)?;
            let unit = records::terms_from(sig, v.field("unit")?)?;
            e.check_signature(sig)?;
            Ok(unit.mul_monomial(&e))
        }
        other => Err(Error::Parse {
            line: 0,
            msg: format!("unknown status `{other}`"),
        }),
    }
}

fn node_value(t: &AdmissibleTree) -> Value {
    match &t.node {
        TreeNode::Leaf { snapshots } => Value::record(vec![
            ("kind", Value::atom("leaf")),
            ("series", Value::List(snapshots.iter().map(snapshot_value).collect())),
        ]),
        TreeNode::Fork { children } => Value::record(vec![
            ("kind", Value::atom("fork")),
            (
                "children",
                Value::List(
                    children
                        .iter()
                        .map(|(s, sub)| kind_value(s.kind(), vec![node_value(sub)]))
                        .collect(),
                ),
            ),
        ]),
    }
}

fn node_from(sig: &VariableSignature, v: &Value) -> Result<AdmissibleTree> {
    match v.field("kind")?.as_atom()? {
        "leaf" => {
            let snaps = v
                .field("series")?
                .as_list()?
                .iter()
                .map(|s| snapshot_from(sig, s))
                .collect::<Result<Vec<_>>>()?;
            Ok(AdmissibleTree::leaf(sig, snaps))
        }
        "fork" => {
            let mut children = Vec::new();
            for c in v.field("children")?.as_list()? {
                let step = ElementaryTransform::new(kind_from(c)?, sig)?;
                let subs = c.field("children")?.as_list()?;
                let [sub] = subs else {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("transform {step} must carry exactly one subtree"),
                    });
                };
                let sub = node_from(step.source(), sub)?;
                children.push((step, sub));
            }
            Ok(AdmissibleTree::fork(sig, children))
        }
        other => Err(Error::Parse {
            line: 0,
            msg: format!("unknown node kind `{other}`"),
        }),
    }
}

/// A tree file: the input series, the engine settings and the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeFile {
    pub star: bool,
    pub max_depth: usize,
    pub inputs: Vec<GenSeries>,
    pub tree: AdmissibleTree,
}

impl TreeFile {
    pub fn to_text(&self) -> String {
        Value::record(vec![
            ("format", Value::atom("qtree")),
            ("version", Value::atom("1")),
            ("star", Value::atom(if self.star { "true" } else { "false" })),
            ("max_depth", Value::usize(self.max_depth)),
            ("signature", records::signature_value(&self.tree.signature)),
            (
                "inputs",
                Value::List(self.inputs.iter().map(|f| Value::record(vec![("terms", records::terms_value(f))])).collect()),
            ),
            ("tree", node_value(&self.tree)),
        ])
        .to_text()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v = records::parse(text)?;
        if v.field("format")?.as_atom()? != "qtree" || v.field("version")?.as_atom()? != "1" {
            return Err(Error::Parse {
                line: 1,
                msg: "not a version-1 qtree file".into(),
            });
        }
        let sig = records::signature_from(v.field("signature")?)?;
        let inputs = v
            .field("inputs")?
            .as_list()?
            .iter()
            .map(|f| records::terms_from(&sig, f.field("terms")?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            star: v.field("star")?.as_bool()?,
            max_depth: v.field("max_depth")?.as_usize()?,
            inputs,
            tree: node_from(&sig, v.field("tree")?)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn s(sig: &VariableSignature, t: &[((i64, i64), &[(i64, i64)])]) -> GenSeries {
        GenSeries::from_frac_terms(sig, t).unwrap()
    }

    fn x1_minus_x2() -> GenSeries {
        s(&VariableSignature::unit(2, 0), &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(0, 1), (1, 1)])])
    }

    #[test]
    fn difference_needs_one_blowup() {
        let f = x1_minus_x2();
        let tree = star_monomialize(std::slice::from_ref(&f), 32).unwrap();
        let TreeNode::Fork { children } = tree.node() else { panic!("expected a fork") };
        assert_eq!(children.len(), 2);
        assert_eq!(
            *children[0].0.kind(),
            TransformKind::BlowupChartA {
                i: 0,
                j: 1,
                lambda: int(1)
            }
        );
        let reports = verify_tree(&tree, std::slice::from_ref(&f)).unwrap();
        assert_eq!(reports.len(), 2);
        let sig = children[0].0.source().clone();
        let a_leaf = s(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((-1, 1), &[(1, 1), (1, 1)])]);
        let b_leaf = s(&sig, &[((-1, 1), &[(0, 1), (1, 1)]), ((1, 1), &[(1, 1), (1, 1)])]);
        assert_eq!(reports[0].chain.apply(&f).unwrap(), a_leaf);
        assert_eq!(reports[1].chain.apply(&f).unwrap(), b_leaf);
        assert_eq!(reports[0].ledger.len(), 1);
        assert_eq!(reports[0].ledger[0].variable, 0);
        assert_eq!(reports[1].ledger[0].variable, 1);
    }

    #[test]
    fn normal_input_gives_trivial_tree() {
        let f = s(&VariableSignature::unit(1, 0), &[((1, 1), &[(1, 2)])]);
        let tree = monomialize(std::slice::from_ref(&f), 8).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(branch_charts(&tree), vec![TransformChain::identity(f.signature())]);
        let reports = verify_tree(&tree, &[f]).unwrap();
        assert!(reports[0].ledger.is_empty());
    }

    #[test]
    fn product_preprocessing() {
        let sig = VariableSignature::unit(2, 0);
        let f = s(&sig, &[((1, 1), &[(3, 2), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])]);
        let g = GenSeries::variable(&sig, 0).unwrap();
        let tree = monomialize(&[f.clone(), g.clone()], 8).unwrap();
        let TreeNode::Fork { children } = tree.node() else { panic!() };
        assert_eq!(
            *children[0].0.kind(),
            TransformKind::BlowupChartA {
                i: 0,
                j: 1,
                lambda: frac(3, 2)
            }
        );
        let reports = verify_tree(&tree, &[f, g]).unwrap();
        assert!(reports.iter().all(|r| r.statuses.iter().all(|s| matches!(s, SeriesStatus::Normal(_)))));
    }

    #[test]
    fn zero_input_does_not_block_the_others() {
        let sig = VariableSignature::unit(2, 0);
        let tree = monomialize(&[GenSeries::zero(&sig), x1_minus_x2()], 8).unwrap();
        assert_eq!(tree.leaf_count(), 2);
        let reports = verify_tree(&tree, &[GenSeries::zero(&sig), x1_minus_x2()]).unwrap();
        assert!(reports.iter().all(|r| r.statuses[0] == SeriesStatus::Zero));
    }

    #[test]
    fn standard_variables_are_reflected_first() {
        let sig = VariableSignature::unit(0, 2);
        let f = s(&sig, &[((1, 1), &[(2, 1), (0, 1)]), ((1, 1), &[(0, 1), (2, 1)])]);
        let tree = star_monomialize(std::slice::from_ref(&f), 16).unwrap();
        let TreeNode::Fork { children } = tree.node() else { panic!() };
        assert!(children[0].0.kind().is_reflection());
        verify_tree(&tree, &[f]).unwrap();
    }

    #[test]
    fn mutations_are_caught() {
        let f = x1_minus_x2();
        let tree = star_monomialize(std::slice::from_ref(&f), 8).unwrap();

        let mut pruned = tree.clone();
        if let TreeNode::Fork { children } = pruned.node_mut() {
            children.pop();
        }
        assert!(matches!(verify_tree(&pruned, std::slice::from_ref(&f)), Err(Error::Verification { .. })));

        let mut tampered = tree.clone();
        if let TreeNode::Fork { children } = tampered.node_mut() {
            let sig = children[0].1.signature().clone();
            children[0].1 = AdmissibleTree::leaf(&sig, vec![s(&sig, &[((1, 1), &[(1, 1), (0, 1)]), ((1, 1), &[(0, 1), (1, 1)])])]);
        }
        match verify_tree(&tampered, &[f]) {
            Err(Error::Verification { reason, .. }) => assert!(reason.contains("not normal")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn depth_guard() {
        let sig = VariableSignature::unit(2, 0);
        let f = s(&sig, &[((1, 1), &[(2, 1), (0, 1)]), ((-1, 1), &[(0, 1), (3, 1)])]);
        assert_eq!(monomialize(&[f.clone(), x1_minus_x2()], 1), Err(Error::DepthExhausted(1)));
        assert!(monomialize(&[f], 0).is_err());
    }

    #[test]
    fn qtree_round_trip_is_stable() {
        let sig = VariableSignature::unit(2, 0);
        let g = s(&sig, &[((1, 1), &[(2, 1), (0, 1)]), ((-1, 1), &[(0, 1), (3, 1)])]);
        let inputs = vec![x1_minus_x2(), g];
        let tree = star_monomialize(&inputs, 32).unwrap();
        let file = TreeFile {
            star: true,
            max_depth: 32,
            inputs: inputs.clone(),
            tree,
        };
        let text = file.to_text();
        let back = TreeFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_text(), text);
        verify_tree(&back.tree, &back.inputs).unwrap();
        assert_eq!(star_monomialize(&inputs, 32).unwrap(), file.tree);
    }
}
