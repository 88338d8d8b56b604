//! Binary trees of squared-amplitude partial sums with signed leaves.
//!
//! Level `d` holds `2^d` values; node `l` at level `d` is the sum of `v_j^2`
//! over every leaf `j` whose top `d` bits spell `l`. The leaves also carry a
//! sign flag (1 for negative). A matrix gets one tree per row plus a tree
//! whose leaves are the squared row norms.

use serde::Serialize;

use crate::data::{BitPath, SparseMatrix, SparseVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpTree {
    depth: usize,
    levels: Vec<Vec<f64>>,
    leaf_signs: Vec<u8>,
}

impl KpTree {
    pub fn zeros(depth: usize) -> Self {
        let levels = (0..=depth).map(|d| vec![0.0; 1 << d]).collect();
        Self { depth, levels, leaf_signs: vec![0; 1 << depth] }
    }

    /// Builds the tree for `v` (padded to a power of two first) by inserting
    /// each stored entry along its root-to-leaf path.
    pub fn build(v: &SparseVector) -> Self {
        Self::build_counted(v).0
    }

    /// Like [`KpTree::build`], also returning the number of node writes.
    pub fn build_counted(v: &SparseVector) -> (Self, usize) {
        let v = v.pad_to_power_of_two();
        let mut tree = Self::zeros(v.depth());
        let mut touched = 0;
        for &(j, value) in v.entries() {
            if value == 0.0 {
                continue;
            }
            touched += tree.update_entry(j, value).expect("entries of a padded vector are in range");
        }
        (tree, touched)
    }

    /// A tree whose leaves hold the given nonnegative weights directly, with
    /// all signs positive.
    pub fn from_weights(weights: &[f64]) -> Self {
        let dim = weights.len().max(1).next_power_of_two();
        let depth = dim.trailing_zeros() as usize;
        let mut tree = Self::zeros(depth);
        tree.levels[depth][..weights.len()].copy_from_slice(weights);
        for d in (0..depth).rev() {
            for l in 0..(1 << d) {
                tree.levels[d][l] = tree.levels[d + 1][2 * l] + tree.levels[d + 1][2 * l + 1];
            }
        }
        tree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn root(&self) -> f64 {
        self.levels[0][0]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Sets entry `index` to `value` and restores the parent sums along its
    /// path. Returns the number of node values written (`depth + 1`).
    pub fn update_entry(&mut self, index: usize, value: f64) -> Result<usize> {
        let dim = 1usize << self.depth;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        if !value.is_finite() {
            return Err(Error::NonFinite(value));
        }
        self.levels[self.depth][index] = value * value;
        self.leaf_signs[index] = u8::from(value < 0.0);
        let mut written = 1;
        let mut l = index;
        for d in (0..self.depth).rev() {
            l >>= 1;
            self.levels[d][l] = self.levels[d + 1][2 * l] + self.levels[d + 1][2 * l + 1];
            written += 1;
        }
        Ok(written)
    }

    /// The partial sum stored at `path`; the empty path is the root.
    pub fn node_value(&self, path: &BitPath) -> Result<f64> {
        if path.depth() > self.depth {
            return Err(Error::PathTooDeep { path: path.depth(), tree: self.depth });
        }
        Ok(self.levels[path.depth()][path.value() as usize])
    }

    /// The `2^d` values of level `d`, in index order.
    pub fn level_cells(&self, d: usize) -> Result<&[f64]> {
        if d == 0 || d > self.depth {
            return Err(Error::LevelOutOfRange { level: d, depth: self.depth });
        }
        Ok(&self.levels[d])
    }

    /// Leaf sign flags, 1 for a negative entry. Zero entries carry 0.
    pub fn sign_cells(&self) -> &[u8] {
        &self.leaf_signs
    }

    /// The signed entries recovered from the leaves.
    pub fn signed_leaves(&self) -> Vec<f64> {
        self.levels[self.depth]
            .iter()
            .zip(&self.leaf_signs)
            .map(|(&sq, &s)| if s == 1 { -sq.sqrt() } else { sq.sqrt() })
            .collect()
    }
}

/// One tree per matrix row plus a tree over the squared row norms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpForest {
    row_trees: Vec<KpTree>,
    norm_tree: KpTree,
}

impl KpForest {
    pub fn build(m: &SparseMatrix) -> Self {
        let m = m.pad_to_power_of_two();
        let row_trees: Vec<KpTree> = (0..m.rows()).map(|i| KpTree::build(&m.row(i))).collect();
        let roots: Vec<f64> = row_trees.iter().map(KpTree::root).collect();
        let norm_tree = KpTree::from_weights(&roots);
        Self { row_trees, norm_tree }
    }

    pub fn row_trees(&self) -> &[KpTree] {
        &self.row_trees
    }

    pub fn row_tree(&self, i: usize) -> Result<&KpTree> {
        self.row_trees.get(i).ok_or(Error::IndexOutOfRange { index: i, dim: self.row_trees.len() })
    }

    pub fn norm_tree(&self) -> &KpTree {
        &self.norm_tree
    }

    pub fn rows(&self) -> usize {
        self.row_trees.len()
    }

    pub fn row_depth(&self) -> usize {
        self.norm_tree.depth
    }

    pub fn col_depth(&self) -> usize {
        self.row_trees[0].depth
    }

    /// Updates `M[i][j]` in its row tree and propagates the new row weight
    /// into the norm tree. Returns the total node writes.
    pub fn update_entry(&mut self, i: usize, j: usize, value: f64) -> Result<usize> {
        let rows = self.row_trees.len();
        let tree = self.row_trees.get_mut(i).ok_or(Error::IndexOutOfRange { index: i, dim: rows })?;
        let mut written = tree.update_entry(j, value)?;
        let root = tree.root();

        let norm = &mut self.norm_tree;
        norm.levels[norm.depth][i] = root;
        written += 1;
        let mut l = i;
        for d in (0..norm.depth).rev() {
            l >>= 1;
            norm.levels[d][l] = norm.levels[d + 1][2 * l] + norm.levels[d + 1][2 * l + 1];
            written += 1;
        }
        Ok(written)
    }
}

pub fn build_tree(v: &SparseVector) -> KpTree {
    KpTree::build(v)
}

pub fn build_forest(m: &SparseMatrix) -> KpForest {
    KpForest::build(m)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn example_tree() -> KpTree {
        KpTree::build(&SparseVector::from_dense(&[-2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, -1.0]).unwrap())
    }

    /// Sum of leaf squares under `prefix`, computed straight from the values.
    fn brute_node(values: &[f64], depth: usize, d: usize, l: usize) -> f64 {
        let span = 1 << (depth - d);
        values[l * span..(l + 1) * span].iter().map(|v| v * v).sum()
    }

    fn check_parent_sums(t: &KpTree) {
        for d in 0..t.depth() {
            for l in 0..(1 << d) {
                assert_eq!(t.levels[d][l], t.levels[d + 1][2 * l] + t.levels[d + 1][2 * l + 1]);
            }
        }
    }

    #[test]
    fn example_structure() {
        let t = example_tree();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.root(), 10.0);
        assert_eq!(t.level_cells(1).unwrap(), &[8.0, 2.0]);
        assert_eq!(t.level_cells(2).unwrap(), &[4.0, 4.0, 0.0, 2.0]);
        assert_eq!(t.level_cells(3).unwrap(), &[4.0, 0.0, 4.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(t.sign_cells(), &[1, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(t.node_value(&"11".parse().unwrap()).unwrap(), 2.0);
        assert_eq!(t.node_value(&BitPath::empty()).unwrap(), 10.0);
        assert_eq!(t.node_value(&"111".parse().unwrap()).unwrap(), 1.0);
        assert!(t.node_value(&"1111".parse().unwrap()).is_err());
        assert!(t.level_cells(0).is_err());
        assert!(t.level_cells(4).is_err());
    }

    #[test]
    fn small_trees() {
        let t = KpTree::build(&SparseVector::from_dense(&[1.0, 0.0]).unwrap());
        assert_eq!(t.root(), 1.0);
        assert_eq!(t.level_cells(1).unwrap(), &[1.0, 0.0]);
        assert_eq!(t.sign_cells(), &[0, 0]);

        let t = KpTree::build(&SparseVector::from_dense(&[0.0, -3.0]).unwrap());
        assert_eq!(t.sign_cells(), &[0, 1]);

        let t = KpTree::build(&SparseVector::from_dense(&[1.0, 2.0, 3.0]).unwrap());
        assert_eq!(t.sign_cells(), &[0, 0, 0, 0]);
        assert_eq!(t.root(), 14.0);
    }

    #[test]
    fn update_matches_rebuild() {
        let mut t = example_tree();
        let written = t.update_entry(1, 1.0).unwrap();
        assert_eq!(written, 4);
        let rebuilt = KpTree::build(&SparseVector::from_dense(&[-2.0, 1.0, 2.0, 0.0, 0.0, 0.0, 1.0, -1.0]).unwrap());
        assert_eq!(t, rebuilt);
        assert_eq!(t.level_cells(1).unwrap(), &[9.0, 2.0]);
        assert_eq!(t.level_cells(2).unwrap(), &[5.0, 4.0, 0.0, 2.0]);
        assert_eq!(t.level_cells(3).unwrap()[1], 1.0);
        assert_eq!(t.sign_cells()[1], 0);
    }

    #[test]
    fn update_edge_cases() {
        let mut t = example_tree();
        let before = t.clone();
        t.update_entry(2, 2.0).unwrap();
        assert_eq!(t, before);

        let mut t = KpTree::build(&SparseVector::from_dense(&[1.0, 0.0]).unwrap());
        t.update_entry(0, 0.0).unwrap();
        assert_eq!(t.root(), 0.0);
        assert!(matches!(t.update_entry(2, 1.0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn build_touches_w_times_path_length() {
        let v =
            SparseVector::from_dense(&[0.0, 1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0])
                .unwrap();
        let (_, touched) = KpTree::build_counted(&v);
        assert_eq!(touched, 3 * 5);
    }

    #[test]
    fn random_tree_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..16).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let t = KpTree::build(&SparseVector::from_dense(&values).unwrap());
        check_parent_sums(&t);
        for d in 0..=4 {
            for l in 0..(1 << d) {
                let oracle = brute_node(&values, 4, d, l);
                let got = t.node_value(&BitPath::from_value(l as u64, d)).unwrap();
                assert!((got - oracle).abs() <= 1e-12 * oracle.max(1.0), "d={d} l={l}");
            }
        }
        for (j, v) in values.iter().enumerate() {
            assert_eq!(t.level_cells(4).unwrap()[j], v * v);
            assert_eq!(t.sign_cells()[j], u8::from(*v < 0.0));
        }
    }

    #[test]
    fn forest_basics() {
        let id = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let f = KpForest::build(&id);
        assert_eq!(f.row_trees()[0].root(), 1.0);
        assert_eq!(f.row_trees()[1].root(), 1.0);
        assert_eq!(f.norm_tree().root(), 2.0);

        let m = SparseMatrix::from_dense(&[
            vec![-2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, -1.0],
            vec![0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let f = KpForest::build(&m);
        assert_eq!(f.row_trees()[0], example_tree());
        assert_eq!(f.norm_tree().level_cells(1).unwrap(), &[10.0, 9.0]);
        assert_eq!(f.norm_tree().sign_cells(), &[0, 0]);
    }

    #[test]
    fn forest_frobenius_and_update() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let dense: Vec<Vec<f64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        let m = SparseMatrix::from_dense(&dense).unwrap();
        let mut f = KpForest::build(&m);
        let oracle: f64 = dense.iter().flatten().map(|x| x * x).sum();
        assert!((f.norm_tree().root() - oracle).abs() < 1e-12 * oracle);
        for (i, t) in f.row_trees().iter().enumerate() {
            assert_eq!(f.norm_tree().level_cells(2).unwrap()[i], t.root());
        }

        let written = f.update_entry(2, 3, 0.25).unwrap();
        assert_eq!(written, 3 + 3);
        let mut updated = dense.clone();
        updated[2][3] = 0.25;
        assert_eq!(f, KpForest::build(&SparseMatrix::from_dense(&updated).unwrap()));
    }
}
