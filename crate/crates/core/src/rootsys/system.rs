use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Zero};

use crate::error::{FoldError, Result};
use crate::linalg::Matrix;
use crate::scalars::QScalar;

/// A finite reflection group with a chosen simple system, described by the
/// Gram matrix of its simple roots over `l` (or `k`).
///
/// Roots are stored by their coordinates in the simple roots; points of an
/// orbit are stored by their weight coordinates `c_i = α_i^∨(x)`.
#[derive(Debug, Clone)]
pub struct RootSystem {
    names: Vec<String>,
    gram: Vec<Vec<QScalar>>,
    cartan: Vec<Vec<QScalar>>,
    half_norms: Vec<QScalar>,
    positive: Vec<Vec<QScalar>>,
    index: HashMap<Vec<QScalar>, usize>,
    coroot_weights: Vec<Vec<QScalar>>,
    norms: Vec<QScalar>,
    crystallographic: bool,
}

pub const DEFAULT_ROOT_BOUND: usize = 10_000;

impl RootSystem {
    pub fn from_gram(names: Vec<String>, gram: Vec<Vec<QScalar>>, bound: usize) -> Result<Self> {
        let r = gram.len();
        if names.len() != r {
            return Err(FoldError::Dimension { expected: r, found: names.len() });
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != r {
                return Err(FoldError::Dimension { expected: r, found: row.len() });
            }
            if row[i].sign() <= 0 {
                return Err(FoldError::Validation(format!("simple root {} has nonpositive norm", names[i])));
            }
            for j in 0..r {
                if gram[i][j] != gram[j][i] {
                    return Err(FoldError::Validation("Gram matrix is not symmetric".into()));
                }
                if i != j && gram[i][j].sign() > 0 {
                    return Err(FoldError::Validation(format!(
                        "simple roots {} and {} form an acute angle",
                        names[i], names[j]
                    )));
                }
            }
        }
        let two = QScalar::from_i64(2);
        let mut cartan = vec![vec![QScalar::zero(); r]; r];
        for i in 0..r {
            let inv = gram[i][i].inv()?;
            for j in 0..r {
                cartan[i][j] = &(&two * &gram[i][j]) * &inv;
            }
        }
        let half = QScalar::base(crate::scalars::Rational::new(1, 2));
        let half_norms = (0..r).map(|i| &gram[i][i] * &half).collect();
        let crystallographic = cartan.iter().flatten().all(|a| a.is_base() && a.y().is_integer());
        let mut sys = RootSystem {
            names,
            gram,
            cartan,
            half_norms,
            positive: Vec::new(),
            index: HashMap::new(),
            coroot_weights: Vec::new(),
            norms: Vec::new(),
            crystallographic,
        };
        sys.generate_positive_roots(bound)?;
        Ok(sys)
    }

    /// Saturates the simple roots under simple reflections, keeping the roots
    /// whose simple-root coordinates are nonnegative.
    fn generate_positive_roots(&mut self, bound: usize) -> Result<()> {
        let r = self.rank();
        let mut queue = VecDeque::new();
        for i in 0..r {
            let mut e = vec![QScalar::zero(); r];
            e[i] = QScalar::one();
            self.index.insert(e.clone(), self.positive.len());
            self.positive.push(e.clone());
            queue.push_back(e);
        }
        while let Some(beta) = queue.pop_front() {
            for i in 0..r {
                if beta.iter().enumerate().all(|(j, x)| if j == i { x.is_one() } else { x.is_zero() }) {
                    continue;
                }
                let img = self.simple_reflect_root(&beta, i);
                let signs: Vec<i32> = img.iter().map(QScalar::sign).collect();
                if signs.iter().any(|&s| s < 0) {
                    if signs.iter().any(|&s| s > 0) {
                        return Err(FoldError::Validation(format!(
                            "root with mixed-sign coordinates encountered: {img:?}"
                        )));
                    }
                    return Err(FoldError::Validation(
                        "a simple reflection sent a non-simple positive root to a negative root".into(),
                    ));
                }
                if !self.index.contains_key(&img) {
                    if self.positive.len() >= bound {
                        return Err(FoldError::Resource(format!(
                            "root closure exceeded {bound} positive roots; the input is not a finite root system"
                        )));
                    }
                    self.index.insert(img.clone(), self.positive.len());
                    self.positive.push(img.clone());
                    queue.push_back(img);
                }
            }
        }
        // canonical order: by height over the real embedding, then coordinates
        let mut order: Vec<usize> = (0..self.positive.len()).collect();
        let heights: Vec<QScalar> = self.positive.iter().map(|b| b.iter().cloned().sum()).collect();
        let keys: Vec<Vec<String>> =
            self.positive.iter().map(|b| b.iter().map(|x| format!("{x:?}")).collect()).collect();
        order.sort_by(|&a, &b| {
            (&heights[a] - &heights[b]).sign().cmp(&0).then_with(|| keys[b].cmp(&keys[a]))
        });
        self.positive = order.iter().map(|&i| self.positive[i].clone()).collect();
        self.index = self.positive.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        self.coroot_weights = self.positive.iter().map(|b| self.weights_of_root(b)).collect();
        self.norms = self.positive.iter().map(|b| self.form_roots(b, b)).collect();
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gram(&self) -> &[Vec<QScalar>] {
        &self.gram
    }

    /// `A_ij = α_i^∨(α_j) = 2 G_ij / G_ii`.
    pub fn cartan(&self) -> &[Vec<QScalar>] {
        &self.cartan
    }

    pub fn is_crystallographic(&self) -> bool {
        self.crystallographic
    }

    pub fn positive_roots(&self) -> &[Vec<QScalar>] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn root_index(&self, coords: &[QScalar]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    /// Whether `coords` (positive or negative) is a root.
    pub fn is_root(&self, coords: &[QScalar]) -> bool {
        if self.index.contains_key(coords) {
            return true;
        }
        let neg: Vec<QScalar> = coords.iter().map(|x| -x).collect();
        self.index.contains_key(&neg)
    }

    pub fn root_norm(&self, idx: usize) -> &QScalar {
        &self.norms[idx]
    }

    /// `B(β, γ)` for roots given in simple-root coordinates.
    pub fn form_roots(&self, b: &[QScalar], c: &[QScalar]) -> QScalar {
        let mut acc = QScalar::zero();
        for (i, bi) in b.iter().enumerate() {
            if bi.is_zero() {
                continue;
            }
            for (j, cj) in c.iter().enumerate() {
                if cj.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += &(&(bi * cj) * &self.gram[i][j]);
            }
        }
        acc
    }

    /// `(α_i^∨(β))_i` for `β` in simple-root coordinates.
    pub fn weights_of_root(&self, beta: &[QScalar]) -> Vec<QScalar> {
        (0..self.rank())
            .map(|i| {
                let mut acc = QScalar::zero();
                for (j, m) in beta.iter().enumerate() {
                    if !m.is_zero() && !self.cartan[i][j].is_zero() {
                        acc += &(m * &self.cartan[i][j]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn simple_reflect_root(&self, beta: &[QScalar], i: usize) -> Vec<QScalar> {
        let mut out = beta.to_vec();
        let mut c = QScalar::zero();
        for (j, m) in beta.iter().enumerate() {
            if !m.is_zero() && !self.cartan[i][j].is_zero() {
                c += &(m * &self.cartan[i][j]);
            }
        }
        out[i] = &out[i] - &c;
        out
    }

    /// `s_i` on weight coordinates: `c_j ↦ c_j - c_i A_ji`.
    pub fn simple_reflect_weights(&self, x: &[QScalar], i: usize) -> Vec<QScalar> {
        if x[i].is_zero() {
            return x.to_vec();
        }
        x.iter()
            .enumerate()
            .map(|(j, cj)| {
                let a = &self.cartan[j][i];
                if a.is_zero() {
                    cj.clone()
                } else {
                    cj - &(&x[i] * a)
                }
            })
            .collect()
    }

    /// `B(x, β) = Σ_j m_j c_j G_jj / 2` for a point in weight coordinates and
    /// the positive root with index `idx`.
    pub fn pairing(&self, x: &[QScalar], idx: usize) -> QScalar {
        self.pairing_coords(x, &self.positive[idx])
    }

    pub fn pairing_coords(&self, x: &[QScalar], beta: &[QScalar]) -> QScalar {
        let mut acc = QScalar::zero();
        for ((m, c), h) in beta.iter().zip(x).zip(&self.half_norms) {
            if !m.is_zero() && !c.is_zero() {
                acc += &(&(m * c) * h);
            }
        }
        acc
    }

    /// `r_β x` for a point in weight coordinates; `pairing` is `B(x, β)`.
    pub fn reflect_weights(&self, x: &[QScalar], idx: usize, pairing: &QScalar) -> Vec<QScalar> {
        let coroot = (&QScalar::from_i64(2) * pairing)
            .try_div(&self.norms[idx])
            .expect("roots have nonzero norm");
        x.iter()
            .zip(&self.coroot_weights[idx])
            .map(|(c, w)| if w.is_zero() { c.clone() } else { c - &(&coroot * w) })
            .collect()
    }

    /// Simple-root coordinates of the point with the given weight coordinates.
    pub fn coords_of_weights(&self, weights: &[QScalar]) -> Result<Vec<QScalar>> {
        let a = Matrix::from_rows(self.cartan.clone())?;
        a.solve(weights)?.ok_or_else(|| FoldError::Degenerate("Cartan matrix is singular".into()))
    }

    /// The matrix of `s_i` on `Λ_r ⊗ l` in simple-root coordinates (column `j` is `s_i(α_j)`).
    pub fn simple_reflection_matrix(&self, i: usize) -> Matrix {
        let r = self.rank();
        let mut m = Matrix::identity(r);
        for j in 0..r {
            let v = &m[(i, j)] - &self.cartan[i][j];
            m[(i, j)] = v;
        }
        m
    }

    /// The sub-system spanned by the simple roots with the given indices.
    pub fn parabolic(&self, subset: &[usize]) -> Result<RootSystem> {
        let names = subset.iter().map(|&i| self.names[i].clone()).collect();
        let gram = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.gram[i][j].clone()).collect())
            .collect();
        RootSystem::from_gram(names, gram, DEFAULT_ROOT_BOUND)
    }

    /// All roots, positive ones first, then their negatives in the same order.
    pub fn all_roots(&self) -> Vec<Vec<QScalar>> {
        let mut out = self.positive.clone();
        out.extend(self.positive.iter().map(|b| b.iter().map(|x| -x).collect::<Vec<_>>()));
        out
    }

    /// The permutation of all roots (indexed as in [`all_roots`](Self::all_roots))
    /// induced by `s_i`.
    pub fn simple_permutation(&self, i: usize) -> Vec<u32> {
        let n = self.positive.len();
        let all = self.all_roots();
        let lookup = |v: &Vec<QScalar>| -> u32 {
            if let Some(&k) = self.index.get(v) {
                return k as u32;
            }
            let neg: Vec<QScalar> = v.iter().map(|x| -x).collect();
            (self.index[&neg] + n) as u32
        };
        all.iter().map(|b| lookup(&self.simple_reflect_root(b, i))).collect()
    }

    /// `|W|` by enumerating the permutation group the simple reflections induce
    /// on the roots.
    pub fn group_order_by_permutations(&self, bound: usize) -> Result<u64> {
        let gens: Vec<Vec<u32>> = (0..self.rank()).map(|i| self.simple_permutation(i)).collect();
        let id: Vec<u32> = (0..2 * self.positive.len() as u32).collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        seen.insert(id.clone());
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for g in &gens {
                    let q: Vec<u32> = p.iter().map(|&x| g[x as usize]).collect();
                    if !seen.contains(&q) {
                        if seen.len() >= bound {
                            return Err(FoldError::Resource(format!("group exceeds {bound} elements")));
                        }
                        seen.insert(q.clone());
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        Ok(seen.len() as u64)
    }

    /// `|W|` by the orbit-stabilizer recursion `|W_J| = |W_J ϖ_i| · |W_{J∖i}|`.
    pub fn group_order_by_orbits(&self, orbit_bound: usize) -> Result<u64> {
        let mut subset: Vec<usize> = (0..self.rank()).collect();
        let mut order: u64 = 1;
        while !subset.is_empty() {
            let sys = self.parabolic(&subset)?;
            let mut best: Option<(usize, usize)> = None;
            for pos in 0..subset.len() {
                let mut w = vec![QScalar::zero(); subset.len()];
                w[pos] = QScalar::one();
                if let Ok(size) = sys.orbit_size(&w, orbit_bound) {
                    if best.is_none_or(|(_, s)| size < s) {
                        best = Some((pos, size));
                    }
                }
            }
            let (pos, size) = best.ok_or_else(|| {
                FoldError::Resource(format!("every fundamental orbit exceeds {orbit_bound} points"))
            })?;
            order = order
                .checked_mul(size as u64)
                .ok_or_else(|| FoldError::Resource("group order overflows u64".into()))?;
            subset.remove(pos);
        }
        Ok(order)
    }

    pub fn orbit_size(&self, start: &[QScalar], bound: usize) -> Result<usize> {
        let mut seen: HashSet<Vec<QScalar>> = HashSet::new();
        seen.insert(start.to_vec());
        let mut frontier = vec![start.to_vec()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in &frontier {
                for i in 0..self.rank() {
                    if x[i].is_zero() {
                        continue;
                    }
                    let y = self.simple_reflect_weights(x, i);
                    if seen.insert(y.clone()) {
                        if seen.len() > bound {
                            return Err(FoldError::Resource(format!("orbit exceeds {bound} points")));
                        }
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        Ok(seen.len())
    }
}

/// The Gram matrix of a simply-laced Dynkin type given by its Cartan matrix,
/// scaled so that roots have norm 2.
pub fn gram_from_cartan(cartan: &[Vec<i64>]) -> Vec<Vec<QScalar>> {
    cartan.iter().map(|row| row.iter().map(|&a| QScalar::from_i64(a)).collect()).collect()
}

/// The Cartan matrix of `A_n`.
pub fn cartan_a(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

pub fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}
