use std::collections::VecDeque;

use super::{MolError, Molecule};

/// Marks every bond that is a bridge (not on any cycle). Iterative Tarjan.
pub(crate) fn bridges(mol: &Molecule) -> Vec<bool> {
    let n = mol.atom_count();
    let mut is_bridge = vec![false; mol.bonds().len()];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    // (atom, bond used to enter it, next neighbor cursor)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (u, via, ref mut cursor)) = stack.last_mut() {
            if let Some(&(v, bond)) = mol.neighbors(u).get(*cursor) {
                *cursor += 1;
                if bond == via {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, bond, 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// A bond whose rotation moves one fragment relative to the rest.
///
/// After [`decompose_fragments`] the ends are oriented: `static_end` lies on
/// the side of the fragment-tree root and is the rotation pivot; the rotation
/// axis points from `static_end` to `mobile_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotatableBond {
    pub bond_index: usize,
    pub static_end: usize,
    pub mobile_end: usize,
    pub torsion_index: usize,
}

fn heavy_count(mol: &Molecule, labels: &[usize], component: usize) -> usize {
    mol.atoms().iter().zip(labels).filter(|(atom, &l)| l == component && !atom.is_hydrogen()).count()
}

/// Single, acyclic bonds with at least two heavy atoms on either side of the
/// cut. An explicit override list in the molecule takes precedence.
pub fn detect_rotatable_bonds(mol: &Molecule) -> Vec<RotatableBond> {
    let mut chosen: Vec<usize> = match mol.rotatable_override() {
        Some(list) => list.to_vec(),
        None => mol
            .bonds()
            .iter()
            .enumerate()
            .filter(|(_, bond)| bond.order == 1 && !bond.in_ring)
            .filter(|(i, bond)| {
                let (labels, count) = mol.components(&[*i]);
                count == 2
                    && heavy_count(mol, &labels, labels[bond.a]) >= 2
                    && heavy_count(mol, &labels, labels[bond.b]) >= 2
            })
            .map(|(i, _)| i)
            .collect(),
    };
    chosen.sort_unstable();
    chosen
        .into_iter()
        .enumerate()
        .map(|(t, bond_index)| {
            let bond = &mol.bonds()[bond_index];
            RotatableBond { bond_index, static_end: bond.a, mobile_end: bond.b, torsion_index: t }
        })
        .collect()
}

/// Rigid fragments left after cutting every rotatable bond, arranged as a tree
/// whose edges are the torsions.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentDecomposition {
    fragment_of: Vec<usize>,
    members: Vec<Vec<usize>>,
    torsions: Vec<RotatableBond>,
    root: usize,
    /// Per fragment: `(parent fragment, torsion index)`; `None` for the root.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    /// Fragments in breadth-first order from the root.
    order: Vec<usize>,
}

impl FragmentDecomposition {
    pub fn fragment_of(&self, atom: usize) -> usize {
        self.fragment_of[atom]
    }

    pub fn fragment_labels(&self) -> &[usize] {
        &self.fragment_of
    }

    pub fn fragment_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, fragment: usize) -> &[usize] {
        &self.members[fragment]
    }

    pub fn fragment_sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn atom_count(&self) -> usize {
        self.fragment_of.len()
    }

    /// Oriented torsions, indexed by torsion index.
    pub fn torsions(&self) -> &[RotatableBond] {
        &self.torsions
    }

    pub fn torsion_count(&self) -> usize {
        self.torsions.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, fragment: usize) -> Option<(usize, usize)> {
        self.parent[fragment]
    }

    pub fn depth(&self, fragment: usize) -> usize {
        self.depth[fragment]
    }

    /// Fragments ordered so that every parent precedes its children.
    pub fn top_down(&self) -> &[usize] {
        &self.order
    }

    /// Fragment on the mobile side of a torsion.
    pub fn child_of_torsion(&self, torsion: usize) -> usize {
        self.fragment_of[self.torsions[torsion].mobile_end]
    }
}

pub fn decompose_fragments(mol: &Molecule, rbs: &[RotatableBond]) -> Result<FragmentDecomposition, MolError> {
    let mut cut = Vec::with_capacity(rbs.len());
    for rb in rbs {
        let bond = mol.bonds().get(rb.bond_index).ok_or(MolError::NoSuchBond { a: rb.static_end, b: rb.mobile_end })?;
        if bond.in_ring {
            return Err(MolError::NotABridge { bond: rb.bond_index, a: bond.a, b: bond.b });
        }
        if cut.contains(&rb.bond_index) {
            return Err(MolError::RepeatedTorsion { bond: rb.bond_index });
        }
        cut.push(rb.bond_index);
    }
    let (fragment_of, count) = mol.components(&cut);
    debug_assert_eq!(count, rbs.len() + 1);
    let mut members = vec![Vec::new(); count];
    for (atom, &f) in fragment_of.iter().enumerate() {
        members[f].push(atom);
    }
    let root = (0..count).max_by(|&a, &b| members[a].len().cmp(&members[b].len()).then(b.cmp(&a))).unwrap_or(0);

    // fragment adjacency through torsions
    let mut links: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
    for (t, &bond_index) in cut.iter().enumerate() {
        let bond = &mol.bonds()[bond_index];
        let (fa, fb) = (fragment_of[bond.a], fragment_of[bond.b]);
        links[fa].push((fb, t));
        links[fb].push((fa, t));
    }

    let mut parent = vec![None; count];
    let mut depth = vec![0; count];
    let mut visited = vec![false; count];
    let mut order = Vec::with_capacity(count);
    let mut torsions: Vec<RotatableBond> = Vec::with_capacity(cut.len());
    for (t, &bond_index) in cut.iter().enumerate() {
        let bond = &mol.bonds()[bond_index];
        torsions.push(RotatableBond { bond_index, static_end: bond.a, mobile_end: bond.b, torsion_index: t });
    }
    let mut queue = VecDeque::from([root]);
    visited[root] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for &(g, t) in &links[f] {
            if visited[g] {
                continue;
            }
            visited[g] = true;
            parent[g] = Some((f, t));
            depth[g] = depth[f] + 1;
            let bond = &mol.bonds()[cut[t]];
            let (static_end, mobile_end) = if fragment_of[bond.a] == f { (bond.a, bond.b) } else { (bond.b, bond.a) };
            torsions[t].static_end = static_end;
            torsions[t].mobile_end = mobile_end;
            queue.push_back(g);
        }
    }
    Ok(FragmentDecomposition { fragment_of, members, torsions, root, parent, depth, order })
}

/// One torsion on the path between two atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub torsion: usize,
    /// True when β sits on the mobile side of this torsion, i.e. the step is
    /// a forward rotation of β; false when α is on the mobile side and the
    /// step rotates β by the inverse angle.
    pub beta_side_mobile: bool,
}

/// Torsions separating α from β, nearest-to-β first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionPath {
    pub pair: (usize, usize),
    pub steps: Vec<PathStep>,
}

impl TorsionPath {
    pub fn torsions(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.torsion).collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Path between two fragments (`from` is β's fragment, `to` α's).
pub(crate) fn fragment_path(fd: &FragmentDecomposition, from: usize, to: usize) -> Vec<PathStep> {
    let (mut a, mut b) = (from, to);
    let mut up = Vec::new();
    let mut down = Vec::new();
    while a != b {
        if fd.depth[a] >= fd.depth[b] {
            let (p, t) = fd.parent[a].expect("non-root fragment has a parent");
            up.push(PathStep { torsion: t, beta_side_mobile: true });
            a = p;
        } else {
            let (p, t) = fd.parent[b].expect("non-root fragment has a parent");
            down.push(PathStep { torsion: t, beta_side_mobile: false });
            b = p;
        }
    }
    down.reverse();
    up.extend(down);
    up
}

pub fn torsion_path(fd: &FragmentDecomposition, alpha: usize, beta: usize) -> Result<TorsionPath, MolError> {
    let n = fd.atom_count();
    for atom in [alpha, beta] {
        if atom >= n {
            return Err(MolError::AtomOutOfRange(atom));
        }
    }
    let (fa, fb) = (fd.fragment_of[alpha], fd.fragment_of[beta]);
    if fa == fb {
        return Err(MolError::SameFragment { alpha, beta });
    }
    Ok(TorsionPath { pair: (alpha, beta), steps: fragment_path(fd, fb, fa) })
}

/// Every unordered cross-fragment atom pair once, as `(α, β)` with `α < β`.
pub fn cross_fragment_pairs(fd: &FragmentDecomposition) -> Vec<(usize, usize)> {
    let n = fd.atom_count();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if fd.fragment_of[a] != fd.fragment_of[b] {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Edge betweenness centrality of every bond (Brandes, unweighted, each
/// unordered source/target pair counted once).
pub fn edge_betweenness(mol: &Molecule) -> Vec<f64> {
    let n = mol.atom_count();
    let mut score = vec![0.0; mol.bonds().len()];
    for s in 0..n {
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(w, bond) in mol.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push((v, bond));
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &(v, bond) in &preds[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                score[bond] += c;
                delta[v] += c;
            }
        }
    }
    score.iter().map(|x| x / 2.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use crate::molgraph::{Atom, Bond};

    /// Heavy-atom path C0-C1-...-C(n-1) along x.
    fn chain(n: usize) -> Molecule {
        let atoms = (0..n).map(|i| Atom::new("C", Vec3::new(1.5 * i as f64, (i % 2) as f64, 0.0))).collect();
        let bonds = (1..n).map(|i| Bond::new(i - 1, i, 1)).collect();
        Molecule::new("chain", atoms, bonds).unwrap()
    }

    fn ethane() -> Molecule {
        let mut atoms = vec![Atom::new("C", Vec3::zeros()), Atom::new("C", Vec3::new(1.54, 0.0, 0.0))];
        let mut bonds = vec![Bond::new(0, 1, 1)];
        for (c, dir) in [(0usize, -1.0), (1, 1.0)] {
            for k in 0..3 {
                let ang = k as f64 * 2.0 * std::f64::consts::PI / 3.0;
                let x = atoms[c].position.x + dir * 0.36;
                atoms.push(Atom::new("H", Vec3::new(x, ang.cos(), ang.sin())));
                bonds.push(Bond::new(c, atoms.len() - 1, 1));
            }
        }
        Molecule::new("ethane", atoms, bonds).unwrap()
    }

    fn benzene() -> Molecule {
        let atoms = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 3.0;
                Atom::new("C", Vec3::new(1.39 * a.cos(), 1.39 * a.sin(), 0.0))
            })
            .collect();
        let bonds = (0..6).map(|k| Bond::new(k, (k + 1) % 6, if k % 2 == 0 { 2 } else { 1 })).collect();
        Molecule::new("benzene", atoms, bonds).unwrap()
    }

    #[test]
    fn ring_bonds_flagged() {
        let mol = benzene();
        assert!(mol.bonds().iter().all(|b| b.in_ring));
        assert!(detect_rotatable_bonds(&mol).is_empty());
        assert!(chain(5).bonds().iter().all(|b| !b.in_ring));
    }

    #[test]
    fn ethane_has_no_rotatable_bonds() {
        assert!(detect_rotatable_bonds(&ethane()).is_empty());
    }

    #[test]
    fn butane_chain_middle_bond_only() {
        let mol = chain(4);
        let rbs = detect_rotatable_bonds(&mol);
        assert_eq!(rbs.len(), 1);
        assert_eq!(mol.bonds()[rbs[0].bond_index], Bond::new(1, 2, 1));
    }

    #[test]
    fn linear_chain_fragments() {
        for n in 4..9 {
            let mol = chain(n);
            let rbs = detect_rotatable_bonds(&mol);
            assert_eq!(rbs.len(), n - 3);
            let fd = decompose_fragments(&mol, &rbs).unwrap();
            assert_eq!(fd.fragment_count(), rbs.len() + 1);
        }
    }

    #[test]
    fn no_torsions_single_fragment() {
        let mol = benzene();
        let fd = decompose_fragments(&mol, &[]).unwrap();
        assert_eq!(fd.fragment_count(), 1);
        assert_eq!(fd.members(0).len(), 6);
        assert!(cross_fragment_pairs(&fd).is_empty());
    }

    #[test]
    fn ring_bond_cannot_be_cut() {
        let mol = benzene();
        let rb = RotatableBond { bond_index: 1, static_end: 1, mobile_end: 2, torsion_index: 0 };
        assert!(matches!(decompose_fragments(&mol, &[rb]), Err(MolError::NotABridge { .. })));
    }

    #[test]
    fn paths_on_a_chain() {
        // C0-C1 | C2 | C3-C4 with torsions on 1-2 and 2-3
        let mol = chain(5);
        let rbs = detect_rotatable_bonds(&mol);
        let fd = decompose_fragments(&mol, &rbs).unwrap();
        assert_eq!(fd.fragment_count(), 3);
        let adjacent = torsion_path(&fd, 0, 2).unwrap();
        assert_eq!(adjacent.len(), 1);
        let two = torsion_path(&fd, 0, 4).unwrap();
        assert_eq!(two.len(), 2);
        // nearest to beta (atom 4) first
        let t_near_beta = fd.torsions().iter().position(|t| mol.bonds()[t.bond_index] == Bond::new(2, 3, 1)).unwrap();
        assert_eq!(two.steps[0].torsion, t_near_beta);
        assert!(matches!(torsion_path(&fd, 3, 3), Err(MolError::SameFragment { .. })));
        assert!(matches!(torsion_path(&fd, 3, 4), Err(MolError::SameFragment { .. })));
    }

    #[test]
    fn cross_pair_counts() {
        // 3 + 4 atoms split by a single torsion
        let mol = chain(7);
        let rb = RotatableBond { bond_index: 2, static_end: 2, mobile_end: 3, torsion_index: 0 };
        let fd = decompose_fragments(&mol, &[rb]).unwrap();
        assert_eq!(fd.fragment_sizes(), vec![3, 4]);
        assert_eq!(cross_fragment_pairs(&fd).len(), 12);
        assert_eq!(fd.root(), 1);

        // three single-atom fragments
        let mol = chain(3);
        let rbs: Vec<_> = (0..2)
            .map(|i| RotatableBond { bond_index: i, static_end: i, mobile_end: i + 1, torsion_index: i })
            .collect();
        let fd = decompose_fragments(&mol, &rbs).unwrap();
        assert_eq!(cross_fragment_pairs(&fd).len(), 3);
        // equal sizes: lowest id is the root
        assert_eq!(fd.root(), 0);
    }

    #[test]
    fn betweenness_peaks_at_center() {
        let mol = chain(6);
        let eb = edge_betweenness(&mol);
        // path bond i-(i+1) separates (i+1) * (n-i-1) pairs
        for (i, v) in eb.iter().enumerate() {
            assert!((v - ((i + 1) * (6 - i - 1)) as f64).abs() < 1e-12);
        }
        let rbs = detect_rotatable_bonds(&mol);
        let best = rbs.iter().max_by(|a, b| eb[a.bond_index].total_cmp(&eb[b.bond_index])).unwrap();
        assert_eq!(mol.bonds()[best.bond_index], Bond::new(2, 3, 1));
    }
}
