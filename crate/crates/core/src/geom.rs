//! Rigid rotations about bonds, squared pair distances, the molecular volume
//! and RMSD.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::molgraph::{cross_fragment_pairs, torsion_path, FragmentDecomposition, MolError, Molecule, TorsionPath};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("rotation axis has norm {0}, expected 1")]
    NonUnitAxis(f64),
    #[error("conformations have {0} and {1} atoms")]
    LengthMismatch(usize, usize),
    #[error("expected {expected} torsion angles, got {got}")]
    AngleCount { expected: usize, got: usize },
    #[error(transparent)]
    Mol(#[from] MolError),
}

const UNIT_TOL: f64 = 1e-12;

/// Rotation by `angle` about the line through `pivot` along `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSpec {
    axis: Vec3,
    pivot: Vec3,
    angle: f64,
}

impl RotationSpec {
    pub fn new(axis: Vec3, pivot: Vec3, angle: f64) -> Result<Self, GeomError> {
        let norm = axis.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(GeomError::NonUnitAxis(norm));
        }
        Ok(Self { axis, pivot, angle })
    }

    /// Axis from `from` towards `to`, pivot at `from`.
    pub fn about_bond(from: Vec3, to: Vec3, angle: f64) -> Self {
        Self { axis: (to - from).normalize(), pivot: from, angle }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn pivot(&self) -> Vec3 {
        self.pivot
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn inverse(&self) -> Self {
        Self { angle: -self.angle, ..*self }
    }
}

/// Cross-product matrix K with `K v = axis × v`.
pub fn cross_matrix(k: &Vec3) -> Mat3 {
    Mat3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0)
}

/// `I + sin θ K + (1 - cos θ) K²`.
pub fn rodrigues_matrix(spec: &RotationSpec) -> Mat3 {
    let k = cross_matrix(&spec.axis);
    Mat3::identity() + k * spec.angle.sin() + k * k * (1.0 - spec.angle.cos())
}

pub fn apply_rotation(p: &Vec3, spec: &RotationSpec) -> Vec3 {
    rodrigues_matrix(spec) * (p - spec.pivot) + spec.pivot
}

/// Applies `specs[0]` first, then `specs[1]`, and so on.
pub fn compose_chain(p: &Vec3, specs: &[RotationSpec]) -> Vec3 {
    specs.iter().fold(*p, |q, spec| apply_rotation(&q, spec))
}

/// One torsion angle per rotatable bond, radians in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionAssignment {
    angles: Vec<f64>,
}

impl TorsionAssignment {
    /// Wraps angles into `[0, 2π)`.
    pub fn new(angles: impl IntoIterator<Item = f64>) -> Self {
        let angles = angles
            .into_iter()
            .map(|a| {
                let w = a.rem_euclid(TAU);
                if w >= TAU {
                    0.0
                } else {
                    w
                }
            })
            .collect();
        Self { angles }
    }

    pub fn zeros(m: usize) -> Self {
        Self { angles: vec![0.0; m] }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conformation {
    positions: Vec<Vec3>,
}

impl Conformation {
    pub fn new(positions: Vec<Vec3>) -> Self {
        Self { positions }
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

fn check_angles(fd: &FragmentDecomposition, theta: &TorsionAssignment) -> Result<(), GeomError> {
    if theta.len() != fd.torsion_count() {
        return Err(GeomError::AngleCount { expected: fd.torsion_count(), got: theta.len() });
    }
    Ok(())
}

/// Rotation chain that carries β into α's frame along `path`.
pub fn path_rotations(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    path: &TorsionPath,
    theta: &TorsionAssignment,
) -> Vec<RotationSpec> {
    path.steps
        .iter()
        .map(|step| {
            let t = &fd.torsions()[step.torsion];
            let from = mol.atoms()[t.static_end].position;
            let to = mol.atoms()[t.mobile_end].position;
            let angle = theta.angles()[step.torsion];
            RotationSpec::about_bond(from, to, if step.beta_side_mobile { angle } else { -angle })
        })
        .collect()
}

/// `‖r_α − R(r_β; Θ)‖²` with β carried through the torsions between them.
pub fn pair_sq_dist(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    alpha: usize,
    beta: usize,
    theta: &TorsionAssignment,
) -> Result<f64, GeomError> {
    check_angles(fd, theta)?;
    let path = torsion_path(fd, alpha, beta)?;
    let specs = path_rotations(mol, fd, &path, theta);
    let moved = compose_chain(&mol.atoms()[beta].position, &specs);
    Ok((mol.atoms()[alpha].position - moved).norm_squared())
}

/// Sum of squared distances over unordered cross-fragment pairs, each pair
/// evaluated through its own rotation chain.
pub fn molecular_volume(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    theta: &TorsionAssignment,
) -> Result<f64, GeomError> {
    check_angles(fd, theta)?;
    let mut total = 0.0;
    for (a, b) in cross_fragment_pairs(fd) {
        total += pair_sq_dist(mol, fd, a, b, theta)?;
    }
    Ok(total)
}

/// Rigid transform per fragment for the given torsions, root fragment fixed.
pub(crate) fn fragment_transforms(mol: &Molecule, fd: &FragmentDecomposition, angles: &[f64]) -> Vec<(Mat3, Vec3)> {
    let mut transforms = vec![(Mat3::identity(), Vec3::zeros()); fd.fragment_count()];
    for &f in fd.top_down() {
        if let Some((parent, t)) = fd.parent(f) {
            let torsion = &fd.torsions()[t];
            let spec = RotationSpec::about_bond(
                mol.atoms()[torsion.static_end].position,
                mol.atoms()[torsion.mobile_end].position,
                angles[t],
            );
            let r = rodrigues_matrix(&spec);
            let local_t = spec.pivot - r * spec.pivot;
            let (pr, pt) = transforms[parent];
            transforms[f] = (pr * r, pr * local_t + pt);
        }
    }
    transforms
}

/// Places every atom by rotating its fragment subtree; the root fragment stays put.
pub fn realize_conformation(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    theta: &TorsionAssignment,
) -> Result<Conformation, GeomError> {
    check_angles(fd, theta)?;
    let transforms = fragment_transforms(mol, fd, theta.angles());
    let positions = mol
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, atom)| {
            let (r, t) = transforms[fd.fragment_of(i)];
            r * atom.position + t
        })
        .collect();
    Ok(Conformation::new(positions))
}

/// Volume of an explicit conformation over the decomposition's cross pairs.
pub fn conformation_volume(fd: &FragmentDecomposition, conf: &Conformation) -> f64 {
    cross_fragment_pairs(fd).into_iter().map(|(a, b)| (conf.positions()[a] - conf.positions()[b]).norm_squared()).sum()
}

/// Root-mean-square deviation with no superposition.
pub fn rmsd(c1: &Conformation, c2: &Conformation) -> Result<f64, GeomError> {
    if c1.len() != c2.len() {
        return Err(GeomError::LengthMismatch(c1.len(), c2.len()));
    }
    if c1.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = c1.positions.iter().zip(&c2.positions).map(|(a, b)| (a - b).norm_squared()).sum();
    Ok((sum / c1.len() as f64).sqrt())
}

/// RMSD after optimal rigid superposition of `c2` onto `c1` (Kabsch).
pub fn rmsd_aligned(c1: &Conformation, c2: &Conformation) -> Result<f64, GeomError> {
    if c1.len() != c2.len() {
        return Err(GeomError::LengthMismatch(c1.len(), c2.len()));
    }
    if c1.is_empty() {
        return Ok(0.0);
    }
    let n = c1.len() as f64;
    let ca = c1.positions.iter().sum::<Vec3>() / n;
    let cb = c2.positions.iter().sum::<Vec3>() / n;
    let mut h = Mat3::zeros();
    for (a, b) in c1.positions.iter().zip(&c2.positions) {
        h += (b - cb) * (a - ca).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let mut d = Mat3::identity();
    if (v_t.transpose() * u.transpose()).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let rot = v_t.transpose() * d * u.transpose();
    let sum: f64 = c1.positions.iter().zip(&c2.positions).map(|(a, b)| (a - ca - rot * (b - cb)).norm_squared()).sum();
    Ok((sum / n).sqrt())
}

/// Fast volume evaluation for repeated queries on one molecule.
///
/// Uses per-fragment rigid transforms; [`molecular_volume`] is the pair-chain
/// route and serves as its cross-check.
#[derive(Debug, Clone)]
pub struct VolumeEvaluator {
    mol: Molecule,
    fd: FragmentDecomposition,
    pairs: Vec<(usize, usize)>,
}

impl VolumeEvaluator {
    pub fn new(mol: &Molecule, fd: &FragmentDecomposition) -> Self {
        Self { mol: mol.clone(), fd: fd.clone(), pairs: cross_fragment_pairs(fd) }
    }

    pub fn torsion_count(&self) -> usize {
        self.fd.torsion_count()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// `angles.len()` must equal the torsion count.
    pub fn volume(&self, angles: &[f64]) -> f64 {
        assert_eq!(angles.len(), self.fd.torsion_count());
        let transforms = fragment_transforms(&self.mol, &self.fd, angles);
        let placed: Vec<Vec3> = self
            .mol
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, atom)| {
                let (r, t) = transforms[self.fd.fragment_of(i)];
                r * atom.position + t
            })
            .collect();
        self.pairs.iter().map(|&(a, b)| (placed[a] - placed[b]).norm_squared()).sum()
    }
}
