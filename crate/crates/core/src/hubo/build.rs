//! Symbolic expansion of the molecular volume.
//!
//! For a fragment pair `(F_α, F_β)` the chain `g_m ∘ … ∘ g_1` carrying β into
//! α's frame is split in the middle: `V = g_h ∘ … ∘ g_1` moves β and
//! `U = g_{h+1}⁻¹ ∘ … ∘ g_m⁻¹` moves α, so `‖r_α − G r_β‖ = ‖U r_α − V r_β‖`.
//! Both are affine maps with polynomial entries, and the pair block sums in
//! closed form from per-fragment first and second moments.

use rayon::prelude::*;

use super::{Domain, HuboError, Monomial, Polynomial, VariableRegistry};
use crate::encoding::{penalty_polynomial, Encoding, TrigPolynomial};
use crate::geom::{cross_matrix, Mat3, Vec3};
use crate::molgraph::topology::fragment_path;
use crate::molgraph::{FragmentDecomposition, Molecule, PathStep};

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOptions {
    /// Evaluate fragment pairs on the rayon pool. Results are merged in a
    /// fixed order either way, so output is identical.
    pub parallel: bool,
    /// Non-constant terms below `relative_cleanup · max|c|` are dropped.
    pub relative_cleanup: f64,
    /// Overrides the encoding's one-hot penalty weight.
    pub penalty_weight: Option<f64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { parallel: true, relative_cleanup: 1e-12, penalty_weight: None }
    }
}

#[derive(Clone, Copy)]
enum Rule {
    Spin,
    OneHot(u32),
}

impl Rule {
    fn product(&self, a: &Polynomial, b: &Polynomial) -> Polynomial {
        match *self {
            Rule::Spin => a.mul_with(b, |x, y| Some(x.mul(y, Domain::Spin))),
            Rule::OneHot(d) => a.mul_with(b, |x, y| exclusive_product(x, y, d)),
        }
    }
}

/// Boolean product with `b_ik b_il = 0` for `k ≠ l`: exact whenever every
/// torsion has exactly one hot bit.
fn exclusive_product(x: &Monomial, y: &Monomial, d: u32) -> Option<Monomial> {
    let (a, b) = (x.vars(), y.vars());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] / d == b[j] / d {
            if a[i] != b[j] {
                return None;
            }
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    Some(x.mul(y, Domain::Boolean))
}

type PVec = [Polynomial; 3];
type PMat = [[Polynomial; 3]; 3];

#[derive(Clone)]
struct Affine {
    lin: PMat,
    trans: PVec,
}

struct Ctx<'a> {
    rule: Rule,
    domain: Domain,
    num_vars: usize,
    trig: &'a [TrigPolynomial],
    mol: &'a Molecule,
    fd: &'a FragmentDecomposition,
}

impl Ctx<'_> {
    fn zero(&self) -> Polynomial {
        Polynomial::zero(self.domain, self.num_vars)
    }

    fn constant(&self, c: f64) -> Polynomial {
        Polynomial::constant(self.domain, self.num_vars, c)
    }

    fn identity(&self) -> Affine {
        let lin = std::array::from_fn(|r| std::array::from_fn(|c| self.constant(if r == c { 1.0 } else { 0.0 })));
        Affine { lin, trans: std::array::from_fn(|_| self.zero()) }
    }

    /// Real matrix times polynomial vector.
    fn real_mv(&self, m: &Mat3, v: &PVec) -> PVec {
        std::array::from_fn(|r| {
            let mut out = self.zero();
            for (c, vc) in v.iter().enumerate() {
                if m[(r, c)] != 0.0 {
                    out.add_assign_unchecked(vc, m[(r, c)]);
                }
            }
            out
        })
    }

    /// `R(σθ) · v` with `R = (I + K²) + σ sin θ K − cos θ K²`.
    fn rotate(&self, torsion: usize, sigma: f64, v: &PVec) -> PVec {
        let t = &self.fd.torsions()[torsion];
        let from = self.mol.atoms()[t.static_end].position;
        let axis = (self.mol.atoms()[t.mobile_end].position - from).normalize();
        let k = cross_matrix(&axis);
        let k2 = k * k;
        let trig = &self.trig[torsion];
        let sv: PVec = std::array::from_fn(|i| self.rule.product(&trig.sin_poly, &v[i]));
        let cv: PVec = std::array::from_fn(|i| self.rule.product(&trig.cos_poly, &v[i]));
        let a = self.real_mv(&(Mat3::identity() + k2), v);
        let b = self.real_mv(&(k * sigma), &sv);
        let c = self.real_mv(&(-k2), &cv);
        std::array::from_fn(|i| {
            let mut out = a[i].clone();
            out.add_assign_unchecked(&b[i], 1.0);
            out.add_assign_unchecked(&c[i], 1.0);
            out
        })
    }

    /// `g ∘ A` for the rotation `g(p) = R(p − c) + c`.
    fn compose(&self, step: &PathStep, inverse: bool, a: &Affine) -> Affine {
        let t = &self.fd.torsions()[step.torsion];
        let pivot = self.mol.atoms()[t.static_end].position;
        let mut sigma = if step.beta_side_mobile { 1.0 } else { -1.0 };
        if inverse {
            sigma = -sigma;
        }
        let cols: [PVec; 3] = std::array::from_fn(|c| {
            let col: PVec = std::array::from_fn(|r| a.lin[r][c].clone());
            self.rotate(step.torsion, sigma, &col)
        });
        let lin = std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r].clone()));
        let mut shifted = a.trans.clone();
        for (i, s) in shifted.iter_mut().enumerate() {
            s.add_term(Monomial::one(), -pivot[i]);
        }
        let mut trans = self.rotate(step.torsion, sigma, &shifted);
        for (i, s) in trans.iter_mut().enumerate() {
            s.add_term(Monomial::one(), pivot[i]);
        }
        Affine { lin, trans }
    }

    fn dot(&self, a: &PVec, b: &PVec) -> Polynomial {
        let mut out = self.zero();
        for i in 0..3 {
            out.add_assign_unchecked(&self.rule.product(&a[i], &b[i]), 1.0);
        }
        out
    }

    fn moments(&self, fragment: usize) -> (f64, Vec3, f64) {
        let members = self.fd.members(fragment);
        let mut s1 = Vec3::zeros();
        let mut s2 = 0.0;
        for &a in members {
            let p = self.mol.atoms()[a].position;
            s1 += p;
            s2 += p.norm_squared();
        }
        (members.len() as f64, s1, s2)
    }

    /// `Σ_{α∈F_α, β∈F_β} ‖r_α − G r_β‖²`.
    fn pair_block(&self, fa: usize, fb: usize) -> Polynomial {
        let steps = fragment_path(self.fd, fb, fa);
        let h = steps.len().div_ceil(2);
        let mut v = self.identity();
        for step in &steps[..h] {
            v = self.compose(step, false, &v);
        }
        let mut u = self.identity();
        for step in steps[h..].iter().rev() {
            u = self.compose(step, true, &u);
        }
        let (na, s1a, s2a) = self.moments(fa);
        let (nb, s1b, s2b) = self.moments(fb);
        let mv = |a: &Affine, s1: &Vec3| -> PVec {
            std::array::from_fn(|r| {
                let mut out = self.zero();
                for c in 0..3 {
                    if s1[c] != 0.0 {
                        out.add_assign_unchecked(&a.lin[r][c], s1[c]);
                    }
                }
                out
            })
        };
        let lu = mv(&u, &s1a);
        let lv = mv(&v, &s1b);
        let sum_u: PVec = std::array::from_fn(|i| {
            let mut p = lu[i].clone();
            p.add_assign_unchecked(&u.trans[i], na);
            p
        });
        let sum_v: PVec = std::array::from_fn(|i| {
            let mut p = lv[i].clone();
            p.add_assign_unchecked(&v.trans[i], nb);
            p
        });
        // Σ‖U r_α‖² = Σ‖r_α‖² + 2 t_U·(L_U Σr_α) + n_α‖t_U‖², using L_Uᵀ L_U = I.
        let mut out = self.constant(nb * s2a + na * s2b);
        out.add_assign_unchecked(&self.dot(&u.trans, &lu), 2.0 * nb);
        out.add_assign_unchecked(&self.dot(&u.trans, &u.trans), na * nb);
        out.add_assign_unchecked(&self.dot(&v.trans, &lv), 2.0 * na);
        out.add_assign_unchecked(&self.dot(&v.trans, &v.trans), na * nb);
        out.add_assign_unchecked(&self.dot(&sum_u, &sum_v), -2.0);
        out
    }
}

/// Volume `D` as a polynomial over the registry's variables (no sign flip, no
/// penalty).
pub fn volume_polynomial(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    encoding: &Encoding,
    registry: &VariableRegistry,
    opts: &BuildOptions,
) -> Result<Polynomial, HuboError> {
    let m = fd.torsion_count();
    if m == 0 {
        return Err(HuboError::NoTorsions);
    }
    if registry.torsions != m {
        return Err(HuboError::RegistryMismatch { registry: registry.torsions, fragments: m });
    }
    if registry.encoding != encoding.kind() || registry.bits_per_torsion != encoding.bits_per_torsion() {
        return Err(HuboError::EncodingMismatch(registry.encoding, encoding.kind()));
    }
    let num_vars = registry.num_vars();
    let bits = registry.bits_per_torsion;
    let local = encoding.trig_polys();
    let trig: Vec<TrigPolynomial> = (0..m).map(|i| local.relabel(num_vars, (i * bits) as u32)).collect();
    let rule = match encoding {
        Encoding::Phase(_) => Rule::Spin,
        Encoding::OneHot(_) => Rule::OneHot(bits as u32),
    };
    let ctx = Ctx { rule, domain: registry.domain(), num_vars, trig: &trig, mol, fd };

    let nf = fd.fragment_count();
    let pairs: Vec<(usize, usize)> = (0..nf).flat_map(|a| (a + 1..nf).map(move |b| (a, b))).collect();
    let blocks: Vec<Polynomial> = if opts.parallel {
        pairs.par_iter().map(|&(a, b)| ctx.pair_block(a, b)).collect()
    } else {
        pairs.iter().map(|&(a, b)| ctx.pair_block(a, b)).collect()
    };
    let mut total = ctx.zero();
    for b in &blocks {
        total.add_assign_unchecked(b, 1.0);
    }
    if opts.relative_cleanup > 0.0 {
        total.cleanup_relative(opts.relative_cleanup);
    }
    Ok(total)
}

/// Minimization objective `−D`, plus the constraint penalty for one-hot.
pub fn build_objective(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    encoding: &Encoding,
    registry: &VariableRegistry,
) -> Result<Polynomial, HuboError> {
    build_objective_with(mol, fd, encoding, registry, &BuildOptions::default())
}

pub fn build_objective_with(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    encoding: &Encoding,
    registry: &VariableRegistry,
    opts: &BuildOptions,
) -> Result<Polynomial, HuboError> {
    let objective = volume_polynomial(mol, fd, encoding, registry, opts)?.scale(-1.0);
    match encoding {
        Encoding::Phase(_) => Ok(objective),
        Encoding::OneHot(code) => {
            let weight =
                opts.penalty_weight.or(code.penalty_weight).unwrap_or_else(|| default_penalty_weight(&objective));
            let penalty = penalty_polynomial(code.d, registry.torsions, weight)?;
            let mut out = objective;
            out.add_assign_unchecked(&penalty, 1.0);
            Ok(out)
        }
    }
}

/// Twice the largest absolute coefficient, constant included.
pub fn default_penalty_weight(unpenalized: &Polynomial) -> f64 {
    2.0 * unpenalized.max_abs_coefficient().max(f64::MIN_POSITIVE)
}
