//! Kernel averages `M`, `N`, `M~` and the exact identities they satisfy.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::rational::{self, Rational};
use crate::semigroup::{KernelStructure, Semigroup};
use crate::tensor::{mat_of, vec_of, TensorVec2};
use crate::transform::Transformation;
use crate::walk::{kernel_average, omega_from_measure, LimitMeasure, Walk};
use crate::zeon::{self, hat, ZeonVec2};

/// One named exact check with the first failing coordinate on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: None,
        }
    }

    pub fn failing(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: false,
            detail: Some(detail.into()),
        }
    }

    pub fn matrices(name: impl Into<String>, lhs: &RationalMatrix, rhs: &RationalMatrix) -> Self {
        let name = name.into();
        if lhs.shape() != rhs.shape() {
            return Self::failing(name, format!("shapes {:?} vs {:?}", lhs.shape(), rhs.shape()));
        }
        match lhs.first_difference(rhs) {
            None => Self::flag(name, true),
            Some((i, j)) => Self::failing(
                name,
                format!("entry ({}, {}): {} vs {}", i + 1, j + 1, lhs[(i, j)], rhs[(i, j)]),
            ),
        }
    }

    pub fn vectors(name: impl Into<String>, lhs: &[Rational], rhs: &[Rational]) -> Self {
        let name = name.into();
        if lhs.len() != rhs.len() {
            return Self::failing(name, format!("lengths {} vs {}", lhs.len(), rhs.len()));
        }
        match lhs.iter().zip(rhs).position(|(a, b)| a != b) {
            None => Self::flag(name, true),
            Some(i) => Self::failing(name, format!("entry {}: {} vs {}", i + 1, lhs[i], rhs[i])),
        }
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: true,
            detail: Some(format!("skipped: {}", why.into())),
        }
    }
}

/// A list of checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSet {
    pub n: usize,
    pub r: usize,
    #[serde(rename = "Omega")]
    pub omega_limit: RationalMatrix,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub pi: Vec<Rational>,
    pub omega: RationalMatrix,
    #[serde(rename = "M")]
    pub m: RationalMatrix,
    #[serde(rename = "N")]
    pub n_op: RationalMatrix,
    #[serde(rename = "Mtilde")]
    pub m_tilde: RationalMatrix,
    #[serde(rename = "M0")]
    pub m0: RationalMatrix,
    #[serde(rename = "N0")]
    pub n0: RationalMatrix,
    #[serde(rename = "Mtilde0")]
    pub m_tilde0: RationalMatrix,
    #[serde(serialize_with = "rational::serialize")]
    pub tau: Rational,
}

fn mismatch(what: &str, lhs: &RationalMatrix, rhs: &RationalMatrix) -> Result<()> {
    let c = Check::matrices(what, lhs, rhs);
    if c.passed {
        Ok(())
    } else {
        Err(Error::CrossCheckMismatch {
            what: what.to_string(),
            detail: c.detail.unwrap_or_default(),
        })
    }
}

/// Builds the operators from `lambda` and cross-checks them against the
/// tensor limit `Omega_(x)2` and the zeon limit `Omega_2`.
pub fn build_observables(
    ks: &KernelStructure,
    lm: &LimitMeasure,
    omega_tensor2: &RationalMatrix,
    omega_zeon2: &RationalMatrix,
) -> Result<ObservableSet> {
    let n = ks.n();
    let r = ks.rank();
    let omega_limit = omega_from_measure(lm, ks);
    let u = vec![Rational::one(); n];
    let pi: Vec<Rational> = omega_limit
        .left_apply(&u)
        .into_iter()
        .map(|x| x / rational::int(n as i64))
        .collect();
    let omega = RationalMatrix::diag(&pi);
    let j = RationalMatrix::ones(n, n);

    let m = kernel_average(lm, ks, |k| {
        let km = k.matrix();
        &(&km.transpose() * &j) * &km
    });
    let n_op = kernel_average(lm, ks, |k| {
        let km = k.matrix();
        &km * &km.transpose()
    });
    let m_tilde = kernel_average(lm, ks, |k| {
        let km = k.matrix();
        &(&km.transpose() * &omega_limit) * &km
    });

    let ones2 = TensorVec2::new(n, vec![Rational::one(); n * n])?;
    mismatch(
        "M via tensor level two",
        &m,
        &mat_of(&ones2.times(omega_tensor2)?),
    )?;
    let id_vec = vec_of(&RationalMatrix::identity(n))?;
    mismatch(
        "N via tensor level two",
        &n_op,
        &mat_of(&id_vec.applied_by(omega_tensor2)?),
    )?;
    let omega_vec = vec_of(&omega_limit)?;
    mismatch(
        "Mtilde via tensor level two",
        &m_tilde,
        &mat_of(&omega_vec.times(omega_tensor2)?),
    )?;

    let tau = m.trace();
    let m0 = &m - &omega.scale(&tau);
    let n0 = &j - &n_op;
    let m_tilde0 = &m_tilde - &RationalMatrix::diag(&m_tilde.diagonal());

    let size = omega_zeon2.rows();
    let zeon_ones = ZeonVec2::new(n, vec![Rational::one(); size])?;
    let u2 = zeon_ones.applied_by(omega_zeon2);
    let pi2 = zeon_ones.times(omega_zeon2);
    mismatch("N via zeon level two", &n_op, &(&j - &hat(&u2)))?;
    mismatch("M via zeon level two", &m, &(&hat(&pi2) + &omega.scale(&tau)))?;

    Ok(ObservableSet {
        n,
        r,
        omega_limit,
        pi,
        omega,
        m,
        n_op,
        m_tilde,
        m0,
        n0,
        m_tilde0,
        tau,
    })
}

/// `N0 = J - N`: entry `(i, j)` is the probability that `i` and `j` lie in
/// different blocks of the kernel partition.
pub fn split_probability(obs: &ObservableSet) -> RationalMatrix {
    obs.n0.clone()
}

fn int(v: usize) -> Rational {
    rational::int(v as i64)
}

fn is_symmetric_zero_diag_nonneg(m: &RationalMatrix) -> bool {
    m.is_symmetric() && m.is_nonnegative() && m.diagonal().iter().all(Zero::is_zero)
}

/// Whether `Omega` has the form `u* pi`, i.e. the averaged walk has a
/// unique stationary distribution.
pub fn has_unique_stationary(obs: &ObservableSet) -> bool {
    obs.omega_limit.trace().is_one()
}

/// `diag M~` at `c` is `<|K^-1(c)| rho~(c)> / r`; with all blocks of size
/// `n/r` this is `(n/r) pi`.
pub fn m_tilde_diagonal(ks: &KernelStructure, lm: &LimitMeasure) -> Vec<Rational> {
    let n = ks.n();
    let r = int(ks.rank());
    let mut d = vec![Rational::zero(); n];
    for (k, p) in ks.elements().iter().zip(&lm.lambda) {
        if p.is_zero() {
            continue;
        }
        let sizes = k.push_forward(&vec![Rational::one(); n]);
        for (c, s) in sizes.into_iter().enumerate() {
            d[c] += p * s / &r;
        }
    }
    d
}

/// Structural properties of the operators themselves.
pub fn operator_properties(obs: &ObservableSet, ks: &KernelStructure, lm: &LimitMeasure) -> Report {
    let mut rep = Report::default();
    let n = obs.n;
    let ones = vec![Rational::one(); n];
    let tau_pi: Vec<Rational> = obs.pi.iter().map(|p| p * &obs.tau).collect();
    rep.push(Check::vectors("diag N = u", &obs.n_op.diagonal(), &ones));
    rep.push(Check::vectors("diag M = tau pi", &obs.m.diagonal(), &tau_pi));
    rep.push(Check::vectors(
        "diag Mtilde = <block size> / r",
        &obs.m_tilde.diagonal(),
        &m_tilde_diagonal(ks, lm),
    ));
    let unit = obs
        .n_op
        .entries()
        .iter()
        .all(|x| *x >= Rational::zero() && *x <= Rational::one());
    rep.push(Check::flag(
        "N symmetric with entries in [0, 1]",
        obs.n_op.is_symmetric() && unit,
    ));
    rep.push(Check::flag(
        "N0 nonnegative symmetric zero-diagonal",
        is_symmetric_zero_diag_nonneg(&obs.n0),
    ));
    rep.push(Check::flag(
        "M0 nonnegative symmetric zero-diagonal",
        is_symmetric_zero_diag_nonneg(&obs.m0),
    ));
    rep.push(Check::flag(
        "Mtilde0 nonnegative symmetric zero-diagonal",
        is_symmetric_zero_diag_nonneg(&obs.m_tilde0),
    ));
    rep
}

/// The six level-two relations between `Omega_(x)2` and the named vectors.
pub fn level2_relation_table(
    obs: &ObservableSet,
    ks: &KernelStructure,
    lm: &LimitMeasure,
    omega_tensor2: &RationalMatrix,
) -> Result<Report> {
    let n = obs.n;
    let r = obs.r;
    let mut rep = Report::default();
    let j = RationalMatrix::ones(n, n);
    let omega_vec = vec_of(&obs.omega_limit)?;
    let i_vec = vec_of(&RationalMatrix::identity(n))?;
    let j_vec = vec_of(&j)?;

    let rho_outer = kernel_average(lm, ks, |k| {
        let rho = RationalMatrix::row_vector(k.range_state_vector());
        &rho.transpose() * &rho
    })
    .scale(&(int(n) / int(r * r)));
    let lhs = mat_of(&omega_vec.times(omega_tensor2)?);
    rep.push(Check::matrices(
        "Mat(Omega_vec Omega2) = Mtilde",
        &lhs,
        &obs.m_tilde,
    ));
    rep.push(Check::matrices(
        "Mtilde = (n/r^2) <rho~* rho~>",
        &obs.m_tilde,
        &rho_outer,
    ));

    let lhs = mat_of(&omega_vec.applied_by(omega_tensor2)?);
    let oo = &obs.omega_limit * &obs.omega_limit.transpose();
    if has_unique_stationary(obs) {
        rep.push(Check::matrices("Mat(Omega2 Omega_vec) = Omega Omega*", &lhs, &oo));
        let p2: Rational = obs.pi.iter().map(|p| p * p).sum();
        rep.push(Check::matrices(
            "Omega Omega* = (sum pi_i^2) J",
            &oo,
            &j.scale(&p2),
        ));
    } else {
        rep.push(Check::skipped(
            "Mat(Omega2 Omega_vec) = Omega Omega*",
            "Omega has rank above one",
        ));
    }

    let k_star_k = kernel_average(lm, ks, |k| {
        let km = k.matrix();
        &km.transpose() * &km
    });
    rep.push(Check::matrices(
        "Mat(I_vec Omega2) = <K*K>",
        &mat_of(&i_vec.times(omega_tensor2)?),
        &k_star_k,
    ));
    rep.push(Check::matrices(
        "<K*K> = n omega",
        &k_star_k,
        &obs.omega.scale(&int(n)),
    ));
    rep.push(Check::matrices(
        "Mat(Omega2 I_vec) = N",
        &mat_of(&i_vec.applied_by(omega_tensor2)?),
        &obs.n_op,
    ));
    rep.push(Check::matrices(
        "Mat(J_vec Omega2) = M",
        &mat_of(&j_vec.times(omega_tensor2)?),
        &obs.m,
    ));
    rep.push(Check::matrices(
        "Mat(Omega2 J_vec) = J",
        &mat_of(&j_vec.applied_by(omega_tensor2)?),
        &j,
    ));
    Ok(rep)
}

/// Column projections `P_j`, row projections `Q_i` and the average
/// idempotent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionSet {
    pub columns: Vec<RationalMatrix>,
    pub rows: Vec<RationalMatrix>,
    pub average_idempotent: RationalMatrix,
}

pub fn projections(
    ks: &KernelStructure,
    obs: &ObservableSet,
    lm: &LimitMeasure,
) -> Result<(ProjectionSet, Report)> {
    let n = obs.n;
    let r = int(obs.r);
    let mut rep = Report::default();
    let grid: Vec<Vec<RationalMatrix>> = ks
        .idempotent_grid()
        .iter()
        .map(|row| row.iter().map(Transformation::matrix).collect())
        .collect();
    let zero = RationalMatrix::zeros(n, n);
    let columns: Vec<RationalMatrix> = (0..ks.col_count())
        .map(|c| (0..ks.row_count()).fold(zero.clone(), |acc, i| &acc + &grid[i][c].scale(&lm.alpha[i])))
        .collect();
    let rows: Vec<RationalMatrix> = (0..ks.row_count())
        .map(|i| (0..ks.col_count()).fold(zero.clone(), |acc, c| &acc + &grid[i][c].scale(&lm.beta[c])))
        .collect();
    let average_idempotent = rows
        .iter()
        .zip(&lm.alpha)
        .fold(zero.clone(), |acc, (q, a)| &acc + &q.scale(a));
    let u = vec![Rational::one(); n];

    for (c, p) in columns.iter().enumerate() {
        let range = &ks.ranges()[c];
        let rho = range.diag(n);
        let rho_row = range.state_vector(n);
        let tag = c + 1;
        rep.push(Check::matrices(
            format!("P_{tag} = N rho_{tag}"),
            p,
            &(&obs.n_op * &rho),
        ));
        rep.push(Check::matrices(format!("P_{tag}^2 = P_{tag}"), &(p * p), p));
        let expect: Vec<Rational> = rho_row.iter().map(|x| x / &r).collect();
        rep.push(Check::vectors(
            format!("pi P_{tag} = rho~_{tag} / r"),
            &p.left_apply(&obs.pi),
            &expect,
        ));
    }
    for (i, q) in rows.iter().enumerate() {
        let e = &grid[i][0];
        let tag = i + 1;
        let expect = (&(e * &e.transpose()) * &obs.omega).scale(&r);
        rep.push(Check::matrices(format!("Q_{tag} = r e e* omega"), q, &expect));
        rep.push(Check::matrices(format!("Q_{tag}^2 = Q_{tag}"), &(q * q), q));
        rep.push(Check::matrices(
            format!("Q_{tag} Omega = Omega Q_{tag}"),
            &(q * &obs.omega_limit),
            &(&obs.omega_limit * q),
        ));
        rep.push(Check::vectors(
            format!("pi Q_{tag} = pi"),
            &q.left_apply(&obs.pi),
            &obs.pi,
        ));
        rep.push(Check::vectors(format!("Q_{tag} u* = u*"), &q.right_apply(&u), &u));
    }
    rep.push(Check::matrices(
        "<E> = r N omega",
        &average_idempotent,
        &(&obs.n_op * &obs.omega).scale(&r),
    ));
    Ok((
        ProjectionSet {
            columns,
            rows,
            average_idempotent,
        },
        rep,
    ))
}

/// Deterministic sample of at most `limit` semigroup elements, evenly
/// spaced through the canonical element order.
pub fn sample_words(s: &Semigroup, limit: usize) -> Vec<Transformation> {
    let len = s.len();
    if len <= limit {
        return s.elements().to_vec();
    }
    (0..limit)
        .map(|i| s.elements()[i * len / limit].clone())
        .collect()
}

/// Equipartition: every kernel element pushes `pi` to the uniform
/// distribution on its range, so each partition block has mass `1/r`.
pub fn friedman_check(
    ks: &KernelStructure,
    obs: &ObservableSet,
    walk: &Walk,
    words: &[Transformation],
) -> Report {
    let mut rep = Report::default();
    let n = obs.n;
    let r = int(obs.r);
    let u_over_r = vec![Rational::one() / &r; n];
    let delta = zeon::delta(walk).ok();

    let mut range_fail = None;
    let mut mass_fail = None;
    let mut generator_fail = None;
    let mut delta_fail = None;
    let mut word_fail = None;
    for k in ks.elements() {
        let pk = k.push_forward(&obs.pi);
        let expect: Vec<Rational> = k.range_state_vector().iter().map(|x| x / &r).collect();
        if range_fail.is_none() && pk != expect {
            range_fail = Some(format!("{k}"));
        }
        if mass_fail.is_none() && k.matrix().right_apply(&pk) != u_over_r {
            mass_fail = Some(format!("{k}"));
        }
        for c in walk.colors() {
            if generator_fail.is_none() && c.then(k).push_forward(&obs.pi) != pk {
                generator_fail = Some(format!("{c} {k}"));
            }
        }
        if let Some(d) = &delta {
            let pd = d.left_apply(&obs.pi);
            if delta_fail.is_none() && k.matrix().left_apply(&pd).iter().any(|x| !x.is_zero()) {
                delta_fail = Some(format!("{k}"));
            }
        }
        for w in words {
            if word_fail.is_none() && w.then(k).push_forward(&obs.pi) != pk {
                word_fail = Some(format!("{w} {k}"));
            }
        }
    }
    let record = |rep: &mut Report, name: &str, fail: Option<String>| {
        rep.push(match fail {
            None => Check::flag(name, true),
            Some(d) => Check::failing(name, format!("first failure at {d}")),
        });
    };
    record(&mut rep, "pi k = rho~(k) / r for all k", range_fail);
    record(&mut rep, "pi k k* = u / r for all k", mass_fail);
    record(&mut rep, "pi C_i k = pi k for all k", generator_fail);
    if delta.is_some() {
        record(&mut rep, "pi Delta k = 0 for all k", delta_fail);
    } else {
        rep.push(Check::skipped(
            "pi Delta k = 0 for all k",
            "Delta needs two equally weighted colors",
        ));
    }
    record(&mut rep, "pi w k = pi k for sampled w", word_fail);

    let mut n_fail = None;
    for w in words {
        let v = obs.n_op.left_apply(&w.push_forward(&obs.pi));
        if v != u_over_r {
            n_fail = Some(format!("{w}"));
            break;
        }
    }
    record(&mut rep, "pi w N = u / r for sampled w", n_fail);

    let mut block_fail = None;
    'outer: for p in ks.partitions() {
        for b in p.blocks() {
            let mass: Rational = b.iter().map(|&i| &obs.pi[i]).sum();
            if mass != Rational::one() / &r {
                block_fail = Some(format!("{p}"));
                break 'outer;
            }
        }
    }
    record(&mut rep, "each partition block has pi-mass 1/r", block_fail);
    rep
}

/// Algebraic identities among `Omega`, `M`, `N`, `M~` and `J`.
pub fn identity_suite(obs: &ObservableSet, ks: &KernelStructure, walk: &Walk) -> Report {
    let mut rep = Report::default();
    let n = int(obs.n);
    let r = int(obs.r);
    let nn = obs.n;
    let j = RationalMatrix::ones(nn, nn);
    let om = &obs.omega_limit;
    if !has_unique_stationary(obs) {
        rep.push(Check::skipped("identity suite", "Omega has rank above one"));
        return rep;
    }
    let n_m = &obs.n_op * &obs.m;
    let n2_over_r = &n * &n / &r;
    rep.push(Check::matrices(
        "Omega N = J / r",
        &(om * &obs.n_op),
        &j.scale(&(Rational::one() / &r)),
    ));
    rep.push(Check::matrices(
        "M Omega = n Omega* Omega",
        &(&obs.m * om),
        &(&om.transpose() * om).scale(&n),
    ));
    rep.push(Check::matrices(
        "N M Omega = (n^2/r) Omega",
        &(&n_m * om),
        &om.scale(&n2_over_r),
    ));
    rep.push(Check::matrices(
        "Omega N M = (n^2/r) Omega",
        &(om * &n_m),
        &om.scale(&n2_over_r),
    ));
    rep.push(Check::matrices(
        "J M = n^2 Omega",
        &(&j * &obs.m),
        &om.scale(&(&n * &n)),
    ));
    rep.push(Check::matrices(
        "N Mtilde = (n/r) Omega",
        &(&obs.n_op * &obs.m_tilde),
        &om.scale(&(&n / &r)),
    ));

    if walk.average_matrix().is_doubly_stochastic() {
        let target = j.scale(&(&n / &r));
        rep.push(Check::matrices("M N = (n/r) J", &(&obs.m * &obs.n_op), &target));
        rep.push(Check::matrices("N M = (n/r) J", &n_m, &target));
        rep.push(Check::matrices("M J = J M", &(&obs.m * &j), &(&j * &obs.m)));
        rep.push(Check::matrices("N J = J N", &(&obs.n_op * &j), &(&j * &obs.n_op)));
    }

    let mut avg_fail = None;
    'cells: for row in 0..ks.row_count() {
        for col in 0..ks.col_count() {
            let cell = ks.cell(row, col);
            let sum = cell.iter().fold(RationalMatrix::zeros(nn, nn), |acc, &i| {
                &acc + &ks.elements()[i].matrix()
            });
            let avg = sum.scale(&(Rational::one() / int(cell.len())));
            let rho = ks.ranges()[col].state_vector(nn);
            let expect = RationalMatrix::from_fn(nn, nn, |_, b| &rho[b] / &r);
            if avg != expect {
                avg_fail = Some(format!("cell ({}, {})", row + 1, col + 1));
                break 'cells;
            }
        }
    }
    rep.push(match avg_fail {
        None => Check::flag("local group average = u* rho~_j / r", true),
        Some(d) => Check::failing("local group average = u* rho~_j / r", d),
    });
    rep
}

/// `F(N) = N`, `F(N0) = N0`, `G(M) = M`, `G(M0) = M0`, `G(Mtilde0) = Mtilde0`
/// for two equally weighted colors.
pub fn two_color_fixed_points(obs: &ObservableSet, walk: &Walk) -> Report {
    let mut rep = Report::default();
    let pairs: [(&str, &RationalMatrix, bool); 5] = [
        ("F(N) = N", &obs.n_op, true),
        ("F(N0) = N0", &obs.n0, true),
        ("G(M) = M", &obs.m, false),
        ("G(M0) = M0", &obs.m0, false),
        ("G(Mtilde0) = Mtilde0", &obs.m_tilde0, false),
    ];
    for (name, y, is_f) in pairs {
        let image = if is_f {
            zeon::f_map(walk, y)
        } else {
            zeon::g_map(walk, y)
        };
        rep.push(match image {
            Ok(img) => Check::matrices(name, &img, y),
            Err(e) => Check::skipped(name, e.to_string()),
        });
    }
    rep
}

/// `M~0` is a multiple of `M0` when the zeon level-two limit has trace one.
pub fn proportionality_check(obs: &ObservableSet, omega_zeon2: &RationalMatrix) -> Check {
    let name = "Mtilde0 proportional to M0";
    if !omega_zeon2.trace().is_one() {
        return Check::skipped(name, "Omega_2 has trace other than one");
    }
    match zeon::proportional(obs.m_tilde0.entries(), obs.m0.entries()) {
        Some(_) => Check::flag(name, true),
        None if obs.m0.is_zero() => Check::flag(name, obs.m_tilde0.is_zero()),
        None => Check::failing(name, "no scalar multiple"),
    }
}

/// Characteristic polynomials of `M` and `N`, constant term first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacteristicPolynomials {
    #[serde(rename = "M", serialize_with = "rational::serialize_vec")]
    pub m: Vec<Rational>,
    #[serde(rename = "N", serialize_with = "rational::serialize_vec")]
    pub n: Vec<Rational>,
}

pub fn characteristic_polynomials(obs: &ObservableSet) -> Result<CharacteristicPolynomials> {
    Ok(CharacteristicPolynomials {
        m: obs.m.characteristic_polynomial()?,
        n: obs.n_op.characteristic_polynomial()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::tensor::omega_tensor;
    use crate::walk::walk_limit;
    use crate::zeon::omega_level;

    fn t(s: &str) -> Transformation {
        s.parse().unwrap()
    }

    struct Built {
        walk: Walk,
        s: Semigroup,
        ks: KernelStructure,
        lm: LimitMeasure,
        o2: RationalMatrix,
        z2: RationalMatrix,
        obs: ObservableSet,
    }

    fn build(colors: &[&str]) -> Built {
        let walk = Walk::uniform(colors.iter().map(|c| t(c)).collect()).unwrap();
        let s = walk.semigroup().unwrap();
        let ks = KernelStructure::from_semigroup(&s).unwrap();
        let lm = walk_limit(&s, &walk, &ks).unwrap();
        let o2 = omega_tensor(&walk, 2).unwrap().matrix;
        let z2 = omega_level(&walk, 2).unwrap().matrix;
        let obs = build_observables(&ks, &lm, &o2, &z2).unwrap();
        Built {
            walk,
            s,
            ks,
            lm,
            o2,
            z2,
            obs,
        }
    }

    fn assert_passes(rep: &Report) {
        let fails: Vec<_> = rep.failures().collect();
        assert!(fails.is_empty(), "{fails:#?}");
    }

    #[test]
    fn six_point_operators() {
        let b = build(&["[451314]", "[245631]"]);
        assert_eq!(b.obs.tau, int(12));
        assert_eq!(b.obs.n_op[(0, 1)], ratio(1, 3));
        assert_eq!(b.obs.n_op[(2, 4)], int(1));
        assert_eq!(split_probability(&b.obs)[(0, 1)], ratio(2, 3));
        assert_eq!(
            b.obs.pi,
            vec![
                ratio(2, 9),
                ratio(1, 9),
                ratio(5, 27),
                ratio(2, 9),
                ratio(4, 27),
                ratio(1, 9)
            ]
        );
        assert_passes(&operator_properties(&b.obs, &b.ks, &b.lm));
        // Blocks all have size n/r = 2.
        let two_pi: Vec<Rational> = b.obs.pi.iter().map(|p| p * int(2)).collect();
        assert_eq!(b.obs.m_tilde.diagonal(), two_pi);
    }

    #[test]
    fn tau_is_average_squared_block_size() {
        let b = build(&["[451314]", "[245631]"]);
        let expected: Rational =
            b.ks.partitions()
                .iter()
                .zip(&b.lm.alpha)
                .map(|(p, a)| a * int(p.sum_of_squared_block_sizes()))
                .sum();
        assert_eq!(b.obs.tau, expected);
    }

    #[test]
    fn six_point_suites() {
        let b = build(&["[451314]", "[245631]"]);
        assert_passes(&level2_relation_table(&b.obs, &b.ks, &b.lm, &b.o2).unwrap());
        let (proj, rep) = projections(&b.ks, &b.obs, &b.lm).unwrap();
        assert_passes(&rep);
        assert_eq!((proj.columns.len(), proj.rows.len()), (4, 2));
        let words = sample_words(&b.s, 40);
        assert_passes(&friedman_check(&b.ks, &b.obs, &b.walk, &words));
        assert_passes(&identity_suite(&b.obs, &b.ks, &b.walk));
        assert_passes(&two_color_fixed_points(&b.obs, &b.walk));
        assert!(proportionality_check(&b.obs, &b.z2).passed);
    }

    #[test]
    fn four_vertex_example_blocks() {
        let b = build(&["[4312]", "[3443]"]);
        assert_eq!(b.obs.pi, vec![ratio(1, 6), ratio(1, 6), ratio(1, 3), ratio(1, 3)]);
        assert_passes(&friedman_check(&b.ks, &b.obs, &b.walk, b.s.elements()));
        assert_passes(&identity_suite(&b.obs, &b.ks, &b.walk));
    }

    #[test]
    fn doubly_stochastic_algebra() {
        let b = build(&["[2341]", "[2143]"]);
        let rep = identity_suite(&b.obs, &b.ks, &b.walk);
        assert!(rep.checks.iter().any(|c| c.name == "M N = (n/r) J"));
        assert_passes(&rep);
    }

    #[test]
    fn identity_kernel_operators() {
        let b = build(&["[2345671]"]);
        let n = 7;
        assert_eq!(b.obs.n_op, RationalMatrix::identity(n));
        assert_eq!(b.obs.m, RationalMatrix::ones(n, n));
        assert_eq!(b.obs.tau, int(n));
        assert!(b.obs.pi.iter().all(|p| *p == ratio(1, 7)));
        assert_passes(&identity_suite(&b.obs, &b.ks, &b.walk));
        assert_passes(&level2_relation_table(&b.obs, &b.ks, &b.lm, &b.o2).unwrap());
    }

    #[test]
    fn single_idempotent_projections() {
        let b = build(&["[1133]"]);
        let (proj, rep) = projections(&b.ks, &b.obs, &b.lm).unwrap();
        assert_passes(&rep);
        assert_eq!(proj.columns, vec![t("[1133]").matrix()]);
        assert_eq!(proj.rows, vec![t("[1133]").matrix()]);
    }

    #[test]
    fn check_reports_first_difference() {
        let a = RationalMatrix::identity(2);
        let c = Check::matrices("x", &a, &RationalMatrix::ones(2, 2));
        assert!(!c.passed);
        assert_eq!(c.detail.unwrap(), "entry (1, 2): 0 vs 1");
    }

    #[test]
    fn characteristic_polynomial_of_identity_n() {
        let b = build(&["[2345671]"]);
        let cp = characteristic_polynomials(&b.obs).unwrap();
        // det(xI - I) = (x - 1)^7
        assert_eq!(cp.n[0], rational::int(-1));
        assert_eq!(cp.n[7], int(1));
    }
}
