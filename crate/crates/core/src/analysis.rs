//! The full pipeline from a specification to a deterministic report.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{abel_limit, RationalMatrix, SpectralProjection};
use crate::observables::{self, CharacteristicPolynomials, Check, ObservableSet, ProjectionSet, Report};
use crate::problem::{ProblemSpec, Validation};
use crate::rational::{self, Rational};
use crate::semigroup::{KernelStructure, Semigroup};
use crate::tensor::{self, Fields2, LevelMatrix};
use crate::walk::{self, LimitMeasure, Walk};
use crate::zeon::{self, MarginalDescent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Overrides the specification's zeon level cap.
    pub level_cap: Option<usize>,
    /// Highest tensor level computed.
    pub tensor_cap: usize,
    /// Number of semigroup elements used as sample words.
    pub word_sample: usize,
    pub validation: Validation,
    /// Largest semigroup enumerated.
    pub semigroup_cap: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            level_cap: None,
            tensor_cap: 3,
            word_sample: 64,
            validation: Validation::Strict,
            semigroup_cap: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranks {
    pub semigroup: usize,
    pub zeon: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReesTable {
    pub partitions: Vec<String>,
    pub ranges: Vec<String>,
    pub idempotents: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDump {
    pub level: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub trace: Rational,
    pub legend: Vec<String>,
    pub matrix: RationalMatrix,
}

impl From<&LevelMatrix> for LevelDump {
    fn from(l: &LevelMatrix) -> Self {
        Self {
            level: l.level,
            trace: l.matrix.trace(),
            legend: l.legend(),
            matrix: l.matrix.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopLevel {
    pub legend: Vec<String>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub u_top: Vec<Rational>,
    pub cross_section_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub colors: Vec<String>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub weights: Vec<Rational>,
    pub warnings: Vec<String>,
    pub semigroup_size: usize,
    pub kernel_size: usize,
    pub rank: Ranks,
    pub group_order: usize,
    pub order_profile: BTreeMap<usize, usize>,
    pub rees: ReesTable,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub alpha: Vec<Rational>,
    #[serde(serialize_with = "rational::serialize_vec")]
    pub beta: Vec<Rational>,
    pub lambda: BTreeMap<String, String>,
    #[serde(rename = "Omega")]
    pub omega: RationalMatrix,
    pub tensor_levels: Vec<LevelDump>,
    pub fields_level2: Fields2,
    pub zeon_levels: Vec<LevelDump>,
    pub top_level: TopLevel,
    pub marginal_descent: MarginalDescent,
    pub observables: ObservableSet,
    pub projections: ProjectionSet,
    pub characteristic_polynomials: CharacteristicPolynomials,
    pub checks: Report,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.checks.passed()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Intermediate objects shared by `analyze` and `identities`.
pub struct Pipeline {
    pub walk: Walk,
    pub semigroup: Semigroup,
    pub kernel: KernelStructure,
    pub measure: LimitMeasure,
    pub omega_tensor2: LevelMatrix,
    pub omega_zeon2: LevelMatrix,
    pub observables: ObservableSet,
    pub warnings: Vec<String>,
}

impl Pipeline {
    pub fn build(spec: &ProblemSpec, opts: &AnalyzeOptions) -> Result<Self> {
        if spec.n < 2 {
            return Err(Error::IndexOutOfRange(
                "analysis needs at least two points".into(),
            ));
        }
        let warnings = spec.validate(opts.validation)?;
        let walk = spec.walk()?;
        let semigroup = Semigroup::generate_bounded(walk.colors(), opts.semigroup_cap)?;
        let kernel = KernelStructure::from_semigroup(&semigroup)?;
        let measure = walk::walk_limit(&semigroup, &walk, &kernel)?;
        let omega_tensor2 = tensor::omega_tensor(&walk, 2)?;
        let omega_zeon2 = zeon::omega_level(&walk, 2)?;
        let observables =
            observables::build_observables(&kernel, &measure, &omega_tensor2.matrix, &omega_zeon2.matrix)?;
        Ok(Self {
            walk,
            semigroup,
            kernel,
            measure,
            omega_tensor2,
            omega_zeon2,
            observables,
            warnings,
        })
    }

    /// Operator identities, the level-two table and the projection identities.
    pub fn identity_report(&self) -> Result<(ProjectionSet, Report)> {
        let mut rep = observables::operator_properties(&self.observables, &self.kernel, &self.measure);
        rep.extend(observables::level2_relation_table(
            &self.observables,
            &self.kernel,
            &self.measure,
            &self.omega_tensor2.matrix,
        )?);
        let (proj, prep) = observables::projections(&self.kernel, &self.observables, &self.measure)?;
        rep.extend(prep);
        rep.extend(observables::identity_suite(
            &self.observables,
            &self.kernel,
            &self.walk,
        ));
        Ok((proj, rep))
    }
}

pub fn identities(spec: &ProblemSpec, opts: &AnalyzeOptions) -> Result<Report> {
    Ok(Pipeline::build(spec, opts)?.identity_report()?.1)
}

fn probability_checks(lm: &LimitMeasure) -> Vec<Check> {
    let sums_to_one =
        |v: &[Rational]| v.iter().all(|x| *x >= Rational::zero()) && v.iter().sum::<Rational>().is_one();
    vec![
        Check::flag("lambda is a probability measure", sums_to_one(&lm.lambda)),
        Check::flag("alpha is a probability measure", sums_to_one(&lm.alpha)),
        Check::flag("beta is a probability measure", sums_to_one(&lm.beta)),
    ]
}

pub fn analyze(spec: &ProblemSpec, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let p = Pipeline::build(spec, opts)?;
    let n = spec.n;
    let ks = &p.kernel;
    let lm = &p.measure;
    let walk = &p.walk;
    let r = ks.rank();
    let mut checks = Report::default();

    for c in probability_checks(lm) {
        checks.push(c);
    }
    let haar = walk::haar_check(lm, ks);
    checks.push(if haar.uniform {
        Check::flag("lambda = alpha x Haar x beta", true)
    } else {
        Check::failing(
            "lambda = alpha x Haar x beta",
            format!("max deviation {}", haar.max_deviation),
        )
    });
    checks.push(Check::vectors(
        "lambda is idempotent under convolution",
        &lm.convolution_square(ks),
        &lm.lambda,
    ));
    checks.push(Check::vectors(
        "lambda T = lambda",
        &lm.step(ks, walk),
        &lm.lambda,
    ));

    let a = walk.average_matrix();
    let omega = walk::omega_from_measure(lm, ks);
    let spectral = SpectralProjection::of(a.clone())?;
    checks.push(Check::matrices("<K> = Abel limit of A", &omega, &spectral.omega));
    checks.push(Check::flag(
        "Omega^2 = A Omega = Omega A = Omega",
        spectral.satisfies_limit_relations(),
    ));

    let tensor_cap = opts.tensor_cap.clamp(2, 3);
    let mut tensor_levels = vec![tensor::omega_tensor(walk, 1)?, p.omega_tensor2.clone()];
    for level in 3..=tensor_cap {
        tensor_levels.push(tensor::omega_tensor(walk, level)?);
    }
    checks.push(Check::matrices(
        "Omega_(x)1 = Omega",
        &tensor_levels[0].matrix,
        &omega,
    ));
    for pair in tensor_levels.windows(2) {
        let name = format!("tensor descent at level {}", pair[1].level);
        checks.push(Check::flag(name, tensor::descent_holds(&pair[1], &pair[0])?));
    }
    {
        let o2 = &p.omega_tensor2.matrix;
        let a2 = tensor::a_tensor(walk, 2)?.matrix;
        checks.push(Check::matrices("Omega_(x)2 idempotent", &(o2 * o2), o2));
        checks.push(Check::matrices(
            "Omega_(x)2 commutes with A_(x)2",
            &(o2 * &a2),
            &(&a2 * o2),
        ));
        let avg = walk::kernel_average(lm, ks, |k| k.tensor_power(2).matrix());
        checks.push(Check::matrices("Omega_(x)2 = <K^(x)2>", o2, &avg));
    }
    let fields_level2 = tensor::fields_level2(walk)?;
    checks.push(Check::flag(
        "level-two fields fixed by A_(x)2",
        fields_level2.fixed,
    ));

    let level_cap = opts
        .level_cap
        .unwrap_or_else(|| spec.effective_level_cap())
        .clamp(1, n);
    let top = n.min(level_cap.max(r + 1));
    let zeon_all: Vec<LevelMatrix> = (1..=top)
        .map(|l| zeon::omega_level(walk, l))
        .collect::<Result<_>>()?;
    let rank_zeon = zeon::rank_from_levels(&zeon_all);
    checks.push(if rank_zeon == r {
        Check::flag("zeon rank = kernel rank", true)
    } else {
        Check::failing("zeon rank = kernel rank", format!("zeon {rank_zeon}, kernel {r}"))
    });
    checks.push(Check::matrices("Omega_1 = Omega", &zeon_all[0].matrix, &omega));
    checks.push(Check::matrices(
        "Omega_2 = <K^v2>",
        &p.omega_zeon2.matrix,
        &walk::kernel_average(lm, ks, |k| zeon::zeon_of_function(k, 2).expect("n >= 2").matrix),
    ));
    for o in &zeon_all {
        let name = format!("Omega_{} = u* pi / mass", o.level);
        if o.level == r || o.matrix.trace().is_one() {
            checks.push(Check::flag(name, zeon::outer_product_form_holds(&o.matrix)));
        }
    }
    let top_matrix = &zeon_all[r - 1].matrix;
    let ones_top = vec![Rational::one(); top_matrix.rows()];
    let pi_top = top_matrix.left_apply(&ones_top);
    let u_top = top_matrix.right_apply(&ones_top);
    let descent = zeon::marginal_descent(&pi_top, &u_top, n, r, &p.observables.pi)?;
    checks.push(Check::flag(
        "marginal descent recovers pi and u",
        descent.recovers_level_one(),
    ));
    let mut descent_fixed = true;
    for (level, pl) in descent.pis.iter().enumerate() {
        let al = zeon::a_level(walk, level + 1)?.matrix;
        descent_fixed &= al.left_apply(pl) == *pl;
    }
    checks.push(Check::flag("each pi_l is fixed by A_l", descent_fixed));
    let top_level = TopLevel {
        legend: zeon_all[r - 1].legend(),
        u_top,
        cross_section_counts: zeon::cross_section_counts(ks),
    };

    let (projections, identity_checks) = p.identity_report()?;
    checks.extend(identity_checks);
    let words = observables::sample_words(&p.semigroup, opts.word_sample);
    checks.extend(observables::friedman_check(ks, &p.observables, walk, &words));
    if walk.colors().len() == 2 && walk.is_uniform() {
        checks.extend(observables::two_color_fixed_points(&p.observables, walk));
        let fp = zeon::fixed_point_correspondence(walk)?;
        checks.push(Check::flag(
            "A_2 fixed points correspond to F and G fixed points",
            fp.holds(),
        ));
    }
    checks.push(observables::proportionality_check(
        &p.observables,
        &p.omega_zeon2.matrix,
    ));

    let cell = ks.order_profile(0, 0)?;
    let lambda = ks
        .elements()
        .iter()
        .zip(&lm.lambda)
        .map(|(k, m)| (k.to_string(), rational::to_text(m)))
        .collect();
    let rees = ReesTable {
        partitions: ks.partitions().iter().map(ToString::to_string).collect(),
        ranges: ks.ranges().iter().map(ToString::to_string).collect(),
        idempotents: ks
            .idempotent_grid()
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect(),
    };
    let zeon_levels = zeon_all.iter().take(level_cap).map(LevelDump::from).collect();

    Ok(AnalysisReport {
        n,
        colors: walk.colors().iter().map(ToString::to_string).collect(),
        weights: walk.weights().to_vec(),
        warnings: p.warnings.clone(),
        semigroup_size: p.semigroup.len(),
        kernel_size: ks.len(),
        rank: Ranks {
            semigroup: r,
            zeon: rank_zeon,
        },
        group_order: ks.group_order(),
        order_profile: cell,
        rees,
        alpha: lm.alpha.clone(),
        beta: lm.beta.clone(),
        lambda,
        omega,
        tensor_levels: tensor_levels.iter().map(LevelDump::from).collect(),
        fields_level2,
        zeon_levels,
        top_level,
        marginal_descent: descent,
        characteristic_polynomials: observables::characteristic_polynomials(&p.observables)?,
        observables: p.observables,
        projections,
        checks,
    })
}

/// Exact abel limit of the averaged matrix, for callers holding only a spec.
pub fn omega_of(spec: &ProblemSpec) -> Result<RationalMatrix> {
    abel_limit(&spec.walk()?.average_matrix())
}
