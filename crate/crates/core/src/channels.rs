//! Kraus channels on the qubit, the qutrit and the composite system.
//!
//! Each named [`ChannelKind`] pairs a single-qubit set with a single-qutrit
//! set. Local sets are lifted to the 6-dimensional composite with the
//! identity on the other factor; the collective (global) stage acts with
//! qubit-qutrit product operators at its own strength `p`.
//!
//! Two of the commonly quoted qutrit sets (dephasing and trit phase flip) are not
//! trace preserving as printed. [`Variant::Corrected`] repairs them and is
//! the default; [`Variant::AsPrinted`] keeps the printed matrices for
//! diagnostics only, and evolution through an incomplete set is refused with
//! [`Error::CompletenessViolation`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{check_unit_interval, Error, Result};
use crate::linalg::{self, kron, ComplexMatrix};
use crate::state::{validate_density, DensityMatrix, COMPOSITE_DIM, QUBIT_DIM, QUTRIT_DIM};

/// Completeness defect above which a set is treated as not trace preserving.
pub const COMPLETENESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    /// Qubit phase flip paired with the qutrit phase-flip set.
    PhaseFlip,
    /// Qubit dephasing paired with qutrit dephasing.
    Dephasing,
    /// Qubit bit flip paired with the qutrit trit flip.
    BitTritFlip,
    /// Qubit bit-phase flip paired with the qutrit trit phase flip.
    BitTritPhaseFlip,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] = [
        ChannelKind::PhaseFlip,
        ChannelKind::Dephasing,
        ChannelKind::BitTritFlip,
        ChannelKind::BitTritPhaseFlip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::PhaseFlip => "phase-flip",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::BitTritFlip => "bit-trit-flip",
            ChannelKind::BitTritPhaseFlip => "bit-trit-phase-flip",
        }
    }

    fn qubit_name(self) -> &'static str {
        match self {
            ChannelKind::PhaseFlip => "phase flip",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::BitTritFlip => "bit flip",
            ChannelKind::BitTritPhaseFlip => "bit-phase flip",
        }
    }

    fn qutrit_name(self) -> &'static str {
        match self {
            ChannelKind::PhaseFlip => "phase flip",
            ChannelKind::Dephasing => "dephasing",
            ChannelKind::BitTritFlip => "trit flip",
            ChannelKind::BitTritPhaseFlip => "trit phase flip",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "phase-flip" => Ok(ChannelKind::PhaseFlip),
            "dephasing" => Ok(ChannelKind::Dephasing),
            "bit-trit-flip" | "trit-flip" => Ok(ChannelKind::BitTritFlip),
            "bit-trit-phase-flip" | "trit-phase-flip" => Ok(ChannelKind::BitTritPhaseFlip),
            other => Err(format!(
                "unknown channel `{other}` (expected phase-flip, dephasing, bit-trit-flip or bit-trit-phase-flip)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Multilocal,
    Global,
}

impl Coupling {
    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Multilocal => "multilocal",
            Coupling::Global => "global",
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Coupling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ml" | "multilocal" | "multi-local" => Ok(Coupling::Multilocal),
            "g" | "global" => Ok(Coupling::Global),
            other => Err(format!(
                "unknown coupling `{other}` (expected ml or global)"
            )),
        }
    }
}

/// How the collective stage combines the qubit and qutrit operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GlobalMode {
    /// Every pair `E_m^A(p) (x) E_n^B(p)`; trace preserving.
    #[default]
    Product,
    /// Only matched indices `m == n`, the shorter set padded with zeros.
    /// Generally not trace preserving.
    Correlated,
}

impl GlobalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GlobalMode::Product => "product",
            GlobalMode::Correlated => "correlated",
        }
    }
}

impl fmt::Display for GlobalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GlobalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "product" => Ok(GlobalMode::Product),
            "correlated" => Ok(GlobalMode::Correlated),
            other => Err(format!(
                "unknown global mode `{other}` (expected product or correlated)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    AsPrinted,
    #[default]
    Corrected,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::AsPrinted => "as-printed",
            Variant::Corrected => "corrected",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "as-printed" => Ok(Variant::AsPrinted),
            "corrected" => Ok(Variant::Corrected),
            other => Err(format!(
                "unknown variant `{other}` (expected as-printed or corrected)"
            )),
        }
    }
}

/// An ordered set of Kraus operators sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    label: String,
    kind: ChannelKind,
    variant: Variant,
    p: f64,
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

impl KrausSet {
    fn new(
        label: String,
        kind: ChannelKind,
        variant: Variant,
        p: f64,
        ops: Vec<ComplexMatrix>,
    ) -> Self {
        let dim = ops[0].rows();
        debug_assert!(ops.iter().all(|e| e.shape() == (dim, dim)));
        Self {
            label,
            kind,
            variant,
            p,
            dim,
            ops,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        completeness_defect(self) <= COMPLETENESS_TOL
    }
}

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn real(rows: usize, data: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_real(rows, rows, data).expect("static Kraus matrix")
}

/// Single-qubit Kraus set for the qubit half of `kind`.
pub fn qubit_channel(kind: ChannelKind, p: f64) -> Result<KrausSet> {
    let p = check_unit_interval("p", p)?;
    let id = ComplexMatrix::identity(QUBIT_DIM);
    let keep = (1.0 - p / 2.0).sqrt();
    let flip = (p / 2.0).sqrt();
    let ops = match kind {
        ChannelKind::PhaseFlip => vec![
            linalg::scale_real(&id, keep),
            linalg::scale_real(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), flip),
        ],
        ChannelKind::Dephasing => vec![
            ComplexMatrix::from_real_diagonal(&[1.0, (1.0 - p).sqrt()]),
            ComplexMatrix::from_real_diagonal(&[0.0, p.sqrt()]),
        ],
        ChannelKind::BitTritFlip => vec![
            linalg::scale_real(&id, keep),
            linalg::scale_real(&real(2, &[0.0, 1.0, 1.0, 0.0]), flip),
        ],
        ChannelKind::BitTritPhaseFlip => {
            let i = Complex64::i();
            let sigma_y = ComplexMatrix::new(2, 2, vec![cr(0.0), -i, i, cr(0.0)])
                .expect("static Kraus matrix");
            vec![
                linalg::scale_real(&id, keep),
                linalg::scale_real(&sigma_y, flip),
            ]
        }
    };
    Ok(KrausSet::new(
        format!("qubit {}", kind.qubit_name()),
        kind,
        Variant::Corrected,
        p,
        ops,
    ))
}

/// Single-qutrit Kraus set for the qutrit half of `kind`.
///
/// The corrected variant zeroes the `(0,0)` entries of the dephasing `E1`,
/// `E2` and uses `sqrt(1-p)` for the trit-phase-flip `E0`. The phase-flip and
/// trit-flip sets are identical in both variants.
pub fn qutrit_channel(kind: ChannelKind, p: f64, variant: Variant) -> Result<KrausSet> {
    let p = check_unit_interval("p", p)?;
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let ops = match kind {
        ChannelKind::PhaseFlip => vec![
            ComplexMatrix::from_real_diagonal(&[1.0, sq, sq]),
            real(3, &[0.0, sp, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            real(3, &[0.0, 0.0, sp, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ],
        ChannelKind::Dephasing => {
            let corner = match variant {
                Variant::AsPrinted => 1.0,
                Variant::Corrected => 0.0,
            };
            vec![
                ComplexMatrix::from_real_diagonal(&[1.0, sq, sq]),
                ComplexMatrix::from_real_diagonal(&[corner, sp, 0.0]),
                ComplexMatrix::from_real_diagonal(&[corner, 0.0, sp]),
            ]
        }
        ChannelKind::BitTritFlip => {
            let third = (p / 3.0).sqrt();
            vec![
                linalg::scale_real(&ComplexMatrix::identity(3), (1.0 - 2.0 * p / 3.0).sqrt()),
                linalg::scale_real(
                    &real(3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
                    third,
                ),
                linalg::scale_real(
                    &real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]),
                    third,
                ),
            ]
        }
        ChannelKind::BitTritPhaseFlip => {
            let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
            let wb = w.conj();
            let (o, l) = (cr(0.0), cr(1.0));
            let shift = |data: [Complex64; 9]| {
                linalg::scale_real(
                    &ComplexMatrix::new(3, 3, data.to_vec()).expect("static Kraus matrix"),
                    (p / 3.0).sqrt(),
                )
            };
            let e0 = match variant {
                Variant::AsPrinted => (1.0 - 2.0 * p / 3.0).sqrt(),
                Variant::Corrected => sq,
            };
            vec![
                linalg::scale_real(&ComplexMatrix::identity(3), e0),
                shift([o, o, w, l, o, o, o, wb, o]),
                shift([o, wb, o, o, o, w, l, o, o]),
                shift([o, w, o, o, o, wb, l, o, o]),
            ]
        }
    };
    Ok(KrausSet::new(
        format!("qutrit {} ({variant})", kind.qutrit_name()),
        kind,
        variant,
        p,
        ops,
    ))
}

/// Max-norm of `sum_k E_k^dagger E_k - I`.
pub fn completeness_defect(k: &KrausSet) -> f64 {
    let mut acc = ComplexMatrix::zeros(k.dim, k.dim);
    for e in &k.ops {
        let ee = linalg::mat_mul(&linalg::dagger(e), e).expect("square Kraus operator");
        acc = linalg::add(&acc, &ee).expect("same dimension");
    }
    linalg::max_abs_diff(&acc, &ComplexMatrix::identity(k.dim)).expect("same dimension")
}

fn lift(
    k: &KrausSet,
    expected: usize,
    f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> Result<KrausSet> {
    if k.dim != expected {
        return Err(Error::DimensionMismatch {
            op: "lift",
            left: (k.dim, k.dim),
            right: (expected, expected),
        });
    }
    Ok(KrausSet {
        label: format!("{} (lifted)", k.label),
        dim: COMPOSITE_DIM,
        ops: k.ops.iter().map(f).collect(),
        ..k.clone()
    })
}

/// `E -> E (x) I_3` for every operator of a qubit set.
pub fn lift_qubit(k: &KrausSet) -> Result<KrausSet> {
    let id = ComplexMatrix::identity(QUTRIT_DIM);
    lift(k, QUBIT_DIM, |e| kron(e, &id))
}

/// `E -> I_2 (x) E` for every operator of a qutrit set.
pub fn lift_qutrit(k: &KrausSet) -> Result<KrausSet> {
    let id = ComplexMatrix::identity(QUBIT_DIM);
    lift(k, QUTRIT_DIM, |e| kron(&id, e))
}

/// The collective qubit-qutrit stage at strength `p`.
pub fn collective_set(
    kind: ChannelKind,
    p: f64,
    mode: GlobalMode,
    variant: Variant,
) -> Result<KrausSet> {
    let a = qubit_channel(kind, p)?;
    let b = qutrit_channel(kind, p, variant)?;
    let ops = match mode {
        GlobalMode::Product => a
            .ops
            .iter()
            .flat_map(|ea| b.ops.iter().map(move |eb| kron(ea, eb)))
            .collect(),
        GlobalMode::Correlated => {
            let n = a.len().max(b.len());
            let za = ComplexMatrix::zeros(QUBIT_DIM, QUBIT_DIM);
            let zb = ComplexMatrix::zeros(QUTRIT_DIM, QUTRIT_DIM);
            (0..n)
                .map(|i| kron(a.ops.get(i).unwrap_or(&za), b.ops.get(i).unwrap_or(&zb)))
                .collect()
        }
    };
    Ok(KrausSet::new(
        format!("collective {kind} ({mode}, {variant})"),
        kind,
        variant,
        p,
        ops,
    ))
}

/// `sum_k E_k rho E_k^dagger` with no completeness or positivity checks.
pub fn apply_raw(k: &KrausSet, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.shape() != (k.dim, k.dim) {
        return Err(Error::DimensionMismatch {
            op: "apply",
            left: (k.dim, k.dim),
            right: rho.shape(),
        });
    }
    let mut acc = ComplexMatrix::zeros(k.dim, k.dim);
    for e in &k.ops {
        acc = linalg::add(&acc, &linalg::sandwich(e, rho))?;
    }
    Ok(acc)
}

/// Applies a complete 6-dimensional set and revalidates the output.
pub fn apply(k: &KrausSet, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let defect = completeness_defect(k);
    if defect > COMPLETENESS_TOL {
        return Err(Error::CompletenessViolation {
            set: k.label.clone(),
            defect,
        });
    }
    validate_density(apply_raw(k, rho)?)
}

/// Channel kind, coupling and decoherence strengths for one evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub coupling: Coupling,
    /// Local qubit strength.
    pub p1: f64,
    /// Local qutrit strength.
    pub p2: f64,
    /// Collective strength; unused for multilocal coupling.
    pub p: f64,
    pub global_mode: GlobalMode,
    pub variant: Variant,
}

impl ChannelSpec {
    pub fn multilocal(kind: ChannelKind, p1: f64, p2: f64) -> Result<Self> {
        Self::new(kind, Coupling::Multilocal, p1, p2, 0.0)
    }

    pub fn global(kind: ChannelKind, p1: f64, p2: f64, p: f64) -> Result<Self> {
        Self::new(kind, Coupling::Global, p1, p2, p)
    }

    pub fn new(kind: ChannelKind, coupling: Coupling, p1: f64, p2: f64, p: f64) -> Result<Self> {
        Ok(Self {
            kind,
            coupling,
            p1: check_unit_interval("p1", p1)?,
            p2: check_unit_interval("p2", p2)?,
            p: check_unit_interval("p", p)?,
            global_mode: GlobalMode::default(),
            variant: Variant::default(),
        })
    }

    /// Same channel with `p1 = p2 = value`, and `p = value` under global coupling.
    pub fn linked(kind: ChannelKind, coupling: Coupling, value: f64) -> Result<Self> {
        match coupling {
            Coupling::Multilocal => Self::multilocal(kind, value, value),
            Coupling::Global => Self::global(kind, value, value, value),
        }
    }

    pub fn with_global_mode(mut self, mode: GlobalMode) -> Self {
        self.global_mode = mode;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Copy with the strengths replaced; reruns range checks.
    pub fn with_strengths(&self, p1: f64, p2: f64, p: f64) -> Result<Self> {
        let mut out = Self::new(self.kind, self.coupling, p1, p2, p)?;
        out.global_mode = self.global_mode;
        out.variant = self.variant;
        Ok(out)
    }

    /// Lifted Kraus stages in application order: qubit-local, qutrit-local,
    /// then the collective stage for global coupling.
    pub fn stages(&self) -> Result<Vec<KrausSet>> {
        let mut stages = vec![
            lift_qubit(&qubit_channel(self.kind, self.p1)?)?,
            lift_qutrit(&qutrit_channel(self.kind, self.p2, self.variant)?)?,
        ];
        if self.coupling == Coupling::Global {
            stages.push(collective_set(
                self.kind,
                self.p,
                self.global_mode,
                self.variant,
            )?);
        }
        Ok(stages)
    }
}

/// Output of an unchecked evolution together with the completeness defect of
/// the composite map.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: ComplexMatrix,
    pub completeness_defect: f64,
    /// Label of the first stage whose own defect exceeds [`COMPLETENESS_TOL`].
    pub offending_stage: Option<String>,
}

/// Runs every stage without refusing incomplete sets; for diagnostics.
pub fn evolve_raw(rho: &ComplexMatrix, spec: &ChannelSpec) -> Result<Evolution> {
    let stages = spec.stages()?;
    let mut state = rho.clone();
    for stage in &stages {
        state = apply_raw(stage, &state)?;
    }
    // Composite sum E^dagger E, built by pulling I back through the stages.
    let mut effect = ComplexMatrix::identity(COMPOSITE_DIM);
    for stage in stages.iter().rev() {
        let mut next = ComplexMatrix::zeros(COMPOSITE_DIM, COMPOSITE_DIM);
        for e in stage.ops() {
            next = linalg::add(&next, &linalg::sandwich(&linalg::dagger(e), &effect))?;
        }
        effect = next;
    }
    let completeness_defect =
        linalg::max_abs_diff(&effect, &ComplexMatrix::identity(COMPOSITE_DIM))?;
    let offending_stage = stages
        .iter()
        .find(|s| !s.is_complete())
        .map(|s| s.label.clone());
    Ok(Evolution {
        state,
        completeness_defect,
        offending_stage,
    })
}

/// Evolves a density matrix, refusing incomplete channels and revalidating
/// the result.
pub fn evolve(rho: &DensityMatrix, spec: &ChannelSpec) -> Result<DensityMatrix> {
    let out = evolve_raw(rho, spec)?;
    if let Some(set) = out.offending_stage {
        return Err(Error::CompletenessViolation {
            set,
            defect: out.completeness_defect,
        });
    }
    if out.completeness_defect > COMPLETENESS_TOL {
        return Err(Error::CompletenessViolation {
            set: format!("composite {} {}", spec.kind, spec.coupling),
            defect: out.completeness_defect,
        });
    }
    validate_density(out.state)
}

/// Independent local noise on the qubit (`p1`) and qutrit (`p2`).
pub fn multilocal_evolve(
    rho: &DensityMatrix,
    kind: ChannelKind,
    p1: f64,
    p2: f64,
    variant: Variant,
) -> Result<DensityMatrix> {
    let spec = ChannelSpec::multilocal(kind, p1, p2)?.with_variant(variant);
    evolve(rho, &spec)
}

/// Local noise followed by a collective stage of strength `p`.
pub fn global_evolve(
    rho: &DensityMatrix,
    kind: ChannelKind,
    p1: f64,
    p2: f64,
    p: f64,
    mode: GlobalMode,
    variant: Variant,
) -> Result<DensityMatrix> {
    let spec = ChannelSpec::global(kind, p1, p2, p)?
        .with_global_mode(mode)
        .with_variant(variant);
    evolve(rho, &spec)
}
