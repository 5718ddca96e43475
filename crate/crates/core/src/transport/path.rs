use serde::{Deserialize, Serialize};

use super::solver::{collocate_refined, split_pieces, TransportOptions};
use crate::kzb::{nu_section, AffineSection, ConnOperator, Kzb, Section};
use crate::nca::TruncatedSeries;
use crate::specfun::{lattice_distance, EisensteinCache};
use crate::{Error, Result, C64};

/// A path for transport: a polyline in `xi` at fixed `tau`, or a polyline in
/// `tau` carrying two sections.
#[derive(Clone, Debug, PartialEq)]
pub enum PathSpec {
    Fiber { tau: C64, vertices: Vec<C64>, degree: usize },
    Family { tau_vertices: Vec<C64>, sigma1: AffineSection, sigma2: AffineSection, degree: usize },
}

impl PathSpec {
    pub fn degree(&self) -> usize {
        match self {
            PathSpec::Fiber { degree, .. } | PathSpec::Family { degree, .. } => *degree,
        }
    }

    pub fn with_degree(mut self, n: usize) -> PathSpec {
        match &mut self {
            PathSpec::Fiber { degree, .. } | PathSpec::Family { degree, .. } => *degree = n,
        }
        self
    }

    /// The same path run backwards.
    pub fn reversed(&self) -> PathSpec {
        let mut p = self.clone();
        match &mut p {
            PathSpec::Fiber { vertices, .. } => vertices.reverse(),
            PathSpec::Family { tau_vertices, .. } => tau_vertices.reverse(),
        }
        p
    }

    pub fn endpoints(&self) -> Option<(C64, C64)> {
        let v = match self {
            PathSpec::Fiber { vertices, .. } => vertices,
            PathSpec::Family { tau_vertices, .. } => tau_vertices,
        };
        Some((*v.first()?, *v.last()?))
    }

    /// Parse a path file; `default_degree` is used when the file has none.
    pub fn from_json(s: &str, default_degree: usize) -> Result<PathSpec> {
        let f: PathFile = serde_json::from_str(s)?;
        let c = |p: [f64; 2]| C64::new(p[0], p[1]);
        let sec = |s: SectionFile| AffineSection { a: c(s.a), b: c(s.b) };
        let spec = match f {
            PathFile::Fiber { tau, degree, vertices } => PathSpec::Fiber {
                tau: c(tau),
                vertices: vertices.into_iter().map(c).collect(),
                degree: degree.unwrap_or(default_degree),
            },
            PathFile::Family { tau_interval, tau_vertices, degree, sigma1, sigma2 } => {
                let tau_vertices = match (tau_interval, tau_vertices) {
                    (Some(i), None) => vec![c(i[0]), c(i[1])],
                    (None, Some(v)) => v.into_iter().map(c).collect(),
                    _ => {
                        return Err(Error::InvalidArgument(
                            "family path needs exactly one of tau_interval, tau_vertices".into(),
                        ))
                    }
                };
                PathSpec::Family { tau_vertices, sigma1: sec(sigma1), sigma2: sec(sigma2), degree: degree.unwrap_or(default_degree) }
            }
        };
        if spec.endpoints().is_none() {
            return Err(Error::InvalidArgument("path has no vertices".into()));
        }
        Ok(spec)
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PathFile {
    Fiber {
        tau: [f64; 2],
        degree: Option<usize>,
        vertices: Vec<[f64; 2]>,
    },
    Family {
        tau_interval: Option<[[f64; 2]; 2]>,
        tau_vertices: Option<Vec<[f64; 2]>>,
        degree: Option<usize>,
        sigma1: SectionFile,
        sigma2: SectionFile,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SectionFile {
    a: [f64; 2],
    b: [f64; 2],
}

/// Transport along a path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportResult {
    pub phi: TruncatedSeries,
    /// Sum over pieces of the change under the last node doubling.
    pub error_estimate: f64,
    pub degree_profile: Vec<f64>,
}

impl TransportResult {
    fn new(phi: TruncatedSeries, error_estimate: f64) -> Self {
        let degree_profile = phi.degree_profile();
        TransportResult { phi, error_estimate, degree_profile }
    }

    /// Series JSON of `phi` with an extra `error_estimate` field.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(&self.phi).unwrap_or_default();
        if let Some(m) = v.as_object_mut() {
            m.insert("error_estimate".into(), self.error_estimate.into());
        }
        v
    }
}

/// Which terms of the two-sided family equation to keep. Dropping terms is
/// only meant for tests against scalar quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyTerms {
    pub psi: bool,
    pub right: bool,
}

impl Default for FamilyTerms {
    fn default() -> Self {
        FamilyTerms { psi: true, right: true }
    }
}

pub fn transport(path: &PathSpec, opts: &TransportOptions) -> Result<TransportResult> {
    let kzb = Kzb::new(path.degree())?;
    let one = TruncatedSeries::one(path.degree());
    match path {
        PathSpec::Fiber { tau, vertices, .. } => {
            let c = kzb.cache(*tau, opts.config)?;
            transport_fiber_from(&kzb, &c, vertices, &one, opts)
        }
        PathSpec::Family { tau_vertices, sigma1, sigma2, .. } => {
            transport_family_from(&kzb, tau_vertices, sigma1, sigma2, FamilyTerms::default(), &one, opts)
        }
    }
}

fn floor_estimate(phi: &TruncatedSeries) -> f64 {
    16.0 * f64::EPSILON * phi.sup_norm().max(1.0)
}

/// Solves `d phi = -nu_xi phi dxi` along the polyline, starting from `phi0`
/// at the first vertex.
pub fn transport_fiber_from(
    kzb: &Kzb,
    c: &EisensteinCache,
    vertices: &[C64],
    phi0: &TruncatedSeries,
    opts: &TransportOptions,
) -> Result<TransportResult> {
    if vertices.is_empty() {
        return Err(Error::InvalidArgument("path has no vertices".into()));
    }
    for v in vertices {
        c.guard("vertex", *v)?;
    }
    let tau = c.tau;
    let mut phi = phi0.clone();
    let mut err = 0.0;
    for w in vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let dist = |s: f64| lattice_distance(a + (b - a) * s, tau);
        for (s0, s1) in split_pieces(len, &dist, opts.piece_ratio, c.config().pole_floor)? {
            let scale = (b - a) * (s1 - s0);
            let op_at = |s: f64| -> Result<ConnOperator> {
                let xi = a + (b - a) * (s0 + s * (s1 - s0));
                Ok(kzb.nu_xi(c, xi)?.scale(scale))
            };
            let (next, delta) = collocate_refined(&op_at, &phi, opts)?;
            phi = next;
            err += delta + floor_estimate(&phi);
        }
    }
    Ok(TransportResult::new(phi, err))
}

/// Solves `d phi/d tau + nu_{sigma1} phi - phi nu_{sigma2} + psi(phi) = 0`
/// along the `tau` polyline, `psi = psi_A d/dA + psi_t d/dt`.
pub fn transport_family_from(
    kzb: &Kzb,
    tau_vertices: &[C64],
    sigma1: &dyn Section,
    sigma2: &dyn Section,
    terms: FamilyTerms,
    phi0: &TruncatedSeries,
    opts: &TransportOptions,
) -> Result<TransportResult> {
    if tau_vertices.is_empty() {
        return Err(Error::InvalidArgument("path has no vertices".into()));
    }
    let cfg = opts.config;
    let mut phi = phi0.clone();
    let mut err = 0.0;
    for w in tau_vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        // distance to the real axis or to the nearest tau where a section
        // meets the lattice, the latter only roughly
        let dist = |s: f64| {
            let tau = a + (b - a) * s;
            let scale = |sec: &dyn Section| 1.0 + sec.derivative(tau).norm() + tau.norm();
            let d1 = lattice_distance(sigma1.value(tau), tau) / scale(sigma1);
            let d2 = lattice_distance(sigma2.value(tau), tau) / scale(sigma2);
            (0.5 * tau.im).min(d1).min(d2)
        };
        for (s0, s1) in split_pieces(len, &dist, opts.piece_ratio, cfg.pole_floor)? {
            let scale = (b - a) * (s1 - s0);
            let op_at = |s: f64| -> Result<ConnOperator> {
                let tau = a + (b - a) * (s0 + s * (s1 - s0));
                let c = kzb.cache(tau, cfg)?;
                let mut op = ConnOperator::from_left(nu_section(kzb, sigma1, &c)?.left);
                if terms.right {
                    op.right = -&nu_section(kzb, sigma2, &c)?.left;
                }
                if terms.psi {
                    op.der = kzb.psi_a(&c)?.der.checked_add(&kzb.psi_t().der)?;
                }
                Ok(op.scale(scale))
            };
            let (next, delta) = collocate_refined(&op_at, &phi, opts)?;
            phi = next;
            err += delta + floor_estimate(&phi);
        }
    }
    Ok(TransportResult::new(phi, err))
}
