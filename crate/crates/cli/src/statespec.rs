//! StateSpec: a TOML description of a two-mode state.
//!
//! ```toml
//! kind = "twin_fock"        # | "coherent_spin" | "dicke" | "mixture" | "fluctuating"
//! n = 20
//! ```
//!
//! Keys per kind (all others are rejected):
//!
//! * `twin_fock`: `n` (even)
//! * `coherent_spin`: `n`, `z` in `[0, 1]`, `phi` (default 0)
//! * `dicke`: `n`, `k` (particles in mode a, `k <= n`)
//! * `mixture`: `n` and one `[[components]]` table per pure component,
//!   each with `weight` and a pure `kind` (`twin_fock`, `coherent_spin`,
//!   `dicke`) plus its keys except `n`. Weights must sum to 1 within 1e-9.
//! * `fluctuating`: either a `[distribution]` table (`type = "poisson"`
//!   with `mean`, `"binomial"` with `n` and `p`, or `"deterministic"` with
//!   `n`) together with a `[sector]` template (a pure kind without `n`,
//!   instantiated in every sector), or one `[[sectors]]` table per sector
//!   with `probability` and a fixed-`N` state.
//!
//! Errors carry the line and column of the offending key or value.

use std::fmt;
use std::ops::Range;

use bosent::fock::SectorView;
use bosent::{
    CoherentSpinState, FockVector, NumberDistribution, NumberSectorMixture, SectorDensity, TwoModeState,
};
use serde::{Deserialize, Serialize};
use toml::Spanned;

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// A pure state of an implied particle number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PureSpec {
    TwinFock,
    CoherentSpin { z: f64, phi: f64 },
    Dicke { k: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluctuatingSpec {
    Template { distribution: NumberDistribution, sector: PureSpec },
    Explicit { sectors: Vec<(f64, StateSpec)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    TwinFock { n: usize },
    CoherentSpin { n: usize, z: f64, phi: f64 },
    Dicke { n: usize, k: usize },
    Mixture { n: usize, components: Vec<(f64, PureSpec)> },
    Fluctuating { spec: FluctuatingSpec },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    /// 1-based; absent for errors that have no location in the file.
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((line, column)) => write!(f, "line {line}, column {column}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for SpecError {}

/// A constructed state of any supported shape.
#[derive(Clone, Debug)]
pub enum BuiltState {
    Pure(FockVector),
    Mixed(SectorDensity),
    Fluctuating(NumberSectorMixture),
}

impl BuiltState {
    pub fn is_fixed_number(&self) -> bool {
        !matches!(self, BuiltState::Fluctuating(_))
    }

    pub fn as_mixture(&self) -> Option<&NumberSectorMixture> {
        match self {
            BuiltState::Fluctuating(m) => Some(m),
            _ => None,
        }
    }
}

impl TwoModeState for BuiltState {
    fn sector_views(&self) -> Vec<(f64, SectorView<'_>)> {
        match self {
            BuiltState::Pure(psi) => psi.sector_views(),
            BuiltState::Mixed(rho) => rho.sector_views(),
            BuiltState::Fluctuating(mix) => mix.sector_views(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    kind: Spanned<String>,
    n: Option<Spanned<usize>>,
    z: Option<Spanned<f64>>,
    phi: Option<Spanned<f64>>,
    k: Option<Spanned<usize>>,
    weight: Option<Spanned<f64>>,
    probability: Option<Spanned<f64>>,
    components: Option<Spanned<Vec<RawState>>>,
    distribution: Option<Spanned<RawDistribution>>,
    sector: Option<Spanned<Box<RawState>>>,
    sectors: Option<Spanned<Vec<RawState>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    #[serde(rename = "type")]
    kind: Spanned<String>,
    mean: Option<Spanned<f64>>,
    n: Option<Spanned<usize>>,
    p: Option<Spanned<f64>>,
}

/// Role of a table in the document; decides which keys are allowed.
#[derive(Clone, Copy, PartialEq)]
enum Role {
    Top,
    Component,
    Template,
    Sector,
}

struct Parser<'a> {
    source: &'a str,
}

impl Parser<'_> {
    fn error(&self, span: Range<usize>, message: impl Into<String>) -> SpecError {
        SpecError { position: Some(line_column(self.source, span.start)), message: message.into() }
    }

    fn state(&self, raw: &RawState, role: Role) -> Result<StateSpec, SpecError> {
        self.check_role_keys(raw, role)?;
        let kind = raw.kind.get_ref().as_str();
        let allowed: &[&str] = match kind {
            "twin_fock" => &["n"],
            "coherent_spin" => &["n", "z", "phi"],
            "dicke" => &["n", "k"],
            "mixture" => &["n", "components"],
            "fluctuating" => &["distribution", "sector", "sectors"],
            other => {
                return Err(self.error(
                    raw.kind.span(),
                    format!("unknown kind {other:?}; expected twin_fock, coherent_spin, dicke, mixture or fluctuating"),
                ))
            }
        };
        self.check_kind_keys(raw, kind, allowed)?;
        if role != Role::Top && role != Role::Sector && !matches!(kind, "twin_fock" | "coherent_spin" | "dicke") {
            return Err(self.error(raw.kind.span(), format!("kind {kind:?} cannot appear here; use a pure kind")));
        }
        if role == Role::Sector && kind == "fluctuating" {
            return Err(self.error(raw.kind.span(), "a sector must have a fixed particle number"));
        }

        if kind == "fluctuating" {
            return self.fluctuating(raw);
        }
        let n = match (&raw.n, role) {
            (Some(n), Role::Top | Role::Sector) => *n.get_ref(),
            (None, Role::Top | Role::Sector) => {
                return Err(self.error(raw.kind.span(), format!("kind {kind:?} requires key `n`")))
            }
            (Some(n), _) => return Err(self.error(n.span(), "`n` is inherited here and must not be given")),
            (None, _) => 0,
        };
        let pure = |s: &Self| s.pure(raw, kind, (role == Role::Top || role == Role::Sector).then_some(n));
        Ok(match kind {
            "twin_fock" | "coherent_spin" | "dicke" => match pure(self)? {
                PureSpec::TwinFock => StateSpec::TwinFock { n },
                PureSpec::CoherentSpin { z, phi } => StateSpec::CoherentSpin { n, z, phi },
                PureSpec::Dicke { k } => StateSpec::Dicke { n, k },
            },
            "mixture" => {
                let Some(list) = &raw.components else {
                    return Err(self.error(raw.kind.span(), "mixture requires at least one [[components]] table"));
                };
                if list.get_ref().is_empty() {
                    return Err(self.error(list.span(), "mixture requires at least one component"));
                }
                let mut components = Vec::new();
                for c in list.get_ref() {
                    let spec = self.state(c, Role::Component)?;
                    let weight = c.weight.as_ref().expect("checked by role");
                    let pure = match spec {
                        StateSpec::TwinFock { .. } => PureSpec::TwinFock,
                        StateSpec::CoherentSpin { z, phi, .. } => PureSpec::CoherentSpin { z, phi },
                        StateSpec::Dicke { k, .. } => PureSpec::Dicke { k },
                        _ => unreachable!("components are pure"),
                    };
                    self.check_pure_for_n(c, &pure, n)?;
                    components.push((self.probability(weight, "weight")?, pure));
                }
                self.check_sum(list.span(), components.iter().map(|(w, _)| *w), "component weights")?;
                StateSpec::Mixture { n, components }
            }
            _ => unreachable!(),
        })
    }

    fn pure(&self, raw: &RawState, kind: &str, n: Option<usize>) -> Result<PureSpec, SpecError> {
        let spec = match kind {
            "twin_fock" => PureSpec::TwinFock,
            "coherent_spin" => {
                let Some(z) = &raw.z else {
                    return Err(self.error(raw.kind.span(), "coherent_spin requires key `z`"));
                };
                if !(0.0..=1.0).contains(z.get_ref()) {
                    return Err(self.error(z.span(), format!("z = {} must lie in [0, 1]", z.get_ref())));
                }
                let phi = match &raw.phi {
                    Some(p) if !p.get_ref().is_finite() => return Err(self.error(p.span(), "phi must be finite")),
                    Some(p) => *p.get_ref(),
                    None => 0.0,
                };
                PureSpec::CoherentSpin { z: *z.get_ref(), phi }
            }
            "dicke" => {
                let Some(k) = &raw.k else {
                    return Err(self.error(raw.kind.span(), "dicke requires key `k`"));
                };
                PureSpec::Dicke { k: *k.get_ref() }
            }
            _ => unreachable!(),
        };
        if let Some(n) = n {
            self.check_pure_for_n(raw, &spec, n)?;
        }
        Ok(spec)
    }

    /// Constraints that link a pure kind to its particle number.
    fn check_pure_for_n(&self, raw: &RawState, spec: &PureSpec, n: usize) -> Result<(), SpecError> {
        match spec {
            PureSpec::TwinFock if n % 2 != 0 => {
                let span = raw.n.as_ref().map_or(raw.kind.span(), |s| s.span());
                Err(self.error(span, format!("twin_fock needs an even particle number, got {n}")))
            }
            PureSpec::Dicke { k } if *k > n => {
                let span = raw.k.as_ref().expect("dicke has k").span();
                Err(self.error(span, format!("k = {k} exceeds the particle number {n}")))
            }
            _ => Ok(()),
        }
    }

    fn fluctuating(&self, raw: &RawState) -> Result<StateSpec, SpecError> {
        match (&raw.distribution, &raw.sector, &raw.sectors) {
            (Some(dist), Some(template), None) => {
                let distribution = self.distribution(dist)?;
                let t = template.get_ref();
                let spec = self.state(t, Role::Template)?;
                let sector = match spec {
                    StateSpec::TwinFock { .. } => PureSpec::TwinFock,
                    StateSpec::CoherentSpin { z, phi, .. } => PureSpec::CoherentSpin { z, phi },
                    StateSpec::Dicke { k, .. } => PureSpec::Dicke { k },
                    _ => unreachable!("templates are pure"),
                };
                let weights = distribution.weights().map_err(|e| self.error(dist.span(), e.to_string()))?;
                for (n, _) in weights {
                    self.check_pure_for_n(t, &sector, n).map_err(|e| SpecError {
                        message: format!("sector template is invalid for N = {n} in the distribution: {}", e.message),
                        ..e
                    })?;
                }
                Ok(StateSpec::Fluctuating { spec: FluctuatingSpec::Template { distribution, sector } })
            }
            (None, None, Some(list)) => {
                if list.get_ref().is_empty() {
                    return Err(self.error(list.span(), "fluctuating state requires at least one sector"));
                }
                let mut sectors = Vec::new();
                let mut seen = std::collections::BTreeSet::new();
                for s in list.get_ref() {
                    let spec = self.state(s, Role::Sector)?;
                    let p = s.probability.as_ref().expect("checked by role");
                    let n = *s.n.as_ref().expect("checked in state").get_ref();
                    if !seen.insert(n) {
                        return Err(self.error(s.n.as_ref().unwrap().span(), format!("sector N = {n} appears twice")));
                    }
                    sectors.push((self.probability(p, "probability")?, spec));
                }
                self.check_sum(list.span(), sectors.iter().map(|(p, _)| *p), "sector probabilities")?;
                Ok(StateSpec::Fluctuating { spec: FluctuatingSpec::Explicit { sectors } })
            }
            _ => Err(self.error(
                raw.kind.span(),
                "fluctuating requires either [distribution] with [sector], or [[sectors]] tables",
            )),
        }
    }

    fn distribution(&self, raw: &Spanned<RawDistribution>) -> Result<NumberDistribution, SpecError> {
        let d = raw.get_ref();
        let expect = |allowed: &[&str]| -> Result<(), SpecError> {
            for (name, span) in [
                ("mean", d.mean.as_ref().map(|s| s.span())),
                ("n", d.n.as_ref().map(|s| s.span())),
                ("p", d.p.as_ref().map(|s| s.span())),
            ] {
                if let Some(span) = span {
                    if !allowed.contains(&name) {
                        return Err(self.error(span, format!("key `{name}` is not used by a {} distribution", d.kind.get_ref())));
                    }
                }
            }
            Ok(())
        };
        let missing = |key: &str| self.error(d.kind.span(), format!("{} distribution requires key `{key}`", d.kind.get_ref()));
        match d.kind.get_ref().as_str() {
            "poisson" => {
                expect(&["mean"])?;
                let mean = d.mean.as_ref().ok_or_else(|| missing("mean"))?;
                if !(*mean.get_ref() > 0.0 && mean.get_ref().is_finite()) {
                    return Err(self.error(mean.span(), "Poisson mean must be positive and finite"));
                }
                Ok(NumberDistribution::Poisson { mean: *mean.get_ref() })
            }
            "binomial" => {
                expect(&["n", "p"])?;
                let n = d.n.as_ref().ok_or_else(|| missing("n"))?;
                let p = d.p.as_ref().ok_or_else(|| missing("p"))?;
                Ok(NumberDistribution::Binomial { n: *n.get_ref(), p: self.probability(p, "p")? })
            }
            "deterministic" => {
                expect(&["n"])?;
                let n = d.n.as_ref().ok_or_else(|| missing("n"))?;
                Ok(NumberDistribution::Deterministic { n: *n.get_ref() })
            }
            other => Err(self.error(
                d.kind.span(),
                format!("unknown distribution type {other:?}; expected poisson, binomial or deterministic"),
            )),
        }
    }

    fn probability(&self, value: &Spanned<f64>, name: &str) -> Result<f64, SpecError> {
        let v = *value.get_ref();
        if !(0.0..=1.0).contains(&v) {
            return Err(self.error(value.span(), format!("{name} = {v} must lie in [0, 1]")));
        }
        Ok(v)
    }

    fn check_sum(&self, span: Range<usize>, values: impl Iterator<Item = f64>, what: &str) -> Result<(), SpecError> {
        let total: f64 = values.sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(self.error(span, format!("{what} sum to {total}, not 1")));
        }
        Ok(())
    }

    fn check_role_keys(&self, raw: &RawState, role: Role) -> Result<(), SpecError> {
        let reject = |span: Range<usize>, key: &str, place: &str| {
            Err(self.error(span, format!("key `{key}` is only allowed {place}")))
        };
        match (&raw.weight, role) {
            (Some(w), r) if r != Role::Component => return reject(w.span(), "weight", "in [[components]] tables"),
            (None, Role::Component) => {
                return Err(self.error(raw.kind.span(), "every component requires key `weight`"));
            }
            _ => {}
        }
        match (&raw.probability, role) {
            (Some(p), r) if r != Role::Sector => reject(p.span(), "probability", "in [[sectors]] tables"),
            (None, Role::Sector) => Err(self.error(raw.kind.span(), "every sector requires key `probability`")),
            _ => Ok(()),
        }
    }

    fn check_kind_keys(&self, raw: &RawState, kind: &str, allowed: &[&str]) -> Result<(), SpecError> {
        let present = [
            ("n", raw.n.as_ref().map(|s| s.span())),
            ("z", raw.z.as_ref().map(|s| s.span())),
            ("phi", raw.phi.as_ref().map(|s| s.span())),
            ("k", raw.k.as_ref().map(|s| s.span())),
            ("components", raw.components.as_ref().map(|s| s.span())),
            ("distribution", raw.distribution.as_ref().map(|s| s.span())),
            ("sector", raw.sector.as_ref().map(|s| s.span())),
            ("sectors", raw.sectors.as_ref().map(|s| s.span())),
        ];
        for (key, span) in present {
            if let Some(span) = span {
                if !allowed.contains(&key) {
                    return Err(self.error(span, format!("key `{key}` is not used by kind {kind:?}")));
                }
            }
        }
        Ok(())
    }
}

/// 1-based line and column (in characters) of a byte offset.
fn line_column(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl StateSpec {
    pub fn parse(source: &str) -> Result<Self, SpecError> {
        let raw: RawState = toml::from_str(source).map_err(|e| SpecError {
            position: e.span().map(|s| line_column(source, s.start)),
            message: e.message().trim_end().to_string(),
        })?;
        Parser { source }.state(&raw, Role::Top)
    }

    /// Largest particle number with nonzero weight.
    pub fn max_n(&self) -> usize {
        match self {
            StateSpec::TwinFock { n }
            | StateSpec::CoherentSpin { n, .. }
            | StateSpec::Dicke { n, .. }
            | StateSpec::Mixture { n, .. } => *n,
            StateSpec::Fluctuating { spec: FluctuatingSpec::Template { distribution, .. } } => {
                distribution.weights().map_or(0, |w| w.last().map_or(0, |(n, _)| *n))
            }
            StateSpec::Fluctuating { spec: FluctuatingSpec::Explicit { sectors } } => {
                sectors.iter().map(|(_, s)| s.max_n()).max().unwrap_or(0)
            }
        }
    }

    /// Constructs the state. Mixed sectors are dense, so every sector must
    /// satisfy `N <= n_max`.
    pub fn build(&self, n_max: usize) -> Result<BuiltState, SpecError> {
        let plain = |message: String| SpecError { position: None, message };
        let core = |e: bosent::Error| plain(e.to_string());
        Ok(match self {
            StateSpec::TwinFock { n } => BuiltState::Pure(pure_state(&PureSpec::TwinFock, *n).map_err(core)?),
            StateSpec::CoherentSpin { n, z, phi } => {
                BuiltState::Pure(pure_state(&PureSpec::CoherentSpin { z: *z, phi: *phi }, *n).map_err(core)?)
            }
            StateSpec::Dicke { n, k } => BuiltState::Pure(pure_state(&PureSpec::Dicke { k: *k }, *n).map_err(core)?),
            StateSpec::Mixture { n, components } => {
                check_cap(*n, n_max).map_err(plain)?;
                let vectors = components
                    .iter()
                    .map(|(w, p)| Ok((*w, pure_state(p, *n)?)))
                    .collect::<bosent::Result<Vec<_>>>()
                    .map_err(core)?;
                BuiltState::Mixed(SectorDensity::from_pure_mixture(&vectors).map_err(core)?)
            }
            StateSpec::Fluctuating { spec } => {
                let sectors = match spec {
                    FluctuatingSpec::Template { distribution, sector } => {
                        let weights = distribution.weights().map_err(core)?;
                        weights
                            .into_iter()
                            .map(|(n, p)| {
                                check_cap(n, n_max).map_err(plain)?;
                                Ok((p, pure_state(sector, n).map_err(core)?.to_density()))
                            })
                            .collect::<Result<Vec<_>, SpecError>>()?
                    }
                    FluctuatingSpec::Explicit { sectors } => sectors
                        .iter()
                        .map(|(p, s)| {
                            check_cap(s.max_n(), n_max).map_err(plain)?;
                            let rho = match s.build(n_max)? {
                                BuiltState::Pure(psi) => psi.to_density(),
                                BuiltState::Mixed(rho) => rho,
                                BuiltState::Fluctuating(_) => unreachable!("sectors have fixed N"),
                            };
                            Ok((*p, rho))
                        })
                        .collect::<Result<Vec<_>, SpecError>>()?,
                };
                BuiltState::Fluctuating(NumberSectorMixture::new(sectors).map_err(core)?)
            }
        })
    }
}

fn check_cap(n: usize, n_max: usize) -> Result<(), String> {
    if n > n_max {
        Err(format!("sector N = {n} needs a dense density matrix but exceeds --n-max {n_max}"))
    } else {
        Ok(())
    }
}

fn pure_state(spec: &PureSpec, n: usize) -> bosent::Result<FockVector> {
    match spec {
        PureSpec::TwinFock => FockVector::twin_fock(n),
        PureSpec::CoherentSpin { z, phi } => Ok(CoherentSpinState::new(*z, *phi, n)?.to_fock()),
        PureSpec::Dicke { k } => FockVector::number_state(n, *k),
    }
}
