//! Sweeps, region maps and efficiency tables behind the `gausscap` binary.
//!
//! Everything here returns a [`Table`]; the binary only parses flags and
//! writes tables out.

// `!(x >= 0.0)` rejects NaN along with negative values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::thread;

use gausscap::{
    coherent_capacity, coherent_single_quadrature_capacity, critical_photon_number, holevo_bound,
    holevo_quantity, number_state_capacity, optimal_gaussian_capacity, squeezed_capacity,
    BaOptions, CapacityResult, ChannelKind, ChannelParams, GaussianEnsemble, Protocol,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Convergence(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<gausscap::Error> for CliError {
    fn from(e: gausscap::Error) -> Self {
        match e {
            gausscap::Error::Convergence { .. } => CliError::Convergence(e.to_string()),
            gausscap::Error::Truncation { .. } => {
                CliError::Convergence(format!("{e}; raise --cutoff"))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Quantities a table column can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Coherent,
    CoherentHomodyne,
    Squeezed,
    GaussianOpt,
    NumberState,
    HolevoQuantityCoherent,
    HolevoQuantitySqueezed,
    HolevoBound,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Coherent,
        Quantity::CoherentHomodyne,
        Quantity::Squeezed,
        Quantity::GaussianOpt,
        Quantity::NumberState,
        Quantity::HolevoQuantityCoherent,
        Quantity::HolevoQuantitySqueezed,
        Quantity::HolevoBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Coherent => "coherent",
            Quantity::CoherentHomodyne => "coherent-homodyne",
            Quantity::Squeezed => "squeezed",
            Quantity::GaussianOpt => "gaussian-opt",
            Quantity::NumberState => "number-state",
            Quantity::HolevoQuantityCoherent => "holevo-quantity-coherent",
            Quantity::HolevoQuantitySqueezed => "holevo-quantity-squeezed",
            Quantity::HolevoBound => "holevo-bound",
        }
    }

    /// Why `self` cannot be evaluated on `ch`, if it cannot.
    pub fn unsupported(self, ch: &ChannelParams) -> Option<String> {
        if self != Quantity::NumberState {
            return None;
        }
        if ch.kind() != ChannelKind::Loss {
            Some(format!(
                "number-state is not available for channel {}",
                ch.kind()
            ))
        } else if ch.n_th() > 0.0 {
            Some(format!(
                "number-state is not available for channel loss with n_th={} (pure loss only)",
                ch.n_th()
            ))
        } else {
            None
        }
    }

    /// Capacity in bits. Loss with `eta = 0` and `nbar = 0` give exactly 0.
    pub fn evaluate(self, ch: &ChannelParams, nbar: f64, ba: &BaOptions) -> CliResult<f64> {
        Ok(self.evaluate_full(ch, nbar, ba)?.bits)
    }

    pub fn evaluate_full(
        self,
        ch: &ChannelParams,
        nbar: f64,
        ba: &BaOptions,
    ) -> CliResult<CapacityResult> {
        if let Some(why) = self.unsupported(ch) {
            return Err(CliError::Usage(why));
        }
        let label = match self {
            Quantity::CoherentHomodyne => Protocol::CoherentHomodyne,
            Quantity::Squeezed => Protocol::SqueezedHomodyne,
            Quantity::NumberState => Protocol::NumberState,
            _ => Protocol::CoherentHeterodyne,
        };
        if nbar == 0.0 || ch.strength() == 0.0 {
            if !(nbar >= 0.0) {
                return Err(CliError::Usage(format!("nbar must be >= 0, got {nbar}")));
            }
            return Ok(CapacityResult::new(0.0, label));
        }
        let chi = |ens: gausscap::Result<GaussianEnsemble>| -> CliResult<CapacityResult> {
            Ok(CapacityResult::new(holevo_quantity(ch, &ens?)?, label))
        };
        Ok(match self {
            Quantity::Coherent => coherent_capacity(ch, nbar)?,
            Quantity::CoherentHomodyne => coherent_single_quadrature_capacity(ch, nbar)?,
            Quantity::Squeezed => squeezed_capacity(ch, nbar)?,
            Quantity::GaussianOpt => optimal_gaussian_capacity(ch, nbar)?,
            Quantity::NumberState => number_state_capacity(ch.strength(), nbar, ba)?.result,
            Quantity::HolevoQuantityCoherent => chi(GaussianEnsemble::coherent(nbar))?,
            Quantity::HolevoQuantitySqueezed => chi(GaussianEnsemble::squeezed_for(ch, nbar))?,
            Quantity::HolevoBound => CapacityResult::new(holevo_bound(ch, nbar)?, label),
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Quantity::ALL.iter().map(|q| q.name()).collect();
                CliError::Usage(format!(
                    "unknown protocol '{s}', expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Shortest round-trip form of `x` after rounding to 9 significant digits,
/// in exponent notation outside `[1e-5, 1e15)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Evenly spaced points, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn new(from: f64, to: f64, steps: usize, scale: Scale) -> CliResult<Self> {
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "need at least 2 steps, got {steps}"
            )));
        }
        if !(from < to) || !from.is_finite() || !to.is_finite() {
            return Err(CliError::Usage(format!(
                "axis needs from < to, got {from} .. {to}"
            )));
        }
        if scale == Scale::Log && !(from > 0.0) {
            return Err(CliError::Usage(format!(
                "log axis needs from > 0, got {from}"
            )));
        }
        Ok(Axis {
            from,
            to,
            steps,
            scale,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    return self.to;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.from + t * (self.to - self.from),
                    Scale::Log => (self.from.ln() + t * (self.to / self.from).ln()).exp(),
                }
            })
            .collect()
    }
}

/// Swept parameter of [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    Strength,
    Nbar,
    Nth,
}

impl AxisName {
    pub fn label(self, kind: ChannelKind) -> &'static str {
        match (self, kind) {
            (AxisName::Strength, ChannelKind::Loss) => "eta",
            (AxisName::Strength, ChannelKind::Amplification) => "g",
            (AxisName::Nbar, _) => "nbar",
            (AxisName::Nth, _) => "nth",
        }
    }
}

impl FromStr for AxisName {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "eta" | "g" | "strength" => Ok(AxisName::Strength),
            "nbar" => Ok(AxisName::Nbar),
            "nth" => Ok(AxisName::Nth),
            _ => Err(CliError::Usage(format!(
                "unknown axis '{s}', expected eta, g, strength, nbar or nth"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: ChannelKind,
    pub strength: f64,
    pub n_th: f64,
    pub nbar: f64,
    pub axis_name: AxisName,
    pub axis: Axis,
    pub protocols: Vec<Quantity>,
}

impl SweepSpec {
    /// Channel and energy at one axis value.
    fn point(&self, v: f64) -> CliResult<(ChannelParams, f64)> {
        let (mut strength, mut nth, mut nbar) = (self.strength, self.n_th, self.nbar);
        match self.axis_name {
            AxisName::Strength => strength = v,
            AxisName::Nbar => nbar = v,
            AxisName::Nth => nth = v,
        }
        if !(nbar >= 0.0) {
            return Err(CliError::Usage(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok((ChannelParams::new(self.kind, strength, nth)?, nbar))
    }
}

/// A CSV table plus the warnings raised while building it.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Metadata lines, written after `# ` prefixes.
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: &mut W, preamble: &[String]) -> io::Result<()> {
        for line in preamble.iter().chain(&self.meta) {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<_> = row.iter().map(|&x| format_number(x)).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// `f` over `items` on scoped threads, results in input order. Items are
/// dealt round-robin since the slow points tend to sit next to each other.
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len())
        .max(1);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || {
                    (w..items.len())
                        .step_by(workers)
                        .map(|i| (i, f(&items[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|r| r.expect("every item mapped"))
        .collect()
}

/// Drop protocols that some point of the sweep cannot evaluate.
fn supported(
    protocols: &[Quantity],
    channels: &[ChannelParams],
    warnings: &mut Vec<String>,
) -> Vec<Quantity> {
    protocols
        .iter()
        .copied()
        .filter(|q| match channels.iter().find_map(|ch| q.unsupported(ch)) {
            Some(why) => {
                warnings.push(format!("omitting column {q}: {why}"));
                false
            }
            None => true,
        })
        .collect()
}

fn protocol_list(protocols: &[Quantity]) -> String {
    protocols
        .iter()
        .map(|q| q.name())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Capacities along one parameter axis.
pub fn sweep(spec: &SweepSpec, ba: &BaOptions) -> CliResult<Table> {
    if spec.protocols.is_empty() {
        return Err(CliError::Usage("no protocols requested".into()));
    }
    let values = spec.axis.points();
    let points: Vec<_> = values
        .iter()
        .map(|&v| spec.point(v))
        .collect::<CliResult<_>>()?;
    let channels: Vec<_> = points.iter().map(|(ch, _)| *ch).collect();
    let mut warnings = Vec::new();
    let protocols = supported(&spec.protocols, &channels, &mut warnings);

    let rows = par_map(&points, |(ch, nbar)| {
        protocols
            .iter()
            .map(|q| q.evaluate(ch, *nbar, ba))
            .collect::<CliResult<Vec<_>>>()
    });
    let rows = values
        .iter()
        .zip(rows)
        .map(|(&v, row)| row.map(|r| std::iter::once(v).chain(r).collect()))
        .collect::<CliResult<Vec<_>>>()?;

    let axis = spec.axis_name.label(spec.kind);
    let mut header = vec![axis.to_string()];
    header.extend(protocols.iter().map(|q| q.name().to_string()));
    let fixed: Vec<String> = [
        (AxisName::Strength, "strength", spec.strength),
        (AxisName::Nth, "nth", spec.n_th),
        (AxisName::Nbar, "nbar", spec.nbar),
    ]
    .into_iter()
    .filter(|(name, _, _)| *name != spec.axis_name)
    .map(|(_, label, v)| format!("{label}={}", format_number(v)))
    .collect();
    Ok(Table {
        meta: vec![
            format!("channel={} {}", spec.kind, fixed.join(" ")),
            format!("protocols: {}", protocol_list(&protocols)),
        ],
        header,
        rows,
        warnings,
    })
}

/// `C_coh - C_sq` over a strength by energy grid.
pub fn region(kind: ChannelKind, n_th: f64, strength: &Axis, nbar: &Axis) -> CliResult<Table> {
    let mut cells = Vec::with_capacity(strength.steps * nbar.steps);
    for &k in &strength.points() {
        let ch = ChannelParams::new(kind, k, n_th)?;
        for &n in &nbar.points() {
            if !(n >= 0.0) {
                return Err(CliError::Usage(format!("nbar must be >= 0, got {n}")));
            }
            cells.push((ch, n));
        }
    }
    let ba = BaOptions::default();
    let rows = cells
        .iter()
        .map(|(ch, n)| {
            let coh = Quantity::Coherent.evaluate(ch, *n, &ba)?;
            let sq = Quantity::Squeezed.evaluate(ch, *n, &ba)?;
            Ok(vec![ch.strength(), *n, coh - sq])
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut meta = vec![format!("channel={kind} nth={}", format_number(n_th))];
    if kind == ChannelKind::Loss {
        meta.push(format!(
            "n_c={}",
            format_number(critical_photon_number(n_th)?)
        ));
    }
    Ok(Table {
        meta,
        header: vec!["strength".into(), "nbar".into(), "delta".into()],
        rows,
        warnings: Vec::new(),
    })
}

/// Bits per photon, `C / nbar`, along an energy axis.
pub fn efficiency(
    ch: &ChannelParams,
    nbar: &Axis,
    protocols: &[Quantity],
    ba: &BaOptions,
) -> CliResult<Table> {
    if !(nbar.from > 0.0) {
        return Err(CliError::Usage(format!(
            "efficiency divides by nbar, so the range must start above 0, got {}",
            nbar.from
        )));
    }
    if protocols.is_empty() {
        return Err(CliError::Usage("no protocols requested".into()));
    }
    let mut warnings = Vec::new();
    let protocols = supported(protocols, &[*ch], &mut warnings);
    let values = nbar.points();
    let rows = par_map(&values, |&n| {
        let mut row = vec![n];
        for q in &protocols {
            row.push(q.evaluate(ch, n, ba)? / n);
        }
        Ok(row)
    })
    .into_iter()
    .collect::<CliResult<Vec<_>>>()?;
    let mut header = vec!["nbar".to_string()];
    header.extend(protocols.iter().map(|q| q.name().to_string()));
    Ok(Table {
        meta: vec![
            format!("channel={ch} bits per photon"),
            format!("protocols: {}", protocol_list(&protocols)),
        ],
        header,
        rows,
        warnings,
    })
}

/// `n_c` for each thermal occupation.
pub fn critical_table(n_th: &[f64]) -> CliResult<Table> {
    let rows = n_th
        .iter()
        .map(|&t| Ok(vec![t, critical_photon_number(t)?]))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Table {
        meta: Vec::new(),
        header: vec!["nth".into(), "n_c".into()],
        rows,
        warnings: Vec::new(),
    })
}

/// `key: value` report of a single capacity evaluation.
pub fn capacity_report(
    q: Quantity,
    ch: &ChannelParams,
    nbar: f64,
    ba: &BaOptions,
) -> CliResult<Vec<(String, String)>> {
    let res = q.evaluate_full(ch, nbar, ba)?;
    let mut lines = vec![
        ("protocol".to_string(), q.name().to_string()),
        ("channel".to_string(), ch.to_string()),
        ("nbar".to_string(), format_number(nbar)),
        ("bits".to_string(), format_number(res.bits)),
    ];
    if q == Quantity::GaussianOpt {
        lines.push(("scheme".into(), res.protocol.to_string()));
    }
    for (k, v) in &res.params {
        lines.push((k.to_string(), format_number(*v)));
    }
    Ok(lines)
}
