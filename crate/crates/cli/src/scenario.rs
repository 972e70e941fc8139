//! The line-oriented scenario format.
//!
//! Scenarios are flat `key = value` files with `[section]` headers; `#`
//! starts a comment and lists are comma-separated. Sections: `[config]`,
//! `[traffic]`, `[channel]`, `[sim]`, `[shared]` (shared-assist only) and
//! `[multi.N]` (member configurations when `scheme = multi`).
//!
//! ```text
//! [config]
//! period = 10
//! offsets = 0,1,2,3      # or: t = 4, gap = 0, start = 0
//! k = 4
//! pattern = 0,2,3,1
//! scheme = flexible      # first_to | start_at_rv0 | flexible | shared_assist | multi
//!
//! [traffic]
//! kind = uniform         # always | uniform | geometric | pmf
//! lo = 0
//! hi = 3
//!
//! [channel]
//! epsilon = 0.1
//! ```
//!
//! Defaults: `latency_budget = period`, `max_periods_deferral = 1`,
//! `gap = 0`, `start = 0`, `decode = any_success`, `packets = 100000`,
//! `seed = 1`, `slot_duration_ms = 1`.

use std::collections::BTreeSet;

use thiserror::Error;

use cgsim_core::model::{
    generate_offsets, CgConfig, CollisionSpec, RvPattern, SchemeKind, SharedParams,
};
use cgsim_core::phy::{self, ChannelParams, DecodeModel, RvPredicate};
use cgsim_core::traffic::TrafficModel;
use cgsim_core::Scenario;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("[{section}] (line {line}): {message}")]
    Build {
        section: String,
        line: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("sweep parameter '{0}' is not a sweepable scalar")]
    BadSweepParam(String),
    #[error("{0}")]
    Other(String),
}

/// One parsed `key = value` entry with its source line.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

/// One `[section]` with its entries, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

/// The raw, untyped scenario file. Sweeps mutate this form and rebuild.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawSpec {
    sections: Vec<Section>,
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    (
        "config",
        &[
            "period",
            "offsets",
            "t",
            "gap",
            "start",
            "k",
            "pattern",
            "scheme",
            "latency_budget",
            "max_periods_deferral",
            "mask",
        ],
    ),
    (
        "traffic",
        &["kind", "slot", "lo", "hi", "gamma", "p_none", "p"],
    ),
    (
        "channel",
        &["epsilon", "collision", "contenders", "tx_prob", "decode"],
    ),
    (
        "shared",
        &["lbt_delay", "collision", "contenders", "tx_prob"],
    ),
    ("sim", &["packets", "seed", "slot_duration_ms", "id"]),
];

fn known_keys_for(section: &str) -> Option<&'static [&'static str]> {
    let base = section
        .strip_prefix("multi.")
        .map(|_| "config")
        .unwrap_or(section);
    KNOWN_KEYS
        .iter()
        .find(|(name, _)| *name == base)
        .map(|(_, keys)| *keys)
}

fn is_valid_section(name: &str) -> bool {
    match name {
        "config" | "traffic" | "channel" | "shared" | "sim" => true,
        _ => name
            .strip_prefix("multi.")
            .is_some_and(|index| index.parse::<usize>().is_ok()),
    }
}

/// Parses scenario text into its raw section/key form, rejecting unknown
/// sections and keys with their line numbers.
pub fn parse_scenario(text: &str) -> Result<RawSpec, CliError> {
    let mut spec = RawSpec::default();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::Parse {
                    line,
                    message: format!("malformed section header '{content}'"),
                })?
                .trim()
                .to_string();
            if !is_valid_section(&name) {
                return Err(CliError::Parse {
                    line,
                    message: format!("unknown section [{name}]"),
                });
            }
            if spec.sections.iter().any(|s| s.name == name) {
                return Err(CliError::Parse {
                    line,
                    message: format!("duplicate section [{name}]"),
                });
            }
            spec.sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::Parse {
                line,
                message: format!("expected 'key = value', got '{content}'"),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        let Some(section) = spec.sections.last_mut() else {
            return Err(CliError::Parse {
                line,
                message: format!("key '{key}' before any [section]"),
            });
        };
        let known = known_keys_for(&section.name).unwrap_or(&[]);
        if !known.contains(&key.as_str()) {
            return Err(CliError::Parse {
                line,
                message: format!("unknown key '{key}' in [{}]", section.name),
            });
        }
        if section.entries.iter().any(|e| e.key == key) {
            return Err(CliError::Parse {
                line,
                message: format!("duplicate key '{key}' in [{}]", section.name),
            });
        }
        section.entries.push(Entry { key, value, line });
    }
    Ok(spec)
}

impl RawSpec {
    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.section(section)?.entries.iter().find(|e| e.key == key)
    }

    /// Replaces (or appends) one key, used by sweeps and flag overrides.
    /// The section is created when absent.
    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        let section = match self.sections.iter_mut().find(|s| s.name == section) {
            Some(section) => section,
            None => {
                self.sections.push(Section {
                    name: section.to_string(),
                    line: 0,
                    entries: Vec::new(),
                });
                self.sections.last_mut().unwrap()
            }
        };
        match section.entries.iter_mut().find(|e| e.key == key) {
            Some(entry) => entry.value = value.to_string(),
            None => section.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line: 0,
            }),
        }
    }

    fn multi_sections(&self) -> Vec<(usize, &Section)> {
        let mut members: Vec<(usize, &Section)> = self
            .sections
            .iter()
            .filter_map(|s| {
                s.name
                    .strip_prefix("multi.")
                    .and_then(|index| index.parse::<usize>().ok())
                    .map(|index| (index, s))
            })
            .collect();
        members.sort_by_key(|(index, _)| *index);
        members
    }
}

struct SectionReader<'a> {
    spec: &'a RawSpec,
    name: &'a str,
}

impl<'a> SectionReader<'a> {
    fn err(&self, entry: Option<&Entry>, message: String) -> CliError {
        let line = entry
            .map(|e| e.line)
            .or_else(|| self.spec.section(self.name).map(|s| s.line))
            .unwrap_or(0);
        CliError::Build {
            section: self.name.to_string(),
            line,
            message,
        }
    }

    fn raw(&self, key: &str) -> Option<&'a Entry> {
        self.spec.get(self.name, key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(entry) => entry.value.parse::<T>().map(Some).map_err(|_| {
                self.err(
                    Some(entry),
                    format!("malformed value '{}' for '{key}'", entry.value),
                )
            }),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parsed(key)?
            .ok_or_else(|| self.err(None, format!("missing required key '{key}'")))
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError> {
        match self.raw(key) {
            None => Ok(None),
            Some(entry) => entry
                .value
                .split(',')
                .map(|part| part.trim().parse::<T>())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| {
                    self.err(
                        Some(entry),
                        format!("malformed list '{}' for '{key}'", entry.value),
                    )
                }),
        }
    }

    fn probability(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.parsed::<f64>(key)? {
            None => Ok(None),
            Some(p) if (0.0..=1.0).contains(&p) => Ok(Some(p)),
            Some(p) => Err(self.err(
                self.raw(key),
                format!("probability out of range: {key} = {p}"),
            )),
        }
    }
}

/// A built scenario plus the metadata the report columns need.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltScenario {
    pub scenario: Scenario,
    pub id: String,
    /// TO spacing minus one when the layout is evenly spaced.
    pub gap: Option<u64>,
}

fn parse_scheme(reader: &SectionReader, value: &Entry) -> Result<Option<SchemeKind>, CliError> {
    match value.value.as_str() {
        "first_to" => Ok(Some(SchemeKind::BaselineFirstTo)),
        "start_at_rv0" => Ok(Some(SchemeKind::BaselineStartAtRv0)),
        "flexible" => Ok(Some(SchemeKind::FlexibleOffset)),
        "shared_assist" | "multi" => Ok(None),
        other => Err(reader.err(Some(value), format!("unknown scheme '{other}'"))),
    }
}

fn build_offsets(reader: &SectionReader) -> Result<Vec<u64>, CliError> {
    let explicit = reader.list::<u64>("offsets")?;
    let t = reader.parsed::<usize>("t")?;
    match (explicit, t) {
        (Some(_), Some(_)) => Err(reader.err(
            reader.raw("offsets"),
            "give either 'offsets' or 't', not both".into(),
        )),
        (Some(offsets), None) => {
            for key in ["gap", "start"] {
                if reader.raw(key).is_some() {
                    return Err(reader.err(
                        reader.raw(key),
                        format!("'{key}' only applies with 't'-generated offsets"),
                    ));
                }
            }
            Ok(offsets)
        }
        (None, Some(t)) => {
            let gap = reader.parsed::<u64>("gap")?.unwrap_or(0);
            let start = reader.parsed::<u64>("start")?.unwrap_or(0);
            Ok(generate_offsets(t, gap, start))
        }
        (None, None) => Err(reader.err(None, "missing 'offsets' (or 't')".into())),
    }
}

/// Builds one config-shaped section. Member sections inherit the period,
/// budget and deferral of the outer `[config]`.
fn build_config_section(
    spec: &RawSpec,
    name: &str,
    period: u64,
    budget: u64,
    deferral: u32,
    scheme_override: Option<SchemeKind>,
) -> Result<CgConfig, CliError> {
    let reader = SectionReader { spec, name };
    let offsets = build_offsets(&reader)?;
    let k: u32 = reader.required("k")?;
    let pattern_ids = reader
        .list::<u8>("pattern")?
        .ok_or_else(|| reader.err(None, "missing required key 'pattern'".into()))?;
    let pattern = RvPattern::new(pattern_ids)
        .map_err(|e| reader.err(reader.raw("pattern"), e.to_string()))?;
    let mask: BTreeSet<u64> = reader
        .list::<u64>("mask")?
        .unwrap_or_default()
        .into_iter()
        .collect();

    let scheme = match scheme_override {
        Some(scheme) => scheme,
        None => {
            let entry = reader
                .raw("scheme")
                .ok_or_else(|| reader.err(None, "missing required key 'scheme'".into()))?;
            parse_scheme(&reader, entry)?.ok_or_else(|| {
                reader.err(
                    Some(entry),
                    "member configs must use a plain CG scheme".into(),
                )
            })?
        }
    };

    Ok(CgConfig {
        period_slots: period,
        to_offsets: offsets,
        rep_count: k,
        rv_pattern: pattern,
        scheme,
        latency_budget_slots: budget,
        max_periods_deferral: deferral,
        availability_mask: mask,
    })
}

fn build_traffic(spec: &RawSpec) -> Result<TrafficModel, CliError> {
    let reader = SectionReader {
        spec,
        name: "traffic",
    };
    let kind: String = reader.required("kind")?;
    match kind.as_str() {
        "always" => Ok(TrafficModel::AlwaysAtSlot(
            reader.parsed("slot")?.unwrap_or(0),
        )),
        "uniform" => Ok(TrafficModel::UniformOverSlots {
            lo: reader.required("lo")?,
            hi: reader.required("hi")?,
        }),
        "geometric" => Ok(TrafficModel::GeometricDelay {
            gamma: reader.required("gamma")?,
        }),
        "pmf" => Ok(TrafficModel::ExplicitPmf {
            p_none: reader
                .probability("p_none")?
                .ok_or_else(|| reader.err(None, "missing required key 'p_none'".into()))?,
            per_to: reader.list::<f64>("p")?.unwrap_or_default(),
        }),
        other => Err(reader.err(
            reader.raw("kind"),
            format!("unknown traffic kind '{other}'"),
        )),
    }
}

fn build_collision(reader: &SectionReader) -> Result<Option<CollisionSpec>, CliError> {
    let explicit = reader.probability("collision")?;
    let contenders = reader.parsed::<u32>("contenders")?;
    let tx_prob = reader.probability("tx_prob")?;
    match (explicit, contenders, tx_prob) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(reader.err(
            reader.raw("collision"),
            "give either 'collision' or the (contenders, tx_prob) pair, not both".into(),
        )),
        (Some(p), None, None) => Ok(Some(CollisionSpec::Probability(p))),
        (None, Some(contenders), Some(tx_prob)) => {
            if contenders == 0 {
                return Err(reader.err(reader.raw("contenders"), "contenders must be >= 1".into()));
            }
            Ok(Some(CollisionSpec::Contention {
                contenders,
                tx_prob,
            }))
        }
        (None, Some(_), None) | (None, None, Some(_)) => Err(reader.err(
            None,
            "'contenders' and 'tx_prob' must be given together".into(),
        )),
        (None, None, None) => Ok(None),
    }
}

/// Builds and validates the scenario. `default_id` seeds the report's
/// scenario id when `[sim] id` is absent (usually the file stem).
pub fn build_scenario(spec: &RawSpec, default_id: &str) -> Result<BuiltScenario, CliError> {
    let config_reader = SectionReader {
        spec,
        name: "config",
    };
    let period: u64 = config_reader.required("period")?;
    let budget: u64 = config_reader.parsed("latency_budget")?.unwrap_or(period);
    let deferral: u32 = config_reader.parsed("max_periods_deferral")?.unwrap_or(1);

    let scheme_entry = config_reader
        .raw("scheme")
        .ok_or_else(|| config_reader.err(None, "missing required key 'scheme'".into()))?;

    let config = match scheme_entry.value.as_str() {
        "shared_assist" => {
            let shared_reader = SectionReader {
                spec,
                name: "shared",
            };
            if spec.section("shared").is_none() {
                return Err(config_reader.err(
                    Some(scheme_entry),
                    "scheme 'shared_assist' needs a [shared] section".into(),
                ));
            }
            let shared = SharedParams {
                lbt_delay_slots: shared_reader.parsed("lbt_delay")?.unwrap_or(0),
                collision: build_collision(&shared_reader)?
                    .unwrap_or(CollisionSpec::Probability(0.0)),
            };
            build_config_section(
                spec,
                "config",
                period,
                budget,
                deferral,
                Some(SchemeKind::SharedAssist(shared)),
            )?
        }
        "multi" => {
            let members = spec.multi_sections();
            if members.is_empty() {
                return Err(config_reader.err(
                    Some(scheme_entry),
                    "scheme 'multi' needs [multi.N] member sections".into(),
                ));
            }
            let mut built = Vec::with_capacity(members.len());
            for (_, section) in &members {
                built.push(build_config_section(
                    spec,
                    &section.name,
                    period,
                    budget,
                    deferral,
                    None,
                )?);
            }
            // The outer geometry mirrors member 0; planning only uses the members.
            let mut outer = built[0].clone();
            outer.scheme = SchemeKind::MultiConfig(built);
            outer
        }
        _ => build_config_section(spec, "config", period, budget, deferral, None)?,
    };

    if spec.section("shared").is_some() && !matches!(config.scheme, SchemeKind::SharedAssist(_)) {
        return Err(config_reader.err(
            None,
            "[shared] section without scheme 'shared_assist'".into(),
        ));
    }

    let traffic = build_traffic(spec)?;

    let channel_reader = SectionReader {
        spec,
        name: "channel",
    };
    let epsilon = channel_reader
        .probability("epsilon")?
        .ok_or_else(|| channel_reader.err(None, "missing required key 'epsilon'".into()))?;
    let channel_collision = build_collision(&channel_reader)?;
    let shared_collision = match (&channel_collision, &config.scheme) {
        (Some(spec_), SchemeKind::SharedAssist(params))
            if phy::resolve_collision(spec_) != phy::resolve_collision(&params.collision) =>
        {
            return Err(channel_reader.err(
                channel_reader.raw("collision"),
                "[channel] and [shared] disagree on the collision probability".into(),
            ));
        }
        (Some(spec_), _) => phy::resolve_collision(spec_),
        (None, SchemeKind::SharedAssist(params)) => phy::resolve_collision(&params.collision),
        (None, _) => 0.0,
    };
    let decode_model = match channel_reader.parsed::<String>("decode")?.as_deref() {
        None | Some("any_success") => DecodeModel::AnySuccess,
        Some("rv_aware") => DecodeModel::RvAware(RvPredicate::default()),
        Some(other) => {
            return Err(channel_reader.err(
                channel_reader.raw("decode"),
                format!("unknown decode model '{other}'"),
            ));
        }
    };

    let sim_reader = SectionReader { spec, name: "sim" };
    let scenario = Scenario {
        config,
        traffic,
        channel: ChannelParams {
            epsilon,
            shared_collision,
            decode_model,
        },
        slot_duration_ms: sim_reader.parsed("slot_duration_ms")?.unwrap_or(1.0),
        packets: sim_reader.parsed("packets")?.unwrap_or(100_000),
        master_seed: sim_reader.parsed("seed")?.unwrap_or(1),
    };

    let violations = scenario.validate();
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations.join("; ")));
    }

    let id = sim_reader
        .parsed::<String>("id")?
        .unwrap_or_else(|| default_id.to_string());
    let gap = infer_gap(spec, &scenario.config);
    Ok(BuiltScenario { scenario, id, gap })
}

/// The gap is what the file said, or the even TO spacing minus one.
fn infer_gap(spec: &RawSpec, config: &CgConfig) -> Option<u64> {
    if let Some(entry) = spec.get("config", "gap") {
        return entry.value.parse().ok();
    }
    let offsets = &config.to_offsets;
    if offsets.len() < 2 {
        return Some(0);
    }
    let spacing = offsets[1] - offsets[0];
    offsets
        .windows(2)
        .all(|w| w[1] - w[0] == spacing)
        .then_some(spacing - 1)
}

/// Canonical text form of a built scenario: every effective value written
/// out explicitly. Parsing it back yields an equal scenario.
pub fn canonical_text(built: &BuiltScenario) -> String {
    let scenario = &built.scenario;
    let config = &scenario.config;
    let mut out = String::new();
    let list = |values: &[u64]| {
        values
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };

    let push_config_body = |out: &mut String, config: &CgConfig, scheme_name: &str| {
        out.push_str(&format!("offsets = {}\n", list(&config.to_offsets)));
        out.push_str(&format!("k = {}\n", config.rep_count));
        let pattern: Vec<u64> = config
            .rv_pattern
            .ids()
            .iter()
            .map(|&id| id as u64)
            .collect();
        out.push_str(&format!("pattern = {}\n", list(&pattern)));
        out.push_str(&format!("scheme = {scheme_name}\n"));
        if !config.availability_mask.is_empty() {
            let mask: Vec<u64> = config.availability_mask.iter().copied().collect();
            out.push_str(&format!("mask = {}\n", list(&mask)));
        }
    };

    out.push_str("[config]\n");
    out.push_str(&format!("period = {}\n", config.period_slots));
    out.push_str(&format!(
        "latency_budget = {}\n",
        config.latency_budget_slots
    ));
    out.push_str(&format!(
        "max_periods_deferral = {}\n",
        config.max_periods_deferral
    ));
    push_config_body(&mut out, config, config.scheme.name());

    match &config.scheme {
        SchemeKind::SharedAssist(shared) => {
            out.push_str("\n[shared]\n");
            out.push_str(&format!("lbt_delay = {}\n", shared.lbt_delay_slots));
            match &shared.collision {
                CollisionSpec::Probability(p) => out.push_str(&format!("collision = {p}\n")),
                CollisionSpec::Contention {
                    contenders,
                    tx_prob,
                } => {
                    out.push_str(&format!("contenders = {contenders}\n"));
                    out.push_str(&format!("tx_prob = {tx_prob}\n"));
                }
            }
        }
        SchemeKind::MultiConfig(members) => {
            for (index, member) in members.iter().enumerate() {
                out.push_str(&format!("\n[multi.{index}]\n"));
                push_config_body(&mut out, member, member.scheme.name());
            }
        }
        _ => {}
    }

    out.push_str("\n[traffic]\n");
    match &scenario.traffic {
        TrafficModel::AlwaysAtSlot(slot) => {
            out.push_str("kind = always\n");
            out.push_str(&format!("slot = {slot}\n"));
        }
        TrafficModel::UniformOverSlots { lo, hi } => {
            out.push_str("kind = uniform\n");
            out.push_str(&format!("lo = {lo}\nhi = {hi}\n"));
        }
        TrafficModel::GeometricDelay { gamma } => {
            out.push_str("kind = geometric\n");
            out.push_str(&format!("gamma = {gamma}\n"));
        }
        TrafficModel::ExplicitPmf { p_none, per_to } => {
            out.push_str("kind = pmf\n");
            out.push_str(&format!("p_none = {p_none}\n"));
            if !per_to.is_empty() {
                let parts: Vec<String> = per_to.iter().map(f64::to_string).collect();
                out.push_str(&format!("p = {}\n", parts.join(",")));
            }
        }
    }

    out.push_str("\n[channel]\n");
    out.push_str(&format!("epsilon = {}\n", scenario.channel.epsilon));
    if !matches!(config.scheme, SchemeKind::SharedAssist(_))
        && scenario.channel.shared_collision != 0.0
    {
        out.push_str(&format!(
            "collision = {}\n",
            scenario.channel.shared_collision
        ));
    }
    let decode = match scenario.channel.decode_model {
        DecodeModel::AnySuccess => "any_success",
        DecodeModel::RvAware(_) => "rv_aware",
    };
    out.push_str(&format!("decode = {decode}\n"));

    out.push_str("\n[sim]\n");
    out.push_str(&format!("packets = {}\n", scenario.packets));
    out.push_str(&format!("seed = {}\n", scenario.master_seed));
    out.push_str(&format!(
        "slot_duration_ms = {}\n",
        scenario.slot_duration_ms
    ));
    out.push_str(&format!("id = {}\n", built.id));
    out
}

/// A parameter sweep: `section.key` plus the values to substitute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub section: String,
    pub key: String,
    pub values: Vec<String>,
}

const SWEEPABLE: &[&str] = &[
    "config.period",
    "config.t",
    "config.gap",
    "config.start",
    "config.k",
    "config.latency_budget",
    "config.max_periods_deferral",
    "traffic.slot",
    "traffic.lo",
    "traffic.hi",
    "traffic.gamma",
    "channel.epsilon",
    "channel.collision",
    "channel.contenders",
    "channel.tx_prob",
    "shared.lbt_delay",
    "shared.collision",
    "shared.contenders",
    "shared.tx_prob",
    "sim.packets",
    "sim.seed",
    "sim.slot_duration_ms",
];

impl SweepSpec {
    /// Parses `section.key=v1,v2,...` or `section.key=start:stop:step`.
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        let (path, values) = arg.split_once('=').ok_or_else(|| {
            CliError::Other(format!("sweep '{arg}' must look like param=v1,v2,..."))
        })?;
        let path = path.trim().to_ascii_lowercase();
        if !SWEEPABLE.contains(&path.as_str()) {
            return Err(CliError::BadSweepParam(path));
        }
        let (section, key) = path.split_once('.').expect("whitelisted paths are dotted");
        let values = if values.contains(':') {
            let parts: Vec<&str> = values.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::Other(format!(
                    "range sweep '{values}' must be start:stop:step"
                )));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Other(format!("malformed sweep bound '{s}'")))
            };
            let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            if step <= 0.0 || stop < start {
                return Err(CliError::Other(
                    "range sweep needs step > 0 and stop >= start".into(),
                ));
            }
            let mut values = Vec::new();
            let mut v = start;
            while v <= stop + step * 1e-9 {
                values.push(format_value(v));
                v += step;
            }
            values
        } else {
            values
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect()
        };
        if values.is_empty() {
            return Err(CliError::Other(format!("sweep '{arg}' has no values")));
        }
        Ok(Self {
            section: section.to_string(),
            key: key.to_string(),
            values,
        })
    }

    pub fn param(&self) -> String {
        format!("{}.{}", self.section, self.key)
    }
}

fn format_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}
