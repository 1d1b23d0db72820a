//! Scenario configuration: a flat INI-style key-value format, strictly
//! validated (unknown sections or keys are rejected with the offending
//! name) and round-trippable through [`ScenarioConfig::to_ini`].
//!
//! ```text
//! [spectrum]
//! kind = gaussian            # gaussian | lorentzian | tabulated
//! center_frequency = 100.0
//! width = 1.0                # closed forms only
//! # table_path = pulse.csv   # tabulated only
//!
//! [model]
//! variant = entangled_singles
//! m = 4                      # detectors, where applicable
//! n = 1                      # photons per pulse, where applicable
//!
//! [run]
//! eta = 1.0
//! trials = 100000
//! seed = 42
//! # m_list = 1,2,4,8,16      # scaling / loss-map sweeps
//! # n_list = 1,2,4,8
//! # eta_list = 0.05:1.0:0.05 # range or comma list
//! # window_half_width = 12.5
//! # grid_size = 4096
//!
//! [output]
//! path = report.csv
//! time_scale = 1.0
//! length_scale = 1.0
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

/// A configuration failure, carrying the offending field.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Spectrum selection, kept in configuration form so the file serializes
/// back verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumConfig {
    Gaussian { center_frequency: f64, width: f64 },
    Lorentzian { center_frequency: f64, width: f64 },
    Tabulated { table_path: PathBuf },
}

/// Model selection: a variant name plus the parameters it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub variant: VariantName,
    pub detectors: Option<u32>,
    pub photons: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantName {
    ClassicalCoherent,
    UnentangledSingles,
    EntangledSingles,
    Fock,
    EntangledFock,
    PartialPairs,
    TwinBeam,
}

impl VariantName {
    pub fn as_str(&self) -> &'static str {
        match self {
            VariantName::ClassicalCoherent => "classical_coherent",
            VariantName::UnentangledSingles => "unentangled_singles",
            VariantName::EntangledSingles => "entangled_singles",
            VariantName::Fock => "fock",
            VariantName::EntangledFock => "entangled_fock",
            VariantName::PartialPairs => "partial_pairs",
            VariantName::TwinBeam => "twin_beam",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "classical_coherent" => VariantName::ClassicalCoherent,
            "unentangled_singles" => VariantName::UnentangledSingles,
            "entangled_singles" => VariantName::EntangledSingles,
            "fock" => VariantName::Fock,
            "entangled_fock" => VariantName::EntangledFock,
            "partial_pairs" => VariantName::PartialPairs,
            "twin_beam" => VariantName::TwinBeam,
            _ => return None,
        })
    }

    /// Whether the variant takes a detector-count parameter.
    pub fn takes_detectors(&self) -> bool {
        !matches!(self, VariantName::Fock | VariantName::TwinBeam)
    }

    /// Whether the variant takes a photons-per-pulse parameter.
    pub fn takes_photons(&self) -> bool {
        matches!(
            self,
            VariantName::ClassicalCoherent | VariantName::Fock | VariantName::EntangledFock
        )
    }
}

/// A validated, normalized scenario with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub spectrum: SpectrumConfig,
    pub model: ModelConfig,
    pub eta: f64,
    pub trials: u64,
    pub seed: u64,
    pub m_list: Option<Vec<u32>>,
    pub n_list: Option<Vec<u32>>,
    pub eta_list: Option<Vec<f64>>,
    pub window_half_width: Option<f64>,
    pub grid_size: usize,
    pub output_path: PathBuf,
    pub time_scale: f64,
    pub length_scale: f64,
}

struct RawItem {
    key: String,
    value: String,
    line: usize,
}

struct RawSection {
    name: String,
    line: usize,
    items: Vec<RawItem>,
}

fn parse_ini(text: &str) -> Result<Vec<RawSection>, ConfigError> {
    let mut sections: Vec<RawSection> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        let line = match line.find(['#', ';']) {
            Some(pos) => line[..pos].trim_end(),
            None => line,
        };
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| {
                    ConfigError::new(format!("line {}", idx + 1), "unterminated section header")
                })?
                .trim()
                .to_string();
            sections.push(RawSection {
                name,
                line: idx + 1,
                items: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::new(
                format!("line {}", idx + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let section = sections.last_mut().ok_or_else(|| {
            ConfigError::new(
                format!("line {}", idx + 1),
                "key outside of any [section]",
            )
        })?;
        section.items.push(RawItem {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line: idx + 1,
        });
    }
    Ok(sections)
}

/// One section's items with strict known-key accounting.
struct SectionReader {
    section: String,
    items: Vec<(String, String)>,
}

impl SectionReader {
    fn take(&mut self, key: &str) -> Option<String> {
        let pos = self.items.iter().position(|(k, _)| k == key)?;
        Some(self.items.remove(pos).1)
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some((k, _)) = self.items.first() {
            return Err(ConfigError::new(
                format!("{}.{}", self.section, k),
                "unknown key",
            ));
        }
        Ok(())
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{}", self.section, key)
    }
}

fn reader(
    sections: &mut Vec<RawSection>,
    name: &str,
) -> Result<Option<SectionReader>, ConfigError> {
    let pos = match sections.iter().position(|s| s.name == name) {
        Some(p) => p,
        None => return Ok(None),
    };
    let sect = sections.remove(pos);
    let mut seen = Vec::new();
    let mut items = Vec::new();
    for item in sect.items {
        if seen.contains(&item.key) {
            return Err(ConfigError::new(
                format!("{}.{}", name, item.key),
                format!("duplicate key (line {})", item.line),
            ));
        }
        seen.push(item.key.clone());
        items.push((item.key, item.value));
    }
    Ok(Some(SectionReader {
        section: name.to_string(),
        items,
    }))
}

fn parse_f64(field: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>()
        .map_err(|_| ConfigError::new(field, format!("expected a number, got `{v}`")))
}

fn parse_u64(field: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse::<u64>()
        .map_err(|_| ConfigError::new(field, format!("expected a non-negative integer, got `{v}`")))
}

fn parse_u32(field: &str, v: &str) -> Result<u32, ConfigError> {
    v.parse::<u32>()
        .map_err(|_| ConfigError::new(field, format!("expected a non-negative integer, got `{v}`")))
}

fn parse_u32_list(field: &str, v: &str) -> Result<Vec<u32>, ConfigError> {
    if v.trim().is_empty() {
        return Err(ConfigError::new(field, "empty list"));
    }
    v.split(',')
        .map(|s| parse_u32(field, s.trim()))
        .collect::<Result<Vec<_>, _>>()
}

/// Comma list (`0.1,0.2`) or inclusive range (`start:stop:step`).
fn parse_f64_list(field: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let v = v.trim();
    if v.is_empty() {
        return Err(ConfigError::new(field, "empty list"));
    }
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError::new(field, "range syntax is start:stop:step"));
        }
        let start = parse_f64(field, parts[0].trim())?;
        let stop = parse_f64(field, parts[1].trim())?;
        let step = parse_f64(field, parts[2].trim())?;
        if !(step > 0.0 && stop >= start) {
            return Err(ConfigError::new(field, "range needs stop >= start, step > 0"));
        }
        let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
        return Ok((0..count).map(|k| start + k as f64 * step).collect());
    }
    v.split(',')
        .map(|s| parse_f64(field, s.trim()))
        .collect::<Result<Vec<_>, _>>()
}

/// Parses and validates configuration text, applying defaults and
/// checking every invariant that does not depend on the subcommand.
pub fn validate(text: &str, base_dir: &Path) -> Result<ScenarioConfig, ConfigError> {
    let mut sections = parse_ini(text)?;

    let mut spectrum_sec = reader(&mut sections, "spectrum")?
        .ok_or_else(|| ConfigError::new("spectrum", "missing [spectrum] section"))?;
    let mut model_sec = reader(&mut sections, "model")?
        .ok_or_else(|| ConfigError::new("model", "missing [model] section"))?;
    let run_sec = reader(&mut sections, "run")?;
    let output_sec = reader(&mut sections, "output")?;
    if let Some(s) = sections.first() {
        return Err(ConfigError::new(
            &s.name,
            format!("unknown section (line {})", s.line),
        ));
    }

    // [spectrum]
    let kind = spectrum_sec
        .take("kind")
        .ok_or_else(|| ConfigError::new("spectrum.kind", "required"))?;
    let center = spectrum_sec.take("center_frequency");
    let width = spectrum_sec.take("width");
    let table_path = spectrum_sec.take("table_path");
    let spectrum = match kind.as_str() {
        "gaussian" | "lorentzian" => {
            if table_path.is_some() {
                return Err(ConfigError::new(
                    spectrum_sec.field("table_path"),
                    format!("not applicable to kind `{kind}`"),
                ));
            }
            let center_frequency = match center {
                Some(v) => parse_f64(&spectrum_sec.field("center_frequency"), &v)?,
                None => 100.0,
            };
            let w = width
                .ok_or_else(|| ConfigError::new(spectrum_sec.field("width"), "required"))?;
            let width = parse_f64(&spectrum_sec.field("width"), &w)?;
            if !(width.is_finite() && width > 0.0) {
                return Err(ConfigError::new(
                    spectrum_sec.field("width"),
                    format!("must be positive and finite, got {width}"),
                ));
            }
            if kind == "gaussian" {
                SpectrumConfig::Gaussian {
                    center_frequency,
                    width,
                }
            } else {
                SpectrumConfig::Lorentzian {
                    center_frequency,
                    width,
                }
            }
        }
        "tabulated" => {
            if width.is_some() || center.is_some() {
                return Err(ConfigError::new(
                    spectrum_sec.field(if width.is_some() {
                        "width"
                    } else {
                        "center_frequency"
                    }),
                    "not applicable to tabulated spectra (taken from the table)",
                ));
            }
            let p = table_path
                .ok_or_else(|| ConfigError::new(spectrum_sec.field("table_path"), "required"))?;
            let path = base_dir.join(p);
            if !path.is_file() {
                return Err(ConfigError::new(
                    spectrum_sec.field("table_path"),
                    format!("file not found: {}", path.display()),
                ));
            }
            SpectrumConfig::Tabulated { table_path: path }
        }
        other => {
            return Err(ConfigError::new(
                spectrum_sec.field("kind"),
                format!("unknown spectrum kind `{other}` (gaussian | lorentzian | tabulated)"),
            ));
        }
    };
    spectrum_sec.finish()?;

    // [model]
    let variant_raw = model_sec
        .take("variant")
        .ok_or_else(|| ConfigError::new("model.variant", "required"))?;
    let variant = VariantName::parse(&variant_raw).ok_or_else(|| {
        ConfigError::new(
            model_sec.field("variant"),
            format!("unknown variant `{variant_raw}`"),
        )
    })?;
    let detectors = model_sec
        .take("m")
        .map(|v| parse_u32(&model_sec.field("m"), &v))
        .transpose()?;
    let photons = model_sec
        .take("n")
        .map(|v| parse_u32(&model_sec.field("n"), &v))
        .transpose()?;
    if detectors.is_some() && !variant.takes_detectors() {
        return Err(ConfigError::new(
            model_sec.field("m"),
            format!("variant `{}` does not take a detector count", variant.as_str()),
        ));
    }
    if photons.is_some() && !variant.takes_photons() {
        return Err(ConfigError::new(
            model_sec.field("n"),
            format!("variant `{}` does not take a photon number", variant.as_str()),
        ));
    }
    if let Some(m) = detectors {
        check_detectors(&model_sec.field("m"), variant, m)?;
    }
    if let Some(n) = photons {
        if n < 1 {
            return Err(ConfigError::new(model_sec.field("n"), "must be >= 1"));
        }
    }
    model_sec.finish()?;

    // [run]
    let mut eta = 1.0;
    let mut trials = 100_000u64;
    let mut seed = 0u64;
    let mut m_list = None;
    let mut n_list = None;
    let mut eta_list = None;
    let mut window_half_width = None;
    let mut grid_size = 4096usize;
    if let Some(mut run) = run_sec {
        if let Some(v) = run.take("eta") {
            eta = parse_f64(&run.field("eta"), &v)?;
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(ConfigError::new(
                    run.field("eta"),
                    format!("must be in (0, 1], got {eta}"),
                ));
            }
        }
        if let Some(v) = run.take("trials") {
            trials = parse_u64(&run.field("trials"), &v)?;
            if trials < 1 {
                return Err(ConfigError::new(run.field("trials"), "must be >= 1"));
            }
        }
        if let Some(v) = run.take("seed") {
            seed = parse_u64(&run.field("seed"), &v)?;
        }
        if let Some(v) = run.take("m_list") {
            let list = parse_u32_list(&run.field("m_list"), &v)?;
            for &m in &list {
                check_detectors(&run.field("m_list"), variant, m)?;
            }
            if !variant.takes_detectors() {
                return Err(ConfigError::new(
                    run.field("m_list"),
                    format!("variant `{}` does not take a detector count", variant.as_str()),
                ));
            }
            m_list = Some(list);
        }
        if let Some(v) = run.take("n_list") {
            let list = parse_u32_list(&run.field("n_list"), &v)?;
            if list.iter().any(|&n| n < 1) {
                return Err(ConfigError::new(run.field("n_list"), "entries must be >= 1"));
            }
            if !variant.takes_photons() {
                return Err(ConfigError::new(
                    run.field("n_list"),
                    format!("variant `{}` does not take a photon number", variant.as_str()),
                ));
            }
            n_list = Some(list);
        }
        if let Some(v) = run.take("eta_list") {
            let list = parse_f64_list(&run.field("eta_list"), &v)?;
            for &e in &list {
                if !(e > 0.0 && e <= 1.0) {
                    return Err(ConfigError::new(
                        run.field("eta_list"),
                        format!("entries must be in (0, 1], got {e}"),
                    ));
                }
            }
            eta_list = Some(list);
        }
        if let Some(v) = run.take("window_half_width") {
            let w = parse_f64(&run.field("window_half_width"), &v)?;
            if !(w.is_finite() && w > 0.0) {
                return Err(ConfigError::new(
                    run.field("window_half_width"),
                    format!("must be positive and finite, got {w}"),
                ));
            }
            window_half_width = Some(w);
        }
        if let Some(v) = run.take("grid_size") {
            grid_size = parse_u64(&run.field("grid_size"), &v)? as usize;
            if grid_size < 1024 {
                return Err(ConfigError::new(
                    run.field("grid_size"),
                    format!("must be >= 1024, got {grid_size}"),
                ));
            }
        }
        run.finish()?;
    }

    // [output]
    let mut output_path = PathBuf::from("report.csv");
    let mut time_scale = 1.0;
    let mut length_scale = 1.0;
    if let Some(mut out) = output_sec {
        if let Some(v) = out.take("path") {
            if v.is_empty() {
                return Err(ConfigError::new(out.field("path"), "empty path"));
            }
            output_path = PathBuf::from(v);
        }
        if let Some(v) = out.take("time_scale") {
            time_scale = parse_f64(&out.field("time_scale"), &v)?;
            if !(time_scale.is_finite() && time_scale > 0.0) {
                return Err(ConfigError::new(out.field("time_scale"), "must be positive"));
            }
        }
        if let Some(v) = out.take("length_scale") {
            length_scale = parse_f64(&out.field("length_scale"), &v)?;
            if !(length_scale.is_finite() && length_scale > 0.0) {
                return Err(ConfigError::new(out.field("length_scale"), "must be positive"));
            }
        }
        out.finish()?;
    }

    Ok(ScenarioConfig {
        spectrum,
        model: ModelConfig {
            variant,
            detectors,
            photons,
        },
        eta,
        trials,
        seed,
        m_list,
        n_list,
        eta_list,
        window_half_width,
        grid_size,
        output_path,
        time_scale,
        length_scale,
    })
}

fn check_detectors(field: &str, variant: VariantName, m: u32) -> Result<(), ConfigError> {
    if m < 1 {
        return Err(ConfigError::new(field, "must be >= 1"));
    }
    if variant == VariantName::PartialPairs && (!m.is_multiple_of(2) || m < 2) {
        return Err(ConfigError::new(
            field,
            format!("partial_pairs needs an even detector count >= 2, got {m}"),
        ));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Canonical INI form; `validate(to_ini(c)) == c`.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        s.push_str("[spectrum]\n");
        match &self.spectrum {
            SpectrumConfig::Gaussian {
                center_frequency,
                width,
            } => {
                s.push_str("kind = gaussian\n");
                s.push_str(&format!("center_frequency = {center_frequency}\n"));
                s.push_str(&format!("width = {width}\n"));
            }
            SpectrumConfig::Lorentzian {
                center_frequency,
                width,
            } => {
                s.push_str("kind = lorentzian\n");
                s.push_str(&format!("center_frequency = {center_frequency}\n"));
                s.push_str(&format!("width = {width}\n"));
            }
            SpectrumConfig::Tabulated { table_path } => {
                s.push_str("kind = tabulated\n");
                s.push_str(&format!("table_path = {}\n", table_path.display()));
            }
        }
        s.push_str("\n[model]\n");
        s.push_str(&format!("variant = {}\n", self.model.variant.as_str()));
        if let Some(m) = self.model.detectors {
            s.push_str(&format!("m = {m}\n"));
        }
        if let Some(n) = self.model.photons {
            s.push_str(&format!("n = {n}\n"));
        }
        s.push_str("\n[run]\n");
        s.push_str(&format!("eta = {}\n", self.eta));
        s.push_str(&format!("trials = {}\n", self.trials));
        s.push_str(&format!("seed = {}\n", self.seed));
        if let Some(list) = &self.m_list {
            s.push_str(&format!("m_list = {}\n", join(list)));
        }
        if let Some(list) = &self.n_list {
            s.push_str(&format!("n_list = {}\n", join(list)));
        }
        if let Some(list) = &self.eta_list {
            s.push_str(&format!("eta_list = {}\n", join(list)));
        }
        if let Some(w) = self.window_half_width {
            s.push_str(&format!("window_half_width = {w}\n"));
        }
        s.push_str(&format!("grid_size = {}\n", self.grid_size));
        s.push_str("\n[output]\n");
        s.push_str(&format!("path = {}\n", self.output_path.display()));
        s.push_str(&format!("time_scale = {}\n", self.time_scale));
        s.push_str(&format!("length_scale = {}\n", self.length_scale));
        s
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[spectrum]
kind = gaussian
width = 1.0

[model]
variant = entangled_singles
m = 4
";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = validate(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(c.eta, 1.0);
        assert_eq!(c.trials, 100_000);
        assert_eq!(c.seed, 0);
        assert_eq!(c.grid_size, 4096);
        assert_eq!(c.output_path, PathBuf::from("report.csv"));
        assert_eq!(c.time_scale, 1.0);
        match c.spectrum {
            SpectrumConfig::Gaussian {
                center_frequency, ..
            } => assert_eq!(center_frequency, 100.0),
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = format!("{MINIMAL}\n[run]\nbogus_key = 3\n");
        let err = validate(&text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "run.bogus_key");
    }

    #[test]
    fn unknown_section_rejected() {
        let text = format!("{MINIMAL}\n[plotting]\nstyle = heat\n");
        let err = validate(&text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "plotting");
    }

    #[test]
    fn eta_out_of_range() {
        let text = format!("{MINIMAL}\n[run]\neta = 1.2\n");
        let err = validate(&text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "run.eta");
    }

    #[test]
    fn partial_pairs_parity() {
        let text = "\
[spectrum]
kind = gaussian
width = 1.0

[model]
variant = partial_pairs
m = 3
";
        let err = validate(text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "model.m");
    }

    #[test]
    fn inapplicable_parameter_rejected() {
        let text = "\
[spectrum]
kind = gaussian
width = 1.0

[model]
variant = twin_beam
m = 2
";
        let err = validate(text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "model.m");
    }

    #[test]
    fn empty_list_rejected() {
        let text = format!("{MINIMAL}\n[run]\nm_list =\n");
        let err = validate(&text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "run.m_list");
    }

    #[test]
    fn eta_range_syntax() {
        let text = format!("{MINIMAL}\n[run]\neta_list = 0.2:0.6:0.2\n");
        let c = validate(&text, Path::new(".")).unwrap();
        let list = c.eta_list.unwrap();
        assert_eq!(list.len(), 3);
        assert!((list[0] - 0.2).abs() < 1e-12);
        assert!((list[2] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = "\
[spectrum]
kind = gaussian
width = 1.0
width = 2.0

[model]
variant = twin_beam
";
        let err = validate(text, Path::new(".")).unwrap_err();
        assert_eq!(err.field, "spectrum.width");
    }

    #[test]
    fn missing_table_file_rejected() {
        let text = "\
[spectrum]
kind = tabulated
table_path = does-not-exist.csv

[model]
variant = twin_beam
";
        let err = validate(text, Path::new("/tmp")).unwrap_err();
        assert_eq!(err.field, "spectrum.table_path");
    }

    #[test]
    fn round_trip_is_stable() {
        let text = format!(
            "{MINIMAL}\n[run]\neta = 0.9\ntrials = 5000\nseed = 7\nm_list = 2,4,8,16\n\n[output]\npath = out.csv\ntime_scale = 2.5\n"
        );
        let c1 = validate(&text, Path::new(".")).unwrap();
        let c2 = validate(&c1.to_ini(), Path::new(".")).unwrap();
        assert_eq!(c1, c2);
        let c3 = validate(&c2.to_ini(), Path::new(".")).unwrap();
        assert_eq!(c2, c3);
    }
}
