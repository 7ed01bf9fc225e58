//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! name = box_half
//! module = fse_spectral
//! alpha = 0.5
//! times = 0.5, 1.0
//!
//! [hamiltonian]
//! kind = box
//!
//! [grid]
//! x_min = 0.0
//! x_max = 3.141592653589793
//! n = 128
//!
//! [initial]
//! profile = eigenmode
//! mode = 0
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::caputo::L1Scheme;
use crate::error::{Error, Result};
use crate::hyperbolic::{Conjugation, MomentMode};
use crate::mlf::FractionalOrder;
use crate::spectral::HamiltonianSpec;
use crate::wave::{Grid, Observable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Mlf,
    FseSpectral,
    FseCaputo,
    FseOperatorForm,
    Comb,
    Poles,
    Hyperbolic,
}

impl ModuleKind {
    pub const ALL: [ModuleKind; 7] = [
        ModuleKind::Mlf,
        ModuleKind::FseSpectral,
        ModuleKind::FseCaputo,
        ModuleKind::FseOperatorForm,
        ModuleKind::Comb,
        ModuleKind::Poles,
        ModuleKind::Hyperbolic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleKind::Mlf => "mlf",
            ModuleKind::FseSpectral => "fse_spectral",
            ModuleKind::FseCaputo => "fse_caputo",
            ModuleKind::FseOperatorForm => "fse_operator_form",
            ModuleKind::Comb => "comb",
            ModuleKind::Poles => "poles",
            ModuleKind::Hyperbolic => "hyperbolic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ModuleKind::ALL.into_iter().find(|m| m.as_str() == s)
    }

    fn evolves(self) -> bool {
        !matches!(self, ModuleKind::Mlf | ModuleKind::Poles)
    }

    fn needs_grid(self) -> bool {
        matches!(self, ModuleKind::FseSpectral | ModuleKind::FseCaputo | ModuleKind::FseOperatorForm | ModuleKind::Comb)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianChoice {
    Box,
    Harmonic,
    Potential(Vec<f64>),
    Dilation { omega: f64 },
}

impl HamiltonianChoice {
    pub fn spec(&self, hbar: f64) -> HamiltonianSpec {
        match self {
            HamiltonianChoice::Box => HamiltonianSpec::particle_in_box(hbar),
            HamiltonianChoice::Harmonic => HamiltonianSpec::harmonic(hbar),
            HamiltonianChoice::Potential(v) => HamiltonianSpec::potential(v.clone(), hbar),
            HamiltonianChoice::Dilation { omega } => HamiltonianSpec::dilation(*omega, hbar),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.x_min, self.x_max, self.n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    /// k-th eigenfunction of the scenario Hamiltonian.
    Eigenmode { mode: usize },
    /// `amp · exp(-a (x - center)²)`; without `amp` the state is normalized.
    Gaussian { center: f64, a: f64, amp: Option<f64> },
    /// Unit-norm Hermite-Gaussian.
    HermiteGaussian { order: u32, center: f64, a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub mlf: f64,
    pub quad: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { mlf: 1e-12, quad: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlfSection {
    pub points: Vec<Complex64>,
}

impl Default for MlfSection {
    fn default() -> Self {
        MlfSection { points: vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaputoSection {
    pub dt: f64,
    pub scheme: L1Scheme,
}

/// Backbone grid `[-y_max, y_max]` with `ny` (odd) nodes and a Gaussian
/// backbone profile `exp(-y_a (y - y_center)²)`, normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSection {
    pub y_max: f64,
    pub ny: usize,
    pub y_center: f64,
    pub y_a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicSection {
    pub mode: MomentMode,
    /// `None` pins `ω = 1/(2ħ)`.
    pub omega: Option<f64>,
    pub conjugation: Conjugation,
}

impl Default for HyperbolicSection {
    fn default() -> Self {
        HyperbolicSection { mode: MomentMode::Semiclassical, omega: None, conjugation: Conjugation::OfValue }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolesSection {
    /// Explicit spectrum; otherwise the lowest `count` eigenvalues of the
    /// scenario Hamiltonian.
    pub eigenvalues: Option<Vec<f64>>,
    pub count: usize,
}

impl Default for PolesSection {
    fn default() -> Self {
        PolesSection { eigenvalues: None, count: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub module: ModuleKind,
    pub alpha: FractionalOrder,
    pub hbar: f64,
    pub times: Vec<f64>,
    pub output_dir: PathBuf,
    pub observables: Vec<Observable>,
    pub hamiltonian: Option<HamiltonianChoice>,
    pub grid: Option<GridSpec>,
    pub initial: Option<InitialSpec>,
    pub tolerances: Tolerances,
    pub mlf: MlfSection,
    pub caputo: Option<CaputoSection>,
    pub comb: Option<CombSection>,
    pub hyperbolic: HyperbolicSection,
    pub poles: PolesSection,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("", &["name", "module", "alpha", "hbar", "times", "output_dir", "observables"]),
    ("hamiltonian", &["kind", "omega", "values"]),
    ("grid", &["x_min", "x_max", "n"]),
    ("initial", &["profile", "mode", "center", "a", "amp", "order"]),
    ("tolerances", &["mlf", "quad"]),
    ("mlf", &["z_re", "z_im"]),
    ("caputo", &["dt", "scheme"]),
    ("comb", &["y_max", "ny", "y_center", "y_a"]),
    ("hyperbolic", &["mode", "omega", "conjugation"]),
    ("poles", &["eigenvalues", "count"]),
];

/// Raw `(section, key) → (value, line)` map.
struct Entries {
    map: BTreeMap<(String, String), (String, usize)>,
    present: Vec<String>,
}

fn qualified(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    }
}

fn lex(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    let mut present = Vec::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line: line_no,
                key: line.to_string(),
                reason: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if name.is_empty() || !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(Error::Parse { line: line_no, key: format!("[{name}]"), reason: "unknown section".into() });
            }
            if present.iter().any(|p| p == name) {
                return Err(Error::Parse {
                    line: line_no,
                    key: format!("[{name}]"),
                    reason: "section appears twice".into(),
                });
            }
            present.push(name.to_string());
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            key: line.to_string(),
            reason: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let allowed = SECTIONS.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(Error::Parse { line: line_no, key: qualified(&section, key), reason: "unknown key".into() });
        }
        if value.is_empty() {
            return Err(Error::Parse { line: line_no, key: qualified(&section, key), reason: "empty value".into() });
        }
        if map.insert((section.clone(), key.to_string()), (value.to_string(), line_no)).is_some() {
            return Err(Error::Parse { line: line_no, key: qualified(&section, key), reason: "duplicate key".into() });
        }
    }
    Ok(Entries { map, present })
}

impl Entries {
    fn has_section(&self, s: &str) -> bool {
        self.present.iter().any(|p| p == s)
    }

    fn raw(&self, section: &str, key: &str) -> Option<(&str, usize)> {
        self.map.get(&(section.to_string(), key.to_string())).map(|(v, l)| (v.as_str(), *l))
    }

    fn parse_err(section: &str, key: &str, line: usize, reason: impl Into<String>) -> Error {
        Error::Parse { line, key: qualified(section, key), reason: reason.into() }
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<(f64, usize)>> {
        let Some((v, line)) = self.raw(section, key) else { return Ok(None) };
        let x: f64 = v.parse().map_err(|_| Self::parse_err(section, key, line, format!("`{v}` is not a number")))?;
        if !x.is_finite() {
            return Err(Self::parse_err(section, key, line, "value must be finite"));
        }
        Ok(Some((x, line)))
    }

    fn uint(&self, section: &str, key: &str) -> Result<Option<(usize, usize)>> {
        let Some((v, line)) = self.raw(section, key) else { return Ok(None) };
        let x = v
            .parse()
            .map_err(|_| Self::parse_err(section, key, line, format!("`{v}` is not a non-negative integer")))?;
        Ok(Some((x, line)))
    }

    fn floats(&self, section: &str, key: &str) -> Result<Option<(Vec<f64>, usize)>> {
        let Some((v, line)) = self.raw(section, key) else { return Ok(None) };
        let xs = v
            .split(',')
            .map(|s| {
                let s = s.trim();
                match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(Self::parse_err(section, key, line, format!("`{s}` is not a finite number"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((xs, line)))
    }

    fn word(&self, section: &str, key: &str) -> Option<(&str, usize)> {
        self.raw(section, key)
    }

    fn require_section(&self, s: &str, key: &str, why: &str) -> Result<()> {
        if self.has_section(s) {
            Ok(())
        } else {
            Err(invalid(key, None, format!("section [{s}] is required {why}")))
        }
    }
}

fn invalid(key: &str, line: Option<usize>, reason: impl Into<String>) -> Error {
    Error::Validation { key: key.to_string(), line, reason: reason.into() }
}

fn required<T>(v: Option<T>, key: &str, why: &str) -> Result<T> {
    v.ok_or_else(|| invalid(key, None, format!("missing, required {why}")))
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Parse and fully validate a scenario file.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    parse_inner(text, None)
}

/// Parse with `module` forced, as the CLI subcommands do. A `module` key in
/// the text is optional and, if present, overridden.
pub fn parse_config_as(text: &str, module: ModuleKind) -> Result<ScenarioConfig> {
    parse_inner(text, Some(module))
}

fn parse_inner(text: &str, forced: Option<ModuleKind>) -> Result<ScenarioConfig> {
    let e = lex(text)?;

    let (name, name_line) = required(e.word("", "name"), "name", "for every scenario")?;
    if !valid_name(name) {
        return Err(invalid("name", Some(name_line), "use letters, digits, `_`, `-` or `.`"));
    }
    let module = match (forced, e.word("", "module")) {
        (Some(m), _) => m,
        (None, m) => {
            let (m, m_line) = required(m, "module", "for every scenario")?;
            ModuleKind::parse(m).ok_or_else(|| {
                invalid(
                    "module",
                    Some(m_line),
                    format!("unknown module `{m}`; expected one of mlf, fse_spectral, fse_caputo, fse_operator_form, comb, poles, hyperbolic"),
                )
            })?
        }
    };
    let why = format!("for module {}", module.as_str());

    let alpha = match e.float("", "alpha")? {
        Some((a, line)) => {
            FractionalOrder::new(a).map_err(|_| invalid("alpha", Some(line), format!("alpha = {a} outside (0, 1]")))?
        }
        None => FractionalOrder::HALF,
    };
    let hbar = match e.float("", "hbar")? {
        Some((h, _)) if h > 0.0 => h,
        Some((h, line)) => return Err(invalid("hbar", Some(line), format!("hbar = {h} must be positive"))),
        None => 1.0,
    };

    let times = match e.floats("", "times")? {
        Some((ts, line)) => {
            if ts.iter().any(|&t| t < 0.0) {
                return Err(invalid("times", Some(line), "times must be >= 0"));
            }
            if ts.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("times", Some(line), "times must be strictly increasing"));
            }
            ts
        }
        None if module.evolves() => return Err(invalid("times", None, format!("missing, required {why}"))),
        None => Vec::new(),
    };

    let output_dir = match e.word("", "output_dir") {
        Some((d, _)) => PathBuf::from(d),
        None => PathBuf::from("out").join(name),
    };

    let observables = match e.word("", "observables") {
        Some((v, line)) => v
            .split(',')
            .map(|s| {
                let s = s.trim();
                Observable::parse(s)
                    .ok_or_else(|| invalid("observables", Some(line), format!("unknown observable `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => vec![Observable::Position, Observable::SecondMoment],
    };

    let grid = if e.has_section("grid") {
        let x_min = required(e.float("grid", "x_min")?, "grid.x_min", "in [grid]")?;
        let x_max = required(e.float("grid", "x_max")?, "grid.x_max", "in [grid]")?;
        let n = required(e.uint("grid", "n")?, "grid.n", "in [grid]")?;
        let spec = GridSpec { x_min: x_min.0, x_max: x_max.0, n: n.0 };
        spec.grid().map_err(|err| invalid("grid", Some(x_min.1), err.to_string()))?;
        Some(spec)
    } else {
        None
    };

    let hamiltonian = if e.has_section("hamiltonian") {
        let (kind, line) = required(e.word("hamiltonian", "kind"), "hamiltonian.kind", "in [hamiltonian]")?;
        let h = match kind {
            "box" => HamiltonianChoice::Box,
            "harmonic" => HamiltonianChoice::Harmonic,
            "potential" => {
                let (v, vline) =
                    required(e.floats("hamiltonian", "values")?, "hamiltonian.values", "for kind = potential")?;
                match grid {
                    Some(g) if g.n != v.len() => {
                        return Err(invalid(
                            "hamiltonian.values",
                            Some(vline),
                            format!("{} values for a grid of {} points", v.len(), g.n),
                        ))
                    }
                    _ => {}
                }
                HamiltonianChoice::Potential(v)
            }
            "dilation" => {
                let (omega, oline) =
                    required(e.float("hamiltonian", "omega")?, "hamiltonian.omega", "for kind = dilation")?;
                if omega <= 0.0 {
                    return Err(invalid("hamiltonian.omega", Some(oline), "omega must be positive"));
                }
                HamiltonianChoice::Dilation { omega }
            }
            other => {
                return Err(invalid(
                    "hamiltonian.kind",
                    Some(line),
                    format!("unknown kind `{other}`; expected box, harmonic, potential or dilation"),
                ))
            }
        };
        Some(h)
    } else {
        None
    };

    let initial = if e.has_section("initial") {
        let (p, line) = required(e.word("initial", "profile"), "initial.profile", "in [initial]")?;
        let center = e.float("initial", "center")?.map(|v| v.0).unwrap_or(0.0);
        let a = match e.float("initial", "a")? {
            Some((a, _)) if a > 0.0 => a,
            Some((a, l)) => return Err(invalid("initial.a", Some(l), format!("a = {a} must be positive"))),
            None => 1.0,
        };
        let spec = match p {
            "eigenmode" => InitialSpec::Eigenmode { mode: e.uint("initial", "mode")?.map(|v| v.0).unwrap_or(0) },
            "gaussian" => InitialSpec::Gaussian { center, a, amp: e.float("initial", "amp")?.map(|v| v.0) },
            "hermite_gaussian" => {
                let order = e.uint("initial", "order")?.map(|v| v.0).unwrap_or(0);
                if order > 60 {
                    return Err(invalid("initial.order", None, "order must be <= 60"));
                }
                InitialSpec::HermiteGaussian { order: order as u32, center, a }
            }
            other => {
                return Err(invalid(
                    "initial.profile",
                    Some(line),
                    format!("unknown profile `{other}`; expected eigenmode, gaussian or hermite_gaussian"),
                ))
            }
        };
        Some(spec)
    } else {
        None
    };

    let mut tolerances = Tolerances::default();
    for (key, slot) in [("mlf", &mut tolerances.mlf), ("quad", &mut tolerances.quad)] {
        if let Some((v, line)) = e.float("tolerances", key)? {
            if v <= 0.0 {
                return Err(invalid(&qualified("tolerances", key), Some(line), "tolerance must be positive"));
            }
            *slot = v;
        }
    }

    let mlf = match (e.floats("mlf", "z_re")?, e.floats("mlf", "z_im")?) {
        (None, None) => MlfSection::default(),
        (Some((re, line)), im) => {
            let im = im.map(|v| v.0).unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(invalid("mlf.z_im", Some(line), "z_re and z_im must have the same length"));
            }
            MlfSection { points: re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect() }
        }
        (None, Some((_, line))) => return Err(invalid("mlf.z_re", Some(line), "z_im given without z_re")),
    };

    let caputo = if e.has_section("caputo") {
        let (dt, line) = required(e.float("caputo", "dt")?, "caputo.dt", "in [caputo]")?;
        if dt <= 0.0 {
            return Err(invalid("caputo.dt", Some(line), "dt must be positive"));
        }
        let scheme = match e.word("caputo", "scheme") {
            None | Some(("corrected", _)) => L1Scheme::Corrected,
            Some(("plain", _)) => L1Scheme::Plain,
            Some((other, l)) => {
                return Err(invalid(
                    "caputo.scheme",
                    Some(l),
                    format!("unknown scheme `{other}`; expected plain or corrected"),
                ))
            }
        };
        Some(CaputoSection { dt, scheme })
    } else {
        None
    };

    let comb = if e.has_section("comb") {
        let (y_max, line) = required(e.float("comb", "y_max")?, "comb.y_max", "in [comb]")?;
        let (ny, nline) = required(e.uint("comb", "ny")?, "comb.ny", "in [comb]")?;
        if y_max <= 0.0 {
            return Err(invalid("comb.y_max", Some(line), "y_max must be positive"));
        }
        if ny % 2 == 0 || ny < 9 {
            return Err(invalid("comb.ny", Some(nline), "ny must be odd and at least 9"));
        }
        let y_a = match e.float("comb", "y_a")? {
            Some((a, _)) if a > 0.0 => a,
            Some((a, l)) => return Err(invalid("comb.y_a", Some(l), format!("y_a = {a} must be positive"))),
            None => 0.5,
        };
        Some(CombSection { y_max, ny, y_center: e.float("comb", "y_center")?.map(|v| v.0).unwrap_or(0.0), y_a })
    } else {
        None
    };

    let mut hyperbolic = HyperbolicSection::default();
    if let Some((m, line)) = e.word("hyperbolic", "mode") {
        hyperbolic.mode = match m {
            "standard" => MomentMode::Standard,
            "semiclassical" => MomentMode::Semiclassical,
            other => return Err(invalid("hyperbolic.mode", Some(line), format!("unknown mode `{other}`"))),
        };
    }
    if let Some((w, line)) = e.float("hyperbolic", "omega")? {
        if w <= 0.0 {
            return Err(invalid("hyperbolic.omega", Some(line), "omega must be positive"));
        }
        hyperbolic.omega = Some(w);
    }
    if let Some((c, line)) = e.word("hyperbolic", "conjugation") {
        hyperbolic.conjugation = match c {
            "value" => Conjugation::OfValue,
            "function" => Conjugation::OfFunction,
            other => {
                return Err(invalid("hyperbolic.conjugation", Some(line), format!("unknown conjugation `{other}`")))
            }
        };
    }

    let mut poles = PolesSection::default();
    if let Some((v, _)) = e.floats("poles", "eigenvalues")? {
        poles.eigenvalues = Some(v);
    }
    if let Some((c, line)) = e.uint("poles", "count")? {
        if c == 0 {
            return Err(invalid("poles.count", Some(line), "count must be positive"));
        }
        poles.count = c;
    }

    // module requirements
    if module.needs_grid() {
        e.require_section("grid", "grid", &why)?;
        e.require_section("hamiltonian", "hamiltonian", &why)?;
        e.require_section("initial", "initial", &why)?;
    }
    match module {
        ModuleKind::FseCaputo => e.require_section("caputo", "caputo", &why)?,
        ModuleKind::Comb => e.require_section("comb", "comb", &why)?,
        ModuleKind::Hyperbolic => {
            e.require_section("initial", "initial", &why)?;
            if matches!(initial, Some(InitialSpec::Eigenmode { .. })) {
                return Err(invalid("initial.profile", None, "hyperbolic scenarios need an analytic profile"));
            }
        }
        ModuleKind::Poles if poles.eigenvalues.is_none() => {
            e.require_section("grid", "grid", "for module poles without [poles] eigenvalues")?;
            e.require_section("hamiltonian", "hamiltonian", "for module poles without [poles] eigenvalues")?;
        }
        _ => {}
    }
    if let (Some(InitialSpec::Eigenmode { mode }), Some(g)) = (&initial, grid) {
        if *mode + 2 >= g.n {
            return Err(invalid("initial.mode", None, format!("mode {mode} does not exist on a {}-point grid", g.n)));
        }
    }
    if let (Some(HamiltonianChoice::Potential(v)), None) = (&hamiltonian, grid) {
        if module.needs_grid() || v.is_empty() {
            return Err(invalid("grid", None, "potential values need a [grid]"));
        }
    }

    Ok(ScenarioConfig {
        name: name.to_string(),
        module,
        alpha,
        hbar,
        times,
        output_dir,
        observables,
        hamiltonian,
        grid,
        initial,
        tolerances,
        mlf,
        caputo,
        comb,
        hyperbolic,
        poles,
    })
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; `parse_config(&render(&cfg)) == cfg`.
pub fn render(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name = {}", cfg.name);
    let _ = writeln!(s, "module = {}", cfg.module.as_str());
    let _ = writeln!(s, "alpha = {:?}", cfg.alpha.value());
    let _ = writeln!(s, "hbar = {:?}", cfg.hbar);
    if !cfg.times.is_empty() {
        let _ = writeln!(s, "times = {}", list(&cfg.times));
    }
    let _ = writeln!(s, "output_dir = {}", cfg.output_dir.display());
    if !cfg.observables.is_empty() {
        let names: Vec<String> = cfg.observables.iter().map(|o| o.name()).collect();
        let _ = writeln!(s, "observables = {}", names.join(", "));
    }
    if let Some(h) = &cfg.hamiltonian {
        s.push_str("\n[hamiltonian]\n");
        match h {
            HamiltonianChoice::Box => s.push_str("kind = box\n"),
            HamiltonianChoice::Harmonic => s.push_str("kind = harmonic\n"),
            HamiltonianChoice::Potential(v) => {
                let _ = writeln!(s, "kind = potential\nvalues = {}", list(v));
            }
            HamiltonianChoice::Dilation { omega } => {
                let _ = writeln!(s, "kind = dilation\nomega = {omega:?}");
            }
        }
    }
    if let Some(g) = &cfg.grid {
        let _ = writeln!(s, "\n[grid]\nx_min = {:?}\nx_max = {:?}\nn = {}", g.x_min, g.x_max, g.n);
    }
    if let Some(i) = &cfg.initial {
        s.push_str("\n[initial]\n");
        match i {
            InitialSpec::Eigenmode { mode } => {
                let _ = writeln!(s, "profile = eigenmode\nmode = {mode}");
            }
            InitialSpec::Gaussian { center, a, amp } => {
                let _ = writeln!(s, "profile = gaussian\ncenter = {center:?}\na = {a:?}");
                if let Some(amp) = amp {
                    let _ = writeln!(s, "amp = {amp:?}");
                }
            }
            InitialSpec::HermiteGaussian { order, center, a } => {
                let _ = writeln!(s, "profile = hermite_gaussian\norder = {order}\ncenter = {center:?}\na = {a:?}");
            }
        }
    }
    let _ = writeln!(s, "\n[tolerances]\nmlf = {:?}\nquad = {:?}", cfg.tolerances.mlf, cfg.tolerances.quad);
    let re: Vec<f64> = cfg.mlf.points.iter().map(|z| z.re).collect();
    let im: Vec<f64> = cfg.mlf.points.iter().map(|z| z.im).collect();
    if !re.is_empty() {
        let _ = writeln!(s, "\n[mlf]\nz_re = {}\nz_im = {}", list(&re), list(&im));
    }
    if let Some(c) = &cfg.caputo {
        let scheme = match c.scheme {
            L1Scheme::Plain => "plain",
            L1Scheme::Corrected => "corrected",
        };
        let _ = writeln!(s, "\n[caputo]\ndt = {:?}\nscheme = {scheme}", c.dt);
    }
    if let Some(c) = &cfg.comb {
        let _ = writeln!(
            s,
            "\n[comb]\ny_max = {:?}\nny = {}\ny_center = {:?}\ny_a = {:?}",
            c.y_max, c.ny, c.y_center, c.y_a
        );
    }
    let h = &cfg.hyperbolic;
    let _ = writeln!(s, "\n[hyperbolic]\nmode = {}", h.mode.as_str());
    if let Some(w) = h.omega {
        let _ = writeln!(s, "omega = {w:?}");
    }
    let conj = match h.conjugation {
        Conjugation::OfValue => "value",
        Conjugation::OfFunction => "function",
    };
    let _ = writeln!(s, "conjugation = {conj}");
    s.push_str("\n[poles]\n");
    if let Some(v) = &cfg.poles.eigenvalues {
        let _ = writeln!(s, "eigenvalues = {}", list(v));
    }
    let _ = writeln!(s, "count = {}", cfg.poles.count);
    s
}
