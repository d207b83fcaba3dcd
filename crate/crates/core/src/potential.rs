//! Real potentials `q(x)` and the Schrödinger potentials derived from them,
//! `q1 = -i q' - q^2` and `q2 = conj(q1)`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::diff::differentiate_real;
use crate::numerics::interp::cubic_at;
use crate::numerics::quadrature::integrate_values;
use crate::numerics::{ComplexSamples, UniformGrid};

/// Closed-form potentials with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    Zero,
    /// `mu * sech(mu x)`: reflectionless, one eigenvalue `i mu / 2`.
    SechScaled { mu: f64 },
    /// `mu * sech(x)`: eigenvalues `i(mu - m + 1/2)`, `b(ρ) = -sin(π mu)/cosh(π ρ)`.
    SechAmplitude { mu: f64 },
    /// `mu / cosh(x)^(π/3) - exp(-(x-2)^2)`.
    Example3 { mu: f64 },
    /// `-4√2(√2-1) / ((√2-1)^2 e^{-2√2x} + e^{2√2x})`, eigenvalue `i√2`.
    Example4,
}

impl Preset {
    pub fn example1() -> Self {
        Preset::SechScaled { mu: PI }
    }

    pub fn example2() -> Self {
        Preset::SechAmplitude { mu: 5.0 + PI / 7.0 }
    }

    pub fn example3() -> Self {
        Preset::Example3 { mu: PI / 7.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::SechScaled { .. } => "sech_scaled",
            Preset::SechAmplitude { .. } => "sech_amplitude",
            Preset::Example3 { .. } => "example3",
            Preset::Example4 => "example4",
        }
    }

    /// Parses a preset name, using `mu` when the preset takes a parameter and
    /// the canonical value otherwise.
    pub fn from_name(name: &str, mu: Option<f64>) -> Result<Self> {
        let preset = match name {
            "zero" => Preset::Zero,
            "sech_scaled" | "example1" => Preset::SechScaled { mu: mu.unwrap_or(PI) },
            "sech_amplitude" | "example2" => Preset::SechAmplitude { mu: mu.unwrap_or(5.0 + PI / 7.0) },
            "example3" => Preset::Example3 { mu: mu.unwrap_or(PI / 7.0) },
            "example4" => Preset::Example4,
            other => return Err(Error::InvalidInput(format!("unknown preset `{other}`"))),
        };
        if let Some(m) = preset.mu() {
            if !m.is_finite() {
                return Err(Error::InvalidInput(format!("preset parameter must be finite, got {m}")));
            }
        }
        Ok(preset)
    }

    pub fn mu(&self) -> Option<f64> {
        match *self {
            Preset::SechScaled { mu } | Preset::SechAmplitude { mu } | Preset::Example3 { mu } => Some(mu),
            Preset::Zero | Preset::Example4 => None,
        }
    }

    pub fn q(&self, x: f64) -> f64 {
        self.q_and_derivative(x).0
    }

    pub fn q_and_derivative(&self, x: f64) -> (f64, f64) {
        match *self {
            Preset::Zero => (0.0, 0.0),
            Preset::SechScaled { mu } => {
                let s = sech(mu * x);
                (mu * s, -mu * mu * s * (mu * x).tanh())
            }
            Preset::SechAmplitude { mu } => {
                let s = sech(x);
                (mu * s, -mu * s * x.tanh())
            }
            Preset::Example3 { mu } => {
                let p = PI / 3.0;
                let c = (-p * log_cosh(x)).exp();
                let g = (-(x - 2.0) * (x - 2.0)).exp();
                (mu * c - g, -mu * p * c * x.tanh() + 2.0 * (x - 2.0) * g)
            }
            Preset::Example4 => {
                let k = SQRT_2 - 1.0;
                let (ep, em) = ((2.0 * SQRT_2 * x).exp(), (-2.0 * SQRT_2 * x).exp());
                let q = -4.0 * SQRT_2 * k / (k * k * em + ep);
                let q = if q.is_finite() { q } else { 0.0 };
                let t = (2.0 * SQRT_2 * x - k.ln()).tanh();
                (q, -2.0 * SQRT_2 * q * t)
            }
        }
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mu() {
            Some(mu) => write!(f, "{}(mu={})", self.name(), mu),
            None => write!(f, "{}", self.name()),
        }
    }
}

/// A potential tabulated at strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTable {
    pub xs: Vec<f64>,
    pub qs: Vec<f64>,
    pub source: Option<PathBuf>,
}

impl SampledTable {
    pub fn new(xs: Vec<f64>, qs: Vec<f64>) -> Result<Self> {
        if xs.len() != qs.len() {
            return Err(Error::LengthMismatch { expected: xs.len(), found: qs.len() });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput("sampled potential needs at least two rows".into()));
        }
        if let Some(k) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(format!("x column is not strictly increasing at row {}", k + 2)));
        }
        if xs.iter().chain(&qs).any(|v| !v.is_finite()) {
            return Err(Error::non_finite("sampled potential table"));
        }
        Ok(Self { xs, qs, source: None })
    }

    /// Reads a CSV with a header row and columns `x,q`. An optional third
    /// column holding an imaginary part is accepted only if it is zero.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
        let mut table = Self::from_reader(file)?;
        table.source = Some(path.to_owned());
        Ok(table)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).flexible(true).from_reader(reader);
        let mut xs = Vec::new();
        let mut qs = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = row + 2;
            if record.len() < 2 {
                return Err(Error::InvalidInput(format!("line {line}: expected two columns `x,q`")));
            }
            let x: f64 = record[0]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse x value `{}`", &record[0])))?;
            let field = &record[1];
            let q: f64 = match field.parse() {
                Ok(v) => v,
                Err(_) if looks_complex(field) => return Err(Error::NonRealPotential { line }),
                Err(_) => return Err(Error::InvalidInput(format!("line {line}: cannot parse q value `{field}`"))),
            };
            if let Some(im) = record.get(2).filter(|s| !s.is_empty()) {
                let im: f64 = im
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse imaginary part `{im}`")))?;
                if im != 0.0 {
                    return Err(Error::NonRealPotential { line });
                }
            }
            xs.push(x);
            qs.push(q);
        }
        Self::new(xs, qs)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "q"])?;
        for (x, q) in self.xs.iter().zip(&self.qs) {
            w.write_record([format!("{x:.17e}"), format!("{q:.17e}")])?;
        }
        w.flush().map_err(|source| Error::Io { path: PathBuf::from("<csv>"), source })?;
        Ok(())
    }
}

fn looks_complex(s: &str) -> bool {
    let t = s.trim();
    (t.ends_with('i') || t.ends_with('j')) && t.len() > 1
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Preset(Preset),
    Sampled(SampledTable),
}

impl PotentialSpec {
    pub fn describe(&self) -> String {
        match self {
            PotentialSpec::Preset(p) => format!("preset:{p}"),
            PotentialSpec::Sampled(t) => match &t.source {
                Some(p) => format!("file:{}", p.display()),
                None => format!("sampled({} rows)", t.xs.len()),
            },
        }
    }

    pub fn preset(&self) -> Option<Preset> {
        match self {
            PotentialSpec::Preset(p) => Some(*p),
            PotentialSpec::Sampled(_) => None,
        }
    }
}

impl From<Preset> for PotentialSpec {
    fn from(p: Preset) -> Self {
        PotentialSpec::Preset(p)
    }
}

/// The potential on a grid together with everything derived from it.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    pub grid: UniformGrid,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    /// `-i q' - q^2`
    pub q1: ComplexSamples,
    /// `i q' - q^2 = conj(q1)`
    pub q2: ComplexSamples,
    /// `∫ (1+|x|) |q1|` over the outer tenth of the left tail.
    pub decay_norm_left: f64,
    pub decay_norm_right: f64,
    pub description: String,
}

impl SampledPotential {
    /// Builds the derived fields from samples of `q` and `q'`.
    pub fn from_samples(grid: UniformGrid, q: Vec<f64>, q_prime: Vec<f64>, description: String) -> Result<Self> {
        if q.len() != grid.len() || q_prime.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: q.len().min(q_prime.len()) });
        }
        if q.iter().chain(&q_prime).any(|v| !v.is_finite()) {
            return Err(Error::non_finite("potential samples"));
        }
        let q1: Vec<Complex64> = q.iter().zip(&q_prime).map(|(&v, &d)| Complex64::new(-v * v, -d)).collect();
        let q2: Vec<Complex64> = q1.iter().map(|v| v.conj()).collect();
        let q1 = ComplexSamples::new(grid, q1)?;
        let q2 = ComplexSamples::new(grid, q2)?;
        let (decay_norm_left, decay_norm_right) = tail_norms(&q1);
        Ok(Self { grid, q, q_prime, q1, q2, decay_norm_left, decay_norm_right, description })
    }

    /// The problem with `q1` and `q2` swapped, for checking that the
    /// coefficients come out conjugated.
    pub fn conjugate_problem(&self) -> Self {
        let mut other = self.clone();
        std::mem::swap(&mut other.q1, &mut other.q2);
        other.description = format!("conj({})", self.description);
        other
    }

    pub fn as_table(&self) -> SampledTable {
        SampledTable { xs: self.grid.nodes(), qs: self.q.clone(), source: None }
    }
}

/// Samples `spec` on `grid`.
pub fn evaluate(spec: &PotentialSpec, grid: UniformGrid) -> Result<SampledPotential> {
    match spec {
        PotentialSpec::Preset(p) => {
            let (q, dq): (Vec<f64>, Vec<f64>) = grid.nodes().into_iter().map(|x| p.q_and_derivative(x)).unzip();
            SampledPotential::from_samples(grid, q, dq, spec.describe())
        }
        PotentialSpec::Sampled(t) => {
            let a = grid.half_width();
            let (lo, hi) = (t.xs[0], t.xs[t.xs.len() - 1]);
            let tol = 1e-9 * a;
            if lo > -a + tol || hi < a - tol {
                return Err(Error::DomainTooSmall { lo, hi, need_lo: -a, need_hi: a });
            }
            let q: Vec<f64> = grid.nodes().into_iter().map(|x| cubic_at(&t.xs, &t.qs, x.clamp(lo, hi))).collect();
            let dq = differentiate_real(&q, grid.step());
            SampledPotential::from_samples(grid, q, dq, spec.describe())
        }
    }
}

fn tail_norms(q1: &ComplexSamples) -> (f64, f64) {
    let g = *q1.grid();
    let n = g.len();
    let width = ((0.1 * (n - 1) as f64).round() as usize).max(1);
    let weight: Vec<Complex64> =
        (0..n).map(|j| Complex64::new((1.0 + g.x(j).abs()) * q1[j].norm(), 0.0)).collect();
    let left = integrate_values(&weight[..=width], g.step()).re;
    let right = integrate_values(&weight[n - 1 - width..], g.step()).re;
    (left, right)
}

pub const DEFAULT_DECAY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayWarning {
    pub side: Side,
    pub norm: f64,
    pub threshold: f64,
}

impl fmt::Display for DecayWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => "left",
            Side::Right => "right",
        };
        write!(
            f,
            "{side} tail of (1+|x|)|q1| integrates to {:.3e} > {:.1e}; the window [-a, a] may be too narrow",
            self.norm, self.threshold
        )
    }
}

/// Flags tails whose truncated class-condition proxy exceeds `threshold`.
pub fn decay_check(p: &SampledPotential, threshold: f64) -> Vec<DecayWarning> {
    [(Side::Left, p.decay_norm_left), (Side::Right, p.decay_norm_right)]
        .into_iter()
        .filter(|&(_, norm)| norm > threshold)
        .map(|(side, norm)| DecayWarning { side, norm, threshold })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> UniformGrid {
        UniformGrid::new(15.0, 4001).unwrap()
    }

    #[test]
    fn zero_potential() {
        let p = evaluate(&Preset::Zero.into(), grid()).unwrap();
        assert_eq!(p.q1.max_abs(), 0.0);
        assert_eq!(p.q2.max_abs(), 0.0);
        assert!(decay_check(&p, DEFAULT_DECAY_THRESHOLD).is_empty());
    }

    #[test]
    fn sech_scaled_at_origin() {
        let g = grid();
        let p = evaluate(&Preset::example1().into(), g).unwrap();
        let z = g.zero_index();
        assert_eq!(p.q_prime[z], 0.0);
        assert!((p.q1[z] - Complex64::new(-PI * PI, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn example4_matches_high_precision_values() {
        // reference values evaluated at 40 significant digits
        let cases = [
            (0.0, -2.0),
            (0.5, -0.5639390692765497875039851),
            (-1.0, -0.7910907344119468251039276),
            (2.25, -0.004036137230839832493547521),
        ];
        for (x, q) in cases {
            assert!((Preset::Example4.q(x) - q).abs() < 1e-14, "x={x}");
        }
        let (_, dq0) = Preset::Example4.q_and_derivative(0.0);
        assert!((dq0 - 4.0).abs() < 1e-13);
    }

    #[test]
    fn example3_derivative_matches_reference() {
        let p = Preset::example3();
        let cases = [
            (0.0, 0.4304833116240934252009453, -0.07326255555493672117487209),
            (1.0, -0.08292742769128311623367336, -0.9630193787060759420778151),
            (-2.5, 0.06718236903126848303869778, 0.06941147242018724684736417),
        ];
        for (x, q, dq) in cases {
            let (v, d) = p.q_and_derivative(x);
            assert!((v - q).abs() < 1e-14 && (d - dq).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn presets_have_consistent_derivatives() {
        let presets = [
            Preset::example1(),
            Preset::example2(),
            Preset::example3(),
            Preset::Example4,
            Preset::SechScaled { mu: 0.7 },
        ];
        for p in presets {
            for x in [-3.1, -0.4, 0.0, 0.25, 1.9, 6.0] {
                let h = 1e-5;
                let fd = (p.q(x + h) - p.q(x - h)) / (2.0 * h);
                let (_, d) = p.q_and_derivative(x);
                assert!((fd - d).abs() < 1e-7 * (1.0 + d.abs()), "{p} at {x}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn conjugacy_and_evenness() {
        let g = grid();
        for preset in [Preset::example1(), Preset::example2()] {
            let p = evaluate(&preset.into(), g).unwrap();
            for j in 0..g.len() {
                assert_eq!(p.q2[j], p.q1[j].conj());
                assert!((p.q1[j] + p.q2[j] + Complex64::new(2.0 * p.q[j] * p.q[j], 0.0)).norm() < 1e-14);
                let mirror = g.last_index() - j;
                assert!((p.q1[mirror] - p.q1[j].conj()).norm() < 1e-12);
            }
            assert_eq!(p.q_prime[g.zero_index()], 0.0);
        }
    }

    #[test]
    fn example1_has_no_decay_warning() {
        let p = evaluate(&Preset::example1().into(), grid()).unwrap();
        assert!(decay_check(&p, DEFAULT_DECAY_THRESHOLD).is_empty());
    }

    #[test]
    fn slowly_decaying_potential_warns_on_both_tails() {
        let g = grid();
        let xs = g.nodes();
        let qs: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x * x)).collect();
        let spec = PotentialSpec::Sampled(SampledTable::new(xs, qs).unwrap());
        let p = evaluate(&spec, g).unwrap();
        let w = decay_check(&p, DEFAULT_DECAY_THRESHOLD);
        assert_eq!(w.len(), 2);
        assert!(w.iter().any(|w| w.side == Side::Left) && w.iter().any(|w| w.side == Side::Right));
    }

    #[test]
    fn csv_round_trip_reproduces_q1() {
        let g = UniformGrid::new(15.0, 4001).unwrap();
        let preset = Preset::example2();
        let p = evaluate(&preset.into(), g).unwrap();
        let mut buf = Vec::new();
        p.as_table().write_csv(&mut buf).unwrap();
        let table = SampledTable::from_reader(buf.as_slice()).unwrap();
        let again = evaluate(&PotentialSpec::Sampled(table), g).unwrap();
        for j in 0..g.len() {
            assert!((again.q1[j] - p.q1[j]).norm() < 1e-8, "j={j}");
        }
    }

    #[test]
    fn complex_entries_are_rejected() {
        let data = "x,q\n-1,0.5\n0,1+2i\n1,0.5\n";
        assert!(matches!(SampledTable::from_reader(data.as_bytes()), Err(Error::NonRealPotential { line: 3 })));
        let data = "x,q,q_im\n-1,0.5,0\n0,1,0.25\n1,0.5,0\n";
        assert!(matches!(SampledTable::from_reader(data.as_bytes()), Err(Error::NonRealPotential { line: 3 })));
    }

    #[test]
    fn short_table_is_rejected() {
        let table = SampledTable::new(vec![-1.0, 0.0, 1.0], vec![0.0; 3]).unwrap();
        let err = evaluate(&PotentialSpec::Sampled(table), UniformGrid::new(2.0, 5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall { .. }));
    }

    #[test]
    fn unsorted_table_is_rejected() {
        assert!(SampledTable::new(vec![0.0, 1.0, 0.5], vec![0.0; 3]).is_err());
    }
}
