//! Output states, gate fidelity and zero-frequency shot noise.
//!
//! Noise values are computed in units of the bias/temperature prefactor
//! `(e^3 V / h) coth(e V / 2 k_B T)`. Multiplying by [`noise_prefactor`]
//! converts them to A^2/Hz.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::smatrix::{Lead, ScatteringMatrix, Side};

/// CODATA 2018 exact values.
pub mod constants {
    /// Elementary charge (C).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Planck constant (J s).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Boltzmann constant (J/K).
    pub const BOLTZMANN: f64 = 1.380_649e-23;
}

use constants::{BOLTZMANN, ELEMENTARY_CHARGE, PLANCK};

/// Reservoir bias: the input lead's reservoir sits at `mu0 - eV`, all others at `mu0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasConfig {
    bias_voltage: f64,
    temperature: f64,
    input_lead: Lead,
    base_chemical_potential: f64,
}

impl BiasConfig {
    pub fn new(bias_voltage: f64, temperature: f64, input_lead: Lead) -> Result<Self> {
        if !bias_voltage.is_finite() {
            return Err(Error::InvalidBias(format!(
                "bias voltage {bias_voltage} is not finite"
            )));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::InvalidBias(format!(
                "temperature {temperature} must be finite and non-negative"
            )));
        }
        Ok(BiasConfig {
            bias_voltage,
            temperature,
            input_lead,
            base_chemical_potential: 0.0,
        })
    }

    pub fn with_base_chemical_potential(mut self, mu0: f64) -> Self {
        self.base_chemical_potential = mu0;
        self
    }

    pub fn bias_voltage(&self) -> f64 {
        self.bias_voltage
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn input_lead(&self) -> Lead {
        self.input_lead
    }

    pub fn base_chemical_potential(&self) -> f64 {
        self.base_chemical_potential
    }

    /// Inverse thermal energy `1 / k_B T` in 1/J; infinite at `T = 0`.
    pub fn beta(&self) -> f64 {
        1.0 / (BOLTZMANN * self.temperature)
    }

    /// Chemical potential of each reservoir.
    pub fn chemical_potentials(&self) -> [f64; 4] {
        Lead::ALL.map(|lead| {
            if lead == self.input_lead {
                self.base_chemical_potential - ELEMENTARY_CHARGE * self.bias_voltage
            } else {
                self.base_chemical_potential
            }
        })
    }
}

/// Amplitudes `(c_A, c_B, c_C, c_D)` of an electron over the four leads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amplitudes: [Complex64; 4],
}

impl QubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> Self {
        QubitState { amplitudes }
    }

    /// Equal superposition over the two output leads, `(0, 0, 1/sqrt2, 1/sqrt2)`.
    pub fn ideal_superposition() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        QubitState::new([zero, zero, h, h])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn amplitude(&self, lead: Lead) -> Complex64 {
        self.amplitudes[lead.index()]
    }
}

/// Outgoing amplitudes for a unit-amplitude electron injected through `input`.
pub fn output_state(s: &ScatteringMatrix, input: Lead) -> QubitState {
    QubitState::new(s.column(input))
}

pub fn output_probabilities(s: &ScatteringMatrix, input: Lead) -> [f64; 4] {
    s.column(input).map(|c| c.norm_sqr())
}

const NORM_TOLERANCE: f64 = 1e-12;

/// Squared overlap `|<output|target>|^2`.
///
/// `output` is taken as-is, so probability lost to reflection lowers the result.
pub fn fidelity(output: &QubitState, target: &QubitState) -> Result<f64> {
    let norm = target.norm_sqr();
    if norm.is_nan() || (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidTarget(norm));
    }
    let overlap: Complex64 = output
        .amplitudes
        .iter()
        .zip(&target.amplitudes)
        .map(|(c, x)| c.conj() * x)
        .sum();
    Ok(overlap.norm_sqr())
}

/// Fidelity of the gate column for `input` against the ideal superposition.
pub fn gate_fidelity(s: &ScatteringMatrix, input: Lead) -> f64 {
    fidelity(&output_state(s, input), &QubitState::ideal_superposition())
        .expect("ideal superposition is normalized")
}

/// Below this value of `eV / 2 k_B T` the prefactor is evaluated from the series of `x coth x`.
const SMALL_ARGUMENT: f64 = 1e-4;

/// `(e^3 V / h) coth(e V / 2 k_B T)` in A^2/Hz.
///
/// Tends to `e^3 V / h` at zero temperature and to `2 e^2 k_B T / h` at zero bias.
pub fn noise_prefactor(bias: &BiasConfig) -> Result<f64> {
    let v = bias.bias_voltage();
    let t = bias.temperature();
    if v < 0.0 {
        return Err(Error::InvalidBias(format!(
            "bias voltage {v} must be non-negative"
        )));
    }
    if v == 0.0 && t == 0.0 {
        return Err(Error::UndefinedLimit);
    }
    let conductance_quantum = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / PLANCK;
    let energy = ELEMENTARY_CHARGE * v;
    if t == 0.0 {
        return Ok(conductance_quantum * energy);
    }
    let thermal = BOLTZMANN * t;
    let x = energy / (2.0 * thermal);
    let scaled = if x < SMALL_ARGUMENT {
        // eV coth(x) = 2 k_B T * x coth(x),  x coth x = 1 + x^2/3 - x^4/45 + ...
        let x2 = x * x;
        2.0 * thermal * (1.0 + x2 / 3.0 - x2 * x2 / 45.0)
    } else {
        energy / x.tanh()
    };
    Ok(conductance_quantum * scaled)
}

/// `coth(e V / 2 k_B T)`; exactly 1 at zero temperature.
pub fn coth_factor(bias: &BiasConfig) -> Result<f64> {
    let v = bias.bias_voltage();
    if v <= 0.0 {
        return Err(Error::InvalidBias(format!(
            "coth factor requires a positive bias, got {v}"
        )));
    }
    if bias.temperature() == 0.0 {
        return Ok(1.0);
    }
    let x = ELEMENTARY_CHARGE * v / (2.0 * BOLTZMANN * bias.temperature());
    Ok(1.0 / x.tanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Auto,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseResult {
    /// Noise divided by the bias/temperature prefactor.
    pub value_prefactor_units: f64,
    /// Noise in A^2/Hz, present once a bias has been applied.
    pub value_si: Option<f64>,
    pub kind: NoiseKind,
    /// Measured leads; both entries coincide for auto noise.
    pub leads: (Lead, Lead),
}

impl NoiseResult {
    pub fn with_bias(mut self, bias: &BiasConfig) -> Result<Self> {
        self.value_si = Some(self.value_prefactor_units * noise_prefactor(bias)?);
        Ok(self)
    }
}

/// One amplitude inside a noise term, optionally conjugated.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub label: String,
    pub conjugated: bool,
    pub value: Complex64,
}

impl Factor {
    fn new(s: &ScatteringMatrix, out: Lead, inc: Lead, conjugated: bool) -> Self {
        let z = s.get(out, inc);
        Factor {
            label: ScatteringMatrix::amplitude_label(out, inc),
            conjugated,
            value: if conjugated { z.conj() } else { z },
        }
    }
}

/// A single product of amplitudes contributing to a noise sum.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTerm {
    /// The lead summed over (never the input lead).
    pub summed_lead: Lead,
    pub factors: Vec<Factor>,
    pub value: Complex64,
}

impl NoiseTerm {
    fn from_factors(summed_lead: Lead, factors: Vec<Factor>) -> Self {
        let value = factors
            .iter()
            .map(|f| f.value)
            .fold(Complex64::new(1.0, 0.0), |acc, z| acc * z);
        NoiseTerm {
            summed_lead,
            factors,
            value,
        }
    }

    /// Readable form such as `t_CA^* t_CB t_DB^* t_DA`.
    pub fn expression(&self) -> String {
        self.factors
            .iter()
            .map(|f| {
                if f.conjugated {
                    format!("{}^*", f.label)
                } else {
                    f.label.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn check_measurement(leads: &[Lead], input: Lead) -> Result<()> {
    for &lead in leads {
        if lead == input {
            return Err(Error::same_lead("measured", lead));
        }
    }
    Ok(())
}

/// Terms `|S_lead,input|^2 |S_lead,g|^2` for every `g != input`, factored as
/// `S_lead,input^* S_lead,input S_lead,g^* S_lead,g`.
pub fn auto_noise_terms(s: &ScatteringMatrix, lead: Lead, input: Lead) -> Result<Vec<NoiseTerm>> {
    check_measurement(&[lead], input)?;
    Ok(Lead::ALL
        .into_iter()
        .filter(|&g| g != input)
        .map(|g| {
            NoiseTerm::from_factors(
                g,
                vec![
                    Factor::new(s, lead, input, true),
                    Factor::new(s, lead, input, false),
                    Factor::new(s, lead, g, true),
                    Factor::new(s, lead, g, false),
                ],
            )
        })
        .collect())
}

/// Terms `S_l1,in^* S_l1,g S_l2,g^* S_l2,in` for every `g != input`.
pub fn cross_noise_terms(
    s: &ScatteringMatrix,
    lead1: Lead,
    lead2: Lead,
    input: Lead,
) -> Result<Vec<NoiseTerm>> {
    if lead1 == lead2 {
        return Err(Error::InvalidMeasurement(format!(
            "cross noise needs two distinct leads, got {lead1} twice; use auto noise"
        )));
    }
    check_measurement(&[lead1, lead2], input)?;
    Ok(Lead::ALL
        .into_iter()
        .filter(|&g| g != input)
        .map(|g| {
            NoiseTerm::from_factors(
                g,
                vec![
                    Factor::new(s, lead1, input, true),
                    Factor::new(s, lead1, g, false),
                    Factor::new(s, lead2, g, true),
                    Factor::new(s, lead2, input, false),
                ],
            )
        })
        .collect())
}

/// Zero-frequency auto-correlation noise in `lead` for a bias on `input`.
///
/// Equals `|S_lead,input|^2 * sum_{g != input} |S_lead,g|^2`, i.e. `T (1 - T)` for a
/// row-normalized matrix.
pub fn shot_noise_auto(s: &ScatteringMatrix, lead: Lead, input: Lead) -> Result<NoiseResult> {
    check_measurement(&[lead], input)?;
    let transmitted = s.get(lead, input).norm_sqr();
    let others: f64 = Lead::ALL
        .into_iter()
        .filter(|&g| g != input)
        .map(|g| s.get(lead, g).norm_sqr())
        .sum();
    Ok(NoiseResult {
        value_prefactor_units: transmitted * others,
        value_si: None,
        kind: NoiseKind::Auto,
        leads: (lead, lead),
    })
}

/// Zero-frequency cross-correlation noise between `lead1` and `lead2`.
///
/// `Re[ S_l1,in^* S_l2,in * sum_{g != in} S_l1,g S_l2,g^* ]`, reported with the sign
/// this expression yields.
pub fn shot_noise_cross(
    s: &ScatteringMatrix,
    lead1: Lead,
    lead2: Lead,
    input: Lead,
) -> Result<NoiseResult> {
    if lead1 == lead2 {
        return Err(Error::InvalidMeasurement(format!(
            "cross noise needs two distinct leads, got {lead1} twice; use auto noise"
        )));
    }
    check_measurement(&[lead1, lead2], input)?;
    let direct = s.get(lead1, input).conj() * s.get(lead2, input);
    let overlap: Complex64 = Lead::ALL
        .into_iter()
        .filter(|&g| g != input)
        .map(|g| s.get(lead1, g) * s.get(lead2, g).conj())
        .sum();
    Ok(NoiseResult {
        value_prefactor_units: (direct * overlap).re,
        value_si: None,
        kind: NoiseKind::Cross,
        leads: (lead1, lead2),
    })
}

/// True when `lead` is on the side electrons are injected from.
pub fn is_input_side(lead: Lead) -> bool {
    lead.side() == Side::Input
}
