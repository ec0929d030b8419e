//! Use Case Point sizing (Karner's procedure).
//!
//! A project is described by its actors, the transaction counts of its use
//! cases, 13 technical ratings and 8 environmental ratings. The unadjusted
//! points are scaled by the technical complexity factor and the
//! environmental factor to produce the final UCP value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights of the technical factors T1..T13.
pub const TECHNICAL_WEIGHTS: [f64; 13] = [
    2.0, 2.0, 1.0, 1.0, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0,
];

/// Weights of the environmental factors F1..F8. F7 (part-time workers) is negative.
pub const ENVIRONMENTAL_WEIGHTS: [f64; 8] = [1.5, 0.5, 1.0, 0.5, 1.0, 2.0, -1.0, 2.0];

pub const MAX_RATING: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActorClass {
    Simple,
    Average,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UseCaseClass {
    Simple,
    Average,
    Complex,
}

pub fn actor_weight(class: ActorClass) -> f64 {
    match class {
        ActorClass::Simple => 1.0,
        ActorClass::Average => 2.0,
        ActorClass::Complex => 3.0,
    }
}

/// Bands a use case by transaction count: up to 3 is simple, 4 to 7 average,
/// 8 and above complex.
pub fn classify_use_case(transactions: u32) -> UseCaseClass {
    match transactions {
        0..=3 => UseCaseClass::Simple,
        4..=7 => UseCaseClass::Average,
        _ => UseCaseClass::Complex,
    }
}

pub fn use_case_weight(class: UseCaseClass) -> f64 {
    match class {
        UseCaseClass::Simple => 5.0,
        UseCaseClass::Average => 10.0,
        UseCaseClass::Complex => 15.0,
    }
}

fn check_ratings(kind: &str, prefix: char, values: &[u8], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::invalid(format!(
            "{kind} ratings need exactly {expected} values, got {}",
            values.len()
        )));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, &v)| v > MAX_RATING) {
        return Err(Error::invalid(format!(
            "{prefix}{} rating {v} is outside 0..={MAX_RATING}",
            i + 1
        )));
    }
    Ok(())
}

/// Ratings for T1..T13, each an integer in `0..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TechnicalRatings([u8; 13]);

impl TechnicalRatings {
    pub fn new(values: &[u8]) -> Result<Self> {
        check_ratings("technical", 'T', values, 13)?;
        let mut out = [0u8; 13];
        out.copy_from_slice(values);
        Ok(Self(out))
    }

    pub fn uniform(value: u8) -> Result<Self> {
        Self::new(&[value; 13])
    }

    pub fn values(&self) -> &[u8; 13] {
        &self.0
    }
}

/// Ratings for F1..F8, each an integer in `0..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentalRatings([u8; 8]);

impl EnvironmentalRatings {
    pub fn new(values: &[u8]) -> Result<Self> {
        check_ratings("environmental", 'F', values, 8)?;
        let mut out = [0u8; 8];
        out.copy_from_slice(values);
        Ok(Self(out))
    }

    pub fn uniform(value: u8) -> Result<Self> {
        Self::new(&[value; 8])
    }

    pub fn values(&self) -> &[u8; 8] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectDescriptor {
    pub name: String,
    pub actors: Vec<ActorClass>,
    /// Transaction count of each use case.
    pub use_cases: Vec<u32>,
    pub technical: TechnicalRatings,
    pub environmental: EnvironmentalRatings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcpBreakdown {
    pub uaw: f64,
    pub uucw: f64,
    pub uucp: f64,
    pub tfactor: f64,
    pub tcf: f64,
    pub efactor: f64,
    pub ef: f64,
    pub ucp: f64,
}

pub fn compute_uaw(actors: &[ActorClass]) -> Result<f64> {
    if actors.is_empty() {
        return Err(Error::invalid("a project needs at least one actor"));
    }
    Ok(actors.iter().copied().map(actor_weight).sum())
}

pub fn compute_uucw(use_cases: &[u32]) -> Result<f64> {
    if use_cases.is_empty() {
        return Err(Error::invalid("a project needs at least one use case"));
    }
    Ok(use_cases
        .iter()
        .map(|&n| use_case_weight(classify_use_case(n)))
        .sum())
}

pub fn compute_uucp(uaw: f64, uucw: f64) -> f64 {
    uaw + uucw
}

/// Returns `(tfactor, tcf)`.
pub fn compute_tcf(ratings: &TechnicalRatings) -> (f64, f64) {
    let tfactor = weighted_sum(&TECHNICAL_WEIGHTS, ratings.values());
    (tfactor, 0.6 + 0.01 * tfactor)
}

/// Returns `(efactor, ef)`.
pub fn compute_ef(ratings: &EnvironmentalRatings) -> (f64, f64) {
    let efactor = weighted_sum(&ENVIRONMENTAL_WEIGHTS, ratings.values());
    (efactor, 1.4 - 0.03 * efactor)
}

fn weighted_sum(weights: &[f64], ratings: &[u8]) -> f64 {
    weights
        .iter()
        .zip(ratings)
        .map(|(w, &r)| w * f64::from(r))
        .sum()
}

pub fn compute_ucp(project: &ProjectDescriptor) -> Result<UcpBreakdown> {
    let uaw = compute_uaw(&project.actors)?;
    let uucw = compute_uucw(&project.use_cases)?;
    let uucp = compute_uucp(uaw, uucw);
    let (tfactor, tcf) = compute_tcf(&project.technical);
    let (efactor, ef) = compute_ef(&project.environmental);
    Ok(UcpBreakdown {
        uaw,
        uucw,
        uucp,
        tfactor,
        tcf,
        efactor,
        ef,
        ucp: uucp * tcf * ef,
    })
}

impl fmt::Display for UcpBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = [
            ("UAW", self.uaw),
            ("UUCW", self.uucw),
            ("UUCP", self.uucp),
            ("TFactor", self.tfactor),
            ("TCF", self.tcf),
            ("EFactor", self.efactor),
            ("EF", self.ef),
            ("UCP", self.ucp),
        ];
        for (name, value) in rows {
            writeln!(f, "{name:<8} {value:>12.4}")?;
        }
        Ok(())
    }
}
