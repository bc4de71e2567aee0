//! Textual pulse descriptions such as `pole:A=1,tp=0.5`,
//! `modpole:A=1,tp=0.5,Omega=2`, `gauss:A=1,sigma=0.5,t0=0` and `none`.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use nhpt_core::pulses::Pulse;
use nhpt_core::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PulseSpec {
    None,
    Pole { a: Complex64, t_p: f64 },
    ModulatedPole { a: Complex64, t_p: f64, omega: f64 },
    Gauss { a: f64, sigma: f64, t0: f64 },
}

/// Parameter a sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// Real part of the amplitude.
    A,
    Tp,
    Omega,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::A => "A",
            SweepParam::Tp => "tp",
            SweepParam::Omega => "Omega",
        }
    }
}

impl FromStr for SweepParam {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "amplitude" => Ok(SweepParam::A),
            "tp" | "t_p" | "tau_p" => Ok(SweepParam::Tp),
            "Omega" | "omega" | "W" => Ok(SweepParam::Omega),
            _ => bail!("unknown parameter {s:?}; expected A, tp or Omega"),
        }
    }
}

fn canonical_key(k: &str) -> Option<&'static str> {
    Some(match k {
        "A" | "a" | "A_re" | "a_re" => "A",
        "A_im" | "a_im" => "A_im",
        "tp" | "t_p" | "tau_p" => "tp",
        "Omega" | "omega" | "W" => "Omega",
        "sigma" | "s" => "sigma",
        "t0" | "center" => "t0",
        _ => return None,
    })
}

struct Params(Vec<(&'static str, f64)>);

impl Params {
    fn parse(body: &str, allowed: &[&str]) -> Result<Self> {
        let mut out: Vec<(&'static str, f64)> = Vec::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
            let key = canonical_key(k.trim())
                .filter(|key| allowed.contains(key))
                .ok_or_else(|| anyhow!("unknown pulse parameter {:?} (allowed: {})", k.trim(), allowed.join(", ")))?;
            let value: f64 = v.trim().parse().with_context(|| format!("bad value for {key}"))?;
            if !value.is_finite() {
                bail!("{key} must be finite");
            }
            if out.iter().any(|(k, _)| *k == key) {
                bail!("parameter {key} given twice");
            }
            out.push((key, value));
        }
        Ok(Params(out))
    }

    fn get(&self, key: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }

    fn require(&self, key: &str, kind: &str) -> Result<f64> {
        self.get(key).ok_or_else(|| anyhow!("{kind} pulse needs {key}"))
    }

    fn amplitude(&self) -> Complex64 {
        Complex64::new(self.get("A").unwrap_or(1.0), self.get("A_im").unwrap_or(0.0))
    }
}

impl FromStr for PulseSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let spec = match kind {
            "none" | "zero" => {
                if !body.trim().is_empty() {
                    bail!("pulse 'none' takes no parameters");
                }
                PulseSpec::None
            }
            "pole" => {
                let p = Params::parse(body, &["A", "A_im", "tp"])?;
                PulseSpec::Pole {
                    a: p.amplitude(),
                    t_p: p.require("tp", "pole")?,
                }
            }
            "modpole" | "modulated" => {
                let p = Params::parse(body, &["A", "A_im", "tp", "Omega"])?;
                PulseSpec::ModulatedPole {
                    a: p.amplitude(),
                    t_p: p.require("tp", "modpole")?,
                    omega: p.require("Omega", "modpole")?,
                }
            }
            "gauss" | "gaussian" => {
                let p = Params::parse(body, &["A", "sigma", "t0"])?;
                PulseSpec::Gauss {
                    a: p.get("A").unwrap_or(1.0),
                    sigma: p.require("sigma", "gauss")?,
                    t0: p.get("t0").unwrap_or(0.0),
                }
            }
            _ => bail!("unknown pulse kind {kind:?}; expected pole, modpole, gauss or none"),
        };
        spec.build().with_context(|| format!("invalid pulse {s:?}"))?;
        Ok(spec)
    }
}

fn write_amplitude(f: &mut fmt::Formatter<'_>, a: Complex64) -> fmt::Result {
    write!(f, "A={}", a.re)?;
    if a.im != 0.0 {
        write!(f, ",A_im={}", a.im)?;
    }
    Ok(())
}

impl fmt::Display for PulseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PulseSpec::None => f.write_str("none"),
            PulseSpec::Pole { a, t_p } => {
                f.write_str("pole:")?;
                write_amplitude(f, a)?;
                write!(f, ",tp={t_p}")
            }
            PulseSpec::ModulatedPole { a, t_p, omega } => {
                f.write_str("modpole:")?;
                write_amplitude(f, a)?;
                write!(f, ",tp={t_p},Omega={omega}")
            }
            PulseSpec::Gauss { a, sigma, t0 } => write!(f, "gauss:A={a},sigma={sigma},t0={t0}"),
        }
    }
}

impl PulseSpec {
    pub fn build(&self) -> Result<Pulse> {
        Ok(match *self {
            PulseSpec::None => Pulse::zero(),
            PulseSpec::Pole { a, t_p } => Pulse::pole(a, t_p)?,
            PulseSpec::ModulatedPole { a, t_p, omega } => Pulse::modulated_pole(a, t_p, omega)?,
            PulseSpec::Gauss { a, sigma, t0 } => Pulse::gaussian(a, sigma, t0)?,
        })
    }

    /// Copy with one parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut out = *self;
        match (&mut out, param) {
            (PulseSpec::Pole { a, .. } | PulseSpec::ModulatedPole { a, .. }, SweepParam::A) => a.re = value,
            (PulseSpec::Gauss { a, .. }, SweepParam::A) => *a = value,
            (PulseSpec::Pole { t_p, .. } | PulseSpec::ModulatedPole { t_p, .. }, SweepParam::Tp) => *t_p = value,
            (PulseSpec::ModulatedPole { omega, .. }, SweepParam::Omega) => *omega = value,
            _ => bail!("pulse {self} has no parameter {}", param.name()),
        }
        out.build()
            .with_context(|| format!("{} = {value} gives an invalid pulse", param.name()))?;
        Ok(out)
    }

    /// Pole offset, when there is one.
    pub fn t_p(&self) -> Option<f64> {
        match *self {
            PulseSpec::Pole { t_p, .. } | PulseSpec::ModulatedPole { t_p, .. } => Some(t_p),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        assert_eq!("none".parse::<PulseSpec>().unwrap(), PulseSpec::None);
        assert_eq!(
            "pole:A=1,tp=0.5".parse::<PulseSpec>().unwrap(),
            PulseSpec::Pole { a: Complex64::new(1.0, 0.0), t_p: 0.5 }
        );
        assert_eq!(
            "modpole:A=1,A_im=-0.5,tp=-0.5,Omega=-2".parse::<PulseSpec>().unwrap(),
            PulseSpec::ModulatedPole { a: Complex64::new(1.0, -0.5), t_p: -0.5, omega: -2.0 }
        );
        assert_eq!(
            "gaussian:sigma=0.5".parse::<PulseSpec>().unwrap(),
            PulseSpec::Gauss { a: 1.0, sigma: 0.5, t0: 0.0 }
        );
    }

    #[test]
    fn display_round_trips() {
        for s in ["none", "pole:A=1,tp=0.5", "modpole:A=2,A_im=1,tp=-0.25,Omega=3", "gauss:A=0.5,sigma=1,t0=2"] {
            let p: PulseSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(p.to_string().parse::<PulseSpec>().unwrap(), p);
        }
    }

    #[test]
    fn rejects_bad_input() {
        for s in [
            "pole:A=1",
            "pole:A=1,tp=0",
            "pole:A=1,tp=0.5,Omega=2",
            "pole:A=1,tp=0.5,tp=0.3",
            "modpole:tp=0.5",
            "gauss:A=1,sigma=-1",
            "laser:A=1",
            "pole:A=x,tp=1",
            "pole:A=nan,tp=1",
            "none:A=1",
        ] {
            assert!(s.parse::<PulseSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn parameter_replacement() {
        let p: PulseSpec = "modpole:A=1,tp=0.5,Omega=2".parse().unwrap();
        let q = p.with_param(SweepParam::Omega, 3.0).unwrap();
        assert_eq!(q.to_string(), "modpole:A=1,tp=0.5,Omega=3");
        assert!(p.with_param(SweepParam::Tp, 0.0).is_err());
        let pole: PulseSpec = "pole:A=1,tp=0.5".parse().unwrap();
        assert!(pole.with_param(SweepParam::Omega, 1.0).is_err());
        assert_eq!("tau_p".parse::<SweepParam>().unwrap(), SweepParam::Tp);
        assert!("beta".parse::<SweepParam>().is_err());
    }
}
