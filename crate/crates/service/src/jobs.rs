//! Job parameters and their kernel dispatch. Kernels are deterministic, so a
//! job's result depends on its parameters only.

use oppenheim_core::counting::{
    count_congruence, count_with_cutoff, four_term_count, min_abs_in_shell, shrinking_target_run, Cutoff,
    FourTermParams, Interval, MinTarget, Norm, Shell, ShrinkingTarget,
};
use oppenheim_core::forms::{InhomogeneousForm, QuadraticForm};
use oppenheim_core::lattices::{choose_v, correspondence_scan, make_affine_lattice, orbit_scan, AffineLattice, CorrespondenceParams};
use oppenheim_core::{presets, Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ErrorBody;

/// A preset name or an explicit form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Named(String),
    Explicit(QuadraticForm),
}

impl FormSpec {
    pub fn resolve(&self) -> Result<QuadraticForm> {
        match self {
            FormSpec::Named(n) => presets::form(n),
            FormSpec::Explicit(q) => Ok(q.clone()),
        }
    }

    pub fn with_shift(&self, shift: Option<&[f64]>) -> Result<InhomogeneousForm> {
        let q = self.resolve()?;
        match shift {
            Some(s) => InhomogeneousForm::new(q, s.to_vec()),
            None => Ok(InhomogeneousForm::homogeneous(q)),
        }
    }
}

/// A preset name or `gℤ² + w` given by its linear part and shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Named(String),
    Explicit {
        g: [[f64; 2]; 2],
        #[serde(default)]
        w: [f64; 2],
    },
}

impl LatticeSpec {
    pub fn resolve(&self) -> Result<AffineLattice> {
        match self {
            LatticeSpec::Named(n) => presets::lattice(n),
            LatticeSpec::Explicit { g, w } => make_affine_lattice(*g, *w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Congruence {
    pub residue: Vec<i64>,
    pub modulus: i64,
}

fn default_theta() -> Vec<f64> {
    Vec::new()
}

/// Parameters of one job, tagged by kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum JobSpec {
    /// `#{y : Q_ξ(y) ∈ I, cutoff}`, optionally restricted to `y ≡ p mod q`.
    Count {
        form: FormSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Vec<f64>>,
        interval: Interval,
        t: f64,
        #[serde(default)]
        norm: Norm,
        #[serde(default)]
        strict: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        congruence: Option<Congruence>,
    },
    Shrink {
        form: FormSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift: Option<Vec<f64>>,
        #[serde(flatten)]
        target: ShrinkingTarget,
        t_list: Vec<f64>,
    },
    Minsearch {
        target: MinTarget,
        #[serde(default = "default_theta")]
        theta: Vec<f64>,
        /// Explicit shell, or the dyadic shell `[n, 2n)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shell: Option<Shell>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        require_nonzero: Option<usize>,
    },
    Fourterm(FourTermParams),
    /// Systole and distance to `v` along `b_tΛ`; `v` defaults to `choose_v(s)`.
    Orbit {
        lattice: LatticeSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<f64>,
        t_min: f64,
        t_max: f64,
        dt: f64,
    },
    Correspond {
        lattice: LatticeSpec,
        s: f64,
        #[serde(alias = "R")]
        radius: f64,
        #[serde(alias = "T")]
        t_max: f64,
        dt: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness_eps: Option<f64>,
    },
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("kernel results serialize")
}

impl JobSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            JobSpec::Count { .. } => "count",
            JobSpec::Shrink { .. } => "shrink",
            JobSpec::Minsearch { .. } => "minsearch",
            JobSpec::Fourterm(_) => "fourterm",
            JobSpec::Orbit { .. } => "orbit",
            JobSpec::Correspond { .. } => "correspond",
        }
    }

    /// Runs the kernel. Blocking; may take as long as the kernel does.
    pub fn run(&self) -> Result<Value> {
        match self {
            JobSpec::Count {
                form,
                shift,
                interval,
                t,
                norm,
                strict,
                congruence,
            } => {
                let cutoff = if *strict { Cutoff::strict(*t, *norm) } else { Cutoff::closed(*t, *norm) };
                let count = match congruence {
                    Some(c) => {
                        if shift.is_some() {
                            return Err(Error::invalid("congruence", "congruence counts take a homogeneous form"));
                        }
                        count_congruence(&form.resolve()?, interval, cutoff, &c.residue, c.modulus)?
                    }
                    None => count_with_cutoff(&form.with_shift(shift.as_deref())?, interval, cutoff)?,
                };
                Ok(json!({ "count": count }))
            }
            JobSpec::Shrink {
                form,
                shift,
                target,
                t_list,
            } => {
                let records = shrinking_target_run(&form.with_shift(shift.as_deref())?, target, t_list)?;
                Ok(json!({ "records": records }))
            }
            JobSpec::Minsearch {
                target,
                theta,
                shell,
                n,
                require_nonzero,
            } => {
                let shell = match (shell, n) {
                    (Some(s), None) => Shell::new(s.inner, s.outer)?,
                    (None, Some(n)) => Shell::dyadic(*n)?,
                    _ => return Err(Error::invalid("shell", "give exactly one of shell and n")),
                };
                let theta = if theta.is_empty() { vec![0.0; target.dim()] } else { theta.clone() };
                Ok(to_value(&min_abs_in_shell(target, &theta, shell, *require_nonzero)?))
            }
            JobSpec::Fourterm(p) => Ok(json!({ "count": four_term_count(p)? })),
            JobSpec::Orbit {
                lattice,
                v,
                s,
                t_min,
                t_max,
                dt,
            } => {
                let v = match (v, s) {
                    (Some(v), _) => *v,
                    (None, Some(s)) => choose_v(*s)?,
                    (None, None) => return Err(Error::invalid("orbit", "give v or s")),
                };
                let rows = orbit_scan(&lattice.resolve()?, v, *t_min, *t_max, *dt)?;
                Ok(json!({ "v": v, "rows": rows }))
            }
            JobSpec::Correspond {
                lattice,
                s,
                radius,
                t_max,
                dt,
                witness_eps,
            } => {
                let mut p = CorrespondenceParams::new(*s, *radius, *t_max, *dt);
                if let Some(e) = witness_eps {
                    p.witness_eps = *e;
                }
                Ok(to_value(&correspondence_scan(&lattice.resolve()?, &p)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

/// A job as returned by the API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobView {
    pub id: String,
    #[serde(flatten)]
    pub spec: JobSpec,
    pub status: JobStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
    pub created_ms: u64,
    pub updated_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub(crate) enum JobEvent {
    Submitted {
        id: String,
        created_ms: u64,
        job: JobSpec,
        #[serde(default)]
        idempotency_key: Option<String>,
    },
    Running {
        at_ms: u64,
    },
    Done {
        at_ms: u64,
        result: Value,
    },
    Failed {
        at_ms: u64,
        error: ErrorBody,
    },
}

pub(crate) fn failure(e: &Error) -> ErrorBody {
    ErrorBody {
        rule: e.rule().to_string(),
        message: e.to_string(),
        detail: Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: Value) -> JobSpec {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn count_job() {
        let j = spec(json!({"kind": "count", "params": {
            "form": "q0", "interval": {"lo": -0.5, "hi": 0.5, "lo_open": true, "hi_open": true}, "t": 10.0}}));
        assert_eq!(j.run().unwrap(), json!({"count": 41}));
    }

    #[test]
    fn congruence_job() {
        let j = spec(json!({"kind": "count", "params": {
            "form": "q0", "interval": {"lo": -0.5, "hi": 0.5, "lo_open": true, "hi_open": true},
            "t": 10.5, "norm": "sup", "strict": true, "congruence": {"residue": [0, 0], "modulus": 2}}}));
        assert_eq!(j.run().unwrap(), json!({"count": 21}));
    }

    #[test]
    fn fourterm_alpha_one_fails() {
        let j = spec(json!({"kind": "fourterm", "params": {
            "M": 1, "alpha": 1.0, "beta_coef": 1.0, "theta1": 0.0, "theta2": 0.0, "delta": 0.1}}));
        let e = j.run().unwrap_err();
        assert_eq!(e.rule(), "alpha");
        assert!(e.to_string().contains("alpha ∉ {0,1}"));
    }

    #[test]
    fn explicit_lattice_and_round_trip() {
        let j = spec(json!({"kind": "orbit", "params": {
            "lattice": {"g": [[1.0, 0.0], [0.0, 1.0]]}, "s": 1.0, "t_min": 0.0, "t_max": 0.1, "dt": 0.05}}));
        let back: JobSpec = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back, j);
        let rows = j.run().unwrap()["rows"].as_array().unwrap().len();
        assert_eq!(rows, 3);
    }
}
