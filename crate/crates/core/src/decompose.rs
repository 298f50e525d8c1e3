//! Reduce a polynomial to an affine seed plus a list of product substitutions.
//!
//! Steps are stored in application order: `replay` substitutes `steps[0]`
//! into the seed first. Written as a composition of substitution operators
//! this is `p = S_l ... S_1 q` with `S_1 = steps[0]`.

use serde_json::{json, Value};

use crate::poly::{PolyError, Polynomial, FRESH_PREFIX};

/// One simple product substitution `w := u * v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub w: String,
    pub u: String,
    pub v: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionScript {
    /// Affine polynomial over the original variables followed by every
    /// fresh variable in creation order.
    pub seed: Polynomial,
    pub steps: Vec<Step>,
}

impl SubstitutionScript {
    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| json!({"w": s.w, "u": s.u, "v": s.v}))
            .collect();
        json!({"seed": self.seed.to_json(), "steps": steps})
    }

    pub fn from_json(v: &Value) -> Result<Self, PolyError> {
        let bad = |what: &str| PolyError::Encoding(what.to_string());
        let seed = Polynomial::from_json(v.get("seed").ok_or_else(|| bad("missing seed"))?)?;
        let steps = v
            .get("steps")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing steps"))?
            .iter()
            .map(|s| {
                let get = |k: &str| {
                    s.get(k)
                        .and_then(Value::as_str)
                        .map(str::to_string)
                        .ok_or_else(|| bad(&format!("step field `{k}`")))
                };
                Ok(Step {
                    w: get("w")?,
                    u: get("u")?,
                    v: get("v")?,
                })
            })
            .collect::<Result<_, PolyError>>()?;
        Ok(SubstitutionScript { seed, steps })
    }
}

fn fresh_name(taken: &[String], counter: &mut usize) -> String {
    loop {
        let name = format!("{FRESH_PREFIX}{counter}");
        *counter += 1;
        if !taken.contains(&name) {
            return name;
        }
    }
}

/// Greedy pair extraction.
///
/// Repeatedly take the graded-lex largest monomial of degree at least two,
/// pull out its first two variable factors in registry order as `u * v`,
/// and replace them in that monomial only by a fresh variable `w`. The
/// discovered substitutions undo those replacements in reverse order.
pub fn decompose(p: &Polynomial) -> SubstitutionScript {
    let mut current = p.clone();
    let mut discovered = Vec::new();
    let mut counter = 0;
    loop {
        let Some((mono, coeff)) = current
            .terms()
            .rev()
            .find(|(m, _)| m.degree() >= 2)
            .map(|(m, c)| (m.clone(), c.clone()))
        else {
            break;
        };
        let mut factors = mono.factors();
        let ui = factors.next().expect("degree >= 2");
        let vi = factors.next().expect("degree >= 2");
        let u = current.vars()[ui].clone();
        let v = current.vars()[vi].clone();
        let w = fresh_name(current.vars(), &mut counter);

        let next = current.extend_vars([w.as_str()]);
        let wi = next.vars().len() - 1;
        let mut pairs: Vec<(usize, u32)> = mono.pairs().to_vec();
        for idx in [ui, vi] {
            let slot = pairs
                .iter_mut()
                .find(|(i, _)| *i == idx)
                .expect("factor present");
            slot.1 -= 1;
        }
        pairs.push((wi, 1));
        let replaced = crate::poly::Monomial::from_pairs(pairs);
        let vars = next.vars().to_vec();
        let terms = next
            .terms()
            .filter(|(m, _)| **m != mono)
            .map(|(m, c)| (m.clone(), c.clone()))
            .chain(std::iter::once((replaced, coeff)))
            .collect::<Vec<_>>();
        current = Polynomial::from_terms(next.field(), vars, terms);
        discovered.push(Step { w, u, v });
    }
    debug_assert!(current.is_affine_linear());
    discovered.reverse();
    SubstitutionScript {
        seed: current,
        steps: discovered,
    }
}

/// Apply the steps to the seed in stored order.
pub fn replay(script: &SubstitutionScript) -> Result<Polynomial, PolyError> {
    replay_prefix(script, script.steps.len())
}

/// The polynomial after the first `k` steps.
pub fn replay_prefix(script: &SubstitutionScript, k: usize) -> Result<Polynomial, PolyError> {
    script.steps[..k]
        .iter()
        .try_fold(script.seed.clone(), |acc, s| {
            acc.substitute_product(&s.w, &s.u, &s.v)
        })
}
