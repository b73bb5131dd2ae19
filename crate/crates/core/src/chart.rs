//! Charts: coordinate patches carrying variable classes, divisors and the pair ideal.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{normalize_generator, Generator, Ideal, VarClass};
use crate::stratum::Stratum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Original,
    /// Created by a blow-up; the age is the blow-up count along the chart's lineage.
    Exceptional(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableInfo {
    pub index: usize,
    pub name: String,
    pub class: VarClass,
    pub origin: Origin,
}

impl VariableInfo {
    pub fn age(&self) -> u32 {
        match self.origin {
            Origin::Original => 0,
            Origin::Exceptional(a) => a,
        }
    }

    /// Name used when printing: vanishing variables keep their declared name,
    /// invertible ones named `x…` are shown as `y…`.
    pub fn display_name(&self) -> String {
        match (self.class, self.name.strip_prefix('x')) {
            (VarClass::Y, Some(rest)) => format!("y{rest}"),
            _ => self.name.clone(),
        }
    }
}

/// A divisor of `E`. `var` is the chart variable defining it when it meets the chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Divisor {
    pub label: String,
    pub var: Option<usize>,
    /// Present for exceptional divisors (members of `H`).
    pub age: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lineage {
    pub parent: usize,
    pub center: Stratum,
    pub var: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub id: usize,
    pub characteristic: u64,
    pub vars: Vec<VariableInfo>,
    pub ideal: Ideal,
    pub divisors: Vec<Divisor>,
    pub lineage: Option<Lineage>,
    /// Number of blow-ups along the lineage; the next exceptional age is this plus one.
    pub blowups: u32,
}

impl Chart {
    /// A root chart: every declared variable is original, and its hypersurface is in `E`.
    pub fn root(characteristic: u64, names: &[String], invertible: Stratum, gens: Vec<Generator>) -> Chart {
        let vars: Vec<VariableInfo> = names
            .iter()
            .enumerate()
            .map(|(i, n)| VariableInfo {
                index: i,
                name: n.clone(),
                class: if invertible.contains(i) { VarClass::Y } else { VarClass::X },
                origin: Origin::Original,
            })
            .collect();
        let divisors = names
            .iter()
            .enumerate()
            .map(|(i, n)| Divisor { label: format!("V({n})"), var: Some(i), age: None })
            .collect();
        let n = names.len();
        Chart {
            id: 0,
            characteristic,
            vars,
            ideal: Ideal::new(gens, n),
            divisors,
            lineage: None,
            blowups: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn classes(&self) -> Vec<VarClass> {
        self.vars.iter().map(|v| v.class).collect()
    }

    pub fn ages(&self) -> Vec<u32> {
        self.vars.iter().map(VariableInfo::age).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.vars.iter().map(VariableInfo::display_name).collect()
    }

    pub fn x_vars(&self) -> Stratum {
        Stratum::from_indices(self.vars.iter().filter(|v| v.class == VarClass::X).map(|v| v.index))
    }

    pub fn exceptional_x(&self) -> Stratum {
        Stratum::from_indices(
            self.vars
                .iter()
                .filter(|v| v.class == VarClass::X && v.age() > 0)
                .map(|v| v.index),
        )
    }

    /// `E` restricted to the chart: divisors whose defining variable is vanishing.
    pub fn e_x(&self) -> Vec<&Divisor> {
        self.divisors
            .iter()
            .filter(|d| d.var.is_some_and(|i| self.vars[i].class == VarClass::X))
            .collect()
    }

    /// The exceptional divisors `H`.
    pub fn h(&self) -> Vec<&Divisor> {
        self.divisors.iter().filter(|d| d.age.is_some()).collect()
    }

    /// Variables that must be considered when enumerating strata: vanishing
    /// variables that occur in the ideal, plus vanishing exceptional variables.
    pub fn active_x(&self) -> Stratum {
        let mut s = self.exceptional_x();
        let xs = self.x_vars();
        let cls = self.classes();
        for g in &self.ideal.gens {
            for t in g.x_terms(&cls) {
                for i in xs.iter() {
                    if t[i] != 0 {
                        s = s.insert(i);
                    }
                }
            }
        }
        for i in xs.iter() {
            if !self.ideal.mpart[i].is_zero() {
                s = s.insert(i);
            }
        }
        s
    }

    /// Re-normalizes every generator against the current classes, clears the
    /// monomial part on invertible variables and refactorizes.
    pub fn renormalize(&mut self) -> Result<()> {
        let cls = self.classes();
        let gens = self
            .ideal
            .gens
            .iter()
            .map(|g| normalize_generator(&g.terms(), &cls))
            .collect::<Result<Vec<_>>>()?;
        self.ideal.gens = gens;
        for (i, c) in cls.iter().enumerate() {
            if *c == VarClass::Y {
                self.ideal.mpart[i] = Zero::zero();
            }
        }
        self.ideal = self.ideal.refactorize(self.exceptional_x());
        Ok(())
    }

    /// Vanishing variables in the exponent of some constant-term generator.
    pub fn hyperbolic_x_support(&self) -> Stratum {
        let xs = self.x_vars();
        let mut s = Stratum::EMPTY;
        for g in &self.ideal.gens {
            if let Generator::Hyperbolic { delta, .. } = g {
                for i in xs.iter() {
                    if delta[i] != 0 {
                        s = s.insert(i);
                    }
                }
            }
        }
        s
    }

    /// Flips the listed variables to the invertible class.
    pub fn relabel_invertible(&self, vars: Stratum) -> Result<Chart> {
        if vars.is_empty() {
            return Ok(self.clone());
        }
        let allowed = self.hyperbolic_x_support();
        if !vars.is_subset(allowed) {
            return Err(Error::Precondition(format!(
                "variables {} are not forced invertible by a hyperbolic generator",
                vars.minus(allowed)
            )));
        }
        let mut out = self.clone();
        for i in vars.iter() {
            out.vars[i].class = VarClass::Y;
        }
        out.renormalize()?;
        Ok(out)
    }

    /// Relabels until no constant-term generator involves a vanishing variable.
    pub fn detect_hyperbolic_and_relabel(&self) -> Result<Chart> {
        let mut cur = self.clone();
        loop {
            let s = cur.hyperbolic_x_support();
            if s.is_empty() {
                return Ok(cur);
            }
            cur = cur.relabel_invertible(s)?;
        }
    }

    /// Checks the stored-form invariants of every generator and of `mpart`.
    pub fn check_form(&self) -> Result<()> {
        let cls = self.classes();
        for g in &self.ideal.gens {
            g.check_form(&cls)?;
        }
        let exc = self.exceptional_x();
        for (i, m) in self.ideal.mpart.iter().enumerate() {
            if !m.is_zero() && !exc.contains(i) {
                return Err(Error::Precondition(format!("monomial part on non-exceptional variable {i}")));
            }
        }
        Ok(())
    }

    /// Applies a class-preserving variable permutation `perm[i] = σ(i)`.
    pub fn permute(&self, perm: &[usize]) -> Chart {
        let mut vars = self.vars.clone();
        for v in &self.vars {
            let j = perm[v.index];
            vars[j] = VariableInfo { index: j, ..v.clone() };
        }
        let divisors = self
            .divisors
            .iter()
            .map(|d| Divisor { var: d.var.map(|i| perm[i]), ..d.clone() })
            .collect();
        Chart {
            vars,
            ideal: self.ideal.permute(perm),
            divisors,
            lineage: self.lineage.as_ref().map(|l| Lineage {
                parent: l.parent,
                center: l.center.permute(perm),
                var: perm[l.var],
            }),
            ..self.clone()
        }
    }
}
