//! Solve, certify and cross-check one instance end to end.

use num_traits::Signed;
use serde::Serialize;

use crate::cost::{Cost, CostReport, Exponent};
use crate::error::Result;
use crate::field::Modulus;
use crate::gadgets::{balpart_certificate, build_balpart_trees, build_ci_modules, ci_certificate, BalPartInstance, CiInstance, Instance};
use crate::matching::wasserstein;
use crate::rational::int;
use crate::solvers::{solve_balpart, solve_ci, BalPartSolution, CiSolution};
use crate::two_param::{check_regeneration, sigma_match};

/// Cost of `count` grade differences of exactly 1.
pub fn unit_cost(p: Exponent, count: u64) -> Cost {
    let one = int(1);
    Cost::from_differences(p, std::iter::repeat_n(&one, count as usize))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Solution {
    BalPart(BalPartSolution),
    Ci(CiSolution),
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub kind: &'static str,
    pub solvable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<Solution>,
    #[serde(rename = "C")]
    pub c: i64,
    /// The threshold cost: `(n - 1)^(1/p)` or `(K n)^(1/p)`.
    pub bound: CostReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_cost: Option<CostReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wasserstein: Option<CostReport>,
    pub checks: Vec<Check>,
}

impl PipelineReport {
    pub fn consistent(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(checks: &mut Vec<Check>, name: &str, passed: bool) {
    checks.push(Check { name: name.into(), passed });
}

pub fn run(instance: &Instance, p: Exponent, modulus: Modulus, limit: u64) -> Result<PipelineReport> {
    match instance {
        Instance::Balpart(inst) => run_balpart(inst, p, limit),
        Instance::Ci(inst) => run_ci(inst, p, modulus, limit),
    }
}

pub fn run_balpart(inst: &BalPartInstance, p: Exponent, limit: u64) -> Result<PipelineReport> {
    let trees = build_balpart_trees(inst, p)?;
    let bound = unit_cost(p, inst.n() - 1);
    let mut checks = Vec::new();
    let (bm, bn) = (trees.m.barcode(), trees.n.barcode());
    check(&mut checks, "barcodes have n intervals", bm.len() as u64 == inst.n() && bn.len() as u64 == inst.n());
    let (w, _) = wasserstein(&bm, &bn, p);
    check(&mut checks, "wasserstein equals (n-1)^(1/p)", w.cmp_cost(&bound).is_eq());

    let solution = solve_balpart(inst, limit)?;
    let mut certificate_cost = None;
    if let Some(sol) = &solution {
        let cert = balpart_certificate(inst, sol, p)?;
        check(&mut checks, "certificate cost equals (n-1)^(1/p)", cert.cost.cmp_cost(&bound).is_eq());
        check(&mut checks, "certificate cost is at least wasserstein", !cert.cost.cmp_cost(&w).is_lt());
        check(&mut checks, "certificate presents M", cert.p.barcode() == bm);
        check(&mut checks, "certificate presents N", cert.q.barcode() == bn);
        let gaps_are_one = cert.p.relations().iter().zip(cert.q.relations()).all(|(a, b)| (&a.grade - &b.grade).abs() == int(1));
        check(&mut checks, "every relation moves by 1", gaps_are_one);
        certificate_cost = Some((&cert.cost).into());
    }
    Ok(PipelineReport {
        kind: "balpart",
        solvable: solution.is_some(),
        solution: solution.map(Solution::BalPart),
        c: trees.c,
        bound: (&bound).into(),
        certificate_cost,
        wasserstein: Some((&w).into()),
        checks,
    })
}

pub fn run_ci(inst: &CiInstance, p: Exponent, modulus: Modulus, limit: u64) -> Result<PipelineReport> {
    let gadget = build_ci_modules(inst, p, modulus)?;
    let k = gadget.anchors.len() as u64;
    let bound = unit_cost(p, k * inst.n as u64);
    let mut checks = Vec::new();
    let top = gadget.top();
    check(&mut checks, "M and N have dimension n at (C,C)", gadget.m.dim_at(&top) == inst.n && gadget.n.dim_at(&top) == inst.n);

    let solution = solve_ci(inst, modulus, limit)?;
    let mut certificate_cost = None;
    if let Some(sol) = &solution {
        let cert = ci_certificate(inst, sol, p)?;
        check(&mut checks, "certificate cost equals (Kn)^(1/p)", cert.cost.cmp_cost(&bound).is_eq());
        check(&mut checks, "P'_M regenerates P_M", check_regeneration(&cert.regeneration_m())?);
        check(&mut checks, "P'_N regenerates P_N", check_regeneration(&cert.regeneration_n())?);
        let m = sigma_match(&cert.pm, &cert.pn, &cert.sigma, p)?;
        let block = (k * inst.n as u64) as usize;
        let moves_ok = cert.pm.generators().iter().zip(&m.generators).enumerate().all(|(i, (g, &j))| {
            let h = &cert.pn.generators()[j].grade;
            let (dx, dy) = (g.grade.x() - h.x(), g.grade.y() - h.y());
            let expected = if i < block { int(1) } else { int(0) };
            dy == int(0) && dx.abs() == expected
        });
        check(&mut checks, "block generators move by (±1,0), the rest stay", moves_ok);
        let rels_fixed = cert.pm.relations().iter().zip(&m.relations).all(|(r, &j)| r.grade == cert.pn.relations()[j].grade);
        check(&mut checks, "relations do not move", rels_fixed);
        certificate_cost = Some((&cert.cost).into());
    }
    Ok(PipelineReport {
        kind: "ci",
        solvable: solution.is_some(),
        solution: solution.map(Solution::Ci),
        c: gadget.c,
        bound: (&bound).into(),
        certificate_cost,
        wasserstein: None,
        checks,
    })
}
