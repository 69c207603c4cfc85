//! Verification suites behind `geoalg verify`.

use std::time::Instant;

use geoalg::braid::{self, BraidFlavor};
use geoalg::centers::{self, CenterFlavor, CenterSet};
use geoalg::dn_algebra::{self, CheckReport, GenAlgebra};
use geoalg::frobenius::{self, StokesMatrix};
use geoalg::poly_core::{lam, SymExpr};
use geoalg::reductions;
use rayon::prelude::*;

use crate::report::{Report, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Goldman,
    Ks,
    Jacobi,
    Braid,
    Yangian,
    Centers,
    Reduction,
    Frobenius,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Goldman,
        Suite::Ks,
        Suite::Jacobi,
        Suite::Braid,
        Suite::Yangian,
        Suite::Centers,
        Suite::Reduction,
        Suite::Frobenius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Goldman => "goldman",
            Suite::Ks => "ks",
            Suite::Jacobi => "jacobi",
            Suite::Braid => "braid",
            Suite::Yangian => "yangian",
            Suite::Centers => "centers",
            Suite::Reduction => "reduction",
            Suite::Frobenius => "frobenius",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::EACH.into_iter().chain([Suite::All]).find(|x| x.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    pub level: u32,
    pub p: u32,
    pub seed: u64,
}

/// Summary record plus one failing record per mismatch.
fn from_check(suite: &str, case: String, rep: &CheckReport, t: Instant) -> Vec<Report> {
    let mut out = vec![Report::new(suite, case.clone(), Status::from_bool(rep.ok()))
        .detail(format!("{} checked, {} mismatches", rep.checked, rep.mismatches.len()))
        .since(t)];
    for m in &rep.mismatches {
        out.push(Report::new(suite, format!("{case} {}", m.case), Status::Fail).lhs(&m.lhs).rhs(&m.rhs).since(t));
    }
    out
}

fn flag(suite: &str, case: impl Into<String>, ok: bool, t: Instant) -> Report {
    Report::new(suite, case, Status::from_bool(ok)).since(t)
}

fn goldman(p: Params) -> Vec<Report> {
    let t = Instant::now();
    match dn_algebra::goldman_agreement(p.n) {
        Ok(rep) => from_check("goldman", format!("A_{} level 0", p.n), &rep, t),
        Err(e) => vec![Report::new("goldman", format!("A_{}", p.n), Status::Skipped).detail(e)],
    }
}

fn ks(p: Params) -> Vec<Report> {
    let t = Instant::now();
    let mut out = from_check("ks", format!("D_{} levels <= {} opaque hole", p.n, p.level), &dn_algebra::ks_agreement(p.n, p.level), t);
    for m in [2, 3] {
        let t = Instant::now();
        let (checked, bad) = dn_algebra::clashed_agreement(p.n, m, p.level, 1, p.seed);
        out.push(
            Report::new("ks", format!("D_{} levels <= {} clash m={m}", p.n, p.level), Status::from_bool(bad.is_empty()))
                .detail(format!("{checked} checks mod 2^61-1, {} mismatches", bad.len()))
                .seed(p.seed)
                .since(t),
        );
        for b in bad {
            out.push(Report::new("ks", b, Status::Fail).seed(p.seed));
        }
    }
    out
}

fn jacobi(p: Params) -> Vec<Report> {
    let t = Instant::now();
    let rep = dn_algebra::jacobi_check(&GenAlgebra::dn(p.n), p.level);
    from_check("jacobi", format!("D_{} levels <= {}", p.n, p.level), &rep, t)
}

fn braid_suite(p: Params) -> Vec<Report> {
    let cap = p.level.max(2) as i32 + 2;
    let mut out = Vec::new();
    for (flavor, name, cap) in [
        (BraidFlavor::An, format!("A_{}", p.n), 0),
        // Each wrap generator costs two certified levels.
        (BraidFlavor::FrakDn, format!("frak D_{} componentwise cap {}", p.n, cap + 4), cap + 4),
        (BraidFlavor::FrakDnMatrix, format!("frak D_{} matrix cap {cap}", p.n), cap),
        (BraidFlavor::Dn, format!("D_{}", p.n), 0),
    ] {
        let t = Instant::now();
        match braid::verify_relations(flavor, p.n, cap) {
            Ok(rep) => {
                for c in rep.checks {
                    out.push(flag("braid", format!("{name}: {}", c.relation), c.holds, t));
                }
            }
            Err(e) => out.push(Report::new("braid", name, Status::Fail).detail(e)),
        }
    }
    let t = Instant::now();
    let cw = braid::componentwise_matches_matrix(p.n, cap).unwrap_or(false);
    out.push(flag("braid", format!("componentwise = matrix, n={} cap {cap}", p.n), cw, t));
    out
}

fn yangian(p: Params) -> Vec<Report> {
    let cap = p.level as i32;
    let t = Instant::now();
    let mut out = from_check("yangian", format!("series n={} order {cap}", p.n), &dn_algebra::yangian_check(p.n, cap), t);
    let t = Instant::now();
    out.extend(from_check(
        "yangian",
        format!("semiclassical reflection n={} order {cap}", p.n),
        &dn_algebra::semiclassical_reflection_check(p.n, cap),
        t,
    ));
    out
}

/// Centrality (where a bracket table exists), braid invariance and
/// independence for one center set.
pub fn center_reports(set: &CenterSet, seed: u64) -> Vec<Report> {
    let name = match set.flavor {
        CenterFlavor::An(n) => format!("A_{n}"),
        CenterFlavor::Dnp(n, p) => format!("D_{n}^({p})"),
        CenterFlavor::Dn(n) => format!("hat D_{n}"),
    };
    let mut out = Vec::new();
    let t = Instant::now();
    match centers::centrality(set) {
        Some(ok) => out.push(flag("centers", format!("{name} central"), ok, t)),
        None => out.push(Report::new("centers", format!("{name} central"), Status::Skipped).detail("no bracket table; see braid invariance")),
    }
    let t = Instant::now();
    let inv = centers::braid_invariance(set.flavor, &set.coeffs).unwrap_or(false);
    out.push(flag("centers", format!("{name} braid invariant"), inv, t));
    let t = Instant::now();
    let rep = centers::independence(set, 5, seed);
    out.push(
        flag("centers", format!("{name} independent"), rep.ok(), t)
            .detail(format!("ranks {:?}, expected {}, all-ones {}", rep.ranks, rep.expected, rep.all_ones_rank))
            .seed(seed),
    );
    out
}

fn centers_suite(p: Params) -> Vec<Report> {
    let mut out = center_reports(&centers::centers_an(p.n), p.seed);
    out.extend(center_reports(&centers::centers_dnp(p.n, p.p), p.seed));
    match centers::centers_dn(p.n) {
        Ok(set) => out.extend(center_reports(&set, p.seed)),
        Err(e) => out.push(Report::new("centers", format!("hat D_{}", p.n), Status::Fail).detail(e)),
    }
    if p.n <= 3 {
        let t = Instant::now();
        let (corrected, printed) = centers::diagonal_specialization(p.n);
        out.push(flag("centers", format!("hat D_{} diagonal point", p.n), corrected, t).detail(format!("printed form holds: {printed}")));
    }
    out
}

fn reduction(p: Params) -> Vec<Report> {
    let cap = p.level as i32;
    let mut out = Vec::new();
    let t = Instant::now();
    // The wrap generator costs two levels, so the series part needs cap >= 2.
    let th_cap = cap.max(2);
    out.push(flag("reduction", format!("D_{} braid formulas via recursion, cap {th_cap}", p.n), reductions::th_dn_check(p.n, th_cap).unwrap_or(false), t));
    let t = Instant::now();
    out.push(flag("reduction", format!("D_{} resolution", p.n), reductions::resolution_check(p.n), t));
    let t = Instant::now();
    out.push(flag("reduction", format!("D_{} summation, cap {}", p.n, cap + 3), reductions::sum_dn_check(p.n, cap + 3), t));
    if p.p >= 3 {
        let t = Instant::now();
        out.push(flag("reduction", format!("periodicity p={}", p.p), reductions::periodicity_check(p.p, 3 * p.p as usize), t));
    } else {
        out.push(Report::new("reduction", format!("periodicity p={}", p.p), Status::Skipped).detail("no admissible root of unity for p < 3"));
    }
    let t = Instant::now();
    out.push(flag("reduction", format!("level p={} series, n={}", p.p, p.n), reductions::level_p_series_check(p.n, p.p, 2 * p.p as i32 + 2), t));
    let t = Instant::now();
    out.push(flag("reduction", format!("level p={} u-symmetry, n={}", p.p, p.n), reductions::u_symmetry_check(p.n, p.p), t));
    out
}

fn frobenius_suite(p: Params) -> Vec<Report> {
    let mut out = Vec::new();
    let t = Instant::now();
    let s = StokesMatrix::random(p.n + 2, p.seed);
    match frobenius::realization_check(p.n, p.level.min(1), &s) {
        Ok(r) => out.push(
            flag("frobenius", format!("realization n={} levels <= {}", p.n, p.level.min(1)), r.max_error < 1e-9, t)
                .detail(format!("{} pairs, max relative error {:.2e}", r.pairs, r.max_error))
                .seed(p.seed),
        ),
        Err(e) => out.push(Report::new("frobenius", "realization", Status::Fail).detail(e)),
    }
    let t = Instant::now();
    let ok = (1..=s.dim()).all(|nt| frobenius::clash_block(&s, nt).map(|b| b.ok()).unwrap_or(false)) && frobenius::product_identity(&s);
    out.push(flag("frobenius", "block structure and intertwining", ok, t).seed(p.seed));
    for m in 2..=3usize {
        let t = Instant::now();
        let got = frobenius::char_poly(&frobenius::reduced_monodromy(&frobenius::all_ones_trailing(m, 1, 0)));
        let want: SymExpr = (0..=m as i32).map(lam).sum();
        out.push(flag("frobenius", format!("all-ones characteristic polynomial m={m}"), got == want, t).lhs(&got).rhs(&want));
    }
    let t = Instant::now();
    let a3 = frobenius::a3_star().to_string().replace('\n', " ");
    let a4 = frobenius::a4_star().to_string().replace('\n', " ");
    out.push(flag("frobenius", "A3* Stokes matrix", a3 == "[1, 3, 3] [0, 1, 3] [0, 0, 1] ", t).lhs(a3.trim()));
    out.push(flag("frobenius", "A4* Stokes matrix", a4 == "[1, 4, 6, 4] [0, 1, 4, 6] [0, 0, 1, 4] [0, 0, 0, 1] ", t).lhs(a4.trim()));
    out
}

pub fn run_one(s: Suite, p: Params) -> Vec<Report> {
    match s {
        Suite::Goldman => goldman(p),
        Suite::Ks => ks(p),
        Suite::Jacobi => jacobi(p),
        Suite::Braid => braid_suite(p),
        Suite::Yangian => yangian(p),
        Suite::Centers => centers_suite(p),
        Suite::Reduction => reduction(p),
        Suite::Frobenius => frobenius_suite(p),
        Suite::All => run(&Suite::EACH, p),
    }
}

/// Runs suites concurrently; output order follows the suite list.
pub fn run(suites: &[Suite], p: Params) -> Vec<Report> {
    let mut list: Vec<Suite> = suites.iter().flat_map(|&s| if s == Suite::All { Suite::EACH.to_vec() } else { vec![s] }).collect();
    list.sort();
    list.dedup();
    list.par_iter().map(|&s| run_one(s, p)).collect::<Vec<_>>().into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: Params = Params { n: 3, level: 1, p: 3, seed: 7 };

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("nope"), None);
    }

    #[test]
    fn small_suites_pass() {
        for s in Suite::EACH {
            let reps = run_one(s, SMALL);
            assert!(!reps.is_empty());
            for r in reps {
                assert_ne!(r.status, Status::Fail, "{r:?}");
            }
        }
    }

    #[test]
    fn order_is_by_suite() {
        let reps = run(&[Suite::Jacobi, Suite::Goldman], SMALL);
        assert_eq!(reps.first().unwrap().suite, "goldman");
        assert_eq!(reps.last().unwrap().suite, "jacobi");
    }
}
