//! Exploration commands: brackets, braid actions, centers, reductions,
//! geodesic functions and Stokes matrices.

use std::collections::BTreeMap;
use std::time::Instant;

use geoalg::braid::{self, BraidWord, LevelFamily};
use geoalg::centers::{self, CenterFlavor};
use geoalg::dn_algebra::GenAlgebra;
use geoalg::fatgraph;
use geoalg::frobenius::{self, StokesMatrix};
use geoalg::ks_calculus;
use geoalg::poly_core::{parse_expr, Atom, Coeff, SymExpr};
use geoalg::reductions;

use crate::report::{Report, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Alg {
    /// Level-0 algebra `A_n`.
    An,
    /// All levels, `𝔇_n`.
    Dn,
    /// Level-p quotient `𝔇_n^{(p)}`.
    Dnp,
    /// Reduced `D_n` on `Ĝ_{ij}`.
    Dhat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Oracle {
    Ks,
    Goldman,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Point {
    A3star,
    A4star,
    Random,
}

pub type CmdResult = Result<Vec<Report>, String>;

fn algebra(alg: Alg, n: usize, p: u32) -> Result<GenAlgebra, String> {
    match alg {
        Alg::An => Ok(GenAlgebra::an(n)),
        Alg::Dn => Ok(GenAlgebra::dn(n)),
        Alg::Dnp => Ok(GenAlgebra::dnp(n, p)),
        Alg::Dhat => Err("no bracket table for the reduced D_n algebra; use --alg an, dn or dnp".into()),
    }
}

fn parse(text: &str) -> Result<SymExpr, String> {
    parse_expr(text).map_err(|e| format!("cannot parse {text:?}: {e}"))
}

fn single_generator(e: &SymExpr) -> Option<geoalg::GenIndex> {
    let (m, c) = e.as_monomial()?;
    match (m.factors(), c == &Coeff::from_integer(1.into())) {
        ([(Atom::G(g), 1)], true) => Some(*g),
        _ => None,
    }
}

pub fn bracket(alg: Alg, n: usize, p: u32, a: &str, b: &str, oracle: Option<Oracle>) -> CmdResult {
    let t = Instant::now();
    let algebra = algebra(alg, n, p)?;
    let (f, g) = (parse(a)?, parse(b)?);
    let value = algebra.bracket(&f, &g).map_err(|e| e.to_string())?;
    let case = format!("{{{a}, {b}}} in {algebra}");
    let report = match oracle {
        None => Report::value("bracket", case, &value),
        Some(Oracle::Ks) => {
            if alg == Alg::Dnp {
                return Err("the trace-calculus oracle covers an and dn".into());
            }
            let (Some(x), Some(y)) = (single_generator(&f), single_generator(&g)) else {
                return Err("the trace-calculus oracle takes two single generators".into());
            };
            let ks = ks_calculus::ks_generator_bracket(n as u16, x, y).map_err(|e| e.to_string())?;
            let ks = algebra.canonicalize(&ks).map_err(|e| e.to_string())?;
            Report::new("bracket", case, Status::from_bool(ks == value)).lhs(&value).rhs(&ks).detail("oracle: trace calculus")
        }
        Some(Oracle::Goldman) => {
            if alg != Alg::An {
                return Err("the Goldman oracle covers an only".into());
            }
            let graph = fatgraph::canonical_disc_graph(n).map_err(|e| e.to_string())?;
            let table = fatgraph::geodesic_table(n).map_err(|e| e.to_string())?;
            let bind: BTreeMap<Atom, SymExpr> = table.iter().map(|(&(i, j), v)| (Atom::g(i, j, 0), v.clone())).collect();
            let canon = |e: &SymExpr| algebra.canonicalize(e).map_err(|e| e.to_string());
            let (fs, gs) = (canon(&f)?.subst_unchecked(&bind), canon(&g)?.subst_unchecked(&bind));
            let goldman = fatgraph::goldman_bracket(&fs, &gs, &graph).map_err(|e| e.to_string())?;
            let lhs = value.subst_unchecked(&bind);
            Report::new("bracket", case, Status::from_bool(lhs == goldman))
                .lhs(&value)
                .rhs(if lhs == goldman { value.to_string() } else { goldman.to_string() })
                .detail("oracle: Goldman bracket on shear coordinates")
        }
    };
    Ok(vec![report.since(t)])
}

pub fn braid(alg: Alg, n: usize, p: u32, word: &str, matrix: bool, cap: i32) -> CmdResult {
    let t = Instant::now();
    let w = BraidWord::parse(word, n).map_err(|e| e.to_string())?;
    let name = |x: &dyn std::fmt::Display| format!("{word}: {x}");
    let mut out = Vec::new();
    match (alg, matrix) {
        (Alg::An, false) => {
            let a = braid::act_an_word(&w, &braid::generic_a(n)).map_err(|e| e.to_string())?;
            for i in 1..=n {
                for j in i + 1..=n {
                    out.push(Report::value("braid", name(&format!("G[{i},{j},0]")), a.get(i - 1, j - 1)));
                }
            }
        }
        (Alg::An, true) => {
            let mut a = braid::generic_a(n);
            for b in w.acting_order() {
                a = braid::act_an_matrix(b, &a).map_err(|e| e.to_string())?;
            }
            out.push(Report::value("braid", name(&"matrix"), a.to_string().replace('\n', "; ")));
        }
        (Alg::Dn, false) => {
            let f = braid::act_frak_dn_word(&w, &LevelFamily::generic(n, cap)).map_err(|e| e.to_string())?;
            for (g, v) in f.entries() {
                out.push(Report::value("braid", name(g), v).detail(format!("certified to level {}", f.cap)));
            }
        }
        (Alg::Dn, true) => {
            let s = braid::act_matrix_word(&w, &LevelFamily::generic(n, cap).to_series()).map_err(|e| e.to_string())?;
            out.push(Report::value("braid", name(&"series"), s.m.to_string().replace('\n', "; ")).detail(format!("certified to level {}", s.cap)));
        }
        (Alg::Dnp, _) => {
            let flavor = CenterFlavor::Dnp(n, p);
            let alg = GenAlgebra::dnp(n, p);
            for g in alg.generators(0) {
                let mut e = SymExpr::atom(Atom::G(g));
                // Substituting the leftmost generator's images first makes
                // the rightmost generator act first.
                for &b in &w.0 {
                    e = centers::push_forward(flavor, b, &e).map_err(|e| e.to_string())?;
                }
                out.push(Report::value("braid", name(&g), e));
            }
        }
        (Alg::Dhat, _) => {
            let h = braid::act_dn_word(&w, &braid::generic_hat(n)).map_err(|e| e.to_string())?;
            for ((i, j), v) in h {
                out.push(Report::value("braid", name(&format!("Ghat[{i},{j}]")), v));
            }
        }
    }
    Ok(out.into_iter().map(|r| r.since(t)).collect())
}

pub fn centers_cmd(alg: Alg, n: usize, p: u32, seed: u64) -> CmdResult {
    let set = match alg {
        Alg::An => centers::centers_an(n),
        Alg::Dnp => centers::centers_dnp(n, p),
        Alg::Dhat => centers::centers_dn(n).map_err(|e| e.to_string())?,
        Alg::Dn => return Err("frak D_n has no finite generating determinant; use --alg dnp or dhat".into()),
    };
    let mut out = vec![Report::value("centers", "generating function", &set.generating)];
    for (k, c) in set.coeffs.iter().enumerate() {
        out.push(Report::value("centers", format!("c{}", k + 1), c));
    }
    out.extend(crate::suites::center_reports(&set, seed));
    Ok(out)
}

pub fn reduce(dn_k: Option<i32>, level_p: Option<u32>, n: usize) -> CmdResult {
    let t = Instant::now();
    let mut out = Vec::new();
    if let Some(k) = dn_k {
        let row = reductions::dn_reduce(k).map_err(|e| e.to_string())?;
        let names = ["R^T", "S", "A", "-A^T"];
        for (name, c) in names.iter().zip(row.coefficients()) {
            out.push(Report::value("reduce", format!("G^({k}) coefficient of {name}"), c));
        }
        if k >= 1 {
            let closed = reductions::closed_form_certified(&reductions::ReductionMapDn::new(n, k as usize).full_row(k as usize));
            out.push(Report::new("reduce", format!("closed form at k={k}"), Status::from_bool(closed)));
        }
    }
    if let Some(p) = level_p {
        let g = reductions::build_gp(n, p);
        out.push(Report::value("reduce", format!("G_{p}(lambda), n={n}"), g.to_string().replace('\n', "; ")));
        out.push(Report::new("reduce", format!("level-{p} series identity"), Status::from_bool(reductions::level_p_series_check(n, p, 2 * p as i32 + 2))));
        out.push(Report::new("reduce", format!("level-{p} u-symmetry"), Status::from_bool(reductions::u_symmetry_check(n, p))));
    }
    if out.is_empty() {
        return Err("reduce needs --dn --k K or --level-p P".into());
    }
    Ok(out.into_iter().map(|r| r.since(t)).collect())
}

/// `z<i>`/`y<j>` (log coordinates, real) or `s<i>`/`t<j>` (exponentiated,
/// exact rationals such as `3/2`).
fn parse_at(text: &str) -> Result<(BTreeMap<Atom, SymExpr>, BTreeMap<Atom, f64>), String> {
    let mut exact = BTreeMap::new();
    let mut numeric = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected name=value, got {part:?}"))?;
        let (kind, idx) = k.trim().split_at(1);
        let idx: u16 = idx.parse().map_err(|_| format!("bad coordinate name {k:?}"))?;
        let v = v.trim();
        match kind {
            "s" | "t" => {
                let atom = if kind == "s" { Atom::S(idx) } else { Atom::T(idx) };
                exact.insert(atom, parse(v)?);
            }
            "z" | "y" => {
                let atom = if kind == "z" { Atom::S(idx) } else { Atom::T(idx) };
                let x: f64 = v.parse().map_err(|_| format!("bad number {v:?}"))?;
                if x == 0.0 {
                    exact.insert(atom, SymExpr::one());
                } else {
                    numeric.insert(atom, (x / 2.0).exp());
                }
            }
            _ => return Err(format!("unknown coordinate {k:?}; use z, y, s or t")),
        }
    }
    Ok((exact, numeric))
}

pub fn geodesic(n: usize, i: usize, j: usize, at: Option<&str>) -> CmdResult {
    let t = Instant::now();
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let g = fatgraph::geodesic_function(n, i, j).map_err(|e| e.to_string())?;
    let case = format!("G[{i},{j}] n={n}");
    let Some(at) = at else {
        return Ok(vec![Report::value("geodesic", case, &g).since(t)]);
    };
    let (exact, numeric) = parse_at(at)?;
    let e = g.subst_unchecked(&exact);
    if numeric.is_empty() {
        return Ok(vec![Report::value("geodesic", format!("{case} at {at}"), &e).since(t)]);
    }
    let missing: Vec<String> = e.atoms().into_iter().filter(|a| !numeric.contains_key(a)).map(|a| a.to_string()).collect();
    if !missing.is_empty() {
        return Err(format!("numeric evaluation needs values for {}", missing.join(", ")));
    }
    let v = e.eval_f64(&|a| numeric[a]);
    Ok(vec![Report::value("geodesic", format!("{case} at {at}"), v).since(t)])
}

pub fn stokes(point: Point, n: usize, seed: u64) -> CmdResult {
    let t = Instant::now();
    let s = match point {
        Point::A3star => frobenius::a3_star(),
        Point::A4star => frobenius::a4_star(),
        Point::Random => StokesMatrix::random(n, seed),
    };
    let mut out = vec![Report::value("stokes", format!("{point:?}").to_lowercase(), s.to_string().trim_end().replace('\n', "; "))];
    out.push(Report::new("stokes", "S M_1 ... M_n = -S^T", Status::from_bool(frobenius::product_identity(&s))));
    let nt = if s.dim() > 2 { s.dim() - 1 } else { 1 };
    let blk = frobenius::clash_block(&s, nt).map_err(|e| e.to_string())?;
    out.push(Report::new("stokes", format!("block structure, hole from {nt}"), Status::from_bool(blk.ok())));
    if point != Point::Random {
        let mins = frobenius::braid_orbit_monitor(&s, 10, 6, seed).map_err(|e| e.to_string())?;
        let ok = mins.iter().all(|m| *m > Coeff::from_integer(2.into()));
        out.push(Report::new("stokes", "|G_ij| > 2 along 10 braid words", Status::from_bool(ok)).seed(seed));
    }
    Ok(out.into_iter().map(|r| r.since(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nr_bracket_example() {
        let r = bracket(Alg::An, 4, 2, "G[1,3,0]", "G[2,4,0]", None).unwrap();
        assert_eq!(r[0].lhs.as_deref(), Some("2*G[1,2,0]*G[3,4,0] - 2*G[1,4,0]*G[2,3,0]"));
    }

    #[test]
    fn oracles_agree() {
        for oracle in [Oracle::Ks, Oracle::Goldman] {
            let r = bracket(Alg::An, 4, 2, "G[1,3,0]", "G[2,4,0]", Some(oracle)).unwrap();
            assert_eq!(r[0].status, Status::Pass);
        }
        let r = bracket(Alg::Dn, 3, 2, "G[1,2,1]", "G[2,3,0]", Some(Oracle::Ks)).unwrap();
        assert_eq!(r[0].status, Status::Pass);
        assert!(bracket(Alg::An, 4, 2, "G[1,3,0]^2", "G[2,4,0]", Some(Oracle::Ks)).is_err());
        assert!(bracket(Alg::An, 4, 2, "G[1,3,", "G[2,4,0]", None).is_err());
    }

    #[test]
    fn braid_variants() {
        assert_eq!(braid(Alg::An, 3, 2, "b12", false, 3).unwrap().len(), 3);
        assert_eq!(braid(Alg::An, 3, 2, "b12 b12^-1", true, 3).unwrap()[0].lhs.as_deref().map(|s| s.contains("G[1,2,0]")), Some(true));
        assert!(!braid(Alg::Dn, 3, 2, "b31", false, 3).unwrap().is_empty());
        assert!(!braid(Alg::Dn, 3, 2, "b31", true, 3).unwrap().is_empty());
        assert!(!braid(Alg::Dhat, 3, 2, "b31 b12", false, 3).unwrap().is_empty());
        // b and b^-1 cancel in the level-p quotient.
        for r in braid(Alg::Dnp, 2, 2, "b12 b12^-1", false, 3).unwrap() {
            assert!(r.case.ends_with(r.lhs.as_deref().unwrap()), "{r:?}");
        }
        assert!(braid(Alg::An, 3, 2, "b13", false, 3).is_err());
    }

    #[test]
    fn geodesic_at_points() {
        let r = geodesic(3, 1, 2, Some("z1=0,z2=0,z3=0")).unwrap();
        assert_eq!(r[0].lhs.as_deref(), Some("3"));
        let r = geodesic(3, 2, 1, Some("z1=0.3,z2=-0.1,z3=0.2")).unwrap();
        assert!(r[0].lhs.as_deref().unwrap().parse::<f64>().unwrap() > 2.0);
        assert!(geodesic(3, 1, 2, Some("z1=0.3")).is_err());
        assert!(geodesic(3, 1, 2, Some("q1=0")).is_err());
    }

    #[test]
    fn stokes_points() {
        let r = stokes(Point::A3star, 3, 0).unwrap();
        assert_eq!(r[0].lhs.as_deref(), Some("[1, 3, 3]; [0, 1, 3]; [0, 0, 1]"));
        assert!(r.iter().all(|x| x.status == Status::Pass));
        assert!(stokes(Point::Random, 4, 5).unwrap().iter().all(|x| x.status == Status::Pass));
    }

    #[test]
    fn reduce_rows() {
        let r = reduce(Some(1), None, 3).unwrap();
        assert_eq!(r[0].lhs.as_deref(), Some("1"));
        assert!(reduce(None, Some(3), 2).unwrap().iter().all(|x| x.status == Status::Pass));
        assert!(reduce(None, None, 3).is_err());
    }

    #[test]
    fn centers_listing() {
        let r = centers_cmd(Alg::Dnp, 2, 2, 1).unwrap();
        assert!(r.iter().all(|x| x.status != Status::Fail));
        assert!(centers_cmd(Alg::Dn, 2, 2, 1).is_err());
    }
}
