//! Browser bindings: brackets, braid moves on Stokes matrices and geodesic
//! functions. Each call returns plain text for display.

use geoalg::braid::{self, BraidWord};
use geoalg::dn_algebra::GenAlgebra;
use geoalg::fatgraph;
use geoalg::frobenius::{self, StokesMatrix};
use geoalg::poly_core::{parse_expr, Coeff, RatMatrix};
use wasm_bindgen::prelude::*;

const MAX_RANK: usize = 6;

fn rank(n: usize) -> Result<(), String> {
    if (2..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(format!("n must lie in 2..={MAX_RANK}"))
    }
}

/// `{lhs, rhs}` in `an`, `dn` or `dnp` (level `p`).
pub fn bracket_text(alg: &str, n: usize, p: u32, lhs: &str, rhs: &str) -> Result<String, String> {
    rank(n)?;
    let algebra = match alg {
        "an" => GenAlgebra::an(n),
        "dn" => GenAlgebra::dn(n),
        "dnp" if p > 0 => GenAlgebra::dnp(n, p),
        "dnp" => return Err("p must be positive".into()),
        other => return Err(format!("unknown algebra {other:?}")),
    };
    let f = parse_expr(lhs).map_err(|e| format!("left operand: {e}"))?;
    let g = parse_expr(rhs).map_err(|e| format!("right operand: {e}"))?;
    algebra.bracket(&f, &g).map(|v| v.to_string()).map_err(|e| e.to_string())
}

/// Parses comma-separated rationals above the diagonal, row by row.
pub fn parse_stokes(n: usize, upper: &str) -> Result<StokesMatrix, String> {
    rank(n)?;
    let entries: Vec<Coeff> = upper
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Coeff>().map_err(|_| format!("not a rational: {s:?}")))
        .collect::<Result<_, _>>()?;
    if entries.len() != n * (n - 1) / 2 {
        return Err(format!("need {} entries above the diagonal, got {}", n * (n - 1) / 2, entries.len()));
    }
    StokesMatrix::from_upper(n, &entries).map_err(|e| e.to_string())
}

/// Applies a braid word to a Stokes matrix and reports the image together
/// with the characteristic polynomial of the full monodromy before and after.
pub fn braid_stokes_text(n: usize, upper: &str, word: &str) -> Result<String, String> {
    let s = parse_stokes(n, upper)?;
    let w = BraidWord::parse(word, n).map_err(|e| e.to_string())?;
    let mut a = s.matrix().to_lambda();
    for b in w.acting_order() {
        a = braid::act_an(b, &a).map_err(|e| e.to_string())?;
    }
    let image = StokesMatrix::new(RatMatrix::from_lambda(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let poly = |s: &StokesMatrix| -> Result<String, String> {
        let m = frobenius::monodromy_product(s, 1, s.dim()).map_err(|e| e.to_string())?;
        Ok(frobenius::char_poly(&m).to_string())
    };
    let (before, after) = (poly(&s)?, poly(&image)?);
    Ok(format!(
        "S =\n{s}image under {word} =\n{image}char poly of M_1...M_n before: {before}\nchar poly of M_1...M_n after:  {after}\ninvariant: {}\nS M_1...M_n = -S^T on the image: {}",
        before == after,
        frobenius::product_identity(&image)
    ))
}

/// `G_ij` for the disc with `n` marked points in shear coordinates.
pub fn geodesic_text(n: usize, i: usize, j: usize) -> Result<String, String> {
    rank(n)?;
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    fatgraph::geodesic_function(n, i, j).map(|g| g.to_string()).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn bracket(alg: &str, n: usize, p: u32, lhs: &str, rhs: &str) -> Result<String, JsError> {
    bracket_text(alg, n, p, lhs, rhs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn braid_stokes(n: usize, upper: &str, word: &str) -> Result<String, JsError> {
    braid_stokes_text(n, upper, word).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn geodesic(n: usize, i: usize, j: usize) -> Result<String, JsError> {
    geodesic_text(n, i, j).map_err(|e| JsError::new(&e))
}
