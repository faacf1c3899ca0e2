//! Values of `F_n` on the lattice `(k pi, l pi)`.
//!
//! `F_n(k pi, l pi) = (1/n) sum_{i,j} a_ij cos(i k pi / n) cos(j l pi / n)`
//! only involves cosines at multiples of `pi / n`, so sums over `i` collapse
//! onto residues. The key identity: for a 1-periodic `f`,
//!
//! ```text
//! (1/n) sum_{k=1}^{n} f(k p / n) = (1/ord p) sum_{k=1}^{ord p} f(k / ord p),   ord p = n / gcd(p, n).
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::coeffs::{rng_for, CoeffLaw};
use crate::error::{Error, Result};
use crate::experiment::replicate;
use crate::nodal::neumaier_sum;
use crate::quad;
use crate::stats::normal_cdf;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Order of `p` in `Z / nZ`.
pub fn ord(p: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    Ok(n / gcd(p, n))
}

/// `max(ord p, ord (p + 1)) >= sqrt n` for every `p` in `0..n`.
pub fn check_order_bound(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    for p in 0..n {
        let m = ord(p, n)?.max(ord(p + 1, n)?);
        if m * m < n {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both sides of the residue reduction for a 1-periodic `f`.
///
/// The left side is evaluated at `((k p) mod n) / n`, with residue 0 mapped
/// to 1 so that both sides sample the same points.
pub fn periodic_riemann_reduce(f: impl Fn(f64) -> f64, n: u64, p: u64) -> Result<(f64, f64)> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidArgument("n and p must be positive".into()));
    }
    let o = ord(p, n)?;
    let lhs = neumaier_sum((1..=n).map(|k| {
        let r = (k as u128 * p as u128 % n as u128) as u64;
        f(if r == 0 { 1.0 } else { r as f64 / n as f64 })
    })) / n as f64;
    let rhs = neumaier_sum((1..=o).map(|k| f(k as f64 / o as f64))) / o as f64;
    Ok((lhs, rhs))
}

/// Distinct values of `cos(i k pi / n)` for `i = 1..n`, with multiplicities.
/// Values are indexed by the residue `i k mod 2n`, so signs are kept exactly.
pub fn cos_residues(n: u64, k: u64) -> Vec<(f64, u64)> {
    let mut m: BTreeMap<u64, u64> = BTreeMap::new();
    for i in 1..=n {
        *m.entry(i * k % (2 * n)).or_default() += 1;
    }
    m.into_iter()
        .map(|(r, c)| ((PI * r as f64 / n as f64).cos(), c))
        .collect()
}

fn check_lattice(n: u64, k: u64, l: u64, allow_zero: bool) -> Result<()> {
    let lo = if allow_zero { 0 } else { 1 };
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    if k < lo || k > n || l < lo || l > n {
        return Err(Error::InvalidArgument(format!(
            "lattice indices must lie in [{lo}, {n}], got ({k}, {l})"
        )));
    }
    Ok(())
}

/// `sum m ln phi` accumulated as log-modulus and phase.
fn log_product(terms: impl Iterator<Item = (Complex64, f64)>) -> Complex64 {
    let (mut logmod, mut phase) = (Vec::new(), Vec::new());
    for (phi, m) in terms {
        let r = phi.norm();
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        logmod.push(m * r.ln());
        phase.push(m * phi.arg());
    }
    Complex64::from_polar(neumaier_sum(logmod).exp(), neumaier_sum(phase))
}

/// Characteristic function of `F_n(k pi, l pi)` at `xi`, exactly:
///
/// ```text
/// prod_{r, s} phi_a((xi / n) c_r d_s)^(m_r m_s)
/// ```
///
/// over the distinct cosines `c_r` (multiplicity `m_r`) of `i k pi / n` and
/// `d_s` of `j l pi / n`. Cost is quadratic in the number of residues.
pub fn char_fn_lattice(law: CoeffLaw, n: u64, k: u64, l: u64, xi: f64) -> Result<Complex64> {
    check_lattice(n, k, l, false)?;
    let cx = cos_residues(n, k);
    let cy = cos_residues(n, l);
    let s = xi / n as f64;
    Ok(log_product(cx.iter().flat_map(|&(c, mc)| {
        cy.iter()
            .map(move |&(d, md)| (law.char_fn(s * c * d), (mc * md) as f64))
    })))
}

/// The order-based product
///
/// ```text
/// prod_{i <= ord k, j <= ord l} phi_a((xi / n) cos(i pi / ord k) cos(j pi / ord l))^(gcd(k, n) gcd(l, n)).
/// ```
///
/// It drops the signs of `cos(i k pi / n)` relative to `cos(i pi / ord k)`,
/// so it agrees with [`char_fn_lattice`] for symmetric laws and otherwise
/// can differ by complex conjugation of some factors.
pub fn char_fn_lattice_by_order(
    law: CoeffLaw,
    n: u64,
    k: u64,
    l: u64,
    xi: f64,
) -> Result<Complex64> {
    check_lattice(n, k, l, false)?;
    let (ok, ol) = (ord(k, n)?, ord(l, n)?);
    let exponent = (gcd(k, n) * gcd(l, n)) as f64;
    let s = xi / n as f64;
    Ok(log_product((1..=ok).flat_map(|i| {
        let c = (PI * i as f64 / ok as f64).cos();
        (1..=ol).map(move |j| {
            let d = (PI * j as f64 / ol as f64).cos();
            (law.char_fn(s * c * d), exponent)
        })
    })))
}

/// `ln |phi|` of the characteristic function by the `n^2`-term product.
/// Cosine arguments are reduced mod `2 pi` exactly, so each factor is
/// evaluated at the same point as in [`char_fn_lattice`].
pub fn char_fn_lattice_brute_logmod(law: CoeffLaw, n: u64, k: u64, l: u64, xi: f64) -> f64 {
    let nf = n as f64;
    let cosines = |k: u64| -> Vec<f64> {
        (1..=n)
            .map(|i| (PI * (i * k % (2 * n)) as f64 / nf).cos())
            .collect()
    };
    let (c, d) = (cosines(k), cosines(l));
    neumaier_sum(c.iter().flat_map(|&ci| {
        d.iter()
            .map(move |&dj| law.char_fn(xi / nf * ci * dj).norm().ln())
    }))
}

/// `Var F_n(k pi, l pi)` by the direct double sum.
pub fn lattice_variance(n: u64, k: u64, l: u64) -> Result<f64> {
    check_lattice(n, k, l, true)?;
    let nf = n as f64;
    let row = |k: u64| neumaier_sum((1..=n).map(|i| (PI * (i * k) as f64 / nf).cos().powi(2)));
    Ok(row(k) * row(l) / (nf * nf))
}

/// `Var F_n(k pi, l pi)` through the residue reduction:
/// `(1/ord k) sum_{i <= ord k} cos^2(i pi / ord k)` times the same in `l`.
pub fn lattice_variance_reduced(n: u64, k: u64, l: u64) -> Result<f64> {
    check_lattice(n, k, l, true)?;
    let avg = |k: u64| -> Result<f64> {
        let o = ord(k, n)?;
        Ok(neumaier_sum((1..=o).map(|i| (PI * i as f64 / o as f64).cos().powi(2))) / o as f64)
    };
    Ok(avg(k)? * avg(l)?)
}

/// `P(|F_n(k pi, l pi)| <= eps)` for Gaussian coefficients.
pub fn smallball_gaussian(n: u64, k: u64, l: u64, eps: f64) -> Result<f64> {
    let sigma = lattice_variance(n, k, l)?.sqrt();
    Ok(2.0 * normal_cdf(eps / sigma) - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmallBall {
    pub probability: f64,
    pub hits: u64,
    pub reps: u64,
    /// Binomial standard error `sqrt(p (1 - p) / reps)`.
    pub se: f64,
}

/// Fraction of `reps` fresh coefficient draws with `|F_n(k pi, l pi)| <= eps`.
pub fn smallball_empirical(
    law: CoeffLaw,
    n: u64,
    k: u64,
    l: u64,
    eps: f64,
    reps: u64,
    seed: u64,
) -> Result<SmallBall> {
    check_lattice(n, k, l, false)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if reps < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 reps, got {reps}"
        )));
    }
    let nf = n as f64;
    let cx: Vec<f64> = (1..=n).map(|i| (PI * (i * k) as f64 / nf).cos()).collect();
    let cy: Vec<f64> = (1..=n).map(|j| (PI * (j * l) as f64 / nf).cos()).collect();
    let inside = replicate(reps as usize, seed, |_, s| {
        let mut rng = rng_for(s);
        let mut v = 0.0;
        for &ci in &cx {
            let mut row = 0.0;
            for &dj in &cy {
                row += law.sample(&mut rng) * dj;
            }
            v += ci * row;
        }
        Ok((v / nf).abs() <= eps)
    })?;
    let hits = inside.iter().filter(|&&b| b).count() as u64;
    let p = hits as f64 / reps as f64;
    Ok(SmallBall {
        probability: p,
        hits,
        reps,
        se: (p * (1.0 - p) / reps as f64).sqrt(),
    })
}

/// `ord k >= sqrt n` and `ord l >= sqrt n`, the regime of the small-ball bound.
pub fn order_condition(n: u64, k: u64, l: u64) -> Result<bool> {
    let (a, b) = (ord(k, n)?, ord(l, n)?);
    Ok(a * a >= n && b * b >= n)
}

/// Gaussian-envelope integral of the characteristic function:
///
/// ```text
/// eps * int |Phi(xi)| exp(-eps^2 xi^2 / 2) d xi
/// ```
///
/// truncated where the envelope tail drops below 1e-12 of its mass.
pub fn halasz_integral(law: CoeffLaw, n: u64, k: u64, l: u64, eps: f64) -> Result<f64> {
    check_lattice(n, k, l, false)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let cx = cos_residues(n, k);
    let cy = cos_residues(n, l);
    let s = 1.0 / n as f64;
    let modulus = |xi: f64| -> f64 {
        let mut logmod = 0.0;
        for &(c, mc) in &cx {
            for &(d, md) in &cy {
                let r = law.char_fn(xi * s * c * d).norm();
                if r == 0.0 {
                    return 0.0;
                }
                logmod += (mc * md) as f64 * r.ln();
            }
        }
        logmod.exp()
    };
    // exp(-u^2 / 2) integrated beyond u = 7.5 is below 1e-12 of sqrt(2 pi).
    let cut = 7.5 / eps;
    let (v, _) = quad::integrate_1d(
        |xi| modulus(xi) * (-0.5 * eps * eps * xi * xi).exp(),
        0.0,
        cut,
        1e-12,
        1e-14 / eps,
        40,
    );
    Ok(2.0 * eps * v)
}
