//! Closed-form procurement contracts.
//!
//! A client of efficiency `theta` producing output `q` bears the cost
//! `q^2 / (1 + delta * theta)`; the server values output linearly at `lambda`
//! per unit. Under complete information the server observes `theta` and
//! equates marginal benefit with marginal cost. Under incomplete information
//! (types uniform on `[0, 1]`) it equates marginal benefit with the marginal
//! virtual cost, which adds the information-rent term, and pays the rent on
//! top of the cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the information asymmetry the server is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// The server observes each client's efficiency.
    Complete,
    /// Efficiency is private; the server only knows its distribution.
    Incomplete,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Complete => f.write_str("complete"),
            Regime::Incomplete => f.write_str("incomplete"),
        }
    }
}

/// A client's private productivity type, always within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Efficiency(f64);

impl Efficiency {
    pub const MIN: Efficiency = Efficiency(0.0);
    pub const MAX: Efficiency = Efficiency(1.0);

    pub fn new(theta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&theta) {
            Ok(Efficiency(theta))
        } else {
            Err(Error::Domain(format!("efficiency {theta} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `points` evenly spaced efficiencies covering `[0, 1]` inclusive.
    pub fn grid(points: usize) -> Vec<Efficiency> {
        match points {
            0 => Vec::new(),
            1 => vec![Efficiency(0.0)],
            _ => (0..points)
                .map(|i| Efficiency(i as f64 / (points - 1) as f64))
                .collect(),
        }
    }
}

impl TryFrom<f64> for Efficiency {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Efficiency::new(v)
    }
}

impl From<Efficiency> for f64 {
    fn from(e: Efficiency) -> f64 {
        e.0
    }
}

/// Server-side market parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Marginal value of one unit of output to the server.
    pub lambda: f64,
    /// Sensitivity of cost to efficiency.
    pub delta: f64,
    pub n_clients: usize,
    pub k_select: usize,
    pub regime: Regime,
}

impl MarketParams {
    pub fn new(
        lambda: f64,
        delta: f64,
        n_clients: usize,
        k_select: usize,
        regime: Regime,
    ) -> Result<Self> {
        let params = MarketParams {
            lambda,
            delta,
            n_clients,
            k_select,
            regime,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "lambda > 0 violated: {}",
                self.lambda
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Domain(format!("delta > 0 violated: {}", self.delta)));
        }
        if self.k_select == 0 || self.k_select > self.n_clients {
            return Err(Error::Domain(format!(
                "1 ≤ k_select ≤ n_clients violated: k_select = {}, n_clients = {}",
                self.k_select, self.n_clients
            )));
        }
        Ok(())
    }

    pub fn with_regime(self, regime: Regime) -> Self {
        MarketParams { regime, ..self }
    }
}

/// An output-transfer pair offered to a client.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Contract {
    /// Contracted expected output.
    pub q: f64,
    /// Transfer paid for delivering `q`.
    pub r: f64,
}

impl Contract {
    pub const NULL: Contract = Contract { q: 0.0, r: 0.0 };

    pub fn new(q: f64, r: f64) -> Result<Self> {
        if q >= 0.0 && r >= 0.0 {
            Ok(Contract { q, r })
        } else {
            Err(Error::Domain(format!(
                "contract ({q}, {r}) has a negative entry"
            )))
        }
    }
}

/// Outcome of assigning a client the contract meant for another type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcDiagnostic {
    pub true_theta: Efficiency,
    pub reported_theta: Efficiency,
    pub truthful_utility: f64,
    pub misreport_utility: f64,
    /// `max(0, misreport_utility - truthful_utility)`.
    pub violation: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )))
    }
}

/// Production cost `q^2 / (1 + delta * theta)`.
pub fn cost(q: f64, theta: Efficiency, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if q.is_nan() || q < 0.0 {
        return Err(Error::Domain(format!(
            "output must be nonnegative, got {q}"
        )));
    }
    Ok(q * q / (1.0 + delta * theta.get()))
}

/// Quasi-linear client utility `R - C(q, theta)`.
pub fn client_utility(contract: Contract, theta: Efficiency, delta: f64) -> Result<f64> {
    Ok(contract.r - cost(contract.q, theta, delta)?)
}

#[inline]
pub fn server_value(q: f64, lambda: f64) -> f64 {
    lambda * q
}

/// Per-client server utility `lambda * q - R`.
#[inline]
pub fn server_utility_per_client(contract: Contract, params: &MarketParams) -> f64 {
    server_value(contract.q, params.lambda) - contract.r
}

/// Complete-information contract: `q = lambda (1 + delta theta) / 2` and a
/// transfer equal to the cost, so the client keeps no surplus.
pub fn solve_complete(theta: Efficiency, params: &MarketParams) -> Contract {
    let q = params.lambda * (1.0 + params.delta * theta.get()) / 2.0;
    // Transfer computed through `cost` itself so the client's utility is exactly zero.
    let r = q * q / (1.0 + params.delta * theta.get());
    Contract { q, r }
}

/// Incomplete-information contract.
///
/// Output solves `lambda = 2q/a + (1 - theta) 2 delta q / a^2` with
/// `a = 1 + delta theta`, i.e. `q = lambda a^2 / (2a + 2 delta (1 - theta))`;
/// the transfer is the cost plus the information rent.
pub fn solve_incomplete(theta: Efficiency, params: &MarketParams) -> Contract {
    let t = theta.get();
    let a = 1.0 + params.delta * t;
    let q = params.lambda * a * a / (2.0 * a + 2.0 * params.delta * (1.0 - t));
    let c = q * q / a;
    let r = c + rent(t, q, params.delta);
    Contract { q, r }
}

pub fn solve(theta: Efficiency, params: &MarketParams) -> Contract {
    match params.regime {
        Regime::Complete => solve_complete(theta, params),
        Regime::Incomplete => solve_incomplete(theta, params),
    }
}

#[inline]
fn rent(theta: f64, q: f64, delta: f64) -> f64 {
    let a = 1.0 + delta * theta;
    (1.0 - theta) * delta * q * q / (a * a)
}

/// Information rent `(1 - theta) delta q^2 / (1 + delta theta)^2`, i.e.
/// `-(1 - theta) dC/dtheta`.
pub fn information_rent(theta: Efficiency, q: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if q.is_nan() || q < 0.0 {
        return Err(Error::Domain(format!(
            "output must be nonnegative, got {q}"
        )));
    }
    Ok(rent(theta.get(), q, delta))
}

/// Residual of the complete-information condition `lambda - dC/dq`.
pub fn complete_foc_residual(q: f64, theta: Efficiency, params: &MarketParams) -> f64 {
    params.lambda - 2.0 * q / (1.0 + params.delta * theta.get())
}

/// Residual of `lambda - MVC(q)` where MVC adds the marginal rent.
pub fn incomplete_foc_residual(q: f64, theta: Efficiency, params: &MarketParams) -> f64 {
    let t = theta.get();
    let a = 1.0 + params.delta * t;
    params.lambda - (2.0 * q / a + (1.0 - t) * 2.0 * params.delta * q / (a * a))
}

/// Utility a client of type `true_theta` gets from each contract in
/// `reported_grid`, compared to its truthful contract.
///
/// Contracts come from the solver for `params.regime`; the tool only measures,
/// it asserts nothing about the size of the violations.
pub fn ic_diagnostic(
    true_theta: Efficiency,
    reported_grid: &[Efficiency],
    params: &MarketParams,
) -> Result<Vec<IcDiagnostic>> {
    if reported_grid.is_empty() {
        return Err(Error::Empty("report grid"));
    }
    let truthful_utility = client_utility(solve(true_theta, params), true_theta, params.delta)?;
    reported_grid
        .iter()
        .map(|&reported| {
            let misreport_utility =
                client_utility(solve(reported, params), true_theta, params.delta)?;
            Ok(IcDiagnostic {
                true_theta,
                reported_theta: reported,
                truthful_utility,
                misreport_utility,
                violation: (misreport_utility - truthful_utility).max(0.0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eff(t: f64) -> Efficiency {
        Efficiency::new(t).unwrap()
    }

    fn params(lambda: f64, delta: f64, regime: Regime) -> MarketParams {
        MarketParams::new(lambda, delta, 10, 3, regime).unwrap()
    }

    /// Golden-section maximiser on `[lo, hi]`, independent of the closed forms.
    fn argmax(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if f(a) < f(b) {
                lo = a;
            } else {
                hi = b;
            }
        }
        (lo + hi) / 2.0
    }

    #[test]
    fn cost_examples() {
        assert_eq!(cost(1.0, eff(0.0), 2.0).unwrap(), 1.0);
        assert_eq!(cost(1.5, eff(1.0), 2.0).unwrap(), 0.75);
        assert_eq!(cost(0.0, eff(0.3), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn cost_domain_errors() {
        assert!(Efficiency::new(1.5).is_err());
        assert!(Efficiency::new(-0.1).is_err());
        assert!(Efficiency::new(f64::NAN).is_err());
        assert!(cost(1.0, eff(0.5), 0.0).is_err());
        assert!(cost(1.0, eff(0.5), -1.0).is_err());
        assert!(cost(-1.0, eff(0.5), 2.0).is_err());
    }

    #[test]
    fn client_utility_examples() {
        let d = 2.0;
        assert_eq!(
            client_utility(Contract { q: 1.0, r: 0.5 }, eff(0.5), d).unwrap(),
            0.0
        );
        assert_eq!(client_utility(Contract::NULL, eff(0.7), d).unwrap(), 0.0);
        assert_eq!(
            client_utility(Contract { q: 1.5, r: 0.75 }, eff(1.0), d).unwrap(),
            0.0
        );
    }

    #[test]
    fn server_value_examples() {
        assert_eq!(server_value(2.0, 3.0), 6.0);
        assert_eq!(server_value(0.0, 5.0), 0.0);
        assert_eq!(server_value(1.5, 1.0), 1.5);
    }

    #[test]
    fn solve_complete_examples() {
        let c = solve_complete(eff(1.0), &params(1.0, 2.0, Regime::Complete));
        assert_eq!((c.q, c.r), (1.5, 0.75));
        let c = solve_complete(eff(0.5), &params(1.0, 2.0, Regime::Complete));
        assert_eq!((c.q, c.r), (1.0, 0.5));
        let c = solve_complete(eff(0.0), &params(2.0, 2.0, Regime::Complete));
        assert_eq!((c.q, c.r), (1.0, 1.0));
    }

    #[test]
    fn solve_incomplete_examples() {
        let p = params(1.0, 2.0, Regime::Incomplete);
        let c = solve_incomplete(eff(1.0), &p);
        assert_eq!((c.q, c.r), (1.5, 0.75));
        let c = solve_incomplete(eff(0.5), &p);
        assert!((c.q - 2.0 / 3.0).abs() < 1e-12);
        assert!((c.r - 1.0 / 3.0).abs() < 1e-12);
        let c = solve_incomplete(eff(0.0), &p);
        assert!((c.q - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.r - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn information_rent_examples() {
        assert_eq!(information_rent(eff(1.0), 1.5, 2.0).unwrap(), 0.0);
        assert!((information_rent(eff(0.5), 2.0 / 3.0, 2.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((information_rent(eff(0.0), 1.0 / 6.0, 2.0).unwrap() - 1.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn server_utility_examples() {
        let p = params(1.0, 2.0, Regime::Complete);
        assert_eq!(
            server_utility_per_client(Contract { q: 1.5, r: 0.75 }, &p),
            0.75
        );
        assert_eq!(
            server_utility_per_client(Contract { q: 0.5, r: 0.25 }, &p),
            0.25
        );
        assert_eq!(
            server_utility_per_client(Contract::NULL, &params(7.0, 2.0, Regime::Complete)),
            0.0
        );
    }

    #[test]
    fn closed_forms_match_numerical_optimum() {
        for &(lambda, delta) in &[(0.5, 1.0), (1.0, 2.0), (2.0, 4.0), (1.0, 1.0)] {
            let p = params(lambda, delta, Regime::Complete);
            for theta in Efficiency::grid(21) {
                let t = theta.get();
                let complete = argmax(
                    |q| lambda * q - q * q / (1.0 + delta * t),
                    0.0,
                    10.0 * lambda,
                );
                // Virtual surplus: value - cost - (1 - F(t))/f(t) * (-dC/dtheta), F uniform.
                let virtual_surplus = |q: f64| {
                    let a = 1.0 + delta * t;
                    lambda * q - q * q / a - (1.0 - t) * delta * q * q / (a * a)
                };
                let incomplete = argmax(virtual_surplus, 0.0, 10.0 * lambda);
                assert!((solve_complete(theta, &p).q - complete).abs() < 1e-6);
                assert!((solve_incomplete(theta, &p).q - incomplete).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn foc_residuals_vanish() {
        for &lambda in &[0.5, 1.0, 2.0] {
            for &delta in &[1.0, 2.0, 4.0] {
                let p = params(lambda, delta, Regime::Incomplete);
                for theta in Efficiency::grid(1001) {
                    let c = solve_complete(theta, &p);
                    assert!(complete_foc_residual(c.q, theta, &p).abs() <= 1e-12);
                    let c = solve_incomplete(theta, &p);
                    assert!(incomplete_foc_residual(c.q, theta, &p).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn incomplete_reduces_to_reference_point() {
        let p = params(1.0, 2.0, Regime::Incomplete);
        for theta in Efficiency::grid(1001) {
            let t = theta.get();
            let expected = (1.0 + 2.0 * t).powi(2) / 6.0;
            assert!((solve_incomplete(theta, &p).q - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_rent_under_complete_information() {
        for &lambda in &[0.5, 1.0, 2.0] {
            for &delta in &[1.0, 2.0, 4.0] {
                let p = params(lambda, delta, Regime::Complete);
                for theta in Efficiency::grid(1001) {
                    let u = client_utility(solve_complete(theta, &p), theta, delta).unwrap();
                    assert!(u.abs() <= 1e-12, "theta {theta:?}: {u}");
                }
            }
        }
    }

    #[test]
    fn regime_properties_on_grid() {
        let p = params(1.0, 2.0, Regime::Incomplete);
        let mut prev = (0.0, 0.0);
        for theta in Efficiency::grid(1001) {
            let ci = solve_complete(theta, &p);
            let ii = solve_incomplete(theta, &p);
            let rent = information_rent(theta, ii.q, 2.0).unwrap();
            let u = client_utility(ii, theta, 2.0).unwrap();
            assert!(rent >= 0.0);
            assert!((u - rent).abs() <= 1e-12);
            if theta.get() < 1.0 {
                assert!(ii.q < ci.q);
            } else {
                assert_eq!(ii.q, ci.q);
            }
            assert!(server_utility_per_client(ci, &p) >= server_utility_per_client(ii, &p));
            assert!(ci.q >= prev.0 && ii.q >= prev.1);
            prev = (ci.q, ii.q);
        }
    }

    #[test]
    fn ic_diagnostic_truthful_is_zero() {
        let p = params(1.0, 2.0, Regime::Incomplete);
        for t in [1.0, 0.25] {
            let d = ic_diagnostic(eff(t), &[eff(t)], &p).unwrap();
            assert_eq!(d.len(), 1);
            assert_eq!(d[0].violation, 0.0);
        }
        assert_eq!(
            ic_diagnostic(eff(0.5), &[], &p),
            Err(Error::Empty("report grid"))
        );
    }

    #[test]
    fn ic_diagnostic_regression_fixture() {
        // Independent evaluation of each misreport with the worked formulas at
        // lambda = 1, delta = 2: q(s) = (1+2s)^2/6, R(s) = q^2/(1+2s) + (1-s) 2 q^2/(1+2s)^2.
        let p = params(1.0, 2.0, Regime::Incomplete);
        let truth = 0.5;
        let utility = |s: f64| {
            let q = (1.0 + 2.0 * s).powi(2) / 6.0;
            let r = q * q / (1.0 + 2.0 * s) + (1.0 - s) * 2.0 * q * q / (1.0 + 2.0 * s).powi(2);
            r - q * q / (1.0 + 2.0 * truth)
        };
        let grid = Efficiency::grid(101);
        let report = ic_diagnostic(eff(truth), &grid, &p).unwrap();
        assert_eq!(report.len(), 101);
        let oracle_max = grid
            .iter()
            .map(|s| (utility(s.get()) - utility(truth)).max(0.0))
            .fold(0.0, f64::max);
        let max = report.iter().map(|d| d.violation).fold(0.0, f64::max);
        assert!((max - oracle_max).abs() < 1e-12);
        // Frozen from the oracle: under-reporting to 0.37 gains about 0.0139.
        assert!((max - 0.013_878_308_888_888_94).abs() < 1e-12, "{max}");
        let worst = report
            .iter()
            .max_by(|a, b| a.violation.total_cmp(&b.violation))
            .unwrap();
        assert!((worst.reported_theta.get() - 0.37).abs() < 1e-12);
    }
}
