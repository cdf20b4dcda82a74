//! Daily state machine: labor adjustment, demand formation, production,
//! rationing and inventory updates.

mod trajectory;

pub use trajectory::{MonthlyMeans, Trajectory};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::econ::{technical_coefficients, Economy};
use crate::production::{
    capacity, input_constrained_output, input_usage, noncritical_linear_term, realized_output,
    InputBound, InputState, ProductionError, ProductionKind,
};
use crate::shocks::{ShockSchedule, XiPhase};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("total steady-state consumption is zero")]
    ZeroConsumption,
    #[error("preference shocks remove every good from the basket")]
    AllGoodsShocked,
    #[error("non-positive income {0}")]
    NonPositiveIncome(f64),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("schedule covers {have} days, need {need}")]
    ScheduleTooShort { have: usize, need: usize },
    #[error("schedule is for {schedule} industries, economy has {economy}")]
    Dimension { schedule: usize, economy: usize },
    #[error(transparent)]
    Production(#[from] ProductionError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

/// Behavioral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Days over which inventory gaps are closed.
    pub tau: f64,
    pub gamma_h: f64,
    pub gamma_f: f64,
    /// Consumption persistence.
    pub rho: f64,
    /// Propensity to consume out of labor income.
    pub m: f64,
    /// Share of preference-shocked spending that is saved.
    pub delta_s: f64,
    /// Share of lost labor income replaced by benefits.
    pub b: f64,
    /// Share of households expecting an L-shaped recovery.
    pub l_share_recovery: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            tau: 10.0,
            gamma_h: 1.0 / 30.0,
            gamma_f: 1.0 / 15.0,
            rho: 0.99,
            m: 0.82,
            delta_s: 0.5,
            b: 0.8,
            l_share_recovery: 0.5,
        }
    }
}

impl Params {
    /// Defaults with `m` read off the economy, which makes the pre-shock
    /// state an exact fixed point.
    pub fn calibrated(econ: &Economy) -> Self {
        let labor = econ.l0.sum();
        let m = if labor > 0.0 {
            (econ.c0.sum() / labor).min(1.0)
        } else {
            0.82
        };
        Self {
            m,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let checks = [
            (self.tau >= 1.0, "tau >= 1"),
            (unit(self.gamma_h), "0 <= gamma_h <= 1"),
            (unit(self.gamma_f), "0 <= gamma_f <= 1"),
            ((0.0..1.0).contains(&self.rho), "0 <= rho < 1"),
            (unit(self.m), "0 <= m <= 1"),
            (unit(self.delta_s), "0 <= delta_s <= 1"),
            (unit(self.b), "0 <= b <= 1"),
            (unit(self.l_share_recovery), "0 <= l_share_recovery <= 1"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(DynamicsError::InvalidParam(what.into()));
            }
        }
        Ok(())
    }
}

/// Everything that changes from one day to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub day: usize,
    pub s: DMatrix<f64>,
    pub l: DVector<f64>,
    pub d_prev: DVector<f64>,
    /// Yesterday's endogenous aggregate consumption, before the savings
    /// shock is applied.
    pub cd_prev: f64,
    pub xi: f64,
    /// Expectation level fixed at the first lockdown day.
    pub xi_lockdown: Option<f64>,
    pub theta0: DVector<f64>,
    pub xcap_prev: DVector<f64>,
    pub xinp_prev: Vec<InputBound>,
}

/// Observables of one simulated day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayRecord {
    pub day: usize,
    pub x: DVector<f64>,
    pub d: DVector<f64>,
    /// Household deliveries.
    pub c: DVector<f64>,
    /// Other final deliveries.
    pub f: DVector<f64>,
    /// Household demand per industry.
    pub cd: DVector<f64>,
    /// Other final demand per industry.
    pub fd: DVector<f64>,
    /// Labor compensation.
    pub l: DVector<f64>,
    pub xcap: DVector<f64>,
    pub xinp: Vec<InputBound>,
    /// Income entering consumption, benefits included.
    pub l_eff: f64,
    pub cd_total: f64,
    pub xi: f64,
    /// Aggregate savings shock.
    pub agg_eps: f64,
    /// Industries whose output was set by the input constraint.
    pub xinp_binding: usize,
    /// Industries where the pooled non-critical term of a CES-limit form
    /// was the tightest constraint.
    pub nc_binding: usize,
}

/// Matrix-valued flows of one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayFlows {
    pub orders: DMatrix<f64>,
    pub z_deliv: DMatrix<f64>,
    pub usage: DMatrix<f64>,
}

/// Static data derived once per economy.
#[derive(Debug, Clone)]
pub struct Model<'a> {
    pub econ: &'a Economy,
    pub params: Params,
    pub kind: ProductionKind,
    pub a: DMatrix<f64>,
    /// Inventory targets `n_i * z0_ji`.
    pub s_target: DMatrix<f64>,
    pub f0_total: DVector<f64>,
    pub l_tilde0: f64,
}

impl<'a> Model<'a> {
    pub fn new(econ: &'a Economy, params: Params, kind: ProductionKind) -> Result<Self> {
        params.validate()?;
        let a = technical_coefficients(econ).a;
        let n = econ.n_industries();
        let s_target = DMatrix::from_fn(n, n, |j, i| econ.inventory_targets[i] * econ.z0[(j, i)]);
        Ok(Self {
            econ,
            params,
            kind,
            a,
            s_target,
            f0_total: econ.f0_total(),
            l_tilde0: econ.l0.sum(),
        })
    }
}

pub fn init_steady_state(econ: &Economy) -> Result<SimState> {
    let c_sum = econ.c0.sum();
    if c_sum <= 0.0 {
        return Err(DynamicsError::ZeroConsumption);
    }
    let n = econ.n_industries();
    Ok(SimState {
        day: 0,
        s: DMatrix::from_fn(n, n, |j, i| econ.inventory_targets[i] * econ.z0[(j, i)]),
        l: econ.l0.clone(),
        d_prev: econ.x0.clone(),
        cd_prev: c_sum,
        xi: 1.0,
        xi_lockdown: None,
        theta0: &econ.c0 / c_sum,
        xcap_prev: econ.x0.clone(),
        xinp_prev: vec![InputBound::Unbounded; n],
    })
}

/// `O_ji = max(0, a_ji d_prev_i + (target_ji - s_ji) / tau)`.
pub fn intermediate_orders(
    a: &DMatrix<f64>,
    s_target: &DMatrix<f64>,
    s: &DMatrix<f64>,
    d_prev: &DVector<f64>,
    tau: f64,
) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |j, i| {
        (a[(j, i)] * d_prev[i] + (s_target[(j, i)] - s[(j, i)]) / tau).max(0.0)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionOutcome {
    /// Aggregate demand after the savings shock.
    pub total: f64,
    /// Aggregate demand before the savings shock; carried to the next day.
    pub endogenous: f64,
    pub theta: DVector<f64>,
    pub agg_eps: f64,
    pub vector: DVector<f64>,
}

/// Household consumption demand for the day.
///
/// `l_tilde` is the income households currently receive (benefits
/// included) and `l_tilde_p` their permanent-income estimate.
pub fn consumption_demand(
    cd_prev: f64,
    theta0: &DVector<f64>,
    eps_d: &[f64],
    params: &Params,
    l_tilde: f64,
    l_tilde_p: f64,
) -> Result<ConsumptionOutcome> {
    if !(l_tilde > 0.0) {
        return Err(DynamicsError::NonPositiveIncome(l_tilde));
    }
    if !(l_tilde_p > 0.0) {
        return Err(DynamicsError::NonPositiveIncome(l_tilde_p));
    }
    let theta_bar = DVector::from_iterator(
        theta0.len(),
        theta0.iter().zip(eps_d).map(|(t, e)| t * (1.0 - e)),
    );
    let kept = theta_bar.sum();
    if kept <= 0.0 {
        return Err(DynamicsError::AllGoodsShocked);
    }
    let theta = &theta_bar / kept;
    let agg_eps = params.delta_s * (1.0 - kept);
    let rho = params.rho;
    let m = params.m;
    let endogenous = (rho * cd_prev.ln()
        + 0.5 * (1.0 - rho) * (m * l_tilde).ln()
        + 0.5 * (1.0 - rho) * (m * l_tilde_p).ln())
    .exp();
    let total = (1.0 - agg_eps) * endogenous;
    let vector = &theta * total;
    Ok(ConsumptionOutcome {
        total,
        endogenous,
        theta,
        agg_eps,
        vector,
    })
}

/// Drop in labor income from first-order supply shocks, halved.
pub fn xi_lockdown(l0: &DVector<f64>, eps_s: &[f64]) -> f64 {
    let l_tilde0 = l0.sum();
    let l_start: f64 = l0.iter().zip(eps_s).map(|(l, e)| (1.0 - e) * l).sum();
    1.0 - 0.5 * (l_tilde0 - l_start) / l_tilde0
}

/// Permanent-income factor for a day in `phase`.
pub fn permanent_income(xi_prev: f64, xi_l: f64, params: &Params, phase: XiPhase) -> f64 {
    match phase {
        XiPhase::Pre => 1.0,
        XiPhase::Lockdown => xi_l,
        XiPhase::Post => {
            let rho = params.rho;
            let nu = -(1.0 - rho) * (1.0 - xi_l) * params.l_share_recovery;
            1.0 - rho + rho * xi_prev + nu
        }
    }
}

/// Deliveries under proportional rationing.
pub fn ration_and_deliver(
    x: &DVector<f64>,
    d: &DVector<f64>,
    orders: &DMatrix<f64>,
    cd: &DVector<f64>,
    fd: &DVector<f64>,
) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let n = x.len();
    let scale = DVector::from_iterator(
        n,
        (0..n).map(|i| if d[i] > 0.0 { x[i] / d[i] } else { 1.0 }),
    );
    // orders[(j, i)] is placed by i with supplier j
    let mut z = DMatrix::from_fn(orders.nrows(), orders.ncols(), |j, i| {
        orders[(j, i)] * scale[j]
    });
    let mut c = cd.component_mul(&scale);
    let mut f = fd.component_mul(&scale);
    // hand the rounding residue to the largest recipient so each row sums to x
    for j in 0..n {
        if d[j] <= 0.0 {
            continue;
        }
        let mut parts: Vec<f64> = z.row(j).iter().copied().collect();
        parts.extend([c[j], f[j]]);
        let big = (0..parts.len())
            .max_by(|&a, &b| parts[a].total_cmp(&parts[b]))
            .unwrap();
        let others = compensated_sum(
            parts
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != big)
                .map(|(_, v)| *v),
        );
        let rest = (x[j] - others).max(0.0);
        match big.checked_sub(n) {
            None => z[(j, big)] = rest,
            Some(0) => c[j] = rest,
            Some(_) => f[j] = rest,
        }
    }
    (z, c, f)
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

pub fn update_inventories(
    s: &DMatrix<f64>,
    z_deliv: &DMatrix<f64>,
    usage: &DMatrix<f64>,
) -> DMatrix<f64> {
    DMatrix::from_fn(s.nrows(), s.ncols(), |j, i| {
        (s[(j, i)] + z_deliv[(j, i)] - usage[(j, i)]).max(0.0)
    })
}

/// Hiring and firing towards yesterday's binding constraint, then the cap
/// from today's supply shock.
pub fn update_labor(
    state: &SimState,
    econ: &Economy,
    params: &Params,
    eps_s: &[f64],
) -> DVector<f64> {
    let n = econ.n_industries();
    DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let x0 = econ.x0[i];
            let l0 = econ.l0[i];
            let delta = if x0 > 0.0 {
                let target = state.xinp_prev[i].min_with(state.d_prev[i]);
                l0 / x0 * (target - state.xcap_prev[i])
            } else {
                0.0
            };
            let gamma = if delta >= 0.0 {
                params.gamma_h
            } else {
                params.gamma_f
            };
            let l = state.l[i] + gamma * delta;
            l.min((1.0 - eps_s[i]) * l0).max(0.0)
        }),
    )
}

/// Advances `state` by one day and returns what happened.
pub fn step(
    state: &mut SimState,
    model: &Model,
    schedule: &ShockSchedule,
) -> Result<(DayRecord, DayFlows)> {
    let t = state.day;
    if t >= schedule.horizon() {
        return Err(DynamicsError::ScheduleTooShort {
            have: schedule.horizon(),
            need: t + 1,
        });
    }
    let econ = model.econ;
    let params = &model.params;
    let eps_s = &schedule.eps_s[t];
    let eps_d = &schedule.eps_d[t];

    // 1. labor
    let l = update_labor(state, econ, params, eps_s);
    let xcap = capacity(&l, &econ.l0, &econ.x0)?;

    // 2. demand
    let orders = intermediate_orders(
        &model.a,
        &model.s_target,
        &state.s,
        &state.d_prev,
        params.tau,
    );

    let phase = schedule.xi_phase[t];
    if phase != XiPhase::Pre && state.xi_lockdown.is_none() {
        state.xi_lockdown = Some(xi_lockdown(&econ.l0, eps_s));
    }
    let xi = permanent_income(state.xi, state.xi_lockdown.unwrap_or(1.0), params, phase);
    let l_tilde = l.sum();
    let l_eff = if schedule.benefits[t] {
        params.b * model.l_tilde0 + (1.0 - params.b) * l_tilde
    } else {
        l_tilde
    };
    let cons = consumption_demand(
        state.cd_prev,
        &state.theta0,
        eps_d,
        params,
        l_eff,
        xi * model.l_tilde0,
    )?;

    let ff = &schedule.f_factor[t];
    let fd = DVector::from_iterator(
        econ.n_industries(),
        (0..econ.n_industries()).map(|i| {
            (0..econ.f0.ncols())
                .map(|k| econ.f0[(i, k)] * ff[(i, k)])
                .sum()
        }),
    );
    let d = DVector::from_iterator(
        econ.n_industries(),
        (0..econ.n_industries()).map(|i| orders.row(i).sum() + cons.vector[i] + fd[i]),
    );

    // 3. production
    let st = InputState {
        s: &state.s,
        a: &model.a,
        criticality: &econ.criticality,
        xcap0: &econ.x0,
    };
    let xinp = input_constrained_output(model.kind, &st);
    let x = realized_output(&d, &xcap, &xinp);
    let xinp_binding = (0..x.len())
        .filter(|&i| xinp[i].is_below(xcap[i].min(d[i])))
        .count();
    let nc_binding = if model.kind.is_ces_limit() {
        let base = input_constrained_output(model.kind.base(), &st);
        let nc = noncritical_linear_term(model.kind, &st);
        (0..x.len())
            .filter(|&i| nc[i].is_below(base[i].min_with(xcap[i].min(d[i]))))
            .count()
    } else {
        0
    };

    // 4. rationing
    let (z_deliv, c, f) = ration_and_deliver(&x, &d, &orders, &cons.vector, &fd);

    // 5. inventories
    let usage = input_usage(model.kind, &x, &st)?;
    state.s = update_inventories(&state.s, &z_deliv, &usage);

    state.l = l.clone();
    state.d_prev = d.clone();
    state.cd_prev = cons.endogenous;
    state.xi = xi;
    state.xcap_prev = xcap.clone();
    state.xinp_prev = xinp.clone();
    state.day += 1;

    let record = DayRecord {
        day: t,
        x,
        d,
        c,
        f,
        cd: cons.vector,
        fd,
        l,
        xcap,
        xinp,
        l_eff,
        cd_total: cons.total,
        xi,
        agg_eps: cons.agg_eps,
        xinp_binding,
        nc_binding,
    };
    Ok((
        record,
        DayFlows {
            orders,
            z_deliv,
            usage,
        },
    ))
}

/// Simulates `horizon` days from the steady state.
pub fn run(
    econ: &Economy,
    params: &Params,
    schedule: &ShockSchedule,
    kind: ProductionKind,
    horizon: usize,
) -> Result<Trajectory> {
    if horizon > schedule.horizon() {
        return Err(DynamicsError::ScheduleTooShort {
            have: schedule.horizon(),
            need: horizon,
        });
    }
    if let Some(row) = schedule.eps_s.first() {
        if row.len() != econ.n_industries() {
            return Err(DynamicsError::Dimension {
                schedule: row.len(),
                economy: econ.n_industries(),
            });
        }
    }
    let model = Model::new(econ, *params, kind)?;
    let mut state = init_steady_state(econ)?;
    let mut records = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let (rec, _) = step(&mut state, &model, schedule)?;
        records.push(rec);
    }
    Ok(Trajectory {
        industry_codes: econ.industry_codes.clone(),
        start: schedule.calendar.sim_start,
        x0: econ.x0.clone(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econ::{validate_economy, CriticalityMatrix, IoTable, DEFAULT_MARKET_CLEARING_TOL};
    use crate::shocks::Calendar;

    fn one_industry() -> Economy {
        one_industry_with_labor(50.0)
    }

    fn one_industry_with_labor(l: f64) -> Economy {
        let t = IoTable {
            industry_codes: vec!["A".into()],
            z: DMatrix::zeros(1, 1),
            c: DVector::from_element(1, 100.0),
            f: DMatrix::zeros(1, 0),
            f_categories: vec![],
            l: DVector::from_element(1, l),
            x: None,
        };
        validate_economy(
            &t,
            DVector::from_element(1, 5.0),
            CriticalityMatrix::all_critical(1),
            DEFAULT_MARKET_CLEARING_TOL,
        )
        .unwrap()
    }

    #[test]
    fn one_industry_initial_state() {
        let s = init_steady_state(&one_industry()).unwrap();
        assert_eq!(s.cd_prev, 100.0);
        assert_eq!(s.d_prev.as_slice(), &[100.0]);
        assert_eq!(s.theta0.sum(), 1.0);
    }

    #[test]
    fn zero_consumption_rejected() {
        let mut e = one_industry();
        e.c0[0] = 0.0;
        assert_eq!(
            init_steady_state(&e).unwrap_err(),
            DynamicsError::ZeroConsumption
        );
    }

    #[test]
    fn orders_refill_gap() {
        let a = DMatrix::from_element(1, 1, 0.05);
        let target = DMatrix::from_element(1, 1, 50.0);
        let d_prev = DVector::from_element(1, 100.0);
        let o = intermediate_orders(&a, &target, &DMatrix::zeros(1, 1), &d_prev, 10.0);
        assert_eq!(o[(0, 0)], 10.0);
        let o = intermediate_orders(
            &a,
            &target,
            &DMatrix::from_element(1, 1, 100.0),
            &DVector::from_element(1, 1.0),
            10.0,
        );
        assert_eq!(o[(0, 0)], 0.0);
    }

    #[test]
    fn consumption_fixed_point_and_preference_shift() {
        let p = Params {
            m: 0.8,
            ..Params::default()
        };
        let theta0 = DVector::from_row_slice(&[0.5, 0.5]);
        let l0 = 125.0;
        let out = consumption_demand(100.0, &theta0, &[0.0, 0.0], &p, l0, l0).unwrap();
        assert!((out.total - 100.0).abs() < 1e-12);
        assert_eq!(out.theta, theta0);
        assert_eq!(out.agg_eps, 0.0);
        let out = consumption_demand(100.0, &theta0, &[1.0, 0.0], &p, l0, l0).unwrap();
        assert_eq!(out.theta.as_slice(), &[0.0, 1.0]);
        assert_eq!(out.agg_eps, 0.25);
        assert_eq!(
            consumption_demand(100.0, &theta0, &[1.0, 1.0], &p, l0, l0).unwrap_err(),
            DynamicsError::AllGoodsShocked
        );
        assert!(consumption_demand(100.0, &theta0, &[0.0, 0.0], &p, 0.0, l0).is_err());
    }

    #[test]
    fn xi_examples() {
        let l0 = DVector::from_row_slice(&[50.0, 50.0]);
        assert!((xi_lockdown(&l0, &[0.32, 0.0]) - 0.92).abs() < 1e-15);
        let p = Params::default();
        assert_eq!(permanent_income(0.5, 0.92, &p, XiPhase::Pre), 1.0);
        assert_eq!(permanent_income(1.0, 0.92, &p, XiPhase::Lockdown), 0.92);
        let mut xi = 1.0;
        for _ in 0..100 {
            xi = permanent_income(xi, 1.0, &p, XiPhase::Post);
            assert_eq!(xi, 1.0);
        }
    }

    #[test]
    fn rationing_halves() {
        let x = DVector::from_row_slice(&[50.0, 1.0]);
        let d = DVector::from_row_slice(&[100.0, 1.0]);
        // industry 0 supplies 60 to industry 1 and 30 to itself
        let orders = DMatrix::from_row_slice(2, 2, &[30.0, 60.0, 0.0, 0.0]);
        let cd = DVector::from_row_slice(&[10.0, 1.0]);
        let fd = DVector::zeros(2);
        let (z, c, f) = ration_and_deliver(&x, &d, &orders, &cd, &fd);
        assert_eq!((z[(0, 1)], z[(0, 0)], c[0]), (30.0, 15.0, 5.0));
        assert_eq!(f[0], 0.0);
        let (z, c, _) = ration_and_deliver(
            &DVector::zeros(2),
            &DVector::zeros(2),
            &DMatrix::zeros(2, 2),
            &DVector::zeros(2),
            &fd,
        );
        assert!(z.iter().all(|v| *v == 0.0) && c.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn inventories_floor_at_zero() {
        let s = DMatrix::from_element(1, 1, 5.0);
        let z = DMatrix::zeros(1, 1);
        assert_eq!(
            update_inventories(&s, &z, &DMatrix::from_element(1, 1, 5.0))[(0, 0)],
            0.0
        );
        assert_eq!(
            update_inventories(
                &s,
                &DMatrix::from_element(1, 1, 2.0),
                &DMatrix::from_element(1, 1, 2.0)
            )[(0, 0)],
            5.0
        );
    }

    #[test]
    fn labor_adjustment_cases() {
        let e = one_industry();
        let p = Params::default();
        let mut s = init_steady_state(&e).unwrap();
        assert_eq!(update_labor(&s, &e, &p, &[0.0])[0], 50.0);
        s.d_prev[0] = 90.0;
        let l = update_labor(&s, &e, &p, &[0.0])[0];
        assert!((l - (50.0 - 0.1 * 50.0 / 15.0)).abs() < 1e-12);
        assert_eq!(update_labor(&s, &e, &p, &[1.0])[0], 0.0);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(Params {
            tau: 0.5,
            ..Params::default()
        }
        .validate()
        .is_err());
        assert!(Params {
            rho: 1.0,
            ..Params::default()
        }
        .validate()
        .is_err());
        Params::default().validate().unwrap();
    }

    #[test]
    fn one_industry_stays_put() {
        let e = one_industry_with_labor(125.0);
        let cal = Calendar::default();
        let sched = ShockSchedule::quiet(cal, 1, 0, 50);
        let traj = run(
            &e,
            &Params::calibrated(&e),
            &sched,
            ProductionKind::Leontief,
            50,
        )
        .unwrap();
        assert_eq!(traj.records.len(), 50);
        assert!(traj.records.iter().all(|r| (r.x[0] - 100.0).abs() < 1e-9));
    }
}
