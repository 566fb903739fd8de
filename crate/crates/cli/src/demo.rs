//! Scripted continuous-authentication session on a simulated clock.

use std::sync::Arc;

use anyhow::ensure;
use proxauth_authd::{AuthPolicy, Clock, HashCost, Lab, ManualClock, MemoryStore, ProximityResult, RegisterRequest, StdoutMailer, TickOutcome};
use proxauth_core::rfsim::{pair_at, session_stream, LOGIN_DEVICE_ID, MOBILE_DEVICE_ID};
use proxauth_core::seed::{derive_seed, rng_from_seed};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoPlan {
    pub separate_at: usize,
    pub together_m: f64,
    pub separation_m: f64,
    pub max_ticks: usize,
}

/// One line of the transcript. Tick 0 is the login.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoStep {
    pub tick: usize,
    pub t: f64,
    pub separation_m: f64,
    pub event: String,
    pub outcome: String,
    pub verdicts: String,
    pub reason: String,
}

fn verdict_summary(v: &[ProximityResult]) -> String {
    v.iter()
        .map(|r| format!("{}:{}({}/{})", r.model, if r.pass { "pass" } else { "fail" }, r.positives, r.rows))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Logs a demo user in with both devices together, then re-checks every
/// recheck interval; from tick `separate_at` on the devices are
/// `separation_m` apart. Stops at termination or after `max_ticks`.
pub fn run_demo(lab: &Lab, plan: DemoPlan, policy: AuthPolicy, seed: u64) -> anyhow::Result<Vec<DemoStep>> {
    ensure!(plan.separate_at >= 1, "separate-at must be at least 1 (tick 0 is the login)");
    ensure!(plan.max_ticks >= 1, "max-ticks must be at least 1");
    let clock = Arc::new(ManualClock::new(0.0));
    let svc = lab.service(
        policy.clone(),
        Arc::new(MemoryStore::default()),
        clock.clone(),
        Arc::new(StdoutMailer),
        HashCost::insecure_fast(),
        Some(derive_seed(seed, 5)),
    )?;
    let password = "demo-password";
    svc.register(RegisterRequest {
        username: "demo".into(),
        password: password.into(),
        security_question: "demo".into(),
        security_answer: "demo".into(),
        email: "demo@localhost".into(),
        login_device_id: LOGIN_DEVICE_ID.into(),
        mobile_device_id: MOBILE_DEVICE_ID.into(),
    })?;

    let angle = rng_from_seed(derive_seed(seed, 4)).random::<f64>() * std::f64::consts::TAU;
    let separation = |k: usize| if k >= plan.separate_at { plan.separation_m } else { plan.together_m };
    let trajectory: Vec<_> = (0..=plan.max_ticks).map(|k| pair_at(lab.env.workstation, separation(k), angle)).collect();
    let stream = session_stream(&lab.env, &trajectory, policy.recheck_interval_s, 0.0, derive_seed(seed, 3))?;

    let mut out = Vec::new();
    let first = &stream[0];
    clock.set(first.t);
    let pending = svc.login_step1("demo", password)?;
    let d = svc.submit_scans(&pending.pending_id, &[first.login.clone(), first.mobile.clone()])?;
    out.push(DemoStep {
        tick: 0,
        t: first.t,
        separation_m: separation(0),
        event: "login".into(),
        outcome: if d.granted { "granted" } else { "denied" }.into(),
        verdicts: d.proximity.as_ref().map(|p| verdict_summary(std::slice::from_ref(p))).unwrap_or_default(),
        reason: d.reason.clone().unwrap_or_default(),
    });
    let Some(session_id) = d.session_id else {
        return Ok(out);
    };
    for (k, pair) in stream.iter().enumerate().skip(1) {
        clock.set(pair.t);
        let r = svc.continuous_tick(&session_id, &[pair.login.clone(), pair.mobile.clone()])?;
        out.push(DemoStep {
            tick: k,
            t: clock.now(),
            separation_m: separation(k),
            event: "tick".into(),
            outcome: match r.outcome {
                TickOutcome::Continue => "continue",
                TickOutcome::Terminate => "terminate",
            }
            .into(),
            verdicts: verdict_summary(&r.verdicts),
            reason: r.reason.unwrap_or_default(),
        });
        if r.outcome == TickOutcome::Terminate {
            break;
        }
    }
    Ok(out)
}
