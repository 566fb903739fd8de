use serde::{Deserialize, Serialize};

use crate::checks::{OverlapResult, ProximityResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionStatus {
    Active,
    Terminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckEvent {
    Granted,
    Check,
    Terminated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub t: f64,
    pub event: CheckEvent,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<ProximityResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A live authenticated session. Status only ever moves from `Active` to
/// `Terminated`; there is no way back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub username: String,
    pub started_at: f64,
    pub last_check_at: f64,
    /// When the next continuous check is due; `None` for OTP sessions and
    /// terminated ones.
    pub next_check_at: Option<f64>,
    status: SessionStatus,
    pub termination_reason: Option<String>,
    pub otp_fallback: bool,
    pub check_log: Vec<CheckEntry>,
}

impl Session {
    pub(crate) fn start(session_id: String, username: String, t: f64, interval: f64, otp_fallback: bool) -> Session {
        Session {
            session_id,
            username,
            started_at: t,
            last_check_at: t,
            next_check_at: (!otp_fallback).then_some(t + interval),
            status: SessionStatus::Active,
            termination_reason: None,
            otp_fallback,
            check_log: vec![CheckEntry {
                t,
                event: CheckEvent::Granted,
                verdicts: Vec::new(),
                note: otp_fallback.then(|| "one-time password".to_string()),
            }],
        }
    }

    pub fn status(&self) -> SessionStatus {
        self.status
    }

    pub fn is_active(&self) -> bool {
        self.status == SessionStatus::Active
    }

    pub(crate) fn record_check(&mut self, t: f64, verdicts: Vec<ProximityResult>, interval: f64) {
        self.last_check_at = t;
        self.next_check_at = Some(t + interval);
        self.check_log.push(CheckEntry { t, event: CheckEvent::Check, verdicts, note: None });
    }

    /// No-op on a session that is already terminated.
    pub(crate) fn terminate(&mut self, t: f64, reason: String, verdicts: Vec<ProximityResult>) {
        if !self.is_active() {
            return;
        }
        self.status = SessionStatus::Terminated;
        self.last_check_at = t;
        self.next_check_at = None;
        self.check_log.push(CheckEntry { t, event: CheckEvent::Terminated, verdicts, note: Some(reason.clone()) });
        self.termination_reason = Some(reason);
    }
}

/// Result of `submit_scans`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthDecision {
    pub granted: bool,
    pub username: String,
    pub t: f64,
    pub overlap: OverlapResult,
    /// Absent when the overlap check already failed.
    pub proximity: Option<ProximityResult>,
    pub session_id: Option<String>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TickOutcome {
    Continue,
    Terminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickResult {
    pub outcome: TickOutcome,
    pub t: f64,
    pub next_check_at: Option<f64>,
    pub verdicts: Vec<ProximityResult>,
    pub reason: Option<String>,
}
