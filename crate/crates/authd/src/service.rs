//! The authentication entity: credentials, the two-device login flow,
//! continuous re-verification and the OTP fallback.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::Mutex;
use proxauth_core::ml::{Algo, TrainedModel};
use proxauth_core::rfsim::{DeviceRole, ScanReport, SiteSurvey};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use subtle::ConstantTimeEq;

use crate::checks::{overlap_check, proximity_check, ProximityResult};
use crate::clock::Clock;
use crate::error::{AuthError, AuthResult};
use crate::mail::{MailMessage, Mailer};
use crate::policy::{AuthPolicy, HashCost};
use crate::session::{AuthDecision, Session, TickOutcome, TickResult};
use crate::store::{normalize_answer, DeviceIds, SecretHasher, UserProfile, UserStore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterRequest {
    pub username: String,
    pub password: String,
    pub security_question: String,
    pub security_answer: String,
    pub email: String,
    pub login_device_id: String,
    pub mobile_device_id: String,
}

/// What the server asks a device to do in step 3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRequest {
    pub device_id: String,
    pub role: DeviceRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendingAuth {
    pub pending_id: String,
    pub username: String,
    pub issued_at: f64,
    pub expires_at: f64,
    pub scan_requests: Vec<ScanRequest>,
}

#[derive(Debug, Clone)]
struct OtpChallenge {
    code: String,
    expires_at: f64,
    used: bool,
    failed_attempts: u32,
}

/// Everything the service is assembled from.
pub struct ServiceParts {
    pub policy: AuthPolicy,
    pub models: Vec<TrainedModel>,
    pub survey: SiteSurvey,
    pub store: Arc<dyn UserStore>,
    pub clock: Arc<dyn Clock>,
    pub mailer: Arc<dyn Mailer>,
    pub hash_cost: HashCost,
    /// Seeds session ids, pending ids and OTP codes; `None` draws from the OS.
    pub token_seed: Option<u64>,
}

pub struct AuthService {
    policy: AuthPolicy,
    models: HashMap<Algo, Arc<TrainedModel>>,
    survey: SiteSurvey,
    store: Arc<dyn UserStore>,
    clock: Arc<dyn Clock>,
    mailer: Arc<dyn Mailer>,
    hasher: SecretHasher,
    /// Verifier of a random secret, checked for unknown users so that they
    /// cost the same as known ones.
    dummy_verifier: String,
    tokens: Mutex<ChaCha20Rng>,
    pending: Mutex<HashMap<String, PendingAuth>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    otps: Mutex<HashMap<String, OtpChallenge>>,
    otp_requests: Mutex<HashMap<String, Vec<f64>>>,
    decisions: Mutex<Vec<AuthDecision>>,
}

fn validate_registration(r: &RegisterRequest, min_password_len: usize) -> AuthResult<()> {
    let bad = |m: &str| Err(AuthError::Validation(m.to_string()));
    let name_ok = !r.username.is_empty()
        && r.username.len() <= 64
        && r.username.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c));
    if !name_ok {
        return bad("username must be 1-64 characters of letters, digits, '.', '_' or '-'");
    }
    if r.password.chars().count() < min_password_len {
        return bad("password is too short");
    }
    if normalize_answer(&r.security_answer).is_empty() || r.security_question.trim().is_empty() {
        return bad("a security question and answer are required");
    }
    if !r.email.contains('@') {
        return bad("email address is malformed");
    }
    if r.login_device_id.is_empty() || r.mobile_device_id.is_empty() || r.login_device_id == r.mobile_device_id {
        return bad("two distinct device ids are required");
    }
    Ok(())
}

impl AuthService {
    pub fn new(parts: ServiceParts) -> AuthResult<AuthService> {
        parts.policy.validate()?;
        let mut models = HashMap::new();
        for m in parts.models {
            m.validate()?;
            models.insert(m.algo, Arc::new(m));
        }
        for a in parts.policy.required_models() {
            if !models.contains_key(&a) {
                return Err(AuthError::Config(format!("policy needs a trained {a} model")));
            }
        }
        if parts.survey.entries().is_empty() {
            return Err(AuthError::Config("site survey has no access points".into()));
        }
        let hasher = SecretHasher::new(parts.hash_cost)?;
        let mut tokens = match parts.token_seed {
            Some(s) => ChaCha20Rng::seed_from_u64(s),
            None => ChaCha20Rng::from_rng(&mut rand::rng()),
        };
        let mut dummy = [0u8; 16];
        tokens.fill_bytes(&mut dummy);
        let dummy_verifier = hasher.hash(&hex::encode(dummy))?;
        Ok(AuthService {
            policy: parts.policy,
            models,
            survey: parts.survey,
            store: parts.store,
            clock: parts.clock,
            mailer: parts.mailer,
            hasher,
            dummy_verifier,
            tokens: Mutex::new(tokens),
            pending: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
            otps: Mutex::new(HashMap::new()),
            otp_requests: Mutex::new(HashMap::new()),
            decisions: Mutex::new(Vec::new()),
        })
    }

    pub fn policy(&self) -> &AuthPolicy {
        &self.policy
    }

    pub fn now(&self) -> f64 {
        self.clock.now()
    }

    fn token(&self) -> String {
        let mut b = [0u8; 16];
        self.tokens.lock().fill_bytes(&mut b);
        hex::encode(b)
    }

    pub fn register(&self, req: RegisterRequest) -> AuthResult<UserProfile> {
        validate_registration(&req, self.policy.min_password_len)?;
        if self.store.get(&req.username).is_some() {
            return Err(AuthError::Conflict);
        }
        let profile = UserProfile {
            username: req.username,
            password_verifier: self.hasher.hash(&req.password)?,
            security_question: req.security_question,
            answer_verifier: self.hasher.hash(&normalize_answer(&req.security_answer))?,
            email: req.email,
            devices: DeviceIds { login: req.login_device_id, mobile: req.mobile_device_id },
            created_at: self.clock.now(),
        };
        self.store.insert(profile.clone())?;
        Ok(profile)
    }

    pub fn user(&self, username: &str) -> Option<UserProfile> {
        self.store.get(username)
    }

    /// Steps 1-2: check credentials and issue scan requests to both devices.
    pub fn login_step1(&self, username: &str, password: &str) -> AuthResult<PendingAuth> {
        let user = self.store.get(username);
        let verifier = user.as_ref().map_or(self.dummy_verifier.as_str(), |u| u.password_verifier.as_str());
        let ok = self.hasher.verify(password, verifier);
        let Some(user) = user.filter(|_| ok) else {
            return Err(AuthError::AuthFailed);
        };
        let now = self.clock.now();
        let pending = PendingAuth {
            pending_id: self.token(),
            username: user.username,
            issued_at: now,
            expires_at: now + self.policy.pending_ttl_s,
            scan_requests: vec![
                ScanRequest { device_id: user.devices.login, role: DeviceRole::Login },
                ScanRequest { device_id: user.devices.mobile, role: DeviceRole::Mobile },
            ],
        };
        self.pending.lock().insert(pending.pending_id.clone(), pending.clone());
        Ok(pending)
    }

    fn pick(scans: &[ScanReport], role: DeviceRole) -> AuthResult<&ScanReport> {
        let mut it = scans.iter().filter(|s| s.role == role);
        match (it.next(), it.next()) {
            (Some(s), None) => Ok(s),
            (None, _) => Err(AuthError::Incomplete(format!("no scan from the {role:?} device").to_lowercase())),
            (Some(_), Some(_)) => Err(AuthError::Incomplete(format!("more than one {role:?} scan").to_lowercase())),
        }
    }

    fn aggregated(&self, algo: Algo, login: &ScanReport, mobile: &ScanReport) -> AuthResult<ProximityResult> {
        let model = &self.models[&algo];
        proximity_check(model, &self.survey, login, mobile, self.policy.aggregation)
    }

    /// Steps 3-6. The pending request is consumed whatever the outcome. A
    /// session is created only if the overlap check and the proximity check
    /// both pass.
    pub fn submit_scans(&self, pending_id: &str, scans: &[ScanReport]) -> AuthResult<AuthDecision> {
        let pending = self.pending.lock().remove(pending_id).ok_or(AuthError::AuthFailed)?;
        let now = self.clock.now();
        if now > pending.expires_at {
            return Err(AuthError::Expired);
        }
        let login = Self::pick(scans, DeviceRole::Login)?;
        let mobile = Self::pick(scans, DeviceRole::Mobile)?;
        let mut decision = AuthDecision {
            granted: false,
            username: pending.username.clone(),
            t: now,
            overlap: overlap_check(login, mobile, self.policy.min_overlap_aps),
            proximity: None,
            session_id: None,
            reason: None,
        };
        let expected = |r: DeviceRole| pending.scan_requests.iter().find(|q| q.role == r).map(|q| q.device_id.as_str());
        if expected(DeviceRole::Login) != Some(login.device_id.as_str())
            || expected(DeviceRole::Mobile) != Some(mobile.device_id.as_str())
        {
            decision.reason = Some("scan came from an unregistered device".into());
        } else if !decision.overlap.pass {
            decision.reason = Some(format!(
                "only {} shared access points, {} required",
                decision.overlap.overlap, self.policy.min_overlap_aps
            ));
        } else {
            let prox = self.aggregated(self.policy.decision_model, login, mobile)?;
            if prox.pass {
                let id = self.token();
                let session = Session::start(id.clone(), pending.username.clone(), now, self.policy.recheck_interval_s, false);
                self.sessions.lock().insert(id.clone(), Arc::new(Mutex::new(session)));
                decision.granted = true;
                decision.session_id = Some(id);
            } else {
                decision.reason = Some(format!("{} found the devices not co-located", prox.model));
            }
            decision.proximity = Some(prox);
        }
        tracing::info!(user = %decision.username, granted = decision.granted, reason = ?decision.reason, "login decision");
        self.decisions.lock().push(decision.clone());
        Ok(decision)
    }

    pub fn decisions(&self) -> Vec<AuthDecision> {
        self.decisions.lock().clone()
    }

    fn session_handle(&self, id: &str) -> AuthResult<Arc<Mutex<Session>>> {
        self.sessions.lock().get(id).cloned().ok_or(AuthError::NotFound)
    }

    pub fn session(&self, id: &str) -> AuthResult<Session> {
        Ok(self.session_handle(id)?.lock().clone())
    }

    /// One continuous re-verification. Every model of the ensemble classifies
    /// the fresh scans; a single negative verdict, or a missing scan,
    /// terminates the session.
    pub fn continuous_tick(&self, session_id: &str, scans: &[ScanReport]) -> AuthResult<TickResult> {
        let handle = self.session_handle(session_id)?;
        let mut s = handle.lock();
        if !s.is_active() {
            return Err(AuthError::InvalidState("session is terminated".into()));
        }
        if s.otp_fallback {
            return Err(AuthError::InvalidState("continuous checks do not apply to one-time-password sessions".into()));
        }
        let now = self.clock.now();
        let (login, mobile) = match (Self::pick(scans, DeviceRole::Login), Self::pick(scans, DeviceRole::Mobile)) {
            (Ok(l), Ok(m)) => (l, m),
            (Err(e), _) | (_, Err(e)) => {
                let reason = format!("re-verification failed: {e}");
                s.terminate(now, reason.clone(), Vec::new());
                return Ok(TickResult { outcome: TickOutcome::Terminate, t: now, next_check_at: None, verdicts: Vec::new(), reason: Some(reason) });
            }
        };
        let verdicts = self
            .policy
            .continuous_ensemble
            .iter()
            .map(|&a| self.aggregated(a, login, mobile))
            .collect::<AuthResult<Vec<_>>>()?;
        let negatives: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.model.as_str()).collect();
        if negatives.is_empty() {
            s.record_check(now, verdicts.clone(), self.policy.recheck_interval_s);
            Ok(TickResult { outcome: TickOutcome::Continue, t: now, next_check_at: s.next_check_at, verdicts, reason: None })
        } else {
            let reason = format!("devices no longer co-located according to {}", negatives.join(", "));
            s.terminate(now, reason.clone(), verdicts.clone());
            tracing::info!(session = %session_id, %reason, "session terminated");
            Ok(TickResult { outcome: TickOutcome::Terminate, t: now, next_check_at: None, verdicts, reason: Some(reason) })
        }
    }

    /// Terminates sessions that missed a whole recheck interval past their
    /// due time, and drops expired pending requests. Returns the ids of the
    /// sessions it terminated.
    pub fn sweep(&self) -> Vec<String> {
        let now = self.clock.now();
        self.pending.lock().retain(|_, p| p.expires_at >= now);
        let handles: Vec<(String, Arc<Mutex<Session>>)> =
            self.sessions.lock().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut out = Vec::new();
        for (id, h) in handles {
            let mut s = h.lock();
            if let Some(due) = s.next_check_at {
                if s.is_active() && now > due + self.policy.recheck_interval_s {
                    s.terminate(now, "re-verification overdue".into(), Vec::new());
                    out.push(id);
                }
            }
        }
        out.sort();
        out
    }

    fn rate_limited(&self, username: &str, now: f64) -> bool {
        let mut map = self.otp_requests.lock();
        let times = map.entry(username.to_string()).or_default();
        times.retain(|&t| now - t < self.policy.otp_window_s);
        if times.len() >= self.policy.otp_max_requests {
            return true;
        }
        times.push(now);
        false
    }

    /// Sends a one-time password when the security answer is right. The
    /// response is the same for a wrong answer and an unknown user.
    pub fn request_otp(&self, username: &str, security_answer: &str) -> AuthResult<()> {
        let now = self.clock.now();
        if self.rate_limited(username, now) {
            return Err(AuthError::TooManyRequests);
        }
        let user = self.store.get(username);
        let verifier = user.as_ref().map_or(self.dummy_verifier.as_str(), |u| u.answer_verifier.as_str());
        let ok = self.hasher.verify(&normalize_answer(security_answer), verifier);
        let Some(user) = user.filter(|_| ok) else {
            return Ok(());
        };
        let digits = self.policy.otp_digits;
        let n = self.tokens.lock().random_range(0..10u64.pow(digits));
        let code = format!("{n:0width$}", width = digits as usize);
        self.mailer.send(&MailMessage {
            to: user.email.clone(),
            subject: "Your one-time login code".into(),
            body: format!("Your one-time login code is {code}. It expires in {} seconds.", self.policy.otp_ttl_s),
        })?;
        self.otps.lock().insert(
            user.username,
            OtpChallenge { code, expires_at: now + self.policy.otp_ttl_s, used: false, failed_attempts: 0 },
        );
        Ok(())
    }

    /// Redeems a one-time password. Succeeds at most once per challenge.
    pub fn verify_otp(&self, username: &str, code: &str) -> AuthResult<Session> {
        let now = self.clock.now();
        let mut otps = self.otps.lock();
        let Some(ch) = otps.get_mut(username) else {
            return Err(AuthError::AuthFailed);
        };
        if ch.used || now > ch.expires_at {
            return Err(AuthError::AuthFailed);
        }
        if !bool::from(ch.code.as_bytes().ct_eq(code.trim().as_bytes())) {
            ch.failed_attempts += 1;
            if ch.failed_attempts >= self.policy.otp_max_attempts {
                ch.used = true;
            }
            return Err(AuthError::AuthFailed);
        }
        ch.used = true;
        drop(otps);
        let id = self.token();
        let session = Session::start(id.clone(), username.to_string(), now, self.policy.recheck_interval_s, true);
        self.sessions.lock().insert(id, Arc::new(Mutex::new(session.clone())));
        Ok(session)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::OnceLock;

    use super::*;
    use crate::clock::ManualClock;
    use crate::lab::Lab;
    use crate::mail::MemoryMailer;
    use crate::session::SessionStatus;
    use crate::store::MemoryStore;
    use proxauth_core::rfsim::{LOGIN_DEVICE_ID, MOBILE_DEVICE_ID};

    fn lab() -> &'static Lab {
        static LAB: OnceLock<Lab> = OnceLock::new();
        LAB.get_or_init(|| Lab::build(7, 300).unwrap())
    }

    struct Rig {
        svc: AuthService,
        clock: Arc<ManualClock>,
        mail: Arc<MemoryMailer>,
    }

    fn rig_with(policy: AuthPolicy) -> Rig {
        let clock = Arc::new(ManualClock::new(1000.0));
        let mail = Arc::new(MemoryMailer::default());
        let svc = lab()
            .service(policy, Arc::new(MemoryStore::default()), clock.clone(), mail.clone(), HashCost::insecure_fast(), Some(3))
            .unwrap();
        svc.register(alice()).unwrap();
        Rig { svc, clock, mail }
    }

    fn rig() -> Rig {
        rig_with(AuthPolicy::default())
    }

    fn alice() -> RegisterRequest {
        RegisterRequest {
            username: "alice".into(),
            password: "hunter2hunter2".into(),
            security_question: "first pet".into(),
            security_answer: "Rex".into(),
            email: "alice@example.org".into(),
            login_device_id: LOGIN_DEVICE_ID.into(),
            mobile_device_id: MOBILE_DEVICE_ID.into(),
        }
    }

    fn granted(r: &Rig) -> String {
        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        let scans = lab().scans(0.5, 0.3, r.clock.now(), 1).unwrap();
        let d = r.svc.submit_scans(&p.pending_id, &scans).unwrap();
        assert!(d.granted, "{d:?}");
        d.session_id.unwrap()
    }

    fn mailed_code(r: &Rig) -> String {
        let body = r.mail.messages().last().unwrap().body.clone();
        body.split_whitespace().find(|w| w.trim_end_matches('.').chars().all(|c| c.is_ascii_digit()) && w.len() > 3).unwrap().trim_end_matches('.').to_string()
    }

    #[test]
    fn registration_validates_and_rejects_duplicates() {
        let r = rig();
        assert!(matches!(r.svc.register(alice()), Err(AuthError::Conflict)));
        let cases = [
            RegisterRequest { username: "bad name".into(), ..alice() },
            RegisterRequest { username: "bob".into(), password: "short".into(), ..alice() },
            RegisterRequest { username: "bob".into(), email: "nope".into(), ..alice() },
            RegisterRequest { username: "bob".into(), mobile_device_id: LOGIN_DEVICE_ID.into(), ..alice() },
            RegisterRequest { username: "bob".into(), security_answer: "  ".into(), ..alice() },
        ];
        for c in cases {
            assert!(matches!(r.svc.register(c), Err(AuthError::Validation(_))));
        }
        let stored = r.svc.user("alice").unwrap();
        assert!(!stored.password_verifier.contains("hunter2"));
    }

    #[test]
    fn wrong_password_and_unknown_user_look_the_same() {
        let r = rig();
        let a = r.svc.login_step1("alice", "wrong-password").unwrap_err();
        let b = r.svc.login_step1("mallory", "hunter2hunter2").unwrap_err();
        assert!(matches!(a, AuthError::AuthFailed));
        assert_eq!(a.to_string(), b.to_string());
        assert_eq!(a.code(), b.code());
    }

    #[test]
    fn login_requests_scans_from_both_registered_devices() {
        let r = rig();
        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        assert_eq!(p.expires_at - p.issued_at, 60.0);
        let roles: Vec<_> = p.scan_requests.iter().map(|q| (q.role, q.device_id.as_str())).collect();
        assert_eq!(roles, vec![(DeviceRole::Login, LOGIN_DEVICE_ID), (DeviceRole::Mobile, MOBILE_DEVICE_ID)]);
    }

    #[test]
    fn colocated_devices_are_granted_a_session() {
        let r = rig();
        let id = granted(&r);
        let s = r.svc.session(&id).unwrap();
        assert_eq!(s.status(), SessionStatus::Active);
        assert_eq!(s.next_check_at, Some(1030.0));
        let d = r.svc.decisions();
        assert_eq!(d.len(), 1);
        assert!(d[0].overlap.pass && d[0].proximity.as_ref().unwrap().pass);
    }

    #[test]
    fn separated_devices_are_denied() {
        let r = rig();
        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        let d = r.svc.submit_scans(&p.pending_id, &lab().scans(12.0, 0.0, 1000.0, 2).unwrap()).unwrap();
        assert!(!d.granted && d.session_id.is_none());
        assert!(!d.proximity.unwrap().pass);
    }

    #[test]
    fn low_overlap_denies_without_proximity() {
        let r = rig();
        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        let mut scans = lab().scans(0.5, 0.0, 1000.0, 3).unwrap();
        scans[1].observations.truncate(2);
        let d = r.svc.submit_scans(&p.pending_id, &scans).unwrap();
        assert!(!d.granted);
        assert_eq!(d.overlap.overlap, 2);
        assert!(d.proximity.is_none());
    }

    #[test]
    fn pending_requests_are_single_use_and_expire() {
        let r = rig();
        let scans = lab().scans(0.5, 0.0, 1000.0, 4).unwrap();
        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        r.svc.submit_scans(&p.pending_id, &scans).unwrap();
        assert!(matches!(r.svc.submit_scans(&p.pending_id, &scans), Err(AuthError::AuthFailed)));

        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        r.clock.advance(60.5);
        assert!(matches!(r.svc.submit_scans(&p.pending_id, &scans), Err(AuthError::Expired)));
    }

    #[test]
    fn scans_must_come_from_the_registered_devices() {
        let r = rig();
        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        let mut scans = lab().scans(0.5, 0.0, 1000.0, 5).unwrap();
        scans[1].device_id = "someone-elses-phone".into();
        let d = r.svc.submit_scans(&p.pending_id, &scans).unwrap();
        assert!(!d.granted);

        let p = r.svc.login_step1("alice", "hunter2hunter2").unwrap();
        let one = &scans[..1];
        assert!(matches!(r.svc.submit_scans(&p.pending_id, one), Err(AuthError::Incomplete(_))));
    }

    #[test]
    fn ticks_continue_while_together_and_terminate_on_separation() {
        let r = rig();
        let id = granted(&r);
        for k in 0..3 {
            r.clock.advance(30.0);
            let t = r.svc.continuous_tick(&id, &lab().scans(0.5, 1.0, r.clock.now(), 10 + k).unwrap()).unwrap();
            assert_eq!(t.outcome, TickOutcome::Continue, "{t:?}");
            assert_eq!(t.verdicts.len(), 6);
            assert_eq!(t.next_check_at, Some(r.clock.now() + 30.0));
        }
        r.clock.advance(30.0);
        let t = r.svc.continuous_tick(&id, &lab().scans(12.0, 1.0, r.clock.now(), 20).unwrap()).unwrap();
        assert_eq!(t.outcome, TickOutcome::Terminate);
        assert!(t.reason.unwrap().contains("DT"));
        let s = r.svc.session(&id).unwrap();
        assert_eq!(s.status(), SessionStatus::Terminated);
        assert_eq!(s.check_log.len(), 5);
        let again = r.svc.continuous_tick(&id, &lab().scans(0.5, 1.0, r.clock.now(), 21).unwrap());
        assert!(matches!(again, Err(AuthError::InvalidState(_))));
    }

    #[test]
    fn missing_scan_on_a_tick_terminates() {
        let r = rig();
        let id = granted(&r);
        let scans = lab().scans(0.5, 0.0, 1000.0, 6).unwrap();
        let t = r.svc.continuous_tick(&id, &scans[..1]).unwrap();
        assert_eq!(t.outcome, TickOutcome::Terminate);
        assert!(!r.svc.session(&id).unwrap().is_active());
    }

    #[test]
    fn sweep_ends_overdue_sessions() {
        let r = rig();
        let id = granted(&r);
        r.clock.advance(59.0);
        assert!(r.svc.sweep().is_empty());
        r.clock.advance(2.0);
        assert_eq!(r.svc.sweep(), vec![id.clone()]);
        assert_eq!(r.svc.session(&id).unwrap().termination_reason.as_deref(), Some("re-verification overdue"));
    }

    #[test]
    fn otp_round_trip_and_single_use() {
        let r = rig();
        r.svc.request_otp("alice", "  rex ").unwrap();
        assert_eq!(r.mail.messages().len(), 1);
        assert_eq!(r.mail.messages()[0].to, "alice@example.org");
        let code = mailed_code(&r);
        assert_eq!(code.len(), 6);
        let s = r.svc.verify_otp("alice", &code).unwrap();
        assert!(s.otp_fallback && s.next_check_at.is_none());
        assert!(matches!(r.svc.verify_otp("alice", &code), Err(AuthError::AuthFailed)));
        let tick = r.svc.continuous_tick(&s.session_id, &lab().scans(0.5, 0.0, 1000.0, 1).unwrap());
        assert!(matches!(tick, Err(AuthError::InvalidState(_))));
    }

    #[test]
    fn otp_wrong_answer_sends_nothing() {
        let r = rig();
        r.svc.request_otp("alice", "Fido").unwrap();
        r.svc.request_otp("nobody", "Rex").unwrap();
        assert!(r.mail.messages().is_empty());
        assert!(matches!(r.svc.verify_otp("alice", "000000"), Err(AuthError::AuthFailed)));
    }

    #[test]
    fn otp_expires() {
        let r = rig();
        r.svc.request_otp("alice", "Rex").unwrap();
        let code = mailed_code(&r);
        r.clock.advance(300.5);
        assert!(matches!(r.svc.verify_otp("alice", &code), Err(AuthError::AuthFailed)));
    }

    #[test]
    fn otp_burns_after_too_many_failures() {
        let r = rig();
        r.svc.request_otp("alice", "Rex").unwrap();
        let code = mailed_code(&r);
        let wrong = if code == "000000" { "111111" } else { "000000" };
        for _ in 0..5 {
            assert!(r.svc.verify_otp("alice", wrong).is_err());
        }
        assert!(matches!(r.svc.verify_otp("alice", &code), Err(AuthError::AuthFailed)));
    }

    #[test]
    fn otp_requests_are_rate_limited() {
        let r = rig();
        for _ in 0..3 {
            r.svc.request_otp("alice", "Rex").unwrap();
        }
        assert!(matches!(r.svc.request_otp("alice", "Rex"), Err(AuthError::TooManyRequests)));
        r.clock.advance(900.0);
        r.svc.request_otp("alice", "Rex").unwrap();
    }

    #[test]
    fn service_needs_every_model_the_policy_names() {
        let mut models = lab().models.clone();
        models.retain(|m| m.algo != Algo::Nb);
        let r = AuthService::new(ServiceParts {
            policy: AuthPolicy::default(),
            models,
            survey: lab().survey(),
            store: Arc::new(MemoryStore::default()),
            clock: Arc::new(ManualClock::new(0.0)),
            mailer: Arc::new(MemoryMailer::default()),
            hash_cost: HashCost::insecure_fast(),
            token_seed: Some(0),
        });
        assert!(matches!(r, Err(AuthError::Config(_))));
        let policy = AuthPolicy { continuous_ensemble: vec![Algo::Dt, Algo::Rf], ..AuthPolicy::default() };
        let small = rig_with(policy);
        let id = granted(&small);
        let t = small.svc.continuous_tick(&id, &lab().scans(0.5, 0.0, 1000.0, 8).unwrap()).unwrap();
        assert_eq!(t.verdicts.len(), 2);
    }
}
