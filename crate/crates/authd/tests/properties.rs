use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use proxauth_authd::{
    overlap_check, AuthError, AuthPolicy, AuthService, Clock, HashCost, Lab, ManualClock, MemoryMailer, MemoryStore,
    RegisterRequest, SessionStatus,
};
use proxauth_core::rfsim::{BeaconObservation, Bssid, DeviceRole, ScanReport, LOGIN_DEVICE_ID, MOBILE_DEVICE_ID};

fn lab() -> &'static Lab {
    static LAB: OnceLock<Lab> = OnceLock::new();
    LAB.get_or_init(|| Lab::build(5, 300).unwrap())
}

fn report(role: DeviceRole, aps: &[(u8, u8)]) -> ScanReport {
    ScanReport {
        device_id: "d".into(),
        role,
        t: 0.0,
        observations: aps
            .iter()
            .map(|&(mac, ssid)| BeaconObservation {
                ap_id: None,
                ssid: format!("net{ssid}"),
                bssid: Bssid([2, 0, 0, 0, 0, mac]),
                frequency_mhz: 2437,
                rssi_dbm: -50,
            })
            .collect(),
    }
}

fn aps() -> impl Strategy<Value = Vec<(u8, u8)>> {
    prop::collection::vec((0u8..16, 0u8..3), 0..20)
}

fn service(clock: Arc<ManualClock>, mail: Arc<MemoryMailer>) -> AuthService {
    let svc = lab()
        .service(AuthPolicy::default(), Arc::new(MemoryStore::default()), clock, mail, HashCost::insecure_fast(), Some(1))
        .unwrap();
    svc.register(RegisterRequest {
        username: "u".into(),
        password: "long enough pw".into(),
        security_question: "q".into(),
        security_answer: "a".into(),
        email: "u@example.org".into(),
        login_device_id: LOGIN_DEVICE_ID.into(),
        mobile_device_id: MOBILE_DEVICE_ID.into(),
    })
    .unwrap();
    svc
}

proptest! {
    #[test]
    fn overlap_is_symmetric(a in aps(), b in aps(), k in 0usize..8) {
        let (ra, rb) = (report(DeviceRole::Login, &a), report(DeviceRole::Mobile, &b));
        prop_assert_eq!(overlap_check(&ra, &rb, k), overlap_check(&rb, &ra, k));
    }

    #[test]
    fn overlap_is_monotone_in_added_beacons(a in aps(), b in aps(), extra in aps(), k in 0usize..8) {
        let (ra, rb) = (report(DeviceRole::Login, &a), report(DeviceRole::Mobile, &b));
        let mut bigger = b.clone();
        bigger.extend(extra);
        let base = overlap_check(&ra, &rb, k);
        let grown = overlap_check(&ra, &report(DeviceRole::Mobile, &bigger), k);
        prop_assert!(grown.overlap >= base.overlap);
        prop_assert!(!base.pass || grown.pass);
        prop_assert!(base.overlap <= a.len().min(b.len()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Whatever sequence of ticks, sweeps and clock jumps is applied, a
    /// terminated session never becomes active again.
    #[test]
    fn terminated_sessions_stay_terminated(
        steps in prop::collection::vec((0u8..4, 0.0f64..12.0, 0.0f64..80.0), 1..12)
    ) {
        let clock = Arc::new(ManualClock::new(100.0));
        let svc = service(clock.clone(), Arc::new(MemoryMailer::default()));
        let p = svc.login_step1("u", "long enough pw").unwrap();
        let d = svc.submit_scans(&p.pending_id, &lab().scans(0.5, 0.0, 100.0, 0).unwrap()).unwrap();
        prop_assume!(d.granted);
        let id = d.session_id.unwrap();
        let mut seen_terminated = false;
        for (i, (op, sep, dt)) in steps.into_iter().enumerate() {
            clock.advance(dt);
            match op {
                0 | 1 => {
                    let scans = lab().scans(sep, 0.5, clock.now(), i as u64).unwrap();
                    let r = svc.continuous_tick(&id, &scans);
                    if seen_terminated {
                        prop_assert!(matches!(r, Err(AuthError::InvalidState(_))));
                    }
                }
                2 => { svc.sweep(); }
                _ => {
                    let scans = lab().scans(sep, 0.5, clock.now(), i as u64).unwrap();
                    let _ = svc.continuous_tick(&id, &scans[..1]);
                }
            }
            let s = svc.session(&id).unwrap();
            if seen_terminated {
                prop_assert_eq!(s.status(), SessionStatus::Terminated);
            }
            seen_terminated |= s.status() == SessionStatus::Terminated;
        }
    }

    /// A challenge admits at most one successful verification, whatever
    /// guesses precede or follow the right code.
    #[test]
    fn otp_verifies_at_most_once(
        guesses in prop::collection::vec(0u32..1_000_000, 0..8),
        repeats in 1usize..4,
    ) {
        let clock = Arc::new(ManualClock::new(0.0));
        let mail = Arc::new(MemoryMailer::default());
        let svc = service(clock, mail.clone());
        svc.request_otp("u", "a").unwrap();
        let body = mail.messages()[0].body.clone();
        let code = body.split_whitespace().nth(5).unwrap().trim_end_matches('.').to_string();
        let mut successes = 0;
        let mut attempts: Vec<String> = guesses.iter().map(|g| format!("{g:06}")).collect();
        for _ in 0..repeats {
            attempts.push(code.clone());
        }
        for a in &attempts {
            if svc.verify_otp("u", a).is_ok() {
                successes += 1;
            }
        }
        prop_assert!(successes <= 1);
        let wrong_before = guesses.iter().filter(|g| format!("{g:06}") != code).count();
        if wrong_before < 5 {
            prop_assert_eq!(successes, 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Replaying the same event log against a fresh service reproduces every
    /// decision and the final session state.
    #[test]
    fn replayed_event_logs_reproduce_decisions(
        login_sep in 0.2f64..14.0,
        ticks in prop::collection::vec((0.0f64..14.0, 1.0f64..60.0), 0..6),
        seed in 0u64..1_000,
    ) {
        let run = || {
            let clock = Arc::new(ManualClock::new(50.0));
            let svc = service(clock.clone(), Arc::new(MemoryMailer::default()));
            let p = svc.login_step1("u", "long enough pw").unwrap();
            let d = svc.submit_scans(&p.pending_id, &lab().scans(login_sep, 1.0, clock.now(), seed).unwrap()).unwrap();
            let mut out = Vec::new();
            let mut last = None;
            if let Some(id) = d.session_id.clone() {
                for (i, &(sep, dt)) in ticks.iter().enumerate() {
                    clock.advance(dt);
                    let scans = lab().scans(sep, 1.0, clock.now(), seed + 1 + i as u64).unwrap();
                    out.push(svc.continuous_tick(&id, &scans).map_err(|e| e.to_string()));
                }
                last = Some(svc.session(&id).unwrap());
            }
            (svc.decisions(), out, last)
        };
        let (a, b) = (run(), run());
        prop_assert_eq!(a, b);
    }
}
