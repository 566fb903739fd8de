//! Wi-Fi proximity two-factor authentication service.
//!
//! Login is a six-step flow: credentials, a scan request to both registered
//! devices, an overlap check on the access points they both see, an ML
//! proximity decision on the encoded beacon rows, and a session that is
//! re-verified on an interval by an ensemble where any negative verdict ends
//! it. Users without their mobile device can fall back to an emailed
//! one-time password.

pub mod checks;
pub mod clock;
pub mod error;
pub mod http;
pub mod lab;
pub mod mail;
pub mod policy;
pub mod service;
pub mod session;
pub mod store;

pub use checks::{overlap_check, proximity_check, OverlapResult, ProximityFailure, ProximityResult};
pub use clock::{Clock, ManualClock, SystemClock};
pub use error::{AuthError, AuthResult};
pub use lab::Lab;
pub use mail::{MailMessage, Mailer, MemoryMailer, SpoolMailer, StdoutMailer};
pub use policy::{Aggregation, AuthPolicy, HashCost, ServiceConfig, MIN_RECHECK_INTERVAL_S};
pub use service::{AuthService, PendingAuth, RegisterRequest, ScanRequest, ServiceParts};
pub use session::{AuthDecision, CheckEntry, CheckEvent, Session, SessionStatus, TickOutcome, TickResult};
pub use store::{JsonlStore, MemoryStore, SecretHasher, UserProfile, UserStore};
