//! Container identification via /tmp.
//!
//! The platform never tells a function which container it landed in, so the
//! probe maintains its own identity: a UID file written to tmp storage
//! (which lasts exactly the lifespan of the container) plus a log of every
//! function id that executed there. An empty log means a fresh container.
//! The boot time recorded next to the UID guards against the identity
//! leaking across containers.

use crate::time::VirtualTime;

use super::env::ExecutionEnv;

/// tmp path of the UID file: line 1 the UID, line 2 the boot timestamp.
pub const UID_FILE: &str = "faasbench-uid";
/// tmp path of the newline-delimited function-id log.
pub const LOG_FILE: &str = "faasbench-log";

/// Boot timestamps within this tolerance count as the same boot; the
/// pseudo-uptime file has centisecond resolution.
pub const BOOT_TOLERANCE_MS: u64 = 100;

/// The resolved identity of the container this probe is executing in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerIdentity {
    pub container_uid: String,
    pub is_new_container: bool,
    /// Function ids that ran here before us, oldest first.
    pub prior_function_ids: Vec<String>,
    /// False when the recorded boot time contradicted the current one, in
    /// which case the container is treated as new.
    pub boot_time_consistent: bool,
    /// Set when tmp storage failed and the identity is a fresh fallback.
    pub storage_warning: bool,
}

/// Cold/warm classification of an invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    Cold,
    Warm,
}

/// Cold if and only if the container is new.
pub fn classify_start(identity: &ContainerIdentity) -> StartKind {
    if identity.is_new_container {
        StartKind::Cold
    } else {
        StartKind::Warm
    }
}

/// Establish the container identity and append our own function id to the
/// execution log.
pub fn identify_container(
    env: &mut dyn ExecutionEnv,
    function_id: &str,
    current_boot: Option<VirtualTime>,
) -> ContainerIdentity {
    let uid_file = match env.tmp_read(UID_FILE) {
        Ok(contents) => contents,
        Err(_) => {
            // No tmp storage: fall back to a throwaway identity.
            return ContainerIdentity {
                container_uid: fresh_uid(env),
                is_new_container: true,
                prior_function_ids: Vec::new(),
                boot_time_consistent: true,
                storage_warning: true,
            };
        }
    };

    let mut identity = match uid_file {
        None => initialize_identity(env, current_boot),
        Some(text) => {
            let (recorded_uid, recorded_boot) = parse_uid_file(&text);
            let consistent = boot_times_match(recorded_boot, current_boot);
            match recorded_uid {
                Some(uid) if consistent => {
                    let prior = read_log(env);
                    ContainerIdentity {
                        container_uid: uid,
                        is_new_container: prior.is_empty(),
                        prior_function_ids: prior,
                        boot_time_consistent: true,
                        storage_warning: false,
                    }
                }
                // Stale or foreign identity: discard it and start over.
                _ => {
                    let mut identity = initialize_identity(env, current_boot);
                    identity.boot_time_consistent = consistent;
                    identity
                }
            }
        }
    };

    if append_to_log(env, &identity.prior_function_ids, function_id).is_err() {
        identity.storage_warning = true;
    }
    identity
}

fn fresh_uid(env: &mut dyn ExecutionEnv) -> String {
    format!("ct-{}", env.fresh_id())
}

fn initialize_identity(
    env: &mut dyn ExecutionEnv,
    current_boot: Option<VirtualTime>,
) -> ContainerIdentity {
    let uid = fresh_uid(env);
    let boot_line = current_boot
        .map(|b| b.as_millis().to_string())
        .unwrap_or_else(|| "unknown".to_string());
    let mut warning = false;
    if env
        .tmp_write(UID_FILE, &format!("{uid}\n{boot_line}\n"))
        .is_err()
    {
        warning = true;
    }
    if env.tmp_write(LOG_FILE, "").is_err() {
        warning = true;
    }
    ContainerIdentity {
        container_uid: uid,
        is_new_container: true,
        prior_function_ids: Vec::new(),
        boot_time_consistent: true,
        storage_warning: warning,
    }
}

fn parse_uid_file(text: &str) -> (Option<String>, Option<u64>) {
    let mut lines = text.lines();
    let uid = lines
        .next()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string);
    let boot = lines.next().and_then(|l| l.trim().parse::<u64>().ok());
    (uid, boot)
}

fn boot_times_match(recorded: Option<u64>, current: Option<VirtualTime>) -> bool {
    match (recorded, current) {
        (Some(rec), Some(cur)) => rec.abs_diff(cur.as_millis()) <= BOOT_TOLERANCE_MS,
        // Without both timestamps the sanity check cannot falsify identity.
        _ => true,
    }
}

fn read_log(env: &mut dyn ExecutionEnv) -> Vec<String> {
    match env.tmp_read(LOG_FILE) {
        Ok(Some(text)) => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect(),
        _ => Vec::new(),
    }
}

fn append_to_log(
    env: &mut dyn ExecutionEnv,
    prior: &[String],
    function_id: &str,
) -> Result<(), super::env::TmpStorageError> {
    let mut contents = String::new();
    for id in prior {
        contents.push_str(id);
        contents.push('\n');
    }
    contents.push_str(function_id);
    contents.push('\n');
    env.tmp_write(LOG_FILE, &contents)
}
