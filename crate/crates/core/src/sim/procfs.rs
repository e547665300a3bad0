//! Pseudo-procfs rendering.
//!
//! Produces text documents in Linux procfs formats for the probe to parse:
//! cpuinfo, meminfo, stat, uptime, and the identity file dictated by the
//! platform's id strategy. A `container-uid-only` platform hides everything
//! except the two cpuinfo fields and uptime.

use std::collections::BTreeMap;

use crate::profile::{IdStrategy, PlatformProfile};
use crate::time::VirtualTime;

use super::pool::{ExecutionVm, FunctionContainer};

/// All pseudo-files visible to the given container, path -> text.
pub fn render_procfs(
    vm: &ExecutionVm,
    container: &FunctionContainer,
    profile: &PlatformProfile,
    now: VirtualTime,
) -> BTreeMap<String, String> {
    let paths = [
        "/proc/cpuinfo",
        "/proc/meminfo",
        "/proc/stat",
        "/proc/uptime",
        "/proc/self/cgroup",
        "/proc/machineid",
    ];
    paths
        .iter()
        .filter_map(|path| {
            render_file(path, vm, container, profile, now).map(|text| (path.to_string(), text))
        })
        .collect()
}

/// Render a single pseudo-file, or `None` when the platform hides it.
pub fn render_file(
    path: &str,
    vm: &ExecutionVm,
    container: &FunctionContainer,
    profile: &PlatformProfile,
    now: VirtualTime,
) -> Option<String> {
    let restricted = profile.id_strategy == IdStrategy::ContainerUidOnly;
    match path {
        "/proc/cpuinfo" => Some(render_cpuinfo(vm, restricted)),
        "/proc/meminfo" if !restricted => Some(render_meminfo(vm)),
        "/proc/stat" if !restricted => Some(render_stat(vm, now)),
        "/proc/uptime" => Some(render_uptime(vm, now)),
        "/proc/self/cgroup" if profile.id_strategy == IdStrategy::CgroupSandbox => {
            Some(render_cgroup(vm, container))
        }
        "/proc/machineid" if profile.id_strategy == IdStrategy::MachineId => {
            Some(format!("{}\n", vm.vm_id))
        }
        _ => None,
    }
}

fn render_cpuinfo(vm: &ExecutionVm, restricted: bool) -> String {
    if restricted {
        return format!("model\t\t: {}\ncpu MHz\t\t: {:.3}\n", vm.cpu_model_id, vm.cpu_mhz as f64);
    }
    format!(
        "processor\t: 0\nvendor_id\t: GenuineIntel\nmodel\t\t: {}\ncpu MHz\t\t: {:.3}\ncache size\t: 25600 KB\n",
        vm.cpu_model_id, vm.cpu_mhz as f64
    )
}

fn render_meminfo(vm: &ExecutionVm) -> String {
    let free = vm.mem_total_kb * 3 / 4;
    format!(
        "MemTotal:{:>15} kB\nMemFree:{:>16} kB\n",
        vm.mem_total_kb, free
    )
}

fn cpu_ms_breakdown(vm: &ExecutionVm, now: VirtualTime) -> (u64, u64, u64) {
    let wall = now.since(vm.boot_time);
    let idle = wall.saturating_sub(vm.cpu_user_ms + vm.cpu_system_ms);
    (vm.cpu_user_ms, vm.cpu_system_ms, idle)
}

fn render_stat(vm: &ExecutionVm, now: VirtualTime) -> String {
    // Jiffies at USER_HZ = 100, i.e. 10 ms each.
    let (user, system, idle) = cpu_ms_breakdown(vm, now);
    format!(
        "cpu  {} 0 {} {} 0 0 0 0 0 0\n",
        user / 10,
        system / 10,
        idle / 10
    )
}

fn render_uptime(vm: &ExecutionVm, now: VirtualTime) -> String {
    let (_, _, idle) = cpu_ms_breakdown(vm, now);
    let uptime_s = now.since(vm.boot_time) as f64 / 1000.0;
    format!("{:.2} {:.2}\n", uptime_s, idle as f64 / 1000.0)
}

fn render_cgroup(vm: &ExecutionVm, container: &FunctionContainer) -> String {
    format!(
        "12:devices:/sandbox-root-{id}\n11:pids:/sandbox-root-{id}\n2:cpu,cpuacct:/sandbox-root-{id}\n1:name=sandbox:/sandbox-root-{id}\n0::/sandbox-root-{id}/{container}\n",
        id = vm.vm_id,
        container = container.container_id
    )
}
