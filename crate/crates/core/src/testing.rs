//! Synthetic runs for tests and examples.

use crate::model::{
    BenchmarkRun, DateField, LoadLevel, LoadLevelMeasurement, MarketingClass, MonthYear, OsFamily,
    Vendor,
};

/// A consistent, comparable single-node two-socket run with linear power
/// (`idle + load * 2 W` per percent) and proportional throughput.
pub fn synthetic_run(result_id: &str, year: i32, vendor: Vendor) -> BenchmarkRun {
    let (cpu_name, class) = match vendor {
        Vendor::Intel => ("Intel Xeon Gold 6148", MarketingClass::Xeon),
        Vendor::Amd => ("AMD EPYC 7742", MarketingClass::Epyc),
        Vendor::Other => ("SuperSPARC IX", MarketingClass::Other),
    };
    let idle = 50.0;
    let levels = LoadLevel::TARGETS
        .iter()
        .map(|&l| LoadLevelMeasurement {
            target_load: l,
            ssj_ops: u64::from(l.percent()) * 10_000,
            avg_power_w: idle + f64::from(l.percent()) * 2.0,
        })
        .collect();
    let month = |y| DateField::Known(MonthYear::new(y, 6).unwrap());
    let mut run = BenchmarkRun {
        result_id: result_id.to_string(),
        accepted: true,
        publication_marker: None,
        test_date: month(year),
        submission_date: month(year),
        hw_availability: month(year),
        sw_availability: month(year),
        vendor,
        marketing_class: class,
        cpu_name: cpu_name.to_string(),
        cpu_names: vec![cpu_name.to_string()],
        cpu_nominal_mhz: Some(2400.0),
        nodes: Some(1),
        sockets: 2,
        cores_total: 40,
        threads_total: Some(80),
        cores_per_chip: 20,
        os_name: "Microsoft Windows Server 2019 Datacenter".to_string(),
        os_family: OsFamily::Windows,
        jvm_name: "Oracle Java HotSpot(TM) 64-Bit Server VM".to_string(),
        memory_gb: Some(192.0),
        levels,
        idle_power_w: idle,
        reported_overall_efficiency: 0.0,
    };
    run.reported_overall_efficiency = printed_score(&run);
    run
}

/// Replaces the measurement table. `ops` and `power` are ordered 100%..10%.
pub fn with_levels(mut run: BenchmarkRun, ops: [u64; 10], power: [f64; 10], idle: f64) -> BenchmarkRun {
    run.levels = LoadLevel::TARGETS
        .iter()
        .zip(ops.iter().zip(power.iter()))
        .map(|(&target_load, (&ssj_ops, &avg_power_w))| LoadLevelMeasurement {
            target_load,
            ssj_ops,
            avg_power_w,
        })
        .collect();
    run.idle_power_w = idle;
    run.reported_overall_efficiency = printed_score(&run);
    run
}

/// The score as a report would print it: the overall ratio rounded to an integer.
fn printed_score(run: &BenchmarkRun) -> f64 {
    let ops: f64 = run.levels.iter().map(|m| m.ssj_ops as f64).sum();
    let power: f64 = run.levels.iter().map(|m| m.avg_power_w).sum::<f64>() + run.idle_power_w;
    (ops / power).round()
}
