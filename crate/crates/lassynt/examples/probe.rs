use lassynt::specfile::SpecFile;
use lassynt::tsys::{brute_force_synth, brute_force_max_rate};

fn full_sig(ltl: &str) {
    let spec = SpecFile::parse(&format!("[inputs] r\n[outputs] g\n[ltl] {ltl}\n")).unwrap();
    let r22 = brute_force_synth(&spec, 2, 2, 1_000_000).unwrap().is_some();
    let (_, r23) = brute_force_max_rate(&spec, 2, 3, 1_000_000).unwrap();
    let (_, r33) = brute_force_max_rate(&spec, 3, 3, 10_000_000).unwrap();
    let r43 = brute_force_synth(&spec, 4, 3, 200_000_000).unwrap().is_some();
    let ok = r22 && !r23.is_one() && !r33.is_one() && r43
        && (r23.as_f64() - 0.88).abs() <= 0.1 && (r33.as_f64() - 0.88).abs() <= 0.1;
    println!("{} (2,2)={} r23={} r33={} (4,3)={} | {ltl}",
        if ok {"MATCH "} else {"reject"},
        if r22 {"R"} else {"U"}, r23, r33, if r43 {"R"} else {"U"});
}

fn main() {
    let a = "G(r -> F g)";
    let b = "G((g & r & F !r) -> X g)";
    for p in [
        "G((g & X !r) -> F(!g & !r))",
        "G((g & !r) -> F(!g & !r))",
        "G((g & F !r) -> F(!g & !r))",
        "G(!r -> F(!g & !r))",
        "G((g & X !r) -> X F(!g & !r))",
        "G(F !r -> F(!g & !r))",
    ] {
        full_sig(&format!("{a} & {b} & {p}"));
    }
}
