//! Driving a named check suite from a configuration, the same path the
//! command-line binary takes, and rendering the report in both formats.
//! Repeated runs produce byte-identical output.

use confmass::config::Config;
use confmass::report::Format;
use confmass::suites;

fn main() -> confmass::Result<()> {
    let cfg = Config::parse(
        r#"{
            "command": "verify",
            "dimension": 3,
            "suite": "corollary2.5",
            "quadrature": {"order": 24},
            "tolerances": {"identity": 1e-8}
        }"#,
    )?;
    let (report, exit_code) = suites::execute(&cfg)?;

    print!("{}", report.console_lines());
    println!("\nexit code: {exit_code}");

    let json = report.render(Format::Json)?;
    let csv = report.render(Format::Csv)?;
    println!("json bytes: {}, csv lines: {}", json.len(), csv.lines().count());

    // determinism: a fresh run renders the same bytes
    let (again, _) = suites::execute(&cfg)?;
    assert_eq!(json, again.render(Format::Json)?);
    assert_eq!(csv, again.render(Format::Csv)?);
    println!("re-run renders byte-identical reports");
    Ok(())
}
