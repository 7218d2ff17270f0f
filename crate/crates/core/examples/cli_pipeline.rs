//! The command-line front end driven in-process: design a gain, then feed
//! the design document straight into a simulation.

use lti_canon::cli::run_command;

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("lti_canon_cli_pipeline");
    std::fs::create_dir_all(&dir)?;
    let system = dir.join("system.json");
    let design = dir.join("design.json");
    std::fs::write(&system, r#"{"n": 2, "A": [[1, 2], [3, 4]], "C": [1, 0]}"#)?;
    let (sys, out) = (system.to_str().unwrap(), design.to_str().unwrap());

    let steps = [
        vec!["lti-canon", "observer-form", "--system", sys],
        vec![
            "lti-canon",
            "design",
            "--system",
            sys,
            "--poles",
            "-1,-2",
            "--out",
            out,
        ],
        vec![
            "lti-canon",
            "simulate",
            "--system",
            sys,
            "--gain-file",
            out,
            "--x0",
            "1,0",
            "--steps",
            "2000",
        ],
    ];
    for argv in steps {
        let outcome = run_command(&argv);
        println!("$ {}  (exit {})", argv[1..].join(" "), outcome.code);
        print!("{}{}", outcome.stdout, outcome.stderr);
    }
    Ok(())
}
