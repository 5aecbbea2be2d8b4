// Drives the command line front end in-process and writes the solution
// files of one `solve` run to a scratch directory.

use hessian_lv::cli;

fn call(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("hessian-lv").chain(args.iter().copied()), &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("-> exit {code}");
    code
}

pub fn run_example() -> std::io::Result<()> {
    let set_a = ["--n", "5", "--k", "1", "--sigma", "0", "--q", "3"];
    call(&[&["exponents"], &set_a[..]].concat());
    call(&[&["count"], &set_a[..], &["--lambda", "1.998"]].concat());
    call(&["count", "--n", "12", "--k", "1", "--q", "5", "--lambda", "2.0"]);
    call(&["exponents", "--n", "4", "--k", "2", "--q", "3"]);

    let dir = std::env::temp_dir().join(format!("hessian-lv-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let dir_arg = dir.to_string_lossy().into_owned();
    call(&[&["solve"], &set_a[..], &["--lambda", "1.998", "--output", &dir_arg]].concat());
    std::fs::remove_dir_all(&dir)
}

#[allow(dead_code)]
fn main() -> std::io::Result<()> {
    run_example()
}
