use kmsel_core::variance::{estimate_sigma, SigmaMethod};
use serde::Serialize;

use crate::error::CliResult;
use crate::io::{print_stdout, read_matrix_csv};
use crate::manifest::RunManifest;
use crate::{EstimateArgs, MethodArg};

#[derive(Serialize)]
struct Output {
    schema: &'static str,
    method: &'static str,
    value: f64,
    n: usize,
    q: usize,
    degenerate: bool,
    manifest: RunManifest,
}

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    let loaded = read_matrix_csv(&args.data)?;
    let method = match args.method {
        MethodArg::Med => SigmaMethod::Med,
        MethodArg::MedUncentered => SigmaMethod::MedUncentered,
        MethodArg::Sample => SigmaMethod::Sample,
    };
    let est = estimate_sigma(&loaded.matrix, method)?;
    let out = Output {
        schema: "kmsel.estimate-sigma.v1",
        method: method.name(),
        value: est.value,
        n: est.n,
        q: est.q,
        degenerate: est.degenerate,
        manifest: RunManifest::new("estimate-sigma")
            .input(&args.data.display().to_string(), loaded.digest),
    };
    print_stdout(&serde_json::to_string_pretty(&out)?)?;
    Ok(())
}
