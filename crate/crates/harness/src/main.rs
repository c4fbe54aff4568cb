use clap::Parser;

fn main() -> anyhow::Result<()> {
    let cli = debatelab_harness::cli::Cli::parse();
    debatelab_harness::cli::run(cli)
}
