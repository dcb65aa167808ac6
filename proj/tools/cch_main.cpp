#include <string>

#include <CLI11.hpp>

#include "cch/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral solver for the convective Cahn-Hilliard equation "
                 "with degenerate mobility"};
    app.require_subcommand(1);
    app.fallthrough(); // allow --strict / --jobs after the subcommand

    bool strict = false;
    int jobs = 1;
    app.add_flag("--strict", strict, "make invariant violations fatal (exit 5)");
    app.add_option("--jobs", jobs, "parallel runs for sweeps")->check(CLI::PositiveNumber);

    std::string config_path;
    auto* run = app.add_subcommand("run", "execute one configured run");
    run->add_option("config", config_path, "run config file")->required();

    std::string manifest_path;
    auto* sweep = app.add_subcommand("sweep", "execute an experiment manifest");
    sweep->add_option("manifest", manifest_path, "experiment manifest file")->required();

    std::string verify_path;
    auto* verify = app.add_subcommand("verify", "run and check the invariant suite");
    verify->add_option("config", verify_path, "run config file")->required();

    std::string run_dir;
    std::string format = "csv";
    auto* exp = app.add_subcommand("export", "convert run snapshots to text");
    exp->add_option("run_dir", run_dir, "run directory containing snapshots/")->required();
    exp->add_option("--format", format, "csv or txt")->check(CLI::IsMember({"csv", "txt"}));

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cch::cmd_run(config_path, strict, jobs);
    if (sweep->parsed()) return cch::cmd_sweep(manifest_path, strict, jobs);
    if (verify->parsed()) return cch::cmd_verify(verify_path, strict);
    if (exp->parsed()) return cch::cmd_export(run_dir, format);
    return 1;
}
