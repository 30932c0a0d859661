#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wick/problem.hpp"

namespace {

int emit(const wick::CommandResult& res, const std::string& output) {
    if (output.empty() || output == "-") {
        std::cout << res.output;
    } else {
        std::ofstream out(output);
        if (!out) {
            std::cerr << "error: cannot write " << output << "\n";
            return 2;
        }
        out << res.output;
    }
    return res.exit_code;
}

std::optional<wick::ProblemSpec> load(const std::string& path) {
    wick::ParseResult res = wick::parse_spec(path);
    for (const auto& d : res.diagnostics)
        std::cerr << wick::format_diagnostic(d) << "\n";
    return res.spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Fedosov star product engine for Kaehler charts"};
    app.require_subcommand(1);

    std::string spec_path, output;
    std::vector<std::string> suites;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--spec", spec_path, "problem spec JSON file")->required();
        cmd->add_option("--output", output, "write results here instead of stdout");
    };

    CLI::App* star = app.add_subcommand("star", "evaluate the star tasks of a spec");
    add_common(star);
    CLI::App* verify = app.add_subcommand("verify", "run identity check suites");
    add_common(verify);
    verify->add_option("--suite", suites, "suite names (default: the spec's verify tasks)");
    verify->add_option("--seed", seed, "override the sample seed");
    CLI::App* dump = app.add_subcommand("dump-r", "print the solved Fedosov corrections");
    add_common(dump);

    CLI11_PARSE(app, argc, argv);

    auto spec = load(spec_path);
    if (!spec) return 2;

    if (star->parsed()) return emit(wick::cmd_star(*spec), output);
    if (verify->parsed()) return emit(wick::cmd_verify(*spec, suites, seed), output);
    return emit(wick::cmd_dump_r(*spec), output);
}
