#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "wick/verify.hpp"

namespace wick {

// One parse- or validation-time finding, located by a field path such as
// "chart.dim" or "tasks[2].f".
struct Diagnostic {
    std::string path;
    std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

// Fully validated batch problem description. Polynomials are stored as exact
// jets; rationals survive serialization as "p/q" strings.
struct ProblemSpec {
    int version = 1;

    int dim = 1;
    std::string potential_name;    // one of the built-in potentials ...
    std::optional<Jet> potential;  // ... or an explicit polynomial potential

    TruncationPolicy pol;
    mpq_class kappa = 0;

    // One term per formal-parameter power: either the chart's Kaehler form
    // or an explicit coefficient list over dz^k ^ dzbar^l.
    struct OmegaTerm {
        int lambda = 1;
        bool kaehler = false;
        std::vector<std::tuple<int, int, Jet>> entries;
    };
    std::vector<OmegaTerm> omega;

    struct BundleSpec {
        int rank = 1;
        BundleKind kind = BundleKind::Holomorphic;
        JetMat metric;
        std::optional<JetMat> transition;
    };
    std::optional<BundleSpec> bundle;

    struct Task {
        enum class Kind { Star, Verify, DumpR };
        Kind kind = Kind::Star;
        Jet f, g;                         // star
        std::vector<std::string> suites;  // verify (empty = all)
        std::uint64_t seed = 1;           // verify
    };
    std::vector<Task> tasks;

    // Negative-control hook; flips the Riemann tensor sign.
    bool sabotage_curvature_sign = false;
};

// Parses and validates a JSON spec; on success `spec` is set and diagnostics
// are empty, otherwise diagnostics carry field paths and reasons.
struct ParseResult {
    std::optional<ProblemSpec> spec;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return spec.has_value() && diagnostics.empty(); }
};

ParseResult parse_spec_text(const std::string& text);
ParseResult parse_spec(const std::string& path);

// Inverse of parsing: the emitted text re-parses to an identical spec.
std::string serialize_spec(const ProblemSpec& spec);

// The geometric objects a spec describes.
struct ProblemInstance {
    KaehlerChart chart;
    std::optional<BundleChart> bundle;
    WeylElement Omega;
};

ProblemInstance build_instance(const ProblemSpec& spec);

// Batch entry points shared by the command line tool. Exit codes: 0 success,
// 1 for failed checks, 2 for setup/configuration errors.
struct CommandResult {
    std::string output;
    int exit_code = 0;
};

CommandResult cmd_star(const ProblemSpec& spec);
CommandResult cmd_verify(const ProblemSpec& spec, const std::vector<std::string>& suites,
                         std::optional<std::uint64_t> seed);
CommandResult cmd_dump_r(const ProblemSpec& spec);

} // namespace wick
