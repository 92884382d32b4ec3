#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/coin.hpp"

namespace qwalk::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kDomain = 3,
    kResource = 4,
    kIo = 5,
    kInternal = 6,
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
    std::string command;
    int steps = 500;
    std::uint64_t runs = 10000;
    std::optional<ChannelModel> model;
    std::vector<double> strengths;  // native units of `model`; one entry except for sweep
    CoinState coin = CoinState::right();
    std::optional<std::uint64_t> seed;
    std::filesystem::path out;
    OutputFormat format = OutputFormat::Csv;
    std::optional<int> quad_nodes;
    int oracle_limit = 200;
    unsigned workers = 0;
    bool asymptotic = false;
    double epsilon = 1e-3;
    std::string sweep_command;
};

// Default output stem: $QWALK_OUTPUT_DIR/<command>, or ./<command>.
std::filesystem::path default_output_stem(const std::string& command);

// Parses argv and dispatches. Diagnostics go to `err` as one JSON object per
// line ({"error": kind, "message": ...}); progress lines go to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Runs an already-validated configuration; throws qwalk errors on failure.
int execute(const RunConfig& config, std::ostream& out);

}  // namespace qwalk::cli
