#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfdiv/errors.hpp"
#include "qfdiv/rng.hpp"

namespace qfdiv::cli {

enum class Command { compute, verify, recover, falsify };
enum class OutputFormat { text, json };

// Process exit codes.
inline constexpr int kExitExpected = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    Command command = Command::compute;
    std::string generator;
    std::string a_path;
    std::string b_path;
    std::string route = "spectral";
    bool breakdown = false;
    // --transform for verify/falsify, --phi for recover.
    std::string transform;
    std::size_t dim = 2;
    std::uint64_t seed = kDefaultSeed;
    std::size_t trials = 100;
    double tol = 1e-9;
    std::size_t budget = 1000;
    double threshold = 1e-3;
    OutputFormat format = OutputFormat::text;
};

class UsageError : public Error {
public:
    UsageError(const std::string& what, std::string help, bool help_requested = false)
        : Error(what), help_(std::move(help)), help_requested_(help_requested) {}
    const std::string& help() const noexcept { return help_; }
    bool help_requested() const noexcept { return help_requested_; }

private:
    std::string help_;
    bool help_requested_;
};

/// Arguments without the program name. Throws UsageError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Writes the report to `out` and diagnostics to `err`; returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfdiv::cli
