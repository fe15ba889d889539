#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "collneg/metrics.hpp"

namespace collneg::cli {

// Runs one `collneg` invocation. args excludes the program name; `predict`
// reads feature rows from in. Machine readable results go to out,
// diagnostics and progress to err. Returns the process exit code.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

// Seed used when --seed is absent: COLLNEG_SEED if set, else 0xC011EC7.
std::uint64_t default_seed();

// A metrics record as written by fit-reg, train-ann and eval.
struct MetricsRecord {
    std::string kind;
    int b = 0;
    Metrics metrics;
};

MetricsRecord parse_metrics_line(const std::string& line);
MetricsRecord read_metrics_file(const std::filesystem::path& path);

// Published (r2, tau) for b in [5, 10] and kind "ann" or "reg"; false when
// there is no reference entry.
bool published_reference(const std::string& kind, int b, double& r2, double& tau);

// Fixed-width table with columns B, model, R2, tau, mu, MSE plus the
// published R2 and tau, ordered by B then model kind.
std::string format_report(std::vector<MetricsRecord> records);

}  // namespace collneg::cli
