#pragma once

#include <optional>
#include <string>

#include "finsler/config.hpp"

namespace finsler::cli {

struct RunOptions {
    bool full = false;                 // dump full tensors instead of digests
    std::optional<bool> expect_flat;   // turn the flatness verdict into an assertion
    std::optional<bool> expect_douglas;
    int threads = 1;                   // >1 parallelizes per-point checks
};

struct RunResult {
    json report;
    int checks_run = 0;
    int failures = 0;
    int exit_code = 0; // 0 all pass, 1 any failure (2 = invalid config, thrown earlier)
};

// command: admissibility | tensors | spray | hamel | douglas | verify-all
RunResult run(const RunConfig& cfg, const std::string& command, const RunOptions& opt = {});

int thread_count_from_env(); // optional ABG_VERIFY_THREADS override, default 1

} // namespace finsler::cli
