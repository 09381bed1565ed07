#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace meshdetect {

// A drop-probability sweep: runs_per_point independent simulations at every
// probability, each evaluated under both fusion modes from the same run.
struct SweepSpec {
    ScenarioConfig base;
    std::vector<double> drop_probs = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
    uint32_t runs_per_point = 10;
    uint32_t jobs = 1;
};

struct SweepPointStats {
    double drop_prob = 0.0;
    bool crosscheck = true;
    bool has_detection = false; // false when no selfish nodes were planted
    double mean_detection_rate = 0.0;
    double sd_detection_rate = 0.0;
    double mean_false_positive_rate = 0.0;
    double sd_false_positive_rate = 0.0;
    uint32_t runs = 0; // simulations that completed
};

struct SweepResult {
    // Two entries per probability, in the order given: crosscheck, stat_only.
    std::vector<SweepPointStats> points;
    std::vector<std::string> errors; // failed cells, "<drop_prob>/<run>: message"
    std::string csv;
};

// Cell seeds come from Rng::derive_seed(base.seed, prob_index * runs + run),
// so any cell can be reproduced as a single run.
SweepResult run_sweep(const SweepSpec& spec);

} // namespace meshdetect
