#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/timebase.hpp"

namespace meshdetect {

enum class SelfishStrategy { DropReq, DropRep };

const char* strategy_name(SelfishStrategy s);
SelfishStrategy strategy_from_name(const std::string& name);

// Full description of one simulated scenario. All fields have defaults; a
// config file and CLI-style key=value overrides can change any of them.
struct ScenarioConfig {
    double area_width = 900.0;          // m
    double area_height = 900.0;         // m
    uint32_t node_count = 50;
    double radio_range = 250.0;         // m
    double sim_duration = 1600.0;       // s
    double rreq_timeout = 0.5;          // s, forwarding deadline
    double rrep_timeout = 3.0;          // s, reply deadline / reverse-path timer
    double alpha = 0.1;                 // row-test significance level
    double beta = 0.4;                  // ANOVA gate threshold
    double window_W = 100.0;            // s, observation window
    double detection_D = 400.0;         // s, detection span (multiple of W)
    double selfish_fraction = 0.5;
    SelfishStrategy strategy = SelfishStrategy::DropReq;
    double drop_prob = 1.0;
    double session_arrival_rate = 0.05; // sessions per second (Poisson)
    double mean_session_duration = 24.0;// s (exponential)
    double per_hop_latency = 0.002;     // s
    double latency_jitter = 0.0005;     // s, uniform +/- around per_hop_latency
    double channel_loss_prob = 0.0;
    bool crosscheck_enabled = true;
    uint64_t seed = 1;

    // Protocol constants.
    int initial_ttl = 35;
    double route_lifetime = 10.0;       // s

    // Fusion policy.
    double theta_hard = 0.5;            // hard-evidence violation ratio
    uint32_t n_min = 5;                 // min obligations for ratio/override
    uint32_t confirm_min = 1;           // violations confirming a stat verdict

    // Row-test applicability threshold (minimum row total).
    uint32_t min_row_total = 5;

    TimeUs duration_us() const { return seconds_to_us(sim_duration); }
    TimeUs window_us() const { return seconds_to_us(window_W); }
    TimeUs detection_us() const { return seconds_to_us(detection_D); }
    TimeUs rreq_timeout_us() const { return seconds_to_us(rreq_timeout); }
    TimeUs rrep_timeout_us() const { return seconds_to_us(rrep_timeout); }
    TimeUs route_lifetime_us() const { return seconds_to_us(route_lifetime); }

    // Number of W-sized windows summed per detection (D / W).
    uint32_t windows_per_detection() const;

    // Throws ConfigError describing the first problem found.
    void validate() const;
};

// Parses a key = value config file (one pair per line, '#' comments).
ScenarioConfig load_config_file(const std::string& path);
void parse_config_text(const std::string& text, ScenarioConfig& cfg);

// Applies a single key/value override. Throws ConfigError on unknown keys or
// malformed values.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// One key's current value, rendered as text (inverse of apply_override).
std::string config_get(const ScenarioConfig& cfg, const std::string& key);

// All config keys in canonical (stable) order.
std::vector<std::string> config_keys();

// Shortest decimal rendering of d that parses back to exactly d.
std::string format_double(double d);

// Deterministic single-line key=value rendering of every field.
std::string config_to_text(const ScenarioConfig& cfg);

} // namespace meshdetect
