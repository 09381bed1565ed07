#include "core/sweep.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/sim.hpp"

namespace meshdetect {

namespace {

struct CellOutcome {
    bool ok = false;
    bool has_detection = false;
    double dr_on = 0.0;
    double fp_on = 0.0;
    double dr_off = 0.0;
    double fp_off = 0.0;
    std::string error;
};

CellOutcome run_cell(const SweepSpec& spec, uint32_t prob_index, uint32_t run) {
    CellOutcome out;
    try {
        ScenarioConfig cfg = spec.base;
        cfg.drop_prob = spec.drop_probs[prob_index];
        cfg.seed = Rng::derive_seed(spec.base.seed,
                                    static_cast<uint64_t>(prob_index) * spec.runs_per_point + run);
        SimResult result = run_simulation(cfg);
        if (result.snapshots.empty())
            throw RuntimeError("sweep run produced no detection windows");

        const FusionPolicy on{true, cfg.theta_hard, cfg.n_min, cfg.confirm_min};
        const FusionPolicy off{false, cfg.theta_hard, cfg.n_min, cfg.confirm_min};
        WindowRates rates_on =
            evaluate_window(result.snapshots.back(), cfg.node_count, result.selfish, on);
        WindowRates rates_off =
            evaluate_window(result.snapshots.back(), cfg.node_count, result.selfish, off);
        out.has_detection = rates_on.detection_rate.has_value();
        out.dr_on = rates_on.detection_rate.value_or(0.0);
        out.fp_on = rates_on.false_positive_rate;
        out.dr_off = rates_off.detection_rate.value_or(0.0);
        out.fp_off = rates_off.false_positive_rate;
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.base.validate();
    if (spec.drop_probs.empty()) throw ConfigError("sweep needs at least one drop probability");
    if (spec.runs_per_point < 1) throw ConfigError("sweep needs at least one run per point");
    for (double p : spec.drop_probs)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("sweep drop probabilities must be in [0,1]");

    const size_t cell_count = spec.drop_probs.size() * spec.runs_per_point;
    std::vector<CellOutcome> cells(cell_count);

    const uint32_t jobs = std::max<uint32_t>(1, spec.jobs);
    if (jobs == 1) {
        for (size_t c = 0; c < cell_count; ++c)
            cells[c] = run_cell(spec, static_cast<uint32_t>(c / spec.runs_per_point),
                                static_cast<uint32_t>(c % spec.runs_per_point));
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const size_t c = next.fetch_add(1);
                if (c >= cell_count) return;
                cells[c] = run_cell(spec, static_cast<uint32_t>(c / spec.runs_per_point),
                                    static_cast<uint32_t>(c % spec.runs_per_point));
            }
        };
        std::vector<std::thread> pool;
        const uint32_t n_threads = std::min<uint32_t>(jobs, static_cast<uint32_t>(cell_count));
        pool.reserve(n_threads);
        for (uint32_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    SweepResult result;
    std::ostringstream csv;
    csv << "# drop-probability sweep, " << spec.runs_per_point << " runs per point\n";
    csv << "# cell seed = derive_seed(base_seed, prob_index * runs_per_point + run);"
        << " rates are final-window network verdicts\n";
    csv << "# base: " << config_to_text(spec.base) << "\n";
    csv << "strategy,drop_prob,mode,mean_detection_rate,sd_detection_rate,"
        << "mean_false_positive_rate,sd_false_positive_rate,runs\n";

    for (size_t pi = 0; pi < spec.drop_probs.size(); ++pi) {
        std::vector<double> dr_on;
        std::vector<double> fp_on;
        std::vector<double> dr_off;
        std::vector<double> fp_off;
        bool has_detection = false;
        for (uint32_t run = 0; run < spec.runs_per_point; ++run) {
            const CellOutcome& cell = cells[pi * spec.runs_per_point + run];
            if (!cell.ok) {
                result.errors.push_back(format_double(spec.drop_probs[pi]) + "/" +
                                        std::to_string(run) + ": " + cell.error);
                continue;
            }
            has_detection = has_detection || cell.has_detection;
            dr_on.push_back(cell.dr_on);
            fp_on.push_back(cell.fp_on);
            dr_off.push_back(cell.dr_off);
            fp_off.push_back(cell.fp_off);
        }

        for (int mode = 0; mode < 2; ++mode) {
            const bool crosscheck = mode == 0;
            const std::vector<double>& dr = crosscheck ? dr_on : dr_off;
            const std::vector<double>& fp = crosscheck ? fp_on : fp_off;
            SweepPointStats stats;
            stats.drop_prob = spec.drop_probs[pi];
            stats.crosscheck = crosscheck;
            stats.has_detection = has_detection;
            stats.runs = static_cast<uint32_t>(dr.size());
            stats.mean_detection_rate = mean_of(dr);
            stats.sd_detection_rate = sample_sd(dr, stats.mean_detection_rate);
            stats.mean_false_positive_rate = mean_of(fp);
            stats.sd_false_positive_rate = sample_sd(fp, stats.mean_false_positive_rate);
            result.points.push_back(stats);

            csv << strategy_name(spec.base.strategy) << ','
                << format_double(stats.drop_prob) << ','
                << (crosscheck ? "crosscheck" : "stat_only") << ',';
            if (has_detection)
                csv << format_double(stats.mean_detection_rate) << ','
                    << format_double(stats.sd_detection_rate) << ',';
            else
                csv << ",,";
            csv << format_double(stats.mean_false_positive_rate) << ','
                << format_double(stats.sd_false_positive_rate) << ','
                << stats.runs << "\n";
        }
    }

    for (const std::string& err : result.errors) csv << "# failed cell " << err << "\n";
    result.csv = csv.str();
    return result;
}

} // namespace meshdetect
