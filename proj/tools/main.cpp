#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshdetect.h"

namespace {

struct ConfigDeleter {
    void operator()(md_config* c) const { md_config_free(c); }
};
struct ResultDeleter {
    void operator()(md_result* r) const { md_result_free(r); }
};
using ConfigPtr = std::unique_ptr<md_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<md_result, ResultDeleter>;

int report(int status) {
    std::cerr << "error: " << md_last_error() << "\n";
    return status;
}

// Common scenario options; dedicated flags are applied after --set pairs.
struct ScenarioOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed;
    std::string strategy;
    std::string drop_prob;
    std::string selfish_fraction;
    std::string crosscheck;
};

void add_scenario_options(CLI::App& cmd, ScenarioOpts& opts) {
    cmd.add_option("--config", opts.config_path, "Config file (key = value lines)");
    cmd.add_option("--set", opts.sets, "Override one config field, as key=value")
        ->type_name("KEY=VALUE");
    cmd.add_option("--seed", opts.seed, "Base RNG seed");
    cmd.add_option("--strategy", opts.strategy, "Selfish strategy: dropreq or droprep");
    cmd.add_option("--drop-prob", opts.drop_prob, "Selfish drop probability in [0,1]");
    cmd.add_option("--selfish-fraction", opts.selfish_fraction, "Fraction of selfish nodes");
    cmd.add_option("--crosscheck", opts.crosscheck, "Header cross-check fusion: true or false");
}

int apply_scenario(md_config* cfg, const ScenarioOpts& opts) {
    if (!opts.config_path.empty()) {
        if (int rc = md_config_load_file(cfg, opts.config_path.c_str())) return report(rc);
    }
    for (const std::string& pair : opts.sets) {
        const size_t eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects key=value, got '" << pair << "'\n";
            return MD_ERR_CONFIG;
        }
        const std::string key = pair.substr(0, eq);
        const std::string value = pair.substr(eq + 1);
        if (int rc = md_config_set(cfg, key.c_str(), value.c_str())) return report(rc);
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"seed", &opts.seed},
        {"strategy", &opts.strategy},
        {"drop_prob", &opts.drop_prob},
        {"selfish_fraction", &opts.selfish_fraction},
        {"crosscheck_enabled", &opts.crosscheck},
    };
    for (const auto& [key, value] : flags) {
        if (value->empty()) continue;
        if (int rc = md_config_set(cfg, key, value->c_str())) return report(rc);
    }
    return MD_OK;
}

int write_output(const char* text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return MD_OK;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot open output file " << out_path << "\n";
        return MD_ERR_RUNTIME;
    }
    out << text << "\n";
    out.flush();
    if (!out) {
        std::cerr << "error: failed writing output file " << out_path << "\n";
        return MD_ERR_RUNTIME;
    }
    return MD_OK;
}

int parse_probs(const std::string& text, std::vector<double>& out) {
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(start, comma - start);
        try {
            size_t pos = 0;
            const double p = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument("trailing characters");
            out.push_back(p);
        } catch (const std::exception&) {
            std::cerr << "error: bad probability '" << item << "' in --probs\n";
            return MD_ERR_CONFIG;
        }
        start = comma + 1;
    }
    if (out.empty()) {
        std::cerr << "error: --probs must list at least one probability\n";
        return MD_ERR_CONFIG;
    }
    return MD_OK;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wireless mesh route-discovery simulator with selfish-node detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(md_version()));

    ScenarioOpts run_opts;
    std::string run_trace;
    std::string run_out;
    CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scenario and report metrics");
    add_scenario_options(*run_cmd, run_opts);
    run_cmd->add_option("--trace", run_trace, "Write a JSONL event trace to this file");
    run_cmd->add_option("--out", run_out, "Write metrics JSON here instead of stdout");

    ScenarioOpts sweep_opts;
    std::string sweep_probs;
    unsigned sweep_runs = 10;
    unsigned sweep_jobs = 1;
    std::string sweep_out;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Sweep drop probability and tabulate detection rates");
    add_scenario_options(*sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--probs", sweep_probs, "Comma-separated drop probabilities")
        ->type_name("P1,P2,...");
    sweep_cmd->add_option("--runs", sweep_runs, "Simulations per probability")
        ->check(CLI::Range(1u, 1000000u));
    sweep_cmd->add_option("--jobs", sweep_jobs, "Worker threads")
        ->check(CLI::Range(1u, 4096u));
    sweep_cmd->add_option("--out", sweep_out, "Write the CSV here instead of stdout");

    std::string replay_trace;
    std::string replay_out;
    CLI::App* replay_cmd =
        app.add_subcommand("replay", "Rebuild detection metrics from a recorded trace");
    replay_cmd->add_option("--trace", replay_trace, "Trace file written by run --trace")
        ->required();
    replay_cmd->add_option("--out", replay_out, "Write metrics JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return MD_ERR_CONFIG;
    }

    if (run_cmd->parsed()) {
        ConfigPtr cfg(md_config_create());
        if (!cfg) return report(MD_ERR_RUNTIME);
        if (int rc = apply_scenario(cfg.get(), run_opts)) return rc;
        md_result* raw = nullptr;
        const char* trace_path = run_trace.empty() ? nullptr : run_trace.c_str();
        if (int rc = md_run(cfg.get(), trace_path, &raw)) return report(rc);
        ResultPtr result(raw);
        return write_output(md_result_metrics(result.get()), run_out);
    }

    if (sweep_cmd->parsed()) {
        ConfigPtr cfg(md_config_create());
        if (!cfg) return report(MD_ERR_RUNTIME);
        if (int rc = apply_scenario(cfg.get(), sweep_opts)) return rc;
        std::vector<double> probs;
        if (!sweep_probs.empty()) {
            if (int rc = parse_probs(sweep_probs, probs)) return rc;
        }
        md_result* raw = nullptr;
        if (int rc = md_sweep(cfg.get(), probs.empty() ? nullptr : probs.data(), probs.size(),
                              sweep_runs, sweep_jobs, &raw))
            return report(rc);
        ResultPtr result(raw);
        return write_output(md_result_csv(result.get()), sweep_out);
    }

    md_result* raw = nullptr;
    if (int rc = md_replay(replay_trace.c_str(), &raw)) return report(rc);
    ResultPtr result(raw);
    return write_output(md_result_metrics(result.get()), replay_out);
}
