#include "core/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "core/errors.hpp"

namespace meshdetect {

const char* strategy_name(SelfishStrategy s) {
    return s == SelfishStrategy::DropReq ? "dropreq" : "droprep";
}

SelfishStrategy strategy_from_name(const std::string& name) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (n == "dropreq" || n == "drop_req") return SelfishStrategy::DropReq;
    if (n == "droprep" || n == "drop_rep") return SelfishStrategy::DropRep;
    throw ConfigError("unknown strategy '" + name + "' (expected dropreq or droprep)");
}

uint32_t ScenarioConfig::windows_per_detection() const {
    return static_cast<uint32_t>(detection_us() / window_us());
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double d = std::stod(value, &pos);
        while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) pos++;
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
    }
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos]))) pos++;
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an integer");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v;
    for (char c : value) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a boolean");
}

std::string fmt_double(double d) { return format_double(d); }

struct Field {
    std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<std::pair<std::string, Field>>& field_table() {
    auto dbl = [](double ScenarioConfig::* m) {
        return Field{
            [m](ScenarioConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); },
            [m](const ScenarioConfig& c) { return fmt_double(c.*m); },
        };
    };
    static const std::vector<std::pair<std::string, Field>> table = {
        {"area", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                std::string s = v;
                for (char& ch : s) if (ch == 'x' || ch == 'X' || ch == ',') ch = ' ';
                std::istringstream in(s);
                double w = 0, h = 0;
                if (!(in >> w >> h)) throw ConfigError("config key '" + k + "': expected WIDTHxHEIGHT");
                std::string rest;
                if (in >> rest) throw ConfigError("config key '" + k + "': expected WIDTHxHEIGHT");
                c.area_width = w;
                c.area_height = h;
            },
            [](const ScenarioConfig& c) { return fmt_double(c.area_width) + "x" + fmt_double(c.area_height); },
        }},
        {"node_count", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.node_count = static_cast<uint32_t>(parse_u64(k, v));
            },
            [](const ScenarioConfig& c) { return std::to_string(c.node_count); },
        }},
        {"radio_range", dbl(&ScenarioConfig::radio_range)},
        {"sim_duration", dbl(&ScenarioConfig::sim_duration)},
        {"rreq_timeout", dbl(&ScenarioConfig::rreq_timeout)},
        {"rrep_timeout", dbl(&ScenarioConfig::rrep_timeout)},
        {"alpha", dbl(&ScenarioConfig::alpha)},
        {"beta", dbl(&ScenarioConfig::beta)},
        {"window_W", dbl(&ScenarioConfig::window_W)},
        {"detection_D", dbl(&ScenarioConfig::detection_D)},
        {"selfish_fraction", dbl(&ScenarioConfig::selfish_fraction)},
        {"strategy", Field{
            [](ScenarioConfig& c, const std::string&, const std::string& v) { c.strategy = strategy_from_name(v); },
            [](const ScenarioConfig& c) { return std::string(strategy_name(c.strategy)); },
        }},
        {"drop_prob", dbl(&ScenarioConfig::drop_prob)},
        {"session_arrival_rate", dbl(&ScenarioConfig::session_arrival_rate)},
        {"mean_session_duration", dbl(&ScenarioConfig::mean_session_duration)},
        {"per_hop_latency", dbl(&ScenarioConfig::per_hop_latency)},
        {"latency_jitter", dbl(&ScenarioConfig::latency_jitter)},
        {"channel_loss_prob", dbl(&ScenarioConfig::channel_loss_prob)},
        {"crosscheck_enabled", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.crosscheck_enabled = parse_bool(k, v); },
            [](const ScenarioConfig& c) { return std::string(c.crosscheck_enabled ? "true" : "false"); },
        }},
        {"seed", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); },
            [](const ScenarioConfig& c) { return std::to_string(c.seed); },
        }},
        {"initial_ttl", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.initial_ttl = static_cast<int>(parse_u64(k, v));
            },
            [](const ScenarioConfig& c) { return std::to_string(c.initial_ttl); },
        }},
        {"route_lifetime", dbl(&ScenarioConfig::route_lifetime)},
        {"theta_hard", dbl(&ScenarioConfig::theta_hard)},
        {"n_min", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.n_min = static_cast<uint32_t>(parse_u64(k, v));
            },
            [](const ScenarioConfig& c) { return std::to_string(c.n_min); },
        }},
        {"confirm_min", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.confirm_min = static_cast<uint32_t>(parse_u64(k, v));
            },
            [](const ScenarioConfig& c) { return std::to_string(c.confirm_min); },
        }},
        {"min_row_total", Field{
            [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.min_row_total = static_cast<uint32_t>(parse_u64(k, v));
            },
            [](const ScenarioConfig& c) { return std::to_string(c.min_row_total); },
        }},
    };
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& [name, field] : field_table())
        if (name == key) return &field;
    return nullptr;
}

} // namespace

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const Field* f = find_field(key);
    if (!f) throw ConfigError("unknown config key '" + key + "'");
    f->set(cfg, key, value);
}

std::string format_double(double d) {
    // Shortest representation that round-trips.
    char buf[64];
    for (int prec = 1; prec <= 17; prec++) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, d);
        if (std::stod(buf) == d) break;
    }
    return buf;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [name, field] : field_table()) out.push_back(name);
    return out;
}

std::string config_get(const ScenarioConfig& cfg, const std::string& key) {
    const Field* f = find_field(key);
    if (!f) throw ConfigError("unknown config key '" + key + "'");
    return f->get(cfg);
}

std::string config_to_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& [name, field] : field_table()) {
        out += name;
        out += " = ";
        out += field.get(cfg);
        out += "\n";
    }
    return out;
}

void parse_config_text(const std::string& text, ScenarioConfig& cfg) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            size_t b2 = s.find_first_not_of(" \t");
            if (b2 == std::string::npos) return std::string();
            size_t e2 = s.find_last_not_of(" \t");
            return s.substr(b2, e2 - b2 + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_override(cfg, key, value);
    }
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ScenarioConfig cfg;
    parse_config_text(buf.str(), cfg);
    return cfg;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
    if (!(area_width > 0) || !(area_height > 0)) fail("area dimensions must be positive");
    if (node_count < 2) fail("node_count must be at least 2");
    if (node_count > 65535) fail("node_count must be at most 65535");
    if (!(radio_range > 0)) fail("radio_range must be positive");
    if (!(sim_duration > 0)) fail("sim_duration must be positive");
    if (!(rreq_timeout > 0) || !(rrep_timeout > 0)) fail("timeouts must be positive");
    if (!(alpha > 0 && alpha < 1)) fail("alpha must be in (0,1)");
    if (!(beta > 0 && beta < 1)) fail("beta must be in (0,1)");
    if (!(window_W > 0)) fail("window_W must be positive");
    if (!(detection_D > 0)) fail("detection_D must be positive");
    if (detection_us() % window_us() != 0) fail("detection_D must be a multiple of window_W");
    if (!(selfish_fraction >= 0 && selfish_fraction <= 1)) fail("selfish_fraction must be in [0,1]");
    if (!(drop_prob >= 0 && drop_prob <= 1)) fail("drop_prob must be in [0,1]");
    if (!(session_arrival_rate > 0)) fail("session_arrival_rate must be positive");
    if (!(mean_session_duration > 0)) fail("mean_session_duration must be positive");
    if (!(per_hop_latency > 0)) fail("per_hop_latency must be positive");
    if (latency_jitter < 0 || latency_jitter >= per_hop_latency)
        fail("latency_jitter must be in [0, per_hop_latency)");
    if (!(channel_loss_prob >= 0 && channel_loss_prob < 1)) fail("channel_loss_prob must be in [0,1)");
    if (initial_ttl < 1) fail("initial_ttl must be at least 1");
    if (!(route_lifetime > 0)) fail("route_lifetime must be positive");
    if (!(theta_hard > 0 && theta_hard <= 1)) fail("theta_hard must be in (0,1]");
    if (n_min < 1) fail("n_min must be at least 1");
    if (min_row_total < 1) fail("min_row_total must be at least 1");
}

} // namespace meshdetect
