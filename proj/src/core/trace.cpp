#include "core/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "core/errors.hpp"

namespace meshdetect {

namespace {

using nlohmann::json;

std::string fmt_node(NodeId id) {
    return id == kNoNode ? std::string("null") : std::to_string(id);
}

void append_lost(std::string& line, const std::vector<NodeId>& lost) {
    line += ",\"lost\":[";
    for (size_t i = 0; i < lost.size(); ++i) {
        if (i) line += ',';
        line += std::to_string(lost[i]);
    }
    line += ']';
}

NodeId node_or_sentinel(const json& v, const char* field, size_t lineno) {
    if (v.is_null()) return kNoNode;
    if (!v.is_number_unsigned()) {
        throw TraceCorrupt("trace line " + std::to_string(lineno) + ": bad field '" + field + "'");
    }
    return v.get<NodeId>();
}

TimeUs time_field(const json& v, const char* field, size_t lineno) {
    if (!v.is_number()) {
        throw TraceCorrupt("trace line " + std::to_string(lineno) + ": bad field '" + field + "'");
    }
    return seconds_to_us(v.get<double>());
}

} // namespace

std::string format_time_us(TimeUs t) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%" PRId64 ".%06" PRId64, t / kUsPerSec, t % kUsPerSec);
    return buf;
}

void TraceWriter::write_header(const ScenarioConfig& cfg, const Topology& topo,
                               const std::vector<NodeId>& selfish) {
    std::string line = "{\"kind\":\"header\",\"version\":";
    line += std::to_string(kTraceVersion);
    line += ",\"config\":{";
    bool first = true;
    for (const std::string& key : config_keys()) {
        if (!first) line += ',';
        first = false;
        line += '"';
        line += key;
        line += "\":\"";
        line += config_get(cfg, key);
        line += '"';
    }
    line += "},\"positions\":[";
    const auto& pos = topo.positions();
    for (size_t i = 0; i < pos.size(); ++i) {
        if (i) line += ',';
        line += '[';
        line += format_double(pos[i].x);
        line += ',';
        line += format_double(pos[i].y);
        line += ']';
    }
    line += "],\"selfish\":[";
    for (size_t i = 0; i < selfish.size(); ++i) {
        if (i) line += ',';
        line += std::to_string(selfish[i]);
    }
    line += "]}\n";
    out_ << line;
}

void TraceWriter::write_tx(const TxObservation& obs) {
    std::string line;
    if (obs.is_rreq) {
        const RreqPacket& p = obs.rreq;
        line = "{\"kind\":\"rreq\",\"t\":" + format_time_us(obs.tx_time);
        line += ",\"lat\":" + format_time_us(obs.latency);
        line += ",\"src\":" + std::to_string(p.sender);
        line += ",\"dst\":\"bcast\"";
        line += ",\"orig\":" + std::to_string(p.src_id);
        line += ",\"dest\":" + std::to_string(p.dest_id);
        line += ",\"oseq\":" + std::to_string(p.src_seq_num);
        line += ",\"dseq\":" + std::to_string(p.dest_seq_num);
        line += ",\"bcast\":" + std::to_string(p.bcast_id);
        line += ",\"ttl\":" + std::to_string(p.ttl);
        line += ",\"next_to_source\":" + fmt_node(p.next_to_source);
        line += ",\"duplicate_flag\":";
        line += p.duplicate_flag ? "true" : "false";
    } else {
        const RrepPacket& p = obs.rrep;
        line = "{\"kind\":\"rrep\",\"t\":" + format_time_us(obs.tx_time);
        line += ",\"lat\":" + format_time_us(obs.latency);
        line += ",\"src\":" + std::to_string(p.sender);
        line += ",\"dst\":" + std::to_string(p.receiver);
        line += ",\"orig\":" + std::to_string(p.src_id);
        line += ",\"dest\":" + std::to_string(p.dest_id);
        line += ",\"dseq\":" + std::to_string(p.dest_seq_num);
        line += ",\"bcast\":" + std::to_string(p.bcast_id);
        line += ",\"hops\":" + std::to_string(p.hop_count);
        line += ",\"next_to_source\":" + fmt_node(p.next_to_source);
        line += ",\"duplicate_flag\":";
        line += p.duplicate_flag ? "true" : "false";
        line += ",\"next_to_destination\":" + fmt_node(p.next_to_destination);
    }
    append_lost(line, obs.lost);
    line += "}\n";
    out_ << line;
}

void TraceWriter::write_drop(TimeUs t, NodeId node, DropReason reason, bool rreq, NodeId orig,
                             NodeId dest, uint32_t bcast) {
    std::string line = "{\"kind\":\"drop\",\"t\":" + format_time_us(t);
    line += ",\"node\":" + std::to_string(node);
    line += ",\"reason\":\"";
    line += drop_reason_name(reason);
    line += "\",\"packet\":\"";
    line += rreq ? "rreq" : "rrep";
    line += "\",\"orig\":" + std::to_string(orig);
    line += ",\"dest\":" + std::to_string(dest);
    if (rreq) line += ",\"bcast\":" + std::to_string(bcast);
    line += "}\n";
    out_ << line;
}

TraceHeader TraceReader::read_header() {
    std::string line;
    if (!std::getline(in_, line)) throw TraceCorrupt("trace is empty");
    lineno_++;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw TraceCorrupt("trace line 1: " + std::string(e.what()));
    }
    if (!j.is_object() || j.value("kind", std::string()) != "header") {
        throw TraceCorrupt("trace line 1: missing header record");
    }
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != kTraceVersion) {
        throw TraceVersionMismatch("trace version is not " + std::to_string(kTraceVersion));
    }
    TraceHeader out;
    try {
        if (!j.contains("config") || !j["config"].is_object()) {
            throw TraceCorrupt("trace header lacks a config object");
        }
        for (const std::string& key : config_keys()) {
            const json& c = j["config"];
            if (!c.contains(key)) throw TraceCorrupt("trace header config lacks '" + key + "'");
            apply_override(out.config, key, c[key].get<std::string>());
        }
        for (const json& p : j.at("positions")) {
            out.positions.push_back(Position{p.at(0).get<double>(), p.at(1).get<double>()});
        }
        for (const json& s : j.at("selfish")) out.selfish.push_back(s.get<NodeId>());
    } catch (const json::exception& e) {
        throw TraceCorrupt("trace header: " + std::string(e.what()));
    }
    return out;
}

std::optional<TxObservation> TraceReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        lineno_++;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw TraceCorrupt("trace line " + std::to_string(lineno_) + ": " +
                               std::string(e.what()));
        }
        const std::string kind = j.value("kind", std::string());
        if (kind == "drop") continue;
        if (kind != "rreq" && kind != "rrep") {
            throw TraceCorrupt("trace line " + std::to_string(lineno_) + ": unknown kind");
        }
        TxObservation obs;
        try {
            obs.tx_time = time_field(j.at("t"), "t", lineno_);
            obs.latency = time_field(j.at("lat"), "lat", lineno_);
            for (const json& l : j.at("lost")) obs.lost.push_back(l.get<NodeId>());
            if (kind == "rreq") {
                obs.is_rreq = true;
                RreqPacket& p = obs.rreq;
                p.sender = j.at("src").get<NodeId>();
                p.src_id = j.at("orig").get<NodeId>();
                p.dest_id = j.at("dest").get<NodeId>();
                p.src_seq_num = j.at("oseq").get<uint32_t>();
                p.dest_seq_num = j.at("dseq").get<uint32_t>();
                p.bcast_id = j.at("bcast").get<uint32_t>();
                p.ttl = j.at("ttl").get<int>();
                p.next_to_source = node_or_sentinel(j.at("next_to_source"), "next_to_source",
                                                    lineno_);
                p.duplicate_flag = j.at("duplicate_flag").get<bool>();
            } else {
                obs.is_rreq = false;
                RrepPacket& p = obs.rrep;
                p.sender = j.at("src").get<NodeId>();
                p.receiver = j.at("dst").get<NodeId>();
                p.src_id = j.at("orig").get<NodeId>();
                p.dest_id = j.at("dest").get<NodeId>();
                p.dest_seq_num = j.at("dseq").get<uint32_t>();
                p.bcast_id = j.at("bcast").get<uint32_t>();
                p.hop_count = j.at("hops").get<uint32_t>();
                p.next_to_source = node_or_sentinel(j.at("next_to_source"), "next_to_source",
                                                    lineno_);
                p.duplicate_flag = j.at("duplicate_flag").get<bool>();
                p.next_to_destination = node_or_sentinel(j.at("next_to_destination"),
                                                         "next_to_destination", lineno_);
            }
        } catch (const json::exception& e) {
            throw TraceCorrupt("trace line " + std::to_string(lineno_) + ": " +
                               std::string(e.what()));
        }
        return obs;
    }
    return std::nullopt;
}

} // namespace meshdetect
