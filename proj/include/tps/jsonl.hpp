#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tps/errors.hpp"
#include "tps/trajectory.hpp"

namespace tps {

// JSONL trajectory format: one record object per line with keys id,
// horizon_T, stop_Z, delta, outcome_Y (opt), stop_reason, qz_estimate (opt),
// streams (name -> array of reals). Unknown keys are ignored with a warning.

inline TrajectoryRecord record_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"id",          "horizon_T",   "stop_Z",
                                               "delta",       "outcome_Y",   "stop_reason",
                                               "qz_estimate", "streams"};
    TrajectoryRecord rec;
    try {
        rec.id = j.at("id").get<std::string>();
        rec.horizon_T = j.at("horizon_T").get<std::size_t>();
        rec.stop_Z = j.at("stop_Z").get<std::size_t>();
        rec.delta = j.at("delta").get<int>() != 0;
        if (j.contains("outcome_Y") && !j["outcome_Y"].is_null())
            rec.outcome_Y = j["outcome_Y"].get<int>();
        rec.stop_reason = stop_reason_from_name(j.at("stop_reason").get<std::string>());
        if (j.contains("qz_estimate") && !j["qz_estimate"].is_null())
            rec.qz_estimate = j["qz_estimate"].get<double>();
        for (const auto& [name, arr] : j.at("streams").items()) {
            std::vector<double> stream;
            stream.reserve(arr.size());
            for (const auto& v : arr)
                stream.push_back(v.is_number() ? v.get<double>()
                                               : std::numeric_limits<double>::quiet_NaN());
            rec.streams.emplace(name, std::move(stream));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(rec.id.empty() ? "<unparsed>" : rec.id, "<json>", e.what());
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key))
            std::cerr << "warning: record '" << rec.id << "': ignoring unknown key '" << key
                      << "'\n";
    }
    return rec;
}

inline nlohmann::json record_to_json(const TrajectoryRecord& rec) {
    nlohmann::json j;
    j["id"] = rec.id;
    j["horizon_T"] = rec.horizon_T;
    j["stop_Z"] = rec.stop_Z;
    j["delta"] = rec.delta ? 1 : 0;
    if (rec.outcome_Y) j["outcome_Y"] = *rec.outcome_Y;
    j["stop_reason"] = stop_reason_name(rec.stop_reason);
    if (rec.qz_estimate) j["qz_estimate"] = *rec.qz_estimate;
    j["streams"] = nlohmann::json::object();
    for (const auto& [name, stream] : rec.streams) j["streams"][name] = stream;
    return j;
}

// Reads, validates, and clips every record in a JSONL file.
inline std::vector<TrajectoryRecord> read_jsonl(std::istream& in, ClipPolicy policy = {}) {
    std::vector<TrajectoryRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("<line " + std::to_string(lineno) + ">", "<json>", e.what());
        }
        records.push_back(validate_and_clip(record_from_json(j), policy));
    }
    return records;
}

inline std::vector<TrajectoryRecord> read_jsonl_file(const std::string& path,
                                                     ClipPolicy policy = {}) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open input file '" + path + "'");
    return read_jsonl(in, policy);
}

inline void write_jsonl(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
    for (const auto& rec : records) out << record_to_json(rec).dump() << '\n';
}

inline void write_jsonl_file(const std::string& path,
                             const std::vector<TrajectoryRecord>& records) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open output file '" + path + "'");
    write_jsonl(out, records);
}

}  // namespace tps
