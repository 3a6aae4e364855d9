#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "apxgrp/config.hpp"

namespace apxgrp {

inline constexpr const char* kToolVersion = "0.1.0";

// Outcome of one run: the JSON report plus named artifacts (CSV tables, set
// serializations, the plotting stub) destined for the output directory.
struct RunReport {
    nlohmann::ordered_json doc;
    std::map<std::string, std::string> artifacts;
};

// Executes the configured command.  Pure up to the optional set cache: a
// cache hit returns byte-identical results to a cold run.
RunReport run_compute(const RunConfig& cfg);

// Writes report.json and the artifacts under cfg.output.dir.
void write_outputs(const RunReport& rep, const RunConfig& cfg);

// Re-runs the config embedded in a report file and compares checksums
// (version and wall time are not part of the checksum).
bool verify_report(const std::string& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace apxgrp
