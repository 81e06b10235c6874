#pragma once

#include <string>

#include "disagg/harness.hpp"

namespace disagg {

std::string instance_to_json(const InstanceSpec& spec);
InstanceSpec instance_from_json(const std::string& text);

// Canonical form (include_timing = false) is byte-reproducible for a fixed
// (instance, config, seeds, version); timing is non-normative.
std::string run_record_to_json(const RunRecord& record, bool include_timing = true);
RunRecord run_record_from_json(const std::string& text);

std::string bench_manifest_json(const BenchResult& result, const std::vector<int>& n_values, int per_n,
                                std::uint64_t seed0, const NiapmConfig& cfg);

std::string fnv1a64_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace disagg
