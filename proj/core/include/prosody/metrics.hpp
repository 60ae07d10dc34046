// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace prosody {

// Normalized roughness: mean squared second difference of the trajectory
// divided by its variance. 0 for constant or linear input. Requires
// length >= 3.
double jitter_metric(const std::vector<double>& trajectory);

// Jitter over the voiced frames only (they form the trajectory in order).
double jitter_metric_voiced(const std::vector<double>& values, const std::vector<uint8_t>& voiced);

// RMSE over frames where both masks (if given) are voiced.
double voiced_rmse(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<uint8_t>& voiced);

// FNV-1a 64-bit content hash, for run manifests.
uint64_t fnv1a_file(const std::string& path);

// Writes "<hash_hex>  <relative_path>" per emitted file.
void write_run_manifest(const std::string& out_dir, const std::vector<std::string>& files);

}  // namespace prosody
