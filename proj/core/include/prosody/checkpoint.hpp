// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "prosody/nn.hpp"

namespace prosody {

// Flat binary container of named arrays plus a key=value manifest.
//
// Layout (all integers little-endian uint32):
//   magic "PCKP" | version | manifest_len | manifest bytes ("k=v\n" lines)
//   | n_arrays | per array: name_len | name | rank | dims[rank] | float32 data
using Manifest = std::map<std::string, std::string>;

void save_checkpoint(const std::string& path, const ParamSet& params, const Manifest& manifest);

// Loads values into an already constructed model; names and shapes must
// match exactly. Returns the manifest.
Manifest load_checkpoint(const std::string& path, ParamSet& params);

// Reads just the manifest (to reconstruct the model before loading weights).
Manifest read_manifest(const std::string& path);

}  // namespace prosody
