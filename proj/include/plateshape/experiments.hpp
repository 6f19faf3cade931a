#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plateshape {

// Runs one named experiment from flat-JSON config text and writes its CSV
// outputs into out_dir (atomically, temp file + rename). Returns the paths
// written. The same config + seed always reproduces the files byte for byte.
// Unknown names, malformed configs, and unknown config keys throw
// std::invalid_argument; numerical failures propagate the module exceptions.
std::vector<std::string> run_experiment(const std::string& name,
                                        const std::string& config_text,
                                        const std::string& out_dir,
                                        std::uint64_t seed);

const std::vector<std::string>& experiment_names();

}  // namespace plateshape
