#pragma once

#include <filesystem>
#include <string>

#include "cfmec/mlp.hpp"

namespace cfmec::rl {

// Text container, one named tensor per block:
//
//   cfmec-mlp 1
//   name actor_0
//   output sigmoid
//   sizes 3 128 64 64 2
//   tensor weight_0 128 3
//   <128 lines of 3 values>
//   tensor bias_0 128 1
//   ...
//   end
//
// Values are written in shortest round-trip form, so save/load is exact.

inline constexpr int kCheckpointVersion = 1;

struct NamedMlp {
    std::string name;
    MlpParams<float> params;
};

void save_checkpoint(const std::filesystem::path& path, const std::string& name,
                     const MlpParams<float>& params);

NamedMlp load_checkpoint(const std::filesystem::path& path);

}  // namespace cfmec::rl
