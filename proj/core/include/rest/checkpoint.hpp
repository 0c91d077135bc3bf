#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rest/kg.hpp"
#include "rest/model.hpp"

namespace rest {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything needed to resume training or evaluate: config, parameters, the
// relation vocabulary and the optimizer state. Reloading reproduces forward
// outputs bit-exactly at double precision.
struct Checkpoint {
    ModelParams params;
    RelationVocab relations;
    std::uint32_t epoch = 0;
    std::uint64_t adam_step = 0;
    std::vector<Tensor> adam_m;  // aligned with for_each_tensor order; empty when fresh
    std::vector<Tensor> adam_v;
    std::uint32_t format_version = kCheckpointVersion;
};

// Binary container: magic + version header, config as key/value text, the
// relation vocabulary, then named tensors (name, dtype tag, shape,
// little-endian float64 payload).
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rest
