#pragma once

#define SPIKEKIT_VERSION_MAJOR 0
#define SPIKEKIT_VERSION_MINOR 1
#define SPIKEKIT_VERSION_PATCH 0

namespace spikekit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spikekit
