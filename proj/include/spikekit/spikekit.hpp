#pragma once

#include "spikekit/alignment.hpp"
#include "spikekit/error.hpp"
#include "spikekit/image.hpp"
#include "spikekit/metrics.hpp"
#include "spikekit/reconstruction.hpp"
#include "spikekit/rng.hpp"
#include "spikekit/spike_model.hpp"
#include "spikekit/spike_stream.hpp"
#include "spikekit/stream_io.hpp"
#include "spikekit/synthesis.hpp"
#include "spikekit/version.hpp"
