#pragma once

#include <string>

#include "coexsim/agent/qnetwork.hpp"

namespace coexsim::agent {

/// Binary model file: magic "CXQN", version, input/output widths, hidden
/// layer sizes, then the flat parameter array as little-endian 64-bit floats
/// (per layer: weights row-major, then biases).
void save_checkpoint(const QNetwork& net, const std::string& path);

/// Loads and validates a checkpoint; malformed or truncated files throw with
/// the offending field named.
QNetwork load_checkpoint(const std::string& path);

}  // namespace coexsim::agent
