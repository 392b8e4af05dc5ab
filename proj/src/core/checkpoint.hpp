#pragma once

#include <string>

#include "core/network.hpp"

namespace ee {

// Checkpoint layout (little-endian): magic "EECK", version u32, tau f64,
// encoder NetworkSpec block, emulator NetworkSpec block, training metadata
// block, weight tensors in declared order (encoder first), trailing CRC32
// over everything before it. Corrupt magic, version, shape or CRC raise
// FormatError.
void save_checkpoint(const RatioModel& model, const std::string& path);
RatioModel load_checkpoint(const std::string& path);

}  // namespace ee
