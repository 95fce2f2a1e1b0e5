#pragma once

#include <string>
#include <utility>

#include "npe/model.hpp"

namespace npe {

// Binary state snapshot, little-endian throughout:
//   magic "NPE2" | u16 version | u8 variant | u8 reserved | u32 n
//   f64 time, D, eps, kbtk, nu, ell
//   rho, sigma, omega coefficient arrays as interleaved (re, im) f64,
//   row-major k order
//   u64 CRC-64/XZ of all preceding bytes
// Reads never yield a partial state: the file is validated in full first.
inline constexpr uint16_t snapshot_version = 1;

void write_snapshot(const SimState& state, const PhysParams& params, const std::string& path);
std::pair<SimState, PhysParams> read_snapshot(const std::string& path);

// CRC-64/XZ (reflected 0x42F0E1EBA9EA3693, init/xorout all-ones).
uint64_t crc64_xz(const void* data, size_t len);

} // namespace npe
