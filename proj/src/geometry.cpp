#include "ftlsim/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ftlsim {

namespace {

// ceil(n * factor) with a one-ulp guard so that exactly representable
// products (e.g. 100 * 1.07 = 107) do not round up one too far.
std::uint64_t ceil_scaled(std::uint64_t n, double factor) {
  long double x = static_cast<long double>(n) * static_cast<long double>(factor);
  return static_cast<std::uint64_t>(std::ceil(x - 1e-9L));
}

}  // namespace

std::uint64_t DeviceGeometry::min_physical_pages() const {
  return ceil_scaled(logical_pages, op_factor);
}

void DeviceGeometry::validate() const {
  if (channels < 1) throw std::invalid_argument("geometry: channels must be >= 1");
  if (blocks_per_channel < 1)
    throw std::invalid_argument("geometry: blocks_per_channel must be >= 1");
  if (pages_per_block < 2)
    throw std::invalid_argument("geometry: pages_per_block must be >= 2");
  if (page_size < 1) throw std::invalid_argument("geometry: page_size must be >= 1");
  if (logical_pages < 1) throw std::invalid_argument("geometry: logical_pages must be >= 1");
  if (op_factor < 1.0) throw std::invalid_argument("geometry: op_factor must be >= 1.0");
  if (total_pages() < min_physical_pages()) {
    throw std::invalid_argument(
        "geometry: physical capacity " + std::to_string(total_pages()) +
        " pages below required " + std::to_string(min_physical_pages()) +
        " (logical_pages * op_factor)");
  }
}

std::uint64_t fit_logical_pages(std::uint32_t channels, std::uint32_t blocks_per_channel,
                                std::uint32_t pages_per_block, double op_factor) {
  const std::uint64_t physical =
      static_cast<std::uint64_t>(channels) * blocks_per_channel * pages_per_block;
  std::uint64_t lo =
      static_cast<std::uint64_t>(static_cast<long double>(physical) / op_factor);
  while (lo > 0 && ceil_scaled(lo, op_factor) > physical) --lo;
  return lo;
}

}  // namespace ftlsim
