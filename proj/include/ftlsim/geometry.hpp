#pragma once

#include <cstdint>

#include "ftlsim/types.hpp"

namespace ftlsim {

/// Physical layout of the simulated device plus the logical address space
/// mapped onto it. Physical capacity must cover the logical capacity scaled
/// by the overprovisioning factor.
struct DeviceGeometry {
  std::uint32_t channels = 1;
  std::uint32_t blocks_per_channel = 4096;
  std::uint32_t pages_per_block = 64;
  std::uint32_t page_size = 4096;  // bytes
  std::uint64_t logical_pages = 0;
  double op_factor = 1.07;

  std::uint64_t total_blocks() const {
    return static_cast<std::uint64_t>(channels) * blocks_per_channel;
  }
  std::uint64_t total_pages() const {
    return total_blocks() * pages_per_block;
  }

  /// ceil(logical_pages * op_factor), the minimum physical page count.
  std::uint64_t min_physical_pages() const;

  /// Throws std::invalid_argument on capacity shortfall or degenerate layout.
  void validate() const;

  // Physical page addresses are flat indices: ppa = block * pages_per_block + page.
  Ppa encode_ppa(BlockId block, std::uint32_t page) const {
    return static_cast<Ppa>(block) * pages_per_block + page;
  }
  BlockId ppa_block(Ppa ppa) const {
    return static_cast<BlockId>(ppa / pages_per_block);
  }
  std::uint32_t ppa_page(Ppa ppa) const {
    return static_cast<std::uint32_t>(ppa % pages_per_block);
  }
  std::uint32_t block_channel(BlockId block) const {
    return block / blocks_per_channel;
  }
};

/// Largest logical page count this physical layout can host at the given
/// overprovisioning factor.
std::uint64_t fit_logical_pages(std::uint32_t channels, std::uint32_t blocks_per_channel,
                                std::uint32_t pages_per_block, double op_factor);

}  // namespace ftlsim
