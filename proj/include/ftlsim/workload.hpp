#pragma once

#include <cassert>
#include <cstdint>
#include <istream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ftlsim/types.hpp"

namespace ftlsim {

struct WriteRequest {
  std::uint64_t seq = 0;
  std::uint64_t byte_offset = 0;
  std::uint64_t length = 0;  // bytes, > 0
};

/// Unbiased draw from [0, n). Bounded sampling is done by rejection on the
/// raw engine output because the standard distributions are not specified
/// bit-exactly across library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t excess = (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
  std::uint64_t x = rng();
  if (excess != 0) {
    const std::uint64_t cutoff = std::numeric_limits<std::uint64_t>::max() - excess;
    while (x > cutoff) x = rng();
  }
  return x % n;
}

/// Trace line format: `timestamp,op,offset,length` with op in {r,w}, offset
/// and length in decimal bytes. Lines starting with '#' are skipped. Read
/// rows are discarded; malformed rows raise std::runtime_error with the line
/// number.
std::vector<WriteRequest> parse_canonical(std::istream& in);

/// SPC-style CSV rows `ASU,LBA,size,opcode,timestamp`; write rows (W/w) are
/// kept with byte_offset = LBA * lba_unit, read rows are dropped.
std::vector<WriteRequest> import_spc(std::istream& in, std::uint32_t lba_unit);

struct HotspotRegion {
  double address_fraction;  // share of the logical space, in (0,1]
  double access_fraction;   // share of the writes, fractions sum to 1
};

std::vector<WriteRequest> gen_uniform(std::uint64_t total_writes, std::uint32_t req_pages,
                                      std::uint64_t logical_pages, std::uint32_t page_size,
                                      std::uint64_t seed);

/// Regions tile the address space in order; each write first samples a
/// region by access weight, then a page uniformly inside it.
std::vector<WriteRequest> gen_hotspot(const std::vector<HotspotRegion>& regions,
                                      std::uint64_t total_writes, std::uint32_t req_pages,
                                      std::uint64_t logical_pages, std::uint32_t page_size,
                                      std::uint64_t seed);

/// Zipf(s) over page ranks, rank 0 = hottest = lowest address.
std::vector<WriteRequest> gen_zipf(double s, std::uint64_t total_writes, std::uint32_t req_pages,
                                   std::uint64_t logical_pages, std::uint32_t page_size,
                                   std::uint64_t seed);

/// Static page-temperature assignment, level 0 = hottest.
struct HotnessMap {
  std::vector<std::uint8_t> level;
  std::uint32_t levels = 3;

  std::uint8_t level_of(Lpa lpa) const { return level[lpa]; }
  static HotnessMap uniform_cold(std::uint64_t logical_pages, std::uint32_t levels);
};

/// One full pre-pass over the workload counts accesses per page; pages are
/// ranked by descending count (ties by address) and cut at the given
/// quantiles (defaults 10% / 30% / rest). Unaccessed pages go to the coldest
/// level.
HotnessMap precharacterize(const std::vector<WriteRequest>& workload,
                           std::uint64_t logical_pages, std::uint32_t page_size,
                           std::uint32_t levels = 3,
                           const std::vector<double>& quantiles = {0.10, 0.30});

}  // namespace ftlsim
