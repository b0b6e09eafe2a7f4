#include <doctest.h>

#include <stdexcept>

#include "ftlsim/geometry.hpp"

using namespace ftlsim;

namespace {

DeviceGeometry make(std::uint32_t ch, std::uint32_t bpc, std::uint32_t ppb, std::uint64_t logical,
                    double op = 1.07) {
  DeviceGeometry g;
  g.channels = ch;
  g.blocks_per_channel = bpc;
  g.pages_per_block = ppb;
  g.page_size = 4096;
  g.logical_pages = logical;
  g.op_factor = op;
  return g;
}

}  // namespace

TEST_CASE("geometry capacity check") {
  // 64 physical pages >= ceil(56 * 1.07) = 60
  CHECK_NOTHROW(make(1, 16, 4, 56).validate());
  // 8 physical pages < ceil(8 * 1.07) = 9
  CHECK_THROWS_AS(make(1, 2, 4, 8).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(0, 16, 4, 8).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(1, 16, 1, 4).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make(1, 16, 4, 32, 0.9).validate(), std::invalid_argument);
}

TEST_CASE("geometry exact products do not round up") {
  // 100 * 1.07 = 107 exactly; 107 physical pages must be accepted
  DeviceGeometry g = make(1, 107, 1, 100);
  g.pages_per_block = 1;  // bypassed below; use valid ppb with matching count
  g = make(1, 107, 2, 100);
  CHECK(g.min_physical_pages() == 107);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("ppa codec round-trips") {
  DeviceGeometry g = make(2, 16, 4, 56);
  for (BlockId b : {0u, 5u, 31u}) {
    for (std::uint32_t p = 0; p < 4; ++p) {
      const Ppa ppa = g.encode_ppa(b, p);
      CHECK(g.ppa_block(ppa) == b);
      CHECK(g.ppa_page(ppa) == p);
    }
  }
  CHECK(g.block_channel(15) == 0);
  CHECK(g.block_channel(16) == 1);
}

TEST_CASE("fit_logical_pages saturates the op factor") {
  for (double op : {1.0, 1.07, 1.25}) {
    const std::uint64_t logical = fit_logical_pages(1, 256, 32, op);
    DeviceGeometry g = make(1, 256, 32, logical, op);
    CHECK_NOTHROW(g.validate());
    g.logical_pages = logical + 1;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  }
}
