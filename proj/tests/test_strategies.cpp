#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "ftlsim/scores.hpp"
#include "ftlsim/selector.hpp"
#include "ftlsim/strategies.hpp"

using namespace ftlsim;

namespace {

// Hand-driven block table for exercising selectors without a device.
struct FakeBlocks : BlockMetaView {
  std::vector<BlockMeta> metas;
  std::uint32_t np;

  explicit FakeBlocks(std::uint32_t pages) : np(pages) {}
  const BlockMeta& block_meta(BlockId b) const override { return metas[b]; }
  std::uint32_t pages_per_block() const override { return np; }

  BlockId add_used(std::uint32_t valid, Time filled_at, std::uint32_t erase_count = 0) {
    BlockMeta m;
    m.id = static_cast<BlockId>(metas.size());
    m.state = BlockState::Used;
    m.valid_count = valid;
    m.write_ptr = np;
    m.inv_count = np - valid;
    m.created_at = filled_at;
    m.filled_at = filled_at;
    m.erase_count = erase_count;
    metas.push_back(m);
    return m.id;
  }

  void register_with(VictimSelector& s, BlockId b) { s.on_block_full(b, metas[b].filled_at); }

  void invalidate(VictimSelector& s, BlockId b, Time now) {
    BlockMeta& m = metas[b];
    REQUIRE(m.valid_count > 0);
    --m.valid_count;
    ++m.inv_count;
    m.inv_time_sum += now;
    m.last_invalidation_at = now;
    s.on_page_invalidated(b, now);
  }
};

}  // namespace

TEST_CASE("greedy engines pick the global minimum with id tie-break") {
  FakeBlocks blocks(16);
  const BlockId b1 = blocks.add_used(5, 0);
  const BlockId b2 = blocks.add_used(2, 0);
  const BlockId b3 = blocks.add_used(9, 0);

  GreedyHeapSelector heap(blocks);
  GreedyBucketSelector bucket(blocks);
  for (auto* s : {static_cast<VictimSelector*>(&heap), static_cast<VictimSelector*>(&bucket)}) {
    for (BlockId b : {b1, b2, b3}) blocks.register_with(*s, b);
    CHECK(s->select_victim(10) == b2);
    s->on_block_erased(b2);
    CHECK(s->select_victim(11) == b1);  // 5 < 9
  }
}

TEST_CASE("greedy tie-break and free victim") {
  FakeBlocks blocks(8);
  const BlockId b1 = blocks.add_used(3, 0);
  const BlockId b2 = blocks.add_used(3, 0);
  GreedyHeapSelector heap(blocks);
  blocks.register_with(heap, b1);
  blocks.register_with(heap, b2);
  CHECK(heap.select_victim(1) == b1);  // equal counts, lower id

  FakeBlocks blocks2(8);
  const BlockId c1 = blocks2.add_used(0, 0);
  const BlockId c2 = blocks2.add_used(1, 0);
  GreedyBucketSelector bucket(blocks2);
  blocks2.register_with(bucket, c1);
  blocks2.register_with(bucket, c2);
  CHECK(bucket.select_victim(1) == c1);
}

TEST_CASE("greedy heap tracks decrease-key on invalidation") {
  FakeBlocks blocks(16);
  const BlockId b1 = blocks.add_used(5, 0);
  const BlockId b2 = blocks.add_used(8, 0);
  GreedyHeapSelector heap(blocks);
  blocks.register_with(heap, b1);
  blocks.register_with(heap, b2);
  for (int i = 0; i < 4; ++i) blocks.invalidate(heap, b2, 10 + i);
  CHECK(heap.select_victim(20) == b2);  // 4 < 5
  CHECK(heap.select_victim(21) == b2);  // selection is read-only
}

TEST_CASE("fifo follows registration order") {
  FakeBlocks blocks(8);
  const BlockId b3 = blocks.add_used(4, 0);
  const BlockId b1 = blocks.add_used(4, 0);
  FifoSelector fifo(blocks);
  CHECK(fifo.select_victim(0) == std::nullopt);
  blocks.register_with(fifo, b3);
  blocks.register_with(fifo, b1);
  CHECK(fifo.select_victim(1) == b3);
  fifo.on_block_erased(b3);
  CHECK(fifo.select_victim(2) == b1);
}

TEST_CASE("age-threshold filters then falls back") {
  FakeBlocks blocks(16);
  const BlockId b1 = blocks.add_used(9, 0);   // age 100 at now=100
  const BlockId b2 = blocks.add_used(1, 95);  // age 5
  AgeThresholdSelector sel(blocks, 50);
  blocks.register_with(sel, b1);
  blocks.register_with(sel, b2);
  CHECK(sel.select_victim(100) == b1);  // b2 filtered out by its youth

  // all blocks younger than tau -> global minimum fallback
  AgeThresholdSelector strict(blocks, 1000);
  blocks.register_with(strict, b1);
  blocks.register_with(strict, b2);
  CHECK(strict.select_victim(100) == b2);
}

TEST_CASE("age-threshold with tau=0 equals greedy") {
  FakeBlocks blocks(16);
  std::mt19937_64 rng(3);
  AgeThresholdSelector tau0(blocks, 0);
  GreedyHeapSelector greedy(blocks);
  for (int i = 0; i < 30; ++i) {
    const BlockId b = blocks.add_used(1 + static_cast<std::uint32_t>(rng() % 15), rng() % 50);
    blocks.register_with(tau0, b);
    blocks.register_with(greedy, b);
  }
  for (Time now = 100; now < 110; ++now) {
    auto a = tau0.select_victim(now);
    auto g = greedy.select_victim(now);
    REQUIRE(a.has_value());
    CHECK(blocks.metas[*a].valid_count == blocks.metas[*g].valid_count);
  }
}

TEST_CASE("linear-scan argmax strategies") {
  FakeBlocks blocks(4);
  const BlockId hi = blocks.add_used(1, 0);  // cb at now=10: 10*(3/2) = 15
  const BlockId lo = blocks.add_used(2, 8);  // cb at now=10: 2*(2/4) = 1
  CbSelector cb(blocks);
  blocks.register_with(cb, hi);
  blocks.register_with(cb, lo);
  CHECK(cb.select_victim(10) == hi);
  CHECK(cb.scan_cost_last_selection() == 2);

  // equal scores -> lowest id
  FakeBlocks even(4);
  const BlockId e1 = even.add_used(2, 0);
  const BlockId e2 = even.add_used(2, 0);
  CbSelector cb2(even);
  even.register_with(cb2, e1);
  even.register_with(cb2, e2);
  CHECK(cb2.select_victim(9) == e1);

  // free victim dominates
  const BlockId free_block = even.add_used(0, 5);
  even.register_with(cb2, free_block);
  CHECK(cb2.select_victim(9) == free_block);
}

TEST_CASE("cat and fegc argmax") {
  FakeBlocks blocks(4);
  const BlockId young_worn = blocks.add_used(1, 90, 9);  // norm(10)*3/10
  const BlockId old_fresh = blocks.add_used(1, 0, 0);    // norm(100)*3/1
  CatSelector cat(blocks);
  blocks.register_with(cat, young_worn);
  blocks.register_with(cat, old_fresh);
  CHECK(cat.select_victim(100) == old_fresh);

  FegcSelector fegc(blocks);
  FakeBlocks fb(4);
  const BlockId many_inv = fb.add_used(4, 0);
  const BlockId few_inv = fb.add_used(4, 0);
  FegcSelector sel(fb);
  fb.register_with(sel, many_inv);
  fb.register_with(sel, few_inv);
  fb.invalidate(sel, many_inv, 1);
  fb.invalidate(sel, many_inv, 2);
  fb.invalidate(sel, few_inv, 3);
  // cwa at 10: many = (10-1)+(10-2) = 17, few = 7
  CHECK(sel.select_victim(10) == many_inv);
  CHECK(sel.select_victim(10) == many_inv);
}

TEST_CASE("approxcb caches a batch of victims") {
  FakeBlocks blocks(8);
  std::vector<BlockId> ids;
  for (int i = 0; i < 10; ++i) ids.push_back(blocks.add_used(8 - i % 4, i));
  ApproxCbSelector sel(blocks, 30.0);  // floor(0.30 * 10) = 3
  for (BlockId b : ids) blocks.register_with(sel, b);

  auto v1 = sel.select_victim(100);
  REQUIRE(v1.has_value());
  CHECK(sel.scan_cost_last_selection() == 10);  // refill scans everything
  CHECK(sel.refill_count() == 1);
  CHECK(sel.cache_size() == 2);
  sel.on_block_erased(*v1);

  auto v2 = sel.select_victim(101);
  CHECK(sel.scan_cost_last_selection() <= 3);  // cached picks only
  sel.on_block_erased(*v2);
  auto v3 = sel.select_victim(102);
  CHECK(sel.scan_cost_last_selection() <= 3);
  sel.on_block_erased(*v3);
  CHECK(sel.refill_count() == 1);

  auto v4 = sel.select_victim(103);  // cache drained -> refill
  REQUIRE(v4.has_value());
  CHECK(sel.refill_count() == 2);
}

TEST_CASE("approxcb keeps fully invalidated cached blocks selectable") {
  FakeBlocks blocks(4);
  const BlockId a = blocks.add_used(2, 0);
  const BlockId b = blocks.add_used(3, 0);
  const BlockId c = blocks.add_used(3, 0);
  ApproxCbSelector sel(blocks, 100.0);  // cache everything
  for (BlockId x : {a, b, c}) blocks.register_with(sel, x);

  auto v1 = sel.select_victim(10);
  CHECK(v1 == a);
  sel.on_block_erased(a);

  // b is drained to zero valid pages while sitting in the cache
  blocks.invalidate(sel, b, 11);
  blocks.invalidate(sel, b, 11);
  blocks.invalidate(sel, b, 12);
  auto v2 = sel.select_victim(13);
  CHECK(v2 == b);  // infinite score wins from inside the cache
}

TEST_CASE("approxcb with a unit cache scans every time") {
  FakeBlocks blocks(8);
  ApproxCbSelector unit(blocks, 1.0, 1);
  CbSelector cb(blocks);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const BlockId b = blocks.add_used(1 + static_cast<std::uint32_t>(rng() % 8), rng() % 40);
    blocks.register_with(unit, b);
    blocks.register_with(cb, b);
  }
  for (Time now = 50; now < 60; ++now) {
    auto u = unit.select_victim(now);
    auto c = cb.select_victim(now);
    CHECK(u == c);
    CHECK(unit.scan_cost_last_selection() == cb.scan_cost_last_selection());
  }
}

TEST_CASE("strategy spec parsing") {
  CHECK(parse_strategy_spec("greedy").kind == StrategyKind::GreedyHeap);
  CHECK(parse_strategy_spec("const-greedy").kind == StrategyKind::GreedyBucket);
  CHECK(parse_strategy_spec("fifo").kind == StrategyKind::Fifo);
  CHECK(parse_strategy_spec("cb").kind == StrategyKind::Cb);
  CHECK(parse_strategy_spec("cat").kind == StrategyKind::Cat);
  CHECK(parse_strategy_spec("fegc").kind == StrategyKind::Fegc);
  CHECK(parse_strategy_spec("fastcb").kind == StrategyKind::FastCb);

  const StrategySpec approx = parse_strategy_spec("approxcb:q=2.5%");
  CHECK(approx.kind == StrategyKind::ApproxCb);
  CHECK(approx.q_pct == doctest::Approx(2.5));

  const StrategySpec abs = parse_strategy_spec("approxcb:abs=1");
  CHECK(abs.q_abs == 1);

  const StrategySpec age = parse_strategy_spec("age-threshold:tau=500");
  CHECK(age.kind == StrategyKind::AgeThreshold);
  CHECK(age.tau == 500);

  CHECK_THROWS_AS(parse_strategy_spec("nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy_spec("approxcb:q=0%"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy_spec("approxcb:x=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy_spec("age-threshold"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy_spec("cb:q=1"), std::invalid_argument);

  FakeBlocks blocks(8);
  for (const char* name :
       {"greedy", "const-greedy", "fifo", "cb", "cat", "fegc", "fastcb", "approxcb:q=1%",
        "age-threshold:tau=3"}) {
    auto sel = make_selector(parse_strategy_spec(name), blocks);
    CHECK(sel->select_victim(0) == std::nullopt);
  }
}

TEST_CASE("selectors reject events for unknown blocks") {
  FakeBlocks blocks(8);
  GreedyHeapSelector heap(blocks);
  GreedyBucketSelector bucket(blocks);
  FifoSelector fifo(blocks);
  blocks.add_used(4, 0);
  CHECK_THROWS_AS(heap.on_page_invalidated(0, 1), std::logic_error);
  CHECK_THROWS_AS(bucket.on_page_invalidated(0, 1), std::logic_error);
  CHECK_THROWS_AS(fifo.on_block_erased(0), std::logic_error);
}
