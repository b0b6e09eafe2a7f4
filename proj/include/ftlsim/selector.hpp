#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ftlsim/device.hpp"
#include "ftlsim/types.hpp"

namespace ftlsim {

/// Behavioral contract every GC strategy implements. One instance exists per
/// channel and hears only about that channel's blocks: a block is registered
/// when it fills, updated on every page invalidation while Used, and
/// deregistered when erased. select_victim never returns an erased block.
///
/// scan_cost_last_selection counts blocks whose score was evaluated during
/// the most recent select_victim call; constant-time strategies that never
/// score candidates report 1 per returned victim.
class VictimSelector {
 public:
  explicit VictimSelector(const BlockMetaView& blocks) : blocks_(&blocks) {}
  virtual ~VictimSelector() = default;

  virtual void on_block_full(BlockId block, Time now) = 0;
  virtual void on_page_invalidated(BlockId block, Time now) = 0;
  virtual void on_block_erased(BlockId block) = 0;
  virtual std::optional<BlockId> select_victim(Time now) = 0;
  virtual std::string_view name() const = 0;

  std::uint64_t scan_cost_last_selection() const { return scan_cost_; }

  // Structure-maintenance counters; nonzero only for the strategies that own
  // the corresponding machinery.
  virtual std::uint64_t rebuild_empty_count() const { return 0; }
  virtual std::uint64_t rebuild_overflow_count() const { return 0; }
  virtual std::uint64_t refill_count() const { return 0; }

 protected:
  const BlockMetaView* blocks_;
  std::uint64_t scan_cost_ = 0;
};

enum class StrategyKind {
  GreedyHeap,    // "greedy"
  GreedyBucket,  // "const-greedy"
  Fifo,          // "fifo"
  Cb,            // "cb"
  Cat,           // "cat"
  Fegc,          // "fegc"
  FastCb,        // "fastcb"
  ApproxCb,      // "approxcb:q=<pct>%" or "approxcb:abs=<n>"
  AgeThreshold,  // "age-threshold:tau=<n>"
};

struct StrategySpec {
  StrategyKind kind = StrategyKind::Cb;
  double q_pct = 1.0;          // ApproxCb cache size, percent of registered blocks
  std::uint64_t q_abs = 0;     // ApproxCb fixed cache size; overrides q_pct when > 0
  std::uint64_t tau = 0;       // AgeThreshold preselection age
  std::string text;            // original spec string
};

/// Parses a strategy spec string; throws std::invalid_argument on bad input.
StrategySpec parse_strategy_spec(const std::string& text);

std::unique_ptr<VictimSelector> make_selector(const StrategySpec& spec,
                                              const BlockMetaView& blocks,
                                              std::uint64_t time_factor = 1024);

}  // namespace ftlsim
