#pragma once

#include <cstdint>
#include <list>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ftlsim/indexed_heap.hpp"
#include "ftlsim/scores.hpp"
#include "ftlsim/selector.hpp"

namespace ftlsim {

/// Least-valid-pages victim, kept in an indexed min-heap updated with a
/// decrease-key at every page invalidation.
class GreedyHeapSelector : public VictimSelector {
 public:
  using VictimSelector::VictimSelector;
  void on_block_full(BlockId block, Time now) override;
  void on_page_invalidated(BlockId block, Time now) override;
  void on_block_erased(BlockId block) override;
  std::optional<BlockId> select_victim(Time now) override;
  std::string_view name() const override { return "greedy"; }

 private:
  IndexedMinHeap heap_;
};

/// Least-valid-pages victim via an array of id sets, one per possible valid
/// count, scanned from zero. Selection cost is independent of block count.
class GreedyBucketSelector : public VictimSelector {
 public:
  explicit GreedyBucketSelector(const BlockMetaView& blocks);
  void on_block_full(BlockId block, Time now) override;
  void on_page_invalidated(BlockId block, Time now) override;
  void on_block_erased(BlockId block) override;
  std::optional<BlockId> select_victim(Time now) override;
  std::string_view name() const override { return "const-greedy"; }

 private:
  std::vector<std::set<BlockId>> buckets_;  // index = valid count
  std::unordered_map<BlockId, std::uint32_t> level_;
  std::size_t size_ = 0;
};

/// First registered, first selected.
class FifoSelector : public VictimSelector {
 public:
  using VictimSelector::VictimSelector;
  void on_block_full(BlockId block, Time now) override;
  void on_page_invalidated(BlockId /*block*/, Time /*now*/) override {}
  void on_block_erased(BlockId block) override;
  std::optional<BlockId> select_victim(Time now) override;
  std::string_view name() const override { return "fifo"; }

 private:
  std::list<BlockId> order_;
  std::unordered_map<BlockId, std::list<BlockId>::iterator> where_;
};

/// Shared scaffolding for the strategies that score every registered block
/// at each selection. Ties break toward the lowest block id.
class LinearScanSelector : public VictimSelector {
 public:
  using VictimSelector::VictimSelector;
  void on_block_full(BlockId block, Time /*now*/) override { registered_.insert(block); }
  void on_page_invalidated(BlockId /*block*/, Time /*now*/) override {}
  void on_block_erased(BlockId block) override { registered_.erase(block); }
  std::optional<BlockId> select_victim(Time now) override;

 protected:
  virtual Score score_of(const BlockMeta& meta, Time now) const = 0;
  std::set<BlockId> registered_;
};

class CbSelector : public LinearScanSelector {
 public:
  using LinearScanSelector::LinearScanSelector;
  std::string_view name() const override { return "cb"; }

 protected:
  Score score_of(const BlockMeta& meta, Time now) const override;
};

class CatSelector : public LinearScanSelector {
 public:
  using LinearScanSelector::LinearScanSelector;
  std::string_view name() const override { return "cat"; }

 protected:
  Score score_of(const BlockMeta& meta, Time now) const override;
};

class FegcSelector : public LinearScanSelector {
 public:
  using LinearScanSelector::LinearScanSelector;
  std::string_view name() const override { return "fegc"; }

 protected:
  Score score_of(const BlockMeta& meta, Time now) const override;
};

/// Preselects blocks older than tau (by creation age), then picks the one
/// with the fewest valid pages. Falls back to the global minimum when the
/// preselection is empty.
class AgeThresholdSelector : public VictimSelector {
 public:
  AgeThresholdSelector(const BlockMetaView& blocks, std::uint64_t tau)
      : VictimSelector(blocks), tau_(tau) {}
  void on_block_full(BlockId block, Time /*now*/) override { registered_.insert(block); }
  void on_page_invalidated(BlockId /*block*/, Time /*now*/) override {}
  void on_block_erased(BlockId block) override { registered_.erase(block); }
  std::optional<BlockId> select_victim(Time now) override;
  std::string_view name() const override { return "age-threshold"; }

 private:
  std::set<BlockId> registered_;
  std::uint64_t tau_;
};

/// Keeps a cache of upcoming victims: an empty cache triggers a full scan
/// that stores the q highest-scoring blocks, and the next q selections pick
/// (by current score) and evict from the cache alone. Cache membership never
/// changes between refills except by that eviction.
class ApproxCbSelector : public VictimSelector {
 public:
  /// q_abs > 0 pins the cache size; otherwise it is max(1, floor(q_pct% of
  /// the registered count)) at each refill.
  ApproxCbSelector(const BlockMetaView& blocks, double q_pct, std::uint64_t q_abs = 0)
      : VictimSelector(blocks), q_pct_(q_pct), q_abs_(q_abs) {}
  void on_block_full(BlockId block, Time /*now*/) override { registered_.insert(block); }
  void on_page_invalidated(BlockId /*block*/, Time /*now*/) override {}
  void on_block_erased(BlockId block) override;
  std::optional<BlockId> select_victim(Time now) override;
  std::string_view name() const override { return "approxcb"; }
  std::uint64_t refill_count() const override { return refills_; }

  std::size_t cache_size() const { return cache_.size(); }

 private:
  std::set<BlockId> registered_;
  std::unordered_set<BlockId> cache_;
  double q_pct_;
  std::uint64_t q_abs_;
  std::uint64_t refills_ = 0;
};

}  // namespace ftlsim
