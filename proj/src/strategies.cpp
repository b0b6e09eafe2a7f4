#include "ftlsim/strategies.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ftlsim {

// ---------------------------------------------------------------------------
// Greedy, heap engine

void GreedyHeapSelector::on_block_full(BlockId block, Time) {
  heap_.insert(block, blocks_->block_meta(block).valid_count);
}

void GreedyHeapSelector::on_page_invalidated(BlockId block, Time) {
  heap_.update(block, blocks_->block_meta(block).valid_count);
}

void GreedyHeapSelector::on_block_erased(BlockId block) { heap_.erase(block); }

std::optional<BlockId> GreedyHeapSelector::select_victim(Time) {
  scan_cost_ = 0;
  if (heap_.empty()) return std::nullopt;
  scan_cost_ = 1;
  return heap_.min().second;
}

// ---------------------------------------------------------------------------
// Greedy, bucket engine

GreedyBucketSelector::GreedyBucketSelector(const BlockMetaView& blocks)
    : VictimSelector(blocks), buckets_(blocks.pages_per_block() + 1) {}

void GreedyBucketSelector::on_block_full(BlockId block, Time) {
  const std::uint32_t v = blocks_->block_meta(block).valid_count;
  if (!buckets_[v].insert(block).second)
    throw std::logic_error("const-greedy: duplicate registration");
  level_[block] = v;
  ++size_;
}

void GreedyBucketSelector::on_page_invalidated(BlockId block, Time) {
  auto it = level_.find(block);
  if (it == level_.end()) throw std::logic_error("const-greedy: unknown block");
  buckets_[it->second].erase(block);
  it->second = blocks_->block_meta(block).valid_count;
  buckets_[it->second].insert(block);
}

void GreedyBucketSelector::on_block_erased(BlockId block) {
  auto it = level_.find(block);
  if (it == level_.end()) throw std::logic_error("const-greedy: unknown block");
  buckets_[it->second].erase(block);
  level_.erase(it);
  --size_;
}

std::optional<BlockId> GreedyBucketSelector::select_victim(Time) {
  scan_cost_ = 0;
  if (size_ == 0) return std::nullopt;
  for (auto& bucket : buckets_) {
    if (!bucket.empty()) {
      scan_cost_ = 1;
      return *bucket.begin();
    }
  }
  return std::nullopt;  // unreachable while size_ > 0
}

// ---------------------------------------------------------------------------
// FIFO

void FifoSelector::on_block_full(BlockId block, Time) {
  if (where_.count(block)) throw std::logic_error("fifo: duplicate registration");
  order_.push_back(block);
  where_[block] = std::prev(order_.end());
}

void FifoSelector::on_block_erased(BlockId block) {
  auto it = where_.find(block);
  if (it == where_.end()) throw std::logic_error("fifo: unknown block");
  order_.erase(it->second);
  where_.erase(it);
}

std::optional<BlockId> FifoSelector::select_victim(Time) {
  scan_cost_ = 0;
  if (order_.empty()) return std::nullopt;
  scan_cost_ = 1;
  return order_.front();
}

// ---------------------------------------------------------------------------
// Linear-scan argmax strategies

std::optional<BlockId> LinearScanSelector::select_victim(Time now) {
  scan_cost_ = 0;
  std::optional<BlockId> best;
  Score best_score;
  for (BlockId b : registered_) {
    const Score s = score_of(blocks_->block_meta(b), now);
    ++scan_cost_;
    if (!best || s > best_score) {
      best = b;
      best_score = s;
    }
  }
  return best;
}

Score CbSelector::score_of(const BlockMeta& meta, Time now) const {
  return cb_value(meta.valid_count, blocks_->pages_per_block(), meta.age(now));
}

Score CatSelector::score_of(const BlockMeta& meta, Time now) const {
  return cat_value(meta.valid_count, blocks_->pages_per_block(), meta.creation_age(now),
                   meta.erase_count);
}

Score FegcSelector::score_of(const BlockMeta& meta, Time now) const {
  return Score{cwa_value(meta.inv_count, meta.inv_time_sum, now), 1};
}

// ---------------------------------------------------------------------------
// Age threshold

std::optional<BlockId> AgeThresholdSelector::select_victim(Time now) {
  scan_cost_ = 0;
  std::optional<BlockId> best_old;     // min valid among blocks older than tau
  std::optional<BlockId> best_any;     // fallback: global min valid
  std::uint32_t old_valid = 0, any_valid = 0;
  for (BlockId b : registered_) {
    const BlockMeta& meta = blocks_->block_meta(b);
    ++scan_cost_;
    if (!best_any || meta.valid_count < any_valid) {
      best_any = b;
      any_valid = meta.valid_count;
    }
    if (meta.creation_age(now) > tau_ && (!best_old || meta.valid_count < old_valid)) {
      best_old = b;
      old_valid = meta.valid_count;
    }
  }
  return best_old ? best_old : best_any;
}

// ---------------------------------------------------------------------------
// Approximative CB

namespace {

// Bounded best-k collector: keeps the k largest (score, lowest-id-wins)
// entries, evicting the weakest.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) {}

  void offer(Score s, BlockId id) {
    if (k_ == 0) return;
    if (entries_.size() < k_) {
      entries_.insert({s, id});
      return;
    }
    auto weakest = entries_.begin();
    if (s > weakest->score || (s == weakest->score && id < weakest->id)) {
      entries_.erase(weakest);
      entries_.insert({s, id});
    }
  }

  struct Entry {
    Score score;
    BlockId id;
    bool operator<(const Entry& o) const {
      // weakest first: lower score, then higher id
      if (score != o.score) return score < o.score;
      return id > o.id;
    }
  };

  const std::set<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  const Entry& weakest() const { return *entries_.begin(); }
  const Entry& best() const { return *entries_.rbegin(); }

 private:
  std::size_t k_;
  std::set<Entry> entries_;
};

}  // namespace

void ApproxCbSelector::on_block_erased(BlockId block) {
  registered_.erase(block);
  cache_.erase(block);
}

std::optional<BlockId> ApproxCbSelector::select_victim(Time now) {
  scan_cost_ = 0;
  const std::uint32_t np = blocks_->pages_per_block();

  if (cache_.empty()) {
    if (registered_.empty()) return std::nullopt;
    ++refills_;
    std::uint64_t q = q_abs_;
    if (q == 0) {
      q = static_cast<std::uint64_t>(
          std::floor(q_pct_ / 100.0 * static_cast<double>(registered_.size())));
      if (q < 1) q = 1;
    }
    TopK top(q);
    for (BlockId b : registered_) {
      const BlockMeta& meta = blocks_->block_meta(b);
      top.offer(cb_value(meta.valid_count, np, meta.age(now)), b);
      ++scan_cost_;
    }
    const BlockId victim = top.best().id;
    for (const auto& e : top.entries())
      if (e.id != victim) cache_.insert(e.id);
    return victim;
  }

  std::optional<BlockId> best;
  Score best_score;
  for (BlockId b : cache_) {
    const BlockMeta& meta = blocks_->block_meta(b);
    const Score s = cb_value(meta.valid_count, np, meta.age(now));
    ++scan_cost_;
    if (!best || s > best_score || (s == best_score && b < *best)) {
      best = b;
      best_score = s;
    }
  }
  cache_.erase(*best);
  return best;
}

}  // namespace ftlsim
