#include "ftlsim/fastcb.hpp"

#include <cassert>
#include <set>
#include <stdexcept>

namespace ftlsim {

namespace {

// Best-k collector for the rebuild scan; weakest entry sits at begin().
struct RankedEntry {
  Score score;
  BlockId id;
  bool operator<(const RankedEntry& o) const {
    if (score != o.score) return score < o.score;
    return id > o.id;  // among equal scores the lower id ranks higher
  }
};

}  // namespace

FastCbSelector::FastCbSelector(const BlockMetaView& blocks, std::uint64_t time_factor,
                               std::uint32_t class0_limit, std::uint32_t class0_target)
    : VictimSelector(blocks),
      time_factor_(time_factor),
      class0_limit_(class0_limit),
      class0_target_(class0_target) {
  if (time_factor_ == 0) throw std::invalid_argument("fastcb: time_factor must be > 0");
  if (class0_target_ == 0 || class0_target_ > class0_limit_)
    throw std::invalid_argument("fastcb: need 0 < class0_target <= class0_limit");
}

Time FastCbSelector::promotion_instant(BlockId block) const {
  const BlockMeta& meta = blocks_->block_meta(block);
  return fastcb_shift_time(meta.valid_count, blocks_->pages_per_block(), meta.age_base(),
                           threshold_);
}

void FastCbSelector::place_in_class1(BlockId block, Rec& rec) {
  const Time raw = promotion_instant(block);
  std::uint64_t key;
  if (raw == kNoTime || raw > kNoTime / time_factor_ - 1) {
    // Never fires for any reachable clock; park at the top of the key space,
    // probing downward for a free slot.
    key = kNoTime;
    while (class1_.count(key)) --key;
  } else {
    key = raw * time_factor_;
    while (class1_.count(key)) ++key;
  }
  class1_.emplace(key, block);
  rec.where = Where::Class1;
  rec.key = key;
  rec.gen = generation_;
}

void FastCbSelector::remove_from_class(BlockId block, Rec& rec) {
  switch (rec.where) {
    case Where::Class0: class0_.erase(block); break;
    case Where::Class1: class1_.erase(rec.key); break;
    case Where::Selected: break;
  }
}

void FastCbSelector::on_block_full(BlockId block, Time) {
  if (recs_.count(block)) throw std::logic_error("fastcb: duplicate registration");
  Rec& rec = recs_[block];
  place_in_class1(block, rec);
}

void FastCbSelector::on_page_invalidated(BlockId block, Time) {
  auto it = recs_.find(block);
  if (it == recs_.end()) throw std::logic_error("fastcb: unknown block");
  remove_from_class(block, it->second);
  place_in_class1(block, it->second);
}

void FastCbSelector::on_block_erased(BlockId block) {
  auto it = recs_.find(block);
  if (it == recs_.end()) throw std::logic_error("fastcb: unknown block");
  remove_from_class(block, it->second);
  recs_.erase(it);
}

void FastCbSelector::promote_due(Time now) {
  const std::uint64_t horizon =
      now > kNoTime / time_factor_ ? kNoTime : now * time_factor_ + (time_factor_ - 1);
  while (!class1_.empty()) {
    auto it = class1_.begin();
    if (it->first > horizon) break;
    const BlockId block = it->second;
    class1_.erase(it);
    Rec& rec = recs_[block];
    if (rec.gen != generation_) {
      // Key predates the last threshold raise; re-key against the current
      // threshold and only promote if it already qualifies under it.
      const Time raw = promotion_instant(block);
      if (raw != kNoTime && raw <= now) {
        rec.where = Where::Class0;
        class0_.insert(block);
      } else {
        place_in_class1(block, rec);
      }
    } else {
      rec.where = Where::Class0;
      class0_.insert(block);
    }
  }
}

std::optional<BlockId> FastCbSelector::select_victim(Time now) {
  scan_cost_ = 0;
  const std::uint32_t np = blocks_->pages_per_block();

  promote_due(now);

  if (class0_.empty() || class0_.size() > class0_limit_) {
    const bool overflow = !class0_.empty();
    if (class0_.empty() && class1_.empty()) return std::nullopt;
    if (overflow)
      ++rebuilds_overflow_;
    else
      ++rebuilds_empty_;

    // Full scan: retain the class0_target best blocks, merged with the
    // victim pick so every block is scored exactly once.
    std::set<RankedEntry> retained;
    auto scan = [&](BlockId b) {
      const BlockMeta& meta = blocks_->block_meta(b);
      const Score s = cb_value(meta.valid_count, np, meta.age(now));
      ++scan_cost_;
      RankedEntry e{s, b};
      if (retained.size() < class0_target_) {
        retained.insert(e);
      } else if (*retained.begin() < e) {
        retained.erase(retained.begin());
        retained.insert(e);
      }
    };
    for (BlockId b : class0_) scan(b);
    for (const auto& [key, b] : class1_) scan(b);

    const Score new_threshold = retained.begin()->score;
    if (!(new_threshold == threshold_)) {
      threshold_ = new_threshold;
      ++generation_;
    }

    std::unordered_set<BlockId> keep;
    for (const auto& e : retained) keep.insert(e.id);

    if (overflow) {
      // Raised threshold: demote the unretained members of class 0 with
      // fresh keys; class-1 keys stay and re-key lazily as they fire.
      std::vector<BlockId> demoted;
      for (BlockId b : class0_)
        if (!keep.count(b)) demoted.push_back(b);
      for (BlockId b : demoted) {
        class0_.erase(b);
        place_in_class1(b, recs_[b]);
      }
      for (BlockId b : keep) {
        Rec& rec = recs_[b];
        if (rec.where == Where::Class1) {
          class1_.erase(rec.key);
          rec.where = Where::Class0;
          class0_.insert(b);
        }
      }
    } else {
      // Lowered threshold: every existing key is now too late, so re-key
      // all of class 1 in this pass.
      std::vector<BlockId> others;
      for (const auto& [key, b] : class1_)
        if (!keep.count(b)) others.push_back(b);
      class1_.clear();
      for (BlockId b : keep) {
        recs_[b].where = Where::Class0;
        class0_.insert(b);
      }
      for (BlockId b : others) place_in_class1(b, recs_[b]);
    }

    const BlockId victim = retained.rbegin()->id;
    class0_.erase(victim);
    recs_[victim].where = Where::Selected;
    return victim;
  }

  // Normal path: argmax over class 0 only.
  std::optional<BlockId> best;
  Score best_score;
  for (BlockId b : class0_) {
    const BlockMeta& meta = blocks_->block_meta(b);
    const Score s = cb_value(meta.valid_count, np, meta.age(now));
    ++scan_cost_;
    if (!best || s > best_score || (s == best_score && b < *best)) {
      best = b;
      best_score = s;
    }
  }
  class0_.erase(*best);
  recs_[*best].where = Where::Selected;
  return best;
}

std::vector<std::uint64_t> FastCbSelector::class1_keys() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(class1_.size());
  for (const auto& [key, block] : class1_) keys.push_back(key);
  return keys;
}

}  // namespace ftlsim
