#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ftlsim/scores.hpp"
#include "ftlsim/selector.hpp"

namespace ftlsim {

/// Utilization-age victim selection with the candidate search confined to a
/// small high-score class.
///
/// Registered blocks live in two disjoint classes. Class 0 holds the blocks
/// whose score has reached the adaptive threshold; victims come from it.
/// Class 1 holds the rest, ordered by precomputed promotion instants (the
/// time their score reaches the threshold if their utilization stays put),
/// stored as timestamps scaled by time_factor so colliding entries can take
/// adjacent keys. Each selection first promotes every Class-1 block whose
/// instant has passed; when Class 0 is empty or exceeds class0_limit, a full
/// scan retains the class0_target best blocks and resets the threshold to
/// the weakest retained score.
///
/// Class-1 keys are tagged with a threshold generation. When the threshold
/// rises, existing keys fire early and are re-keyed lazily as they surface;
/// when it falls (only the empty-class rebuild does that), Class 1 is
/// re-keyed in the same pass as the scan. Together with the exact rational
/// scores this keeps every Class-1 block strictly below the threshold and
/// every Class-0 block at or above it, so the selected victim is always the
/// global score argmax with the lowest id — the same block a full linear
/// scan would pick.
class FastCbSelector : public VictimSelector {
 public:
  explicit FastCbSelector(const BlockMetaView& blocks, std::uint64_t time_factor = 1024,
                          std::uint32_t class0_limit = 125, std::uint32_t class0_target = 25);

  void on_block_full(BlockId block, Time now) override;
  void on_page_invalidated(BlockId block, Time now) override;
  void on_block_erased(BlockId block) override;
  std::optional<BlockId> select_victim(Time now) override;
  std::string_view name() const override { return "fastcb"; }

  std::uint64_t rebuild_empty_count() const override { return rebuilds_empty_; }
  std::uint64_t rebuild_overflow_count() const override { return rebuilds_overflow_; }

  std::size_t class0_size() const { return class0_.size(); }
  std::size_t class1_size() const { return class1_.size(); }
  Score threshold() const { return threshold_; }
  std::uint64_t time_factor() const { return time_factor_; }
  std::vector<std::uint64_t> class1_keys() const;

 private:
  enum class Where : std::uint8_t { Class0, Class1, Selected };

  struct Rec {
    Where where = Where::Class1;
    std::uint64_t key = 0;   // class1 map key, valid while where == Class1
    std::uint64_t gen = 0;   // threshold generation the key was computed under
  };

  Time promotion_instant(BlockId block) const;
  void place_in_class1(BlockId block, Rec& rec);
  void remove_from_class(BlockId block, Rec& rec);
  void promote_due(Time now);

  std::unordered_map<BlockId, Rec> recs_;
  std::unordered_set<BlockId> class0_;
  std::map<std::uint64_t, BlockId> class1_;  // scaled promotion instant -> block
  Score threshold_{0, 1};
  std::uint64_t generation_ = 0;
  std::uint64_t time_factor_;
  std::uint32_t class0_limit_;
  std::uint32_t class0_target_;
  std::uint64_t rebuilds_empty_ = 0;
  std::uint64_t rebuilds_overflow_ = 0;
};

}  // namespace ftlsim
