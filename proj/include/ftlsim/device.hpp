#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "ftlsim/geometry.hpp"
#include "ftlsim/types.hpp"

namespace ftlsim {

enum class PageState : std::uint8_t { Clean, Valid, Invalid };
enum class BlockState : std::uint8_t { Clean, Active, Used };

/// Per-block bookkeeping. Carries every quantity the selection strategies
/// score on: utilization, age bases, erase wear and the invalidation sums.
struct BlockMeta {
  BlockId id = 0;
  std::uint32_t channel = 0;
  BlockState state = BlockState::Clean;
  std::uint32_t valid_count = 0;
  std::uint32_t write_ptr = 0;
  std::uint32_t inv_count = 0;      // invalid pages since last erase
  std::uint64_t inv_time_sum = 0;   // sum of their invalidation timestamps
  std::uint32_t erase_count = 0;
  Time created_at = kNoTime;             // first write after erase
  Time filled_at = kNoTime;              // Active -> Used transition
  Time last_invalidation_at = kNoTime;   // kNoTime = none since fill

  /// Reference instant for the utilization-age score. A freshly filled block
  /// ages from its fill time; each later invalidation resets the base.
  Time age_base() const {
    return last_invalidation_at != kNoTime ? last_invalidation_at : filled_at;
  }
  Time age(Time now) const { return now - age_base(); }
  Time creation_age(Time now) const { return now - created_at; }
};

/// Read-only window onto block metadata, the only device access a victim
/// selector gets.
class BlockMetaView {
 public:
  virtual ~BlockMetaView() = default;
  virtual const BlockMeta& block_meta(BlockId block) const = 0;
  virtual std::uint32_t pages_per_block() const = 0;
};

/// Block life-cycle events, delivered synchronously after the device state
/// has been updated. on_block_erased fires after the block was reset; do not
/// read its metadata from that hook.
class DeviceListener {
 public:
  virtual ~DeviceListener() = default;
  virtual void on_block_full(BlockId /*block*/, Time /*now*/) {}
  virtual void on_page_invalidated(BlockId /*block*/, Time /*now*/) {}
  virtual void on_block_erased(BlockId /*block*/) {}
};

/// Logical-to-physical page map with its reverse. Both directions stay
/// mutually consistent; mapping an already mapped entry is a logic error.
struct MappingTable {
  std::vector<Ppa> forward;  // lpa -> ppa
  std::vector<Lpa> reverse;  // ppa -> lpa
  std::uint64_t mapped = 0;

  MappingTable(std::uint64_t logical_pages, std::uint64_t physical_pages)
      : forward(logical_pages, kNoPpa), reverse(physical_pages, kNoLpa) {}

  void map(Lpa lpa, Ppa ppa);
  void unmap(Lpa lpa, Ppa ppa);
  Ppa forward_lookup(Lpa lpa) const { return forward[lpa]; }
  Lpa reverse_lookup(Ppa ppa) const { return reverse[ppa]; }
};

/// Page-mapped flash device model: channels of blocks of pages, written
/// log-structured within a block, erased whole. Mutation is single-threaded.
class Device : public BlockMetaView {
 public:
  explicit Device(DeviceGeometry geometry);

  /// Appends one page to an Active block. The page index inside ppa must
  /// equal the block's write pointer. Fires on_block_full when it fills.
  void write_physical(Ppa ppa, Lpa lpa, Time now);

  /// Marks a valid page invalid and unmaps it. Fires on_page_invalidated
  /// when the owning block is Used.
  void invalidate(Ppa ppa, Time now);

  /// Erases a fully invalidated Used block back to Clean.
  void erase(BlockId block);

  /// Pops the oldest clean block of the channel and opens it for writing.
  BlockId take_clean_block(std::uint32_t channel);

  const DeviceGeometry& geometry() const { return geo_; }
  PageState page_state(Ppa ppa) const { return pages_[ppa]; }
  Ppa forward_lookup(Lpa lpa) const { return mapping_.forward_lookup(lpa); }
  Lpa reverse_lookup(Ppa ppa) const { return mapping_.reverse_lookup(ppa); }
  std::uint64_t mapped_pages() const { return mapping_.mapped; }
  std::uint32_t clean_blocks(std::uint32_t channel) const { return clean_count_[channel]; }
  std::uint64_t total_page_writes() const { return total_writes_; }
  std::uint64_t lifetime_writes(BlockId block) const { return lifetime_writes_[block]; }

  void set_listener(DeviceListener* listener) { listener_ = listener; }

  /// Full-sweep consistency check (page conservation, mapping soundness,
  /// per-block counter identities). Throws std::logic_error on violation.
  void check_invariants() const;

  // BlockMetaView
  const BlockMeta& block_meta(BlockId block) const override { return blocks_[block]; }
  std::uint32_t pages_per_block() const override { return geo_.pages_per_block; }

 private:
  DeviceGeometry geo_;
  std::vector<BlockMeta> blocks_;
  std::vector<PageState> pages_;
  MappingTable mapping_;
  std::vector<std::deque<BlockId>> clean_pool_;  // per channel, erase order
  std::vector<std::uint32_t> clean_count_;
  std::vector<std::uint64_t> lifetime_writes_;
  std::uint64_t total_writes_ = 0;
  DeviceListener* listener_ = nullptr;
};

}  // namespace ftlsim
