#include "ftlsim/device.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace ftlsim {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::logic_error(what); }

}  // namespace

void MappingTable::map(Lpa lpa, Ppa ppa) {
  if (forward[lpa] != kNoPpa) fail("mapping: lpa already mapped");
  if (reverse[ppa] != kNoLpa) fail("mapping: ppa already mapped");
  forward[lpa] = ppa;
  reverse[ppa] = lpa;
  ++mapped;
}

void MappingTable::unmap(Lpa lpa, Ppa ppa) {
  if (forward[lpa] != ppa || reverse[ppa] != lpa) fail("mapping: inconsistent unmap");
  forward[lpa] = kNoPpa;
  reverse[ppa] = kNoLpa;
  --mapped;
}

Device::Device(DeviceGeometry geometry)
    : geo_(geometry),
      mapping_((geometry.validate(), geometry.logical_pages), geometry.total_pages()) {
  const std::uint64_t nblocks = geo_.total_blocks();
  blocks_.resize(nblocks);
  pages_.assign(geo_.total_pages(), PageState::Clean);
  lifetime_writes_.assign(nblocks, 0);
  clean_pool_.resize(geo_.channels);
  clean_count_.assign(geo_.channels, 0);
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    blocks_[b].id = static_cast<BlockId>(b);
    blocks_[b].channel = geo_.block_channel(static_cast<BlockId>(b));
    clean_pool_[blocks_[b].channel].push_back(static_cast<BlockId>(b));
    ++clean_count_[blocks_[b].channel];
  }
}

void Device::write_physical(Ppa ppa, Lpa lpa, Time now) {
  if (ppa >= pages_.size()) fail("write_physical: ppa out of range");
  if (lpa >= geo_.logical_pages) fail("write_physical: lpa out of range");
  BlockMeta& blk = blocks_[geo_.ppa_block(ppa)];
  if (blk.state != BlockState::Active) fail("write_physical: block not active");
  if (geo_.ppa_page(ppa) != blk.write_ptr)
    fail("write_physical: out-of-order page write within block");
  assert(pages_[ppa] == PageState::Clean);

  pages_[ppa] = PageState::Valid;
  mapping_.map(lpa, ppa);
  if (blk.write_ptr == 0) blk.created_at = now;
  ++blk.valid_count;
  ++blk.write_ptr;
  ++total_writes_;
  ++lifetime_writes_[blk.id];
  assert(blk.inv_count + blk.valid_count == blk.write_ptr);

  if (blk.write_ptr == geo_.pages_per_block) {
    blk.state = BlockState::Used;
    blk.filled_at = now;
    blk.last_invalidation_at = kNoTime;  // ages from the fill from here on
    if (listener_) listener_->on_block_full(blk.id, now);
  }
}

void Device::invalidate(Ppa ppa, Time now) {
  if (ppa >= pages_.size()) fail("invalidate: ppa out of range");
  if (pages_[ppa] != PageState::Valid) fail("invalidate: page not valid");
  BlockMeta& blk = blocks_[geo_.ppa_block(ppa)];
  Lpa lpa = mapping_.reverse_lookup(ppa);
  assert(lpa != kNoLpa);
  mapping_.unmap(lpa, ppa);
  pages_[ppa] = PageState::Invalid;
  --blk.valid_count;
  ++blk.inv_count;
  blk.inv_time_sum += now;
  blk.last_invalidation_at = now;
  assert(blk.inv_count + blk.valid_count == blk.write_ptr);
  if (blk.state == BlockState::Used && listener_) listener_->on_page_invalidated(blk.id, now);
}

void Device::erase(BlockId block) {
  if (block >= blocks_.size()) fail("erase: block out of range");
  BlockMeta& blk = blocks_[block];
  if (blk.state != BlockState::Used) fail("erase: block not in Used state");
  if (blk.valid_count != 0) fail("erase: block still has valid pages");

  const Ppa base = geo_.encode_ppa(block, 0);
  for (std::uint32_t p = 0; p < geo_.pages_per_block; ++p) pages_[base + p] = PageState::Clean;
  ++blk.erase_count;
  blk.state = BlockState::Clean;
  blk.valid_count = 0;
  blk.write_ptr = 0;
  blk.inv_count = 0;
  blk.inv_time_sum = 0;
  blk.created_at = kNoTime;
  blk.filled_at = kNoTime;
  blk.last_invalidation_at = kNoTime;
  clean_pool_[blk.channel].push_back(block);
  ++clean_count_[blk.channel];
  if (listener_) listener_->on_block_erased(block);
}

BlockId Device::take_clean_block(std::uint32_t channel) {
  if (channel >= geo_.channels) fail("take_clean_block: bad channel");
  if (clean_pool_[channel].empty()) fail("take_clean_block: no clean block on channel");
  BlockId b = clean_pool_[channel].front();
  clean_pool_[channel].pop_front();
  --clean_count_[channel];
  blocks_[b].state = BlockState::Active;
  return b;
}

void Device::check_invariants() const {
  std::uint64_t total_valid = 0;
  for (const BlockMeta& blk : blocks_) {
    const Ppa base = geo_.encode_ppa(blk.id, 0);
    std::uint32_t clean = 0, valid = 0, invalid = 0;
    for (std::uint32_t p = 0; p < geo_.pages_per_block; ++p) {
      switch (pages_[base + p]) {
        case PageState::Clean: ++clean; break;
        case PageState::Valid: ++valid; break;
        case PageState::Invalid: ++invalid; break;
      }
    }
    if (clean + valid + invalid != geo_.pages_per_block)
      fail("invariant: page states lost");  // unreachable by construction
    if (valid != blk.valid_count) fail("invariant: valid_count mismatch");
    if (invalid != blk.inv_count) fail("invariant: inv_count mismatch");
    if (blk.inv_count + blk.valid_count != blk.write_ptr)
      fail("invariant: inv_count + valid_count != write_ptr");
    if (blk.state == BlockState::Used && blk.write_ptr != geo_.pages_per_block)
      fail("invariant: Used block not fully written");
    if (blk.state == BlockState::Clean && (blk.write_ptr != 0 || valid != 0 || invalid != 0))
      fail("invariant: Clean block with written pages");
    total_valid += valid;
  }
  if (total_valid != mapping_.mapped) fail("invariant: mapped lpas != sum of valid counts");
  std::uint64_t fwd = 0;
  for (Lpa l = 0; l < geo_.logical_pages; ++l) {
    Ppa p = mapping_.forward[l];
    if (p == kNoPpa) continue;
    ++fwd;
    if (mapping_.reverse[p] != l) fail("invariant: forward/reverse disagree");
    if (pages_[p] != PageState::Valid) fail("invariant: mapped ppa not valid");
  }
  if (fwd != mapping_.mapped) fail("invariant: mapped count drifted");
  for (std::uint32_t c = 0; c < geo_.channels; ++c) {
    if (clean_pool_[c].size() != clean_count_[c]) fail("invariant: clean pool count drifted");
  }
}

}  // namespace ftlsim
