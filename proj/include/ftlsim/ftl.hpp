#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftlsim/device.hpp"
#include "ftlsim/metrics.hpp"
#include "ftlsim/selector.hpp"
#include "ftlsim/workload.hpp"

namespace ftlsim {

struct FtlConfig {
  DeviceGeometry geometry;
  std::string strategy = "cb";
  std::uint32_t hotness_levels = 3;
  std::uint32_t gc_low_watermark = 0;  // 0 -> hotness_levels + 1
  bool warm_up = true;
  std::uint64_t rng_seed = 1;
  std::uint64_t time_factor = 1024;
  std::uint64_t window = 0;  // 0 -> 1/100 of the expected page writes

  std::uint32_t effective_watermark() const {
    return gc_low_watermark != 0 ? gc_low_watermark : hotness_levels + 1;
  }
  void validate() const;  // throws std::invalid_argument
};

/// Raised when GC cannot restore the clean-block watermark: the selector has
/// nothing to offer or cleaning makes no headway. Signals an
/// overprovisioning/watermark misconfiguration, not a recoverable state.
class WedgedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GcEvent {
  std::uint32_t channel = 0;
  BlockId victim = kNoBlock;
  Time now = 0;
  std::uint64_t scan_cost = 0;
};

/// Page-mapped FTL over one Device: host write path with hotness-split
/// active blocks, round-robin channel placement, per-channel GC driven by a
/// clean-block watermark, and the warm-up and trace-replay loops.
///
/// The logical clock advances by one per host page write; GC copies do not
/// advance it. A run is strictly sequential.
class Ftl : private DeviceListener {
 public:
  Ftl(const FtlConfig& config, HotnessMap hotness);

  /// Replays a workload (after the configured warm-up), splitting each
  /// request into page writes. Out-of-range pages are dropped and counted.
  SimReport run(const std::vector<WriteRequest>& workload);

  /// One host page write at the next clock tick.
  void host_write(Lpa lpa);

  /// Sequential pass over the address space, then twice its size in
  /// seeded uniform random writes.
  void warm_up();

  /// Observer invoked after victim selection, before its pages move.
  using GcObserver = std::function<void(const Device&, const GcEvent&)>;
  void set_gc_observer(GcObserver observer) { observer_ = std::move(observer); }

  const Device& device() const { return device_; }
  const FtlConfig& config() const { return config_; }
  Time now() const { return clock_; }
  const VictimSelector& selector(std::uint32_t channel) const { return *selectors_[channel]; }

  /// Snapshot of the metrics collected so far (for driving the FTL manually;
  /// run() returns the same thing).
  SimReport report() const;

 private:
  // DeviceListener: routes block events to the owning channel's selector.
  void on_block_full(BlockId block, Time now) override;
  void on_page_invalidated(BlockId block, Time now) override;
  void on_block_erased(BlockId block) override;

  void gc_cycle(std::uint32_t channel);
  void ensure_clean(std::uint32_t channel);
  void append_to_active(std::uint32_t channel, std::uint32_t level, Lpa lpa);
  void snapshot_warmup_selector_stats();

  FtlConfig config_;
  Device device_;
  HotnessMap hotness_;
  std::vector<std::unique_ptr<VictimSelector>> selectors_;
  std::vector<std::vector<BlockId>> active_;  // [channel][hotness level]
  Recorder recorder_;
  Time clock_ = 0;
  std::uint64_t rr_counter_ = 0;
  std::uint64_t dropped_requests_ = 0;
  std::uint64_t dropped_pages_ = 0;
  std::uint64_t warmup_rebuild_empty_ = 0;
  std::uint64_t warmup_rebuild_overflow_ = 0;
  std::uint64_t warmup_refills_ = 0;
  GcObserver observer_;
};

}  // namespace ftlsim
