#include "ftlsim/ftl.hpp"

#include <cassert>
#include <cmath>

namespace ftlsim {

void FtlConfig::validate() const {
  geometry.validate();
  if (hotness_levels < 1) throw std::invalid_argument("config: hotness_levels must be >= 1");
  if (gc_low_watermark != 0 && gc_low_watermark < hotness_levels + 1)
    throw std::invalid_argument("config: gc_low_watermark must be >= hotness_levels + 1");
  if (geometry.blocks_per_channel < effective_watermark())
    throw std::invalid_argument("config: fewer blocks per channel than the GC watermark");
  if (time_factor == 0) throw std::invalid_argument("config: time_factor must be > 0");
  parse_strategy_spec(strategy);
}

Ftl::Ftl(const FtlConfig& config, HotnessMap hotness)
    : config_(config), device_((config.validate(), config.geometry)), hotness_(std::move(hotness)) {
  if (hotness_.level.empty())
    hotness_ = HotnessMap::uniform_cold(config_.geometry.logical_pages, config_.hotness_levels);
  if (hotness_.level.size() != config_.geometry.logical_pages)
    throw std::invalid_argument("hotness map does not cover the logical space");
  if (hotness_.levels != config_.hotness_levels)
    throw std::invalid_argument("hotness map level count does not match the config");

  const StrategySpec spec = parse_strategy_spec(config_.strategy);
  for (std::uint32_t c = 0; c < config_.geometry.channels; ++c)
    selectors_.push_back(make_selector(spec, device_, config_.time_factor));
  active_.assign(config_.geometry.channels,
                 std::vector<BlockId>(config_.hotness_levels, kNoBlock));
  recorder_.set_window(config_.window != 0 ? config_.window : 4096);
  device_.set_listener(this);
}

void Ftl::on_block_full(BlockId block, Time now) {
  selectors_[device_.geometry().block_channel(block)]->on_block_full(block, now);
}

void Ftl::on_page_invalidated(BlockId block, Time now) {
  selectors_[device_.geometry().block_channel(block)]->on_page_invalidated(block, now);
}

void Ftl::on_block_erased(BlockId block) {
  selectors_[device_.geometry().block_channel(block)]->on_block_erased(block);
}

void Ftl::append_to_active(std::uint32_t channel, std::uint32_t level, Lpa lpa) {
  BlockId& slot = active_[channel][level];
  if (slot == kNoBlock || device_.block_meta(slot).state != BlockState::Active)
    slot = device_.take_clean_block(channel);
  const Ppa ppa = device_.geometry().encode_ppa(slot, device_.block_meta(slot).write_ptr);
  device_.write_physical(ppa, lpa, clock_);
}

void Ftl::gc_cycle(std::uint32_t channel) {
  VictimSelector& selector = *selectors_[channel];
  const std::optional<BlockId> victim = selector.select_victim(clock_);
  recorder_.record_selection(selector.scan_cost_last_selection());
  if (!victim) {
    throw WedgedError("device wedged: no victim available on channel " +
                      std::to_string(channel) + " below the clean watermark");
  }
  assert(device_.geometry().block_channel(*victim) == channel);
  if (observer_)
    observer_(device_, GcEvent{channel, *victim, clock_, selector.scan_cost_last_selection()});

  const DeviceGeometry& geo = device_.geometry();
  const Ppa base = geo.encode_ppa(*victim, 0);
  for (std::uint32_t p = 0; p < geo.pages_per_block; ++p) {
    const Ppa ppa = base + p;
    if (device_.page_state(ppa) != PageState::Valid) continue;
    const Lpa lpa = device_.reverse_lookup(ppa);
    device_.invalidate(ppa, clock_);
    append_to_active(channel, hotness_.level_of(lpa), lpa);
    recorder_.record_gc_copy();
  }
  device_.erase(*victim);
  recorder_.record_erase(*victim);
}

void Ftl::ensure_clean(std::uint32_t channel) {
  const std::uint32_t watermark = config_.effective_watermark();
  // A cycle that frees a fully valid block makes no headway; cap the loop so
  // such configurations surface as an error instead of spinning.
  const std::uint64_t cap = 4ull * config_.geometry.blocks_per_channel + 16;
  std::uint64_t cycles = 0;
  while (device_.clean_blocks(channel) < watermark) {
    if (++cycles > cap)
      throw WedgedError("device wedged: GC makes no progress on channel " +
                        std::to_string(channel));
    gc_cycle(channel);
  }
}

void Ftl::host_write(Lpa lpa) {
  if (lpa >= config_.geometry.logical_pages)
    throw std::invalid_argument("host_write: lpa out of range");
  ++clock_;
  const std::uint32_t channel =
      static_cast<std::uint32_t>(rr_counter_++ % config_.geometry.channels);
  const Ppa old = device_.forward_lookup(lpa);
  if (old != kNoPpa) device_.invalidate(old, clock_);
  ensure_clean(channel);
  recorder_.record_host_write();
  append_to_active(channel, hotness_.level_of(lpa), lpa);
}

void Ftl::warm_up() {
  const std::uint64_t logical = config_.geometry.logical_pages;
  for (Lpa lpa = 0; lpa < logical; ++lpa) host_write(lpa);
  std::mt19937_64 rng(config_.rng_seed ^ 0x9E3779B97F4A7C15ull);
  for (std::uint64_t i = 0; i < 2 * logical; ++i) host_write(uniform_below(rng, logical));
}

void Ftl::snapshot_warmup_selector_stats() {
  warmup_rebuild_empty_ = warmup_rebuild_overflow_ = warmup_refills_ = 0;
  for (const auto& s : selectors_) {
    warmup_rebuild_empty_ += s->rebuild_empty_count();
    warmup_rebuild_overflow_ += s->rebuild_overflow_count();
    warmup_refills_ += s->refill_count();
  }
}

SimReport Ftl::run(const std::vector<WriteRequest>& workload) {
  const std::uint32_t page_size = config_.geometry.page_size;
  if (config_.window == 0) {
    std::uint64_t expected = 0;
    for (const auto& req : workload) {
      const Lpa first = req.byte_offset / page_size;
      const Lpa last = (req.byte_offset + req.length - 1) / page_size;
      expected += last - first + 1;
    }
    recorder_.set_window(std::max<std::uint64_t>(1, expected / 100));
  }

  if (config_.warm_up) {
    recorder_.set_warmup(true);
    warm_up();
    recorder_.set_warmup(false);
    snapshot_warmup_selector_stats();
  }

  for (const auto& req : workload) {
    if (req.length == 0) throw std::invalid_argument("run: zero-length request");
    const Lpa first = req.byte_offset / page_size;
    const Lpa last = (req.byte_offset + req.length - 1) / page_size;
    bool wrote = false;
    for (Lpa lpa = first; lpa <= last; ++lpa) {
      if (lpa >= config_.geometry.logical_pages) {
        ++dropped_pages_;
        continue;
      }
      host_write(lpa);
      wrote = true;
    }
    if (!wrote) ++dropped_requests_;
  }

  SimReport report = this->report();
  assert(device_.total_page_writes() == report.main.host_page_writes +
                                            report.main.gc_copy_writes +
                                            report.warmup.host_page_writes +
                                            report.warmup.gc_copy_writes);
  return report;
}

SimReport Ftl::report() const {
  SimReport report;
  report.strategy = config_.strategy;
  report.seed = config_.rng_seed;
  report.geometry = config_.geometry;
  report.main = recorder_.main();
  report.warmup = recorder_.warmup_counters();
  report.wa_final = report.main.wa();
  report.window = recorder_.window();
  report.wa_series = recorder_.series();
  report.dropped_requests = dropped_requests_;
  report.dropped_pages = dropped_pages_;

  std::uint64_t rebuild_empty = 0, rebuild_overflow = 0, refills = 0;
  for (const auto& s : selectors_) {
    rebuild_empty += s->rebuild_empty_count();
    rebuild_overflow += s->rebuild_overflow_count();
    refills += s->refill_count();
  }
  report.fastcb_rebuild_empty = rebuild_empty - warmup_rebuild_empty_;
  report.fastcb_rebuild_overflow = rebuild_overflow - warmup_rebuild_overflow_;
  report.approx_refills = refills - warmup_refills_;

  const std::uint64_t nblocks = config_.geometry.total_blocks();
  report.erase_histogram.resize(nblocks);
  double sum = 0.0;
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    const std::uint32_t e = device_.block_meta(static_cast<BlockId>(b)).erase_count;
    report.erase_histogram[b] = e;
    report.erase_total += e;
    sum += e;
  }
  if (report.erase_total > 0) {
    const double mean = sum / static_cast<double>(nblocks);
    double var = 0.0;
    for (std::uint32_t e : report.erase_histogram) {
      const double d = e - mean;
      var += d * d;
    }
    var /= static_cast<double>(nblocks);
    report.erase_cv = std::sqrt(var) / mean;
  }
  return report;
}

}  // namespace ftlsim
