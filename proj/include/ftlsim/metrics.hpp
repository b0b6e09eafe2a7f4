#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftlsim/geometry.hpp"
#include "ftlsim/types.hpp"

namespace ftlsim {

struct PhaseCounters {
  std::uint64_t host_page_writes = 0;
  std::uint64_t gc_copy_writes = 0;
  std::uint64_t gc_count = 0;
  std::uint64_t scan_cost_total = 0;
  std::uint64_t erases = 0;

  double wa() const {
    if (host_page_writes == 0) return 1.0;
    return static_cast<double>(host_page_writes + gc_copy_writes) /
           static_cast<double>(host_page_writes);
  }
  double scan_cost_mean() const {
    return gc_count == 0 ? 0.0
                         : static_cast<double>(scan_cost_total) / static_cast<double>(gc_count);
  }
};

/// End-of-run summary. Warm-up activity is kept in its own bucket and never
/// enters the reported write amplification; the erase histogram is lifetime
/// wear and spans both phases.
struct SimReport {
  std::string strategy;
  std::uint64_t seed = 0;
  DeviceGeometry geometry;

  PhaseCounters main;
  PhaseCounters warmup;

  double wa_final = 1.0;
  std::vector<std::pair<std::uint64_t, double>> wa_series;  // (window end, window WA)
  std::uint64_t window = 0;

  std::vector<std::uint32_t> erase_histogram;  // per block id
  std::uint64_t erase_total = 0;
  double erase_cv = 0.0;

  std::uint64_t fastcb_rebuild_empty = 0;
  std::uint64_t fastcb_rebuild_overflow = 0;
  std::uint64_t approx_refills = 0;

  std::uint64_t dropped_requests = 0;
  std::uint64_t dropped_pages = 0;

  std::optional<double> wall_clock_s;
  std::optional<double> host_writes_per_s;
};

/// Per-run accumulation of the counters behind SimReport. One recorder per
/// run; windowing applies to the main phase only.
class Recorder {
 public:
  void set_window(std::uint64_t window) { window_ = window; }
  std::uint64_t window() const { return window_; }
  void set_warmup(bool warmup) { warmup_ = warmup; }
  bool in_warmup() const { return warmup_; }

  void record_host_write();
  void record_gc_copy();
  void record_selection(std::uint64_t scan_cost);
  void record_erase(BlockId block);

  const PhaseCounters& main() const { return main_; }
  const PhaseCounters& warmup_counters() const { return warmup_counters_; }

  /// The window series including the trailing partial window, if any.
  std::vector<std::pair<std::uint64_t, double>> series() const;

 private:
  PhaseCounters& current() { return warmup_ ? warmup_counters_ : main_; }

  PhaseCounters main_;
  PhaseCounters warmup_counters_;
  bool warmup_ = false;
  std::uint64_t window_ = 4096;
  std::uint64_t win_host_ = 0;
  std::uint64_t win_copies_ = 0;
  std::vector<std::pair<std::uint64_t, double>> series_;
};

/// Rounds to six significant digits, the precision all exported and printed
/// floating values carry.
double round_sig6(double v);
std::string format_sig6(double v);

/// Writes summary.json, wa_series.csv and erase_hist.csv into dir (created
/// if needed). Re-exporting the same report yields byte-identical files.
void export_report(const SimReport& report, const std::string& dir);

}  // namespace ftlsim
