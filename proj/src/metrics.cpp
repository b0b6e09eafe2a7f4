#include "ftlsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ftlsim {

void Recorder::record_host_write() {
  ++current().host_page_writes;
  if (warmup_) return;
  ++win_host_;
  if (win_host_ == window_) {
    series_.emplace_back(main_.host_page_writes,
                         static_cast<double>(win_host_ + win_copies_) /
                             static_cast<double>(win_host_));
    win_host_ = 0;
    win_copies_ = 0;
  }
}

void Recorder::record_gc_copy() {
  ++current().gc_copy_writes;
  if (!warmup_) ++win_copies_;
}

void Recorder::record_selection(std::uint64_t scan_cost) {
  PhaseCounters& c = current();
  ++c.gc_count;
  c.scan_cost_total += scan_cost;
}

void Recorder::record_erase(BlockId) { ++current().erases; }

std::vector<std::pair<std::uint64_t, double>> Recorder::series() const {
  auto out = series_;
  if (win_host_ > 0) {
    out.emplace_back(main_.host_page_writes,
                     static_cast<double>(win_host_ + win_copies_) /
                         static_cast<double>(win_host_));
  }
  return out;
}

double round_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

void export_report(const SimReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  nlohmann::ordered_json j;
  j["strategy"] = report.strategy;
  j["seed"] = report.seed;
  j["channels"] = report.geometry.channels;
  j["blocks_per_channel"] = report.geometry.blocks_per_channel;
  j["pages_per_block"] = report.geometry.pages_per_block;
  j["page_size"] = report.geometry.page_size;
  j["logical_pages"] = report.geometry.logical_pages;
  j["op_factor"] = round_sig6(report.geometry.op_factor);
  j["host_page_writes"] = report.main.host_page_writes;
  j["gc_copy_writes"] = report.main.gc_copy_writes;
  j["wa_final"] = round_sig6(report.wa_final);
  j["gc_count"] = report.main.gc_count;
  j["scan_cost_total"] = report.main.scan_cost_total;
  j["scan_cost_mean"] = round_sig6(report.main.scan_cost_mean());
  j["fastcb_rebuild_empty"] = report.fastcb_rebuild_empty;
  j["fastcb_rebuild_overflow"] = report.fastcb_rebuild_overflow;
  j["approx_refills"] = report.approx_refills;
  j["erase_total"] = report.erase_total;
  j["erase_cv"] = round_sig6(report.erase_cv);
  j["dropped_requests"] = report.dropped_requests;
  j["dropped_pages"] = report.dropped_pages;
  j["window"] = report.window;
  j["wa_series_rows"] = report.wa_series.size();
  j["warmup"] = {
      {"host_page_writes", report.warmup.host_page_writes},
      {"gc_copy_writes", report.warmup.gc_copy_writes},
      {"wa", round_sig6(report.warmup.wa())},
      {"gc_count", report.warmup.gc_count},
      {"scan_cost_total", report.warmup.scan_cost_total},
  };
  if (report.wall_clock_s) j["wall_clock_s"] = round_sig6(*report.wall_clock_s);
  if (report.host_writes_per_s) j["host_writes_per_s"] = round_sig6(*report.host_writes_per_s);

  write_file(fs::path(dir) / "summary.json", j.dump(2) + "\n");

  std::string series = "window_end_host_writes,wa\n";
  for (const auto& [end, wa] : report.wa_series) {
    series += std::to_string(end);
    series += ',';
    series += format_sig6(wa);
    series += '\n';
  }
  write_file(fs::path(dir) / "wa_series.csv", series);

  std::string hist = "block_id,erase_count\n";
  for (std::size_t b = 0; b < report.erase_histogram.size(); ++b) {
    hist += std::to_string(b);
    hist += ',';
    hist += std::to_string(report.erase_histogram[b]);
    hist += '\n';
  }
  write_file(fs::path(dir) / "erase_hist.csv", hist);
}

}  // namespace ftlsim
