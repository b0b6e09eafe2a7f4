#include "cli/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ftlsim/geometry.hpp"
#include "ftlsim/selector.hpp"

namespace ftlsim::cli {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void spec_fail(const std::string& why) { throw std::invalid_argument(why); }

std::uint64_t parse_size_bytes(const std::string& text) {
  if (text.empty()) spec_fail("empty size");
  std::size_t used = 0;
  const std::uint64_t value = std::stoull(text, &used);
  std::string suffix = text.substr(used);
  std::uint64_t mult = 1;
  if (!suffix.empty()) {
    switch (std::tolower(suffix[0])) {
      case 'k': mult = 1ull << 10; break;
      case 'm': mult = 1ull << 20; break;
      case 'g': mult = 1ull << 30; break;
      case 't': mult = 1ull << 40; break;
      default: spec_fail("bad size suffix in '" + text + "'");
    }
    suffix.erase(0, 1);
    if (!suffix.empty() && suffix != "i" && suffix != "iB" && suffix != "B" && suffix != "b")
      spec_fail("bad size suffix in '" + text + "'");
  }
  return value * mult;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

struct WorkloadParams {
  std::string kind;
  std::uint64_t writes = 0;
  std::uint32_t req_pages = 1;
  double zipf_s = 0.99;
  std::vector<HotspotRegion> regions;
};

WorkloadParams parse_workload_spec(const std::string& text) {
  WorkloadParams params;
  const auto colon = text.find(':');
  params.kind = text.substr(0, colon);
  if (params.kind != "uniform" && params.kind != "hotspot" && params.kind != "zipf")
    spec_fail("workload '" + text + "': unknown kind (uniform|hotspot|zipf)");
  if (colon == std::string::npos) spec_fail("workload '" + text + "': missing parameters");
  for (const std::string& kv : split(text.substr(colon + 1), ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) spec_fail("workload '" + text + "': expected key=value");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "writes") {
      params.writes = std::stoull(value);
    } else if (key == "req_pages") {
      params.req_pages = static_cast<std::uint32_t>(std::stoul(value));
    } else if (key == "s") {
      params.zipf_s = std::stod(value);
    } else if (key == "regions") {
      for (const std::string& region : split(value, '+')) {
        const auto parts = split(region, '/');
        if (parts.size() != 2) spec_fail("workload region '" + region + "': expected addr/access");
        params.regions.push_back(HotspotRegion{std::stod(parts[0]), std::stod(parts[1])});
      }
    } else {
      spec_fail("workload '" + text + "': unknown key '" + key + "'");
    }
  }
  if (params.writes == 0) spec_fail("workload '" + text + "': writes must be > 0");
  if (params.kind == "hotspot" && params.regions.empty())
    spec_fail("workload '" + text + "': hotspot needs regions");
  return params;
}

}  // namespace

void finalize_spec(RunSpec& spec) {
  DeviceGeometry& geo = spec.config.geometry;
  if (spec.logical_capacity != 0) {
    geo.logical_pages = spec.logical_capacity / geo.page_size;
  } else if (geo.logical_pages == 0) {
    geo.logical_pages =
        fit_logical_pages(geo.channels, geo.blocks_per_channel, geo.pages_per_block,
                          geo.op_factor);
  }
  if (spec.workload.empty() && spec.trace.empty())
    spec_fail("either --workload or --trace is required");
  if (!spec.workload.empty() && !spec.trace.empty())
    spec_fail("--workload and --trace are mutually exclusive");
  if (spec.trace_format != "canonical" && spec.trace_format != "spc")
    spec_fail("--trace-format must be canonical or spc");
  spec.config.validate();
}

std::vector<WriteRequest> build_workload(const RunSpec& spec) {
  const DeviceGeometry& geo = spec.config.geometry;
  if (!spec.trace.empty()) {
    std::ifstream in(spec.trace);
    if (!in) throw std::runtime_error("cannot open trace file: " + spec.trace);
    return spec.trace_format == "spc" ? import_spc(in, spec.lba_unit) : parse_canonical(in);
  }
  const WorkloadParams params = parse_workload_spec(spec.workload);
  if (params.kind == "uniform")
    return gen_uniform(params.writes, params.req_pages, geo.logical_pages, geo.page_size,
                       spec.config.rng_seed);
  if (params.kind == "hotspot")
    return gen_hotspot(params.regions, params.writes, params.req_pages, geo.logical_pages,
                       geo.page_size, spec.config.rng_seed);
  return gen_zipf(params.zipf_s, params.writes, params.req_pages, geo.logical_pages,
                  geo.page_size, spec.config.rng_seed);
}

RunOutcome execute_run(const RunSpec& spec, bool timed) {
  RunSpec local = spec;
  finalize_spec(local);
  const auto workload = build_workload(local);
  HotnessMap hotness = precharacterize(workload, local.config.geometry.logical_pages,
                                       local.config.geometry.page_size,
                                       local.config.hotness_levels);
  Ftl ftl(local.config, std::move(hotness));
  const auto start = std::chrono::steady_clock::now();
  SimReport report = ftl.run(workload);
  const auto stop = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.wall_clock_s = std::chrono::duration<double>(stop - start).count();
  if (timed) {
    report.wall_clock_s = outcome.wall_clock_s;
    if (outcome.wall_clock_s > 0.0)
      report.host_writes_per_s =
          static_cast<double>(report.main.host_page_writes) / outcome.wall_clock_s;
  }
  outcome.report = std::move(report);
  return outcome;
}

namespace {

int cmd_run(const RunSpec& spec) {
  const RunOutcome outcome = execute_run(spec);
  export_report(outcome.report, spec.out_dir);
  const SimReport& r = outcome.report;
  std::cout << "strategy=" << r.strategy << " wa_final=" << format_sig6(r.wa_final)
            << " gc_count=" << r.main.gc_count
            << " scan_cost_mean=" << format_sig6(r.main.scan_cost_mean())
            << " out=" << spec.out_dir << "\n";
  return 0;
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return out;
}

struct SweepPoint {
  std::string label;
  RunSpec spec;
};

std::vector<SweepPoint> make_sweep_points(const RunSpec& base, const std::string& axis,
                                          const std::vector<std::string>& values) {
  std::vector<SweepPoint> points;
  for (const std::string& value : values) {
    SweepPoint point{axis + "=" + value, base};
    if (axis == "strategy") {
      point.spec.config.strategy = value;
    } else if (axis == "q") {
      std::string q = value;
      if (!q.empty() && q.back() == '%') q.pop_back();
      point.spec.config.strategy = "approxcb:q=" + q + "%";
    } else if (axis == "pages-per-block") {
      DeviceGeometry& geo = point.spec.config.geometry;
      const std::uint64_t physical_per_channel =
          static_cast<std::uint64_t>(geo.blocks_per_channel) * geo.pages_per_block;
      const auto ppb = static_cast<std::uint32_t>(std::stoul(value));
      if (ppb == 0 || physical_per_channel % ppb != 0)
        spec_fail("pages-per-block " + value + " does not divide the per-channel capacity");
      geo.pages_per_block = ppb;
      geo.blocks_per_channel = static_cast<std::uint32_t>(physical_per_channel / ppb);
      if (point.spec.logical_capacity == 0) geo.logical_pages = 0;  // refit below
    } else if (axis == "capacity") {
      point.spec.logical_capacity = parse_size_bytes(value);
      DeviceGeometry& geo = point.spec.config.geometry;
      const std::uint64_t logical = point.spec.logical_capacity / geo.page_size;
      DeviceGeometry probe = geo;
      probe.logical_pages = logical;
      const std::uint64_t needed = probe.min_physical_pages();
      const std::uint64_t per_channel =
          static_cast<std::uint64_t>(geo.channels) * geo.pages_per_block;
      geo.blocks_per_channel =
          static_cast<std::uint32_t>((needed + per_channel - 1) / per_channel);
    } else {
      spec_fail("unknown sweep axis '" + axis + "'");
    }
    points.push_back(std::move(point));
  }
  return points;
}

int cmd_sweep(const RunSpec& base, const std::string& axis,
              const std::vector<std::string>& values) {
  const auto points = make_sweep_points(base, axis, values);
  struct Result {
    bool ok = false;
    std::string error;
    SimReport report;
  };
  std::vector<Result> results(points.size());

  std::atomic<std::size_t> next{0};
  const std::size_t workers =
      std::min<std::size_t>(points.size(), std::max(1u, std::thread::hardware_concurrency()));
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        RunSpec spec = points[i].spec;
        spec.out_dir = (fs::path(base.out_dir) / sanitize(points[i].label)).string();
        const RunOutcome outcome = execute_run(spec);
        export_report(outcome.report, spec.out_dir);
        results[i].report = outcome.report;
        results[i].ok = true;
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  fs::create_directories(base.out_dir);
  std::ofstream csv(fs::path(base.out_dir) / "sweep.csv", std::ios::binary | std::ios::trunc);
  csv << "point,wa_final,scan_cost_mean,gc_count\n";
  bool failed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!results[i].ok) {
      failed = true;
      std::cerr << "sweep point " << points[i].label << " failed: " << results[i].error << "\n";
      continue;
    }
    const SimReport& r = results[i].report;
    csv << points[i].label << ',' << format_sig6(r.wa_final) << ','
        << format_sig6(r.main.scan_cost_mean()) << ',' << r.main.gc_count << "\n";
    std::cout << points[i].label << " wa_final=" << format_sig6(r.wa_final)
              << " scan_cost_mean=" << format_sig6(r.main.scan_cost_mean())
              << " gc_count=" << r.main.gc_count << "\n";
  }
  return failed ? 1 : 0;
}

int cmd_bench(const RunSpec& base, const std::vector<std::string>& strategies,
              std::uint32_t repeats) {
  if (repeats < 3) spec_fail("--repeats must be >= 3");
  if (std::find(strategies.begin(), strategies.end(), "cb") == strategies.end())
    spec_fail("bench needs 'cb' in the strategy list as the speedup baseline");

  struct BenchRow {
    std::string strategy;
    double median_wall = 0.0;
    double writes_per_s = 0.0;
    double wa_final = 0.0;
    double scan_cost_mean = 0.0;
    std::uint64_t gc_count = 0;
  };
  std::vector<BenchRow> rows;

  for (const std::string& strategy : strategies) {
    RunSpec spec = base;
    spec.config.strategy = strategy;
    std::vector<double> walls;
    SimReport first;
    for (std::uint32_t r = 0; r < repeats; ++r) {
      const RunOutcome outcome = execute_run(spec, /*timed=*/true);
      walls.push_back(outcome.wall_clock_s);
      if (r == 0) {
        first = outcome.report;
      } else if (outcome.report.wa_final != first.wa_final ||
                 outcome.report.main.gc_count != first.main.gc_count) {
        throw std::runtime_error("bench: simulation outputs differ across repeats for " +
                                 strategy);
      }
    }
    std::sort(walls.begin(), walls.end());
    const double median = walls[walls.size() / 2];
    BenchRow row;
    row.strategy = strategy;
    row.median_wall = median;
    row.writes_per_s =
        median > 0.0 ? static_cast<double>(first.main.host_page_writes) / median : 0.0;
    row.wa_final = first.wa_final;
    row.scan_cost_mean = first.main.scan_cost_mean();
    row.gc_count = first.main.gc_count;
    rows.push_back(row);

    first.wall_clock_s = median;
    first.host_writes_per_s = row.writes_per_s;
    export_report(first, (fs::path(base.out_dir) / sanitize(strategy)).string());
  }

  double cb_wall = 0.0;
  for (const auto& row : rows)
    if (row.strategy == "cb") cb_wall = row.median_wall;

  fs::create_directories(base.out_dir);
  std::ofstream csv(fs::path(base.out_dir) / "bench.csv", std::ios::binary | std::ios::trunc);
  csv << "strategy,median_wall_s,host_writes_per_s,speedup_vs_cb,wa_final,scan_cost_mean,"
         "gc_count\n";
  std::cout << "strategy          wall[s]     writes/s    speedup_vs_cb  wa_final\n";
  for (const auto& row : rows) {
    const double speedup = row.median_wall > 0.0 ? cb_wall / row.median_wall : 0.0;
    csv << row.strategy << ',' << format_sig6(row.median_wall) << ','
        << format_sig6(row.writes_per_s) << ',' << format_sig6(speedup) << ','
        << format_sig6(row.wa_final) << ',' << format_sig6(row.scan_cost_mean) << ','
        << row.gc_count << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-11s %-11s %-14s %s\n", row.strategy.c_str(),
                  format_sig6(row.median_wall).c_str(), format_sig6(row.writes_per_s).c_str(),
                  format_sig6(speedup).c_str(), format_sig6(row.wa_final).c_str());
    std::cout << line;
  }
  return 0;
}

struct OptionBinding {
  std::string key;
  std::function<void(const std::string&)> set;
};

struct CommonOptions {
  std::string config_path;
  std::vector<OptionBinding> bindings;
};

template <typename T>
void bind_number(std::vector<OptionBinding>& bindings, const std::string& key, T& target) {
  bindings.push_back({key, [&target](const std::string& v) {
                        target = static_cast<T>(std::stoull(v));
                      }});
}

void add_common_options(CLI::App* cmd, RunSpec& spec, std::string& warmup,
                        std::string& capacity, CommonOptions& common) {
  auto bind_string = [&](const std::string& key, std::string& target) {
    common.bindings.push_back({key, [&target](const std::string& v) { target = v; }});
  };

  cmd->add_option("--config", common.config_path,
                  "flat key=value config file (# comments); flags override it");
  cmd->add_option("--strategy", spec.config.strategy,
                  "victim selection strategy (greedy|const-greedy|fifo|cb|cat|fegc|fastcb|"
                  "approxcb:q=<pct>%|age-threshold:tau=<n>)");
  bind_string("strategy", spec.config.strategy);
  cmd->add_option("--workload", spec.workload,
                  "synthetic workload spec (uniform:...|hotspot:...|zipf:...)");
  bind_string("workload", spec.workload);
  cmd->add_option("--trace", spec.trace, "trace file to replay");
  bind_string("trace", spec.trace);
  cmd->add_option("--trace-format", spec.trace_format, "canonical|spc")
      ->check(CLI::IsMember({"canonical", "spc"}));
  bind_string("trace-format", spec.trace_format);
  cmd->add_option("--lba-unit", spec.lba_unit, "bytes per LBA for spc traces");
  bind_number(common.bindings, "lba-unit", spec.lba_unit);
  cmd->add_option("--channels", spec.config.geometry.channels, "flash channels");
  bind_number(common.bindings, "channels", spec.config.geometry.channels);
  cmd->add_option("--blocks-per-channel", spec.config.geometry.blocks_per_channel,
                  "blocks per channel");
  bind_number(common.bindings, "blocks-per-channel", spec.config.geometry.blocks_per_channel);
  cmd->add_option("--pages-per-block", spec.config.geometry.pages_per_block, "pages per block");
  bind_number(common.bindings, "pages-per-block", spec.config.geometry.pages_per_block);
  cmd->add_option("--page-size", spec.config.geometry.page_size, "page size in bytes");
  bind_number(common.bindings, "page-size", spec.config.geometry.page_size);
  cmd->add_option("--logical-capacity", capacity,
                  "logical capacity in bytes (K/M/G/T suffixes); default fills the "
                  "overprovisioning factor");
  bind_string("logical-capacity", capacity);
  cmd->add_option("--op-factor", spec.config.geometry.op_factor, "overprovisioning factor");
  common.bindings.push_back({"op-factor", [&spec](const std::string& v) {
                               spec.config.geometry.op_factor = std::stod(v);
                             }});
  cmd->add_option("--hotness-levels", spec.config.hotness_levels, "page temperature levels");
  bind_number(common.bindings, "hotness-levels", spec.config.hotness_levels);
  cmd->add_option("--warmup", warmup, "on|off")->check(CLI::IsMember({"on", "off"}));
  common.bindings.push_back({"warmup", [&warmup](const std::string& v) {
                               if (v != "on" && v != "off")
                                 spec_fail("config: warmup must be on or off");
                               warmup = v;
                             }});
  cmd->add_option("--seed", spec.config.rng_seed, "RNG seed");
  bind_number(common.bindings, "seed", spec.config.rng_seed);
  cmd->add_option("--out", spec.out_dir, "output directory");
  bind_string("out", spec.out_dir);
  cmd->add_option("--window", spec.config.window, "WA series window in host page writes");
  bind_number(common.bindings, "window", spec.config.window);
}

// Flat key=value config file; values apply only where no flag was given.
void apply_config_file(const CLI::App* cmd, const CommonOptions& common) {
  if (common.config_path.empty()) return;
  std::ifstream in(common.config_path);
  if (!in) throw std::runtime_error("cannot open config file: " + common.config_path);
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    if (!trimmed.empty()) trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(common.config_path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    const std::string key = trimmed.substr(0, eq);
    const std::string value = trimmed.substr(eq + 1);
    const auto binding =
        std::find_if(common.bindings.begin(), common.bindings.end(),
                     [&](const OptionBinding& b) { return b.key == key; });
    if (binding == common.bindings.end())
      throw std::runtime_error(common.config_path + ":" + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    if (cmd->count("--" + key) > 0) continue;  // flag overrides file
    binding->set(value);
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"trace-driven SSD FTL garbage collection simulator"};
  app.require_subcommand(1);

  RunSpec run_spec;
  std::string run_warmup = "on", run_capacity;
  CommonOptions run_common;
  CLI::App* run = app.add_subcommand("run", "execute one simulation");
  add_common_options(run, run_spec, run_warmup, run_capacity, run_common);

  RunSpec sweep_spec;
  std::string sweep_warmup = "on", sweep_capacity;
  CommonOptions sweep_common;
  std::string sweep_axis;
  std::vector<std::string> sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "run one simulation per axis point");
  add_common_options(sweep, sweep_spec, sweep_warmup, sweep_capacity, sweep_common);
  sweep->add_option("--axis", sweep_axis, "strategy|q|pages-per-block|capacity")->required();
  sweep->add_option("--values", sweep_values, "comma-separated axis values")
      ->required()
      ->delimiter(',');

  RunSpec bench_spec;
  std::string bench_warmup = "on", bench_capacity;
  CommonOptions bench_common;
  std::vector<std::string> bench_strategies;
  std::uint32_t repeats = 3;
  CLI::App* bench = app.add_subcommand("bench", "wall-clock comparison across strategies");
  add_common_options(bench, bench_spec, bench_warmup, bench_capacity, bench_common);
  bench->add_option("--strategies", bench_strategies, "comma-separated strategy list")
      ->required()
      ->delimiter(',');
  bench->add_option("--repeats", repeats, "timing repeats (>= 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      apply_config_file(run, run_common);
      run_spec.config.warm_up = run_warmup == "on";
      if (!run_capacity.empty()) run_spec.logical_capacity = parse_size_bytes(run_capacity);
      return cmd_run(run_spec);
    }
    if (sweep->parsed()) {
      apply_config_file(sweep, sweep_common);
      sweep_spec.config.warm_up = sweep_warmup == "on";
      if (!sweep_capacity.empty())
        sweep_spec.logical_capacity = parse_size_bytes(sweep_capacity);
      return cmd_sweep(sweep_spec, sweep_axis, sweep_values);
    }
    apply_config_file(bench, bench_common);
    bench_spec.config.warm_up = bench_warmup == "on";
    if (!bench_capacity.empty()) bench_spec.logical_capacity = parse_size_bytes(bench_capacity);
    return cmd_bench(bench_spec, bench_strategies, repeats);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ftlsim::cli
