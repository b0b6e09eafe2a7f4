#include "ftlsim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ftlsim {

namespace {

[[noreturn]] void parse_fail(std::uint64_t line_no, const std::string& why) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + why);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

bool parse_u64_field(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_i64_as_u64(std::string_view s, std::uint64_t& out) {
  // timestamps may be signed; the value itself is discarded
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  return parse_u64_field(s, out);
}

bool blank_or_comment(std::string_view s) {
  s = trim(s);
  return s.empty() || s.front() == '#';
}

double random01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Zipf sampler over [0, n) with P(k) proportional to 1/(k+1)^s, after
// Gray et al.'s incremental method as popularized by YCSB.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s) : n_(n), theta_(s) {
    for (std::uint64_t i = 1; i <= n_; ++i) zetan_ += 1.0 / std::pow(double(i), theta_);
    zeta2_ = 1.0 + std::pow(0.5, theta_);
    alpha_ = 1.0 / (1.0 - theta_);
    eta_ = (1.0 - std::pow(2.0 / double(n_), 1.0 - theta_)) / (1.0 - zeta2_ / zetan_);
  }

  std::uint64_t operator()(std::mt19937_64& rng) const {
    const double u = random01(rng);
    const double uz = u * zetan_;
    if (uz < 1.0) return 0;
    if (uz < zeta2_) return 1;
    auto k = static_cast<std::uint64_t>(double(n_) * std::pow(eta_ * u - eta_ + 1.0, alpha_));
    return k >= n_ ? n_ - 1 : k;
  }

 private:
  std::uint64_t n_;
  double theta_;
  double zetan_ = 0.0;
  double zeta2_;
  double alpha_;
  double eta_;
};

}  // namespace

std::vector<WriteRequest> parse_canonical(std::istream& in) {
  std::vector<WriteRequest> out;
  std::string line;
  std::uint64_t line_no = 0, seq = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) parse_fail(line_no, "expected timestamp,op,offset,length");
    std::uint64_t ts = 0, offset = 0, length = 0;
    if (!parse_i64_as_u64(fields[0], ts)) parse_fail(line_no, "bad timestamp");
    if (fields[1] != "r" && fields[1] != "w") parse_fail(line_no, "op must be r or w");
    if (!parse_u64_field(fields[2], offset)) parse_fail(line_no, "bad offset");
    if (!parse_u64_field(fields[3], length)) parse_fail(line_no, "bad length");
    if (fields[1] == "r") continue;
    if (length == 0) parse_fail(line_no, "zero-length write");
    out.push_back(WriteRequest{seq++, offset, length});
  }
  return out;
}

std::vector<WriteRequest> import_spc(std::istream& in, std::uint32_t lba_unit) {
  if (lba_unit == 0) throw std::invalid_argument("import_spc: lba_unit must be > 0");
  std::vector<WriteRequest> out;
  std::string line;
  std::uint64_t line_no = 0, seq = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_or_comment(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 5) parse_fail(line_no, "expected ASU,LBA,size,opcode,timestamp");
    std::uint64_t asu = 0, lba = 0, size = 0;
    if (!parse_u64_field(fields[0], asu)) parse_fail(line_no, "bad ASU");
    if (!parse_u64_field(fields[1], lba)) parse_fail(line_no, "bad LBA");
    if (!parse_u64_field(fields[2], size)) parse_fail(line_no, "bad size");
    const std::string_view op = fields[3];
    if (op != "W" && op != "w" && op != "R" && op != "r")
      parse_fail(line_no, "unknown opcode");
    if (op == "R" || op == "r") continue;
    if (size == 0) parse_fail(line_no, "zero-length write");
    out.push_back(WriteRequest{seq++, lba * lba_unit, size});
  }
  return out;
}

std::vector<WriteRequest> gen_uniform(std::uint64_t total_writes, std::uint32_t req_pages,
                                      std::uint64_t logical_pages, std::uint32_t page_size,
                                      std::uint64_t seed) {
  if (req_pages == 0 || req_pages > logical_pages)
    throw std::invalid_argument("gen_uniform: bad req_pages");
  std::mt19937_64 rng(seed);
  std::vector<WriteRequest> out;
  out.reserve(total_writes);
  const std::uint64_t span = logical_pages - req_pages + 1;
  for (std::uint64_t i = 0; i < total_writes; ++i) {
    const Lpa page = uniform_below(rng, span);
    out.push_back(WriteRequest{i, page * page_size,
                               static_cast<std::uint64_t>(req_pages) * page_size});
  }
  return out;
}

std::vector<WriteRequest> gen_hotspot(const std::vector<HotspotRegion>& regions,
                                      std::uint64_t total_writes, std::uint32_t req_pages,
                                      std::uint64_t logical_pages, std::uint32_t page_size,
                                      std::uint64_t seed) {
  if (regions.empty()) throw std::invalid_argument("gen_hotspot: no regions");
  if (req_pages == 0 || req_pages > logical_pages)
    throw std::invalid_argument("gen_hotspot: bad req_pages");
  double addr_sum = 0.0, access_sum = 0.0;
  for (const auto& r : regions) {
    if (!(r.address_fraction > 0.0) || r.address_fraction > 1.0)
      throw std::invalid_argument("gen_hotspot: address fraction must be in (0,1]");
    if (!(r.access_fraction > 0.0) || r.access_fraction > 1.0)
      throw std::invalid_argument("gen_hotspot: access fraction must be in (0,1]");
    addr_sum += r.address_fraction;
    access_sum += r.access_fraction;
  }
  if (addr_sum > 1.0 + 1e-9) throw std::invalid_argument("gen_hotspot: address fractions exceed 1");
  if (std::abs(access_sum - 1.0) > 1e-9)
    throw std::invalid_argument("gen_hotspot: access fractions must sum to 1");

  // Regions tile the address space in order; access weights are scaled to
  // integers so region picks are integer-exact.
  struct Span {
    Lpa start;
    std::uint64_t pages;
    std::uint64_t weight;
  };
  std::vector<Span> spans;
  double addr_cum = 0.0;
  std::uint64_t weight_sum = 0;
  for (const auto& r : regions) {
    const Lpa start = static_cast<Lpa>(addr_cum * static_cast<double>(logical_pages));
    addr_cum += r.address_fraction;
    Lpa end = static_cast<Lpa>(addr_cum * static_cast<double>(logical_pages));
    if (end > logical_pages) end = logical_pages;
    if (end <= start) end = start + 1;
    const std::uint64_t weight =
        static_cast<std::uint64_t>(r.access_fraction * 4294967296.0) + 1;
    spans.push_back(Span{start, end - start, weight});
    weight_sum += weight;
  }

  std::mt19937_64 rng(seed);
  std::vector<WriteRequest> out;
  out.reserve(total_writes);
  for (std::uint64_t i = 0; i < total_writes; ++i) {
    std::uint64_t pick = uniform_below(rng, weight_sum);
    const Span* chosen = &spans.back();
    for (const auto& s : spans) {
      if (pick < s.weight) {
        chosen = &s;
        break;
      }
      pick -= s.weight;
    }
    Lpa page = chosen->start + uniform_below(rng, chosen->pages);
    if (page + req_pages > logical_pages) page = logical_pages - req_pages;
    out.push_back(WriteRequest{i, page * page_size,
                               static_cast<std::uint64_t>(req_pages) * page_size});
  }
  return out;
}

std::vector<WriteRequest> gen_zipf(double s, std::uint64_t total_writes, std::uint32_t req_pages,
                                   std::uint64_t logical_pages, std::uint32_t page_size,
                                   std::uint64_t seed) {
  if (req_pages == 0 || req_pages > logical_pages)
    throw std::invalid_argument("gen_zipf: bad req_pages");
  if (!(s > 0.0) || s >= 1.0)
    throw std::invalid_argument("gen_zipf: exponent must be in (0,1)");
  const std::uint64_t span = logical_pages - req_pages + 1;
  ZipfSampler zipf(span, s);
  std::mt19937_64 rng(seed);
  std::vector<WriteRequest> out;
  out.reserve(total_writes);
  for (std::uint64_t i = 0; i < total_writes; ++i) {
    const Lpa page = zipf(rng);
    out.push_back(WriteRequest{i, page * page_size,
                               static_cast<std::uint64_t>(req_pages) * page_size});
  }
  return out;
}

HotnessMap HotnessMap::uniform_cold(std::uint64_t logical_pages, std::uint32_t levels) {
  HotnessMap map;
  map.levels = levels;
  map.level.assign(logical_pages, static_cast<std::uint8_t>(levels - 1));
  return map;
}

HotnessMap precharacterize(const std::vector<WriteRequest>& workload,
                           std::uint64_t logical_pages, std::uint32_t page_size,
                           std::uint32_t levels, const std::vector<double>& quantiles) {
  if (levels < 1) throw std::invalid_argument("precharacterize: levels must be >= 1");
  if (quantiles.size() + 1 < levels)
    throw std::invalid_argument("precharacterize: need levels-1 quantiles");

  std::vector<std::uint64_t> counts(logical_pages, 0);
  for (const auto& req : workload) {
    const Lpa first = req.byte_offset / page_size;
    const Lpa last = (req.byte_offset + req.length - 1) / page_size;
    for (Lpa p = first; p <= last && p < logical_pages; ++p) ++counts[p];
  }

  std::vector<Lpa> order(logical_pages);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Lpa a, Lpa b) { return counts[a] > counts[b]; });

  HotnessMap map = HotnessMap::uniform_cold(logical_pages, levels);
  std::uint64_t rank = 0;
  for (std::uint32_t lvl = 0; lvl + 1 < levels; ++lvl) {
    const auto quota = static_cast<std::uint64_t>(
        quantiles[lvl] * static_cast<double>(logical_pages));
    for (std::uint64_t i = 0; i < quota && rank < logical_pages; ++i, ++rank) {
      if (counts[order[rank]] == 0) break;  // unaccessed pages stay coldest
      map.level[order[rank]] = static_cast<std::uint8_t>(lvl);
    }
  }
  return map;
}

}  // namespace ftlsim
