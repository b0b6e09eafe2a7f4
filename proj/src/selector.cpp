#include "ftlsim/selector.hpp"

#include <charconv>
#include <stdexcept>

#include "ftlsim/fastcb.hpp"
#include "ftlsim/strategies.hpp"

namespace ftlsim {

namespace {

[[noreturn]] void bad_spec(const std::string& text, const std::string& why) {
  throw std::invalid_argument("strategy spec '" + text + "': " + why);
}

double parse_double(const std::string& text, std::string_view token) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(token), &used);
    if (used != token.size()) bad_spec(text, "trailing characters in number");
    return v;
  } catch (const std::invalid_argument&) {
    bad_spec(text, "expected a number");
  } catch (const std::out_of_range&) {
    bad_spec(text, "number out of range");
  }
}

std::uint64_t parse_u64(const std::string& text, std::string_view token) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    bad_spec(text, "expected an unsigned integer");
  return v;
}

}  // namespace

StrategySpec parse_strategy_spec(const std::string& text) {
  StrategySpec spec;
  spec.text = text;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : text.substr(colon + 1);

  if (head == "greedy") {
    spec.kind = StrategyKind::GreedyHeap;
  } else if (head == "const-greedy") {
    spec.kind = StrategyKind::GreedyBucket;
  } else if (head == "fifo") {
    spec.kind = StrategyKind::Fifo;
  } else if (head == "cb") {
    spec.kind = StrategyKind::Cb;
  } else if (head == "cat") {
    spec.kind = StrategyKind::Cat;
  } else if (head == "fegc") {
    spec.kind = StrategyKind::Fegc;
  } else if (head == "fastcb") {
    spec.kind = StrategyKind::FastCb;
  } else if (head == "approxcb") {
    spec.kind = StrategyKind::ApproxCb;
    if (params.rfind("q=", 0) == 0) {
      std::string_view v{params};
      v.remove_prefix(2);
      if (!v.empty() && v.back() == '%') v.remove_suffix(1);
      spec.q_pct = parse_double(text, v);
      if (!(spec.q_pct > 0.0)) bad_spec(text, "q must be > 0");
    } else if (params.rfind("abs=", 0) == 0) {
      spec.q_abs = parse_u64(text, std::string_view{params}.substr(4));
      if (spec.q_abs == 0) bad_spec(text, "abs must be > 0");
    } else {
      bad_spec(text, "expected q=<pct>% or abs=<n>");
    }
  } else if (head == "age-threshold") {
    spec.kind = StrategyKind::AgeThreshold;
    if (params.rfind("tau=", 0) != 0) bad_spec(text, "expected tau=<n>");
    spec.tau = parse_u64(text, std::string_view{params}.substr(4));
  } else {
    bad_spec(text, "unknown strategy");
  }

  if (spec.kind != StrategyKind::ApproxCb && spec.kind != StrategyKind::AgeThreshold &&
      !params.empty())
    bad_spec(text, "strategy takes no parameters");
  return spec;
}

std::unique_ptr<VictimSelector> make_selector(const StrategySpec& spec,
                                              const BlockMetaView& blocks,
                                              std::uint64_t time_factor) {
  switch (spec.kind) {
    case StrategyKind::GreedyHeap: return std::make_unique<GreedyHeapSelector>(blocks);
    case StrategyKind::GreedyBucket: return std::make_unique<GreedyBucketSelector>(blocks);
    case StrategyKind::Fifo: return std::make_unique<FifoSelector>(blocks);
    case StrategyKind::Cb: return std::make_unique<CbSelector>(blocks);
    case StrategyKind::Cat: return std::make_unique<CatSelector>(blocks);
    case StrategyKind::Fegc: return std::make_unique<FegcSelector>(blocks);
    case StrategyKind::FastCb: return std::make_unique<FastCbSelector>(blocks, time_factor);
    case StrategyKind::ApproxCb:
      return std::make_unique<ApproxCbSelector>(blocks, spec.q_pct, spec.q_abs);
    case StrategyKind::AgeThreshold:
      return std::make_unique<AgeThresholdSelector>(blocks, spec.tau);
  }
  throw std::logic_error("unreachable strategy kind");
}

}  // namespace ftlsim
