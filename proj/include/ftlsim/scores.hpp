#pragma once

#include <cstdint>

#include "ftlsim/types.hpp"

namespace ftlsim {

/// Non-negative rational score with exact comparison. den == 0 encodes the
/// +infinity sentinel used for blocks with no valid pages. Comparisons
/// cross-multiply in 128 bits, so equal values compare equal regardless of
/// representation and results are identical on every platform.
struct Score {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Score infinity() { return Score{1, 0}; }
  bool is_infinite() const { return den == 0; }
  double to_double() const;

  friend bool operator<(Score a, Score b) {
    if (a.den == 0) return false;
    if (b.den == 0) return true;
    return static_cast<unsigned __int128>(a.num) * b.den <
           static_cast<unsigned __int128>(b.num) * a.den;
  }
  friend bool operator>(Score a, Score b) { return b < a; }
  friend bool operator<=(Score a, Score b) { return !(b < a); }
  friend bool operator>=(Score a, Score b) { return !(a < b); }
  friend bool operator==(Score a, Score b) {
    if (a.den == 0 || b.den == 0) return a.den == b.den;
    return static_cast<unsigned __int128>(a.num) * b.den ==
           static_cast<unsigned __int128>(b.num) * a.den;
  }
  friend bool operator!=(Score a, Score b) { return !(a == b); }
};

/// Utilization-age score: age * (1-u) / (2u) with u = valid_count / pages.
/// A block without valid pages is a free victim and scores +infinity.
Score cb_value(std::uint32_t valid_count, std::uint32_t pages_per_block, Time age);

/// Discretized age normalization: floor(log2(age+1)) + 1.
std::uint32_t cat_age_norm(Time age);

/// Wear-aware score: (1-u)/u * norm(creation age) / (erase_count + 1).
Score cat_value(std::uint32_t valid_count, std::uint32_t pages_per_block,
                Time age_since_creation, std::uint32_t erase_count);

/// Sum of invalid-page ages, computed incrementally from the invalidation
/// count and timestamp sum: inv_count * now - inv_time_sum.
std::uint64_t cwa_value(std::uint32_t inv_count, std::uint64_t inv_time_sum, Time now);

/// Ticks until a block's utilization-age score first reaches the threshold,
/// assuming its utilization stays put. kNoTime = never (no valid-page churn
/// can be waited out). Zero means it qualifies immediately.
Time shift_delta(std::uint32_t valid_count, std::uint32_t pages_per_block, Score threshold);

/// Absolute promotion instant: age base plus shift_delta, saturating.
Time fastcb_shift_time(std::uint32_t valid_count, std::uint32_t pages_per_block,
                       Time last_invalidation_at, Score threshold);

}  // namespace ftlsim
