#include "ftlsim/scores.hpp"

#include <bit>
#include <cassert>
#include <limits>

namespace ftlsim {

double Score::to_double() const {
  if (den == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(num) / static_cast<double>(den);
}

Score cb_value(std::uint32_t valid_count, std::uint32_t pages_per_block, Time age) {
  assert(valid_count <= pages_per_block);
  if (valid_count == 0) return Score::infinity();
  return Score{age * (pages_per_block - valid_count), 2ull * valid_count};
}

std::uint32_t cat_age_norm(Time age) {
  return static_cast<std::uint32_t>(std::bit_width(age + 1));
}

Score cat_value(std::uint32_t valid_count, std::uint32_t pages_per_block,
                Time age_since_creation, std::uint32_t erase_count) {
  assert(valid_count <= pages_per_block);
  if (valid_count == 0) return Score::infinity();
  return Score{static_cast<std::uint64_t>(pages_per_block - valid_count) *
                   cat_age_norm(age_since_creation),
               static_cast<std::uint64_t>(valid_count) * (erase_count + 1ull)};
}

std::uint64_t cwa_value(std::uint32_t inv_count, std::uint64_t inv_time_sum, Time now) {
  const std::uint64_t total = static_cast<std::uint64_t>(inv_count) * now;
  assert(total >= inv_time_sum);
  return total - inv_time_sum;
}

Time shift_delta(std::uint32_t valid_count, std::uint32_t pages_per_block, Score threshold) {
  assert(valid_count <= pages_per_block);
  if (valid_count == 0) return 0;  // already at +infinity
  if (threshold.is_infinite()) return kNoTime;
  if (threshold.num == 0) return 0;  // every score qualifies
  if (valid_count == pages_per_block) return kNoTime;  // score pinned at zero

  // Least integer age with age * (pages - valid) / (2 * valid) >= threshold.
  const unsigned __int128 num =
      static_cast<unsigned __int128>(threshold.num) * (2ull * valid_count);
  const unsigned __int128 den = static_cast<unsigned __int128>(threshold.den) *
                                (pages_per_block - valid_count);
  const unsigned __int128 delta = (num + den - 1) / den;
  if (delta >= static_cast<unsigned __int128>(kNoTime)) return kNoTime;
  return static_cast<Time>(delta);
}

Time fastcb_shift_time(std::uint32_t valid_count, std::uint32_t pages_per_block,
                       Time last_invalidation_at, Score threshold) {
  const Time delta = shift_delta(valid_count, pages_per_block, threshold);
  if (delta == kNoTime) return kNoTime;
  return sat_add(last_invalidation_at, delta);
}

}  // namespace ftlsim
