#include <doctest.h>

#include <cmath>
#include <random>

#include "ftlsim/scores.hpp"

using namespace ftlsim;

TEST_CASE("utilization-age score spot values") {
  // 256-page block, 141 invalid (115 valid), age 24469: crosses a 15000
  // threshold and rounds to 15001
  const Score s = cb_value(115, 256, 24469);
  CHECK(s > Score{15000, 1});
  CHECK(std::llround(s.to_double()) == 15001);
  CHECK(s.to_double() == doctest::Approx(15000.5608695652).epsilon(1e-12));

  CHECK(cb_value(4, 4, 12345) == Score{0, 1});     // fully valid -> 0
  CHECK(cb_value(1, 4, 10) == Score{15, 1});       // (0.75/0.5)*10
  CHECK(cb_value(0, 4, 3).is_infinite());          // free victim
}

TEST_CASE("score ordering is exact and total") {
  CHECK(Score{1, 3} < Score{1, 2});
  CHECK(Score{2, 4} == Score{1, 2});
  CHECK(Score{3, 2} > Score{1, 1});
  CHECK(Score::infinity() > Score{~0ull, 1});
  CHECK(Score::infinity() == Score::infinity());
  CHECK_FALSE(Score::infinity() < Score::infinity());
  // large cross products stay exact
  CHECK(Score{(1ull << 60) + 1, 1ull << 60} > Score{1, 1});
}

TEST_CASE("creation-age wear score") {
  // u = 0.25, age 9 -> norm = floor(log2(10)) + 1 = 4, one erase -> 3*4/2 = 6
  CHECK(cat_value(1, 4, 9, 1) == Score{6, 1});
  CHECK(cat_value(4, 4, 100, 0) == Score{0, 1});
  CHECK(cat_value(0, 4, 100, 2).is_infinite());
  CHECK(cat_age_norm(0) == 1);
  CHECK(cat_age_norm(1) == 2);
  CHECK(cat_age_norm(9) == 4);
}

TEST_CASE("invalid-page age sum") {
  // invalidations at t=1 and t=3, now=10 -> (10-1) + (10-3) = 16
  CHECK(cwa_value(2, 1 + 3, 10) == 16);
  CHECK(cwa_value(0, 0, 1234) == 0);
  CHECK(cwa_value(1, 10, 10) == 0);
}

TEST_CASE("promotion instants") {
  // valid 115 of 256, threshold 15000: ceil(15000 * 230 / 141) = 24469
  CHECK(fastcb_shift_time(115, 256, 0, Score{15000, 1}) == 24469);
  CHECK(fastcb_shift_time(256, 256, 5, Score{15000, 1}) == kNoTime);  // score pinned at 0
  CHECK(fastcb_shift_time(0, 256, 42, Score{15000, 1}) == 42);        // free victim
  // zero threshold admits everything immediately
  CHECK(fastcb_shift_time(100, 256, 7, Score{0, 1}) == 7);
  CHECK(fastcb_shift_time(256, 256, 7, Score{0, 1}) == 7);
  // infinite threshold admits only free victims
  CHECK(fastcb_shift_time(1, 256, 7, Score::infinity()) == kNoTime);
  CHECK(fastcb_shift_time(0, 256, 7, Score::infinity()) == 7);
}

TEST_CASE("promotion instant is the first tick at or above the threshold") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t np = 4 + static_cast<std::uint32_t>(rng() % 252);
    const std::uint32_t valid = 1 + static_cast<std::uint32_t>(rng() % (np - 1));
    const Score threshold{rng() % 100000, 1 + rng() % 64};
    const Time delta = shift_delta(valid, np, threshold);
    REQUIRE(delta != kNoTime);
    CHECK(cb_value(valid, np, delta) >= threshold);
    if (delta > 0) CHECK(cb_value(valid, np, delta - 1) < threshold);
  }
}

TEST_CASE("dropping the constant factor never changes an argmax") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 500; ++round) {
    int best_half = -1, best_full = -1;
    Score half_score, full_score;
    for (int b = 0; b < 12; ++b) {
      const std::uint32_t np = 64;
      const std::uint32_t valid = 1 + static_cast<std::uint32_t>(rng() % np);
      const Time age = rng() % 10000;
      const Score with_half = cb_value(valid, np, age);                  // age(1-u)/(2u)
      const Score without{age * (np - valid), static_cast<std::uint64_t>(valid)};  // age(1-u)/u
      if (best_half < 0 || with_half > half_score) {
        best_half = b;
        half_score = with_half;
      }
      if (best_full < 0 || without > full_score) {
        best_full = b;
        full_score = without;
      }
    }
    CHECK(best_half == best_full);
  }
}
