#pragma once

// Small seeded generators for property tests. Each property runs a fixed
// number of cases from a fixed seed, and a failure reports the case index so it
// can be replayed.

#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include "ifslab/ifs_core.hpp"
#include "ifslab/rng.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(ifslab::make_engine(seed)) {}

  int integer(int lo, int hi) { return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double real(double lo, double hi) { return lo + (hi - lo) * ifslab::uniform01(eng_); }
  double unit() { return ifslab::uniform01(eng_); }
  bool coin() { return (eng_() >> 63) != 0; }
  std::uint64_t bits() { return eng_(); }

  ifslab::SystemParams system(int max_M = 6, int max_N = 6) {
    return ifslab::make_system(integer(2, max_M), integer(2, max_N), real(0.02, 0.98));
  }
  ifslab::Word word(int M, int len) {
    ifslab::Word w(static_cast<std::size_t>(len));
    for (auto& s : w) s = integer(0, M);
    return w;
  }

 private:
  ifslab::Engine eng_;
};

template <class F>
void for_all(int cases, std::uint64_t seed, F&& body) {
  for (int c = 0; c < cases; ++c) {
    SCOPED_TRACE("property case " + std::to_string(c) + " (seed " + std::to_string(seed) + ")");
    Gen g(ifslab::derive_seed(seed, static_cast<std::uint64_t>(c)));
    body(g);
    if (::testing::Test::HasFatalFailure() || ::testing::Test::HasNonfatalFailure()) return;
  }
}

}  // namespace gen
