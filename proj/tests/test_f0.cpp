// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <sstream>

#include "prosody/f0.hpp"

using namespace prosody;

namespace {

F0Contour make(std::vector<double> v, std::vector<uint8_t> voiced, int hop = 200, int sr = 16000) {
  F0Contour c;
  c.values = std::move(v);
  c.voiced = std::move(voiced);
  c.hop = hop;
  c.sample_rate = sr;
  return c;
}

F0Contour random_contour(std::mt19937_64& rng, int frames) {
  std::uniform_real_distribution<double> hz(80.0, 400.0);
  std::bernoulli_distribution unvoiced(0.3);
  F0Contour c;
  for (int i = 0; i < frames; ++i) {
    const bool uv = unvoiced(rng);
    c.voiced.push_back(!uv);
    c.values.push_back(uv ? 0.0 : hz(rng));
  }
  return c;
}

}  // namespace

TEST_CASE("contour validation") {
  CHECK_NOTHROW(validate_contour(make({100, 0}, {1, 0}), true));
  // length mismatch
  CHECK_THROWS_AS(validate_contour(make({100}, {1, 0}), true), std::invalid_argument);
  // voiced value below the sanity floor
  CHECK_THROWS_AS(validate_contour(make({10}, {1}), true), std::invalid_argument);
  // voiced value above Nyquist
  CHECK_THROWS_AS(validate_contour(make({9000}, {1}), true), std::invalid_argument);
  // raw form requires exact zeros on unvoiced frames
  CHECK_THROWS_AS(validate_contour(make({100, 50}, {1, 0}), true), std::invalid_argument);
  CHECK_NOTHROW(validate_contour(make({100, 50}, {1, 0}), false));
}

TEST_CASE("interior unvoiced gaps interpolate linearly") {
  const auto r = interpolate_unvoiced(make({100, 0, 0, 160}, {1, 0, 0, 1}));
  REQUIRE(!r.all_unvoiced);
  CHECK(r.contour.values[0] == doctest::Approx(100).epsilon(1e-12));
  CHECK(r.contour.values[1] == doctest::Approx(120).epsilon(1e-12));
  CHECK(r.contour.values[2] == doctest::Approx(140).epsilon(1e-12));
  CHECK(r.contour.values[3] == doctest::Approx(160).epsilon(1e-12));
  CHECK(r.contour.voiced == std::vector<uint8_t>{1, 0, 0, 1});
}

TEST_CASE("edge unvoiced runs take the nearest voiced value") {
  const auto r = interpolate_unvoiced(make({0, 0, 200, 0}, {0, 0, 1, 0}));
  for (double v : r.contour.values) CHECK(v == doctest::Approx(200).epsilon(1e-12));
}

TEST_CASE("entirely unvoiced contour flags and stays zero") {
  const auto r = interpolate_unvoiced(make({0, 0}, {0, 0}));
  CHECK(r.all_unvoiced);
  CHECK(r.contour.values == std::vector<double>{0, 0});
}

TEST_CASE("interpolation is idempotent") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const F0Contour c = random_contour(rng, 1 + int(rng() % 40));
    const auto once = interpolate_unvoiced(c);
    const auto twice = interpolate_unvoiced(once.contour);
    CHECK(once.contour.values == twice.contour.values);
    CHECK(once.contour.voiced == twice.contour.voiced);
  }
}

TEST_CASE("frame-to-sample expansion anchors at frame centers") {
  const SampleTrack t = expand_to_samples(make({100, 300}, {1, 1}, 4));
  REQUIRE(t.f0.size() == 8);
  const std::vector<double> want = {100, 100, 100, 150, 200, 250, 300, 300};
  for (size_t i = 0; i < want.size(); ++i) CHECK(t.f0[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("single frame expands to a constant") {
  const SampleTrack t = expand_to_samples(make({150}, {1}, 200));
  REQUIRE(t.f0.size() == 200);
  for (double v : t.f0) CHECK(v == 150.0);
}

TEST_CASE("constant contour expands to a constant") {
  const SampleTrack t = expand_to_samples(make(std::vector<double>(50, 220),
                                               std::vector<uint8_t>(50, 1), 200));
  REQUIRE(t.f0.size() == 10000);
  for (double v : t.f0) CHECK(v == doctest::Approx(220).epsilon(1e-12));
}

TEST_CASE("expansion length and gate follow the frame grid") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int frames = 1 + int(rng() % 30);
    F0Contour c = random_contour(rng, frames);
    c.hop = 50;
    const F0Contour filled = interpolate_unvoiced(c).contour;
    const SampleTrack t = expand_to_samples(filled);
    REQUIRE(t.f0.size() == size_t(frames) * 50);
    for (size_t s = 0; s < t.gate.size(); ++s) CHECK(t.gate[s] == c.voiced[s / 50]);
  }
}

TEST_CASE("normalize basics and round trip") {
  NormStats stats;
  stats.domain = PitchDomain::linear_hz;
  stats.mean = 200.0;
  stats.std = 30.0;
  const auto nc = normalize(make({200, 230}, {1, 1}), stats);
  CHECK(nc.z_values[0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(nc.z_values[1] == doctest::Approx(1).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (PitchDomain dom : {PitchDomain::linear_hz, PitchDomain::log_hz}) {
    NormStats s;
    s.domain = dom;
    s.mean = dom == PitchDomain::log_hz ? 5.3 : 200.0;
    s.std = dom == PitchDomain::log_hz ? 0.2 : 40.0;
    F0Contour c = interpolate_unvoiced(random_contour(rng, 30)).contour;
    const auto z = normalize(c, s);
    const auto back = denormalize(z);
    REQUIRE(!back.clamped);
    for (int i = 0; i < c.frames(); ++i)
      CHECK(back.values_hz[i] == doctest::Approx(c.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("denormalize clamps to the valid frequency range") {
  NormalizedContour nc;
  nc.domain = PitchDomain::linear_hz;
  nc.mean = 200.0;
  nc.std = 30.0;
  nc.z_values = {-20.0, 0.0, 400.0};
  const auto r = denormalize(nc);
  CHECK(r.clamped);
  CHECK(r.values_hz[0] == 0.0);
  CHECK(r.values_hz[1] == doctest::Approx(200).epsilon(1e-12));
  CHECK(r.values_hz[2] == 8000.0);
}

TEST_CASE("normalize rejects bad stats") {
  NormStats s;
  s.std = 0.0;
  CHECK_THROWS_AS(normalize(make({100}, {1}), s), std::invalid_argument);
}

TEST_CASE("contour text round trip") {
  const F0Contour c = make({100, 0, 250.5}, {1, 0, 1}, 160, 8000);
  std::stringstream ss;
  write_contour(c, ss);
  const F0Contour back = read_contour(ss);
  CHECK(back.hop == 160);
  CHECK(back.sample_rate == 8000);
  CHECK(back.voiced == c.voiced);
  for (int i = 0; i < c.frames(); ++i)
    CHECK(back.values[i] == doctest::Approx(c.values[i]).epsilon(1e-12));
}
