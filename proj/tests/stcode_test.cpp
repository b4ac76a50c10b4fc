#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irsim/rng.hpp"
#include "irsim/stcode.hpp"

using namespace irsim;

namespace {

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("psk_modulate constellation points") {
  CHECK(std::abs(psk_modulate(0, 8).value - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(psk_modulate(2, 8).value - Complex(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(psk_modulate(4, 8).value - Complex(-1.0, 0.0)) < 1e-15);
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(std::abs(psk_modulate(i, 8).value) - 1.0) < 1e-15);
  CHECK_THROWS_AS(psk_modulate(8, 8), InvalidInput);
  CHECK_THROWS_AS(psk_modulate(-1, 8), InvalidInput);
  CHECK_THROWS_AS(psk_modulate(0, 1), InvalidInput);
}

TEST_CASE("encode_pair phase schedule") {
  const ComplexVector w = ComplexVector::Ones(2);

  SUBCASE("s1=1, s2=i") {
    const StcSchedule s =
        encode_pair(psk_modulate(0, 8), psk_modulate(2, 8), w);
    CHECK(s.phi1 == doctest::Approx(M_PI / 2.0));
    CHECK(s.phi2 == doctest::Approx(3.0 * M_PI / 2.0));
  }
  SUBCASE("equal symbols") {
    const StcSchedule s =
        encode_pair(psk_modulate(3, 8), psk_modulate(3, 8), w);
    CHECK(s.phi1 == doctest::Approx(0.0));
    CHECK(s.phi2 == doctest::Approx(M_PI));
  }
  SUBCASE("s1=-1, s2=1") {
    const StcSchedule s =
        encode_pair(psk_modulate(4, 8), psk_modulate(0, 8), w);
    CHECK(s.phi1 == doctest::Approx(M_PI));
    CHECK(s.phi2 == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("beam slots") {
    const PskSymbol s1 = psk_modulate(1, 8), s2 = psk_modulate(5, 8);
    const StcSchedule s = encode_pair(s1, s2, w);
    CHECK((s.beamSlot1 - w * s1.value).norm() < 1e-15);
    CHECK((s.beamSlot2 + w * std::conj(s2.value)).norm() < 1e-15);
  }
}

TEST_CASE("phase-schedule identities for every PSK pair") {
  const ComplexVector w = ComplexVector::Ones(1);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const PskSymbol s1 = psk_modulate(i, 8), s2 = psk_modulate(j, 8);
      const StcSchedule sch = encode_pair(s1, s2, w);
      // s2 = e^{i phi1} s1 and conj(s1) = -e^{i phi2} conj(s2).
      CHECK(std::abs(std::exp(kImag * sch.phi1) * s1.value - s2.value) <
            1e-12);
      CHECK(std::abs(-std::exp(kImag * sch.phi2) * std::conj(s2.value) -
                     std::conj(s1.value)) < 1e-12);
    }
}

TEST_CASE("effective_gains matches direct recomputation") {
  Rng rng(7);
  const int M = 3, N = 5;
  const ComplexVector hk = rng.cnormal_vector(M);
  const ComplexVector gk = rng.cnormal_vector(N);
  ComplexVector theta(N);
  for (int i = 0; i < N; ++i) theta(i) = std::exp(kImag * rng.uniform(0.0, 6.28));
  ComplexMatrix r(N, M);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < M; ++j) r(i, j) = rng.cnormal();
  const ComplexVector w = rng.cnormal_vector(M);

  const EffectiveGains eg = effective_gains(hk, gk, theta, r, w);
  Complex direct = 0.0, reflected = 0.0;
  for (int i = 0; i < M; ++i) direct += std::conj(hk(i)) * w(i);
  const ComplexVector rw = r * w;
  for (int i = 0; i < N; ++i) reflected += std::conj(gk(i)) * theta(i) * rw(i);
  CHECK(std::abs(eg.direct - direct) < 1e-12);
  CHECK(std::abs(eg.reflected - reflected) < 1e-12);

  CHECK(std::abs(effective_gains(hk, gk, theta, r,
                                 ComplexVector::Zero(M))
                     .direct) == 0.0);
  CHECK(std::abs(effective_gains(hk, ComplexVector::Zero(N), theta, r, w)
                     .reflected) == 0.0);
}

TEST_CASE("equivalent channel orthogonality at machine precision") {
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const Complex h = rng.cnormal(), g = rng.cnormal();
    // H = [[h, g], [conj(g), -conj(h)]].
    Eigen::Matrix2cd big;
    big << h, g, std::conj(g), -std::conj(h);
    const Eigen::Matrix2cd gram = big.adjoint() * big;
    const double want = std::norm(h) + std::norm(g);
    CHECK((gram - want * Eigen::Matrix2cd::Identity()).norm() <=
          1e-15 * (1.0 + want));
  }
}

TEST_CASE("zero-noise combining recovers the scaled symbol pair") {
  // h = 0.6, g = 0.8i built from unit plumbing.
  const ComplexVector hk = ComplexVector::Constant(1, 0.6);
  ComplexVector gk(1);
  gk << std::conj(Complex(0.0, 0.8));
  const ComplexVector theta = ComplexVector::Ones(1);
  const ComplexMatrix r = ComplexMatrix::Ones(1, 1);
  const ComplexVector w = ComplexVector::Ones(1);
  Interferers none;
  Rng rng(1);
  const double scale = 0.36 + 0.64;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const PskSymbol s1 = psk_modulate(i, 8), s2 = psk_modulate(j, 8);
      const StcPairFrame f =
          simulate_pair(s1, s2, w, hk, gk, theta, r, none, 0.0, rng);
      CHECK(std::abs(f.effectiveDirect - 0.6) < 1e-12);
      CHECK(std::abs(f.effectiveReflected - Complex(0.0, 0.8)) < 1e-12);
      CHECK(std::abs(f.combined[0] / scale - s1.value) < 1e-12);
      CHECK(std::abs(f.combined[1] / scale - s2.value) < 1e-12);
    }
}

TEST_CASE("codec round-trip over random channels") {
  Rng rng(17);
  const int M = 4, N = 6;
  Interferers none;
  for (int t = 0; t < 100; ++t) {
    const ComplexVector hk = rng.cnormal_vector(M);
    const ComplexVector gk = rng.cnormal_vector(N);
    ComplexVector theta(N);
    for (int i = 0; i < N; ++i)
      theta(i) = std::exp(kImag * rng.uniform(0.0, 6.28));
    ComplexMatrix r(N, M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j) r(i, j) = rng.cnormal();
    const ComplexVector w = rng.cnormal_vector(M);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const StcPairFrame f =
            simulate_pair(psk_modulate(i, 8), psk_modulate(j, 8), w, hk, gk,
                          theta, r, none, 0.0, rng);
        const auto [d1, d2] = detect(f.combined, 8);
        CHECK(d1 == i);
        CHECK(d2 == j);
      }
  }
}

TEST_CASE("detect basics") {
  CHECK(detect({Complex(1.0, 0.0), Complex(0.0, 1.0)}, 8) ==
        std::pair<int, int>(0, 2));
  // Positive scaling never changes the decision.
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const Complex y = rng.cnormal();
    const double c = std::exp(rng.uniform(-3.0, 3.0));
    CHECK(detect_symbol(y, 8) == detect_symbol(c * y, 8));
  }
}

TEST_CASE("BPSK error rate matches the Gaussian tail") {
  Rng rng(23);
  const double sigma2 = 0.5;  // SNR 3 dB
  const double noiseStd = std::sqrt(sigma2);
  long errors = 0;
  const long trials = 200000;
  for (long t = 0; t < trials; ++t) {
    const Complex y = 1.0 + noiseStd * rng.cnormal();
    if (detect_symbol(y, 2) != 0) ++errors;
  }
  const double ser = static_cast<double>(errors) / static_cast<double>(trials);
  const double want = qfunc(std::sqrt(2.0 / sigma2));
  const double se = std::sqrt(want * (1.0 - want) / static_cast<double>(trials));
  CHECK(std::abs(ser - want) <= 4.0 * se);
}

TEST_CASE("instantaneous SINR") {
  ExperimentConfig cfg;
  cfg.sinrTargetsLow = RealVector::Constant(3, 10.0);

  SUBCASE("unit gain over unit noise with no interferers") {
    const ComplexVector hk = ComplexVector::Ones(1);
    const ComplexVector gk = ComplexVector::Zero(1);
    const ComplexVector theta = ComplexVector::Ones(1);
    const ComplexMatrix r = ComplexMatrix::Zero(1, 1);
    const ComplexVector w = ComplexVector::Ones(1);
    const double s =
        high_mobility_sinr({}, w, theta, hk, gk, r, 1.0, cfg);
    CHECK(s == doctest::Approx(1.0));
    // Doubling the beam amplitude quadruples the SINR when L = 0.
    const double s4 =
        high_mobility_sinr({}, ComplexVector(2.0 * w), theta, hk, gk, r, 1.0,
                           cfg);
    CHECK(s4 == doctest::Approx(4.0));
  }

  SUBCASE("random instance equals term-by-term recomputation") {
    Rng rng(29);
    const int M = 4, N = 6, L = 2;
    const ComplexVector hk = rng.cnormal_vector(M);
    const ComplexVector gk = rng.cnormal_vector(N);
    ComplexVector theta(N);
    for (int i = 0; i < N; ++i)
      theta(i) = std::exp(kImag * rng.uniform(0.0, 6.28));
    ComplexMatrix r(N, M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j) r(i, j) = rng.cnormal();
    std::vector<ComplexVector> lows;
    for (int l = 0; l < L; ++l) lows.push_back(rng.cnormal_vector(M));
    const ComplexVector w = rng.cnormal_vector(M);
    const double sigma2 = 0.3;

    const EffectiveGains eg = effective_gains(hk, gk, theta, r, w);
    const double pd = cfg.directVariance(cfg.userDistance);
    const double pi2 = cfg.irsVariance(cfg.userDistance);
    double den = sigma2;
    for (const auto& wl : lows)
      den += pd * wl.squaredNorm() + pi2 * (r * wl).squaredNorm();
    const double want = (std::norm(eg.direct) + std::norm(eg.reflected)) / den;
    CHECK(high_mobility_sinr(lows, w, theta, hk, gk, r, sigma2, cfg) ==
          doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("average SINR") {
  ExperimentConfig cfg;
  cfg.sinrTargetsLow = RealVector::Constant(3, 10.0);

  SUBCASE("unit beam, zero reflector, matched noise scale") {
    // Choose beta so d^alpha sigma2 / beta = 1.
    cfg.beta = std::pow(cfg.userDistance, cfg.alphaUser) * cfg.noisePower;
    const ComplexVector w = ComplexVector::Ones(1);
    const ComplexMatrix r = ComplexMatrix::Zero(1, 1);
    CHECK(avg_high_mobility_sinr({}, w, r, cfg.userDistance, cfg) ==
          doctest::Approx(1.0));
  }

  SUBCASE("matches the Rayleigh Monte Carlo average with no interferers") {
    Rng rng(31);
    const int M = 3, N = 4;
    ComplexMatrix r(N, M);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < M; ++j) r(i, j) = 0.3 * rng.cnormal();
    const ComplexVector w = rng.cnormal_vector(M);
    const ComplexVector theta = ComplexVector::Ones(N);
    const double d = cfg.userDistance;
    const double sigma2 = cfg.noisePower;
    const double vd = cfg.directVariance(d);
    const double vi = cfg.irsVariance(d);

    double acc = 0.0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
      const ComplexVector hk = std::sqrt(vd) * rng.cnormal_vector(M);
      const ComplexVector gk = std::sqrt(vi) * rng.cnormal_vector(N);
      acc += high_mobility_sinr({}, w, theta, hk, gk, r, sigma2, cfg);
    }
    const double mc = acc / trials;
    const double closed = avg_high_mobility_sinr({}, w, r, d, cfg);
    CHECK(std::abs(mc - closed) <= 0.01 * closed);
  }
}
