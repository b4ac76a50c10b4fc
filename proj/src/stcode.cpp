#include "irsim/stcode.hpp"

#include <cmath>
#include <limits>

namespace irsim {

namespace {

double wrap_angle(double a) {
  const double twoPi = 2.0 * M_PI;
  a = std::fmod(a, twoPi);
  if (a < 0.0) a += twoPi;
  return a;
}

}  // namespace

PskSymbol psk_modulate(int index, int order) {
  if (order < 2) throw InvalidInput("psk_modulate: order must be >= 2");
  if (index < 0 || index >= order)
    throw InvalidInput("psk_modulate: index out of range");
  PskSymbol s;
  s.index = index;
  s.order = order;
  const double a = 2.0 * M_PI * index / order;
  s.value = Complex(std::cos(a), std::sin(a));
  return s;
}

StcSchedule encode_pair(const PskSymbol& s1, const PskSymbol& s2,
                        const ComplexVector& beam) {
  StcSchedule sched;
  sched.beamSlot1 = beam * s1.value;
  sched.beamSlot2 = -beam * std::conj(s2.value);
  const double diff = std::arg(s2.value) - std::arg(s1.value);
  sched.phi1 = wrap_angle(diff);
  sched.phi2 = wrap_angle(diff + M_PI);
  return sched;
}

EffectiveGains effective_gains(const ComplexVector& hk, const ComplexVector& gk,
                               const ComplexVector& thetaBar,
                               const ComplexMatrix& bsIrs,
                               const ComplexVector& beam) {
  EffectiveGains eg;
  eg.direct = hk.dot(beam);  // Eigen dot conjugates the left operand
  eg.reflected =
      (gk.conjugate().array() * thetaBar.array() * (bsIrs * beam).array()).sum();
  return eg;
}

std::array<Complex, 2> stc_combine(Complex h, Complex g, Complex y1,
                                   Complex y2) {
  // H = [[h, g], [conj(g), -conj(h)]]; ybar = H' [y1, conj(y2)].
  const Complex y2c = std::conj(y2);
  return {std::conj(h) * y1 + g * y2c, std::conj(g) * y1 - h * y2c};
}

StcPairFrame simulate_pair(const PskSymbol& s1, const PskSymbol& s2,
                           const ComplexVector& beam, const ComplexVector& hk,
                           const ComplexVector& gk,
                           const ComplexVector& thetaBar,
                           const ComplexMatrix& bsIrs,
                           const Interferers& interferers, double noiseStd,
                           Rng& rng) {
  StcPairFrame frame;
  frame.schedule = encode_pair(s1, s2, beam);
  const EffectiveGains eg = effective_gains(hk, gk, thetaBar, bsIrs, beam);
  frame.effectiveDirect = eg.direct;
  frame.effectiveReflected = eg.reflected;

  const Complex e1 = std::exp(kImag * frame.schedule.phi1);
  const Complex e2 = std::exp(kImag * frame.schedule.phi2);

  // Interference coefficients: direct and reflected parts per low beam.
  Complex interf1 = 0.0, interf2 = 0.0;
  for (const auto& wl : interferers.beams) {
    const EffectiveGains il = effective_gains(hk, gk, thetaBar, bsIrs, wl);
    const Complex sA =
        psk_modulate(static_cast<int>(rng.raw() % interferers.symbolOrder),
                     interferers.symbolOrder)
            .value;
    const Complex sB =
        psk_modulate(static_cast<int>(rng.raw() % interferers.symbolOrder),
                     interferers.symbolOrder)
            .value;
    interf1 += (il.direct + e1 * il.reflected) * sA;
    interf2 += (il.direct + e2 * il.reflected) * sB;
  }

  const Complex n1 = noiseStd * rng.cnormal();
  const Complex n2 = noiseStd * rng.cnormal();

  // Received-signal equations for the two slots.
  frame.received[0] =
      (eg.direct + e1 * eg.reflected) * s1.value + interf1 + n1;
  frame.received[1] =
      -(eg.direct + e2 * eg.reflected) * std::conj(s2.value) + interf2 + n2;

  frame.combined = stc_combine(eg.direct, eg.reflected, frame.received[0],
                               frame.received[1]);
  return frame;
}

int detect_symbol(Complex y, int order) {
  int best = 0;
  double bestMetric = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < order; ++i) {
    const double a = 2.0 * M_PI * i / order;
    const double metric = std::real(std::conj(Complex(std::cos(a), std::sin(a))) * y);
    if (metric > bestMetric + 1e-18) {
      bestMetric = metric;
      best = i;
    }
  }
  return best;
}

std::pair<int, int> detect(const std::array<Complex, 2>& combined, int order) {
  if (order < 2) throw InvalidInput("detect: order must be >= 2");
  return {detect_symbol(combined[0], order), detect_symbol(combined[1], order)};
}

double high_mobility_sinr(const std::vector<ComplexVector>& lowBeams,
                          const ComplexVector& highBeam,
                          const ComplexVector& thetaBar,
                          const ComplexVector& hk, const ComplexVector& gk,
                          const ComplexMatrix& bsIrs, double sigma2,
                          const ExperimentConfig& cfg) {
  const EffectiveGains eg = effective_gains(hk, gk, thetaBar, bsIrs, highBeam);
  const double num = std::norm(eg.direct) + std::norm(eg.reflected);
  const double pd = cfg.directVariance(cfg.userDistance);
  const double pi2 = cfg.irsVariance(cfg.userDistance);
  double den = sigma2;
  for (const auto& wl : lowBeams)
    den += pd * wl.squaredNorm() + pi2 * (bsIrs * wl).squaredNorm();
  return num / den;
}

double avg_high_mobility_sinr(const std::vector<ComplexVector>& lowBeams,
                              const ComplexVector& highBeam,
                              const ComplexMatrix& bsIrs, double distance,
                              const ExperimentConfig& cfg) {
  auto quad = [&](const ComplexVector& w) {
    return w.squaredNorm() + 2.0 * (bsIrs * w).squaredNorm();
  };
  double den = std::pow(distance, cfg.alphaUser) * cfg.noisePower / cfg.beta;
  for (const auto& wl : lowBeams) den += quad(wl);
  return quad(highBeam) / den;
}

}  // namespace irsim
