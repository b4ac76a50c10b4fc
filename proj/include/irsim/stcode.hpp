#pragma once

#include <array>
#include <vector>

#include "irsim/channel.hpp"
#include "irsim/rng.hpp"
#include "irsim/types.hpp"

namespace irsim {

struct PskSymbol {
  int index = 0;
  int order = 2;
  Complex value{1.0, 0.0};
};

PskSymbol psk_modulate(int index, int order);

// Two-slot schedule: slot 1 sends w*s1 with the IRS common phase at the
// symbol phase difference, slot 2 sends -w*conj(s2) with the phase advanced
// by pi. Angles reduced to [0, 2*pi).
struct StcSchedule {
  ComplexVector beamSlot1;
  ComplexVector beamSlot2;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

StcSchedule encode_pair(const PskSymbol& s1, const PskSymbol& s2,
                        const ComplexVector& beam);

// Effective scalar gains of the direct and IRS-reflected channels for one
// high-mobility user: h = h_k' w, g = g_k' diag(thetaBar) R w.
struct EffectiveGains {
  Complex direct;
  Complex reflected;
};

EffectiveGains effective_gains(const ComplexVector& hk, const ComplexVector& gk,
                               const ComplexVector& thetaBar,
                               const ComplexMatrix& bsIrs,
                               const ComplexVector& beam);

struct StcPairFrame {
  StcSchedule schedule;
  Complex effectiveDirect;
  Complex effectiveReflected;
  std::array<Complex, 2> received;
  std::array<Complex, 2> combined;
};

// Per-slot interference: each low-mobility beam carries an independent
// unit-power PSK symbol per slot.
struct Interferers {
  std::vector<ComplexVector> beams;  // low-mobility beams (full power)
  int symbolOrder = 8;
};

// Simulates one coded pair through the two received-signal equations and
// applies the matched 2x2 combiner. Channels are held fixed across both
// slots. noiseStd is per-slot complex noise standard deviation (sqrt(sigma^2)).
StcPairFrame simulate_pair(const PskSymbol& s1, const PskSymbol& s2,
                           const ComplexVector& beam, const ComplexVector& hk,
                           const ComplexVector& gk,
                           const ComplexVector& thetaBar,
                           const ComplexMatrix& bsIrs,
                           const Interferers& interferers, double noiseStd,
                           Rng& rng);

// Combines a received pair (y1, y2) with the 2x2 equivalent channel built
// from (h, g): ybar = H' [y1, conj(y2)].
std::array<Complex, 2> stc_combine(Complex h, Complex g, Complex y1, Complex y2);

// Coherent nearest-constellation detection: argmax Re(conj(c) * y).
std::pair<int, int> detect(const std::array<Complex, 2>& combined, int order);
int detect_symbol(Complex y, int order);

// Instantaneous SINR at one high-mobility user for a full precoder set.
double high_mobility_sinr(const std::vector<ComplexVector>& lowBeams,
                          const ComplexVector& highBeam,
                          const ComplexVector& thetaBar,
                          const ComplexVector& hk, const ComplexVector& gk,
                          const ComplexMatrix& bsIrs, double sigma2,
                          const ExperimentConfig& cfg);

// Rayleigh-averaged SINR: depends only on the beams and R.
double avg_high_mobility_sinr(const std::vector<ComplexVector>& lowBeams,
                              const ComplexVector& highBeam,
                              const ComplexMatrix& bsIrs, double distance,
                              const ExperimentConfig& cfg);

}  // namespace irsim
