#include "irsim/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "irsim/numerics.hpp"

namespace irsim {

namespace {

const std::pair<const char*, SchemeId> kSchemeTable[] = {
    {"ProposedAO_MMSE", SchemeId::ProposedAO_MMSE},
    {"ProposedAO_ZF", SchemeId::ProposedAO_ZF},
    {"RandomPhase_MMSE", SchemeId::RandomPhase_MMSE},
    {"DftCodebook_MMSE", SchemeId::DftCodebook_MMSE},
    {"NoIrs_MMSE", SchemeId::NoIrs_MMSE},
    {"NoIrs_ZF", SchemeId::NoIrs_ZF},
    {"ProposedDiversity", SchemeId::ProposedDiversity},
    {"NullSpaceNoIrs", SchemeId::NullSpaceNoIrs},
    {"NullSpaceDumbIrs", SchemeId::NullSpaceDumbIrs},
    {"NullSpaceAlamouti", SchemeId::NullSpaceAlamouti},
    {"BeamformedAlamoutiNoIrs", SchemeId::BeamformedAlamoutiNoIrs},
};

RealVector stacked_targets(const ExperimentConfig& cfg) {
  const bool high = cfg.K > 0;
  RealVector t(cfg.L + (high ? 1 : 0));
  t.head(cfg.L) = cfg.sinrTargetsLow;
  if (high) t(cfg.L) = cfg.sinrTargetHigh;
  return t;
}

}  // namespace

SchemeId parse_scheme(const std::string& name) {
  for (const auto& [tag, id] : kSchemeTable)
    if (name == tag) return id;
  throw InvalidInput("unknown scheme: " + name);
}

std::string scheme_name(SchemeId id) {
  for (const auto& [tag, other] : kSchemeTable)
    if (other == id) return tag;
  throw InvalidInput("unknown scheme id");
}

bool is_ser_scheme(SchemeId id) {
  switch (id) {
    case SchemeId::ProposedDiversity:
    case SchemeId::NullSpaceNoIrs:
    case SchemeId::NullSpaceDumbIrs:
    case SchemeId::NullSpaceAlamouti:
    case SchemeId::BeamformedAlamoutiNoIrs:
      return true;
    default:
      return false;
  }
}

std::pair<PrecoderSet, ReflectState> random_phase_scheme(
    const ExperimentConfig& cfg, const ChannelSet& channels,
    const SystemGeometry& geom, Rng& rng) {
  ReflectState state;
  state.groupPhases = ComplexVector(cfg.groupCount());
  for (Eigen::Index g = 0; g < state.groupPhases.size(); ++g)
    state.groupPhases(g) =
        std::exp(kImag * rng.uniform(0.0, 2.0 * std::numbers::pi));
  PrecoderSet set = transmit_precode(cfg, channels, state.groupPhases,
                                     geom.groupIndex, TransmitMethod::MMSE);
  return {std::move(set), std::move(state)};
}

std::vector<ComplexVector> dft_codebook(int groupsPerEdge) {
  if (groupsPerEdge < 1) throw InvalidInput("dft_codebook: bad grid");
  const int gpe = groupsPerEdge;
  std::vector<ComplexVector> words;
  words.reserve(static_cast<size_t>(gpe) * static_cast<size_t>(gpe));
  for (int p = 0; p < gpe; ++p) {
    for (int q = 0; q < gpe; ++q) {
      ComplexVector word(gpe * gpe);
      for (int g = 0; g < gpe * gpe; ++g) {
        const int ix = g % gpe;
        const int iz = g / gpe;
        word(g) = std::exp(kImag * (2.0 * std::numbers::pi *
                                    (p * ix + q * iz) / gpe));
      }
      words.push_back(std::move(word));
    }
  }
  return words;
}

std::pair<PrecoderSet, ReflectState> dft_codebook_scheme(
    const ExperimentConfig& cfg, const ChannelSet& channels,
    const SystemGeometry& geom) {
  const auto words = dft_codebook(cfg.groupsPerEdge());
  ReflectState state;
  double bestGain = -std::numeric_limits<double>::infinity();
  for (const auto& word : words) {
    ReflectState cand;
    cand.groupPhases = word;
    const ComplexVector element = cand.elementPhases(geom.groupIndex);
    double minGain = std::numeric_limits<double>::infinity();
    for (int l = 0; l < cfg.L; ++l) {
      const ComplexVector hbar = effective_low_channel(
          channels.directLow[static_cast<size_t>(l)],
          channels.irsLow[static_cast<size_t>(l)], element, channels.bsIrs,
          0.0);
      minGain = std::min(minGain, hbar.squaredNorm());
    }
    if (minGain > bestGain) {
      bestGain = minGain;
      state = std::move(cand);
    }
  }
  PrecoderSet set = transmit_precode(cfg, channels, state.groupPhases,
                                     geom.groupIndex, TransmitMethod::MMSE);
  return {std::move(set), std::move(state)};
}

PrecoderSet no_irs_scheme(const ExperimentConfig& cfg,
                          const ChannelSet& channels, TransmitMethod method) {
  const ComplexMatrix zeroR = ComplexMatrix::Zero(cfg.N, cfg.M);
  std::vector<ComplexVector> eff = channels.directLow;
  const RealVector distances = RealVector::Constant(cfg.K, cfg.userDistance);
  const CorrelationSet corr = build_correlations(
      eff, zeroR, cfg.noisePower, distances, cfg.alphaUser, cfg.beta);
  const RealVector targets = stacked_targets(cfg);
  if (method == TransmitMethod::MMSE) return mmse_precode(corr, eff, targets);
  return zf_with_null_space(eff, zeroR, targets, cfg.noisePower,
                            corr.sigmaBarSq, cfg.K > 0);
}

DiversityBeams diversity_beams(const ExperimentConfig& cfg,
                               const ChannelSet& channels, SchemeId scheme,
                               double powerWatts) {
  if (!is_ser_scheme(scheme))
    throw InvalidInput("diversity_beams: not a SER scheme");
  if (powerWatts <= 0.0) throw InvalidInput("diversity_beams: bad power");

  const bool irsInNullSpace = scheme == SchemeId::ProposedDiversity ||
                              scheme == SchemeId::NullSpaceDumbIrs ||
                              scheme == SchemeId::NullSpaceAlamouti;
  const bool irsOnPayload = scheme == SchemeId::ProposedDiversity ||
                            scheme == SchemeId::NullSpaceDumbIrs;
  const bool twoBeams = scheme == SchemeId::NullSpaceAlamouti ||
                        scheme == SchemeId::BeamformedAlamoutiNoIrs;

  const ComplexVector thetaNull =
      irsInNullSpace ? ComplexVector::Ones(cfg.N) : ComplexVector::Zero(cfg.N);

  ComplexMatrix nullBasis;
  if (cfg.L == 0) {
    nullBasis = ComplexMatrix::Identity(cfg.M, cfg.M);
  } else {
    ComplexMatrix stacked(cfg.L, cfg.M);
    for (int l = 0; l < cfg.L; ++l)
      stacked.row(l) = effective_low_channel(
                           channels.directLow[static_cast<size_t>(l)],
                           channels.irsLow[static_cast<size_t>(l)], thetaNull,
                           channels.bsIrs, 0.0)
                           .adjoint();
    nullBasis = null_space_basis(stacked);
  }
  if (twoBeams && nullBasis.cols() < 2)
    throw EmptyNullSpace("diversity_beams: Alamouti needs two null directions");

  DiversityBeams out;
  out.thetaBar = irsOnPayload ? ComplexVector::Ones(cfg.N)
                              : ComplexVector::Zero(cfg.N);
  out.useSpaceTimePhases = scheme == SchemeId::ProposedDiversity;

  const ComplexMatrix a =
      ComplexMatrix::Identity(cfg.M, cfg.M) +
      2.0 * channels.bsIrs.adjoint() * channels.bsIrs;
  switch (scheme) {
    case SchemeId::ProposedDiversity:
    case SchemeId::NullSpaceDumbIrs: {
      const ComplexMatrix restricted =
          hermitize(nullBasis.adjoint() * a * nullBasis);
      const EigResult eig = hermitian_eig(restricted);
      out.primary = std::sqrt(powerWatts) * (nullBasis * eig.eigenvectors.col(0));
      break;
    }
    case SchemeId::NullSpaceNoIrs:
      out.primary = std::sqrt(powerWatts) * nullBasis.col(0);
      break;
    case SchemeId::NullSpaceAlamouti: {
      const ComplexMatrix restricted =
          hermitize(nullBasis.adjoint() * a * nullBasis);
      const EigResult eig = hermitian_eig(restricted);
      const double half = std::sqrt(powerWatts / 2.0);
      out.primary = half * (nullBasis * eig.eigenvectors.col(0));
      out.secondary = half * (nullBasis * eig.eigenvectors.col(1));
      break;
    }
    case SchemeId::BeamformedAlamoutiNoIrs: {
      const double half = std::sqrt(powerWatts / 2.0);
      out.primary = half * nullBasis.col(0);
      out.secondary = half * nullBasis.col(1);
      break;
    }
    default:
      break;
  }
  return out;
}

namespace {

int draw_index(Rng& rng, int order) {
  return static_cast<int>(rng.raw() % static_cast<std::uint64_t>(order));
}

}  // namespace

double simulate_ser(const ExperimentConfig& cfg, const ChannelSet& channels,
                    SchemeId scheme, double powerWatts, int pairs, int order,
                    Rng& rng) {
  if (pairs < 1) throw InvalidInput("simulate_ser: pairs must be positive");
  const DiversityBeams beams = diversity_beams(cfg, channels, scheme,
                                               powerWatts);
  const double noiseStd = std::sqrt(cfg.noisePower);
  const double dvar = cfg.directVariance(cfg.userDistance);
  const double ivar = cfg.irsVariance(cfg.userDistance);
  const Interferers none;

  long errors = 0;
  for (int t = 0; t < pairs; ++t) {
    // Fading is i.i.d. across coded pairs and frozen within one.
    const ComplexVector hk = std::sqrt(dvar) * rng.cnormal_vector(cfg.M);
    const ComplexVector gk = std::sqrt(ivar) * rng.cnormal_vector(cfg.N);
    const PskSymbol s1 = psk_modulate(draw_index(rng, order), order);
    const PskSymbol s2 = psk_modulate(draw_index(rng, order), order);

    switch (scheme) {
      case SchemeId::ProposedDiversity: {
        const StcPairFrame frame =
            simulate_pair(s1, s2, beams.primary, hk, gk, beams.thetaBar,
                          channels.bsIrs, none, noiseStd, rng);
        const auto [d1, d2] = detect(frame.combined, order);
        errors += (d1 != s1.index) + (d2 != s2.index);
        break;
      }
      case SchemeId::NullSpaceNoIrs:
      case SchemeId::NullSpaceDumbIrs: {
        const EffectiveGains gains = effective_gains(
            hk, gk, beams.thetaBar, channels.bsIrs, beams.primary);
        const Complex eff = gains.direct + gains.reflected;  // phi = 0
        for (const PskSymbol& s : {s1, s2}) {
          const Complex y = eff * s.value + noiseStd * rng.cnormal();
          errors += detect_symbol(std::conj(eff) * y, order) != s.index;
        }
        break;
      }
      case SchemeId::NullSpaceAlamouti:
      case SchemeId::BeamformedAlamoutiNoIrs: {
        const Complex h1 = hk.dot(beams.primary);
        const Complex h2 = hk.dot(beams.secondary);
        const Complex y1 =
            h1 * s1.value + h2 * s2.value + noiseStd * rng.cnormal();
        const Complex y2 = -h1 * std::conj(s2.value) +
                           h2 * std::conj(s1.value) + noiseStd * rng.cnormal();
        const auto combined = stc_combine(h1, h2, y1, y2);
        const auto [d1, d2] = detect(combined, order);
        errors += (d1 != s1.index) + (d2 != s2.index);
        break;
      }
      default:
        throw InvalidInput("simulate_ser: not a SER scheme");
    }
  }
  return static_cast<double>(errors) / (2.0 * static_cast<double>(pairs));
}

}  // namespace irsim
