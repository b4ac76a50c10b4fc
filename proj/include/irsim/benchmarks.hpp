#pragma once

#include <string>
#include <utility>
#include <vector>

#include "irsim/ao.hpp"
#include "irsim/channel.hpp"
#include "irsim/stcode.hpp"

namespace irsim {

enum class SchemeId {
  ProposedAO_MMSE,
  ProposedAO_ZF,
  RandomPhase_MMSE,
  DftCodebook_MMSE,
  NoIrs_MMSE,
  NoIrs_ZF,
  ProposedDiversity,
  NullSpaceNoIrs,
  NullSpaceDumbIrs,
  NullSpaceAlamouti,
  BeamformedAlamoutiNoIrs,
};

SchemeId parse_scheme(const std::string& name);
std::string scheme_name(SchemeId id);
bool is_ser_scheme(SchemeId id);

// Uniform i.i.d. group phases followed by MMSE transmit precoding.
std::pair<PrecoderSet, ReflectState> random_phase_scheme(
    const ExperimentConfig& cfg, const ChannelSet& channels,
    const SystemGeometry& geom, Rng& rng);

// Separable 2D-DFT codebook over the group grid; the word maximizing the
// minimum effective low-mobility channel gain is kept.
std::vector<ComplexVector> dft_codebook(int groupsPerEdge);
std::pair<PrecoderSet, ReflectState> dft_codebook_scheme(
    const ExperimentConfig& cfg, const ChannelSet& channels,
    const SystemGeometry& geom);

// Baseline without IRS: zeroed reflect path, then MMSE or ZF.
PrecoderSet no_irs_scheme(const ExperimentConfig& cfg,
                          const ChannelSet& channels, TransmitMethod method);

// Beam construction for one SER scheme at a given total transmit power for
// the high-mobility payload. Two beams only for the Alamouti variants.
struct DiversityBeams {
  ComplexVector primary;
  ComplexVector secondary;        // empty unless Alamouti
  ComplexVector thetaBar;         // element-level reflection seen by the payload
  bool useSpaceTimePhases = false;  // common-phase schedule of the proposed code
};

DiversityBeams diversity_beams(const ExperimentConfig& cfg,
                               const ChannelSet& channels, SchemeId scheme,
                               double powerWatts);

// Monte Carlo SER at one transmit power point. High-mobility fading is
// redrawn per coded pair; low-mobility channels fix the null space.
double simulate_ser(const ExperimentConfig& cfg, const ChannelSet& channels,
                    SchemeId scheme, double powerWatts, int pairs, int order,
                    Rng& rng);

}  // namespace irsim
