#include "irsim/channel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace irsim {

int ExperimentConfig::sqrtN() const {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(N))));
}

int ExperimentConfig::groupsPerEdge() const { return sqrtN() / groupEdge; }

int ExperimentConfig::groupCount() const {
  return groupsPerEdge() * groupsPerEdge();
}

double ExperimentConfig::directVariance(double distance) const {
  return beta / std::pow(distance, alphaUser);
}

double ExperimentConfig::irsVariance(double distance) const {
  return 2.0 * beta / std::pow(distance, alphaUser);
}

void ExperimentConfig::validate() const {
  const int root = sqrtN();
  if (root * root != N) throw InvalidInput("config: N must be a perfect square");
  if (groupEdge <= 0 || root % groupEdge != 0)
    throw InvalidInput("config: sqrt(N) must be divisible by groupEdge");
  if (M <= 0 || L < 0 || K < 0) throw InvalidInput("config: bad array sizes");
  if (M < L + 1)
    throw InvalidInput("config: M must be at least L+1 for a null space");
  if (beta <= 0.0 || userDistance <= 0.0 || noisePower <= 0.0 ||
      wavelength <= 0.0 || elementSpacing <= 0.0)
    throw InvalidInput("config: gains, distances, and powers must be positive");
  if (sinrTargetsLow.size() != L)
    throw InvalidInput("config: sinrTargetsLow must have one entry per user");
  for (Eigen::Index i = 0; i < sinrTargetsLow.size(); ++i)
    if (sinrTargetsLow(i) <= 0.0)
      throw InvalidInput("config: SINR targets must be positive");
  if (K > 0 && sinrTargetHigh <= 0.0)
    throw InvalidInput("config: SINR targets must be positive");
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Vector3 parse_vec3(const std::string& s) {
  Vector3 v;
  std::stringstream ss(s);
  char comma;
  if (!(ss >> v(0) >> comma >> v(1) >> comma >> v(2)))
    throw IoError("config: expected x,y,z triple, got '" + s + "'");
  return v;
}

RealVector parse_list(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  return Eigen::Map<RealVector>(vals.data(), vals.size());
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    kv[key] = val;
  }

  bool targets_set = false;
  for (const auto& [key, val] : kv) {
    if (key == "M") cfg.M = std::stoi(val);
    else if (key == "N") cfg.N = std::stoi(val);
    else if (key == "groupEdge") cfg.groupEdge = std::stoi(val);
    else if (key == "L") cfg.L = std::stoi(val);
    else if (key == "K") cfg.K = std::stoi(val);
    else if (key == "beta") cfg.beta = db_to_linear(std::stod(val));
    else if (key == "alphaBsIrs") cfg.alphaBsIrs = std::stod(val);
    else if (key == "alphaUser") cfg.alphaUser = std::stod(val);
    else if (key == "userDistance") cfg.userDistance = std::stod(val);
    else if (key == "ricianFactorDb") cfg.ricianFactorDb = std::stod(val);
    else if (key == "noisePower")
      cfg.noisePower = db_to_linear(std::stod(val) - 30.0);  // dBm -> W
    else if (key == "wavelength") cfg.wavelength = std::stod(val);
    else if (key == "elementSpacing") cfg.elementSpacing = std::stod(val);
    else if (key == "sinrTargetsLow") { cfg.sinrTargetsLow = parse_list(val); targets_set = true; }
    else if (key == "sinrTargetHigh") cfg.sinrTargetHigh = std::stod(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "bsCenter") cfg.bsCenter = parse_vec3(val);
    else if (key == "irsCenter") cfg.irsCenter = parse_vec3(val);
    else throw IoError("config: unknown key '" + key + "'");
  }
  if (!targets_set) cfg.sinrTargetsLow = RealVector::Constant(cfg.L, 10.0);
  if (cfg.sinrTargetsLow.size() == 1 && cfg.L > 1)
    cfg.sinrTargetsLow = RealVector::Constant(cfg.L, cfg.sinrTargetsLow(0));
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

SystemGeometry build_geometry(const ExperimentConfig& cfg, Rng& rng) {
  cfg.validate();
  SystemGeometry geom;

  geom.bsAntennaPositions.reserve(cfg.M);
  const double bsPitch = cfg.wavelength / 2.0;
  for (int m = 0; m < cfg.M; ++m) {
    const double offset = (m - (cfg.M - 1) / 2.0) * bsPitch;
    geom.bsAntennaPositions.push_back(cfg.bsCenter + Vector3(0.0, offset, 0.0));
  }

  const int root = cfg.sqrtN();
  const int gpe = cfg.groupsPerEdge();
  geom.irsElementPositions.reserve(cfg.N);
  geom.groupIndex.reserve(cfg.N);
  for (int iz = 0; iz < root; ++iz) {
    for (int ix = 0; ix < root; ++ix) {
      const double dx = (ix - (root - 1) / 2.0) * cfg.elementSpacing;
      const double dz = (iz - (root - 1) / 2.0) * cfg.elementSpacing;
      geom.irsElementPositions.push_back(cfg.irsCenter + Vector3(dx, 0.0, dz));
      geom.groupIndex.push_back((iz / cfg.groupEdge) * gpe + ix / cfg.groupEdge);
    }
  }

  // Users at fixed distance on the x-y plane, azimuth uniform over the front
  // half-space arc around the IRS boresight (+y).
  geom.userPositions.reserve(cfg.L + cfg.K);
  for (int j = 0; j < cfg.L + cfg.K; ++j) {
    const double az = rng.uniform(-80.0 * M_PI / 180.0, 80.0 * M_PI / 180.0);
    geom.userPositions.push_back(Vector3(cfg.userDistance * std::sin(az),
                                         cfg.userDistance * std::cos(az), 0.0));
  }
  return geom;
}

ComplexMatrix gen_bs_irs_channel(const SystemGeometry& geom,
                                 const ExperimentConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(geom.irsElementPositions.size());
  const auto m = static_cast<Eigen::Index>(geom.bsAntennaPositions.size());
  ComplexMatrix r(n, m);
  const double k0 = 2.0 * M_PI / cfg.wavelength;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d =
          (geom.irsElementPositions[i] - geom.bsAntennaPositions[j]).norm();
      if (d <= 0.0)
        throw DegenerateGeometry("gen_bs_irs_channel: coincident positions");
      r(i, j) = std::sqrt(cfg.beta / std::pow(d, cfg.alphaBsIrs)) *
                std::exp(-kImag * (k0 * d));
    }
  }
  return r;
}

void gen_high_mobility_channels(const ExperimentConfig& cfg, Rng& rng,
                                std::vector<ComplexVector>& direct,
                                std::vector<ComplexVector>& irsSide) {
  direct.clear();
  irsSide.clear();
  const double sd = std::sqrt(cfg.directVariance(cfg.userDistance));
  const double si = std::sqrt(cfg.irsVariance(cfg.userDistance));
  for (int k = 0; k < cfg.K; ++k) {
    direct.push_back(sd * rng.cnormal_vector(cfg.M));
    irsSide.push_back(si * rng.cnormal_vector(cfg.N));
  }
}

namespace {

// Unit-magnitude spherical-wave response from a point source.
ComplexVector array_response(const std::vector<Vector3>& elements,
                             const Vector3& source, double wavelength) {
  ComplexVector v(static_cast<Eigen::Index>(elements.size()));
  const double k0 = 2.0 * M_PI / wavelength;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double d = (elements[static_cast<size_t>(i)] - source).norm();
    v(i) = std::exp(-kImag * (k0 * d));
  }
  return v;
}

}  // namespace

void gen_low_mobility_channels(const ExperimentConfig& cfg,
                               const SystemGeometry& geom, Rng& rng,
                               std::vector<ComplexVector>& direct,
                               std::vector<ComplexVector>& irsSide) {
  direct.clear();
  irsSide.clear();
  const double kappa = db_to_linear(cfg.ricianFactorDb);
  const double losW = std::sqrt(kappa / (1.0 + kappa));
  const double nlosW = std::sqrt(1.0 / (1.0 + kappa));
  const double sd = std::sqrt(cfg.directVariance(cfg.userDistance));
  const double si = std::sqrt(cfg.irsVariance(cfg.userDistance));
  for (int l = 0; l < cfg.L; ++l) {
    const Vector3& user = geom.userPositions[static_cast<size_t>(l)];
    ComplexVector hl =
        losW * array_response(geom.bsAntennaPositions, user, cfg.wavelength) +
        nlosW * rng.cnormal_vector(cfg.M);
    ComplexVector gl =
        losW * array_response(geom.irsElementPositions, user, cfg.wavelength) +
        nlosW * rng.cnormal_vector(cfg.N);
    direct.push_back(sd * hl);
    irsSide.push_back(si * gl);
  }
}

ChannelSet realize_channels(const ExperimentConfig& cfg,
                            const SystemGeometry& geom, Rng& rng) {
  ChannelSet ch;
  ch.bsIrs = gen_bs_irs_channel(geom, cfg);
  gen_low_mobility_channels(cfg, geom, rng, ch.directLow, ch.irsLow);
  gen_high_mobility_channels(cfg, rng, ch.directHigh, ch.irsHigh);
  return ch;
}

}  // namespace irsim
