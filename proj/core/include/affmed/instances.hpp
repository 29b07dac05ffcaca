#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affmed/geometry.hpp"

namespace affmed {

enum class DistKind { intuition_gamma, heavytailed_lb, breakdown_lb, quant_lb, gaussian, custom_discrete };

std::string dist_kind_name(DistKind kind);

// A distribution is a finite atom table plus optional Rademacher cube noise
// (X = atom + sigma * Z, Z uniform on {-1,+1}^d), or a Gaussian. The make_*
// constructors fill the table and remember the construction parameters so
// specs can be serialized compactly.
struct DistributionSpec {
  DistKind kind = DistKind::custom_discrete;
  int d = 1;
  Matrix atoms;      // one atom per row, canonical order e_1..e_d then origin/1-atom
  Vector probs;      // nonnegative, sums to 1 within 1e-12
  double sigma = 0.0;
  Vector g_mean;     // gaussian only
  Matrix g_sqrt;     // gaussian only: X = g_mean + g_sqrt * N(0, I)
  // construction parameters, kept for reporting and serialization
  double gamma = 0.0;
  double eps = 0.0;
  double eta = 0.0;
  double r = 0.0;
  int index = -1;    // family member index, -1 when not applicable
};

struct Moments {
  Vector mean;
  Matrix cov;
  bool nonsingular = false;
};

DistributionSpec make_intuition_gamma(int d, double gamma, double sigma = 0.0);
DistributionSpec make_heavytailed(int d, int index, double eps);
DistributionSpec make_breakdown(int d, int index, double r);  // index in 0..d+1
DistributionSpec make_quant(int d, int index, double eta);    // index in 0..d
DistributionSpec make_gaussian(int d);
DistributionSpec make_gaussian(Vector mean, Matrix cov_sqrt);
DistributionSpec make_custom_discrete(Matrix atoms, Vector probs, double sigma = 0.0);

PointSet sample(const DistributionSpec& spec, int n, std::uint64_t seed);
Moments moments(const DistributionSpec& spec);

// eps = (1/4) sqrt(d ln(1/(d delta)) / (n ln d)); requires d delta < 1.
double heavytailed_eps(int n, int d, double delta);

enum class ContaminationMode { none, huber_mix, replace };
enum class ReplaceStrategy { point_mass_at, far_along_min_variance };

struct ContaminationSpec {
  ContaminationMode mode = ContaminationMode::none;
  double eta = 0.0;
  // huber_mix resamples each point independently from the payload with
  // probability eta.
  std::optional<DistributionSpec> payload;
  // replace overwrites exactly floor(eta n) seeded-random points.
  ReplaceStrategy strategy = ReplaceStrategy::point_mass_at;
  Vector point;             // point_mass_at target
  double far_scale = 0.0;   // far_along_min_variance multiplier
  // Moments source for the min-variance direction; empirical moments of the
  // data are used when absent.
  std::optional<DistributionSpec> reference;
};

struct ContaminationResult {
  PointSet points;
  std::vector<int> corrupted;
};

ContaminationResult contaminate(const PointSet& pts, const ContaminationSpec& spec,
                                std::uint64_t seed);

// One member of a lower-bound family: the distribution, and where defined
// the witness P with member_0 = (1 - weight) * dist + weight * witness.
struct FamilyMember {
  DistributionSpec dist;
  std::optional<DistributionSpec> witness;
  double weight = 0.0;
};

std::vector<FamilyMember> breakdown_family(int d, double r);  // members 0..d+1
std::vector<FamilyMember> quant_family(int d, double eta);    // members 0..d

}  // namespace affmed
