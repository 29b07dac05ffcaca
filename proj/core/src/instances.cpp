#include "affmed/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "affmed/rng.hpp"

namespace affmed {

namespace {

void validate_discrete(const DistributionSpec& spec) {
  if (spec.atoms.rows() != spec.probs.size()) {
    throw InvalidInput("distribution: atom and probability counts differ");
  }
  if (spec.atoms.cols() != spec.d) throw InvalidInput("distribution: atom dimension mismatch");
  if (spec.sigma < 0.0) throw InvalidInput("distribution: sigma must be nonnegative");
  double sum = 0.0;
  for (int i = 0; i < spec.probs.size(); ++i) {
    if (!(spec.probs[i] >= -1e-15)) throw InvalidInput("distribution: negative probability");
    sum += spec.probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("distribution: probabilities must sum to 1");
  if (!spec.atoms.allFinite()) throw InvalidInput("distribution: atoms must be finite");
}

// Canonical support e_1..e_d plus one extra atom (origin or 1/d).
Matrix basis_table(int d, const Vector& last) {
  Matrix atoms = Matrix::Zero(d + 1, d);
  for (int j = 0; j < d; ++j) atoms(j, j) = 1.0;
  atoms.row(d) = last.transpose();
  return atoms;
}

}  // namespace

std::string dist_kind_name(DistKind kind) {
  switch (kind) {
    case DistKind::intuition_gamma: return "intuition_gamma";
    case DistKind::heavytailed_lb: return "heavytailed_lb";
    case DistKind::breakdown_lb: return "breakdown_lb";
    case DistKind::quant_lb: return "quant_lb";
    case DistKind::gaussian: return "gaussian";
    case DistKind::custom_discrete: return "custom_discrete";
  }
  return "unknown";
}

DistributionSpec make_intuition_gamma(int d, double gamma, double sigma) {
  if (d < 1) throw InvalidInput("intuition_gamma: d must be positive");
  if (gamma < 0.0 || gamma > static_cast<double>(d) / (d + 1)) {
    throw InvalidInput("intuition_gamma: gamma out of range");
  }
  DistributionSpec spec;
  spec.kind = DistKind::intuition_gamma;
  spec.d = d;
  spec.gamma = gamma;
  spec.sigma = sigma;
  spec.atoms = basis_table(d, Vector::Zero(d));
  spec.probs = Vector::Constant(d + 1, 1.0 / (d + 1) - gamma / d);
  spec.probs[0] = 1.0 / (d + 1) + gamma;
  validate_discrete(spec);
  return spec;
}

DistributionSpec make_heavytailed(int d, int index, double eps) {
  if (d < 2) throw InvalidInput("heavytailed_lb: d must be at least 2");
  if (index < 1 || index > d) throw InvalidInput("heavytailed_lb: index must lie in 1..d");
  if (eps <= 0.0) throw InvalidInput("heavytailed_lb: eps must be positive");
  const double e2 = eps * eps;
  const double origin = 1.0 - (d - 1) * e2 / d - e2 / (d * static_cast<double>(d));
  if (origin < 0.0) throw InvalidInput("heavytailed_lb: eps too large for d");
  DistributionSpec spec;
  spec.kind = DistKind::heavytailed_lb;
  spec.d = d;
  spec.index = index;
  spec.eps = eps;
  spec.atoms = basis_table(d, Vector::Zero(d));
  spec.probs = Vector::Constant(d + 1, e2 / d);
  spec.probs[index - 1] = e2 / (d * static_cast<double>(d));
  spec.probs[d] = origin;
  validate_discrete(spec);
  return spec;
}

DistributionSpec make_breakdown(int d, int index, double r) {
  if (d < 2) throw InvalidInput("breakdown_lb: d must be at least 2");
  if (index < 0 || index > d + 1) throw InvalidInput("breakdown_lb: index must lie in 0..d+1");
  if (r <= 0.0) throw InvalidInput("breakdown_lb: r must be positive");
  DistributionSpec spec;
  spec.kind = DistKind::breakdown_lb;
  spec.d = d;
  spec.index = index;
  spec.r = r;
  spec.sigma = 1.0 / (2.0 * d * r);
  spec.atoms = basis_table(d, Vector::Zero(d));
  if (index == 0) {
    spec.probs = Vector::Constant(d + 1, 1.0 / (d + 1));
  } else if (index <= d) {
    spec.probs = Vector::Constant(d + 1, 1.0 / d);
    spec.probs[index - 1] = 0.0;
  } else {
    spec.probs = Vector::Constant(d + 1, 1.0 / d);
    spec.probs[d] = 0.0;
  }
  validate_discrete(spec);
  return spec;
}

DistributionSpec make_quant(int d, int index, double eta) {
  if (d < 2) throw InvalidInput("quant_lb: d must be at least 2");
  if (index < 0 || index > d) throw InvalidInput("quant_lb: index must lie in 0..d");
  if (eta <= 0.0 || eta >= 1.0 / (d + 1)) {
    throw InvalidInput("quant_lb: eta must lie in (0, 1/(d+1))");
  }
  DistributionSpec spec;
  spec.kind = DistKind::quant_lb;
  spec.d = d;
  spec.index = index;
  spec.eta = eta;
  spec.r = 0.5 * std::sqrt(d * eta / (1.0 - d * eta));
  spec.sigma = eta / (4.0 * spec.r);
  spec.atoms = basis_table(d, Vector::Constant(d, 1.0 / d));
  if (index == 0) {
    spec.probs = Vector::Constant(d + 1, eta);
    spec.probs[d] = 1.0 - d * eta;
  } else {
    // Off-index mass eta/(1-eta), not the superficially natural d eta/(d-1):
    // only the former makes member 0 an exact eta-mixture of member i and a
    // point mass at e_i, which is the property this family exists to witness.
    spec.probs = Vector::Constant(d + 1, eta / (1.0 - eta));
    spec.probs[index - 1] = 0.0;
    spec.probs[d] = (1.0 - d * eta) / (1.0 - eta);
  }
  validate_discrete(spec);
  return spec;
}

DistributionSpec make_gaussian(int d) {
  return make_gaussian(Vector::Zero(d), Matrix::Identity(d, d));
}

DistributionSpec make_gaussian(Vector mean, Matrix cov_sqrt) {
  if (mean.size() < 1) throw InvalidInput("gaussian: empty mean");
  if (cov_sqrt.rows() != mean.size() || cov_sqrt.cols() != mean.size()) {
    throw InvalidInput("gaussian: cov_sqrt shape mismatch");
  }
  DistributionSpec spec;
  spec.kind = DistKind::gaussian;
  spec.d = static_cast<int>(mean.size());
  spec.g_mean = std::move(mean);
  spec.g_sqrt = std::move(cov_sqrt);
  return spec;
}

DistributionSpec make_custom_discrete(Matrix atoms, Vector probs, double sigma) {
  if (atoms.rows() < 1 || atoms.cols() < 1) throw InvalidInput("custom_discrete: empty atom table");
  DistributionSpec spec;
  spec.kind = DistKind::custom_discrete;
  spec.d = static_cast<int>(atoms.cols());
  spec.atoms = std::move(atoms);
  spec.probs = std::move(probs);
  spec.sigma = sigma;
  validate_discrete(spec);
  return spec;
}

PointSet sample(const DistributionSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample: n must be positive");
  Rng rng(seed);
  Matrix out(n, spec.d);
  if (spec.kind == DistKind::gaussian) {
    Vector z(spec.d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < spec.d; ++j) z[j] = rng.normal();
      out.row(i) = (spec.g_mean + spec.g_sqrt * z).transpose();
    }
    return PointSet(out);
  }
  validate_discrete(spec);
  const int a = static_cast<int>(spec.probs.size());
  std::vector<double> cum(a);
  double acc = 0.0;
  for (int i = 0; i < a; ++i) {
    acc += spec.probs[i];
    cum[i] = acc;
  }
  cum[a - 1] = 1.0;  // guard against rounding in the final bin
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    const int idx = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    out.row(i) = spec.atoms.row(std::min(idx, a - 1));
    if (spec.sigma > 0.0) {
      for (int j = 0; j < spec.d; ++j) out(i, j) += rng.rademacher(spec.sigma);
    }
  }
  return PointSet(out);
}

Moments moments(const DistributionSpec& spec) {
  Moments m;
  if (spec.kind == DistKind::gaussian) {
    m.mean = spec.g_mean;
    m.cov = spec.g_sqrt * spec.g_sqrt.transpose();
  } else {
    validate_discrete(spec);
    m.mean = spec.atoms.transpose() * spec.probs;
    m.cov = Matrix::Zero(spec.d, spec.d);
    for (int i = 0; i < spec.atoms.rows(); ++i) {
      m.cov += spec.probs[i] * spec.atoms.row(i).transpose() * spec.atoms.row(i);
    }
    m.cov -= m.mean * m.mean.transpose();
    // Independent Rademacher cube noise adds sigma^2 I exactly.
    m.cov += spec.sigma * spec.sigma * Matrix::Identity(spec.d, spec.d);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.cov);
  const double lmax = std::max(0.0, eig.eigenvalues().maxCoeff());
  m.nonsingular = eig.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, lmax);
  return m;
}

double heavytailed_eps(int n, int d, double delta) {
  if (n < 1) throw InvalidInput("heavytailed_eps: n must be positive");
  if (d < 2) throw InvalidInput("heavytailed_eps: d must be at least 2");
  if (delta <= 0.0 || d * delta >= 1.0) {
    throw InvalidInput("heavytailed_eps: need 0 < d delta < 1");
  }
  return 0.25 * std::sqrt(d * std::log(1.0 / (d * delta)) / (n * std::log(static_cast<double>(d))));
}

ContaminationResult contaminate(const PointSet& pts, const ContaminationSpec& spec,
                                std::uint64_t seed) {
  if (spec.eta < 0.0 || spec.eta >= 1.0) throw InvalidInput("contaminate: eta must lie in [0,1)");
  const int n = pts.n();
  const int d = pts.dim();
  if (spec.mode == ContaminationMode::none || spec.eta == 0.0) {
    return ContaminationResult{pts, {}};
  }
  Rng rng(seed);
  Matrix out = pts.matrix();
  std::vector<int> idx;

  if (spec.mode == ContaminationMode::huber_mix) {
    if (!spec.payload) throw InvalidInput("contaminate: huber_mix requires a payload");
    if (spec.payload->d != d) throw InvalidInput("contaminate: payload dimension mismatch");
    for (int i = 0; i < n; ++i) {
      if (rng.uniform01() < spec.eta) idx.push_back(i);
    }
    if (!idx.empty()) {
      PointSet repl = sample(*spec.payload, static_cast<int>(idx.size()), split_seed(seed, 1));
      for (size_t j = 0; j < idx.size(); ++j) out.row(idx[j]) = repl.matrix().row(static_cast<int>(j));
    }
  } else {
    const int count = static_cast<int>(std::floor(spec.eta * n + 1e-9));
    idx = rng.sample_without_replacement(n, count);
    std::sort(idx.begin(), idx.end());
    Vector target;
    if (spec.strategy == ReplaceStrategy::point_mass_at) {
      if (spec.point.size() != d) throw InvalidInput("contaminate: replacement point dimension mismatch");
      target = spec.point;
    } else {
      Vector mean;
      Matrix cov;
      if (spec.reference) {
        const Moments mom = moments(*spec.reference);
        mean = mom.mean;
        cov = mom.cov;
      } else {
        mean = sample_mean(pts);
        cov = sample_cov(pts).matrix();
      }
      if (mean.size() != d) throw InvalidInput("contaminate: reference dimension mismatch");
      Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
      const double lmin = std::max(0.0, eig.eigenvalues()[0]);
      const double lmax = std::max(0.0, eig.eigenvalues().maxCoeff());
      // Step length floored away from zero so a flat direction still moves.
      const double step = std::max(std::sqrt(lmin), 1e-6 * std::max(1.0, std::sqrt(lmax)));
      target = mean + spec.far_scale * step * eig.eigenvectors().col(0);
    }
    for (int i : idx) out.row(i) = target.transpose();
  }
  return ContaminationResult{PointSet(out), std::move(idx)};
}

namespace {

// Checks member_0 = (1 - w) member_i + w witness atom-by-atom on the shared
// canonical table; all masses are exact simple expressions so the identity
// must hold to rounding error.
void check_mixture(const DistributionSpec& d0, const FamilyMember& member, int witness_row) {
  const Vector& p0 = d0.probs;
  const Vector& pi = member.dist.probs;
  const double w = member.weight;
  for (int a = 0; a < p0.size(); ++a) {
    double rhs = (1.0 - w) * pi[a];
    if (a == witness_row) rhs += w;
    if (std::abs(p0[a] - rhs) > 1e-14) {
      throw std::logic_error("lower-bound family: mixture identity failed on an atom");
    }
  }
}

}  // namespace

std::vector<FamilyMember> breakdown_family(int d, double r) {
  if (d <= 3) throw InvalidInput("breakdown_family: d must exceed 3");
  std::vector<FamilyMember> fam(d + 2);
  for (int i = 0; i <= d + 1; ++i) fam[i].dist = make_breakdown(d, i, r);
  const double sigma = fam[0].dist.sigma;
  const double w = 1.0 / (d + 1);
  for (int i = 1; i <= d + 1; ++i) {
    // Witness atom: e_i for members 1..d, the origin for member d+1.
    Vector atom = i <= d ? Vector(Vector::Unit(d, i - 1)) : Vector(Vector::Zero(d));
    Matrix table(1, d);
    table.row(0) = atom.transpose();
    fam[i].witness = make_custom_discrete(table, Vector::Ones(1), sigma);
    fam[i].weight = w;
    check_mixture(fam[0].dist, fam[i], i <= d ? i - 1 : d);
  }
  return fam;
}

std::vector<FamilyMember> quant_family(int d, double eta) {
  if (d <= 3) throw InvalidInput("quant_family: d must exceed 3");
  std::vector<FamilyMember> fam(d + 1);
  for (int i = 0; i <= d; ++i) fam[i].dist = make_quant(d, i, eta);
  const double sigma = fam[0].dist.sigma;
  for (int i = 1; i <= d; ++i) {
    Matrix table(1, d);
    table.row(0) = Vector::Unit(d, i - 1).transpose();
    fam[i].witness = make_custom_discrete(table, Vector::Ones(1), sigma);
    fam[i].weight = eta;
    check_mixture(fam[0].dist, fam[i], i - 1);
  }
  return fam;
}

}  // namespace affmed
