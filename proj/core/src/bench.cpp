#include "affmed/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "affmed/io.hpp"
#include "affmed/rng.hpp"

namespace affmed {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Sweep for certification: 2048 seeded random directions plus the axes, the
// all-ones direction, the normalized error vector, and the analytic optimal
// direction cov^{-1} delta when the solve succeeds.
std::vector<Vector> certificate_directions(const Vector& delta_v, const Matrix& cov,
                                           std::uint64_t seed) {
  const int d = static_cast<int>(delta_v.size());
  std::vector<Vector> dirs;
  dirs.reserve(2048 + 2 * d + 3);
  Rng rng(seed);
  for (int t = 0; t < 2048; ++t) {
    Vector v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.normal();
    const double nrm = v.norm();
    if (nrm > 1e-12) dirs.push_back(v / nrm);
  }
  for (int j = 0; j < d; ++j) dirs.push_back(Vector::Unit(d, j));
  dirs.push_back(Vector::Ones(d) / std::sqrt(static_cast<double>(d)));
  const double dn = delta_v.norm();
  if (dn > 1e-14) {
    dirs.push_back(delta_v / dn);
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() == Eigen::Success) {
      Vector opt = llt.solve(delta_v);
      const double on = opt.norm();
      if (on > 1e-14 && opt.allFinite()) dirs.push_back(opt / on);
    }
  }
  return dirs;
}

struct Score {
  double maha = kNan;
  double cert = kNan;
  std::string note;
};

Score score_against(const Vector& estimate, const DistributionSpec& spec, std::uint64_t seed) {
  Score s;
  const Moments m = moments(spec);
  const Vector delta_v = estimate - m.mean;
  const CertificateResult cert =
      directional_certificate(estimate, m.mean, m.cov, certificate_directions(delta_v, m.cov, seed));
  s.cert = cert.value;
  if (m.nonsingular) {
    s.maha = mahalanobis_norm(delta_v, SpdMatrix(m.cov));
  } else {
    s.note = "singular_cov;certified_lower_bound_only";
  }
  return s;
}

int worker_count() {
  if (const char* env = std::getenv("AFFMED_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string sanitize_note(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

// Fixed-precision float formatting so reruns are byte-identical.
std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& trial_record_fields() {
  static const std::vector<std::string> fields = {
      "family", "d", "n", "eta", "delta", "estimator", "trial", "seed",
      "error_mahalanobis", "error_euclidean", "cert_lower_bound", "outlyingness",
      "k_buckets", "undefined_flag", "runtime_ms", "note"};
  return fields;
}

double mahalanobis_error(const Vector& estimate, const DistributionSpec& spec) {
  const Moments m = moments(spec);
  return mahalanobis_norm(estimate - m.mean, SpdMatrix(m.cov));
}

CertificateResult directional_certificate(const Vector& estimate, const Vector& mean,
                                          const Matrix& cov,
                                          const std::vector<Vector>& directions) {
  CertificateResult res;
  const Vector delta_v = estimate - mean;
  const double scale = std::max(1.0, delta_v.cwiseAbs().maxCoeff());
  const double var_scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  bool any_live = false;
  for (const Vector& v : directions) {
    if (v.size() != delta_v.size()) throw InvalidInput("directional_certificate: dimension mismatch");
    const double var = v.dot(cov * v);
    const double num = std::abs(delta_v.dot(v));
    if (var > 1e-14 * var_scale) {
      any_live = true;
      res.value = std::max(res.value, num / std::sqrt(var));
    } else if (num > 1e-10 * scale) {
      // Offset along a direction where the distribution has no variance.
      res.value = std::numeric_limits<double>::infinity();
      any_live = true;
    }
  }
  res.all_null = !any_live;
  return res;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw InvalidInput("run_experiment: trials must be at least 1");
  if (cfg.cells.empty()) throw InvalidInput("run_experiment: empty grid");
  if (cfg.estimators.empty()) throw InvalidInput("run_experiment: no estimators");

  struct Task {
    int cell = 0;
    int trial = 0;
  };
  std::vector<Task> tasks;
  for (int c = 0; c < static_cast<int>(cfg.cells.size()); ++c) {
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({c, t});
  }

  std::vector<std::vector<TrialRecord>> per_task(tasks.size());

  auto run_task = [&](const Task& task) {
    const GridCell& cell = cfg.cells[task.cell];
    const std::uint64_t trial_seed = split_seed(cfg.base_seed, static_cast<std::uint64_t>(task.cell),
                                                static_cast<std::uint64_t>(task.trial));
    std::vector<TrialRecord> out;
    TrialRecord base;
    base.family = cell.family;
    base.d = cell.dist.d;
    base.n = cell.n;
    base.eta = cell.eta;
    base.delta = cell.delta;
    base.trial = task.trial;
    base.seed = trial_seed;

    PointSet data;
    bool data_ok = true;
    std::string data_err;
    try {
      PointSet clean = sample(cell.dist, cell.n, split_seed(trial_seed, 10));
      ContaminationResult cr = contaminate(clean, cell.contamination, split_seed(trial_seed, 11));
      data = std::move(cr.points);
    } catch (const std::exception& e) {
      data_ok = false;
      data_err = e.what();
    }

    for (size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
      TrialRecord rec = base;
      rec.estimator = estimator_name(cfg.estimators[ei]);
      if (!data_ok) {
        rec.note = sanitize_note("sample_failed:" + data_err);
        out.push_back(std::move(rec));
        continue;
      }
      try {
        EstimatorConfig ecfg;
        ecfg.kind = cfg.estimators[ei];
        ecfg.delta = cell.delta;
        ecfg.eta = cell.eta;
        ecfg.bucket_constant_c = cfg.bucket_constant_c;
        ecfg.median_cfg = cfg.median_cfg;
        ecfg.baseline_candidates = cfg.baseline_candidates;
        ecfg.seed = split_seed(trial_seed, 20 + static_cast<std::uint64_t>(ei));
        const EstimateResult res = run_estimator(data, ecfg);

        rec.k_buckets = res.k_buckets;
        rec.undefined_flag = res.undefined_flag;
        rec.runtime_ms = res.runtime_ms;
        if (ecfg.kind == EstimatorKind::ours || ecfg.kind == EstimatorKind::stahel_donoho) {
          rec.outlyingness = res.score;
        }
        rec.error_euclidean = (res.estimate - moments(cell.dist).mean).norm();
        if (cell.score_family.empty()) {
          const Score s = score_against(res.estimate, cell.dist, split_seed(trial_seed, 40));
          rec.error_mahalanobis = s.maha;
          rec.cert_lower_bound = s.cert;
          if (!s.note.empty()) rec.note = s.note;
        } else {
          // Worst case over the listed members; they are smoothed and
          // nonsingular in all provided families.
          double worst_maha = 0.0;
          double worst_cert = 0.0;
          std::string note;
          for (size_t mi = 0; mi < cell.score_family.size(); ++mi) {
            const Score s = score_against(res.estimate, cell.score_family[mi],
                                          split_seed(trial_seed, 41 + static_cast<std::uint64_t>(mi)));
            if (std::isnan(s.maha)) {
              note = s.note;
            } else {
              worst_maha = std::max(worst_maha, s.maha);
            }
            worst_cert = std::max(worst_cert, s.cert);
          }
          rec.error_mahalanobis = note.empty() ? worst_maha : kNan;
          rec.cert_lower_bound = worst_cert;
          rec.note = note.empty() ? "max_over_family" : note;
        }
        if (res.eta_regime_exceeded) {
          rec.note = rec.note.empty() ? "eta_above_regime" : rec.note + ";eta_above_regime";
        }
      } catch (const std::exception& e) {
        rec.error_mahalanobis = kNan;
        rec.error_euclidean = kNan;
        rec.cert_lower_bound = kNan;
        rec.note = sanitize_note(std::string("estimator_failed:") + e.what());
      }
      out.push_back(std::move(rec));
    }
    return out;
  };

  const int workers = std::min<int>(worker_count(), static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) per_task[i] = run_task(tasks[i]);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        per_task[i] = run_task(tasks[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialRecord> records;
  for (auto& chunk : per_task) {
    for (auto& rec : chunk) records.push_back(std::move(rec));
  }
  if (!cfg.timings) {
    for (auto& rec : records) rec.runtime_ms = 0.0;
  }
  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.family, a.d, a.n, a.eta, a.delta, a.estimator, a.trial) <
           std::tie(b.family, b.d, b.n, b.eta, b.delta, b.estimator, b.trial);
  });
  return records;
}

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path, 0);
  const auto& fields = trial_record_fields();
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
  for (const TrialRecord& r : records) {
    out << r.family << ',' << r.d << ',' << r.n << ',' << fmt_double(r.eta) << ','
        << fmt_double(r.delta) << ',' << r.estimator << ',' << r.trial << ',' << r.seed << ','
        << fmt_double(r.error_mahalanobis) << ',' << fmt_double(r.error_euclidean) << ','
        << fmt_double(r.cert_lower_bound) << ',' << fmt_double(r.outlyingness) << ','
        << r.k_buckets << ',' << (r.undefined_flag ? 1 : 0) << ',' << fmt_double(r.runtime_ms)
        << ',' << sanitize_note(r.note) << '\n';
  }
}

void write_records_json(const std::string& path, const std::vector<TrialRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const TrialRecord& r : records) {
    nlohmann::ordered_json o;
    o["family"] = r.family;
    o["d"] = r.d;
    o["n"] = r.n;
    o["eta"] = r.eta;
    o["delta"] = r.delta;
    o["estimator"] = r.estimator;
    o["trial"] = r.trial;
    o["seed"] = r.seed;
    auto put = [&o](const char* key, double v) {
      if (std::isfinite(v)) {
        o[key] = v;
      } else {
        o[key] = nullptr;
      }
    };
    put("error_mahalanobis", r.error_mahalanobis);
    put("error_euclidean", r.error_euclidean);
    put("cert_lower_bound", r.cert_lower_bound);
    put("outlyingness", r.outlyingness);
    o["k_buckets"] = r.k_buckets;
    o["undefined_flag"] = r.undefined_flag;
    put("runtime_ms", r.runtime_ms);
    o["note"] = r.note;
    arr.push_back(std::move(o));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path, 0);
  out << arr.dump(2) << '\n';
}

namespace {

using nlohmann::json;

std::vector<int> int_list(const json& fam, const char* key) {
  if (!fam.contains(key)) return {};
  const json& v = fam.at(key);
  if (v.is_array()) return v.get<std::vector<int>>();
  return {v.get<int>()};
}

std::vector<double> num_list(const json& fam, const char* key, std::vector<double> def) {
  if (!fam.contains(key)) return def;
  const json& v = fam.at(key);
  if (v.is_array()) return v.get<std::vector<double>>();
  return {v.get<double>()};
}

double json_gamma(const json& fam, int d) {
  if (!fam.contains("gamma")) return 0.0;
  const auto& g = fam.at("gamma");
  if (g.is_string()) {
    if (g.get<std::string>() == "auto") return 1.0 / (10.0 * d);
    throw InvalidInput("config: gamma must be a number or \"auto\"");
  }
  return g.get<double>();
}

ContaminationSpec parse_contamination(const json& fam, const json* block, double eta,
                                      const DistributionSpec& dist,
                                      const std::vector<FamilyMember>* family) {
  ContaminationSpec spec;
  spec.eta = eta;
  if (eta == 0.0) {
    spec.mode = ContaminationMode::none;
    return spec;
  }
  if (block == nullptr) {
    // Lower-bound families default to the Huber witness mixture.
    if (family != nullptr && dist.index >= 1 && (*family)[dist.index].witness) {
      spec.mode = ContaminationMode::huber_mix;
      spec.payload = *(*family)[dist.index].witness;
      return spec;
    }
    throw InvalidInput("config: family '" + fam.value("kind", std::string()) +
                       "' needs a contamination block when eta > 0");
  }
  const std::string mode = block->value("mode", std::string("replace"));
  if (mode == "none") {
    spec.mode = ContaminationMode::none;
    return spec;
  }
  if (mode == "huber_mix") {
    spec.mode = ContaminationMode::huber_mix;
    if (block->contains("payload") && block->at("payload").is_object()) {
      const json& p = block->at("payload");
      if (!p.contains("point")) throw InvalidInput("config: huber payload needs a point");
      const std::vector<double> pt = p.at("point").get<std::vector<double>>();
      Matrix table(1, static_cast<int>(pt.size()));
      for (size_t j = 0; j < pt.size(); ++j) table(0, static_cast<int>(j)) = pt[j];
      spec.payload = make_custom_discrete(table, Vector::Ones(1), p.value("sigma", 0.0));
    } else if (family != nullptr && dist.index >= 1 && (*family)[dist.index].witness) {
      spec.payload = *(*family)[dist.index].witness;  // payload "witness" or absent
    } else {
      throw InvalidInput("config: huber_mix needs a payload");
    }
    return spec;
  }
  if (mode == "replace") {
    spec.mode = ContaminationMode::replace;
    const std::string strat = block->value("strategy", std::string("point_mass_at"));
    if (strat == "point_mass_at") {
      spec.strategy = ReplaceStrategy::point_mass_at;
      if (!block->contains("point")) throw InvalidInput("config: point_mass_at needs a point");
      const std::vector<double> pt = block->at("point").get<std::vector<double>>();
      spec.point.resize(static_cast<int>(pt.size()));
      for (size_t j = 0; j < pt.size(); ++j) spec.point[static_cast<int>(j)] = pt[j];
    } else if (strat == "far_along_min_variance") {
      spec.strategy = ReplaceStrategy::far_along_min_variance;
      spec.far_scale = block->value("scale", 100.0);
      spec.reference = dist;
    } else {
      throw InvalidInput("config: unknown replacement strategy '" + strat + "'");
    }
    return spec;
  }
  throw InvalidInput("config: unknown contamination mode '" + mode + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path, 0);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("config parse error: ") + e.what(), 0);
  }

  ExperimentConfig cfg;
  cfg.trials = doc.value("trials", 1);
  cfg.base_seed = doc.value("base_seed", static_cast<std::uint64_t>(0));
  cfg.timings = doc.value("timings", false);
  if (doc.contains("output")) {
    cfg.out_path = doc.at("output").value("path", std::string());
    cfg.out_format = doc.at("output").value("format", std::string("csv"));
  }
  if (cfg.out_format != "csv" && cfg.out_format != "json") {
    throw InvalidInput("config: output format must be csv or json");
  }

  for (const auto& name : doc.value("estimators", std::vector<std::string>{"ours"})) {
    const auto kind = parse_estimator(name);
    if (!kind) throw InvalidInput("config: unknown estimator '" + name + "'");
    cfg.estimators.push_back(*kind);
  }

  if (doc.contains("estimator_settings")) {
    const json& s = doc.at("estimator_settings");
    cfg.bucket_constant_c = s.value("C", cfg.bucket_constant_c);
    cfg.baseline_candidates = s.value("baseline_candidates", cfg.baseline_candidates);
    cfg.median_cfg.slack_eps = s.value("slack_eps", cfg.median_cfg.slack_eps);
    cfg.median_cfg.max_iterations = s.value("max_iterations", cfg.median_cfg.max_iterations);
    cfg.median_cfg.directions_random = s.value("directions_random", cfg.median_cfg.directions_random);
    cfg.median_cfg.directions_data = s.value("directions_data", cfg.median_cfg.directions_data);
    cfg.median_cfg.sweep_random = s.value("sweep_random", cfg.median_cfg.sweep_random);
    const std::string mode = s.value("mode", std::string("whitened"));
    if (mode == "raw") {
      cfg.median_cfg.mode = EquivariantMode::raw;
    } else if (mode != "whitened") {
      throw InvalidInput("config: mode must be whitened or raw");
    }
  }

  if (!doc.contains("families") || !doc.at("families").is_array() || doc.at("families").empty()) {
    throw InvalidInput("config: families array required");
  }
  for (const json& fam : doc.at("families")) {
    const std::string kind = fam.value("kind", std::string());
    const std::string label = fam.value("label", kind);
    const std::vector<int> ds = int_list(fam, "d");
    const std::vector<int> ns = int_list(fam, "n");
    const std::vector<double> deltas = num_list(fam, "delta", {0.05});
    const std::vector<double> etas = num_list(fam, "eta", {0.0});
    if (ds.empty() || ns.empty()) throw InvalidInput("config: each family needs d and n lists");
    const json* contam = fam.contains("contamination") ? &fam.at("contamination") : nullptr;
    const std::string score = fam.value("score", std::string("matched"));
    if (score != "matched" && score != "max_family") {
      throw InvalidInput("config: score must be matched or max_family");
    }

    for (int d : ds) {
      for (int n : ns) {
        for (double delta : deltas) {
          for (double eta : etas) {
            GridCell cell;
            cell.family = label;
            cell.n = n;
            cell.eta = eta;
            cell.delta = delta;
            std::vector<FamilyMember> members;
            const std::vector<FamilyMember>* members_ptr = nullptr;
            if (kind == "intuition_gamma") {
              cell.dist = make_intuition_gamma(d, json_gamma(fam, d), fam.value("sigma", 0.0));
            } else if (kind == "gaussian") {
              cell.dist = make_gaussian(d);
            } else if (kind == "heavytailed_lb") {
              double eps;
              if (fam.contains("eps") && fam.at("eps").is_number()) {
                eps = fam.at("eps").get<double>();
              } else {
                eps = heavytailed_eps(n, d, delta);
              }
              cell.dist = make_heavytailed(d, fam.value("index", 1), eps);
            } else if (kind == "breakdown_lb") {
              members = breakdown_family(d, fam.value("r", 100.0));
              members_ptr = &members;
              cell.dist = members[std::max(1, fam.value("index", 1))].dist;
            } else if (kind == "quant_lb") {
              if (eta <= 0.0) throw InvalidInput("config: quant_lb needs eta > 0");
              members = quant_family(d, eta);
              members_ptr = &members;
              cell.dist = members[std::max(1, fam.value("index", 1))].dist;
            } else {
              throw InvalidInput("config: unknown family kind '" + kind + "'");
            }
            cell.contamination = parse_contamination(fam, contam, eta, cell.dist, members_ptr);
            // Clean cells always score against their own member; the
            // max-over-family view only makes sense under contamination.
            if (score == "max_family" && eta > 0.0) {
              if (members.empty()) {
                throw InvalidInput("config: max_family scoring needs a lower-bound family");
              }
              // Breakdown: witnessed members 1..d+1. Quant: all members 0..d.
              const size_t first = kind == "breakdown_lb" ? 1 : 0;
              for (size_t mi = first; mi < members.size(); ++mi) {
                cell.score_family.push_back(members[mi].dist);
              }
            }
            cfg.cells.push_back(std::move(cell));
          }
        }
      }
    }
  }
  return cfg;
}

}  // namespace affmed
