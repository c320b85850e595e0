#include "npcmaj/inequalities.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

#include "npcmaj/error.hpp"
#include "npcmaj/geometry.hpp"
#include "npcmaj/sampling.hpp"

namespace npcmaj {
namespace {

// Sum independent of the order in which terms were produced.
double sorted_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

struct ScalarShape {
  const char* name;
  double (*f)(double);
};

constexpr double kHingeKnot = 0.5;

const ScalarShape kShapes[] = {
    {"f_linear", [](double t) { return t; }},
    {"f_square", [](double t) { return t * t; }},
    {"f_expm1", [](double t) { return std::expm1(t); }},
    {"f_hinge", [](double t) { return std::max(t - kHingeKnot, 0.0); }},
};

ConvexFunctional unary(std::string id, std::string applies_to, ConvexityKind kind,
                       std::function<double(const Point&)> f) {
  ConvexFunctional c;
  c.id = std::move(id);
  c.applies_to = std::move(applies_to);
  c.arity = Arity::Unary;
  c.convexity = kind;
  c.evaluate = [f = std::move(f)](std::span<const Point> pts) {
    if (pts.size() != 1) fail(ErrorCode::ArityMismatch, "unary functional evaluated on a tuple");
    return f(pts[0]);
  };
  return c;
}

ConvexFunctional tuple(std::string id, std::function<double(std::span<const Point>)> f) {
  ConvexFunctional c;
  c.id = std::move(id);
  c.applies_to = "any";
  c.arity = Arity::Tuple;
  c.convexity = ConvexityKind::SymmetricConvexOnPower;
  c.symmetric = true;
  c.evaluate = std::move(f);
  return c;
}

double scale_of(std::initializer_list<double> values) {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return std::max(s, 1e-12);
}

void require_valid(const MajorizationCertificate& cert) {
  if (!cert.valid) fail(ErrorCode::InvalidCertificate, "certificate is not valid: " + cert.diagnostic);
}

void require_equal_weight(const MajorizationCertificate& cert) {
  if (!cert.valid || !cert.equal_weight()) {
    fail(ErrorCode::NoCertificate, "an equal-weight valid certificate is required");
  }
}

// max_k (sum_{i<=k} x_i^desc - sum_{i<=k} y_i^desc).
double max_partial_gap(std::span<const double> x, std::span<const double> y) {
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());
  double sx = 0.0;
  double sy = 0.0;
  double gap = -1e300;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    gap = std::max(gap, sx - sy);
  }
  return gap;
}

double vector_scale(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  for (double v : b) s = std::max(s, std::abs(v));
  return std::max(s, 1e-12);
}

double pairwise_power_sum(const Space& space, std::span<const Point> pts, double alpha) {
  std::vector<double> terms;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) terms.push_back(std::pow(distance(space, pts[i], pts[j]), alpha));
  return sorted_sum(std::move(terms));
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ConvexFunctional> builtin_registry(const Space& space, const Point& anchor) {
  require_point(space, anchor);
  std::vector<ConvexFunctional> out;
  out.push_back(unary("dist", "any", ConvexityKind::ConvexNondecreasingOfDistance,
                      [space, anchor](const Point& p) { return distance(space, p, anchor); }));
  out.push_back(unary("dist_sq", "any", ConvexityKind::ConvexNondecreasingOfDistance, [space, anchor](const Point& p) {
    const double d = distance(space, p, anchor);
    return d * d;
  }));
  for (const ScalarShape& shape : kShapes) {
    out.push_back(unary(std::string(shape.name) + "(dist)", "any", ConvexityKind::ConvexNondecreasingOfDistance,
                        [space, anchor, f = shape.f](const Point& p) { return f(distance(space, p, anchor)); }));
  }

  if (space.is_euclidean()) {
    out.push_back(unary("norm_l1", "euclidean", ConvexityKind::Convex, [](const Point& p) {
      double s = 0.0;
      for (double v : p.coords()) s += std::abs(v);
      return s;
    }));
    out.push_back(unary("norm_l2", "euclidean", ConvexityKind::Convex, [](const Point& p) {
      double s = 0.0;
      for (double v : p.coords()) s += v * v;
      return std::sqrt(s);
    }));
    out.push_back(unary("norm_linf", "euclidean", ConvexityKind::Convex, [](const Point& p) {
      double s = 0.0;
      for (double v : p.coords()) s = std::max(s, std::abs(v));
      return s;
    }));
    out.push_back(unary("poly_quartic", "euclidean", ConvexityKind::Convex, [](const Point& p) {
      double s = 0.0;
      for (double v : p.coords()) s += v * v * v * v + 0.5 * v * v - v;
      return s;
    }));
  }

  for (double alpha : {1.0, 2.0, 3.0}) {
    out.push_back(tuple("pairwise_dist^" + std::to_string(static_cast<int>(alpha)),
                        [space, alpha](std::span<const Point> pts) { return pairwise_power_sum(space, pts, alpha); }));
  }
  for (const ScalarShape& shape : kShapes) {
    out.push_back(tuple(std::string("anchor_sum_") + shape.name, [space, anchor, f = shape.f](std::span<const Point> pts) {
      std::vector<double> terms;
      for (const Point& p : pts) terms.push_back(f(distance(space, p, anchor)));
      return sorted_sum(std::move(terms));
    }));
  }
  return out;
}

std::vector<ConvexFunctional> builtin_registry(const Space& space) {
  return builtin_registry(space, reference_point(space));
}

ConvexFunctional concave_control(const Space& space, const Point& anchor) {
  return unary("negative_control_concave", "any", ConvexityKind::Convex, [space, anchor](const Point& p) {
    const double d = distance(space, p, anchor);
    return -d * d;
  });
}

// ---------------------------------------------------------------------------

void CheckReport::record(std::uint64_t trial, double normalized_slack) {
  ++trials;
  worst_slack = std::max(worst_slack, normalized_slack);
  if (normalized_slack > tolerance) {
    ++violations;
    violating_trials.push_back(trial);
  }
}

void CheckReport::skip(std::uint64_t trial) {
  ++skips;
  skipped_trials.push_back(trial);
}

CheckReport check_geodesic_convexity(const Space& space, const ConvexFunctional& f, std::size_t trials,
                                     std::uint64_t seed, double tol) {
  if (f.arity != Arity::Unary) fail(ErrorCode::ArityMismatch, "geodesic convexity check needs a unary functional");
  CheckReport report;
  report.check = "convexity";
  report.functional = f.id;
  report.space = space.describe();
  report.tolerance = tol;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    const Point p = random_point(space, rng);
    const Point q = random_point(space, rng);
    const double t = rng.uniform();
    const double fp = f(p);
    const double fq = f(q);
    const double ft = f(geodesic_point(space, p, q, t));
    const double slack = ft - (1.0 - t) * fp - t * fq;
    report.record(k, slack / scale_of({fp, fq, ft}));
  }
  return report;
}

SlackOutcome check_jensen(const Space& space, const ConvexFunctional& f, const DiscreteMeasure& measure,
                          double tol, const BarycenterOptions& options) {
  if (f.arity != Arity::Unary) fail(ErrorCode::ArityMismatch, "Jensen check needs a unary functional");
  const BarycenterResult bar = barycenter(space, measure, options);
  if (!bar.converged) fail(ErrorCode::NotConverged, "barycenter did not converge");
  double mean = 0.0;
  double scale = 0.0;
  std::vector<double> terms;
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
    const double fi = f(measure.atoms[i]);
    scale = std::max(scale, std::abs(fi));
    terms.push_back(measure.weights[i] * fi);
  }
  mean = sorted_sum(std::move(terms));
  SlackOutcome out;
  out.slack = f(bar.point) - mean;
  out.threshold = tol * std::max(scale, 1e-12);
  out.ok = out.slack <= out.threshold;
  return out;
}

SlackOutcome check_theorem3(const MajorizationCertificate& cert, const ConvexFunctional& f, double tol) {
  require_valid(cert);
  if (f.arity != Arity::Unary) fail(ErrorCode::ArityMismatch, "majorization inequality check needs a unary functional");
  double scale = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < cert.x_atoms.size(); ++i) {
    const double v = f(cert.x_atoms[i]);
    scale = std::max(scale, std::abs(v));
    lhs += cert.lambda[i] * v;
  }
  for (std::size_t j = 0; j < cert.y_atoms.size(); ++j) {
    const double v = f(cert.y_atoms[j]);
    scale = std::max(scale, std::abs(v));
    rhs += cert.mu[j] * v;
  }
  SlackOutcome out;
  out.slack = lhs - rhs;
  out.threshold = tol * std::max(scale, 1e-12);
  out.ok = out.slack <= out.threshold;
  return out;
}

std::vector<double> distance_vector(const Space& space, std::span<const Point> atoms, const Point& z) {
  std::vector<double> d;
  d.reserve(atoms.size());
  for (const Point& p : atoms) d.push_back(distance(space, p, z));
  return d;
}

bool check_distance_weak_majorization(const MajorizationCertificate& cert, const Point& z, double tol) {
  require_equal_weight(cert);
  const auto dx = distance_vector(cert.space, cert.x_atoms, z);
  const auto dy = distance_vector(cert.space, cert.y_atoms, z);
  return max_partial_gap(dx, dy) <= tol * vector_scale(dx, dy);
}

EntropyOutcome check_entropy_product(const MajorizationCertificate& cert, const Point& z, double tol) {
  require_equal_weight(cert);
  const auto dx = distance_vector(cert.space, cert.x_atoms, z);
  const auto dy = distance_vector(cert.space, cert.y_atoms, z);
  EntropyOutcome out;
  const double floor = 1.0 / std::numbers::e;
  auto below = [floor](double d) { return d < floor; };
  if (std::any_of(dx.begin(), dx.end(), below) || std::any_of(dy.begin(), dy.end(), below)) {
    out.skipped = true;
    return out;
  }
  auto tlogt = [](std::span<const double> v) {
    std::vector<double> terms;
    for (double d : v) terms.push_back(d * std::log(d));
    return sorted_sum(std::move(terms));
  };
  out.x_sum = tlogt(dx);
  out.y_sum = tlogt(dy);
  // t log t is convex and increasing on [1/e, inf), so weak majorization of
  // the distance vectors bounds the x-side sum by the y-side sum.
  out.ok = out.x_sum <= out.y_sum + tol * scale_of({out.x_sum, out.y_sum, 1.0});
  return out;
}

SlackOutcome check_dispersion(const MajorizationCertificate& cert, double alpha, double tol) {
  if (!(alpha >= 1.0)) fail(ErrorCode::AlphaOutOfRange, "dispersion exponent must be >= 1");
  require_equal_weight(cert);
  SlackOutcome out;
  out.slack = pairwise_power_sum(cert.space, cert.x_atoms, alpha) - pairwise_power_sum(cert.space, cert.y_atoms, alpha);
  out.threshold = tol * std::pow(cert.scale, alpha);
  out.ok = out.slack <= out.threshold;
  return out;
}

SlackOutcome check_schur(const MajorizationCertificate& cert, const ConvexFunctional& f, double tol,
                         std::uint64_t seed, std::size_t probes) {
  require_equal_weight(cert);
  if (f.arity != Arity::Tuple || !f.symmetric || f.convexity != ConvexityKind::SymmetricConvexOnPower) {
    fail(ErrorCode::NotSymmetric, "functional '" + f.id + "' is not flagged symmetric convex on M^n");
  }
  const double fx = f(cert.x_atoms);
  const double fy = f(cert.y_atoms);
  Rng rng = Rng::stream(seed, 0x5c4u);
  for (std::size_t k = 0; k < probes; ++k) {
    for (const auto* atoms : {&cert.x_atoms, &cert.y_atoms}) {
      const auto perm = random_permutation(atoms->size(), rng);
      std::vector<Point> shuffled;
      for (std::size_t i : perm) shuffled.push_back((*atoms)[i]);
      if (f(shuffled) != (atoms == &cert.x_atoms ? fx : fy)) {
        fail(ErrorCode::NotSymmetric, "functional '" + f.id + "' changed under a permutation of its arguments");
      }
    }
  }
  SlackOutcome out;
  out.slack = fx - fy;
  out.threshold = tol * scale_of({fx, fy});
  out.ok = out.slack <= out.threshold;
  return out;
}

double gauge_value(const std::string& gauge_id, std::span<const double> v) {
  std::vector<double> a;
  for (double x : v) a.push_back(std::abs(x));
  if (gauge_id == "l1") return sorted_sum(a);
  if (gauge_id == "l2") {
    for (double& x : a) x *= x;
    return std::sqrt(sorted_sum(a));
  }
  if (gauge_id == "linf") return a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
  if (gauge_id.rfind("top", 0) == 0 && gauge_id.size() > 3 &&
      std::all_of(gauge_id.begin() + 3, gauge_id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    const std::size_t k = std::stoul(gauge_id.substr(3));
    if (k == 0 || k > a.size()) fail(ErrorCode::UnknownGauge, "gauge '" + gauge_id + "' needs 1 <= k <= n");
    std::sort(a.begin(), a.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += a[i];
    return s;
  }
  fail(ErrorCode::UnknownGauge, "unknown gauge '" + gauge_id + "'");
}

std::vector<std::string> gauge_family(std::size_t n) {
  std::vector<std::string> ids{"l1", "l2", "linf"};
  for (std::size_t k = 1; k <= n; ++k) ids.push_back("top" + std::to_string(k));
  return ids;
}

bool check_gauge(const MajorizationCertificate& cert, const Point& z, const std::string& gauge_id, double tol) {
  require_equal_weight(cert);
  const auto dx = distance_vector(cert.space, cert.x_atoms, z);
  const auto dy = distance_vector(cert.space, cert.y_atoms, z);
  return gauge_value(gauge_id, dx) <= gauge_value(gauge_id, dy) + tol * vector_scale(dx, dy);
}

// ---------------------------------------------------------------------------
// Fuzz harness

std::vector<std::string> all_suites() {
  return {"convexity", "jensen", "majorization", "weak_distance", "gauge",
          "entropy",   "dispersion", "schur", "variance",  "contraction"};
}

namespace {

struct Entry {
  std::string check;
  std::string functional;
  bool skipped = false;
  double slack = 0.0;  // normalized
};

using TrialLog = std::vector<Entry>;

class TrialRunner {
 public:
  TrialRunner(const Space& space, std::uint64_t seed, double tol, const FuzzOptions& options)
      : space_(space), seed_(seed), tol_(tol), options_(options) {}

  TrialLog run(std::uint64_t trial) const {
    TrialLog log;
    Rng rng = Rng::stream(seed_, trial);
    auto wants = [&](const char* suite) { return options_.suites.empty() || options_.suites.count(suite) > 0; };

    std::optional<MajorizationCertificate> general;
    std::optional<MajorizationCertificate> equal;
    VerifyOptions vopts;
    vopts.barycenter = options_.barycenter;
    try {
      Rng g = rng.split(1);
      const std::size_t m = 1 + g.below(3);
      const std::size_t n = 2 + g.below(3);
      std::vector<Point> ys;
      for (std::size_t j = 0; j < n; ++j) ys.push_back(random_point(space_, g));
      general = synthesize_majorized(space_, ys, random_probability(m, g), random_row_stochastic(m, n, g), vopts);

      Rng e = rng.split(2);
      const std::size_t ne = 2 + e.below(3);
      std::vector<Point> ye;
      for (std::size_t j = 0; j < ne; ++j) ye.push_back(random_point(space_, e));
      const std::vector<double> uniform(ne, 1.0 / static_cast<double>(ne));
      equal = synthesize_majorized(space_, ye, uniform, random_doubly_stochastic(ne, 2 + e.below(3), e), vopts);
    } catch (const Error&) {
      log.push_back({"synthesis", "instance", true, 0.0});
      return log;
    }

    Rng a = rng.split(3);
    const BarycenterResult center = barycenter(space_, uniform_measure(equal->y_atoms), options_.barycenter);
    std::vector<Point> anchors;
    for (std::size_t k = 0; k < std::max<std::size_t>(options_.anchors, 1); ++k) {
      anchors.push_back(random_point_near(space_, center.point, 2.0 * equal->scale, a));
    }

    std::vector<ConvexFunctional> unaries;
    std::vector<ConvexFunctional> tuples;
    for (ConvexFunctional& f : builtin_registry(space_, anchors.front())) {
      (f.arity == Arity::Unary ? unaries : tuples).push_back(std::move(f));
    }
    for (const ConvexFunctional& f : options_.extra_unary) unaries.push_back(f);
    if (options_.inject_concave_control) unaries.push_back(concave_control(space_, anchors.front()));

    auto guarded = [&](const std::string& check, const std::string& id, auto&& body) {
      try {
        log.push_back({check, id, false, body()});
      } catch (const Error&) {
        log.push_back({check, id, true, 0.0});
      }
    };
    const DiscreteMeasure gm{general->y_atoms, general->mu};

    if (wants("convexity")) {
      Rng c = rng.split(4);
      for (const ConvexFunctional& f : unaries) {
        const Point p = random_point(space_, c);
        const Point q = random_point(space_, c);
        const double t = c.uniform();
        guarded("convexity", f.id, [&] {
          const double fp = f(p);
          const double fq = f(q);
          const double ft = f(geodesic_point(space_, p, q, t));
          return (ft - (1.0 - t) * fp - t * fq) / scale_of({fp, fq, ft});
        });
      }
    }
    if (wants("jensen")) {
      for (const ConvexFunctional& f : unaries) {
        guarded("jensen", f.id, [&] { return relative(check_jensen(space_, f, gm, tol_, options_.barycenter)); });
      }
    }
    if (wants("majorization")) {
      for (const ConvexFunctional& f : unaries) {
        guarded("majorization", f.id, [&] { return relative(check_theorem3(*general, f, tol_)); });
      }
    }
    if (wants("variance")) {
      guarded("variance", "dist_sq", [&] {
        return relative(variance_inequality_check(space_, gm, anchors.front(), tol_, options_.barycenter));
      });
    }
    if (wants("contraction")) {
      Rng c = rng.split(5);
      std::vector<Point> other;
      for (std::size_t i = 0; i < equal->y_atoms.size(); ++i) other.push_back(random_point(space_, c));
      guarded("contraction", "dist", [&] {
        return relative(mean_contraction_check(space_, equal->y_atoms, other, tol_, options_.barycenter));
      });
    }

    if (wants("weak_distance") || wants("gauge") || wants("entropy")) {
      const auto gauges = gauge_family(equal->x_atoms.size());
      for (const Point& z : anchors) {
        const auto dx = distance_vector(space_, equal->x_atoms, z);
        const auto dy = distance_vector(space_, equal->y_atoms, z);
        const double sc = vector_scale(dx, dy);
        if (wants("weak_distance")) {
          log.push_back({"weak_distance", "dist", false, max_partial_gap(dx, dy) / sc});
        }
        if (wants("gauge")) {
          for (const std::string& g : gauges) {
            log.push_back({"gauge", g, false, (gauge_value(g, dx) - gauge_value(g, dy)) / sc});
          }
        }
        if (wants("entropy")) {
          const EntropyOutcome e = check_entropy_product(*equal, z, tol_);
          if (e.skipped) {
            log.push_back({"entropy", "dist_log_dist", true, 0.0});
          } else {
            log.push_back({"entropy", "dist_log_dist", false, (e.x_sum - e.y_sum) / scale_of({e.x_sum, e.y_sum, 1.0})});
          }
        }
      }
    }
    if (wants("dispersion")) {
      for (double alpha : {1.0, 2.0, 3.0}) {
        guarded("dispersion", "alpha=" + std::to_string(static_cast<int>(alpha)),
                [&] { return relative(check_dispersion(*equal, alpha, tol_)); });
      }
    }
    if (wants("schur")) {
      for (const ConvexFunctional& f : tuples) {
        guarded("schur", f.id, [&] { return relative(check_schur(*equal, f, tol_, seed_ ^ trial)); });
      }
    }
    return log;
  }

 private:
  // Slack rescaled so that the violation threshold maps onto tol.
  double relative(const SlackOutcome& s) const { return s.threshold > 0.0 ? s.slack * tol_ / s.threshold : s.slack; }

  static double scale_of(std::initializer_list<double> values) {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return std::max(s, 1e-12);
  }

  const Space& space_;
  std::uint64_t seed_;
  double tol_;
  const FuzzOptions& options_;
};

}  // namespace

std::vector<CheckReport> fuzz_suite(const Space& space, std::uint64_t seed, std::size_t trials, double tol,
                                    const FuzzOptions& options) {
  if (trials == 0) fail(ErrorCode::ParameterOutOfRange, "fuzz needs at least one trial");
  for (const std::string& s : options.suites) {
    const auto known = all_suites();
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      fail(ErrorCode::ParameterOutOfRange, "unknown suite '" + s + "'");
    }
  }
  const TrialRunner runner(space, seed, tol, options);
  std::vector<TrialLog> logs(trials);

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, trials));
  if (workers == 1) {
    for (std::size_t k = 0; k < trials; ++k) logs[k] = runner.run(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < trials; k = next++) logs[k] = runner.run(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<CheckReport> reports;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t k = 0; k < trials; ++k) {
    for (const Entry& e : logs[k]) {
      auto key = std::make_pair(e.check, e.functional);
      auto it = index.find(key);
      if (it == index.end()) {
        CheckReport r;
        r.check = e.check;
        r.functional = e.functional;
        r.space = space.describe();
        r.tolerance = tol;
        it = index.emplace(key, reports.size()).first;
        reports.push_back(std::move(r));
      }
      CheckReport& r = reports[it->second];
      if (e.skipped) r.skip(k);
      else r.record(k, e.slack);
    }
  }
  return reports;
}

}  // namespace npcmaj
