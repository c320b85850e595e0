#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "npcmaj/barycenter.hpp"
#include "npcmaj/space.hpp"
#include "npcmaj/stochastic.hpp"

namespace npcmaj {

enum class Arity { Unary, Tuple };

enum class ConvexityKind { Convex, ConvexNondecreasingOfDistance, SymmetricConvexOnPower };

// A geodesically convex function on M (Unary) or on M^n (Tuple).
struct ConvexFunctional {
  std::string id;
  std::string applies_to;  ///< "any" or a space kind name
  Arity arity = Arity::Unary;
  ConvexityKind convexity = ConvexityKind::Convex;
  bool symmetric = false;
  std::function<double(std::span<const Point>)> evaluate;

  double operator()(const Point& p) const { return evaluate(std::span<const Point>(&p, 1)); }
  double operator()(std::span<const Point> tuple) const { return evaluate(tuple); }
};

/// Default violation threshold on normalized slack.
inline constexpr double kViolationTol = 1e-8;

/// Registry anchored at `anchor`: d(.,z), d^2(.,z), f(d(.,z)) for
/// f in {t, t^2, e^t - 1, max(t - 1/2, 0)}, the symmetric power-space
/// functionals sum_{i<j} d^a(z_i, z_j) (a = 1, 2, 3) and sum_i f(d(z_i, z)),
/// plus norms and convex polynomials in Euclidean spaces.
std::vector<ConvexFunctional> builtin_registry(const Space& space, const Point& anchor);
std::vector<ConvexFunctional> builtin_registry(const Space& space);

/// -d^2(., z): concave, used to prove the checkers are not vacuous.
ConvexFunctional concave_control(const Space& space, const Point& anchor);

struct CheckReport {
  std::string check;
  std::string functional;
  std::string space;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t skips = 0;
  double worst_slack = -1e300;  ///< largest slack / scale seen
  double tolerance = kViolationTol;
  std::vector<std::uint64_t> violating_trials;
  std::vector<std::uint64_t> skipped_trials;

  void record(std::uint64_t trial, double normalized_slack);
  void skip(std::uint64_t trial);
};

/// Slack phi(g(t)) - (1-t) phi(g(0)) - t phi(g(1)) on random geodesics.
CheckReport check_geodesic_convexity(const Space& space, const ConvexFunctional& f, std::size_t trials,
                                     std::uint64_t seed, double tol = kViolationTol);

/// f(bar(mu)) - sum_i w_i f(x_i), threshold tol * max|f(x_i)|.
SlackOutcome check_jensen(const Space& space, const ConvexFunctional& f, const DiscreteMeasure& measure,
                          double tol = kViolationTol, const BarycenterOptions& options = {});

/// sum_i lambda_i f(x_i) - sum_j mu_j f(y_j) for a valid certificate.
SlackOutcome check_theorem3(const MajorizationCertificate& cert, const ConvexFunctional& f,
                            double tol = kViolationTol);

std::vector<double> distance_vector(const Space& space, std::span<const Point> atoms, const Point& z);

/// (d(x_i, z))_i weakly majorized by (d(y_i, z))_i for an equal-weight certificate.
bool check_distance_weak_majorization(const MajorizationCertificate& cert, const Point& z,
                                      double tol = kViolationTol);

struct EntropyOutcome {
  bool skipped = false;  ///< some distance below 1/e
  bool ok = true;
  double x_sum = 0.0;    ///< sum_i d(x_i,z) log d(x_i,z)
  double y_sum = 0.0;
};

/// prod d(x_i,z)^d(x_i,z) <= prod d(y_i,z)^d(y_i,z), compared in the log domain,
/// whenever every distance is at least 1/e.
EntropyOutcome check_entropy_product(const MajorizationCertificate& cert, const Point& z,
                                     double tol = kViolationTol);

/// sum_{i<j} d^alpha(x_i,x_j) - sum_{i<j} d^alpha(y_i,y_j); alpha >= 1.
SlackOutcome check_dispersion(const MajorizationCertificate& cert, double alpha, double tol = kViolationTol);

/// F(x_1..x_n) - F(y_1..y_n) for a symmetric convex F on M^n. Symmetry is
/// re-checked by exact evaluation under `probes` random permutations.
SlackOutcome check_schur(const MajorizationCertificate& cert, const ConvexFunctional& f,
                         double tol = kViolationTol, std::uint64_t seed = 0, std::size_t probes = 4);

/// Symmetric gauge values: "l1", "l2", "linf", "top<k>" (sum of the k largest |v_i|).
double gauge_value(const std::string& gauge_id, std::span<const double> v);
std::vector<std::string> gauge_family(std::size_t n);

/// gauge(d(x, z)) <= gauge(d(y, z)) + tol * scale.
bool check_gauge(const MajorizationCertificate& cert, const Point& z, const std::string& gauge_id,
                 double tol = kViolationTol);

struct FuzzOptions {
  /// Empty means every suite: convexity, jensen, majorization, weak_distance, gauge,
  /// entropy, dispersion, schur, variance, contraction.
  std::set<std::string> suites;
  /// Additional unary functionals run wherever the registry is.
  std::vector<ConvexFunctional> extra_unary;
  bool inject_concave_control = false;
  std::size_t anchors = 10;
  std::size_t threads = 1;
  BarycenterOptions barycenter{};
};

std::vector<std::string> all_suites();

/// Random (y, lambda, A) instances synthesized into certificates, every
/// applicable checker run on each. Deterministic in (space, seed, trials,
/// tol, options) irrespective of `threads`.
std::vector<CheckReport> fuzz_suite(const Space& space, std::uint64_t seed, std::size_t trials,
                                    double tol = kViolationTol, const FuzzOptions& options = {});

}  // namespace npcmaj
