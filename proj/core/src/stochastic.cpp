#include "npcmaj/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "npcmaj/error.hpp"
#include "npcmaj/geometry.hpp"
#include "npcmaj/lp.hpp"

namespace npcmaj {
namespace {

std::vector<double> descending(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "vectors differ in length");
  if (x.empty()) fail(ErrorCode::EmptyInput, "vectors are empty");
}

double entry_scale(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  for (double v : y) s = std::max(s, std::abs(v));
  return std::max(s, 1e-12);
}

// Largest partial-sum excess of x over y, k = 1..n.
std::vector<double> partial_sum_gaps(std::span<const double> x, std::span<const double> y) {
  const auto xs = descending(x);
  const auto ys = descending(y);
  std::vector<double> gaps(xs.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    gaps[k] = sx - sy;
  }
  return gaps;
}

std::vector<double> row_weights(const Matrix& a, std::size_t i) {
  std::vector<double> w(a.row(i).begin(), a.row(i).end());
  double total = 0.0;
  for (double& v : w) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

bool weakly_majorizes(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double tol = 1e-9 * entry_scale(x, y);
  const auto gaps = partial_sum_gaps(x, y);
  return std::all_of(gaps.begin(), gaps.end(), [tol](double g) { return g <= tol; });
}

bool hlp_majorizes(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double tol = 1e-9 * entry_scale(x, y);
  const auto gaps = partial_sum_gaps(x, y);
  return std::all_of(gaps.begin(), gaps.end(), [tol](double g) { return g <= tol; }) &&
         std::abs(gaps.back()) <= tol;
}

void require_probability(std::span<const double> w, const char* what) {
  if (w.empty()) fail(ErrorCode::NotProbabilityVector, std::string(what) + " is empty");
  double total = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < -1e-12) {
      fail(ErrorCode::NotProbabilityVector, std::string(what) + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    std::ostringstream msg;
    msg << what << " sums to " << total << ", not 1";
    fail(ErrorCode::NotProbabilityVector, msg.str());
  }
}

void require_row_stochastic(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) fail(ErrorCode::NotRowStochastic, "matrix is empty");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double total = 0.0;
    for (double v : a.row(i)) {
      if (!std::isfinite(v) || v < -1e-12) {
        fail(ErrorCode::NotRowStochastic, "row " + std::to_string(i) + " has a negative or non-finite entry");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > kWeightTol) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << total;
      fail(ErrorCode::NotRowStochastic, msg.str());
    }
  }
}

void require_doubly_stochastic(const Matrix& a) {
  if (!a.is_square()) fail(ErrorCode::NotDoublyStochastic, "matrix is not square");
  try {
    require_row_stochastic(a);
    require_row_stochastic(a.transpose());
  } catch (const Error& e) {
    fail(ErrorCode::NotDoublyStochastic, e.what());
  }
}

std::vector<double> pushforward_weights(const Matrix& a, std::span<const double> lambda) {
  if (lambda.size() != a.rows()) fail(ErrorCode::DimensionMismatch, "lambda length differs from row count");
  require_probability(lambda, "lambda");
  require_row_stochastic(a);
  std::vector<double> mu(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) mu[j] += a(i, j) * lambda[i];
  require_probability(mu, "pushforward");
  return mu;
}

bool MajorizationCertificate::equal_weight() const {
  if (lambda.size() != mu.size()) return false;
  const double target = 1.0 / static_cast<double>(lambda.size());
  auto near = [target](double w) { return std::abs(w - target) <= kWeightTol; };
  return std::all_of(lambda.begin(), lambda.end(), near) && std::all_of(mu.begin(), mu.end(), near);
}

double MajorizationCertificate::max_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (std::find(exempt_rows.begin(), exempt_rows.end(), i) != exempt_rows.end()) continue;
    worst = std::max(worst, residuals[i]);
  }
  return worst;
}

MajorizationCertificate verify_majorization(const Space& space, std::span<const Point> x_atoms,
                                            std::span<const double> lambda, std::span<const Point> y_atoms,
                                            std::span<const double> mu, const Matrix& a,
                                            const VerifyOptions& options) {
  const std::size_t m = x_atoms.size();
  const std::size_t n = y_atoms.size();
  if (m == 0 || n == 0) fail(ErrorCode::EmptyInput, "certificate needs atoms on both sides");
  if (lambda.size() != m || mu.size() != n || a.rows() != m || a.cols() != n) {
    std::ostringstream msg;
    msg << "expected A " << m << "x" << n << ", lambda " << m << ", mu " << n << "; got A " << a.rows() << "x"
        << a.cols() << ", lambda " << lambda.size() << ", mu " << mu.size();
    fail(ErrorCode::DimensionMismatch, msg.str());
  }
  require_probability(lambda, "lambda");
  require_probability(mu, "mu");
  require_row_stochastic(a);
  for (const Point& p : x_atoms) require_point(space, p);
  for (const Point& p : y_atoms) require_point(space, p);

  MajorizationCertificate cert;
  cert.space = space;
  cert.a = a;
  cert.lambda.assign(lambda.begin(), lambda.end());
  cert.mu.assign(mu.begin(), mu.end());
  cert.x_atoms.assign(x_atoms.begin(), x_atoms.end());
  cert.y_atoms.assign(y_atoms.begin(), y_atoms.end());
  cert.tol = options.tol;

  std::vector<double> push(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) push[j] += a(i, j) * lambda[i];
  for (std::size_t j = 0; j < n; ++j) cert.pushforward_error = std::max(cert.pushforward_error, std::abs(push[j] - mu[j]));

  std::vector<Point> all(x_atoms.begin(), x_atoms.end());
  all.insert(all.end(), y_atoms.begin(), y_atoms.end());
  cert.scale = instance_scale(space, all);

  for (std::size_t i = 0; i < m; ++i) {
    if (options.ignore_zero_weight_rows && lambda[i] == 0.0) cert.exempt_rows.push_back(i);
    const DiscreteMeasure row{cert.y_atoms, row_weights(a, i)};
    const BarycenterResult bar = barycenter(space, row, options.barycenter);
    if (!bar.converged) cert.unconverged_rows.push_back(i);
    cert.residuals.push_back(distance(space, x_atoms[i], bar.point));
    cert.row_barycenters.push_back(bar.point);
  }

  std::ostringstream why;
  const bool weights_ok = cert.pushforward_error <= options.tol;
  const bool residuals_ok = cert.max_residual() <= options.tol * cert.scale;
  bool converged = true;
  for (std::size_t i : cert.unconverged_rows) {
    if (std::find(cert.exempt_rows.begin(), cert.exempt_rows.end(), i) == cert.exempt_rows.end()) converged = false;
  }
  if (!weights_ok) why << "pushforward error " << cert.pushforward_error << " exceeds " << options.tol << "; ";
  if (!residuals_ok) {
    why << "barycenter residual " << cert.max_residual() << " exceeds " << options.tol * cert.scale << "; ";
  }
  if (!converged) why << "row barycenter solver did not converge; ";
  cert.valid = weights_ok && residuals_ok && converged;
  cert.diagnostic = cert.valid ? "ok" : why.str();
  return cert;
}

MajorizationCertificate synthesize_majorized(const Space& space, std::span<const Point> y_atoms,
                                             std::span<const double> lambda, const Matrix& a,
                                             const VerifyOptions& options) {
  if (a.cols() != y_atoms.size() || a.rows() != lambda.size()) {
    fail(ErrorCode::DimensionMismatch, "A must be (lambda length) x (y atom count)");
  }
  const std::vector<double> mu = pushforward_weights(a, lambda);
  std::vector<Point> ys(y_atoms.begin(), y_atoms.end());
  std::vector<Point> xs;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const BarycenterResult bar = barycenter(space, DiscreteMeasure{ys, row_weights(a, i)}, options.barycenter);
    if (!bar.converged) fail(ErrorCode::NotConverged, "row " + std::to_string(i) + " barycenter did not converge");
    xs.push_back(bar.point);
  }
  MajorizationCertificate cert = verify_majorization(space, xs, lambda, ys, mu, a, options);
  if (!cert.valid) fail(ErrorCode::NotConverged, "synthesized certificate failed re-verification: " + cert.diagnostic);
  return cert;
}

EuclideanDecision decide_majorization_euclidean(const Space& space, std::span<const Point> x_atoms,
                                                std::span<const double> lambda,
                                                std::span<const Point> y_atoms,
                                                std::span<const double> mu, const VerifyOptions& options) {
  if (!space.is_euclidean()) fail(ErrorCode::NotEuclidean, "LP decision is only available in Euclidean spaces");
  const std::size_t m = x_atoms.size();
  const std::size_t n = y_atoms.size();
  const std::size_t dim = space.param();
  if (m == 0 || n == 0) fail(ErrorCode::EmptyInput, "decision needs atoms on both sides");
  if (lambda.size() != m || mu.size() != n) fail(ErrorCode::DimensionMismatch, "weight lengths differ from atom counts");
  require_probability(lambda, "lambda");
  require_probability(mu, "mu");
  for (const Point& p : x_atoms) require_point(space, p);
  for (const Point& p : y_atoms) require_point(space, p);

  // Variables a_ij at index i*n + j.
  const std::size_t vars = m * n;
  const std::size_t rows = m + n + m * dim;
  Matrix e(rows, vars);
  std::vector<double> rhs(rows, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) e(i, i * n + j) = 1.0;
    rhs[i] = 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) e(m + j, i * n + j) = lambda[i];
    rhs[m + j] = mu[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t r = m + n + i * dim + k;
      for (std::size_t j = 0; j < n; ++j) e(r, i * n + j) = y_atoms[j].coords()[k];
      rhs[r] = x_atoms[i].coords()[k];
    }
  }

  const FeasibilityResult lp = feasibility(e, rhs);
  EuclideanDecision out;
  out.lp_residual = lp.residual;
  out.feasible = lp.feasible;
  if (!lp.feasible) return out;

  out.witness = Matrix(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += lp.point[i * n + j];
    for (std::size_t j = 0; j < n; ++j) out.witness(i, j) = lp.point[i * n + j] / total;
  }
  out.certificate = verify_majorization(space, x_atoms, lambda, y_atoms, mu, out.witness, options);
  return out;
}

// ---------------------------------------------------------------------------

Matrix permutation_matrix(const Permutation& p) {
  Matrix m(p.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m(i, p[i]) = 1.0;
  return m;
}

Matrix BirkhoffDecomposition::reconstruct(std::size_t n) const {
  Matrix m(n, n);
  for (const BirkhoffTerm& t : terms)
    for (std::size_t i = 0; i < n; ++i) m(i, t.permutation[i]) += t.weight;
  return m;
}

namespace {

// Nonzero c with sum_k c_k vec(P_k) = 0, or empty when the terms are affinely
// independent.
std::vector<double> permutation_dependency(const std::vector<BirkhoffTerm>& terms, std::size_t n) {
  const std::size_t rows = n * n;
  const std::size_t cols = terms.size();
  Matrix m(rows, cols);
  for (std::size_t k = 0; k < cols; ++k)
    for (std::size_t i = 0; i < n; ++i) m(i * n + terms[k].permutation[i], k) = 1.0;

  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    for (std::size_t i = r; i < rows; ++i)
      if (std::abs(m(i, c)) > std::abs(m(best, c))) best = i;
    if (std::abs(m(best, c)) < 1e-9) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(m(r, j), m(best, j));
    const double p = m(r, c);
    for (std::size_t j = 0; j < cols; ++j) m(r, j) /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0.0) continue;
      const double f = m(i, c);
      for (std::size_t j = 0; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    pivot_col.push_back(c);
    is_pivot[c] = true;
    ++r;
  }
  const auto free_it = std::find(is_pivot.begin(), is_pivot.end(), false);
  if (free_it == is_pivot.end()) return {};
  const std::size_t free = static_cast<std::size_t>(free_it - is_pivot.begin());
  std::vector<double> c(cols, 0.0);
  c[free] = 1.0;
  for (std::size_t k = 0; k < pivot_col.size(); ++k) c[pivot_col[k]] = -m(k, free);
  return c;
}

void caratheodory_reduce(std::vector<BirkhoffTerm>& terms, std::size_t n) {
  const std::size_t limit = (n - 1) * (n - 1) + 1;
  while (terms.size() > limit) {
    std::vector<double> c = permutation_dependency(terms, n);
    if (c.empty()) break;
    if (std::none_of(c.begin(), c.end(), [](double v) { return v > 1e-12; })) {
      for (double& v : c) v = -v;
    }
    std::size_t arg = terms.size();
    double theta = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (c[k] <= 1e-12) continue;
      const double ratio = terms[k].weight / c[k];
      if (arg == terms.size() || ratio < theta) {
        theta = ratio;
        arg = k;
      }
    }
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k].weight -= theta * c[k];
    terms[arg].weight = 0.0;
    std::erase_if(terms, [](const BirkhoffTerm& t) { return t.weight <= 1e-15; });
  }
}

}  // namespace

BirkhoffDecomposition birkhoff_decompose(const Matrix& d) {
  require_doubly_stochastic(d);
  const std::size_t n = d.rows();
  Matrix rest = d;
  for (double& v : rest.data()) v = std::max(v, 0.0);

  BirkhoffDecomposition out;
  for (std::size_t guard = 0; guard <= n * n; ++guard) {
    if (rest.max_abs() <= 1e-12) break;
    const auto perm = positive_support_matching(rest, 1e-12);
    if (!perm) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (double v : rest.row(i)) row += v;
        mass = std::max(mass, row);
      }
      if (mass <= kWeightTol) break;
      fail(ErrorCode::MatchingFailed, "no positive-support permutation in the remaining matrix");
    }
    double w = rest(0, (*perm)[0]);
    for (std::size_t i = 0; i < n; ++i) w = std::min(w, rest(i, (*perm)[i]));
    for (std::size_t i = 0; i < n; ++i) rest(i, (*perm)[i]) -= w;
    for (double& v : rest.data())
      if (v < 1e-12) v = 0.0;
    out.terms.push_back({w, *perm});
  }
  caratheodory_reduce(out.terms, n);

  const Matrix rebuilt = out.reconstruct(n);
  for (std::size_t k = 0; k < n * n; ++k) {
    out.reconstruction_error = std::max(out.reconstruction_error, std::abs(rebuilt.data()[k] - d.data()[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Permutation> all_permutations(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

void rado_hull_lp(const Space& space, std::span<const Point> x, std::span<const Point> y, RadoReport& report) {
  const std::size_t n = x.size();
  const std::size_t dim = space.param();
  const auto perms = all_permutations(n);
  Matrix e(1 + n * dim, perms.size());
  std::vector<double> rhs(1 + n * dim);
  rhs[0] = 1.0;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    e(0, k) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < dim; ++c) e(1 + i * dim + c, k) = y[perms[k][i]].coords()[c];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) rhs[1 + i * dim + c] = x[i].coords()[c];
  const FeasibilityResult lp = feasibility(e, rhs);
  report.lp_member = lp.feasible;
  if (!lp.feasible) return;
  for (std::size_t k = 0; k < perms.size(); ++k) {
    if (lp.point[k] > 1e-12) report.hull_coefficients.push_back({perms[k], lp.point[k]});
  }
}

}  // namespace

RadoReport rado_probe(const Space& space, std::span<const Point> x, std::span<const Point> y, double tol,
                      const std::optional<Matrix>& certificate, const BarycenterOptions& options) {
  if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "x and y tuples differ in length");
  if (x.empty()) fail(ErrorCode::EmptyInput, "empty tuples");
  const std::size_t n = x.size();
  if (n > kRadoMaxN) fail(ErrorCode::TooLarge, "rado probe enumerates n! permutations; n must be <= 6");
  for (const Point& p : x) require_point(space, p);
  for (const Point& p : y) require_point(space, p);

  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  VerifyOptions vopts;
  vopts.tol = tol;
  vopts.barycenter = options;

  RadoReport report;
  if (space.is_euclidean()) rado_hull_lp(space, x, y, report);

  Matrix a;
  if (certificate) {
    a = *certificate;
    const MajorizationCertificate cert = verify_majorization(space, x, uniform, y, uniform, a, vopts);
    if (!cert.valid) fail(ErrorCode::NoCertificate, "supplied matrix is not a valid certificate: " + cert.diagnostic);
  } else if (space.is_euclidean()) {
    const EuclideanDecision decision = decide_majorization_euclidean(space, x, uniform, y, uniform, vopts);
    if (!decision.feasible) fail(ErrorCode::NoCertificate, "x is not majorized by y");
    a = decision.witness;
  } else {
    fail(ErrorCode::NoCertificate, "curved spaces need an explicit certificate matrix");
  }
  report.certificate_matrix = a;
  report.decomposition = birkhoff_decompose(a);

  // Barycenter of the permuted y-tuples in the power space M^n.
  const Space power = Space::product(std::vector<Space>(n, space));
  DiscreteMeasure tuples;
  double total = 0.0;
  for (const BirkhoffTerm& t : report.decomposition.terms) total += t.weight;
  for (const BirkhoffTerm& t : report.decomposition.terms) {
    std::vector<Point> parts;
    for (std::size_t i = 0; i < n; ++i) parts.push_back(y[t.permutation[i]]);
    tuples.atoms.push_back(Point::product(std::move(parts)));
    tuples.weights.push_back(t.weight / total);
  }
  const BarycenterResult bar = barycenter(power, tuples, options);
  const Point x_tuple = Point::product({x.begin(), x.end()});
  std::vector<Point> all(x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  report.scale = instance_scale(space, all);
  report.reconstruction_residual = distance(power, x_tuple, bar.point);
  report.necessity_holds = bar.converged && report.reconstruction_residual <= tol * report.scale;
  return report;
}

}  // namespace npcmaj
