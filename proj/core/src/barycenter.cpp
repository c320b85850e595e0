#include "npcmaj/barycenter.hpp"

#include <cmath>
#include <sstream>

#include "npcmaj/error.hpp"
#include "npcmaj/geometry.hpp"

namespace npcmaj {

void require_measure(const Space& space, const DiscreteMeasure& measure) {
  if (measure.atoms.empty()) fail(ErrorCode::InvalidMeasure, "measure has no atoms");
  if (measure.atoms.size() != measure.weights.size()) {
    fail(ErrorCode::InvalidMeasure, "atom and weight counts differ");
  }
  double total = 0.0;
  for (double w : measure.weights) {
    if (!std::isfinite(w) || w < 0.0) fail(ErrorCode::InvalidMeasure, "weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "weights sum to " << total << ", not 1";
    fail(ErrorCode::InvalidMeasure, msg.str());
  }
  for (const Point& p : measure.atoms) require_point(space, p);
}

DiscreteMeasure uniform_measure(std::vector<Point> atoms) {
  const std::size_t n = atoms.size();
  return {std::move(atoms), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

double objective(const Space& space, const DiscreteMeasure& measure, const Point& z) {
  require_measure(space, measure);
  double sum = 0.0;
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
    if (measure.weights[i] == 0.0) continue;
    const double d = distance(space, z, measure.atoms[i]);
    sum += measure.weights[i] * d * d;
  }
  return 0.5 * sum;
}

TangentVector tangent_mean(const Space& space, const DiscreteMeasure& measure, const Point& z) {
  TangentVector g = zero_tangent(space, z);
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
    if (measure.weights[i] == 0.0) continue;
    tangent_axpy(space, g, measure.weights[i], log_map(space, z, measure.atoms[i]));
  }
  return g;
}

namespace {

BarycenterResult finish(const Space& space, const DiscreteMeasure& measure, Point z,
                        std::size_t iterations, bool converged) {
  BarycenterResult r;
  r.grad_norm = tangent_norm(space, tangent_mean(space, measure, z));
  r.objective = objective(space, measure, z);
  r.point = std::move(z);
  r.iterations = iterations;
  r.converged = converged;
  return r;
}

}  // namespace

BarycenterResult barycenter(const Space& space, const DiscreteMeasure& measure,
                            const BarycenterOptions& options) {
  require_measure(space, measure);
  if (!(options.tol > 0.0)) fail(ErrorCode::ParameterOutOfRange, "barycenter tolerance must be > 0");
  if (options.max_iter < 1) fail(ErrorCode::ParameterOutOfRange, "max_iter must be >= 1");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < measure.atoms.size(); ++i)
    if (measure.weights[i] > 0.0) active.push_back(i);

  bool all_equal = true;
  for (std::size_t i : active) all_equal = all_equal && measure.atoms[i] == measure.atoms[active.front()];
  if (all_equal) return finish(space, measure, measure.atoms[active.front()], 0, true);

  if (!options.force_iterative) {
    if (space.is_euclidean()) {
      std::vector<double> mean(space.param(), 0.0);
      for (std::size_t i : active) {
        const auto& c = measure.atoms[i].coords();
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += measure.weights[i] * c[k];
      }
      return finish(space, measure, Point::euclidean(std::move(mean)), 0, true);
    }
    if (active.size() == 2) {
      const std::size_t a = active[0];
      const std::size_t b = active[1];
      const double t = measure.weights[b] / (measure.weights[a] + measure.weights[b]);
      return finish(space, measure, geodesic_point(space, measure.atoms[a], measure.atoms[b], t), 0, true);
    }
  }

  std::size_t start = active.front();
  for (std::size_t i : active)
    if (measure.weights[i] > measure.weights[start]) start = i;

  std::vector<Point> support;
  for (std::size_t i : active) support.push_back(measure.atoms[i]);
  const double threshold = options.tol * instance_scale(space, support);

  Point z = measure.atoms[start];
  double value = objective(space, measure, z);
  double t = 1.0;  // shrinks for good once the unit step is seen to overshoot
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const TangentVector step = tangent_mean(space, measure, z);
    const double norm = tangent_norm(space, step);
    if (!std::isfinite(norm)) fail(ErrorCode::NonFinite, "barycenter iteration produced a non-finite gradient");
    if (norm <= threshold) return finish(space, measure, std::move(z), iter, true);
    // The unit step overshoots once curvature makes J stiffer than the identity,
    // which happens in negatively curved factors at spreads beyond a couple of units.
    try {
      auto move = [&](double scale) {
        return scale == 1.0 ? exp_map(space, z, step) : exp_map(space, z, tangent_scaled(space, step, scale));
      };
      Point next = move(t);
      double next_value = objective(space, measure, next);
      // Increases below rounding noise are accepted; near the minimizer J moves by
      // about |grad|^2, far under the resolution of J itself.
      const double noise = 1e-12 * value + 1e-300;
      for (int halvings = 0; next_value > value + noise && halvings < 60; ++halvings) {
        t *= 0.5;
        next = move(t);
        next_value = objective(space, measure, next);
      }
      if (!std::isfinite(next_value)) fail(ErrorCode::NonFinite, "barycenter objective became non-finite");
      z = std::move(next);
      value = next_value;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFinite) throw;
      fail(ErrorCode::NonFinite, std::string("barycenter iteration diverged: ") + e.what());
    }
  }
  BarycenterResult r = finish(space, measure, std::move(z), options.max_iter, false);
  r.converged = r.grad_norm <= threshold;
  return r;
}

SlackOutcome variance_inequality_check(const Space& space, const DiscreteMeasure& measure,
                                       const Point& z, double tol, const BarycenterOptions& options) {
  const BarycenterResult bar = barycenter(space, measure, options);
  if (!bar.converged) fail(ErrorCode::NotConverged, "barycenter did not converge");
  const double lhs = std::pow(distance(space, bar.point, z), 2);
  double rhs = 0.0;
  std::vector<Point> pts = measure.atoms;
  for (std::size_t i = 0; i < measure.atoms.size(); ++i) {
    rhs += measure.weights[i] * std::pow(distance(space, measure.atoms[i], z), 2);
  }
  pts.push_back(z);
  const double scale = instance_scale(space, pts);
  SlackOutcome out;
  out.slack = lhs - rhs;
  out.threshold = tol * scale * scale;
  out.ok = out.slack <= out.threshold;
  return out;
}

SlackOutcome mean_contraction_check(const Space& space, std::span<const Point> x,
                                    std::span<const Point> y, double tol,
                                    const BarycenterOptions& options) {
  if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "point lists differ in length");
  if (x.empty()) fail(ErrorCode::EmptyInput, "point lists are empty");
  const BarycenterResult bx = barycenter(space, uniform_measure({x.begin(), x.end()}), options);
  const BarycenterResult by = barycenter(space, uniform_measure({y.begin(), y.end()}), options);
  if (!bx.converged || !by.converged) fail(ErrorCode::NotConverged, "barycenter did not converge");
  double mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += distance(space, x[i], y[i]);
  mean /= static_cast<double>(x.size());
  std::vector<Point> pts(x.begin(), x.end());
  pts.insert(pts.end(), y.begin(), y.end());
  SlackOutcome out;
  out.slack = distance(space, bx.point, by.point) - mean;
  out.threshold = tol * instance_scale(space, pts);
  out.ok = out.slack <= out.threshold;
  return out;
}

}  // namespace npcmaj
