#include "lipselect/selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lipselect/errors.hpp"
#include "lipselect/parallel.hpp"

namespace lipselect {
namespace {

// Slack subtracted from the strict acceptance bound so that the non-strict
// sup bound survives roundoff.
constexpr double kStrictSlack = 1e-12;

double row_distance(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, PointId a) {
  const auto i = static_cast<Eigen::Index>(a);
  return (f.row(i) - g.row(i)).norm();
}

}  // namespace

double IterationConfig::effective_epsilon() const {
  return epsilon.value_or((beta - alpha) / 3.0);
}

double IterationConfig::locality_radius(PointId b) const {
  const auto it = locality_radii.find(b);
  return it == locality_radii.end() ? default_locality_radius : it->second;
}

void IterationConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("alpha", "alpha must be a finite nonnegative number");
  }
  if (!(beta > alpha) || !std::isfinite(beta)) {
    throw ParameterError("beta", "beta must be finite and exceed alpha");
  }
  if (epsilon) {
    if (!(*epsilon > 0.0)) throw ParameterError("epsilon", "epsilon must be positive");
    // Allow the last bit of roundoff in (beta - alpha) / 3.
    if (*epsilon > (beta - alpha) / 3.0 * (1.0 + 1e-15)) {
      throw ParameterError("epsilon", "epsilon must not exceed (beta - alpha) / 3");
    }
  }
  if (rounds < 1) throw ParameterError("rounds", "rounds must be at least 1");
  if (!(delta_min > 0.0)) throw ParameterError("delta_min", "delta_min must be positive");
  if (!(tol >= 0.0)) throw ParameterError("tol", "tol must be nonnegative");
  if (!(default_locality_radius > 0.0)) {
    throw ParameterError("r_b", "locality radii must be positive");
  }
  for (const auto& [b, r] : locality_radii) {
    if (!(r > 0.0)) throw ParameterError("r_b", "locality radii must be positive");
  }
}

double bump_weight(double delta, double dist) {
  if (!(delta > 0.0)) throw Error(ErrorKind::precondition, "bump radius must be positive");
  return std::clamp((2.0 * delta - dist) / delta, 0.0, 1.0);
}

double bump_weight(const SampledMetricSpace& space, PointId b, double delta, PointId a) {
  return bump_weight(delta, distance(space, a, b));
}

double compute_delta(const Eigen::MatrixXd& f_prev, const Eigen::MatrixXd& g_b, PointId b,
                     int n, double epsilon, double locality_radius,
                     const SampledMetricSpace& space, double delta_min, double tol) {
  space.check_id(b);
  if (f_prev.rows() != g_b.rows() || f_prev.cols() != g_b.cols() ||
      static_cast<std::size_t>(f_prev.rows()) != space.size()) {
    throw Error(ErrorKind::shape, "selection tables do not match the space");
  }
  if (row_distance(f_prev, g_b, b) > tol) {
    throw Error(ErrorKind::precondition, "local selection is not anchored at f_prev(b)");
  }
  const double bound = std::ldexp(epsilon, -n) - kStrictSlack;
  double delta = std::min(std::ldexp(1.0, -(n + 1)), locality_radius) / 2.0;

  // Distances from b, sorted, so each candidate delta is a prefix scan.
  std::vector<std::pair<double, PointId>> by_distance;
  by_distance.reserve(space.size());
  for (PointId a = 0; a < space.size(); ++a) by_distance.emplace_back(distance(space, a, b), a);
  std::sort(by_distance.begin(), by_distance.end());

  while (true) {
    if (delta < delta_min) {
      throw DegenerateRadiusError(
          b, n,
          "support radius for anchor " + std::to_string(b) + " in round " + std::to_string(n) +
              " fell below delta_min");
    }
    double worst = 0.0;
    for (const auto& [d, a] : by_distance) {
      if (!(d < 2.0 * delta)) break;
      worst = std::max(worst, row_distance(f_prev, g_b, a));
    }
    if (worst <= bound) return delta;
    delta /= 2.0;
  }
}

Selection blend_round(const Selection& f_prev, const RoundRecord& round,
                      const SampledMetricSpace& space) {
  if (f_prev.size() != space.size()) {
    throw Error(ErrorKind::shape, "selection does not match the space");
  }
  Selection out{f_prev.values, round.n};
  for (PointId a = 0; a < space.size(); ++a) {
    std::optional<PointId> owner;
    for (const auto& [b, delta] : round.deltas) {
      if (distance(space, a, b) < 2.0 * delta) {
        if (owner) {
          throw Error(ErrorKind::invariant,
                      "support balls of anchors " + std::to_string(*owner) + " and " +
                          std::to_string(b) + " overlap at point " + std::to_string(a));
        }
        owner = b;
      }
    }
    if (!owner) continue;
    const auto it = round.local_selections.find(*owner);
    if (it == round.local_selections.end()) {
      throw Error(ErrorKind::invariant, "missing local selection for anchor " + std::to_string(*owner));
    }
    const auto i = static_cast<Eigen::Index>(a);
    const double w = bump_weight(space, *owner, round.deltas.at(*owner), a);
    if (w == 1.0) {
      out.values.row(i) = it->second.row(i);
    } else if (w > 0.0) {
      out.values.row(i) = (1.0 - w) * f_prev.values.row(i) + w * it->second.row(i);
    }
  }
  return out;
}

SelectionSequence run_iteration(const Correspondence& phi, const Selection& f0,
                                const IterationConfig& config) {
  config.validate();
  const auto& space = phi.space();
  if (f0.size() != space.size() ||
      static_cast<std::size_t>(f0.values.cols()) != phi.ambient_dim()) {
    throw Error(ErrorKind::shape, "initial selection does not match the correspondence");
  }
  for (PointId a = 0; a < space.size(); ++a) {
    if (!contains(phi.value(a), f0.at(a), config.tol)) {
      throw Error(ErrorKind::precondition,
                  "initial selection leaves phi at point " + std::to_string(a));
    }
  }

  SelectionSequence seq;
  seq.config = config;
  seq.epsilon = config.effective_epsilon();
  seq.hierarchy = build_separation_hierarchy(space, config.rounds);
  seq.selections.push_back(Selection{f0.values, 0});

  for (int n = 1; n <= config.rounds; ++n) {
    const Selection& prev = seq.selections.back();
    RoundRecord record;
    record.n = n;
    record.members = seq.hierarchy.round(n).members;
    record.new_points = seq.hierarchy.new_points(n);

    std::vector<Eigen::MatrixXd> local(record.new_points.size());
    std::vector<double> deltas(record.new_points.size());
    parallel_for(record.new_points.size(), [&](std::size_t i) {
      const PointId b = record.new_points[i];
      try {
        local[i] = local_strong_selection(phi, b, prev.at(b), config.alpha, config.tol);
      } catch (const RateError& e) {
        throw RateError(e.witness(), e.slack(),
                        std::string(e.what()) + " (round " + std::to_string(n) + ")");
      }
      deltas[i] = compute_delta(prev.values, local[i], b, n, seq.epsilon,
                                config.locality_radius(b), space, config.delta_min, config.tol);
    });
    for (std::size_t i = 0; i < record.new_points.size(); ++i) {
      record.deltas.emplace(record.new_points[i], deltas[i]);
      record.local_selections.emplace(record.new_points[i], std::move(local[i]));
    }

    Selection next = blend_round(prev, record, space);
    double change = 0.0;
    for (PointId a = 0; a < space.size(); ++a) {
      change = std::max(change, row_distance(next.values, prev.values, a));
    }
    record.sup_change = change;
    seq.rounds.push_back(std::move(record));
    seq.selections.push_back(std::move(next));
  }
  return seq;
}

LimitSelection limit_selection(const SelectionSequence& seq) {
  if (seq.round_count() < 1) throw Error(ErrorKind::precondition, "sequence has no rounds");
  const int n = seq.round_count();
  return {seq.f(n), std::ldexp(seq.epsilon, -n)};
}

RoundReport verify_round_properties(const SelectionSequence& seq, const Correspondence& phi,
                                    int n) {
  if (n < 1 || n > seq.round_count()) {
    throw Error(ErrorKind::precondition, "round " + std::to_string(n) + " does not exist");
  }
  const auto& space = phi.space();
  const Selection& fn = seq.f(n);
  const Selection& fprev = seq.f(n - 1);
  const RoundRecord& rec = seq.record(n);
  RoundReport report;
  report.n = n;

  // membership
  for (PointId a = 0; a < space.size(); ++a) {
    const double d = distance_to(phi.value(a), fn.at(a));
    if (d > report.membership_distance) {
      report.membership_distance = d;
      report.membership_worst = a;
    }
  }
  report.membership_ok = report.membership_distance <= 1e-8;

  // sup bound
  for (PointId a = 0; a < space.size(); ++a) {
    report.sup_change = std::max(report.sup_change, row_distance(fn.values, fprev.values, a));
  }
  report.sup_bound = std::ldexp(seq.epsilon, -n);
  report.sup_ok = report.sup_change <= report.sup_bound + 1e-9;

  // strong alpha-bound on B(b, delta_b)
  const double alpha = seq.config.alpha;
  for (const auto& [b, delta] : rec.deltas) {
    for (PointId a = 0; a < space.size(); ++a) {
      const double d = distance(space, a, b);
      if (!(d < delta)) continue;
      const double change = (fn.values.row(static_cast<Eigen::Index>(b)) -
                             fn.values.row(static_cast<Eigen::Index>(a)))
                                .norm();
      const double slack = alpha * d + 1e-9 - change;
      if (slack < report.strong_slack) {
        report.strong_slack = slack;
        report.strong_anchor = b;
        report.strong_point = a;
      }
    }
  }
  report.strong_ok = !(report.strong_slack < 0.0);

  // coincidence on B(b, 2^{-n}) for anchors of earlier rounds
  const double radius = std::ldexp(1.0, -n);
  for (int k = 1; k < n; ++k) {
    for (PointId b : seq.hierarchy.new_points(k)) {
      for (PointId a = 0; a < space.size(); ++a) {
        if (!(distance(space, a, b) < radius)) continue;
        const auto i = static_cast<Eigen::Index>(a);
        for (int j = n - 1; j >= k; --j) {
          if (seq.f(j).values.row(i) != fn.values.row(i)) {
            report.coincidence_failures.push_back({a, b, j});
            break;
          }
        }
      }
    }
  }
  report.coincidence_ok = report.coincidence_failures.empty();
  return report;
}

}  // namespace lipselect
