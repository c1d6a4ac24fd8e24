#include <algorithm>
#include <cmath>

#include "alc/controller.hpp"
#include "alc/errors.hpp"

namespace alc {

namespace {

struct Node {
  double x, y, th, psi;  // psi: desired-path tangent angle at this station
};

// Coordinate-descent workspace with prefix caching: changing u_j only
// invalidates stages j..N, so candidate evaluation restarts the rollout at
// node j-1 and adds the cached cost of stages 1..j-1.
class Problem {
 public:
  Problem(const VehicleState& state, const PolyCurve& p_d, const PolyCurve& p_l,
          const PolyCurve& p_r, const MpcConfig& cfg)
      : pd_(p_d), pl_(p_l), pr_(p_r), cfg_(cfg), n_(cfg.horizon),
        v_(state.speed), x0_(state.x) {
    const double reach = v_ * cfg_.dt * n_;
    for (const PolyCurve* c : {&p_d, &p_l, &p_r}) {
      if (c->s_min() > 0.0 || reach > c->s_max())
        throw HorizonRangeError("mpc_steer: horizon extends past curve valid range");
    }
    u_.assign(static_cast<std::size_t>(n_), 0.0);
    nodes_.resize(static_cast<std::size_t>(n_) + 1);
    stage_cost_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
    prefix_.assign(static_cast<std::size_t>(n_) + 1, 0.0);
    nodes_[0] = {state.x, state.y, state.heading, std::atan(pd_.deriv_unchecked(0.0))};
    rebuild_from(1);
    if (!std::isfinite(total_cost_))
      throw HorizonRangeError("mpc_steer: non-finite cost over the horizon");
  }

  void set_controls(const std::vector<double>& u) {
    if (u.size() != static_cast<std::size_t>(n_))
      throw ShapeError("mpc: control sequence length mismatch");
    u_ = u;
    rebuild_from(1);
  }

  double total_cost() const { return total_cost_; }
  const std::vector<double>& controls() const { return u_; }

  std::vector<VehicleState> predicted_states() const {
    std::vector<VehicleState> out;
    out.reserve(static_cast<std::size_t>(n_));
    for (int i = 1; i <= n_; ++i) {
      const Node& p = nodes_[static_cast<std::size_t>(i)];
      out.push_back({p.x, p.y, p.th, v_, u_[static_cast<std::size_t>(i - 1)]});
    }
    return out;
  }

  // One pass of coordinate minimizations; cost never increases.
  void sweep() {
    for (int j = 1; j <= n_; ++j) optimize_coordinate(j);
  }

 private:
  Node advance(const Node& p, double u) const {
    Node nx;
    nx.x = p.x + v_ * std::cos(p.th) * cfg_.dt;
    nx.y = p.y + v_ * std::sin(p.th) * cfg_.dt;
    nx.th = std::clamp(p.th + (v_ / cfg_.wheelbase) * std::tan(u) * cfg_.dt,
                       -cfg_.max_heading, cfg_.max_heading);
    nx.psi = std::atan(pd_.deriv_unchecked(nx.x - x0_));
    return nx;
  }

  double stage_cost(const Node& prev, const Node& cur, double u, int i) const {
    const double s = cur.x - x0_;
    const double path_err = pd_.eval_unchecked(s) - cur.y;
    const double exp_l = std::exp(-(pl_.eval_unchecked(s) - cur.y));
    const double exp_r = std::exp(pr_.eval_unchecked(s) - cur.y);
    const double eps_h = cur.th - cur.psi;
    const double eps_a = ((cur.th - prev.th) - (cur.psi - prev.psi)) / cfg_.dt;
    const double pen = u * u;
    const MpcWeights& w = cfg_.running;
    const double scale =
        cfg_.stage_scale.empty() ? 1.0 : cfg_.stage_scale[static_cast<std::size_t>(i - 1)];
    return scale * (w.path_error * path_err * path_err + w.exp_left * exp_l * exp_l +
                    w.exp_right * exp_r * exp_r + w.heading_error * eps_h * eps_h +
                    w.heading_rate_error * eps_a * eps_a + w.steer_penalty * pen * pen);
  }

  double terminal_cost(const Node& t) const {
    const double s = t.x - x0_;
    const double path_err = pd_.eval_unchecked(s) - t.y;
    const double exp_l = std::exp(-(pl_.eval_unchecked(s) - t.y));
    const double exp_r = std::exp(pr_.eval_unchecked(s) - t.y);
    const double eps_h = t.th - t.psi;
    const MpcWeights& w = cfg_.terminal;
    return w.path_error * path_err * path_err + w.exp_left * exp_l * exp_l +
           w.exp_right * exp_r * exp_r + w.heading_error * eps_h * eps_h;
  }

  void rebuild_from(int j) {
    for (int i = j; i <= n_; ++i) {
      const Node& prev = nodes_[static_cast<std::size_t>(i - 1)];
      const double ui = u_[static_cast<std::size_t>(i - 1)];
      nodes_[static_cast<std::size_t>(i)] = advance(prev, ui);
      stage_cost_[static_cast<std::size_t>(i)] =
          stage_cost(prev, nodes_[static_cast<std::size_t>(i)], ui, i);
      prefix_[static_cast<std::size_t>(i)] =
          prefix_[static_cast<std::size_t>(i - 1)] + stage_cost_[static_cast<std::size_t>(i)];
    }
    total_cost_ = prefix_[static_cast<std::size_t>(n_)] +
                  terminal_cost(nodes_[static_cast<std::size_t>(n_)]);
  }

  // Total cost with u_j replaced by `uj`, later controls unchanged.
  double eval_candidate(int j, double uj) const {
    Node p = nodes_[static_cast<std::size_t>(j - 1)];
    double c = prefix_[static_cast<std::size_t>(j - 1)];
    for (int i = j; i <= n_; ++i) {
      const double ui = i == j ? uj : u_[static_cast<std::size_t>(i - 1)];
      const Node nx = advance(p, ui);
      c += stage_cost(p, nx, ui, i);
      p = nx;
    }
    return c + terminal_cost(p);
  }

  void optimize_coordinate(int j) {
    const double lim = cfg_.max_steer;
    double best_u = u_[static_cast<std::size_t>(j - 1)];
    double best_c = total_cost_;

    // Coarse scan of the feasible interval, candidates ordered by |u| so a
    // symmetric landscape keeps the centered control (strict improvements
    // only; ties never displace the incumbent).
    std::vector<double> grid(static_cast<std::size_t>(cfg_.coarse_samples));
    const double h = 2.0 * lim / (cfg_.coarse_samples - 1);
    for (int k = 0; k < cfg_.coarse_samples; ++k)
      grid[static_cast<std::size_t>(k)] = -lim + h * k;
    std::sort(grid.begin(), grid.end(), [](double a, double b) {
      const double aa = std::abs(a), ab = std::abs(b);
      return aa != ab ? aa < ab : a < b;
    });
    for (double v : grid) {
      if (v == best_u) continue;
      const double c = eval_candidate(j, v);
      if (c < best_c) {
        best_c = c;
        best_u = v;
      }
    }

    // Golden-section refinement inside one grid spacing of the best sample.
    golden_refine(j, std::max(-lim, best_u - h), std::min(lim, best_u + h), best_u, best_c);

    if (best_u != u_[static_cast<std::size_t>(j - 1)]) {
      u_[static_cast<std::size_t>(j - 1)] = best_u;
      rebuild_from(j);
    }
  }

  void golden_refine(int j, double a, double b, double& best_u, double& best_c) const {
    constexpr double r = 0.6180339887498949;
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = eval_candidate(j, x1);
    double f2 = eval_candidate(j, x2);
    for (int it = 0; it < 40 && (b - a) > 1e-8; ++it) {
      if (f1 < best_c) {
        best_c = f1;
        best_u = x1;
      }
      if (f2 < best_c) {
        best_c = f2;
        best_u = x2;
      }
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - r * (b - a);
        f1 = eval_candidate(j, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + r * (b - a);
        f2 = eval_candidate(j, x2);
      }
    }
  }

  PolyCurve pd_, pl_, pr_;
  const MpcConfig& cfg_;
  int n_;
  double v_, x0_;
  std::vector<double> u_;
  std::vector<Node> nodes_;
  std::vector<double> stage_cost_;
  std::vector<double> prefix_;
  double total_cost_ = 0.0;
};

}  // namespace

MpcResult mpc_steer(const VehicleState& state, const PolyCurve& p_d, const PolyCurve& p_l,
                    const PolyCurve& p_r, const MpcConfig& cfg) {
  cfg.validate();
  Problem prob(state, p_d, p_l, p_r, cfg);

  MpcResult res;
  res.cost_history.push_back(prob.total_cost());
  for (int it = 0; it < cfg.solver_iters; ++it) {
    const double before = prob.total_cost();
    prob.sweep();
    res.cost_history.push_back(prob.total_cost());
    if (before - prob.total_cost() < cfg.solver_tol) break;
  }

  res.controls = prob.controls();
  res.steering = res.controls.front();
  res.predicted = prob.predicted_states();
  res.cost = prob.total_cost();
  return res;
}

double mpc_sequence_cost(const VehicleState& state, const PolyCurve& p_d, const PolyCurve& p_l,
                         const PolyCurve& p_r, const MpcConfig& cfg,
                         std::vector<double> controls) {
  cfg.validate();
  for (double& u : controls) u = std::clamp(u, -cfg.max_steer, cfg.max_steer);
  Problem prob(state, p_d, p_l, p_r, cfg);
  prob.set_controls(controls);
  return prob.total_cost();
}

}  // namespace alc
