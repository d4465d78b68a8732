#include "symred/dynamics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "symred/builtins.hpp"
#include "symred/errors.hpp"

namespace symred::dynamics {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

struct ReducedField {
  std::size_t m = 0;
  std::vector<PolyEvaluator> entries;
  GradientEvaluator h;

  ReducedField(const invariants::PoissonStructure& lambda, const Poly& h_red) : m(lambda.m), h(h_red) {
    if (h_red.nvars() != m) throw DimensionError("reduced Hamiltonian must be a polynomial in y1..ym");
    for (const auto& e : lambda.entries) entries.emplace_back(e);
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& y) const {
    Eigen::VectorXd grad(static_cast<Eigen::Index>(m));
    h.gradient(view(y), {grad.data(), m});
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (grad(static_cast<Eigen::Index>(j)) != 0.0)
          out(static_cast<Eigen::Index>(i)) += entries[i * m + j].value(view(y)) * grad(static_cast<Eigen::Index>(j));
    return out;
  }
};

// Uniform-step integration with step-doubling defect control: the whole run
// restarts at dt/2 when some step's defect exceeds the tolerance.
std::vector<Eigen::VectorXd> integrate(const VectorField& f, const Eigen::VectorXd& v0, double T, double dt,
                                       const StepControl& control, double& dt_used, std::size_t& halvings) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  if (!(T >= dt)) throw PreconditionError("final time must be at least one step");
  for (halvings = 0; halvings <= control.max_halvings; ++halvings) {
    const double h = dt / std::pow(2.0, static_cast<double>(halvings));
    const auto steps = static_cast<std::size_t>(std::llround(T / h));
    std::vector<Eigen::VectorXd> states;
    states.reserve(steps + 1);
    states.push_back(v0);
    bool rejected = false;
    for (std::size_t i = 0; i < steps && !rejected; ++i) {
      const Eigen::VectorXd& v = states.back();
      Eigen::VectorXd one = rk4_step(f, v, h);
      Eigen::VectorXd two = rk4_step(f, rk4_step(f, v, 0.5 * h), 0.5 * h);
      const double defect = (one - two).norm();
      if (!std::isfinite(defect) || defect > control.defect_tolerance) {
        rejected = true;
        break;
      }
      states.push_back(std::move(one));
    }
    if (!rejected) {
      dt_used = h;
      return states;
    }
  }
  throw ConvergenceError("step defect above tolerance after the maximum number of halvings");
}

double distance_to(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
  if (basis.cols() == 0) return v.norm();
  return (v - basis * (basis.transpose() * v)).norm();
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

BlackBoxHamiltonian central_force(std::size_t n, std::function<double(double)> potential,
                                  std::function<double(double)> potential_derivative) {
  const auto d = static_cast<Eigen::Index>(n);
  BlackBoxHamiltonian h;
  h.name = "central_force";
  h.value = [d, potential](const Eigen::VectorXd& v) {
    return 0.5 * v.tail(d).squaredNorm() + potential(v.head(d).squaredNorm());
  };
  h.gradient = [d, potential_derivative](const Eigen::VectorXd& v) {
    Eigen::VectorXd g(2 * d);
    g.head(d) = 2.0 * potential_derivative(v.head(d).squaredNorm()) * v.head(d);
    g.tail(d) = v.tail(d);
    return g;
  };
  return h;
}

BlackBoxHamiltonian central_force(std::size_t n) {
  return central_force(n, [](double s) { return s; }, [](double) { return 1.0; });
}

HamiltonianSystem::HamiltonianSystem(symplin::SymplecticSpace s, groups::Group g, Poly h)
    : space_(std::move(s)), group_(std::move(g)), momentum_(groups::momentum_map(group_, space_)), poly_(std::move(h)) {
  if (poly_->nvars() != space_.dim()) throw DimensionError("Hamiltonian has the wrong number of variables");
  if (!invariants::is_invariant(*poly_, group_)) throw PreconditionError("Hamiltonian is not invariant");
  for (const auto& fa : momentum_.components)
    if (!invariants::poisson_bracket(*poly_, fa, space_).is_zero())
      throw PreconditionError("Hamiltonian does not commute with the momentum map");
  evaluator_ = GradientEvaluator(*poly_);
  poisson_ = space_.poisson_tensor();
}

HamiltonianSystem::HamiltonianSystem(symplin::SymplecticSpace s, groups::Group g, BlackBoxHamiltonian h,
                                     std::uint64_t seed)
    : space_(std::move(s)), group_(std::move(g)), momentum_(groups::momentum_map(group_, space_)),
      black_box_(std::move(h)) {
  if (!black_box_.value || !black_box_.gradient) throw PreconditionError("black-box Hamiltonian needs value and gradient");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(space_.dim());
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd v(d);
    for (Eigen::Index j = 0; j < d; ++j) v(j) = normal(rng);
    Eigen::MatrixXd gm = group_.random_element(rng);
    const double a = black_box_.value(v), b = black_box_.value(gm * v);
    if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
      throw PreconditionError("black-box Hamiltonian failed the sampled invariance check");
  }
  poisson_ = space_.poisson_tensor();
}

std::string HamiltonianSystem::description() const {
  if (poly_) return to_string(*poly_, phase_space_names(space_.dim() / 2));
  return "builtin:" + black_box_.name;
}

double HamiltonianSystem::energy(const Eigen::VectorXd& v) const {
  return poly_ ? evaluator_.value(view(v)) : black_box_.value(v);
}

Eigen::VectorXd HamiltonianSystem::gradient(const Eigen::VectorXd& v) const {
  if (!poly_) return black_box_.gradient(v);
  Eigen::VectorXd g(v.size());
  evaluator_.gradient(view(v), {g.data(), static_cast<std::size_t>(g.size())});
  return g;
}

Eigen::VectorXd HamiltonianSystem::vector_field(const Eigen::VectorXd& v) const { return poisson_ * gradient(v); }

double Trajectory::max_energy_drift() const { return max_of(energy_drift); }
double Trajectory::max_momentum_drift() const { return max_of(momentum_drift); }
double Trajectory::max_stratum_distance() const { return max_of(stratum_distance); }

Eigen::MatrixXd start_fixed_space(const groups::Group& g, const Eigen::VectorXd& v, double tol) {
  const auto d = static_cast<Eigen::Index>(g.phase_dim());
  std::vector<Eigen::MatrixXd> movers;
  if (g.is_finite()) {
    const auto& fg = g.finite();
    for (std::size_t e : groups::finite_isotropy(fg, v, tol))
      movers.push_back(fg.float_elements()[e] - Eigen::MatrixXd::Identity(d, d));
  } else if (g.is_torus()) {
    auto iso = groups::torus_isotropy(g.torus(), v, tol);
    // Coordinates j whose weight lies in the isotropy lattice are fixed.
    Eigen::MatrixXd basis(d, 0);
    const std::size_t n = g.torus().n();
    std::vector<Eigen::Index> fixed;
    for (std::size_t j = 0; j < n; ++j) {
      IntMatrix rows = iso.lattice;
      rows.push_back(g.torus().column(j));
      if (hermite_normal_form(rows, g.torus().rank()) == iso.lattice) fixed.push_back(static_cast<Eigen::Index>(j));
    }
    basis.resize(d, static_cast<Eigen::Index>(2 * fixed.size()));
    basis.setZero();
    for (std::size_t c = 0; c < fixed.size(); ++c) {
      basis(fixed[c], static_cast<Eigen::Index>(c)) = 1.0;
      basis(static_cast<Eigen::Index>(n) + fixed[c], static_cast<Eigen::Index>(fixed.size() + c)) = 1.0;
    }
    return basis;
  } else {
    Eigen::MatrixXd h = groups::algebra_isotropy(g, v).basis();
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
      for (std::size_t a = 0; a < g.algebra_dim(); ++a) x += h(static_cast<Eigen::Index>(a), c) * g.float_generators()[a];
      movers.push_back(x);
    }
  }
  if (movers.empty()) return Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd stacked(d * static_cast<Eigen::Index>(movers.size()), d);
  for (std::size_t i = 0; i < movers.size(); ++i) stacked.block(static_cast<Eigen::Index>(i) * d, 0, d, d) = movers[i];
  return symplin::numerical_nullspace(stacked, symplin::kRankRelTol, 1.0);
}

Eigen::VectorXd rk4_step(const VectorField& f, const Eigen::VectorXd& v, double dt) {
  const Eigen::VectorXd k1 = f(v);
  const Eigen::VectorXd k2 = f(v + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(v + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(v + dt * k3);
  return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_full(const HamiltonianSystem& sys, const Eigen::VectorXd& v0, double T, double dt,
                          StepControl control) {
  if (static_cast<std::size_t>(v0.size()) != sys.space().dim()) throw DimensionError("initial state has wrong dimension");
  Trajectory tr;
  VectorField f = [&sys](const Eigen::VectorXd& v) { return sys.vector_field(v); };
  tr.states = integrate(f, v0, T, dt, control, tr.dt, tr.halvings);
  const Eigen::MatrixXd fixed = start_fixed_space(sys.group(), v0);
  const double h0 = sys.energy(v0);
  const Eigen::VectorXd f0 = sys.momentum().evaluate(v0);
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto& v = tr.states[i];
    tr.times.push_back(static_cast<double>(i) * tr.dt);
    tr.energy.push_back(sys.energy(v));
    tr.energy_drift.push_back(std::abs(tr.energy.back() - h0));
    tr.momentum.push_back(sys.momentum().evaluate(v));
    tr.momentum_drift.push_back(f0.size() ? (tr.momentum.back() - f0).cwiseAbs().maxCoeff() : 0.0);
    tr.stratum_distance.push_back(distance_to(fixed, v));
  }
  return tr;
}

double check_noether(const Trajectory& traj, const groups::MomentumMap& f) {
  if (f.algebra_dim() == 0 || traj.states.empty()) return 0.0;
  const Eigen::VectorXd f0 = f.evaluate(traj.states.front());
  double drift = 0.0;
  for (const auto& v : traj.states) drift = std::max(drift, (f.evaluate(v) - f0).cwiseAbs().maxCoeff());
  return drift;
}

double check_stratum_preservation(const Trajectory& traj, const Eigen::MatrixXd& basis) {
  double m = 0.0;
  for (const auto& v : traj.states) m = std::max(m, distance_to(basis, v));
  return m;
}

double check_stratum_preservation(const Trajectory& traj, const groups::Group& g) {
  if (traj.states.empty()) return 0.0;
  return check_stratum_preservation(traj, start_fixed_space(g, traj.states.front()));
}

Trajectory integrate_reduced(const invariants::PoissonStructure& lambda, const Poly& h_red, const Eigen::VectorXd& y0,
                             double T, double dt, StepControl control) {
  if (static_cast<std::size_t>(y0.size()) != lambda.m) throw DimensionError("reduced state has wrong dimension");
  ReducedField field(lambda, h_red);
  VectorField f = [&field](const Eigen::VectorXd& y) { return field(y); };
  Trajectory tr;
  tr.states = integrate(f, y0, T, dt, control, tr.dt, tr.halvings);
  const double h0 = field.h.value(view(y0));
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    tr.times.push_back(static_cast<double>(i) * tr.dt);
    tr.energy.push_back(field.h.value(view(tr.states[i])));
    tr.energy_drift.push_back(std::abs(tr.energy.back() - h0));
    tr.momentum.emplace_back();
    tr.momentum_drift.push_back(0.0);
    tr.stratum_distance.push_back(0.0);
  }
  return tr;
}

TwinReport compare_full_vs_reduced(const HamiltonianSystem& sys, const invariants::HilbertMap& h,
                                   const invariants::PoissonStructure& lambda, const Eigen::VectorXd& v0, double T,
                                   double dt) {
  if (!sys.is_polynomial()) throw PreconditionError("reduced integration needs a polynomial Hamiltonian");
  TwinReport rep;
  rep.reduced_hamiltonian = invariants::express_in_generators(*sys.polynomial(), h);
  rep.full = integrate_full(sys, v0, T, dt);
  rep.reduced = integrate_reduced(lambda, rep.reduced_hamiltonian, h.evaluate(v0), T, dt);
  if (rep.full.states.size() != rep.reduced.states.size())
    throw ConvergenceError("full and reduced runs ended on different step sizes");
  for (std::size_t i = 0; i < rep.full.states.size(); ++i)
    rep.max_deviation = std::max(rep.max_deviation, (h.evaluate(rep.full.states[i]) - rep.reduced.states[i]).norm());
  rep.error_constant = rep.max_deviation / (std::pow(rep.full.dt, 4) * T);
  return rep;
}

OrderReport twin_order_test(const HamiltonianSystem& sys, const invariants::HilbertMap& h,
                            const invariants::PoissonStructure& lambda, const Eigen::VectorXd& v0, double T, double dt) {
  OrderReport rep;
  rep.dt = dt;
  rep.coarse_deviation = compare_full_vs_reduced(sys, h, lambda, v0, T, dt).max_deviation;
  rep.fine_deviation = compare_full_vs_reduced(sys, h, lambda, v0, T, 0.5 * dt).max_deviation;
  rep.ratio = rep.fine_deviation > 0.0 ? rep.coarse_deviation / rep.fine_deviation : 0.0;
  return rep;
}

ReturnReport reduced_return_test(const invariants::PoissonStructure& lambda, const Poly& h_red,
                                 const Eigen::VectorXd& y0, double T, double dt) {
  ReturnReport rep;
  ReducedField field(lambda, h_red);
  VectorField forward = [&field](const Eigen::VectorXd& y) { return field(y); };
  VectorField backward = [&field](const Eigen::VectorXd& y) { return Eigen::VectorXd(-field(y)); };
  StepControl control;
  double used = 0.0, used_back = 0.0, used_half = 0.0;
  std::size_t halvings = 0;
  auto fwd = integrate(forward, y0, T, dt, control, used, halvings);
  auto back = integrate(backward, fwd.back(), T, used, control, used_back, halvings);
  auto half = integrate(forward, y0, T, 0.5 * used, control, used_half, halvings);
  rep.return_error = (back.back() - y0).norm();
  const double richardson = (fwd.back() - half.back()).norm() * 16.0 / 15.0;
  const double floor = 1e-14 * std::max(1.0, y0.norm());
  rep.error_constant = std::max(richardson, floor) / (std::pow(used, 4) * T);
  rep.bound = 2.0 * rep.error_constant * std::pow(used, 4) * T;
  rep.within_bound = rep.return_error <= rep.bound;
  return rep;
}

SeparationReport separation_check(const groups::FiniteGroup& g, const invariants::HilbertMap& h, std::size_t points,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-2, 2);
  const std::size_t d = g.dim();
  std::vector<QMatrix> pts;
  for (std::size_t i = 0; i < points; ++i) {
    QMatrix v(d, 1);
    for (std::size_t r = 0; r < d; ++r) v(r, 0) = entry(rng);
    pts.push_back(v);
    // an orbit partner, so that both outcomes are exercised
    pts.push_back(g.element(std::uniform_int_distribution<std::size_t>(0, g.order() - 1)(rng)) * v);
  }
  auto image = [&h, d](const QMatrix& v) {
    std::vector<Rational> x(d), y;
    for (std::size_t r = 0; r < d; ++r) x[r] = v(r, 0);
    for (const auto& p : h.generators) y.push_back(p.evaluate(std::span<const Rational>(x)));
    return y;
  };
  std::vector<std::vector<Rational>> images;
  std::vector<std::set<QMatrix>> orbits;
  for (const auto& v : pts) {
    images.push_back(image(v));
    std::set<QMatrix> orbit;
    for (std::size_t e = 0; e < g.order(); ++e) orbit.insert(g.element(e) * v);
    orbits.push_back(std::move(orbit));
  }
  SeparationReport rep;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      ++rep.pairs;
      const bool same_orbit = orbits[i].count(pts[j]) > 0;
      if (same_orbit) ++rep.same_orbit_pairs;
      if (same_orbit != (images[i] == images[j])) ++rep.violations;
    }
  return rep;
}

double hamilton_residual(const Trajectory& full, const invariants::HilbertMap& h,
                         const invariants::PoissonStructure& lambda, const Poly& h_red) {
  ReducedField field(lambda, h_red);
  double worst = 0.0;
  std::vector<Eigen::VectorXd> y;
  for (const auto& v : full.states) y.push_back(h.evaluate(v));
  for (std::size_t i = 2; i + 2 < y.size(); ++i) {
    const Eigen::VectorXd derivative = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * full.dt);
    worst = std::max(worst, (derivative - field(y[i])).norm());
  }
  return worst;
}

Eigen::VectorXd circular_orbit_state(double radius) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  v(0) = radius;
  v(4) = std::numbers::sqrt2 * radius;
  return v;
}

double circular_orbit_period() { return std::numbers::pi * std::numbers::sqrt2; }

CrossSectionReport cross_section_scenario(std::pair<double, double> interval, const Eigen::VectorXd& v0, double T,
                                          double dt, std::optional<BlackBoxHamiltonian> hamiltonian) {
  if (v0.size() != 6) throw DimensionError("cross-section scenario lives on T*R^3");
  const auto [lo, hi] = interval;
  if (!(0.0 <= lo && lo < hi)) throw PreconditionError("interval must be an open subinterval of (0, inf)");
  auto angular = [](const Eigen::VectorXd& v) {
    Eigen::Vector3d q = v.head<3>(), p = v.tail<3>();
    return Eigen::Vector3d(q.cross(p));
  };
  const Eigen::Vector3d l0 = angular(v0);
  const double ell = l0(2);
  if (std::abs(l0(0)) > 1e-12 * std::max(1.0, ell) || std::abs(l0(1)) > 1e-12 * std::max(1.0, ell))
    throw PreconditionError("initial angular momentum is not along e3");
  if (!(lo < ell && ell < hi)) throw PreconditionError("initial angular momentum is not inside the interval");

  auto space = symplin::SymplecticSpace::standard(3);
  groups::MatrixLieAlgebra so3{so3_basis(), {}};
  groups::Group g(so3, space);
  HamiltonianSystem sys(space, g, hamiltonian ? *hamiltonian : central_force(3));

  CrossSectionReport rep;
  rep.ell = ell;
  rep.trajectory = integrate_full(sys, v0, T, dt);
  rep.stays_in_section = true;
  std::vector<double> crossings;
  for (std::size_t i = 0; i < rep.trajectory.states.size(); ++i) {
    const auto& v = rep.trajectory.states[i];
    const Eigen::Vector3d l = angular(v);
    rep.max_out_of_plane = std::max({rep.max_out_of_plane, std::abs(v(2)), std::abs(v(5))});
    rep.max_direction_deviation = std::max({rep.max_direction_deviation, std::abs(l(0)), std::abs(l(1))});
    rep.max_magnitude_drift = std::max(rep.max_magnitude_drift, std::abs(l.norm() - l0.norm()));
    rep.residual_symmetry_drift = std::max(rep.residual_symmetry_drift, std::abs(l(2) - l0(2)));
    if (!(lo < l.norm() && l.norm() < hi)) rep.stays_in_section = false;
    if (i > 0) {
      const auto& u = rep.trajectory.states[i - 1];
      if (u(1) < 0.0 && v(1) >= 0.0) {
        const double frac = -u(1) / (v(1) - u(1));
        crossings.push_back(rep.trajectory.times[i - 1] + frac * rep.trajectory.dt);
      }
    }
  }
  rep.stays_in_section = rep.stays_in_section && rep.max_direction_deviation <= 1e-8;
  if (crossings.size() >= 2) rep.period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  return rep;
}

std::string to_csv(const Trajectory& traj, bool reduced) {
  std::ostringstream os;
  os << std::setprecision(17);
  const std::size_t dim = traj.states.empty() ? 0 : static_cast<std::size_t>(traj.states.front().size());
  const std::size_t k = traj.momentum.empty() ? 0 : static_cast<std::size_t>(traj.momentum.front().size());
  os << "t";
  for (std::size_t i = 0; i < dim; ++i) os << ',' << (reduced ? "y" : "x") << i + 1;
  os << ",h";
  for (std::size_t a = 0; a < k; ++a) os << ",F" << a + 1;
  os << ",stratum_dist\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    os << traj.times[i];
    for (Eigen::Index j = 0; j < traj.states[i].size(); ++j) os << ',' << traj.states[i](j);
    os << ',' << traj.energy[i];
    for (std::size_t a = 0; a < k; ++a) os << ',' << traj.momentum[i](static_cast<Eigen::Index>(a));
    os << ',' << traj.stratum_distance[i] << '\n';
  }
  return os.str();
}

void write_csv(const Trajectory& traj, const std::string& path, bool reduced) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_csv(traj, reduced);
}

}  // namespace symred::dynamics
