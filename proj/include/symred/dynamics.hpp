#pragma once

// Invariant Hamiltonian flows on the full space and the reduced equations
// y' = Lambda(y) grad h_red(y) on the Hilbert-map image, with conservation,
// stratum-preservation and twin-trajectory diagnostics.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symred/groups.hpp"
#include "symred/invariants.hpp"
#include "symred/poly.hpp"
#include "symred/symplin.hpp"

namespace symred::dynamics {

struct BlackBoxHamiltonian {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

/// h = 1/2 |p|^2 + V(|q|^2) on T*R^n; V and V' given as functions of s = |q|^2.
BlackBoxHamiltonian central_force(std::size_t n, std::function<double(double)> potential,
                                  std::function<double(double)> potential_derivative);
/// V(s) = s.
BlackBoxHamiltonian central_force(std::size_t n);

class HamiltonianSystem {
 public:
  /// Throws PreconditionError unless h is exactly invariant.
  HamiltonianSystem(symplin::SymplecticSpace s, groups::Group g, Poly h);
  /// Sampled invariance |h(g v) - h(v)| <= 1e-10 on 100 random pairs.
  HamiltonianSystem(symplin::SymplecticSpace s, groups::Group g, BlackBoxHamiltonian h, std::uint64_t seed = 1);

  const symplin::SymplecticSpace& space() const { return space_; }
  const groups::Group& group() const { return group_; }
  const groups::MomentumMap& momentum() const { return momentum_; }
  const std::optional<Poly>& polynomial() const { return poly_; }
  bool is_polynomial() const { return poly_.has_value(); }
  std::string description() const;

  double energy(const Eigen::VectorXd& v) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& v) const;
  /// X_h = Omega^{-T} grad h.
  Eigen::VectorXd vector_field(const Eigen::VectorXd& v) const;

 private:
  symplin::SymplecticSpace space_;
  groups::Group group_;
  groups::MomentumMap momentum_;
  std::optional<Poly> poly_;
  GradientEvaluator evaluator_;
  BlackBoxHamiltonian black_box_;
  Eigen::MatrixXd poisson_;
};

struct Trajectory {
  double dt = 0.0;
  std::size_t halvings = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energy;                  // h along the path
  std::vector<Eigen::VectorXd> momentum;       // F along the path (empty vectors for reduced runs)
  std::vector<double> energy_drift;            // |h(t) - h(0)|
  std::vector<double> momentum_drift;          // max_a |F_a(t) - F_a(0)|
  std::vector<double> stratum_distance;        // distance to the fixed space of the start point's isotropy

  double max_energy_drift() const;
  double max_momentum_drift() const;
  double max_stratum_distance() const;
};

/// Orthonormal basis of V^H for the isotropy H of v (tori and finite groups
/// up to tolerance, Lie algebras through the isotropy subalgebra).
Eigen::MatrixXd start_fixed_space(const groups::Group& g, const Eigen::VectorXd& v, double tol = 1e-9);

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Classical fourth-order step.
Eigen::VectorXd rk4_step(const VectorField& f, const Eigen::VectorXd& v, double dt);

struct StepControl {
  double defect_tolerance = 1e-6;
  std::size_t max_halvings = 10;
};

Trajectory integrate_full(const HamiltonianSystem& sys, const Eigen::VectorXd& v0, double T, double dt,
                          StepControl control = {});

double check_noether(const Trajectory& traj, const groups::MomentumMap& f);
double check_stratum_preservation(const Trajectory& traj, const Eigen::MatrixXd& fixed_space_basis);
double check_stratum_preservation(const Trajectory& traj, const groups::Group& g);

Trajectory integrate_reduced(const invariants::PoissonStructure& lambda, const Poly& h_red, const Eigen::VectorXd& y0,
                             double T, double dt, StepControl control = {});

struct TwinReport {
  Poly reduced_hamiltonian;
  Trajectory full;
  Trajectory reduced;
  double max_deviation = 0.0;
  double error_constant = 0.0;  // max_deviation / (dt^4 T)
};

TwinReport compare_full_vs_reduced(const HamiltonianSystem& sys, const invariants::HilbertMap& h,
                                   const invariants::PoissonStructure& lambda, const Eigen::VectorXd& v0, double T,
                                   double dt);

struct OrderReport {
  double dt = 0.0;
  double coarse_deviation = 0.0;
  double fine_deviation = 0.0;
  double ratio = 0.0;
};

/// Twin deviation at dt and dt/2.
OrderReport twin_order_test(const HamiltonianSystem& sys, const invariants::HilbertMap& h,
                            const invariants::PoissonStructure& lambda, const Eigen::VectorXd& v0, double T, double dt);

struct ReturnReport {
  double return_error = 0.0;
  double error_constant = 0.0;  // C from Richardson: |y_dt(T) - y_{dt/2}(T)| * 16/15 / (dt^4 T)
  double bound = 0.0;           // 2 C dt^4 T
  bool within_bound = false;
};

/// Forward to T then backward to 0 on the reduced equations.
ReturnReport reduced_return_test(const invariants::PoissonStructure& lambda, const Poly& h_red,
                                 const Eigen::VectorXd& y0, double T, double dt);

struct SeparationReport {
  std::size_t pairs = 0;
  std::size_t same_orbit_pairs = 0;
  std::size_t violations = 0;
};

/// Exact check on small integer points: p(v) == p(w) iff w lies in the orbit of v.
SeparationReport separation_check(const groups::FiniteGroup& g, const invariants::HilbertMap& h,
                                  std::size_t points, std::uint64_t seed);

/// max over interior samples of |d/dt p(gamma) - Lambda(p(gamma)) grad h_red(p(gamma))|
/// with d/dt by the five-point central difference.
double hamilton_residual(const Trajectory& full, const invariants::HilbertMap& h,
                         const invariants::PoissonStructure& lambda, const Poly& h_red);

struct CrossSectionReport {
  double ell = 0.0;
  double max_out_of_plane = 0.0;       // |q3|, |p3|
  double max_direction_deviation = 0.0;  // |L1|, |L2|
  double max_magnitude_drift = 0.0;    // ||L(t)| - |L(0)||
  double residual_symmetry_drift = 0.0;  // |L3(t) - L3(0)|
  bool stays_in_section = false;
  std::optional<double> period;  // measured from upward crossings of q2 through 0 after the start
  Trajectory trajectory;
};

/// Central force on T*R^3 with V(s) = s unless a potential is supplied;
/// v0 must have L(v0) = (0, 0, ell) with ell strictly inside the interval.
CrossSectionReport cross_section_scenario(std::pair<double, double> interval, const Eigen::VectorXd& v0, double T,
                                          double dt,
                                          std::optional<BlackBoxHamiltonian> hamiltonian = std::nullopt);

/// Circular orbit of radius r for V(s) = s: q = (r, 0, 0), p = (0, sqrt(2) r, 0).
Eigen::VectorXd circular_orbit_state(double radius);
/// Its closed-form period pi * sqrt(2).
double circular_orbit_period();

/// Header `t,x1..x2n (or y1..ym),h,F1..Fk,stratum_dist`.
void write_csv(const Trajectory& traj, const std::string& path, bool reduced = false);
std::string to_csv(const Trajectory& traj, bool reduced = false);

}  // namespace symred::dynamics
