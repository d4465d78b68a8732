#include "symred/builtins.hpp"

#include "symred/errors.hpp"

namespace symred {

namespace {

QMatrix diagonal(const std::vector<int>& d) {
  QMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"z2_cone", "circle_1_-1", "klein_r4", "so3_central_force"}; }

std::vector<QMatrix> so3_basis() {
  std::vector<QMatrix> out;
  for (int a = 0; a < 3; ++a) {
    // R_a v = e_a x v
    QMatrix r(3, 3);
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    r(c, b) = 1;
    r(b, c) = -1;
    QMatrix x(6, 6);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        x(i, j) = r(i, j);
        x(3 + i, 3 + j) = r(i, j);
      }
    out.push_back(x);
  }
  return out;
}

Model builtin_model(const std::string& name) {
  if (name == "z2_cone") {
    auto s = symplin::SymplecticSpace::standard(1);
    return {name, s, groups::FiniteMatrixGroup{{diagonal({-1, -1})}}, parse_poly("q1^2 + p1^2", phase_space_names(1)), ""};
  }
  if (name == "circle_1_-1") {
    auto s = symplin::SymplecticSpace::standard(2);
    groups::Torus t{{{mpz_class(1), mpz_class(-1)}}};
    return {name, s, t, parse_poly("q1^2 + p1^2 + q2^2 + p2^2", phase_space_names(2)), ""};
  }
  if (name == "klein_r4") {
    auto s = symplin::SymplecticSpace::standard(2);
    groups::FiniteMatrixGroup k{{diagonal({-1, 1, -1, 1}), diagonal({1, -1, 1, -1})}};
    Poly h = parse_poly("1/2*q1^2 + 1/2*p1^2 + q2^2 + p2^2 + 1/4*(q1^2 + p1^2)^2 + q1*p1*q2*p2 + 1/8*(q2^2 + p2^2)^2",
                        phase_space_names(2));
    return {name, s, k, h, ""};
  }
  if (name == "so3_central_force") {
    auto s = symplin::SymplecticSpace::standard(3);
    groups::MatrixLieAlgebra alg{so3_basis(), {}};
    return {name, s, alg, parse_poly("1/2*p1^2 + 1/2*p2^2 + 1/2*p3^2 + q1^2 + q2^2 + q3^2", phase_space_names(3)), ""};
  }
  throw ConfigError("unknown builtin model '" + name + "'");
}

}  // namespace symred
