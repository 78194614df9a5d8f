#include <doctest.h>

#include <random>

#include "cmjp/errors.hpp"
#include "cmjp/model.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cmjp;

TEST_CASE("the study model is valid") {
  CHECK(model_violations(fixtures::three_regime_model()).empty());
  CHECK(model_violations(fixtures::two_regime_model()).empty());
  CHECK_NOTHROW(validate_model(fixtures::three_regime_model()));
}

TEST_CASE("validate_model reports every violation with its field") {
  ModelParams m = fixtures::two_regime_model();
  m.phi.row(0) << 0.5, 0.6;
  m.rates[1](2, 2) = 1.0;
  const auto errs = model_violations(m);
  REQUIRE(errs.size() >= 2);
  bool phi_msg = false, diag_msg = false;
  for (const auto& e : errs) {
    if (e.find("phi row 1 sums to") != std::string::npos) phi_msg = true;
    if (e.find("Q[2] row 3 has positive diagonal") != std::string::npos) diag_msg = true;
  }
  CHECK(phi_msg);
  CHECK(diag_msg);
  CHECK_THROWS_AS(validate_model(m), InvalidArgument);

  ModelParams bad_sum = fixtures::two_regime_model();
  bad_sum.rates[1](0, 1) += 0.3;
  const auto errs2 = model_violations(bad_sum);
  REQUIRE(errs2.size() == 1);
  CHECK(errs2[0].find("Q[2] row 1 sums to") != std::string::npos);

  ModelParams bad_alpha = fixtures::two_regime_model();
  bad_alpha.alpha[0] = -0.1;
  CHECK(model_violations(bad_alpha).size() == 2);  // negative entry and sum
}

TEST_CASE("embedded_chain") {
  const auto m = fixtures::three_regime_model();
  const Matrix pi = embedded_chain(m.rates[0]);
  CHECK(pi.isApprox(fixtures::m3(0, 0.6, 0.4, 0.5, 0, 0.5, 0.4, 0.6, 0)));
  Matrix q(2, 2);
  q << -1, 1, 1, -1;
  Matrix expect(2, 2);
  expect << 0, 1, 1, 0;
  CHECK(embedded_chain(q) == expect);
  q << 0, 0, 1, -1;
  expect << 0, 0, 1, 0;
  CHECK(embedded_chain(q) == expect);

  std::mt19937_64 gen(2);
  for (int i = 0; i < 20; ++i) {
    const Matrix r = embedded_chain(oracle::random_generator(2 + i % 4, gen));
    CHECK(((r.rowwise().sum().array() - 1.0).abs() <= 1e-12).all());
    CHECK(r.diagonal().isZero());
  }
}

TEST_CASE("path_stats") {
  Path path{7, {0.0, 0.5, 1.2}, {0, 1, 0}, 2.0};
  const SufficientStats s = path_stats(path, 2);
  CHECK(s.id == 7);
  CHECK(s.initial_state == 0);
  CHECK(s.initial == Vector::Unit(2, 0));
  CHECK(s.counts(0, 1) == 1.0);
  CHECK(s.counts(1, 0) == 1.0);
  CHECK(s.counts.diagonal().isZero());
  CHECK(s.occupation[0] == doctest::Approx(1.3));
  CHECK(s.occupation[1] == doctest::Approx(0.7));
  CHECK(s.occupation.sum() == doctest::Approx(2.0).epsilon(1e-12));

  Path single{1, {0.0}, {1}, 4.0};
  const SufficientStats t = path_stats(single, 3);
  CHECK(t.initial == Vector::Unit(3, 1));
  CHECK(t.counts.isZero());
  CHECK(t.occupation == Vector::Unit(3, 1) * 4.0);
}

TEST_CASE("path validation") {
  CHECK_THROWS_AS(path_stats(Path{1, {0.0, 1.0}, {0, 2}, 2.0}, 2), InvalidArgument);   // state out of range
  CHECK_THROWS_AS(path_stats(Path{1, {0.1, 1.0}, {0, 1}, 2.0}, 2), InvalidArgument);   // times[0] != 0
  CHECK_THROWS_AS(path_stats(Path{1, {0.0, 0.0}, {0, 1}, 2.0}, 2), InvalidArgument);   // not increasing
  CHECK_THROWS_AS(path_stats(Path{1, {0.0, 1.0}, {1, 1}, 2.0}, 2), InvalidArgument);   // no real jump
  CHECK_THROWS_AS(path_stats(Path{1, {0.0, 3.0}, {0, 1}, 2.0}, 2), InvalidArgument);   // past horizon
  CHECK_THROWS_AS(path_stats(Path{1, {0.0}, {0, 1}, 2.0}, 2), InvalidArgument);        // length mismatch
}

TEST_CASE("per-path statistics are kept separate") {
  std::vector<Path> paths{{1, {0.0, 1.0}, {0, 1}, 3.0}, {2, {0.0, 2.0}, {1, 0}, 3.0}};
  std::vector<SufficientStats> stats;
  for (const auto& p : paths) stats.push_back(path_stats(p, 2));
  REQUIRE(stats.size() == 2);
  CHECK(stats[0].counts(0, 1) == 1.0);
  CHECK(stats[0].counts(1, 0) == 0.0);
  CHECK(stats[1].counts(1, 0) == 1.0);
  CHECK(stats[1].counts(0, 1) == 0.0);
}

TEST_CASE("parameter layout") {
  const ParamLayout l(3, 3);
  CHECK(l.size() == 24);
  CHECK(l.num_phi() == 6);
  CHECK(l.name(0) == "phi[1,1]");
  CHECK(l.name(1) == "phi[1,2]");
  CHECK(l.name(5) == "phi[3,2]");
  CHECK(l.name(6) == "q[1,2,1]");
  CHECK(l.name(7) == "q[1,3,1]");
  CHECK(l.name(12) == "q[1,2,2]");
  CHECK(l.name(23) == "q[3,2,3]");
  CHECK(l.phi_index(2, 1) == 5);
  CHECK(l.rate_index(2, 1, 2) == 23);
  CHECK(free_parameter_count(3, 3) == 24);
  CHECK(free_parameter_count(3, 1) == 6);
  CHECK(ParamLayout(3, 1).num_phi() == 0);
}

TEST_CASE("to_vector and from_vector round-trip") {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 30; ++i) {
    const ModelParams m = oracle::random_model(2 + i % 3, 1 + i % 4, gen);
    const Vector v = to_vector(m);
    const ModelParams back = from_vector(v, m.num_states, m.num_regimes, m.alpha);
    CHECK(to_vector(back) == v);
    CHECK((back.phi - m.phi).cwiseAbs().maxCoeff() <= 1e-15);
    for (int r = 0; r < m.num_regimes; ++r) {
      CHECK((back.rates[static_cast<std::size_t>(r)] - m.rates[static_cast<std::size_t>(r)]).cwiseAbs().maxCoeff() <=
            1e-15);
    }
  }
  CHECK_THROWS_AS(from_vector(Vector::Zero(3), 3, 3, Vector::Constant(3, 1.0 / 3)), InvalidArgument);
}

TEST_CASE("permute_regimes") {
  const ModelParams m = fixtures::three_regime_model();
  const ModelParams p = permute_regimes(m, {2, 0, 1});
  CHECK(p.rates[0] == m.rates[2]);
  CHECK(p.rates[1] == m.rates[0]);
  CHECK(p.phi.col(0) == m.phi.col(2));
  CHECK(p.phi.col(2) == m.phi.col(1));
  CHECK_THROWS_AS(permute_regimes(m, {0, 1}), InvalidArgument);
}
