#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "supneu/convex.hpp"
#include "oracles/brute_conjugate.hpp"

using namespace supneu;

namespace {

Nonlinearity dense_cubic_table(double t_max = 4.0, int nodes = 4097) {
  std::vector<double> t(nodes), f(nodes);
  for (int i = 0; i < nodes; ++i) {
    t[i] = t_max * i / (nodes - 1);
    f[i] = t[i] * t[i] * t[i];
  }
  // p = 4, mu = 4, ell = 2^(1/3): the power-law constants the data came from.
  return make_tabulated(t, f, 4.0, 4.0, std::pow(2.0, 1.0 / 3.0), 1.0);
}

}  // namespace

TEST_CASE("power law: pointwise values and constants") {
  auto nl = make_power(4.0);
  CHECK(eval_f(nl, 2.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(eval_F(nl, 2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(nl.mu == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(nl.growth_C == 1.0);
  CHECK(nl.ell == doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-15));

  // t f(t) = p F(t) identically for the power law.
  for (double t : {0.25, 1.0, 3.5, 7.0}) {
    CHECK(t * eval_f(nl, t) == doctest::Approx(4.0 * eval_F(nl, t)).epsilon(1e-13));
  }

  auto cubic = make_power(3.0);
  CHECK(cubic.ell == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // The doubling factor is the equality case: F(ell t) = 2 ell F(t).
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(eval_F(cubic, cubic.ell * t) ==
          doctest::Approx(2.0 * cubic.ell * eval_F(cubic, t)).epsilon(1e-13));
  }

  CHECK_THROWS_AS((void)make_power(2.0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_power(1.5), std::invalid_argument);
}

TEST_CASE("primitive F is even and vanishes at zero") {
  auto nl = make_power(4.0);
  CHECK(eval_F(nl, -2.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(eval_F(nl, 0.0) == 0.0);
  auto tab = dense_cubic_table();
  CHECK(eval_F(tab, 0.0) == 0.0);
  CHECK(eval_F(tab, -1.5) == doctest::Approx(eval_F(tab, 1.5)).epsilon(1e-14));
}

TEST_CASE("conjugate: closed form for powers") {
  auto nl = make_power(4.0);
  // q = p/(p-1) = 4/3: F*(8) = 8^(4/3) * 3/4 = 12.
  CHECK(eval_Fstar(nl, 8.0) == doctest::Approx(12.0).epsilon(1e-13));
  CHECK(eval_Fstar(nl, 0.0) == 0.0);
  CHECK(eval_Fstar(nl, -8.0) == doctest::Approx(12.0).epsilon(1e-13));
  // Fenchel--Young equality at the matched pair (t, f(t)) = (2, 8).
  CHECK(eval_F(nl, 2.0) + eval_Fstar(nl, 8.0) ==
        doctest::Approx(2.0 * 8.0).epsilon(1e-13));
}

TEST_CASE("conjugate derivative inverts f") {
  auto nl = make_power(4.0);
  CHECK(eval_Fstar_prime(nl, 8.0) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(eval_Fstar_prime(nl, 0.0) == 0.0);
  CHECK(eval_Fstar_prime(nl, -8.0) == doctest::Approx(-2.0).epsilon(1e-13));
  auto cubic = make_power(3.0);
  CHECK(eval_Fstar_prime(cubic, 9.0) == doctest::Approx(3.0).epsilon(1e-13));

  for (double t : {0.1, 0.9, 2.7, 6.0}) {
    CHECK(std::fabs(eval_Fstar_prime(nl, eval_f(nl, t)) - t) <= 1e-9);
  }
  auto tab = dense_cubic_table();
  for (double t : {0.1, 0.9, 2.7, 3.9}) {
    CHECK(std::fabs(eval_Fstar_prime(tab, eval_f(tab, t)) - t) <= 1e-9);
  }
}

TEST_CASE("tabulated data reproduces the cubic it sampled") {
  auto tab = dense_cubic_table();
  CHECK(eval_f(tab, 2.0) == doctest::Approx(8.0).epsilon(1e-10));
  // Trapezoid primitive of a dense cubic table: F(2) is 4 up to the
  // quadrature accuracy of the node spacing.
  CHECK(std::fabs(eval_F(tab, 2.0) - 4.0) < 1e-4);
  CHECK(std::fabs(eval_Fstar(tab, 8.0) - 12.0) < 1e-3);
  CHECK(std::fabs(eval_Fstar_prime(tab, 8.0) - 2.0) < 1e-4);
}

TEST_CASE("tabulated: linear extension beyond the last node") {
  // Table (0,0), (1,1), (2,3): last slope 2, so f(3) = 3 + 2 = 5.
  auto nl = make_tabulated({1.0, 2.0}, {1.0, 3.0}, 2.5, 2.5, 1.3, 4.0);
  CHECK(eval_f(nl, 3.0) == doctest::Approx(5.0).epsilon(1e-13));
  // F(3) = F(2) + int_2^3 (3 + 2(t-2)) dt = 2.5 + 4 = 6.5.
  CHECK(eval_F(nl, 2.0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(eval_F(nl, 3.0) == doctest::Approx(6.5).epsilon(1e-13));
}

TEST_CASE("domain errors of f and the inverse") {
  auto nl = make_power(4.0);
  CHECK_THROWS_AS((void)eval_f(nl, -1.0), std::domain_error);
  auto tab = make_tabulated({1.0, 2.0}, {1.0, 3.0}, 2.5, 2.5, 1.3, 4.0);
  CHECK_THROWS_AS((void)eval_f(tab, -0.5), std::domain_error);
  // Conjugate of a finite table is only defined up to the extended range the
  // implementation supports; far beyond it the inverse must refuse.
  CHECK_THROWS_AS((void)f_inverse(tab, 1e9), std::domain_error);
  CHECK_THROWS_AS((void)f_inverse(tab, -1.0), std::domain_error);
}

TEST_CASE("tabulated validation") {
  CHECK_THROWS_AS((void)make_tabulated({1.0, 0.5}, {1.0, 2.0}, 3.0, 3.0, 1.2, 1.0),
                  std::invalid_argument);  // t not increasing
  CHECK_THROWS_AS((void)make_tabulated({1.0, 2.0}, {1.0, 0.5}, 3.0, 3.0, 1.2, 1.0),
                  std::invalid_argument);  // f not increasing
  CHECK_THROWS_AS((void)make_tabulated({1.0}, {1.0, 2.0}, 3.0, 3.0, 1.2, 1.0),
                  std::invalid_argument);  // length mismatch
  CHECK_THROWS_AS((void)make_tabulated({1.0, 2.0}, {1.0, 2.0}, 2.0, 3.0, 1.2, 1.0),
                  std::invalid_argument);  // p <= 2
}

TEST_CASE("conjugate matches a bracketed brute-force maximization") {
  auto nl = make_power(4.0);
  for (double s : {0.5, 1.0, 3.0, 8.0, 20.0}) {
    const double brute = oracle::conjugate_brute(
        [&](double t) { return eval_F(nl, t); }, s, /*t_hi=*/12.0);
    CHECK(std::fabs(eval_Fstar(nl, s) - brute) <= 1e-7 * (1.0 + brute));
  }
}

TEST_CASE("biconjugation recovers F on the convex pair") {
  auto nl = make_power(4.0);
  for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double fss = oracle::biconjugate_brute(
        [&](double x) { return eval_F(nl, x); }, t, /*t_hi=*/12.0,
        /*s_hi=*/eval_f(nl, 12.0));
    CHECK(std::fabs(fss - eval_F(nl, t)) <= 1e-6 * (1.0 + eval_F(nl, t)));
  }
}

TEST_CASE("assumption report: power law satisfies everything") {
  auto nl = make_power(4.0);
  auto rep = check_assumptions(nl, 2000);
  CHECK(rep.all());
  CHECK(rep.monotone_f);
  CHECK(rep.growth);
  CHECK(rep.superquadratic);
  CHECK(rep.doubling_F);
  CHECK(rep.doubling_Fstar);
  // t f = mu F holds with equality: the slack is zero to rounding.
  CHECK(std::fabs(rep.slack_superquadratic) <= 1e-9);
  // Measured doubling constant of F*: for p = 4 (q = 4/3) it is 2^(4/3).
  CHECK(rep.doubling_L == doctest::Approx(std::pow(2.0, 4.0 / 3.0)).epsilon(1e-10));
  CHECK(rep.samples > 0);
}

TEST_CASE("assumption report: a linear table fails superquadraticity") {
  // f(t) = t is not superquadratic for any mu > 2: t f = t^2 = 2 F < mu F.
  std::vector<double> t, f;
  for (int i = 1; i <= 64; ++i) {
    t.push_back(i / 16.0);
    f.push_back(i / 16.0);
  }
  auto nl = make_tabulated(t, f, 3.0, 3.0, 1.5, 2.0);
  auto rep = check_assumptions(nl, 500);
  CHECK(rep.monotone_f);
  CHECK_FALSE(rep.superquadratic);
  CHECK(rep.slack_superquadratic < 0.0);
  CHECK_FALSE(rep.all());
}
