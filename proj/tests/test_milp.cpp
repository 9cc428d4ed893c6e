#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support/lp_check.hpp"
#include "trk/milp.hpp"

using namespace trk;
using milp::LinearExpr;
using milp::Model;
using milp::Sense;
using milp::VarId;
using milp::VarKind;

TEST_CASE("model construction validates its constants") {
  CHECK_NOTHROW(Model(10, 100));
  CHECK_THROWS_AS(Model(0, 100), std::invalid_argument);
  CHECK_THROWS_AS(Model(10, -1), std::invalid_argument);
  CHECK_THROWS_AS(Model(10, 100, 0.0), std::invalid_argument);
}

TEST_CASE("variable declaration rules") {
  Model m(10, 100);
  VarId x = m.add_var(VarKind::Continuous, 0, 5, "x");
  CHECK(m.var(x).name == "x");
  CHECK(m.find_var("x") == x);
  CHECK(m.find_var("nope") == -1);

  CHECK_THROWS_AS(m.add_var(VarKind::Continuous, 0, 1, "x"), std::invalid_argument);
  CHECK_THROWS_AS(m.add_var(VarKind::Continuous, 0, 1, ""), std::invalid_argument);
  CHECK_THROWS_AS(m.add_var(VarKind::Continuous, 0, 1, "1bad"), std::invalid_argument);
  CHECK_THROWS_AS(m.add_var(VarKind::Continuous, 0, 1, "a b"), std::invalid_argument);
  CHECK_THROWS_AS(m.add_var(VarKind::Continuous, 3, 2, "y"), std::invalid_argument);
  CHECK_THROWS_AS(m.add_var(VarKind::Binary, -1, 1, "z"), std::invalid_argument);
  CHECK_NOTHROW(m.add_var(VarKind::Continuous, -milp::kInf, milp::kInf, "_free"));
}

TEST_CASE("constraint bookkeeping") {
  Model m(10, 100);
  VarId x = m.add_var(VarKind::Continuous, 0, 5, "x");

  LinearExpr lhs = LinearExpr::term(x, 2.0);
  lhs.add(LinearExpr(3.0));  // constant folds into the rhs
  m.add_constraint(lhs, Sense::LE, 7.0, "row");
  CHECK(m.constraints().back().rhs == doctest::Approx(4.0));

  CHECK_THROWS_AS(m.add_constraint(LinearExpr(1.0), Sense::LE, 2.0, "konst"), std::logic_error);
  LinearExpr cancel = LinearExpr::term(x, 1.0);
  cancel.add(x, -1.0);
  CHECK_THROWS_AS(m.add_constraint(cancel, Sense::EQ, 0.0, "zero"), std::logic_error);
  CHECK_THROWS_AS(m.add_constraint(LinearExpr::term(99), Sense::LE, 0.0, "ghost"),
                  std::out_of_range);
  CHECK_THROWS_AS(m.add_constraint(LinearExpr::term(x), Sense::LE, 1.0, "row"),
                  std::invalid_argument);

  m.add_constraint(LinearExpr::term(x), Sense::GE, 0.0);
  m.add_constraint(LinearExpr::term(x), Sense::GE, 1.0);
  const auto& cons = m.constraints();
  CHECK(cons[cons.size() - 2].name != cons.back().name);  // anonymous names stay unique
}

TEST_CASE("normalized merges duplicates and drops zeros") {
  LinearExpr e = LinearExpr::term(0, 2.0);
  e.add(1, 1.0).add(0, -2.0).add(1, 0.5);
  auto terms = e.normalized();
  REQUIRE(terms.size() == 1);
  CHECK(terms[0].var == 1);
  CHECK(terms[0].coef == doctest::Approx(1.5));
  CHECK(LinearExpr().empty());
}

TEST_CASE("objective and fix") {
  Model m(10, 100);
  VarId x = m.add_var(VarKind::Integer, -3, 3, "x");
  m.set_objective(true, LinearExpr::term(x));
  CHECK(m.maximize());

  LinearExpr with_const = LinearExpr::term(x);
  with_const.add(LinearExpr(1.0));
  CHECK_THROWS_AS(m.set_objective(true, with_const), std::invalid_argument);

  CHECK_THROWS_AS(m.fix(x, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(m.fix(x, 0.5), std::invalid_argument);
  m.fix(x, 2.0);
  CHECK(m.var(x).lb == 2.0);
  CHECK(m.var(x).ub == 2.0);
}

TEST_CASE("lp export format") {
  Model m(10, 100);
  VarId x = m.add_var(VarKind::Continuous, -milp::kInf, milp::kInf, "x");
  VarId y = m.add_var(VarKind::Integer, 0, 4, "y");
  VarId z = m.add_var(VarKind::Binary, 0, 1, "z");
  m.add_constraint(LinearExpr::term(x, -1.0).add(y, 2.0), Sense::LE, 3.0, "r1");
  m.add_constraint(LinearExpr::term(z).add(y, 1.0), Sense::EQ, 1.0, "r2");
  m.set_objective(true, LinearExpr::term(x).add(y, -0.5));
  m.fix(z, 1.0);
  std::string lp = m.export_lp();

  CHECK(lp.find("Maximize\n obj: x - 0.5 y\n") != std::string::npos);
  CHECK(lp.find("r1: - x + 2 y <= 3\n") != std::string::npos);
  CHECK(lp.find("r2: z + y = 1\n") != std::string::npos);
  CHECK(lp.find(" x free\n") != std::string::npos);
  CHECK(lp.find(" 0 <= y <= 4\n") != std::string::npos);
  CHECK(lp.find(" z = 1\n") != std::string::npos);
  CHECK(lp.find("Generals\n y\n") != std::string::npos);
  CHECK(lp.find("Binaries\n z\n") != std::string::npos);
  CHECK(lp.rfind("End\n") == lp.size() - 4);
}

TEST_CASE("lp export of an empty objective") {
  Model m(10, 100);
  VarId x = m.add_var(VarKind::Continuous, 0, 1, "x");
  m.add_constraint(LinearExpr::term(x), Sense::GE, 0.0, "r");
  std::string lp = m.export_lp();
  CHECK(lp.find(" obj: 0\n") != std::string::npos);
}

TEST_CASE("min gadget pins its output to the smallest input") {
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      Model m(8, 100);
      VarId x = m.add_var(VarKind::Continuous, -3, 3, "x");
      VarId y = m.add_var(VarKind::Continuous, -3, 3, "y");
      VarId r = milp::encode_min(m, {x, y}, "r");

      testing::Assignment fixed{{x, double(a)}, {y, double(b)}};
      bool any = false;
      testing::enumerate_binaries(testing::binaries_of(m), [&](const testing::Assignment& bits) {
        testing::Assignment all = fixed;
        all.insert(bits.begin(), bits.end());
        auto iv = testing::free_interval(m, all, r);
        if (!iv) return;
        any = true;
        CHECK(iv->first == doctest::Approx(double(std::min(a, b))));
        CHECK(iv->second == doctest::Approx(double(std::min(a, b))));
      });
      CHECK(any);
    }
  }
}

TEST_CASE("max gadget pins its output to the largest input") {
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      Model m(8, 100);
      VarId x = m.add_var(VarKind::Continuous, -3, 3, "x");
      VarId y = m.add_var(VarKind::Continuous, -3, 3, "y");
      VarId r = milp::encode_max(m, {x, y}, "r");

      testing::Assignment fixed{{x, double(a)}, {y, double(b)}};
      bool any = false;
      testing::enumerate_binaries(testing::binaries_of(m), [&](const testing::Assignment& bits) {
        testing::Assignment all = fixed;
        all.insert(bits.begin(), bits.end());
        auto iv = testing::free_interval(m, all, r);
        if (!iv) return;
        any = true;
        CHECK(iv->first == doctest::Approx(double(std::max(a, b))));
        CHECK(iv->second == doctest::Approx(double(std::max(a, b))));
      });
      CHECK(any);
    }
  }
}

TEST_CASE("gadget input validation") {
  Model m(2, 100);
  VarId x = m.add_var(VarKind::Continuous, -3, 3, "x");
  VarId y = m.add_var(VarKind::Continuous, -3, 3, "y");
  CHECK_THROWS_AS(milp::encode_min(m, {}, "r"), std::invalid_argument);
  // spread 6 exceeds big_m_time 2
  CHECK_THROWS_AS(milp::encode_min(m, {x, y}, "r"), std::invalid_argument);
  VarId f = m.add_var(VarKind::Continuous, 0, milp::kInf, "f");
  CHECK_THROWS_AS(milp::encode_max(m, {f}, "r"), std::invalid_argument);
}

TEST_CASE("binary product gadget is exact") {
  for (int zv = 0; zv <= 1; ++zv) {
    for (int yv = -4; yv <= 4; ++yv) {
      Model m(10, 100);
      VarId z = m.add_var(VarKind::Binary, 0, 1, "z");
      VarId y = m.add_var(VarKind::Continuous, -4, 4, "y");
      VarId w = milp::encode_binary_product(m, z, y, -4, 4, "w");
      testing::Assignment fixed{{z, double(zv)}, {y, double(yv)}};
      auto iv = testing::free_interval(m, fixed, w);
      REQUIRE(iv.has_value());
      CHECK(iv->first == doctest::Approx(double(zv * yv)));
      CHECK(iv->second == doctest::Approx(double(zv * yv)));
    }
  }

  Model m(10, 100);
  VarId notz = m.add_var(VarKind::Continuous, 0, 1, "notz");
  CHECK_THROWS_AS(milp::encode_binary_product(m, notz, notz, 0, 1, "w"), std::invalid_argument);
  VarId z = m.add_var(VarKind::Binary, 0, 1, "z");
  CHECK_THROWS_AS(milp::encode_binary_product(m, z, notz, 2, 1, "w"), std::invalid_argument);
}
