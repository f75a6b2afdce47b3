#include <algorithm>
#include <set>

#include "doctest.h"
#include "hecke/sym_table.hpp"

using namespace hecke;

namespace {

MultiPoly v(Var x, int e = 1) { return MultiPoly::variable(x, e); }

const KTable& table() {
  static const KTable t = KTable::load(default_ktable_path());
  return t;
}

MultiPoly p_poly(std::initializer_list<long> descending) {
  MultiPoly out;
  int e = static_cast<int>(descending.size()) - 1;
  for (long c : descending) out += MultiPoly(c) * v(Var::p, e--);
  return out;
}

SymTerm& find_term(KTable& t, int k, const char* label) {
  auto& terms = t.at(k).terms;
  auto it = std::find_if(terms.begin(), terms.end(),
                         [&](const SymTerm& s) { return s.partition && s.partition->label() == label; });
  REQUIRE(it != terms.end());
  return *it;
}

}  // namespace

TEST_CASE("partitions") {
  CHECK(Partition4::from_label("2211").label() == "2211");
  CHECK_THROWS(Partition4({1, 2, 0, 0}));
  CHECK_THROWS(Partition4({1, 0, 0, -1}));
  CHECK_THROWS(Partition4::from_label("22a1"));
}

TEST_CASE("orbit sums") {
  CHECK(sym_expand(Partition4::from_label("0000")) == MultiPoly(1));
  const MultiPoly x1234 = v(Var::x1) * v(Var::x2) * v(Var::x3) * v(Var::x4);
  CHECK(sym_expand(Partition4::from_label("7777")) == x1234.pow(7));
  const MultiPoly s1100 = sym_expand(Partition4::from_label("1100"));
  CHECK(s1100.size() == 6);
  CHECK(s1100 == v(Var::x1) * v(Var::x2) + v(Var::x1) * v(Var::x3) + v(Var::x1) * v(Var::x4) +
                     v(Var::x2) * v(Var::x3) + v(Var::x2) * v(Var::x4) + v(Var::x3) * v(Var::x4));
  CHECK(sym_expand(Partition4::from_label("3210")).size() == 24);
  CHECK(sym_expand(Partition4::from_label("2211")).size() == 6);
  CHECK(sym_expand(Partition4::from_label("7777"), SymConvention::full_s4_sum) ==
        24 * x1234.pow(7));
}

TEST_CASE("orbit sums are symmetric") {
  for (const char* label : {"2110", "3321", "4200", "5531"}) {
    const MultiPoly s = sym_expand(Partition4::from_label(label));
    const MultiPoly swapped = s.substitute({{Var::x1, v(Var::x3)}, {Var::x3, v(Var::x1)}});
    CHECK(swapped == s);
    const MultiPoly cycled = s.substitute(
        {{Var::x1, v(Var::x2)}, {Var::x2, v(Var::x3)}, {Var::x3, v(Var::x4)}, {Var::x4, v(Var::x1)}});
    CHECK(cycled == s);
    for (const auto& [e, c] : s.terms()) CHECK(c == 1);
  }
}

TEST_CASE("denominators") {
  const auto q1 = build_Q(1);
  REQUIRE(q1.size() == 2);
  CHECK(q1[0] == 1 - v(Var::x0) * v(Var::X));
  CHECK(q1[1] == 1 - v(Var::x0) * v(Var::x1) * v(Var::X));
  const auto q4 = build_Q(4);
  CHECK(q4.size() == 16);
  std::set<std::string> distinct;
  for (const auto& f : q4) distinct.insert(f.to_string());
  CHECK(distinct.size() == 16);
  CHECK(q4.back() ==
        1 - v(Var::x0) * v(Var::x1) * v(Var::x2) * v(Var::x3) * v(Var::x4) * v(Var::X));
  CHECK_THROWS(build_Q(0));
  CHECK_THROWS(build_Q(5));

  std::vector<MultiPoly> projected, units;
  for (const auto& f : q4) {
    const MultiPoly g = f.substitute({{Var::x4, MultiPoly()}});
    (g == MultiPoly(1) ? units : projected).push_back(g);
  }
  CHECK(units.size() == 8);
  CHECK(projected == build_Q(3));
}

TEST_CASE("table sanity") {
  const KTable& t = table();
  REQUIRE(t.size() == kNumK);
  const MultiPoly P = build_P4(t);
  CHECK(P.coefficient_of(Var::X, 0) == MultiPoly(1));
  CHECK(P.coefficient_of(Var::X, 1).is_zero());
  CHECK(P.coefficient_of(Var::X, 13).is_zero());
  CHECK(t[1].is_zero());
  CHECK(t[13].is_zero());
  const MultiPoly x1234 = v(Var::x1) * v(Var::x2) * v(Var::x3) * v(Var::x4);
  CHECK(P.coefficient_of(Var::X, 14) == -(v(Var::x0, 14) * v(Var::p, -6) * x1234.pow(7)));
  CHECK(P.degree(Var::X) == 14);
  CHECK(find_term(const_cast<KTable&>(t), 2, "1111").pcoeff == p_poly({2, 4, 1}));
}

TEST_CASE("ktable json round trip") {
  const KTable back = KTable::from_json(table().to_json());
  CHECK(back.to_json() == table().to_json());
  CHECK(build_P4(back) == build_P4(table()));
}

TEST_CASE("functional equation") {
  const auto r = check_functional_equation(table());
  CHECK(r.passed);
  CHECK_FALSE(r.first_failure);
  REQUIRE(r.residuals.size() == 15);
  for (const auto& res : r.residuals) CHECK(res.is_zero());
}

TEST_CASE("functional equation catches a mutated coefficient") {
  KTable t = table();
  find_term(t, 2, "1111").pcoeff = p_poly({2, 4, 2});
  const auto r = check_functional_equation(t);
  CHECK_FALSE(r.passed);
  REQUIRE(r.first_failure);
  CHECK(*r.first_failure == 2);
  for (int k = 0; k < 15; ++k)
    CHECK_MESSAGE(r.residuals[static_cast<std::size_t>(k)].is_zero() == (k != 2 && k != 12), k);
}

TEST_CASE("full S4 sum convention breaks the functional equation at k = 0") {
  const auto r = check_functional_equation(table(), SymConvention::full_s4_sum);
  CHECK_FALSE(r.passed);
  REQUIRE(r.first_failure);
  CHECK(*r.first_failure == 0);
}

TEST_CASE("remark relation") {
  const MultiPoly P4 = build_P4(table());
  CHECK(check_remark_relation(P4, 4).passed);
  CHECK(check_remark_relation(MultiPoly(1), 1).passed);
  CHECK(check_remark_relation(MultiPoly(1), 1, RemarkForm::literal).passed);

  const MultiPoly P2 = 1 - v(Var::x0, 2) * v(Var::x1) * v(Var::x2) * v(Var::X, 2) * v(Var::p, -1);
  CHECK(check_remark_relation(P2, 2).passed);
  CHECK(check_remark_relation(P2, 2, RemarkForm::literal).passed);
  CHECK_FALSE(check_remark_relation(P2 + v(Var::x0) * v(Var::X), 2).passed);

  const MultiPoly P3 = siegel_project(genus4_rational_function(table())).numerator;
  CHECK(P3.degree(Var::X) == 6);
  CHECK(check_remark_relation(P3, 3).passed);
  CHECK(check_remark_relation(P3, 3, RemarkForm::literal).passed);

  // The p-fixed reading does not survive at genus 4.
  CHECK_FALSE(check_remark_relation(P4, 4, RemarkForm::literal).passed);

  CHECK_THROWS(check_remark_relation(v(Var::X, 3), 2));
  CHECK_THROWS(check_remark_relation(v(Var::x3), 2));
}

TEST_CASE("siegel projection") {
  const RationalFunction rf = genus4_rational_function(table());
  const RationalFunction projected = siegel_project(rf);
  CHECK(projected.denominator_factors == build_Q(3));
  CHECK_FALSE(projected.numerator.uses(Var::x4));
  CHECK(projected.numerator == build_P4(table()).substitute({{Var::x4, MultiPoly()}}));
}

TEST_CASE("latex block structure") {
  const std::string tex = to_latex(table());
  CHECK(tex.find("2p^2+4p+1") != std::string::npos);
  for (int k = 0; k < 15; ++k)
    CHECK_MESSAGE(tex.find("K_{" + std::to_string(k) + "}") != std::string::npos, k);
  CHECK(tex.find("\\frac{x_0^2}{p^2}") != std::string::npos);
}
