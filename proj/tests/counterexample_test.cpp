#include "doctest.h"
#include "malcev/counterexample.hpp"
#include "support.hpp"

using namespace malcev;

namespace {

  std::vector<std::string> sexprs(FreeStore const& st, FreeCube const& c) {
    std::vector<std::string> out;
    for (auto v : c.labels) {
      out.push_back(st.to_sexpr(v));
    }
    return out;
  }

  FreeValue ck(FreeStore& st, std::size_t k, std::vector<std::uint64_t> xs) {
    std::vector<FreeValue> a;
    for (auto x : xs) {
      a.push_back(st.nat(x));
    }
    return eval_Ck(st, k, a);
  }

  SearchOptions opts(std::size_t depth, std::size_t leaves,
                     std::vector<std::uint64_t> seeds = {}) {
    SearchOptions o;
    o.depth      = depth;
    o.max_leaves = leaves;
    o.seeds      = std::move(seeds);
    return o;
  }

}  // namespace

TEST_CASE("interned values are equal iff structurally equal") {
  FreeStore st;
  auto      a = st.nat(3);
  CHECK(st.nat(3) == a);
  CHECK(st.nat(4) != a);
  std::vector<FreeValue> args{st.nat(0), st.nat(1)};
  auto                   s1 = st.app("s", args);
  auto                   s2 = st.app("s", args);
  CHECK(s1 == s2);
  CHECK(st.app("t", args) != s1);
  std::vector<FreeValue> nested{s1, a};
  auto                   n1 = st.app("s", nested);
  CHECK(n1 != s1);
  CHECK(st.to_sexpr(n1) == "(s (s 0 1) 3)");
  CHECK(st.is_nat(a));
  CHECK_FALSE(st.is_nat(s1));
  CHECK(st.nat_value(a) == 3);
  CHECK_THROWS(st.nat_value(s1));
  CHECK(st.args(n1) == nested);
  CHECK(st.tag(n1) == "s");
}

TEST_CASE("family C values") {
  FreeStore st;
  auto      n = [&](std::uint64_t x) { return st.nat(x); };
  CHECK(eval_C(st, n(0), n(0), n(0)) == n(3));
  CHECK(eval_C(st, n(1), n(2), n(0)) == n(3));
  CHECK(st.to_sexpr(eval_C(st, n(0), n(0), n(1))) == "(s 0 0 1)");
  CHECK(st.to_sexpr(eval_C(st, n(1), n(2), n(1))) == "(s 1 2 1)");
  // Injective and disjoint from the naturals.
  auto u = eval_C(st, n(2), n(0), n(0));
  CHECK(u != eval_C(st, n(0), n(2), n(0)));
  CHECK_FALSE(st.is_nat(u));
  CHECK(eval_C(st, u, u, u) != u);
}

TEST_CASE("family Ck values") {
  FreeStore st;
  CHECK(st.to_sexpr(ck(st, 3, {1, 2, 3, 4})) == "(t_3 1 2 3 4)");
  CHECK(ck(st, 3, {1, 2, 0, 4}) == st.nat(5));
  CHECK(ck(st, 3, {0, 0, 3, 4}) == st.nat(5));
  CHECK(ck(st, 3, {0, 0, 0, 0}) == st.nat(5));
  CHECK_FALSE(st.is_nat(ck(st, 3, {0, 1, 0, 0})));
  CHECK_FALSE(st.is_nat(ck(st, 3, {0, 0, 4, 0})));
  CHECK(ck(st, 2, {0, 0, 0}) == st.nat(4));
  CHECK(ck(st, 2, {0, 0, 3}) == st.nat(4));
  CHECK(ck(st, 2, {1, 2, 0}) == st.nat(4));
  CHECK_FALSE(st.is_nat(ck(st, 2, {1, 2, 3})));
  CHECK_THROWS_AS(ck(st, 3, {0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(Family::Ck(1), ValidationError);
  auto f = Family::Ck(4);
  CHECK(f.arity() == 5);
  CHECK(f.special_value() == 6);
  std::vector<std::uint64_t> in{1, 2, 3, 0, 5}, out{1, 2, 3, 4, 5};
  CHECK(f.in_special_domain(in));
  CHECK_FALSE(f.in_special_domain(out));
  CHECK(Family::C().default_seeds() == std::vector<std::uint64_t>{0, 1, 2, 3});
}

TEST_CASE("identity centrality on free cubes") {
  FreeStore st;
  auto      s  = CubeShape::standard(2);
  auto      g0 = free_generator(st, s, 0, 0, 1);
  CHECK_FALSE(identity_violation(g0, 1));
  auto v = identity_violation(g0, 0);
  CHECK_FALSE(v);  // both lines are (0,1)
  auto c = FreeCube(s, {st.nat(3), st.nat(5), st.nat(3), st.nat(6)});
  auto w = identity_violation(c, 1);
  REQUIRE(w);
  CHECK(w->delta_pairs == std::vector<std::size_t>{0});
  CHECK(w->offending_pair == std::pair(st.nat(5), st.nat(6)));
}

TEST_CASE("the direct square violates centrality in the last direction") {
  FreeStore st;
  auto      w = direct_tc_witness(st);
  CHECK(sexprs(st, w.square)
        == std::vector<std::string>{"3", "(s 0 0 1)", "3", "(s 1 2 1)"});
  CHECK(sexprs(st, w.display_square)
        == std::vector<std::string>{"3", "3", "(s 0 0 1)", "(s 1 2 1)"});
  CHECK(w.display_square == transpose(w.square, 0, 1));
  CHECK(w.violation.direction == 1);
  CHECK(identity_violation(w.square, 1));
  // Recompute the square from the generators.
  auto                  s = CubeShape::standard(2);
  std::vector<FreeCube> args{free_generator(st, s, 1, 0, 1),
                             free_generator(st, s, 1, 0, 2),
                             free_generator(st, s, 0, 0, 1)};
  CHECK(apply_family(st, Family::C(), args) == w.square);
}

TEST_CASE("the glued squares share a face and violate after gluing") {
  FreeStore st;
  auto      h = glued_hyper_witness(st);
  CHECK(sexprs(st, h.square1)
        == std::vector<std::string>{"3", "(s 1 0 0)", "(s 0 0 1)", "(s 1 0 1)"});
  CHECK(sexprs(st, h.square2)
        == std::vector<std::string>{"(s 1 0 0)", "3", "(s 1 0 1)", "(s 1 2 1)"});
  CHECK(sexprs(st, h.shared_face)
        == std::vector<std::string>{"(s 1 0 0)", "(s 1 0 1)"});
  CHECK(faces(h.square1, 0).second == h.shared_face);
  CHECK(faces(h.square2, 0).first == h.shared_face);
  CHECK(h.glued
        == glue_faces(faces(h.square1, 0).first, faces(h.square2, 0).second, 0));
  CHECK(sexprs(st, h.glued)
        == std::vector<std::string>{"3", "3", "(s 0 0 1)", "(s 1 2 1)"});
  CHECK(h.oriented == transpose(h.glued, 0, 1));
  CHECK(identity_violation(h.oriented, 1));
  // Neither square violates on its own.
  CHECK_FALSE(identity_violation(h.square1, 1));
  CHECK_FALSE(identity_violation(h.square2, 1));
}

TEST_CASE("eta has one non-special vertex") {
  FreeStore st;
  for (std::size_t k = 2; k <= 4; ++k) {
    CAPTURE(k);
    auto e = eta_witness(st, k);
    CHECK(e.special_vertices == (std::size_t(1) << k) - 1);
    for (std::size_t v = 0; v + 1 < e.eta.labels.size(); ++v) {
      CHECK(e.eta.labels[v] == st.nat(k + 2));
    }
    std::string top = "(t_" + std::to_string(k);
    for (std::size_t j = 1; j <= k + 1; ++j) {
      top += " " + std::to_string(j);
    }
    CHECK(st.to_sexpr(e.eta.labels.back()) == top + ")");
    CHECK(e.violation.direction == k - 1);
    CHECK(e.violation.delta_pairs.size() == (std::size_t(1) << (k - 1)) - 1);
  }
  auto e2 = eta_witness(st, 2);
  CHECK(sexprs(st, e2.eta)
        == std::vector<std::string>{"4", "4", "4", "(t_2 1 2 3)"});
}

TEST_CASE("pruned search matches the explicit enumeration") {
  struct Case {
    Family                     fam;
    std::size_t                k, depth, leaves;
    std::vector<std::uint64_t> seeds;
  };
  std::vector<Case> cases{
      {Family::C(), 2, 1, 3, {0, 1, 2}},
      {Family::C(), 2, 1, 3, {}},
      {Family::C(), 2, 1, 2, {}},
      {Family::C(), 2, 2, 2, {0, 1}},
      {Family::Ck(2), 2, 1, 2, {}},
      {Family::Ck(2), 2, 1, 3, {0, 1, 2, 4}},
  };
  for (auto const& c : cases) {
    CAPTURE(c.fam.name());
    CAPTURE(c.depth);
    CAPTURE(c.leaves);
    FreeStore st;
    auto      o     = opts(c.depth, c.leaves, c.seeds);
    auto      fast  = search_polyk_violation(st, c.fam, c.k, o);
    auto      naive = search_polyk_violation_naive(st, c.fam, c.k, o);
    CHECK(fast.violations == naive.violations);
    CHECK(naive.terms_evaluated == naive.terms_total);
    CHECK(fast.first_violation.has_value() == (fast.violations > 0));
    if (fast.first_violation) {
      CHECK(identity_violation(fast.first_violation->cube, c.k - 1));
    }
  }
}

TEST_CASE("known search counts") {
  FreeStore st;
  CHECK(search_polyk_violation(st, Family::C(), 2, opts(1, 3, {0, 1, 2}))
            .violations
        == 8);
  CHECK(search_polyk_violation(st, Family::C(), 2, opts(1, 3)).violations == 12);
  CHECK(search_polyk_violation(st, Family::C(), 2, opts(1, 2)).violations == 0);
  // With one generator per coordinate, t_2(x, x, y) is already central-
  // violating at k = 2.
  auto r = search_polyk_violation(st, Family::Ck(2), 2, opts(1, 2));
  CHECK(r.violations == 48);
  REQUIRE(r.first_violation);
  CHECK(identity_violation(r.first_violation->cube, 1));
}

TEST_CASE("factorized and per-selection depth-1 searches agree") {
  for (auto fam : {Family::C(), Family::Ck(2)}) {
    FreeStore st;
    auto      a = opts(1, 2);
    auto      b = a;
    b.factorized = false;
    auto ra = search_polyk_violation(st, fam, 2, a);
    auto rb = search_polyk_violation(st, fam, 2, b);
    CHECK(ra.violations == rb.violations);
    CHECK(ra.terms_total == rb.terms_total);
  }
}

TEST_CASE("search results do not depend on the thread count") {
  FreeStore st;
  auto      a = opts(2, 2, {0, 1, 2});
  auto      b = a;
  b.threads   = 3;
  auto ra     = search_polyk_violation(st, Family::C(), 2, a);
  auto rb     = search_polyk_violation(st, Family::C(), 2, b);
  CHECK(ra.violations == rb.violations);
  CHECK(ra.terms_total == rb.terms_total);
}

TEST_CASE("family C has no violation among depth-2 terms over two generators") {
  FreeStore st;
  auto      r = search_polyk_violation(st, Family::C(), 2, opts(2, 0));
  CHECK(r.violations == 0);
  CHECK(r.terms_total == 1533343968ULL);
}

TEST_CASE("witness reports") {
  FreeStore st;
  auto      rep = witness_report(st, Family::C(), 2, opts(1, 0));
  CHECK(rep.found_tc_violation);
  CHECK(rep.hyper);
  CHECK(rep.ok());
  CHECK_THROWS_AS(witness_report(st, Family::C(), 3, opts(1, 0)),
                  ValidationError);
  CHECK_THROWS_AS(witness_report(st, Family::Ck(3), 2, opts(1, 0)),
                  ValidationError);
  auto r3 = witness_report(st, Family::Ck(3), 3, opts(1, 0));
  CHECK(r3.eta);
  CHECK(r3.ok());
}
