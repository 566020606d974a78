#include <doctest.h>

#include <functional>
#include <optional>

#include "nvlang/types.hpp"
#include "support/typegen.hpp"

using namespace nvlang::types;
using nvtest::TypeGen;

namespace {

const Type kInt = Type::prim(Kind::Int);
const Type kBool = Type::prim(Kind::Bool);
Type v(int i) { return Type::makeVar(i); }

// Structural equality that also honours the two wildcard rules of unify.
bool agree(const Type& a, const Type& b) {
  if (a.kind == Kind::Any || b.kind == Kind::Any) return true;
  if ((a.kind == Kind::PidAny && (b.kind == Kind::Pid || b.kind == Kind::PidAny)) ||
      (b.kind == Kind::PidAny && a.kind == Kind::Pid)) {
    return true;
  }
  if (a.kind != b.kind || a.name != b.name || a.var != b.var || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!agree(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool selfReferential(const Substitution& s) {
  for (const auto& [var, t] : s) {
    if (occurs(var, t)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("applySubst") {
  CHECK(applySubst({{0, kInt}}, Type::fn({v(0)}, v(0))) == Type::fn({kInt}, kInt));
  Type t = Type::tuple({v(3), Type::list(kBool)});
  CHECK(applySubst({}, t) == t);
  // composed {a -> b} then {b -> Int}: a ends at Int
  Substitution s1{{0, v(1)}};
  Substitution s2{{1, kInt}};
  CHECK(applySubst(compose(s2, s1), v(0)) == kInt);
  CHECK(applySubst(compose(s2, s1), v(0)) == applySubst(s2, applySubst(s1, v(0))));
}

TEST_CASE("compose agrees with sequential application") {
  TypeGen g(99);
  for (int i = 0; i < 500; ++i) {
    Substitution s1{{0, g.gen(2)}, {1, g.gen(2)}};
    Substitution s2{{2, g.gen(2)}, {0, g.gen(1)}};
    Type t = g.gen(3);
    CHECK(applySubst(compose(s2, s1), t) == applySubst(s2, applySubst(s1, t)));
  }
}

TEST_CASE("occurs") {
  CHECK(occurs(0, v(0)));
  CHECK(occurs(0, Type::list(v(0))));
  CHECK(occurs(0, Type::pid(v(0))));
  CHECK(occurs(0, Type::named("Option", {Type::future(v(0))})));
  CHECK(occurs(0, Type::map(kInt, v(0))));
  CHECK_FALSE(occurs(0, Type::fn({kInt}, kBool)));
  CHECK_FALSE(occurs(0, v(1)));
}

TEST_CASE("unify examples") {
  CHECK(unify(Type::prim(Kind::PidAny), Type::pid(kInt)).empty());
  CHECK(unify(Type::pid(kInt), Type::prim(Kind::PidAny)).empty());
  CHECK(unify(Type::prim(Kind::Any), Type::fn({v(0)}, kInt)).empty());
  CHECK_THROWS_AS(unify(v(0), Type::list(v(0))), UnifyError);
  auto s = unify(Type::fn({v(0)}, v(1)), Type::fn({kInt}, kBool));
  CHECK(s == Substitution{{0, kInt}, {1, kBool}});
  CHECK(unify(Type::future(v(2)), Type::future(kInt)) == Substitution{{2, kInt}});
  try {
    unify(Type::fn({kInt}, kInt), Type::fn({kInt, kInt}, kInt));
    FAIL("arity");
  } catch (const UnifyError& e) {
    CHECK(e.reason == UnifyError::Reason::Arity);
  }
  CHECK_THROWS_AS(unify(Type::named("Option", {kInt}), Type::named("Result", {kInt})), UnifyError);
}

TEST_CASE("unifier soundness and occurs safety on random pairs") {
  TypeGen g(2024);
  int solved = 0, occursRejected = 0;
  for (int i = 0; i < 12000; ++i) {
    Type a = g.gen(5);
    Type b = (i % 2) ? g.perturb(a) : g.gen(5);
    try {
      auto s = unify(a, b);
      ++solved;
      CHECK(agree(applySubst(s, a), applySubst(s, b)));
      CHECK_FALSE(selfReferential(s));
      // idempotent
      for (const auto& [var, t] : s) CHECK(applySubst(s, t) == t);
    } catch (const UnifyError& e) {
      if (e.reason == UnifyError::Reason::Occurs) ++occursRejected;
    }
  }
  CHECK(solved > 3000);
  // Pairs that force an infinite type are rejected.
  for (int i = 0; i < 1000; ++i) {
    Type inner = g.gen(3);
    int var = static_cast<int>(g.rng()() % 4);
    Type wrapped = Type::list(Type::tuple({inner, v(var)}));
    CHECK_THROWS_AS(unify(v(var), wrapped), UnifyError);
  }
  for (int i = 0; i < 1000; ++i) CHECK(unify(Type::prim(Kind::PidAny), Type::pid(g.gen(4))).empty());
}

TEST_CASE("unifier generality against ground solutions") {
  // Every ground solution over a small universe must factor through the mgu:
  // sigma o theta == sigma on the variables involved.
  std::vector<Type> universe{kInt, kBool, Type::list(kInt), Type::list(kBool), Type::tuple({kInt, kBool})};
  TypeGen g(5, 3);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    Type a = g.gen(2);
    Type b = g.perturb(a);
    std::optional<Substitution> mgu;
    try {
      mgu = unify(a, b);
    } catch (const UnifyError&) {
    }
    bool anyGround = false;
    for (std::size_t x = 0; x < universe.size(); ++x) {
      for (std::size_t y = 0; y < universe.size(); ++y) {
        for (std::size_t z = 0; z < universe.size(); ++z) {
          Substitution sigma{{0, universe[x]}, {1, universe[y]}, {2, universe[z]}};
          if (!agree(applySubst(sigma, a), applySubst(sigma, b))) continue;
          anyGround = true;
          REQUIRE(mgu.has_value());
          for (int var = 0; var < 3; ++var) CHECK(applySubst(sigma, applySubst(*mgu, v(var))) == applySubst(sigma, v(var)));
          ++checked;
        }
      }
    }
    (void)anyGround;
  }
  CHECK(checked > 100);
}

TEST_CASE("generalize and instantiate") {
  FreshSupply fresh;
  for (int i = 0; i < 10; ++i) fresh.fresh();
  auto sc = generalize({}, Type::fn({v(0)}, kInt));
  CHECK(sc.quantified == std::vector<int>{0});
  CHECK(generalize({0}, Type::fn({v(0)}, v(0))).quantified.empty());
  CHECK(generalize({}, kInt).quantified.empty());

  Scheme id{{0}, Type::fn({v(0)}, v(0))};
  Type t = instantiate(id, fresh);
  CHECK(t.args[0] == t.args[1]);
  CHECK(t.args[0].var >= 10);
  CHECK(instantiate(Scheme{{}, kInt}, fresh) == kInt);
  Scheme lst{{0}, Type::list(v(0))};
  Type l1 = instantiate(lst, fresh), l2 = instantiate(lst, fresh);
  CHECK(l1.args[0].var != l2.args[0].var);
}

TEST_CASE("generalize/instantiate round trip is alpha-equivalent") {
  TypeGen g(77, 6);
  FreshSupply fresh;
  for (int i = 0; i < 100; ++i) fresh.fresh();
  for (int i = 0; i < 1000; ++i) {
    Type t = g.gen(4);
    Type back = instantiate(generalize({}, t), fresh);
    CHECK(alphaEquivalent(t, back));
    auto fv = freeVars(back);
    for (int var : fv) CHECK(var >= 100);
  }
  CHECK_FALSE(alphaEquivalent(Type::fn({v(0)}, v(0)), Type::fn({v(0)}, v(1))));
  CHECK_FALSE(alphaEquivalent(Type::fn({v(0)}, v(1)), Type::fn({v(0)}, v(0))));
}

TEST_CASE("printing") {
  CHECK(typeString(Type::fn({kInt, kInt}, kInt)) == "fn(Int, Int) -> Int");
  CHECK(typeString(Type::fn({Type::list(v(7))}, v(3))) == "fn([a]) -> b");
  CHECK(typeString(Type::named("Option", {kInt})) == "Option[Int]");
  CHECK(typeString(Type::future(Type::pid(Type::named("M")))) == "Future[Pid[M]]");
  CHECK(typeString(Type::prim(Kind::Unit)) == "Unit");
}
