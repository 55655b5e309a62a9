#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "condensed/error.hpp"
#include "condensed/forcing.hpp"
#include "support/oracles.hpp"

using namespace condensed;

namespace {

const Ambient F2 = Ambient::free_group(2);

Element f(const std::string& text) { return F2.parse_element(text); }

Pattern pat(std::vector<Element> F, std::vector<Element> E) { return make_pattern(F2, std::move(F), std::move(E)); }

/// All 2^|F| patterns over F, E enumerated by bitmask.
std::vector<Pattern> all_patterns(const std::vector<Element>& F) {
  std::vector<Pattern> out;
  for (unsigned mask = 0; mask < (1u << F.size()); ++mask) {
    std::vector<Element> E;
    for (std::size_t i = 0; i < F.size(); ++i)
      if (mask & (1u << i)) E.push_back(F[i]);
    out.push_back(pat(F, E));
  }
  return out;
}

/// Checks (hS) ∩ F = E or (Sg) ∩ F = E by queries, with the translation done
/// in string arithmetic.
bool holds_by_query(ForcedSubset& s, const Realization& r) {
  const std::string t_inv = oracle::inverse(oracle::from_element(F2, r.witness));
  std::set<Element> E(r.pattern.E.begin(), r.pattern.E.end());
  for (const auto& x : r.pattern.F) {
    const std::string fx = oracle::from_element(F2, x);
    const std::string k = r.side == Side::Left ? oracle::mul(t_inv, fx) : oracle::mul(fx, t_inv);
    if (s.query(oracle::to_element(F2, k)) != (E.count(x) > 0)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("query pins on read") {
  ForcedSubset s(F2);
  CHECK_FALSE(s.pinned(f("x1")));
  CHECK_FALSE(s.query(f("x1")));
  REQUIRE(s.pinned(f("x1")));
  CHECK(*s.pinned(f("x1")) == false);
  CHECK(s.frontier() == 1);
  s.pin(F2.identity(), true);
  CHECK(s.query(F2.identity()));
  CHECK(s.query(f("x2 x2")) == s.query(f("x2 x2")));
  CHECK(s.frontier() == 2);
}

TEST_CASE("pin_window examples") {
  ForcedSubset s(F2);
  s.pin_window(pat({F2.identity()}, {F2.identity()}));
  CHECK(s.query(F2.identity()));
  CHECK_THROWS_AS(s.pin_window(pat({F2.identity()}, {})), ConflictError);
  CHECK_THROWS_AS(s.pin(F2.identity(), false), ConflictError);

  ForcedSubset t(F2);
  t.pin_window(pat(F2.ball(1, 10).elements, {}));
  CHECK(t.pinned_count() == 5);
  for (const auto& x : F2.ball(1, 10).elements) CHECK(t.pinned(x) == std::optional<bool>(false));
}

TEST_CASE("pin_window is all-or-nothing on conflict") {
  ForcedSubset s(F2);
  s.pin(f("x2"), true);
  CHECK_THROWS_AS(s.pin_window(pat({F2.identity(), f("x1"), f("x2")}, {F2.identity()})), ConflictError);
  CHECK(s.pinned_count() == 1);
  CHECK_THROWS_AS(make_pattern(F2, {f("x1")}, {f("x2")}), UsageError);
}

TEST_CASE("realize_left examples") {
  ForcedSubset s(F2);
  const Element e = F2.identity();
  Element h = s.realize_left(pat({e}, {}));
  CHECK_FALSE(F2.is_identity(h));
  CHECK_FALSE(s.query(F2.inv(h)));
  // first shortlex candidate after e with an unpinned window is x1
  CHECK(h == f("x1"));

  Element h1 = s.realize_left(pat({e}, {e}));
  CHECK(s.pinned(F2.inv(h1)) == std::optional<bool>(true));
  Element h2 = s.realize_left(pat({e}, {e}));
  CHECK(h1 != h2);
  CHECK(s.pinned(F2.inv(h2)) == std::optional<bool>(true));
  for (const auto& r : s.realizations()) CHECK(holds_by_query(s, r));
}

TEST_CASE("realize_right examples") {
  ForcedSubset s(F2);
  const Element e = F2.identity();
  Element g = s.realize_right(pat({e}, {}));
  CHECK_FALSE(s.query(F2.inv(g)));
  Element g1 = s.realize_right(pat({e}, {e}));
  CHECK(s.pinned(F2.inv(g1)) == std::optional<bool>(true));
  // (Sg) ∩ {e} = {e} means e·g⁻¹ ∈ S
  for (const auto& r : s.realizations()) CHECK(holds_by_query(s, r));
}

TEST_CASE("right realization for a firing pattern isolates one class") {
  ForcedSubset s(F2);
  ForcedTranslate base(s);
  const std::vector<Element> conj = {F2.identity(), f("x1"), f("x2 x1^-1"), f("x1 x1")};
  for (std::size_t m = 0; m < conj.size(); ++m) {
    const std::vector<Element> avoid = {F2.identity(), f("x1")};
    Element y = base.isolate(conj, m, avoid);
    CHECK(std::find(avoid.begin(), avoid.end(), y) == avoid.end());
    for (std::size_t j = 0; j < conj.size(); ++j) CHECK(s.query(F2.mul(F2.inv(conj[j]), y)) == (j == m));
  }
  // translates: v⁻¹y ∈ hS exactly for the target
  const Element h = f("x2 x2 x1");
  ForcedTranslate hs(s, h);
  for (std::size_t m = 0; m < conj.size(); ++m) {
    Element y = hs.isolate(conj, m, {});
    for (std::size_t j = 0; j < conj.size(); ++j)
      CHECK(s.query(F2.mul(F2.inv(h), F2.mul(F2.inv(conj[j]), y))) == (j == m));
  }
}

TEST_CASE("fulfill reuses a logged witness unless it is avoided") {
  ForcedSubset s(F2);
  const Pattern p = pat({F2.identity(), f("x1")}, {f("x1")});
  Element g1 = s.fulfill(Side::Right, p);
  CHECK(s.fulfill(Side::Right, p) == g1);
  CHECK(s.realizations().size() == 1);
  Element g2 = s.fulfill(Side::Right, p, {g1});
  CHECK(g2 != g1);
  CHECK(s.realizations().size() == 2);
  CHECK(s.fulfill(Side::Right, p, {g1}) == g2);
}

TEST_CASE("snapshot examples") {
  ForcedSubset s(F2);
  Pattern p = s.snapshot(1);
  CHECK(p.F == F2.ball(1, 10).elements);
  CHECK(p.E.empty());

  ForcedSubset t(F2);
  t.pin(F2.identity(), true);
  p = t.snapshot(0);
  CHECK(p.F == std::vector<Element>{F2.identity()});
  CHECK(p.E == std::vector<Element>{F2.identity()});
  CHECK(t.snapshot(2).F.size() == 17);
  CHECK(t.pinned_count() == 17);
}

TEST_CASE("transitivity_witness examples") {
  const Element e = F2.identity();
  auto w = transitivity_witness(F2, pat({e}, {e}), pat({e}, {}), Side::Left);
  CHECK(w.h == f("x1"));
  CHECK(w.R.E == std::vector<Element>{f("x1")});
  CHECK(std::find(w.R.F.begin(), w.R.F.end(), f("x1")) != w.R.F.end());
  CHECK(verify_transitivity(F2, pat({e}, {e}), pat({e}, {}), w));

  auto empty = transitivity_witness(F2, pat({e}, {}), pat({e}, {}), Side::Right);
  CHECK(empty.R.E.empty());
  CHECK_FALSE(F2.is_identity(empty.h));

  // disjoint supports need no translation
  auto same = transitivity_witness(F2, pat({f("x1")}, {f("x1")}), pat({e}, {}), Side::Left);
  CHECK(F2.is_identity(same.h));
}

TEST_CASE("transitivity witnesses on random Ball(2) patterns") {
  std::mt19937_64 rng(7);
  const auto ball = F2.ball(2, 100).elements;
  std::bernoulli_distribution coin(0.5);
  auto random_pattern = [&] {
    std::vector<Element> F, E;
    for (const auto& x : ball)
      if (coin(rng)) {
        F.push_back(x);
        if (coin(rng)) E.push_back(x);
      }
    return pat(F, E);
  };
  for (int i = 0; i < 200; ++i) {
    const Pattern sp = random_pattern(), tp = random_pattern();
    for (Side side : {Side::Left, Side::Right}) {
      auto w = transitivity_witness(F2, sp, tp, side);
      const std::string h = oracle::from_element(F2, w.h);
      std::set<Element> tf(tp.F.begin(), tp.F.end()), re(w.R.E.begin(), w.R.E.end());
      std::set<Element> se(sp.E.begin(), sp.E.end()), te(tp.E.begin(), tp.E.end());
      for (const auto& x : sp.F) {
        const std::string xs = oracle::from_element(F2, x);
        const Element hx = oracle::to_element(F2, side == Side::Left ? oracle::mul(h, xs) : oracle::mul(xs, h));
        CHECK_FALSE(tf.count(hx));
        CHECK(re.count(hx) == se.count(x));
      }
      for (const auto& x : tp.F) CHECK(re.count(x) == te.count(x));
    }
  }
}

TEST_CASE("density bookkeeping on Ball(1)") {
  ForcedSubset s(F2);
  const auto patterns = all_patterns(F2.ball(1, 10).elements);
  REQUIRE(patterns.size() == 32);
  std::set<Element> witnesses_left, witnesses_right;
  for (const auto& p : patterns) witnesses_left.insert(s.realize_left(p));
  for (const auto& p : patterns) witnesses_right.insert(s.realize_right(p));
  CHECK(witnesses_left.size() == 32);
  CHECK(witnesses_right.size() == 32);
  REQUIRE(s.realizations().size() == 64);
  for (const auto& r : s.realizations()) {
    CHECK(s.verify(r));
    CHECK(holds_by_query(s, r));
  }
}

TEST_CASE("realized windows avoid everything pinned before") {
  ForcedSubset s(F2);
  std::mt19937_64 rng(99);
  for (int round = 0; round < 30; ++round) {
    std::set<Element> before;
    for (const auto& [x, v] : s.pinned_sorted()) before.insert(x);
    const int len = static_cast<int>(rng() % 3);
    std::vector<Element> F = {F2.identity(), oracle::to_element(F2, oracle::random_free(rng, len + 1))};
    std::vector<Element> E;
    if (rng() % 2) E.push_back(F[0]);
    const Pattern p = pat(F, E);
    const Side side = rng() % 2 ? Side::Left : Side::Right;
    Element t = side == Side::Left ? s.realize_left(p) : s.realize_right(p);
    const Element t_inv = F2.inv(t);
    for (const auto& x : p.F) {
      Element k = side == Side::Left ? F2.mul(t_inv, x) : F2.mul(x, t_inv);
      CHECK_FALSE(before.count(k));
    }
    s.query(oracle::to_element(F2, oracle::random_free(rng, 4)));
  }
}

TEST_CASE("replaying an operation log reproduces the pinned map") {
  auto script = [](ForcedSubset& s) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 40; ++i) {
      switch (rng() % 4) {
        case 0:
          s.query(oracle::to_element(F2, oracle::random_free(rng, static_cast<int>(rng() % 5))));
          break;
        case 1:
          s.realize_left(pat({F2.identity(), f("x2")}, {f("x2")}));
          break;
        case 2:
          s.realize_right(pat({F2.identity()}, {F2.identity()}));
          break;
        default:
          s.snapshot(1);
      }
    }
  };
  ForcedSubset a(F2), b(F2);
  script(a);
  script(b);
  CHECK(a.pinned_sorted() == b.pinned_sorted());
  CHECK(a.cursor() == b.cursor());
  REQUIRE(a.realizations().size() == b.realizations().size());
  for (std::size_t i = 0; i < a.realizations().size(); ++i)
    CHECK(a.realizations()[i].witness == b.realizations()[i].witness);
}

TEST_CASE("frontier bounds every pinned key") {
  ForcedSubset s(F2);
  s.snapshot(2);
  s.realize_left(pat(F2.ball(1, 10).elements, {F2.identity()}));
  for (const auto& [x, v] : s.pinned_sorted()) CHECK(F2.length(x) <= s.frontier());
}

TEST_CASE("capacity and caps") {
  Caps caps;
  caps.fresh_length = 3;
  ForcedSubset s(F2, caps);
  s.snapshot(2);
  CHECK_THROWS_AS(s.realize_left(pat(F2.ball(1, 10).elements, {})), CapacityError);
  caps.fresh_scan = 0;
  CHECK_THROWS_AS(ForcedSubset(F2, caps), UsageError);
  Caps small;
  small.ball = 10;
  ForcedSubset t(F2, small);
  CHECK_THROWS_AS(t.snapshot(2), CapacityError);
}

TEST_CASE("lattice backend realizations") {
  const Ambient Z2 = Ambient::lattice(2);
  ForcedSubset s(Z2);
  const auto F = Z2.ball(1, 10).elements;
  for (unsigned mask = 0; mask < 32; ++mask) {
    std::vector<Element> E;
    for (std::size_t i = 0; i < F.size(); ++i)
      if (mask & (1u << i)) E.push_back(F[i]);
    Pattern p = make_pattern(Z2, F, E);
    s.realize_left(p);
    s.realize_right(p);
  }
  for (const auto& r : s.realizations()) CHECK(s.verify(r));
}
