#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "condensed/condense.hpp"
#include "condensed/error.hpp"
#include "support/oracles.hpp"

using namespace condensed;

namespace {

const Ambient F2 = Ambient::free_group(2);
const FiniteGroupTable S3 = FiniteGroupTable::preset("s3");

void pin_random(ForcedSubset& s, int radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto& x : F2.ball(radius, 1'000'000).elements) s.pin(x, rng() % 3 == 0);
}

// Membership of hS read through the strings oracle: y ∈ hS iff h⁻¹y ∈ S.
std::function<bool(const std::string&)> translate_oracle(ForcedSubset& s, const std::string& h) {
  return [&s, h](const std::string& y) { return s.query(oracle::to_element(F2, oracle::mul(oracle::inverse(h), y))); };
}

// Value of the witness word at the identity, computed letter by letter.
int witness_value(const DistinctnessWitness& w, ForcedSubset& s, const std::string& h) {
  auto r = oracle::brute_evaluate(S3, w.word, translate_oracle(s, h), "");
  CHECK(r.tail.empty());
  return r.value;
}

}  // namespace

TEST_CASE("xi at the identity matches a plain marked spec") {
  Wreath W(F2, S3);
  ForcedSubset s(F2);
  pin_random(s, 2, 3);
  MarkedSpec x = xi(W, s, F2.identity());
  MarkedSpec m(W, s, F2.identity());
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    MarkedWord w = oracle::random_word(rng, 1 + i % 7);
    CHECK(x.is_identity(w) == m.is_identity(w));
  }
  CHECK(x.arity() == 4);
}

TEST_CASE("commutator word shape") {
  const Element s = F2.parse_element("x1 x2");
  MarkedWord w = commutator_word(F2, s);
  CHECK(w == parse_word("x2^-1 x1^-1 b x1 x2 a x2^-1 x1^-1 b^-1 x1 x2 a^-1", 2));
  CHECK(commutator_word(F2, F2.identity()) == parse_word("b a b^-1 a^-1", 2));
}

TEST_CASE("commutator word is trivial exactly when s is outside") {
  // Checked with the brute evaluator at every point of Ball(3).
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ForcedSubset s(F2);
    pin_random(s, 3, 40 + trial);
    const std::string p = oracle::random_free(rng, trial % 3);
    MarkedWord w = commutator_word(F2, oracle::to_element(F2, p));
    const bool in = s.query(oracle::to_element(F2, p));
    bool trivial = true;
    for (const auto& [x, d] : oracle::bfs_ball(3)) {
      auto r = oracle::brute_evaluate(S3, w, translate_oracle(s, ""), x);
      CHECK(r.tail.empty());
      trivial &= r.value == S3.id;
    }
    CHECK(trivial == !in);
  }
}

TEST_CASE("distinguish") {
  Wreath W(F2, S3);
  SUBCASE("a spec against itself is inconclusive") {
    ForcedSubset s(F2);
    pin_random(s, 2, 9);
    MarkedSpec m1(W, s, F2.identity()), m2(W, s, F2.identity());
    CHECK_FALSE(distinguish(m1, m2, 2));
  }
  SUBCASE("one differing point") {
    ForcedSubset s(F2), t(F2);
    const Element p = F2.parse_element("x2^-1 x1");
    s.pin(p, true);
    t.pin(p, false);
    MarkedSpec m1(W, s, F2.identity()), m2(W, t, F2.identity());
    auto w = distinguish(m1, m2, 2);
    REQUIRE(w);
    CHECK(w->s == p);
    CHECK(w->side == WitnessSide::First);
    CHECK_FALSE(m1.is_identity(w->word));
    CHECK(m2.is_identity(w->word));
    CHECK(witness_value(*w, s, "") != S3.id);
    CHECK(witness_value(*w, t, "") == S3.id);
    // swapped roles
    MarkedSpec n1(W, t, F2.identity()), n2(W, s, F2.identity());
    auto v = distinguish(n1, n2, 2);
    REQUIRE(v);
    CHECK(v->side == WitnessSide::Second);
  }
  SUBCASE("witness_at a point in both or neither") {
    ForcedSubset s(F2), t(F2);
    s.pin(F2.identity(), true);
    t.pin(F2.identity(), true);
    MarkedSpec m1(W, s, F2.identity()), m2(W, t, F2.identity());
    CHECK_FALSE(witness_at(m1, m2, F2.identity()));
    CHECK_FALSE(witness_at(m1, m2, F2.parse_element("x1")));
  }
}

TEST_CASE("distinct subsets are told apart") {
  Wreath W(F2, S3);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    ForcedSubset s(F2), t(F2);
    const auto ball = F2.ball(2, 1000).elements;
    const std::size_t flip = rng() % ball.size();
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const bool bit = rng() & 1;
      s.pin(ball[i], bit);
      t.pin(ball[i], i == flip ? !bit : bit);
    }
    MarkedSpec m1(W, s, F2.identity()), m2(W, t, F2.identity());
    auto w = distinguish(m1, m2, 2);
    REQUIRE(w);
    CHECK(w->s == ball[flip]);
    ForcedSubset& in = w->side == WitnessSide::First ? s : t;
    ForcedSubset& out = w->side == WitnessSide::First ? t : s;
    CHECK(witness_value(*w, in, "") != S3.id);
    CHECK(witness_value(*w, out, "") == S3.id);
  }
}

TEST_CASE("certificates at r = 1 then r = 2 on one subset") {
  Wreath W(F2, S3);
  ForcedSubset s(F2);
  CondensationCertificate c1 = certify_condensed(W, s, 1);
  CondensationCertificate c2 = certify_condensed(W, s, 2);
  CHECK_FALSE(c1.h == c2.h);
  for (const auto* c : {&c1, &c2}) {
    CAPTURE(c->r);
    CHECK_FALSE(verify_certificate(*c, W, s));
    CHECK_FALSE(c->h == F2.identity());
    CHECK(c->tool_version == std::string(kToolVersion));
    // independent check of the agreement window
    const auto ball = oracle::bfs_ball(4 * c->r);
    CHECK(c->agreement.F.size() == ball.size());
    const std::string h = oracle::from_element(F2, c->h);
    auto in_hs = translate_oracle(s, h);
    for (const auto& [x, d] : ball) {
      const Element e = oracle::to_element(F2, x);
      CHECK(s.query(e) == in_hs(x));
    }
    // the witness point s = h·p lies in hS and not in S
    const std::string p = oracle::from_element(F2, c->witness.s);
    CHECK(c->witness.side == WitnessSide::Second);
    CHECK_FALSE(s.query(c->witness.s));
    CHECK(in_hs(p));
    CHECK(s.query(F2.mul(F2.inv(c->h), c->witness.s)));
    CHECK(witness_value(c->witness, s, "") == S3.id);
    CHECK(witness_value(c->witness, s, h) != S3.id);
    CHECK(c->ball_base == c->ball_translate);
  }
  CHECK_FALSE(verify_certificate(c1, W, s));
}

TEST_CASE("certify rejects r below 1") {
  Wreath W(F2, S3);
  ForcedSubset s(F2);
  CHECK_THROWS_AS(certify_condensed(W, s, 0), UsageError);
  CHECK_THROWS_AS(certify_condensed(W, s, -3), UsageError);
}

TEST_CASE("tampered certificates fail verification") {
  Wreath W(F2, S3);
  ForcedSubset s(F2);
  pin_random(s, 2, 8);
  const CondensationCertificate c = certify_condensed(W, s, 1);
  REQUIRE_FALSE(verify_certificate(c, W, s));

  CondensationCertificate bad = c;
  bad.h = F2.identity();
  auto why = verify_certificate(bad, W, s);
  REQUIRE(why);
  CHECK(why->find("h is identity") != std::string::npos);

  bad = c;
  const Element x = bad.agreement.F[3];
  auto it = std::find(bad.agreement.E.begin(), bad.agreement.E.end(), x);
  if (it != bad.agreement.E.end())
    bad.agreement.E.erase(it);
  else {
    bad.agreement.E.push_back(x);
    F2.sort_shortlex(bad.agreement.E);
  }
  why = verify_certificate(bad, W, s);
  REQUIRE(why);
  CHECK(why->find("agreement mismatch at " + F2.format(x)) != std::string::npos);

  bad = c;
  bad.agreement.F.pop_back();
  CHECK(verify_certificate(bad, W, s));

  bad = c;
  bad.ball_translate += "0 e\n";
  CHECK(verify_certificate(bad, W, s));

  bad = c;
  bad.witness.side = WitnessSide::First;
  CHECK(verify_certificate(bad, W, s));

  bad = c;
  bad.witness.s = F2.mul(bad.witness.s, F2.parse_element("x1"));
  CHECK(verify_certificate(bad, W, s));
}

TEST_CASE("translate membership is coherent on Ball(4r)") {
  ForcedSubset s(F2);
  pin_random(s, 3, 31);
  Pattern window = s.snapshot(4);
  const Element h = s.realize_left(window);
  ForcedTranslate hs(s, h);
  const Element h_inv = F2.inv(h);
  for (const auto& x : F2.ball(4, 10'000).elements) {
    CHECK(hs.contains(x) == s.query(F2.mul(h_inv, x)));
    CHECK(hs.contains(x) == s.query(x));
  }
}

TEST_CASE("certificates on other backends") {
  for (const char* name : {"zd:1", "zd:2", "free:3"}) {
    CAPTURE(name);
    Ambient H = Ambient::parse(name);
    Wreath W(H, FiniteGroupTable::preset("d4"));
    ForcedSubset s(H);
    CondensationCertificate c = certify_condensed(W, s, 1);
    CHECK_FALSE(verify_certificate(c, W, s));
  }
}
