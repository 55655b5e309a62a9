#include "condensed/condense.hpp"

#include <stdexcept>
#include <unordered_set>

#include "condensed/error.hpp"

namespace condensed {

MarkedSpec xi(const Wreath& w, ForcedSubset& s, const Element& translate) {
  return MarkedSpec(w, s, translate);
}

MarkedWord commutator_word(const Ambient& h, const Element& s) {
  const MarkedAlphabet alpha{h.rank()};
  const MarkedWord sw = spell(h, s);
  const MarkedWord si = inverse_word(sw);
  const MarkedWord a{{2 * alpha.a_gen()}}, a_inv{{2 * alpha.a_gen() + 1}};
  const MarkedWord b{{2 * alpha.b_gen()}}, b_inv{{2 * alpha.b_gen() + 1}};
  MarkedWord w;
  for (const MarkedWord* part : {&si, &b, &sw, &a, &si, &b_inv, &sw, &a_inv}) w = concat(w, *part);
  return w;
}

std::optional<DistinctnessWitness> witness_at(MarkedSpec& m1, MarkedSpec& m2, const Element& s) {
  const bool in1 = m1.subset().contains(s);
  const bool in2 = m2.subset().contains(s);
  if (in1 == in2) return std::nullopt;

  const Wreath& W = m1.wreath();
  const Ambient& H = W.ambient();
  DistinctnessWitness wit{s, in1 ? WitnessSide::First : WitnessSide::Second, commutator_word(H, s)};
  MarkedSpec& holder = in1 ? m1 : m2;
  MarkedSpec& other = in1 ? m2 : m1;
  if (holder.is_identity(wit.word) || !other.is_identity(wit.word))
    throw std::logic_error("witness word at " + H.format(s) + " does not split the verdicts");

  FrozenView frozen(holder.subset().base());
  TranslatedOracle view(frozen, H, holder.translate());
  if (!W.is_identity_window(wit.word, view, H.length(s) + 2).non_identity())
    throw std::logic_error("window oracle does not confirm the witness at " + H.format(s));
  return wit;
}

std::optional<DistinctnessWitness> distinguish(MarkedSpec& m1, MarkedSpec& m2, int search_radius) {
  if (search_radius < 0) throw UsageError("search radius must be non-negative");
  const Ambient& H = m1.wreath().ambient();
  for (const auto& s : H.ball(search_radius, m1.subset().base().caps().ball).elements)
    if (auto w = witness_at(m1, m2, s)) return w;
  return std::nullopt;
}

CondensationCertificate certify_condensed(const Wreath& w, ForcedSubset& s, int r) {
  if (r < 1) throw UsageError("certificates need radius r >= 1");
  const Ambient& H = w.ambient();
  const int window = 4 * r;

  CondensationCertificate c;
  c.r = r;
  c.agreement = s.snapshot(window);
  c.h = s.realize_left(c.agreement);

  // the distinctness point: p ∈ S and h·p ∉ S, both previously unpinned
  auto admissible = [&](const Element& p) {
    if (s.pinned(p)) return false;
    Element hp = H.mul(c.h, p);
    return H.length(hp) > window && !s.pinned(hp);
  };
  const Element p = s.fresh(admissible, s.frontier() + H.length(c.h) + 1);
  const Element point = H.mul(c.h, p);
  s.pin(p, true);
  s.pin(point, false);

  MarkedSpec base = xi(w, s, H.identity());
  MarkedSpec translate = xi(w, s, c.h);
  const std::size_t cap = s.caps().ball;
  MarkedBall b1 = build_ball(base, r, cap);
  MarkedBall b2 = build_ball(translate, r, cap);
  if (!r_similar(b1, b2))
    throw std::logic_error("balls of S and hS differ at radius " + std::to_string(r));
  c.ball_base = b1.dump();
  c.ball_translate = b2.dump();

  auto wit = witness_at(base, translate, point);
  if (!wit) throw std::logic_error("injected point does not separate S and hS");
  c.witness = std::move(*wit);
  return c;
}

std::optional<std::string> verify_certificate(const CondensationCertificate& c, const Wreath& w,
                                              ForcedSubset& s) {
  const Ambient& H = w.ambient();
  if (c.r < 1) return "radius " + std::to_string(c.r) + " is below 1";
  if (H.is_identity(c.h)) return "h is identity";

  const int window = 4 * c.r;
  if (c.agreement.F != H.ball(window, s.caps().ball).elements)
    return "agreement window is not Ball(" + std::to_string(window) + ")";
  std::unordered_set<Element, ElementHash> members(c.agreement.E.begin(), c.agreement.E.end());
  MarkedSpec base = xi(w, s, H.identity());
  MarkedSpec translate = xi(w, s, c.h);
  std::size_t matched = 0;
  for (const auto& x : c.agreement.F) {
    const bool expected = members.count(x) > 0;
    matched += expected;
    if (base.subset().contains(x) != expected || translate.subset().contains(x) != expected)
      return "agreement mismatch at " + H.format(x);
  }
  if (matched != c.agreement.E.size()) return "agreement members are not a subset of the window";

  const std::size_t cap = s.caps().ball;
  MarkedBall b1 = build_ball(base, c.r, cap);
  MarkedBall b2 = build_ball(translate, c.r, cap);
  for (const MarkedBall* b : {&b1, &b2})
    if (auto defect = check_ball(*b)) return "ball invariant fails: " + *defect;
  if (b1.dump() != c.ball_base) return "ball digest mismatch for S";
  if (b2.dump() != c.ball_translate) return "ball digest mismatch for hS";
  if (!r_similar(b1, b2)) return "balls are not r-similar";

  const DistinctnessWitness& wit = c.witness;
  if (wit.word != commutator_word(H, wit.s)) return "witness word does not match s";
  const bool in_base = base.subset().contains(wit.s);
  const bool in_translate = translate.subset().contains(wit.s);
  if (in_base == in_translate) return "witness point " + H.format(wit.s) + " does not separate S and hS";
  if ((wit.side == WitnessSide::First) != in_base) return "witness side is wrong";
  MarkedSpec& holder = in_base ? base : translate;
  MarkedSpec& other = in_base ? translate : base;
  if (holder.is_identity(wit.word)) return "witness word is trivial on the side containing s";
  if (!other.is_identity(wit.word)) return "witness word is nontrivial on the side missing s";
  FrozenView frozen(s);
  TranslatedOracle view(frozen, H, holder.translate());
  if (!w.is_identity_window(wit.word, view, H.length(wit.s) + 2).non_identity())
    return "window oracle does not confirm the witness";
  return std::nullopt;
}

}  // namespace condensed
