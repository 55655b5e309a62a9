#include "condensed/wreath.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "condensed/error.hpp"

namespace condensed {

MarkedWord parse_word(std::string_view text, int n) {
  MarkedWord w;
  MarkedAlphabet alpha{n};
  bool saw_e = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == ' ' || text[pos] == '\t') {
      ++pos;
      continue;
    }
    std::size_t end = text.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    const std::size_t column = pos + 1;
    pos = end;

    if (tok == "e") {
      saw_e = true;
      continue;
    }
    bool inverse = false;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      inverse = true;
      tok.remove_suffix(3);
    }
    int gen = -1;
    if (tok == "a") {
      gen = alpha.a_gen();
    } else if (tok == "b") {
      gen = alpha.b_gen();
    } else if (tok.size() >= 2 && tok[0] == 'x') {
      int index = 0;
      auto digits = tok.substr(1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec != std::errc() || ptr != digits.data() + digits.size())
        throw ParseError("unknown token '" + std::string(tok) + "'", column);
      if (index < 1 || index > n)
        throw ParseError("generator index out of range in '" + std::string(tok) + "' (x1..x" +
                             std::to_string(n) + ")",
                         column);
      gen = index - 1;
    } else {
      throw ParseError("unknown token '" + std::string(tok) + "'", column);
    }
    w.codes.push_back(2 * gen + (inverse ? 1 : 0));
  }
  if (saw_e && !w.empty()) throw ParseError("'e' must stand alone", 0);
  if (!saw_e && w.empty()) throw ParseError("empty word must be spelled 'e'", 0);
  return w;
}

std::string format_letter(int code, int n) {
  MarkedAlphabet alpha{n};
  const int gen = code / 2;
  std::string out;
  if (gen == alpha.a_gen())
    out = "a";
  else if (gen == alpha.b_gen())
    out = "b";
  else
    out = "x" + std::to_string(gen + 1);
  if (code & 1) out += "^-1";
  return out;
}

std::string format_word(const MarkedWord& w, int n) {
  if (w.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.codes.size(); ++i) {
    if (i) out += ' ';
    out += format_letter(w.codes[i], n);
  }
  return out;
}

MarkedWord inverse_word(const MarkedWord& w) {
  MarkedWord r;
  r.codes.reserve(w.size());
  for (auto it = w.codes.rbegin(); it != w.codes.rend(); ++it) r.codes.push_back(letter_inverse(*it));
  return r;
}

MarkedWord concat(const MarkedWord& u, const MarkedWord& v) {
  MarkedWord r = u;
  r.codes.insert(r.codes.end(), v.codes.begin(), v.codes.end());
  return r;
}

MarkedWord free_reduce(const MarkedWord& w) {
  MarkedWord r;
  for (int c : w.codes) {
    if (!r.codes.empty() && r.codes.back() == letter_inverse(c))
      r.codes.pop_back();
    else
      r.codes.push_back(c);
  }
  return r;
}

bool shortlex_less(const MarkedWord& u, const MarkedWord& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  return u.codes < v.codes;
}

MarkedWord spell(const Ambient& h, const Element& g) { return MarkedWord{h.normal_word(g)}; }

ClassPartition partition_b_factors(const CollectedForm& cf) {
  ClassPartition p;
  std::unordered_map<Element, std::size_t, ElementHash> index;
  for (std::size_t i = 0; i < cf.factors.size(); ++i) {
    const auto& f = cf.factors[i];
    if (f.gen != FactorGen::B) continue;
    auto [it, inserted] = index.emplace(f.conj, p.classes.size());
    if (inserted) p.classes.push_back(FactorClass{f.conj, {}, 0});
    auto& cls = p.classes[it->second];
    cls.members.push_back(i);
    cls.sigma += f.exp;
  }
  return p;
}

Wreath::Wreath(Ambient h, FiniteGroupTable b) : h_(h), b_(std::move(b)) {
  if (auto defect = validate_table(b_)) throw UsageError("finite group table: " + defect->message);
}

CollectedForm Wreath::collect(const MarkedWord& w) const {
  const MarkedAlphabet alpha = alphabet();
  CollectedForm cf{{}, h_.identity()};
  Element prefix = h_.identity();
  for (int code : w.codes) {
    if (code < 0 || code >= alpha.letter_count())
      throw UsageError("letter code " + std::to_string(code) + " outside the marked alphabet");
    if (alpha.is_ambient(code)) {
      h_.mul_letter(prefix, code);
      continue;
    }
    const FactorGen gen = code / 2 == alpha.a_gen() ? FactorGen::A : FactorGen::B;
    const int exp = (code & 1) ? -1 : 1;
    // merge with the previous factor when conjugator and generator agree
    if (!cf.factors.empty() && cf.factors.back().gen == gen && cf.factors.back().conj == prefix) {
      cf.factors.back().exp += exp;
      if (cf.factors.back().exp == 0) cf.factors.pop_back();
      continue;
    }
    cf.factors.push_back(Factor{prefix, gen, exp});
  }
  cf.tail = std::move(prefix);
  return cf;
}

int Wreath::evaluate_at(const CollectedForm& cf, MembershipOracle& s, const Element& h) const {
  int value = b_.id;
  for (const auto& f : cf.factors) {
    Element point = h_.mul(h_.inv(f.conj), h);
    bool active = f.gen == FactorGen::A ? h_.is_identity(point) : s.contains(point);
    if (active) value = b_(value, fin_power(b_, f.gen == FactorGen::A ? b_.gen_a : b_.gen_b, f.exp));
  }
  return value;
}

Verdict Wreath::is_identity_generic(const MarkedWord& w, ForcedTranslate& s) const {
  const CollectedForm cf = collect(w);
  if (!h_.is_identity(cf.tail)) return Verdict{VerdictKind::NonIdentity, std::nullopt, cf.tail};

  // ā-factors can only be nontrivial at their own conjugator points
  std::vector<Element> a_points;
  for (const auto& f : cf.factors)
    if (f.gen == FactorGen::A && std::find(a_points.begin(), a_points.end(), f.conj) == a_points.end())
      a_points.push_back(f.conj);
  for (const auto& u : a_points)
    if (evaluate_at(cf, s, u) != b_.id)
      return Verdict{VerdictKind::NonIdentity, u, cf.tail};

  const ClassPartition part = partition_b_factors(cf);
  for (std::size_t m = 0; m < part.classes.size(); ++m) {
    if (fin_power(b_, b_.gen_b, part.classes[m].sigma) == b_.id) continue;
    std::vector<Element> conjugators;
    conjugators.reserve(part.classes.size());
    for (const auto& c : part.classes) conjugators.push_back(c.conj);
    Element y = s.isolate(conjugators, m, a_points);
    if (evaluate_at(cf, s, y) == b_.id)
      throw std::logic_error("isolating point " + h_.format(y) + " does not witness the class sum");
    return Verdict{VerdictKind::NonIdentity, y, cf.tail};
  }
  return Verdict{VerdictKind::Identity, std::nullopt, cf.tail};
}

Verdict Wreath::is_identity_window(const MarkedWord& w, MembershipOracle& s, int radius,
                                   std::size_t cap) const {
  if (radius < 0) throw UsageError("window radius must be non-negative");
  const CollectedForm cf = collect(w);
  if (!h_.is_identity(cf.tail)) return Verdict{VerdictKind::NonIdentity, std::nullopt, cf.tail};

  std::vector<Element> points;
  if (auto support = s.finite_support()) {
    // off these points every factor is trivial
    std::unordered_set<Element, ElementHash> seen;
    auto consider = [&](Element p) {
      if (h_.length(p) <= radius && seen.insert(p).second) points.push_back(std::move(p));
    };
    std::vector<Element> b_conjugators;
    for (const auto& f : cf.factors) {
      if (f.gen == FactorGen::A)
        consider(f.conj);
      else if (std::find(b_conjugators.begin(), b_conjugators.end(), f.conj) == b_conjugators.end())
        b_conjugators.push_back(f.conj);
    }
    for (const auto& v : b_conjugators)
      for (const auto& member : *support) consider(h_.mul(v, member));
    h_.sort_shortlex(points);
  } else {
    points = h_.ball(radius, cap).elements;
  }

  for (const auto& h : points)
    if (evaluate_at(cf, s, h) != b_.id) return Verdict{VerdictKind::NonIdentity, h, cf.tail};
  return Verdict{VerdictKind::IdentityUpToWindow, std::nullopt, cf.tail};
}

bool Wreath::elements_equal(const MarkedWord& u, const MarkedWord& v, ForcedTranslate& s) const {
  return !is_identity_generic(free_reduce(concat(u, inverse_word(v))), s).non_identity();
}

WindowElement Wreath::window_identity(int radius) const { return window_of_ambient(h_.identity(), radius); }

WindowElement Wreath::window_of_ambient(const Element& g, int radius) const {
  WindowElement e{radius, {}, g};
  for (auto& x : h_.ball(radius, std::numeric_limits<std::size_t>::max()).elements)
    e.values.emplace(std::move(x), b_.id);
  return e;
}

void Wreath::window_times_letter(WindowElement& acc, int code, MembershipOracle& s) const {
  const MarkedAlphabet alpha = alphabet();
  if (alpha.is_ambient(code)) {
    h_.mul_letter(acc.tail, code);
    return;
  }
  const bool is_a = code / 2 == alpha.a_gen();
  const int power = fin_power(b_, is_a ? b_.gen_a : b_.gen_b, (code & 1) ? -1 : 1);
  const Element t_inv = h_.inv(acc.tail);
  // (t φ t⁻¹)(x) = φ(t⁻¹x)
  for (auto& [x, value] : acc.values) {
    Element y = h_.mul(t_inv, x);
    bool active = is_a ? h_.is_identity(y) : s.contains(y);
    if (active) value = b_(value, power);
  }
}

WindowElement Wreath::window_of_word(const MarkedWord& w, MembershipOracle& s, int radius) const {
  WindowElement acc = window_identity(radius);
  for (int code : w.codes) window_times_letter(acc, code, s);
  return acc;
}

WindowElement Wreath::window_mul(const WindowElement& x, const WindowElement& y) const {
  WindowElement r{std::min(x.radius, y.radius), {}, h_.mul(x.tail, y.tail)};
  const Element t_inv = h_.inv(x.tail);
  for (const auto& [point, fx] : x.values) {
    if (h_.length(point) > r.radius) continue;
    auto it = y.values.find(h_.mul(t_inv, point));
    if (it == y.values.end()) continue;
    r.values.emplace(point, b_(fx, it->second));
  }
  return r;
}

}  // namespace condensed
