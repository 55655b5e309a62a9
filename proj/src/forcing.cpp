#include "condensed/forcing.hpp"

#include <algorithm>
#include <unordered_set>

#include "condensed/error.hpp"

namespace condensed {

namespace {

using ElementSet = std::unordered_set<Element, ElementHash>;

ElementSet to_set(const std::vector<Element>& v) { return ElementSet(v.begin(), v.end()); }

}  // namespace

Pattern make_pattern(const Ambient& h, std::vector<Element> F, std::vector<Element> E) {
  auto normalize = [&h](std::vector<Element>& v) {
    for (const auto& x : v) h.check(x);
    h.sort_shortlex(v);
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  normalize(F);
  normalize(E);
  auto fs = to_set(F);
  for (const auto& x : E)
    if (!fs.count(x)) throw UsageError("pattern: E contains " + h.format(x) + " outside F");
  return Pattern{std::move(F), std::move(E)};
}

int pattern_radius(const Ambient& h, const Pattern& p) {
  int r = 0;
  for (const auto& f : p.F) r = std::max(r, h.length(f));
  return r;
}

ForcedSubset::ForcedSubset(Ambient h, Caps caps)
    : ambient_(h), caps_(caps), cursor_(h.identity()) {
  if (caps_.ball == 0 || caps_.fresh_length <= 0 || caps_.fresh_scan == 0)
    throw UsageError("caps must be positive");
}

std::optional<bool> ForcedSubset::pinned(const Element& x) const {
  auto it = pinned_.find(x);
  if (it == pinned_.end()) return std::nullopt;
  return it->second;
}

bool ForcedSubset::query(const Element& x) {
  if (auto v = pinned(x)) return *v;
  pin(x, false);
  return false;
}

void ForcedSubset::pin(const Element& x, bool value) {
  if (x.backend != ambient_.backend()) ambient_.check(x);
  auto [it, inserted] = pinned_.emplace(x, value);
  if (!inserted) {
    if (it->second != value)
      throw ConflictError("conflicting pin at " + ambient_.format(x) + ": already " +
                          (it->second ? "in S" : "outside S"));
    return;
  }
  frontier_ = std::max(frontier_, ambient_.length(x));
  if (value) members_.push_back(x);
}

void ForcedSubset::pin_window(const Pattern& p) {
  auto es = to_set(p.E);
  for (const auto& f : p.F) {
    auto v = pinned(f);
    if (v && *v != static_cast<bool>(es.count(f)))
      throw ConflictError("conflicting pin at " + ambient_.format(f));
  }
  for (const auto& f : p.F) pin(f, es.count(f) > 0);
}

Element ForcedSubset::fresh(const std::function<bool(const Element&)>& admissible,
                            int guaranteed_length, std::size_t probe_cost) {
  if (guaranteed_length > caps_.fresh_length)
    throw CapacityError("fresh region starts at length " + std::to_string(guaranteed_length) +
                        ", beyond fresh_length cap " + std::to_string(caps_.fresh_length));
  const std::size_t budget = std::max<std::size_t>(1, caps_.fresh_scan / std::max<std::size_t>(1, probe_cost));
  ShortlexWalker walker(ambient_, cursor_);
  std::size_t scanned = 0;
  for (;;) {
    const Element& c = walker.next();
    int len = ambient_.length(c);
    if (len > caps_.fresh_length)
      throw CapacityError("no admissible fresh element within length " +
                          std::to_string(caps_.fresh_length));
    if (len < guaranteed_length && scanned >= budget) {
      walker.skip_to_length(guaranteed_length);
      continue;
    }
    ++scanned;
    if (admissible(c)) {
      cursor_ = c;
      return c;
    }
  }
}

Element ForcedSubset::realize(Side side, const Pattern& p, const std::vector<Element>& avoid) {
  const int radius = pattern_radius(ambient_, p);
  const auto fs = to_set(p.F);
  const auto es = to_set(p.E);
  const auto avoid_set = to_set(avoid);

  // window point for f: h⁻¹f (Left) or f g⁻¹ (Right)
  auto window_point = [&](const Element& t_inv, const Element& f) {
    return side == Side::Left ? ambient_.mul(t_inv, f) : ambient_.mul(f, t_inv);
  };
  auto admissible = [&](const Element& t) {
    if (ambient_.is_identity(t) || avoid_set.count(t)) return false;
    Element t_inv = ambient_.inv(t);
    for (const auto& f : p.F) {
      Element k = window_point(t_inv, f);
      if (pinned_.count(k) || fs.count(k)) return false;
    }
    return true;
  };
  Element t = fresh(admissible, std::max(frontier_, radius) + radius + 1, (p.F.size() + 63) / 64);
  Element t_inv = ambient_.inv(t);
  for (const auto& f : p.F) pin(window_point(t_inv, f), es.count(f) > 0);
  record(Realization{side, p, t});
  return t;
}

void ForcedSubset::record(Realization r) {
  RequirementKey key{static_cast<int>(r.side), r.pattern.F, r.pattern.E};
  fulfilled_[key].push_back(log_.size());
  log_.push_back(std::move(r));
}

Element ForcedSubset::realize_left(const Pattern& p, const std::vector<Element>& avoid) {
  return realize(Side::Left, p, avoid);
}

Element ForcedSubset::realize_right(const Pattern& p, const std::vector<Element>& avoid) {
  return realize(Side::Right, p, avoid);
}

Element ForcedSubset::fulfill(Side side, const Pattern& p, const std::vector<Element>& avoid) {
  auto it = fulfilled_.find(RequirementKey{static_cast<int>(side), p.F, p.E});
  if (it != fulfilled_.end()) {
    for (auto index : it->second) {
      const Element& w = log_[index].witness;
      if (std::find(avoid.begin(), avoid.end(), w) == avoid.end()) return w;
    }
  }
  return realize(side, p, avoid);
}

Pattern ForcedSubset::snapshot(int n) {
  Pattern p;
  p.F = ambient_.ball(n, caps_.ball).elements;
  for (const auto& x : p.F)
    if (query(x)) p.E.push_back(x);
  return p;
}

bool ForcedSubset::verify(const Realization& r) const {
  if (ambient_.is_identity(r.witness)) return false;
  auto es = to_set(r.pattern.E);
  Element t_inv = ambient_.inv(r.witness);
  for (const auto& f : r.pattern.F) {
    Element k = r.side == Side::Left ? ambient_.mul(t_inv, f) : ambient_.mul(f, t_inv);
    auto v = pinned(k);
    if (!v || *v != static_cast<bool>(es.count(f))) return false;
  }
  return true;
}

std::vector<std::pair<Element, bool>> ForcedSubset::pinned_sorted() const {
  std::vector<std::pair<Element, bool>> out(pinned_.begin(), pinned_.end());
  std::sort(out.begin(), out.end(), [this](const auto& a, const auto& b) {
    return ambient_.shortlex_less(a.first, b.first);
  });
  return out;
}

void ForcedSubset::restore_cursor(Element c) {
  ambient_.check(c);
  cursor_ = std::move(c);
}

void ForcedSubset::restore_realization(Realization r) {
  if (!verify(r))
    throw UsageError("logged realization with witness " + ambient_.format(r.witness) +
                     " does not re-verify");
  record(std::move(r));
}

TranslatedOracle::TranslatedOracle(MembershipOracle& base, const Ambient& ambient, Element h)
    : base_(base), ambient_(ambient), h_(std::move(h)), h_inv_(ambient.inv(h_)) {}

bool TranslatedOracle::contains(const Element& x) {
  return base_.contains(ambient_.mul(h_inv_, x));
}

std::optional<std::vector<Element>> TranslatedOracle::finite_support() const {
  auto base = base_.finite_support();
  if (!base) return std::nullopt;
  for (auto& s : *base) s = ambient_.mul(h_, s);
  return base;
}

ForcedTranslate::ForcedTranslate(ForcedSubset& base)
    : ForcedTranslate(base, base.ambient().identity()) {}

ForcedTranslate::ForcedTranslate(ForcedSubset& base, Element h)
    : base_(base), h_(std::move(h)), h_inv_(base.ambient().inv(h_)) {
  base.ambient().check(h_);
}

bool ForcedTranslate::contains(const Element& x) {
  return base_.query(base_.ambient().mul(h_inv_, x));
}

Element ForcedTranslate::isolate(const std::vector<Element>& conjugators, std::size_t target,
                                 const std::vector<Element>& avoid) {
  const Ambient& H = base_.ambient();
  // Normalized right requirement on S: F = {h⁻¹ v_c⁻¹ v_t h}, E = {e}. A
  // witness g gives y = v_t h g⁻¹.
  const Element anchor = H.mul(conjugators.at(target), h_);
  std::vector<Element> F;
  F.reserve(conjugators.size());
  for (const auto& v : conjugators) F.push_back(H.mul(H.mul(h_inv_, H.inv(v)), anchor));
  Pattern p = make_pattern(H, std::move(F), {H.identity()});

  std::vector<Element> forbidden;
  forbidden.reserve(avoid.size());
  for (const auto& u : avoid) forbidden.push_back(H.mul(H.inv(u), anchor));

  Element g = base_.fulfill(Side::Right, p, forbidden);
  return H.mul(anchor, H.inv(g));
}

TransitivityWitness transitivity_witness(const Ambient& H, const Pattern& sp, const Pattern& tp,
                                         Side side, std::size_t scan_budget) {
  const auto tf = to_set(tp.F);
  auto translate = [&](const Element& x, const Element& h) {
    return side == Side::Left ? H.mul(h, x) : H.mul(x, h);
  };
  auto disjoint = [&](const Element& h) {
    for (const auto& x : sp.F)
      if (tf.count(translate(x, h))) return false;
    return true;
  };

  Element h = H.identity();
  if (!disjoint(h)) {
    const int guaranteed = pattern_radius(H, sp) + pattern_radius(H, tp) + 1;
    ShortlexWalker walker(H, H.identity());
    std::size_t scanned = 0;
    for (;;) {
      const Element& c = walker.next();
      if (H.length(c) < guaranteed && scanned >= scan_budget) {
        walker.skip_to_length(guaranteed);
        continue;
      }
      ++scanned;
      if (disjoint(c)) {
        h = c;
        break;
      }
    }
  }

  std::vector<Element> F(tp.F.begin(), tp.F.end()), E(tp.E.begin(), tp.E.end());
  for (const auto& x : sp.F) F.push_back(translate(x, h));
  for (const auto& x : sp.E) E.push_back(translate(x, h));
  return TransitivityWitness{side, h, make_pattern(H, std::move(F), std::move(E))};
}

bool verify_transitivity(const Ambient& H, const Pattern& sp, const Pattern& tp,
                         const TransitivityWitness& w) {
  const auto rf = to_set(w.R.F);
  const auto re = to_set(w.R.E);
  const auto se = to_set(sp.E);
  const auto tf = to_set(tp.F);
  const auto te = to_set(tp.E);
  for (const auto& x : sp.F) {
    Element y = w.side == Side::Left ? H.mul(w.h, x) : H.mul(x, w.h);
    if (tf.count(y)) return false;  // translate of sp.F must miss tp.F
    // h⁻¹R ∩ sp.F = sp.E (resp. R h⁻¹ ∩ sp.F = sp.E)
    if (!rf.count(y) || static_cast<bool>(re.count(y)) != static_cast<bool>(se.count(x)))
      return false;
  }
  for (const auto& x : tp.F)
    if (!rf.count(x) || static_cast<bool>(re.count(x)) != static_cast<bool>(te.count(x)))
      return false;
  return true;
}

}  // namespace condensed
