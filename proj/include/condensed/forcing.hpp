#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "condensed/ambient.hpp"

namespace condensed {

/// Membership in a subset of H. Reading may have side effects (pin-on-read).
class MembershipOracle {
 public:
  virtual ~MembershipOracle() = default;
  virtual bool contains(const Element& x) = 0;
  /// The complete member list, when the oracle is known to have finite
  /// support; nullopt otherwise.
  virtual std::optional<std::vector<Element>> finite_support() const { return std::nullopt; }
};

enum class Side { Left, Right };

/// A finite requirement E ⊆ F on a subset; both lists shortlex sorted.
struct Pattern {
  std::vector<Element> F;
  std::vector<Element> E;

  bool operator==(const Pattern&) const = default;
};

/// Sorts and deduplicates; throws UsageError unless E ⊆ F.
Pattern make_pattern(const Ambient& h, std::vector<Element> F, std::vector<Element> E);
int pattern_radius(const Ambient& h, const Pattern& p);

/// One fulfilled density requirement: (hS) ∩ F = E for Left, (Sg) ∩ F = E for Right.
struct Realization {
  Side side;
  Pattern pattern;
  Element witness;
};

struct Caps {
  std::size_t ball = 4'000'000;  // max elements in any ball enumeration
  int fresh_length = 1024;       // max word length of a fresh translate
  std::size_t fresh_scan = 4096;  // shortlex candidates tried before jumping to a guaranteed-fresh length

  bool operator==(const Caps&) const = default;
};

/**
 * A lazily built subset S of H. Membership bits are pinned append-only;
 * unpinned points read as "not a member" and get pinned on first query.
 * Left and right orbit-density requirements are fulfilled on demand in
 * fresh regions and logged.
 *
 * Fresh translates are searched in shortlex order after a monotone cursor.
 * At most `caps.fresh_scan` candidates shorter than the guaranteed-fresh
 * length (frontier + pattern radius + 1) are tried, divided by the number of
 * 64-point blocks in the window; then the walk jumps to that length, where
 * every candidate's window avoids all pinned keys.
 */
class ForcedSubset : public MembershipOracle {
 public:
  explicit ForcedSubset(Ambient h, Caps caps = {});

  const Ambient& ambient() const { return ambient_; }
  const Caps& caps() const { return caps_; }

  /// Pinned value, or pins x to false and returns false.
  bool query(const Element& x);
  std::optional<bool> pinned(const Element& x) const;
  bool contains(const Element& x) override { return query(x); }

  void pin(const Element& x, bool value);
  /// Pins every f in p.F to (f ∈ p.E); all-or-nothing on conflict.
  void pin_window(const Pattern& p);

  /// Fresh h != e with (hS) ∩ F = E; pins S on h⁻¹F.
  Element realize_left(const Pattern& p, const std::vector<Element>& avoid = {});
  /// Fresh g != e with (Sg) ∩ F = E; pins S on F g⁻¹.
  Element realize_right(const Pattern& p, const std::vector<Element>& avoid = {});
  /// Like realize_*, but reuses a logged witness of the same requirement
  /// when it is not in `avoid`.
  Element fulfill(Side side, const Pattern& p, const std::vector<Element>& avoid = {});

  /// Queries all of Ball(n); returns (S ∩ Ball(n), Ball(n)).
  Pattern snapshot(int n);

  /// Next element after the cursor accepted by `admissible`; candidates of
  /// length >= guaranteed_length are expected to be admissible. Each
  /// candidate below that length costs `probe_cost` units of the scan budget.
  Element fresh(const std::function<bool(const Element&)>& admissible, int guaranteed_length,
                std::size_t probe_cost = 1);

  /// Re-checks a realization against pinned values only.
  bool verify(const Realization& r) const;

  int frontier() const { return frontier_; }
  const Element& cursor() const { return cursor_; }
  const std::vector<Realization>& realizations() const { return log_; }
  const std::vector<Element>& members() const { return members_; }
  std::size_t pinned_count() const { return pinned_.size(); }
  std::vector<std::pair<Element, bool>> pinned_sorted() const;

  /// State restoration: cursor position and replay of a logged realization.
  void restore_cursor(Element c);
  void restore_realization(Realization r);

 private:
  using RequirementKey = std::tuple<int, std::vector<Element>, std::vector<Element>>;

  Element realize(Side side, const Pattern& p, const std::vector<Element>& avoid);
  void record(Realization r);

  Ambient ambient_;
  Caps caps_;
  std::unordered_map<Element, bool, ElementHash> pinned_;
  std::vector<Element> members_;
  std::vector<Realization> log_;
  std::map<RequirementKey, std::vector<std::size_t>> fulfilled_;
  int frontier_ = 0;
  Element cursor_;
};

/// Reads a ForcedSubset without pinning: unpinned points are outside. The
/// answers equal what query() would return at the time of reading.
class FrozenView : public MembershipOracle {
 public:
  explicit FrozenView(const ForcedSubset& s) : s_(s) {}
  bool contains(const Element& x) override { return s_.pinned(x).value_or(false); }
  std::optional<std::vector<Element>> finite_support() const override { return s_.members(); }

 private:
  const ForcedSubset& s_;
};

/// x ∈ hS ⟺ h⁻¹x ∈ S, over any oracle.
class TranslatedOracle : public MembershipOracle {
 public:
  TranslatedOracle(MembershipOracle& base, const Ambient& ambient, Element h);
  bool contains(const Element& x) override;
  std::optional<std::vector<Element>> finite_support() const override;

 private:
  MembershipOracle& base_;
  const Ambient& ambient_;
  Element h_, h_inv_;
};

/**
 * The translate hS of a forced subset, with pin-on-read membership and the
 * right-orbit requirement used by the word-problem oracle. h = e gives S.
 */
class ForcedTranslate : public MembershipOracle {
 public:
  explicit ForcedTranslate(ForcedSubset& base);
  ForcedTranslate(ForcedSubset& base, Element h);

  bool contains(const Element& x) override;
  ForcedSubset& base() { return base_; }
  const ForcedSubset& base() const { return base_; }
  const Element& translate() const { return h_; }
  const Ambient& ambient() const { return base_.ambient(); }

  /**
   * A point y outside `avoid` such that v⁻¹y ∈ hS exactly for
   * v = conjugators[target], among the given (pairwise distinct) conjugators.
   */
  Element isolate(const std::vector<Element>& conjugators, std::size_t target,
                  const std::vector<Element>& avoid);

 private:
  ForcedSubset& base_;
  Element h_, h_inv_;
};

/// Finite-resolution witness for topological transitivity of the left/right action.
struct TransitivityWitness {
  Side side;
  Element h;
  Pattern R;  // R on h·sp.F ∪ tp.F (Left) or sp.F·h ∪ tp.F (Right)
};

/**
 * Shortlex-least h with h·sp.F ∩ tp.F = ∅ (Left) or sp.F·h ∩ tp.F = ∅
 * (Right), and R = h·sp.E ∪ tp.E (resp. sp.E·h ∪ tp.E).
 */
TransitivityWitness transitivity_witness(const Ambient& h, const Pattern& sp, const Pattern& tp,
                                         Side side, std::size_t scan_budget = 4096);
bool verify_transitivity(const Ambient& h, const Pattern& sp, const Pattern& tp,
                         const TransitivityWitness& w);

}  // namespace condensed
