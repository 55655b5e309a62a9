#pragma once

#include <optional>
#include <string>

#include "condensed/marked.hpp"

namespace condensed {

inline constexpr const char* kToolVersion = "condensed 0.1.0";

/// ξ(hS) = (G_{hS}, Y_{hS}); h = e gives ξ(S).
MarkedSpec xi(const Wreath& w, ForcedSubset& s, const Element& translate);

enum class WitnessSide { First, Second };

/**
 * A point s in exactly one of two subsets, with the word
 * s⁻¹ b s a s⁻¹ b⁻¹ s a⁻¹, which is trivial in the marked group of the
 * subset missing s and nontrivial in the other.
 */
struct DistinctnessWitness {
  Element s;
  WitnessSide side;  // which subset contains s
  MarkedWord word;

  bool operator==(const DistinctnessWitness&) const = default;
};

MarkedWord commutator_word(const Ambient& h, const Element& s);

/**
 * Builds the witness at s, pinning s in both specs, and confirms the verdict
 * split with the generic oracle on both sides and the window oracle at
 * R = |s| + 2 on the containing side. Empty when s lies in both or neither;
 * throws std::logic_error if the verdicts fail to split.
 */
std::optional<DistinctnessWitness> witness_at(MarkedSpec& m1, MarkedSpec& m2, const Element& s);

/// Scans Ball(search_radius) in shortlex order; empty means inconclusive.
std::optional<DistinctnessWitness> distinguish(MarkedSpec& m1, MarkedSpec& m2, int search_radius);

/// ξ(hS) lies in the radius-r neighborhood of ξ(S) and differs from it.
struct CondensationCertificate {
  int r = 0;
  Element h;
  Pattern agreement;  // over Ball(4r), common to S and hS
  DistinctnessWitness witness;  // for the pair (S, hS)
  std::string ball_base;        // dump of the radius-r ball of ξ(S)
  std::string ball_translate;   // dump of the radius-r ball of ξ(hS)
  std::string tool_version = kToolVersion;

  bool operator==(const CondensationCertificate&) const = default;
};

/**
 * Snapshots Ball(4r), realizes a fresh h copying that window onto hS, injects
 * a point p ∈ S with h·p ∉ S beyond every pinned window, and packages the two
 * radius-r balls with the witness at s = h·p. Requires r ≥ 1.
 */
CondensationCertificate certify_condensed(const Wreath& w, ForcedSubset& s, int r);

/// Re-checks every certificate claim against s; returns the first failure.
std::optional<std::string> verify_certificate(const CondensationCertificate& c, const Wreath& w,
                                              ForcedSubset& s);

}  // namespace condensed
