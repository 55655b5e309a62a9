#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "condensed/condense.hpp"

namespace condensed {

/// How a session is set up: ambient group, finite group and resource caps.
struct SessionConfig {
  std::string ambient = "free:2";
  std::string table = "s3";  // preset name or table file path
  std::optional<int> a, b;   // overrides of the table's marked elements
  Caps caps;

  /// Compact JSON; format(parse(format(c))) == format(c).
  std::string format() const;
  static SessionConfig parse(const std::string& text);
  /// Defaults, with caps taken from CONDENSED_BALL_CAP, CONDENSED_FRESH_LENGTH
  /// and CONDENSED_FRESH_SCAN when set.
  static SessionConfig from_environment();

  bool operator==(const SessionConfig&) const = default;
};

/// Resolves the preset or file, applies a/b overrides and validates.
FiniteGroupTable resolve_table(const SessionConfig& c);

/**
 * A working session: the wreath product and one forced subset. The state
 * file stores the configuration, the table itself, all pins (shortlex
 * sorted), the freshness cursor and the realization log; loading replays
 * every pin and re-verifies every realization.
 */
class Session {
 public:
  static std::unique_ptr<Session> create(const SessionConfig& c);
  static std::unique_ptr<Session> load(const std::string& path);
  static std::unique_ptr<Session> from_text(const std::string& text);

  std::string serialize() const;
  /// Writes a temporary file next to `path`, then renames it over `path`.
  void save(const std::string& path) const;

  const SessionConfig& config() const { return config_; }
  const Ambient& ambient() const { return wreath_.ambient(); }
  const Wreath& wreath() const { return wreath_; }
  ForcedSubset& subset() { return subset_; }
  const ForcedSubset& subset() const { return subset_; }

 private:
  Session(SessionConfig c, FiniteGroupTable t);

  SessionConfig config_;
  Wreath wreath_;
  ForcedSubset subset_;
};

/// Pattern files: {"F": [...] or {"ball": n}, "E": [...]}.
std::string pattern_to_json(const Ambient& h, const Pattern& p);
Pattern pattern_from_json(const Ambient& h, const std::string& text);

std::string certificate_to_json(const Ambient& h, const CondensationCertificate& c);
CondensationCertificate certificate_from_json(const Ambient& h, const std::string& text);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace condensed
