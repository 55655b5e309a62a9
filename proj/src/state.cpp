#include "condensed/state.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "condensed/error.hpp"

namespace condensed {

using json = nlohmann::json;

namespace {

constexpr const char* kStateFormat = "condensed-state/1";
constexpr const char* kCertificateFormat = "condensed-certificate/1";

std::string quote(const std::string& s) { return json(s).dump(); }

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(what + ": " + e.what());
  }
}

/// Parses JSON while handing every entry of the top-level array `key` to
/// `sink` instead of keeping it in the document.
template <class Sink>
json parse_streaming(const std::string& text, const std::string& key, const std::string& what,
                     Sink&& sink) {
  std::string top;
  auto callback = [&](int depth, json::parse_event_t event, json& parsed) {
    if (depth == 1 && event == json::parse_event_t::key) top = parsed.get<std::string>();
    if (depth == 2 && top == key &&
        (event == json::parse_event_t::array_end || event == json::parse_event_t::object_end ||
         event == json::parse_event_t::value)) {
      sink(parsed);
      return false;
    }
    return true;
  };
  try {
    return json::parse(text, callback);
  } catch (const json::parse_error& e) {
    throw UsageError(what + ": " + e.what());
  } catch (const json::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
}

template <class T>
T field(const json& j, const char* name, const std::string& what) {
  if (!j.is_object() || !j.contains(name)) throw UsageError(what + ": missing field '" + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(what + ": bad field '" + std::string(name) + "': " + e.what());
  }
}

std::pair<std::string, bool> membership_entry(const json& e, const std::string& what) {
  if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_boolean())
    throw UsageError(what + ": membership entries must be [element, bool]");
  return {e[0].get<std::string>(), e[1].get<bool>()};
}

/// n >= 1 when `F` is exactly Ball(n), else -1.
int ball_radius_of(const Ambient& h, const std::vector<Element>& F) {
  if (F.size() < 2) return -1;
  const int n = pattern_radius(h, Pattern{F, {}});
  return F.size() == h.ball_size(n) ? n : -1;
}

std::string element_list(const Ambient& h, const std::vector<Element>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += quote(h.format(v[i]));
  }
  return out + "]";
}

std::string pattern_fields(const Ambient& h, const Pattern& p) {
  const int n = ball_radius_of(h, p.F);
  std::string F = n >= 0 ? "{\"ball\": " + std::to_string(n) + "}" : element_list(h, p.F);
  return "\"F\": " + F + ", \"E\": " + element_list(h, p.E);
}

Pattern pattern_from(const Ambient& h, const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("F") || !j.contains("E"))
    throw UsageError(what + ": pattern needs fields F and E");
  auto elements = [&](const json& list) {
    if (!list.is_array()) throw UsageError(what + ": element list expected");
    std::vector<Element> v;
    v.reserve(list.size());
    for (const auto& x : list) {
      if (!x.is_string()) throw UsageError(what + ": elements must be strings");
      v.push_back(h.parse_element(x.get<std::string>()));
    }
    return v;
  };
  std::vector<Element> F;
  const json& f = j.at("F");
  if (f.is_object()) {
    const int n = field<int>(f, "ball", what);
    if (n < 0) throw UsageError(what + ": ball radius must be non-negative");
    F = h.ball(n, std::numeric_limits<std::size_t>::max()).elements;
  } else {
    F = elements(f);
  }
  return make_pattern(h, std::move(F), elements(j.at("E")));
}

std::size_t env_cap(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v, &end, 10);
  if (*end || x == 0) throw UsageError(std::string(name) + " must be a positive integer");
  return static_cast<std::size_t>(x);
}

const char* side_name(Side s) { return s == Side::Left ? "L" : "R"; }

Side side_from(const std::string& s, const std::string& what) {
  if (s == "L") return Side::Left;
  if (s == "R") return Side::Right;
  throw UsageError(what + ": side must be L or R");
}

}  // namespace

std::string SessionConfig::format() const {
  json j = json::object();
  j["ambient"] = ambient;
  j["table"] = table;
  j["a"] = a ? json(*a) : json(nullptr);
  j["b"] = b ? json(*b) : json(nullptr);
  j["caps"] = {{"ball", caps.ball}, {"fresh_length", caps.fresh_length}, {"fresh_scan", caps.fresh_scan}};
  return j.dump();
}

SessionConfig SessionConfig::parse(const std::string& text) {
  const std::string what = "session config";
  json j = parse_json(text, what);
  SessionConfig c;
  c.ambient = field<std::string>(j, "ambient", what);
  c.table = field<std::string>(j, "table", what);
  for (auto [name, slot] : {std::pair{"a", &c.a}, std::pair{"b", &c.b}}) {
    if (!j.contains(name) || j.at(name).is_null()) continue;
    *slot = field<int>(j, name, what);
  }
  const json caps = j.contains("caps") ? j.at("caps") : json::object();
  if (caps.contains("ball")) c.caps.ball = field<std::size_t>(caps, "ball", what);
  if (caps.contains("fresh_length")) c.caps.fresh_length = field<int>(caps, "fresh_length", what);
  if (caps.contains("fresh_scan")) c.caps.fresh_scan = field<std::size_t>(caps, "fresh_scan", what);
  if (c.caps.ball == 0 || c.caps.fresh_length <= 0 || c.caps.fresh_scan == 0)
    throw UsageError(what + ": caps must be positive");
  Ambient::parse(c.ambient);
  return c;
}

SessionConfig SessionConfig::from_environment() {
  SessionConfig c;
  c.caps.ball = env_cap("CONDENSED_BALL_CAP", c.caps.ball);
  c.caps.fresh_length = static_cast<int>(env_cap("CONDENSED_FRESH_LENGTH", c.caps.fresh_length));
  c.caps.fresh_scan = env_cap("CONDENSED_FRESH_SCAN", c.caps.fresh_scan);
  return c;
}

FiniteGroupTable resolve_table(const SessionConfig& c) {
  const auto names = FiniteGroupTable::preset_names();
  FiniteGroupTable t = std::find(names.begin(), names.end(), c.table) != names.end()
                           ? FiniteGroupTable::preset(c.table)
                           : FiniteGroupTable::load(c.table);
  if (c.a) t.gen_a = *c.a;
  if (c.b) t.gen_b = *c.b;
  if (auto defect = validate_table(t)) throw UsageError("finite group table: " + defect->message);
  return t;
}

Session::Session(SessionConfig c, FiniteGroupTable t)
    : config_(std::move(c)),
      wreath_(Ambient::parse(config_.ambient), std::move(t)),
      subset_(wreath_.ambient(), config_.caps) {}

std::unique_ptr<Session> Session::create(const SessionConfig& c) {
  return std::unique_ptr<Session>(new Session(c, resolve_table(c)));
}

std::string Session::serialize() const {
  const Ambient& H = ambient();
  const FiniteGroupTable& t = wreath_.table();
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": " << quote(kStateFormat) << ",\n";
  out << "  \"config\": " << config_.format() << ",\n";
  json table = {{"order", t.order}, {"rows", t.mul}, {"id", t.id}, {"a", t.gen_a}, {"b", t.gen_b}};
  out << "  \"table\": " << table.dump() << ",\n";
  out << "  \"cursor\": " << quote(H.format(subset_.cursor())) << ",\n";
  out << "  \"pinned\": [";
  const auto pins = subset_.pinned_sorted();
  for (std::size_t i = 0; i < pins.size(); ++i)
    out << (i ? ",\n    " : "\n    ") << '[' << quote(H.format(pins[i].first)) << ", "
        << (pins[i].second ? "true" : "false") << ']';
  out << (pins.empty() ? "],\n" : "\n  ],\n");
  out << "  \"realizations\": [";
  const auto& log = subset_.realizations();
  for (std::size_t i = 0; i < log.size(); ++i)
    out << (i ? ",\n    " : "\n    ") << "{\"side\": " << quote(side_name(log[i].side)) << ", "
        << pattern_fields(H, log[i].pattern) << ", \"witness\": " << quote(H.format(log[i].witness))
        << '}';
  out << (log.empty() ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

std::unique_ptr<Session> Session::from_text(const std::string& text) {
  const std::string what = "state file";
  std::vector<std::pair<std::string, bool>> pins;
  json j = parse_streaming(text, "pinned", what,
                           [&](const json& e) { pins.push_back(membership_entry(e, what)); });
  if (field<std::string>(j, "format", what) != kStateFormat)
    throw UsageError(what + ": unsupported format");
  if (!j.contains("config")) throw UsageError(what + ": missing field 'config'");
  SessionConfig config = SessionConfig::parse(j.at("config").dump());

  const json& tj = j.contains("table") ? j.at("table") : json();
  FiniteGroupTable t = FiniteGroupTable::from_rows(
      field<std::vector<std::vector<int>>>(tj, "rows", what), field<int>(tj, "id", what),
      field<int>(tj, "a", what), field<int>(tj, "b", what));
  if (t.order != field<int>(tj, "order", what)) throw UsageError(what + ": table order mismatch");
  if (auto defect = validate_table(t)) throw UsageError(what + ": finite group table: " + defect->message);

  std::unique_ptr<Session> s(new Session(std::move(config), std::move(t)));
  const Ambient& H = s->ambient();
  ForcedSubset& S = s->subset_;
  for (const auto& [text_form, value] : pins) {
    Element x = H.parse_element(text_form);
    if (S.pinned(x)) throw UsageError(what + ": element " + text_form + " pinned twice");
    S.pin(x, value);
  }
  S.restore_cursor(H.parse_element(field<std::string>(j, "cursor", what)));
  if (!j.contains("realizations") || !j.at("realizations").is_array())
    throw UsageError(what + ": missing realization log");
  for (const auto& r : j.at("realizations")) {
    Realization entry{side_from(field<std::string>(r, "side", what), what), pattern_from(H, r, what),
                      H.parse_element(field<std::string>(r, "witness", what))};
    S.restore_realization(std::move(entry));
  }
  return s;
}

std::unique_ptr<Session> Session::load(const std::string& path) { return from_text(read_file(path)); }

void Session::save(const std::string& path) const { write_file_atomic(path, serialize()); }

std::string pattern_to_json(const Ambient& h, const Pattern& p) {
  return "{" + pattern_fields(h, p) + "}\n";
}

Pattern pattern_from_json(const Ambient& h, const std::string& text) {
  return pattern_from(h, parse_json(text, "pattern file"), "pattern file");
}

std::string certificate_to_json(const Ambient& h, const CondensationCertificate& c) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": " << quote(kCertificateFormat) << ",\n";
  out << "  \"r\": " << c.r << ",\n";
  out << "  \"h\": " << quote(h.format(c.h)) << ",\n";
  out << "  \"agreement\": [";
  std::unordered_set<Element, ElementHash> members(c.agreement.E.begin(), c.agreement.E.end());
  for (std::size_t i = 0; i < c.agreement.F.size(); ++i) {
    const Element& x = c.agreement.F[i];
    out << (i ? ",\n    " : "\n    ") << '[' << quote(h.format(x)) << ", "
        << (members.count(x) ? "true" : "false") << ']';
  }
  out << (c.agreement.F.empty() ? "],\n" : "\n  ],\n");
  const json witness = {{"s", h.format(c.witness.s)},
                        {"side", c.witness.side == WitnessSide::First ? "first" : "second"},
                        {"word", format_word(c.witness.word, h.rank())}};
  out << "  \"witness\": " << witness.dump() << ",\n";
  out << "  \"ball_digest\": [" << quote(c.ball_base) << ", " << quote(c.ball_translate) << "],\n";
  out << "  \"tool_version\": " << quote(c.tool_version) << "\n";
  out << "}\n";
  return out.str();
}

CondensationCertificate certificate_from_json(const Ambient& h, const std::string& text) {
  const std::string what = "certificate";
  CondensationCertificate c;
  std::vector<Element> E;
  json j = parse_streaming(text, "agreement", what, [&](const json& e) {
    auto [x, in] = membership_entry(e, what);
    c.agreement.F.push_back(h.parse_element(x));
    if (in) E.push_back(c.agreement.F.back());
  });
  if (field<std::string>(j, "format", what) != kCertificateFormat)
    throw UsageError(what + ": unsupported format");
  c.agreement.E = std::move(E);
  c.r = field<int>(j, "r", what);
  c.h = h.parse_element(field<std::string>(j, "h", what));
  const json& w = j.contains("witness") ? j.at("witness") : json();
  c.witness.s = h.parse_element(field<std::string>(w, "s", what));
  const std::string side = field<std::string>(w, "side", what);
  if (side != "first" && side != "second") throw UsageError(what + ": witness side must be first or second");
  c.witness.side = side == "first" ? WitnessSide::First : WitnessSide::Second;
  c.witness.word = parse_word(field<std::string>(w, "word", what), h.rank());
  const auto digest = field<std::vector<std::string>>(j, "ball_digest", what);
  if (digest.size() != 2) throw UsageError(what + ": ball_digest must hold two dumps");
  c.ball_base = digest[0];
  c.ball_translate = digest[1];
  c.tool_version = field<std::string>(j, "tool_version", what);
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw UsageError("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw UsageError("cannot replace " + path);
  }
}

}  // namespace condensed
