#include "condensed/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "condensed/error.hpp"
#include "condensed/state.hpp"

namespace condensed {

namespace {

/// Advisory exclusive lock on `<state>.lock`, held for the object's lifetime.
class StateLock {
 public:
  explicit StateLock(const std::string& state_path) {
    const std::string path = state_path + ".lock";
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw UsageError("cannot open lock file " + path);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw UsageError("state " + state_path + " is locked by another process");
    }
  }
  ~StateLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;

 private:
  int fd_;
};

Side parse_side(const std::string& s) {
  if (s == "L") return Side::Left;
  if (s == "R") return Side::Right;
  throw UsageError("side must be L or R");
}

std::string describe(const Ambient& H, const Verdict& v) {
  if (!v.non_identity())
    return v.kind == VerdictKind::Identity ? "identity" : "identity up to window";
  if (!v.point) return "non-identity: tail " + H.format(v.tail);
  return "non-identity at " + H.format(*v.point);
}

/// Everything a command needs; filled in by CLI11 before the action runs.
struct Options {
  std::string state = "condensed-state.json";
  std::string ambient, table, word, pattern, su, tv, other, out, cert, side = "L";
  std::string translate, other_translate;
  std::optional<int> a, b, window;
  int radius = 0;
  bool force = false, count = false, debug = false;
};

Element translate_or_identity(const Ambient& H, const std::string& text) {
  return text.empty() ? H.identity() : H.parse_element(text);
}

void check_compatible(const Session& x, const Session& y) {
  if (!(x.ambient() == y.ambient())) throw UsageError("the two states use different ambient groups");
  if (!(x.wreath().table() == y.wreath().table()))
    throw UsageError("the two states use different finite groups");
}

int cmd_init(const Options& o, std::ostream& out) {
  if (!o.force && std::filesystem::exists(o.state))
    throw UsageError("state " + o.state + " already exists (use --force to overwrite)");
  StateLock lock(o.state);
  SessionConfig c = SessionConfig::from_environment();
  if (!o.ambient.empty()) c.ambient = o.ambient;
  if (!o.table.empty()) c.table = o.table;
  c.a = o.a;
  c.b = o.b;
  auto s = Session::create(c);
  s->save(o.state);
  out << "initialized " << o.state << ": ambient " << s->ambient().spec() << ", table " << c.table << '\n';
  return kSuccess;
}

int cmd_validate_table(const Options& o, std::ostream& out) {
  FiniteGroupTable t;
  if (o.table.empty()) {
    t = Session::load(o.state)->wreath().table();
  } else {
    const auto names = FiniteGroupTable::preset_names();
    t = std::find(names.begin(), names.end(), o.table) != names.end() ? FiniteGroupTable::preset(o.table)
                                                                       : FiniteGroupTable::load(o.table);
  }
  if (o.a) t.gen_a = *o.a;
  if (o.b) t.gen_b = *o.b;
  if (auto defect = validate_table(t)) {
    out << "invalid: " << defect->message << '\n';
    return kNegative;
  }
  out << "ok: order " << t.order << ", a = " << t.gen_a << ", b = " << t.gen_b << '\n';
  return kSuccess;
}

int cmd_ball(const Options& o, std::ostream& out) {
  if (o.radius < 0) throw UsageError("radius must be non-negative");
  std::optional<Ambient> H;
  std::size_t cap = SessionConfig::from_environment().caps.ball;
  if (!o.ambient.empty()) {
    H = Ambient::parse(o.ambient);
  } else {
    auto s = Session::load(o.state);
    H = s->ambient();
    cap = s->config().caps.ball;
  }
  BallSpec b = H->ball(o.radius, cap);
  if (!o.count)
    for (const auto& x : b.elements) out << H->format(x) << '\n';
  out << "size " << b.elements.size() << '\n';
  return kSuccess;
}

int cmd_wp(const Options& o, std::ostream& out) {
  StateLock lock(o.state);
  auto s = Session::load(o.state);
  const Ambient& H = s->ambient();
  MarkedWord w = parse_word(o.word, H.rank());
  ForcedTranslate subset(s->subset(), translate_or_identity(H, o.translate));
  Verdict v = o.window ? s->wreath().is_identity_window(w, subset, *o.window, s->config().caps.ball)
                       : s->wreath().is_identity_generic(w, subset);
  s->save(o.state);
  out << describe(H, v) << '\n';
  return v.non_identity() ? kNegative : kSuccess;
}

int cmd_snapshot(const Options& o, std::ostream& out) {
  if (o.radius < 0) throw UsageError("radius must be non-negative");
  StateLock lock(o.state);
  auto s = Session::load(o.state);
  Pattern p = s->subset().snapshot(o.radius);
  s->save(o.state);
  const std::string text = pattern_to_json(s->ambient(), p);
  if (o.out.empty())
    out << text;
  else
    write_file_atomic(o.out, text);
  return kSuccess;
}

int cmd_realize(const Options& o, std::ostream& out) {
  StateLock lock(o.state);
  auto s = Session::load(o.state);
  Pattern p = pattern_from_json(s->ambient(), read_file(o.pattern));
  const Side side = parse_side(o.side);
  Element t = side == Side::Left ? s->subset().realize_left(p) : s->subset().realize_right(p);
  s->save(o.state);
  out << s->ambient().format(t) << '\n';
  return kSuccess;
}

int cmd_transitivity(const Options& o, std::ostream& out) {
  auto s = Session::load(o.state);
  const Ambient& H = s->ambient();
  Pattern sp = pattern_from_json(H, read_file(o.su));
  Pattern tp = pattern_from_json(H, read_file(o.tv));
  TransitivityWitness w = transitivity_witness(H, sp, tp, parse_side(o.side));
  const bool ok = verify_transitivity(H, sp, tp, w);
  out << "h " << H.format(w.h) << '\n';
  out << "R " << pattern_to_json(H, w.R);
  out << (ok ? "verified" : "failed") << '\n';
  return ok ? kSuccess : kNegative;
}

int cmd_markedball(const Options& o, std::ostream& out) {
  StateLock lock(o.state);
  auto s = Session::load(o.state);
  MarkedSpec m = xi(s->wreath(), s->subset(), translate_or_identity(s->ambient(), o.translate));
  MarkedBall b = build_ball(m, o.radius, s->config().caps.ball);
  s->save(o.state);
  out << b.dump();
  return kSuccess;
}

int cmd_similar(const Options& o, std::ostream& out) {
  if (o.other == o.state) throw UsageError("--other must name a different state file");
  StateLock lock(o.state), other_lock(o.other);
  auto s = Session::load(o.state);
  auto t = Session::load(o.other);
  check_compatible(*s, *t);
  MarkedSpec m1 = xi(s->wreath(), s->subset(), translate_or_identity(s->ambient(), o.translate));
  MarkedSpec m2 = xi(t->wreath(), t->subset(), translate_or_identity(t->ambient(), o.other_translate));
  const bool similar = r_similar(build_ball(m1, o.radius, s->config().caps.ball),
                                 build_ball(m2, o.radius, t->config().caps.ball));
  std::optional<MarkedWord> discrepancy;
  if (o.debug) discrepancy = similarity_debug(m1, m2, o.radius);
  s->save(o.state);
  t->save(o.other);
  out << (similar ? "similar" : "not similar") << " at radius " << o.radius << '\n';
  if (o.debug)
    out << (discrepancy ? "first discrepant word: " + format_word(*discrepancy, s->ambient().rank())
                        : std::string("no discrepant word"))
        << '\n';
  return similar ? kSuccess : kNegative;
}

int cmd_distinguish(const Options& o, std::ostream& out) {
  if (o.other == o.state) throw UsageError("--other must name a different state file");
  StateLock lock(o.state), other_lock(o.other);
  auto s = Session::load(o.state);
  auto t = Session::load(o.other);
  check_compatible(*s, *t);
  MarkedSpec m1 = xi(s->wreath(), s->subset(), s->ambient().identity());
  MarkedSpec m2 = xi(t->wreath(), t->subset(), t->ambient().identity());
  auto w = distinguish(m1, m2, o.radius);
  s->save(o.state);
  t->save(o.other);
  if (!w) {
    out << "inconclusive within radius " << o.radius << '\n';
    return kNegative;
  }
  const Ambient& H = s->ambient();
  out << "s " << H.format(w->s) << '\n';
  out << "side " << (w->side == WitnessSide::First ? "first" : "second") << '\n';
  out << "word " << format_word(w->word, H.rank()) << '\n';
  return kSuccess;
}

int cmd_certify(const Options& o, std::ostream& out) {
  StateLock lock(o.state);
  auto s = Session::load(o.state);
  CondensationCertificate c = certify_condensed(s->wreath(), s->subset(), o.radius);
  s->save(o.state);
  const Ambient& H = s->ambient();
  write_file_atomic(o.out, certificate_to_json(H, c));
  out << "certificate r = " << c.r << ", h = " << H.format(c.h) << ", s = " << H.format(c.witness.s)
      << " written to " << o.out << '\n';
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
  auto s = Session::load(o.state);
  CondensationCertificate c = certificate_from_json(s->ambient(), read_file(o.cert));
  if (auto failure = verify_certificate(c, s->wreath(), s->subset())) {
    out << "failed: " << *failure << '\n';
    return kNegative;
  }
  out << "verified: r = " << c.r << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word problems, marked balls and condensation certificates for B Wr H", "condensed"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--state", o.state, "Session state file")->capture_default_str();

  std::function<int(const Options&, std::ostream&)> action;
  auto command = [&](const char* name, const char* help, int (*fn)(const Options&, std::ostream&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };

  auto* init = command("init", "Create a session state", cmd_init);
  init->add_option("--ambient", o.ambient, "free:k or zd:d (default free:2)");
  init->add_option("--table", o.table, "Preset (s3, d4, q8) or table file (default s3)");
  init->add_option("--a", o.a, "Index of a");
  init->add_option("--b", o.b, "Index of b");
  init->add_flag("--force", o.force, "Overwrite an existing state");

  auto* vt = command("validate-table", "Check the finite group table axioms", cmd_validate_table);
  vt->add_option("--table", o.table, "Preset or table file (default: the session's table)");
  vt->add_option("--a", o.a, "Index of a");
  vt->add_option("--b", o.b, "Index of b");

  auto* ball = command("ball", "List Ball_H(r) in shortlex order", cmd_ball);
  ball->add_option("--radius", o.radius, "Radius")->required();
  ball->add_option("--ambient", o.ambient, "Use this ambient group instead of the session's");
  ball->add_flag("--count", o.count, "Print only the size");

  auto* wp = command("wp", "Decide whether a marked word is trivial", cmd_wp);
  wp->add_option("--word", o.word, "Word over x<i>, a, b")->required();
  wp->add_option("--window", o.window, "Brute-force check over Ball(R) instead");
  wp->add_option("--translate", o.translate, "Use the subset hS");

  auto* snap = command("snapshot", "Pin and print S on Ball(n)", cmd_snapshot);
  snap->add_option("--radius", o.radius, "Radius")->required();
  snap->add_option("--out", o.out, "Write the pattern to a file");

  auto* realize = command("realize", "Fulfill a density requirement", cmd_realize);
  realize->add_option("--side", o.side, "L or R")->required();
  realize->add_option("--pattern", o.pattern, "Pattern file")->required();

  auto* trans = command("transitivity", "Transitivity witness for two patterns", cmd_transitivity);
  trans->add_option("--su", o.su, "Pattern file for U")->required();
  trans->add_option("--tv", o.tv, "Pattern file for V")->required();
  trans->add_option("--side", o.side, "L or R")->capture_default_str();

  auto* mb = command("markedball", "Dump the radius-r ball of the marked group", cmd_markedball);
  mb->add_option("--radius", o.radius, "Radius")->required();
  mb->add_option("--translate", o.translate, "Use the subset hS");

  auto* sim = command("similar", "Compare radius-r balls with another session", cmd_similar);
  sim->add_option("--other", o.other, "Other state file")->required();
  sim->add_option("--radius", o.radius, "Radius")->required();
  sim->add_option("--translate", o.translate, "Translate for this session");
  sim->add_option("--other-translate", o.other_translate, "Translate for the other session");
  sim->add_flag("--debug", o.debug, "Also search for the first discrepant word");

  auto* dist = command("distinguish", "Find a distinctness witness against another session", cmd_distinguish);
  dist->add_option("--other", o.other, "Other state file")->required();
  dist->add_option("--radius", o.radius, "Search radius")->required();

  auto* cert = command("certify", "Produce a condensation certificate", cmd_certify);
  cert->add_option("--radius", o.radius, "Radius r >= 1")->required();
  cert->add_option("--out", o.out, "Certificate file")->required();

  auto* ver = command("verify", "Re-check a certificate against the session", cmd_verify);
  ver->add_option("--cert", o.cert, "Certificate file")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    return action(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    err << "capacity: " << e.what() << '\n';
    return kCapacity;
  } catch (const ConflictError& e) {
    err << "conflict: " << e.what() << '\n';
    return kNegative;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kNegative;
  }
}

}  // namespace condensed
