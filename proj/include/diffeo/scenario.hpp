// Declarative scenario files (TOML, schema 1): declarations by catalog name
// or explicit table, assertions with expected verdicts, deterministic
// reports in text or JSON.
#pragma once

#include "diffeo/tables.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace diffeo::scenario {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Command-line overrides; they win over the scenario file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::vector<std::pair<std::string, double>> tolerances;
};

/// One checked assertion.
struct Outcome {
  std::size_t index = 0;
  std::string op;
  std::string subject;
  std::string expected;
  std::string observed;
  bool matched = false;
  Verdict verdict;
  std::optional<long> count;
  Json details = Json::object();
  std::string mismatch;
};

struct Report {
  std::string command;
  std::string scenario;
  std::uint64_t seed = 0;
  int samples = 64;
  Tolerances tolerances;
  std::vector<Outcome> outcomes;
  Json extra = Json::object();
  std::optional<double> wall_clock_seconds;
  bool stopped_early = false;

  std::size_t matched() const {
    std::size_t n = 0;
    for (const auto& o : outcomes) n += o.matched;
    return n;
  }
  bool all_matched() const { return matched() == outcomes.size(); }
  int exit_code() const { return all_matched() ? 0 : 1; }
};

// ---------------------------------------------------------------------------
// Formatting

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v(i));
  return s + ")";
}

inline Json verdict_json(const Verdict& v) {
  Json j;
  j["status"] = std::string(to_string(v.status));
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.point) j["point"] = to_std(*v.point);
  if (v.piece) j["piece"] = *v.piece;
  if (v.sample) j["sample"] = *v.sample;
  if (v.deviation) j["deviation"] = *v.deviation;
  return j;
}

inline Json tolerances_json(const Tolerances& t) {
  Json j;
  j["eq_tol"] = t.eq_tol;
  j["fd_tol"] = t.fd_tol;
  j["fd_step"] = t.fd_step;
  j["form_tol"] = t.form_tol;
  j["exact_tol"] = t.exact_tol;
  return j;
}

inline Json report_json(const Report& r) {
  Json j;
  j["command"] = r.command;
  j["scenario"] = r.scenario;
  j["schema"] = kSchemaVersion;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["tolerances"] = tolerances_json(r.tolerances);
  if (!r.extra.empty()) j["results"] = r.extra;
  Json list = Json::array();
  for (const auto& o : r.outcomes) {
    Json a;
    a["index"] = o.index;
    a["op"] = o.op;
    a["subject"] = o.subject;
    a["expected"] = o.expected;
    a["observed"] = o.observed;
    a["matched"] = o.matched;
    a["verdict"] = verdict_json(o.verdict);
    if (o.count) a["count"] = *o.count;
    if (!o.details.empty()) a["details"] = o.details;
    if (!o.mismatch.empty()) a["mismatch"] = o.mismatch;
    list.push_back(std::move(a));
  }
  j["assertions"] = std::move(list);
  j["summary"] = Json{{"total", r.outcomes.size()},
                      {"matched", r.matched()},
                      {"mismatched", r.outcomes.size() - r.matched()},
                      {"stopped_early", r.stopped_early}};
  if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
  j["exit_code"] = r.exit_code();
  return j;
}

inline std::string render_text(const Report& r) {
  std::ostringstream out;
  out << r.command << " " << r.scenario << " (schema " << kSchemaVersion << ")\n";
  out << "seed " << r.seed << "  samples " << r.samples << "  eq_tol " << format_double(r.tolerances.eq_tol)
      << "  fd_tol " << format_double(r.tolerances.fd_tol) << "  fd_step " << format_double(r.tolerances.fd_step)
      << "  form_tol " << format_double(r.tolerances.form_tol) << "  exact_tol "
      << format_double(r.tolerances.exact_tol) << "\n";
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) out << "  " << it.key() << ": " << it.value().dump() << "\n";
  for (const auto& o : r.outcomes) {
    out << "[" << o.index << "] " << o.op;
    if (!o.subject.empty()) out << " " << o.subject;
    out << ": " << o.observed << " (expected " << o.expected << ") " << (o.matched ? "MATCH" : "MISMATCH") << "\n";
    const Verdict& v = o.verdict;
    if (v.point || v.piece || v.sample) {
      out << "    witness";
      if (v.point) out << " point " << format_vector(*v.point);
      if (v.piece) out << " piece " << *v.piece;
      if (v.sample) out << " sample " << *v.sample;
      out << "\n";
    }
    if (v.deviation) out << "    deviation " << format_double(*v.deviation) << "\n";
    if (o.count) out << "    count " << *o.count << "\n";
    if (!v.reason.empty()) out << "    reason: " << v.reason << "\n";
    for (auto it = o.details.begin(); it != o.details.end(); ++it)
      out << "    " << it.key() << ": " << it.value().dump() << "\n";
    if (!o.mismatch.empty()) out << "    mismatch: " << o.mismatch << "\n";
  }
  out << "summary: " << r.matched() << "/" << r.outcomes.size() << " matched";
  if (r.stopped_early) out << " (stopped at first mismatch)";
  out << "\n";
  if (r.wall_clock_seconds) out << "wall-clock " << format_double(*r.wall_clock_seconds) << " s\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Field access with strict keys and line numbers

class Fields {
 public:
  Fields(const toml::table& t, std::string context, std::string source)
      : t_(t), context_(std::move(context)), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const toml::node* n = t_.get(key);
    const auto& src = n ? n->source() : t_.source();
    throw Error(ErrorKind::ParseError, source_ + ":" + std::to_string(src.begin.line) + ": " + context_ +
                                           (key.empty() ? "" : " field '" + key + "'") + ": " + what);
  }

  bool has(const std::string& key) const { return t_.contains(key); }

  const toml::node* node(const std::string& key) {
    used_.insert(key);
    return t_.get(key);
  }

  std::string str(const std::string& key) {
    if (auto s = opt_str(key)) return *s;
    fail(key, "required string is missing");
  }

  std::optional<std::string> opt_str(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value<std::string>()) return *v;
    fail(key, "expected a string");
  }

  double num(const std::string& key) {
    if (auto d = opt_num(key)) return *d;
    fail(key, "required number is missing");
  }

  std::optional<double> opt_num(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (n->is_integer()) return static_cast<double>(*n->value<std::int64_t>());
    if (n->is_floating_point()) return *n->value<double>();
    fail(key, "expected a number");
  }

  std::optional<std::int64_t> opt_int(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value<std::int64_t>(); v && n->is_integer()) return *v;
    fail(key, "expected an integer");
  }

  std::int64_t integer(const std::string& key) {
    if (auto v = opt_int(key)) return *v;
    fail(key, "required integer is missing");
  }

  std::optional<bool> opt_bool(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value<bool>()) return *v;
    fail(key, "expected a boolean");
  }

  std::vector<double> nums(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return {};
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *a) {
      if (e.is_integer()) {
        out.push_back(static_cast<double>(*e.value<std::int64_t>()));
      } else if (e.is_floating_point()) {
        out.push_back(*e.value<double>());
      } else {
        fail(key, "expected an array of numbers");
      }
    }
    return out;
  }

  std::vector<std::vector<double>> num_rows(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return {};
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of number arrays");
    std::vector<std::vector<double>> out;
    for (const auto& row : *a) {
      const toml::array* r = row.as_array();
      if (!r) fail(key, "expected an array of number arrays");
      out.emplace_back();
      for (const auto& e : *r) {
        if (auto d = e.value<double>()) {
          out.back().push_back(*d);
        } else {
          fail(key, "expected numbers");
        }
      }
    }
    return out;
  }

  std::vector<std::string> strs(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return {};
    const toml::array* a = n->as_array();
    if (!a) fail(key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *a) {
      if (auto s = e.value<std::string>()) {
        out.push_back(*s);
      } else {
        fail(key, "expected an array of strings");
      }
    }
    return out;
  }

  const toml::table* table(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return nullptr;
    if (const toml::table* t = n->as_table()) return t;
    fail(key, "expected a table");
  }

  const toml::array* array(const std::string& key) {
    const toml::node* n = node(key);
    if (!n) return nullptr;
    if (const toml::array* a = n->as_array()) return a;
    fail(key, "expected an array");
  }

  Fields sub(const toml::table& t, const std::string& what) const { return Fields(t, context_ + " " + what, source_); }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [k, v] : t_) {
      const std::string key(k.str());
      if (!used_.count(key))
        throw Error(ErrorKind::ParseError, source_ + ":" + std::to_string(v.source().begin.line) + ": " + context_ +
                                               ": unknown field '" + key + "'");
    }
  }

  const std::string& context() const { return context_; }

 private:
  const toml::table& t_;
  std::string context_;
  std::string source_;
  std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Scenario

struct BundleList {
  std::string action;
  std::vector<std::string> bundles;
};

struct NamedMorphism {
  std::string source;
  std::string target;
  PresheafMorphism morphism;
};

struct RunOptions {
  bool fail_fast = false;
  bool timing = false;
  std::function<bool(const std::string& op, Fields&)> filter;  // keep assertion?
};

struct AssertSpec {
  std::size_t index = 0;
  const toml::table* table = nullptr;
};

class Scenario {
 public:
  static Scenario load(const std::string& path, const Overrides& ov = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, path + ": cannot open file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), path, ov);
  }

  static Scenario parse(const std::string& text, const std::string& source, const Overrides& ov = {}) {
    Scenario s;
    s.source_ = source;
    try {
      s.root_ = std::make_shared<toml::table>(toml::parse(text, source));
    } catch (const toml::parse_error& e) {
      throw Error(ErrorKind::ParseError, source + ":" + std::to_string(e.source().begin.line) + ": " +
                                             std::string(e.description()));
    }
    s.build(ov);
    return s;
  }

  const std::string& name() const { return name_; }
  std::uint64_t seed() const { return seed_; }
  int samples() const { return samples_; }
  const Tolerances& tolerances() const { return tol_; }

  const ActionGroupoid& action(const std::string& n) const { return lookup(actions_, n, "action"); }
  const Domain& domain(const std::string& n) const { return lookup(domains_, n, "domain"); }
  const SmoothEuclMap& map(const std::string& n) const { return lookup(maps_, n, "map"); }
  const EuclForm& form(const std::string& n) const { return lookup(forms_, n, "form"); }
  const AnyBundle& bundle(const std::string& n) const { return lookup(bundles_, n, "bundle"); }
  const FinitePresheaf& presheaf(const std::string& n) const { return lookup(presheaves_, n, "presheaf"); }
  const BundleList& bundle_list(const std::string& n) const { return lookup(lists_, n, "bundle list"); }
  const std::map<std::string, FinitePresheaf>& presheaves() const { return presheaves_; }
  std::size_t assertion_count() const { return asserts_.size(); }

  Report run(const RunOptions& opt = {}) const {
    const auto start = std::chrono::steady_clock::now();
    Report r = blank_report("run");
    for (const auto& a : asserts_) {
      Fields f(*a.table, "[[assert]] #" + std::to_string(a.index), source_);
      const std::string op = f.str("op");
      if (opt.filter && !opt.filter(op, f)) continue;
      r.outcomes.push_back(check(a.index, op, f));
      if (opt.fail_fast && !r.outcomes.back().matched) {
        r.stopped_early = true;
        break;
      }
    }
    if (opt.timing)
      r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

  /// The three partitions of one bundle list, plus the file's partition
  /// assertions on that list.
  Report classify(const std::string& list, const RunOptions& opt = {}) const {
    const BundleList& L = bundle_list(list);
    Report r = blank_report("classify");
    const auto bundles = resolve_list(L);
    const ActionGroupoid g = list_action(L, bundles);
    Json parts;
    parts["list"] = list;
    parts["bundles"] = L.bundles;
    for (auto rel : {BundleRelation::Isomorphic, BundleRelation::LocallyIsomorphic, BundleRelation::FiberwiseIsomorphic})
      parts[std::string(to_string(rel))] = partition_json(classify_bundles(bundles, g, rel, tol_.eq_tol), L);
    r.extra = std::move(parts);
    RunOptions o = opt;
    o.filter = [&](const std::string& op, Fields& f) {
      static const std::set<std::string> ops = {"isomorphism_classes", "discretization_classes", "coarse_classes",
                                                "partition_chain"};
      return ops.count(op) && f.has("list") && f.opt_str("list") == list;
    };
    Report checked = run(o);
    r.outcomes = std::move(checked.outcomes);
    r.stopped_early = checked.stopped_early;
    r.wall_clock_seconds = checked.wall_clock_seconds;
    return r;
  }

  /// `sheaf concreteness|kappa|sheafify|adjunction-check`: per-presheaf
  /// results plus the file's assertions of that family.
  Report sheaf_command(const std::string& sub, const RunOptions& opt = {}) const {
    static const std::map<std::string, std::set<std::string>> families = {
        {"concreteness", {"concrete"}},
        {"kappa", {"kappa", "kappa_preserves", "kappa_hat_idempotent"}},
        {"sheafify", {"sheafify", "sheaf_condition", "sheafify_once"}},
        {"adjunction-check", {"adjunction", "adjunction_random"}}};
    const auto fam = families.find(sub);
    if (fam == families.end()) throw Error(ErrorKind::InvalidArgument, "unknown sheaf subcommand " + sub);
    Report r = blank_report("sheaf " + sub);
    Json results = Json::object();
    for (const auto& [name, P] : presheaves_) {
      Json j;
      if (sub == "concreteness") {
        for (std::size_t o = 0; o < P.labels.size(); ++o)
          j[P.site->object(o).name] = std::string(to_string(is_concrete_at(P, o).status));
      } else if (sub == "kappa") {
        j["before"] = sizes_json(P);
        j["after"] = sizes_json(concretize_kappa(P).presheaf);
      } else if (sub == "sheafify") {
        const auto s = sheafify(P);
        j["before"] = sizes_json(P);
        j["after"] = sizes_json(s.sheaf);
        j["iterations"] = s.iterations;
      } else {
        j["kappa_hat"] = sizes_json(kappa_hat(P).sheaf);
      }
      results[name] = std::move(j);
    }
    r.extra = std::move(results);
    RunOptions o = opt;
    o.filter = [&](const std::string& op, Fields&) { return fam->second.count(op) > 0; };
    Report checked = run(o);
    r.outcomes = std::move(checked.outcomes);
    r.stopped_early = checked.stopped_early;
    r.wall_clock_seconds = checked.wall_clock_seconds;
    return r;
  }

 private:
  Scenario() = default;

  template <class M>
  static const typename M::mapped_type& lookup(const M& m, const std::string& n, const std::string& kind) {
    const auto it = m.find(n);
    if (it == m.end()) throw Error(ErrorKind::UnresolvedName, "no " + kind + " named '" + n + "'");
    return it->second;
  }

  Report blank_report(std::string command) const {
    Report r;
    r.command = std::move(command);
    r.scenario = name_;
    r.seed = seed_;
    r.samples = samples_;
    r.tolerances = tol_;
    return r;
  }

  SampleConfig sample_config(std::optional<std::int64_t> count = std::nullopt) const {
    return SampleConfig{static_cast<std::size_t>(count.value_or(samples_)), seed_};
  }

  // ---- declarations ------------------------------------------------------

  template <class F>
  void each(const std::string& key, F&& fn) {
    const toml::node* n = root_->get(key);
    if (!n) return;
    const toml::array* a = n->as_array();
    if (!a || !a->is_array_of_tables())
      throw Error(ErrorKind::ParseError, source_ + ":" + std::to_string(n->source().begin.line) + ": '" + key +
                                             "' must be an array of tables ([[" + key + "]])");
    std::size_t k = 0;
    for (const auto& e : *a) {
      Fields f(*e.as_table(), "[[" + key + "]] #" + std::to_string(++k), source_);
      fn(f);
      f.finish();
    }
  }

  static void set_tolerance(Tolerances& t, const std::string& key, double v) {
    auto check = [&](double lo, double hi) {
      if (!(v > lo && v < hi))
        throw Error(ErrorKind::ToleranceOutOfRange,
                    key + " = " + format_double(v) + " is outside (" + format_double(lo) + ", " + format_double(hi) + ")");
    };
    if (key == "eq_tol") {
      check(0.0, 1.0);
      t.eq_tol = v;
    } else if (key == "fd_tol") {
      check(0.0, 1.0);
      t.fd_tol = v;
    } else if (key == "fd_step") {
      check(0.0, 0.1);
      t.fd_step = v;
    } else if (key == "form_tol") {
      check(0.0, 1.0);
      t.form_tol = v;
    } else if (key == "exact_tol") {
      check(0.0, 1.0);
      t.exact_tol = v;
    } else {
      throw Error(ErrorKind::ToleranceOutOfRange, "unknown tolerance " + key);
    }
  }

  void build(const Overrides& ov) {
    Fields top(*root_, "scenario", source_);
    const auto schema = top.opt_int("schema");
    if (!schema) top.fail("schema", "required integer is missing");
    if (*schema != kSchemaVersion) top.fail("schema", "unsupported schema version " + std::to_string(*schema));
    name_ = top.opt_str("name").value_or(source_);
    top.opt_str("description");
    if (auto s = top.opt_int("seed")) {
      if (*s < 0) top.fail("seed", "must be non-negative");
      seed_ = static_cast<std::uint64_t>(*s);
    }
    if (auto n = top.opt_int("samples")) samples_ = static_cast<int>(*n);
    if (const toml::table* t = top.table("tolerances")) {
      Fields tf = top.sub(*t, "[tolerances]");
      for (const auto& [k, v] : *t) {
        const std::string key(k.str());
        set_tolerance(tol_, key, tf.num(key));
      }
    }
    if (ov.seed) seed_ = *ov.seed;
    if (ov.samples) samples_ = *ov.samples;
    for (const auto& [k, v] : ov.tolerances) set_tolerance(tol_, k, v);
    if (samples_ < 1) throw Error(ErrorKind::InvalidArgument, "samples must be positive");

    for (const char* k : {"group", "domain", "action", "map", "bundle", "cocycle_bundle", "bundle_list", "form",
                          "site", "presheaf", "morphism", "assert"})
      top.node(k);
    top.finish();

    each("group", [&](Fields& f) { groups_.emplace(f.str("name"), parse_group(f)); });
    each("domain", [&](Fields& f) {
      const std::string n = f.str("name");
      domains_.emplace(n, parse_domain(f, n));
    });
    each("action", [&](Fields& f) {
      const std::string n = f.str("name");
      const std::string kind = f.str("kind");
      const Domain& space = domain(f.str("space"));
      std::optional<GroupModel> g;
      if (auto gn = f.opt_str("group")) g = group(*gn);
      ActionGroupoid a = catalog::make_action(kind, space, f.nums("params"), g);
      if (Verdict v = a.validate(tol_.eq_tol); !v.passed()) f.fail("kind", "action laws fail: " + v.reason);
      actions_.emplace(n, std::move(a));
    });
    each("map", [&](Fields& f) {
      const std::string n = f.str("name");
      maps_.emplace(n, catalog::make_map(f.str("expr"), domain(f.str("domain")), f.nums("params")).renamed(n));
    });
    each("bundle", [&](Fields& f) {
      const std::string n = f.str("name");
      const std::string act = f.str("action");
      std::vector<Vector> special;
      for (const auto& row : f.num_rows("special")) special.push_back(vec(row));
      bundles_.emplace(n, pullback_unit_bundle(action(act), map(f.str("classifying")), n, special, tol_.eq_tol));
      bundle_action_[n] = act;
    });
    each("cocycle_bundle", [&](Fields& f) {
      const std::string n = f.str("name");
      const GroupModel g = group(f.str("group"));
      Cocycle c{cover_graph(f.str("cover")), g, {}};
      for (double t : f.nums("transitions")) {
        if (t != static_cast<int>(t) || t < 0 || t >= g.order()) f.fail("transitions", "not a group element index");
        c.transitions.push_back(GroupElement{static_cast<int>(t), 0.0});
      }
      if (Verdict v = c.validate(); !v.passed()) f.fail("transitions", v.reason);
      bundles_.emplace(n, CocycleBundle{n, std::move(c)});
    });
    each("bundle_list", [&](Fields& f) {
      BundleList L{f.opt_str("action").value_or(""), f.strs("bundles")};
      for (const auto& b : L.bundles) bundle(b);
      if (!L.action.empty()) action(L.action);
      lists_.emplace(f.str("name"), std::move(L));
    });
    each("form", [&](Fields& f) {
      const std::string n = f.str("name");
      const int degree = static_cast<int>(f.opt_int("degree").value_or(1));
      forms_.emplace(n, catalog::make_form(f.str("expr"), domain(f.str("domain")), degree).renamed(n));
    });
    each("site", [&](Fields& f) {
      const std::string n = f.str("name");
      sites_.emplace(n, parse_site(f));
    });
    each("presheaf", [&](Fields& f) {
      const std::string n = f.str("name");
      FinitePresheaf P = parse_presheaf(f);
      P.name = n;
      if (Verdict v = P.validate(); !v.passed()) f.fail("", "presheaf is malformed: " + v.reason);
      presheaves_.emplace(n, std::move(P));
    });
    each("morphism", [&](Fields& f) {
      NamedMorphism m{f.str("source"), f.str("target"), {}};
      const FinitePresheaf& P = presheaf(m.source);
      const FinitePresheaf& C = presheaf(m.target);
      m.morphism.component.resize(P.labels.size());
      const toml::table* comps = f.table("components");
      if (!comps) f.fail("components", "required table is missing");
      Fields cf = f.sub(*comps, "components");
      for (std::size_t o = 0; o < P.labels.size(); ++o) {
        const std::string on = P.site->object(o).name;
        for (double x : cf.nums(on)) m.morphism.component[o].push_back(static_cast<std::size_t>(x));
      }
      cf.finish();
      if (Verdict v = check_naturality(P, C, m.morphism); !v.passed()) f.fail("components", v.reason);
      morphisms_.emplace(f.str("name"), std::move(m));
    });
    if (const toml::node* n = root_->get("assert")) {
      const toml::array* a = n->as_array();
      if (!a || !a->is_array_of_tables())
        throw Error(ErrorKind::ParseError, source_ + ": 'assert' must be an array of tables ([[assert]])");
      std::size_t k = 0;
      for (const auto& e : *a) asserts_.push_back(AssertSpec{++k, e.as_table()});
    }
  }

  GroupModel group(const std::string& n) const {
    if (auto it = groups_.find(n); it != groups_.end()) return it->second;
    if (n == "SO2") return GroupModel::circle();
    if (n.size() > 1 && n[0] == 'Z' && n.find_first_not_of("0123456789", 1) == std::string::npos)
      return GroupModel::cyclic(std::stoi(n.substr(1)));
    throw Error(ErrorKind::UnresolvedName, "no group named '" + n + "'");
  }

  static CoverGraph cover_graph(const std::string& n) {
    if (n == "circle2") return CoverGraph::two_arc_circle();
    if (n == "circle3") return CoverGraph::three_arc_circle();
    if (n == "interval") return CoverGraph::interval();
    if (n.rfind("disjoint", 0) == 0 && n.size() > 8) return CoverGraph::disjoint(std::stoi(n.substr(8)));
    throw Error(ErrorKind::UnresolvedName, "no cover graph named '" + n + "'");
  }

  GroupModel parse_group(Fields& f) const {
    const std::string n = f.str("name");
    if (auto c = f.opt_int("cyclic")) return GroupModel::cyclic(static_cast<int>(*c));
    if (f.opt_bool("circle").value_or(false))
      return GroupModel::circle(static_cast<int>(f.opt_int("grid").value_or(32)));
    const auto rows = f.num_rows("table");
    if (rows.empty()) f.fail("", "a group needs cyclic, circle or table");
    std::vector<std::vector<int>> table;
    for (const auto& r : rows) {
      table.emplace_back();
      for (double x : r) table.back().push_back(static_cast<int>(x));
    }
    GroupModel g = GroupModel::finite(n, table);
    if (Verdict v = g.validate(); !v.passed()) f.fail("table", v.reason);
    return g;
  }

  Domain parse_domain(Fields& f, const std::string& n) const {
    const SampleConfig cfg = sample_config(f.opt_int("samples"));
    if (f.opt_bool("point").value_or(false)) return Domain::point(n);
    if (f.has("interval")) {
      const auto iv = f.nums("interval");
      if (iv.size() != 2 || !(iv[0] < iv[1])) f.fail("interval", "expected [lo, hi] with lo < hi");
      return Domain::interval(n, iv[0], iv[1], cfg);
    }
    if (auto r = f.opt_num("disk")) {
      if (!(*r > 0)) f.fail("disk", "radius must be positive");
      return catalog::disk(n, *r, cfg);
    }
    if (const toml::table* b = f.table("box")) {
      Fields bf = f.sub(*b, "box");
      const auto lo = bf.nums("lo"), hi = bf.nums("hi");
      bf.finish();
      if (lo.size() != hi.size() || lo.empty()) f.fail("box", "lo and hi must have the same positive length");
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) f.fail("box", "expected lo < hi");
      return Domain::box(n, vec(lo), vec(hi), {}, cfg);
    }
    if (f.has("union")) {
      std::vector<Box> boxes;
      for (const auto& row : f.num_rows("union")) {
        if (row.size() != 2 || !(row[0] < row[1])) f.fail("union", "expected [[lo, hi], ...] intervals");
        boxes.push_back(Box{vec({row[0]}), vec({row[1]})});
      }
      return Domain::disjoint_union(n, boxes, {}, cfg);
    }
    f.fail("", "a domain needs interval, box, disk, union or point");
  }

  SitePtr parse_site(Fields& f) const {
    if (auto b = f.opt_str("builtin")) {
      if (*b == "forms") return forms_site(sample_config());
      if (*b == "circle") return circle_site();
      if (*b == "small") return small_random_site();
      f.fail("builtin", "unknown builtin site " + *b);
    }
    auto s = std::make_shared<ProbeSite>(f.str("name"));
    for (const auto& o : f.strs("objects")) {
      if (o == "*") continue;
      s->add_object(o);
    }
    auto need_array = [&](const std::string& key) -> const toml::array& {
      static const toml::array empty;
      const toml::array* a = f.array(key);
      return a ? *a : empty;
    };
    for (const auto& e : need_array("arrows")) {
      if (!e.is_table()) f.fail("arrows", "expected inline tables");
      Fields af = f.sub(*e.as_table(), "arrow");
      s->add_arrow(af.str("name"), s->object_index(af.str("source")), s->object_index(af.str("target")));
      af.finish();
    }
    for (const auto& e : need_array("compositions")) {
      if (!e.is_table()) f.fail("compositions", "expected inline tables");
      Fields cf = f.sub(*e.as_table(), "composition");
      s->add_composition(s->arrow_index(cf.str("outer")), s->arrow_index(cf.str("inner")),
                         s->arrow_index(cf.str("result")));
      cf.finish();
    }
    for (const auto& e : need_array("covers")) {
      if (!e.is_table()) f.fail("covers", "expected inline tables");
      Fields cf = f.sub(*e.as_table(), "cover");
      std::vector<std::size_t> pieces;
      for (const auto& p : cf.strs("pieces")) pieces.push_back(s->arrow_index(p));
      std::vector<ProbeSite::Overlap> overlaps;
      if (const toml::array* ovs = cf.array("overlaps")) {
        for (const auto& ov : *ovs) {
          if (!ov.is_table()) cf.fail("overlaps", "expected inline tables");
          Fields of = cf.sub(*ov.as_table(), "overlap");
          overlaps.push_back(ProbeSite::Overlap{static_cast<std::size_t>(of.integer("i")),
                                                static_cast<std::size_t>(of.integer("j")),
                                                s->arrow_index(of.str("left")), s->arrow_index(of.str("right"))});
          of.finish();
        }
      }
      s->add_cover(cf.str("name"), s->object_index(cf.str("object")), pieces, overlaps);
      cf.finish();
    }
    if (Verdict v = s->validate(tol_.eq_tol); !v.passed()) f.fail("", "site is malformed: " + v.reason);
    return s;
  }

  FinitePresheaf parse_presheaf(Fields& f) const {
    const SitePtr site = lookup(sites_, f.str("site"), "site");
    const std::string kind = f.str("kind");
    if (kind == "omega") {
      std::map<std::string, std::vector<std::string>> seeds;
      if (const toml::table* t = f.table("seeds")) {
        Fields sf = f.sub(*t, "seeds");
        for (const auto& [k, v] : *t) seeds[std::string(k.str())] = sf.strs(std::string(k.str()));
      }
      return omega_table(site, static_cast<int>(f.integer("degree")), seeds, tol_);
    }
    if (kind == "pi0_gerbe") return pi0_gerbe_table(site, group(f.str("group")), circle_site_graphs());
    if (kind != "table") f.fail("kind", "expected omega, pi0_gerbe or table");
    const toml::table* values = f.table("values");
    if (!values) f.fail("values", "required table is missing");
    Fields vf = f.sub(*values, "values");
    std::vector<std::vector<std::string>> labels(site->objects().size());
    for (std::size_t o = 0; o < labels.size(); ++o) labels[o] = vf.strs(site->object(o).name);
    vf.finish();
    FinitePresheaf P = FinitePresheaf::make(site, "", labels);
    if (const toml::table* r = f.table("restrictions")) {
      Fields rf = f.sub(*r, "restrictions");
      for (std::size_t a = 0; a < site->arrows().size(); ++a) {
        if (site->arrow(a).identity) continue;
        std::vector<std::size_t> m;
        for (double x : rf.nums(site->arrow(a).name)) {
          if (x < 0 || x != static_cast<std::size_t>(x)) rf.fail(site->arrow(a).name, "expected element indices");
          m.push_back(static_cast<std::size_t>(x));
        }
        // Arrows into a singleton need no table.
        if (m.empty() && P.size(site->arrow(a).source) == 1) m.assign(P.size(site->arrow(a).target), 0);
        P.restriction[a] = std::move(m);
      }
      rf.finish();
    } else {
      for (std::size_t a = 0; a < site->arrows().size(); ++a)
        if (!site->arrow(a).identity && P.size(site->arrow(a).source) == 1)
          P.restriction[a].assign(P.size(site->arrow(a).target), 0);
    }
    return P;
  }

  std::vector<AnyBundle> resolve_list(const BundleList& L) const {
    std::vector<AnyBundle> out;
    for (const auto& b : L.bundles) out.push_back(bundle(b));
    return out;
  }

  /// The action a list is compared under: declared, shared by its principal
  /// bundles, or Γ acting trivially on the point for cocycle lists.
  ActionGroupoid list_action(const BundleList& L, const std::vector<AnyBundle>& bundles) const {
    if (!L.action.empty()) return action(L.action);
    for (std::size_t i = 0; i < bundles.size(); ++i)
      if (std::holds_alternative<PrincipalBundle>(bundles[i])) return action(bundle_action_.at(L.bundles[i]));
    if (!bundles.empty())
      return trivial_action(std::get<CocycleBundle>(bundles.front()).cocycle.group, Domain::point());
    return trivial_action(GroupModel::cyclic(1), Domain::point());
  }

  static Json partition_json(const Partition& p, const BundleList& L) {
    Json classes = Json::array();
    for (std::size_t c = 0; c < p.classes.size(); ++c) {
      Json names = Json::array();
      for (auto i : p.classes[c]) names.push_back(L.bundles[i]);
      if (p.unknown[c]) names.push_back("(unknown)");
      classes.push_back(std::move(names));
    }
    return classes;
  }

  static Json sizes_json(const FinitePresheaf& P) {
    Json j;
    for (std::size_t o = 0; o < P.labels.size(); ++o) j[P.site->object(o).name] = P.size(o);
    return j;
  }

  // ---- assertions ---------------------------------------------------------

  struct Observed {
    Verdict verdict;
    std::optional<long> count;
    Json details = Json::object();
    std::map<std::string, long> sizes;
  };

  const PrincipalBundle& principal(const std::string& n) const {
    const AnyBundle& b = bundle(n);
    if (const auto* p = std::get_if<PrincipalBundle>(&b)) return *p;
    throw Error(ErrorKind::InvalidArgument, n + " is not a pullback bundle");
  }

  const ActionGroupoid& bundle_action(const std::string& n) const {
    const auto it = bundle_action_.find(n);
    if (it == bundle_action_.end()) throw Error(ErrorKind::InvalidArgument, n + " has no action");
    return action(it->second);
  }

  Outcome check(std::size_t index, const std::string& op, Fields& f) const {
    Outcome o;
    o.index = index;
    o.op = op;

    std::string expect = f.opt_str("expect").value_or("pass");
    const auto count = f.opt_int("count");
    const auto near = f.nums("witness_near");
    const double near_tol = f.opt_num("witness_tol").value_or(1e-3);
    std::map<std::string, long> want_sizes;
    if (const toml::table* t = f.table("sizes")) {
      Fields sf = f.sub(*t, "sizes");
      for (const auto& [k, v] : *t) want_sizes[std::string(k.str())] = static_cast<long>(sf.integer(std::string(k.str())));
      sf.finish();
    }
    o.expected = expect;
    if (count) o.expected += " count=" + std::to_string(*count);
    for (const auto& [k, v] : want_sizes) o.expected += " " + k + "=" + std::to_string(v);

    Observed obs;
    std::optional<Error> err;
    try {
      obs = evaluate(op, f, o.subject);
      f.finish();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::UnresolvedName ||
          e.kind() == ErrorKind::ToleranceOutOfRange)
        throw;
      err = e;
    }
    if (err) {
      o.observed = "error:" + std::string(to_string(err->kind()));
      o.verdict = Verdict::unknown(err->what());
      o.matched = expect == o.observed;
      if (!o.matched) o.mismatch = "raised " + std::string(err->what());
      return o;
    }
    o.verdict = obs.verdict;
    o.count = obs.count;
    o.details = std::move(obs.details);
    o.observed = std::string(to_string(obs.verdict.status));
    if (obs.count) o.observed += " count=" + std::to_string(*obs.count);
    for (const auto& [k, v] : want_sizes) {
      const auto it = obs.sizes.find(k);
      o.observed += " " + k + "=" + (it == obs.sizes.end() ? std::string("?") : std::to_string(it->second));
    }

    std::vector<std::string> why;
    if (std::string(to_string(obs.verdict.status)) != expect) why.push_back("verdict " + o.observed);
    if (count && obs.count != count) why.push_back("count differs");
    for (const auto& [k, v] : want_sizes) {
      const auto it = obs.sizes.find(k);
      if (it == obs.sizes.end() || it->second != v) why.push_back("size at " + k + " differs");
    }
    if (!near.empty()) {
      if (!obs.verdict.point || obs.verdict.point->size() != static_cast<Eigen::Index>(near.size())) {
        why.push_back("no witness point to compare");
      } else {
        const double d = max_abs(Vector(*obs.verdict.point - vec(near)));
        o.details["witness_distance"] = d;
        if (!(d <= near_tol)) why.push_back("witness is " + format_double(d) + " from the expected point");
      }
    }
    o.matched = why.empty();
    for (std::size_t k = 0; k < why.size(); ++k) o.mismatch += (k ? "; " : "") + why[k];
    return o;
  }

  Observed evaluate(const std::string& op, Fields& f, std::string& subject) const {
    Observed r;
    auto arg = [&](const std::string& key) {
      const std::string v = f.str(key);
      subject += (subject.empty() ? "" : " ") + key + "=" + v;
      return v;
    };
    auto tol_arg = [&](const std::string& key, double fallback) { return f.opt_num(key).value_or(fallback); };

    if (op == "check_domain") {
      r.verdict = check_domain(domain(arg("domain")));
    } else if (op == "check_jacobian") {
      Tolerances t = tol_;
      t.fd_tol = tol_arg("tol", tol_.fd_tol);
      r.verdict = check_jacobian(map(arg("map")), t);
    } else if (op == "catalog_jacobians") {
      const double tol = tol_arg("tol", tol_.fd_tol);
      Tolerances t = tol_;
      t.fd_tol = tol;
      double worst = 0.0;
      long n = 0;
      r.verdict = Verdict::pass();
      for (const auto& e : catalog::sweep_entries(sample_config())) {
        const Verdict v = check_jacobian(catalog::make_map(e.expr, e.domain, e.params), t);
        ++n;
        if (!v.passed()) {
          r.verdict = v;
          r.verdict.reason = e.expr + ": " + v.reason;
          break;
        }
        worst = std::max(worst, v.deviation.value_or(0.0));
      }
      if (r.verdict.passed()) r.verdict.with_deviation(worst);
      r.count = n;
    } else if (op == "fd_value" || op == "jacobian_value") {
      const SmoothEuclMap& m = map(arg("map"));
      const Vector at = vec(f.nums("at"));
      const Matrix J = op == "fd_value" ? fd_jacobian(m, at, tol_.fd_step) : m.jacobian(at);
      const auto want = f.nums("value");
      if (static_cast<Eigen::Index>(want.size()) != J.size()) f.fail("value", "expected one entry per jacobian entry");
      Matrix W(J.rows(), J.cols());
      for (Eigen::Index i = 0; i < J.rows(); ++i)
        for (Eigen::Index j = 0; j < J.cols(); ++j) W(i, j) = want[static_cast<std::size_t>(i * J.cols() + j)];
      const double d = max_abs(Matrix(J - W));
      const double tol = tol_arg("tol", tol_.fd_tol);
      r.verdict = (d <= tol ? Verdict::pass() : Verdict::refuted("jacobian differs from the expected value"))
                      .at(at)
                      .with_deviation(d);
    } else if (op == "pullback_value") {
      const SmoothEuclMap& m = map(arg("map"));
      const EuclForm& w = form(arg("form"));
      const Vector at = vec(f.nums("at"));
      const Vector got = pullback(m, w, tol_)(at);
      const Vector want = vec(f.nums("value"));
      if (got.size() != want.size()) f.fail("value", "expected one entry per coefficient");
      const double d = max_abs(Vector(got - want));
      const double tol = tol_arg("tol", tol_.exact_tol);
      r.verdict = (d <= tol ? Verdict::pass() : Verdict::refuted("pullback differs from the expected value"))
                      .at(at)
                      .with_deviation(d);
      r.details["value"] = to_std(got);
    } else if (op == "chain_rule") {
      const long pairs = f.opt_int("pairs").value_or(50);
      const double tol = tol_arg("tol", 1e-5);
      r.verdict = chain_rule_check(pairs, tol, r.details);
      r.count = pairs;
    } else if (op == "action_valid") {
      r.verdict = action(arg("action")).validate(tol_.eq_tol);
    } else if (op == "generator_roundtrip") {
      r.verdict = generator_roundtrip(action(arg("action")), tol_.eq_tol);
    } else if (op == "bundle_plot") {
      const std::string b = arg("bundle");
      const ActionGroupoid& g = bundle_action(b);
      const auto [p, w] = plot_from_bundle(principal(b), g, std::nullopt, tol_.eq_tol);
      r.verdict = verify_plot(orbit_space(g, tol_.eq_tol), p, w);
      r.details["plot"] = p.name;
    } else if (op == "plots_equal") {
      const std::string a = arg("P"), b = arg("Q");
      const ActionGroupoid& g = bundle_action(a);
      const auto pa = plot_from_bundle(principal(a), g, std::nullopt, tol_.eq_tol).first;
      const auto pb = plot_from_bundle(principal(b), g, std::nullopt, tol_.eq_tol).first;
      const DiffeologicalSpace X = orbit_space(g, tol_.eq_tol);
      const auto& samples = pa.domain.samples();
      double worst = 0.0;
      r.verdict = Verdict::pass();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double d = X.carrier.distance(pa(samples[i]), pb(samples[i]));
        if (!(d <= tol_.eq_tol)) {
          r.verdict = Verdict::refuted("plots differ").at(samples[i]).at_sample(i).with_deviation(d);
          break;
        }
        worst = std::max(worst, d);
      }
      if (r.verdict.passed()) r.verdict.with_deviation(worst);
      r.count = static_cast<long>(samples.size());
    } else if (op == "section_independence") {
      const std::string b = arg("bundle");
      const ActionGroupoid& g = bundle_action(b);
      const PrincipalBundle& P = principal(b);
      const int label = static_cast<int>(f.integer("label"));
      r.verdict = section_independence(P, g, P.canonical_section(),
                                       translated_section(P, g, GroupElement{label, 0.0}), tol_.eq_tol);
    } else if (op == "fiberwise_isomorphic") {
      const std::string a = arg("P"), b = arg("Q");
      const std::string route = f.opt_str("route").value_or("anchor");
      if (route != "anchor" && route != "gamma_set") f.fail("route", "expected anchor or gamma_set");
      const AnyBundle &A = bundle(a), &B = bundle(b);
      if (std::holds_alternative<CocycleBundle>(A) && std::holds_alternative<CocycleBundle>(B)) {
        r.verdict = fiberwise_isomorphic(std::get<CocycleBundle>(A), std::get<CocycleBundle>(B));
      } else {
        r.verdict = fiberwise_isomorphic(principal(a), principal(b), bundle_action(a),
                                         route == "anchor" ? FiberRoute::AnchorOrbit : FiberRoute::GammaSet,
                                         tol_.eq_tol);
      }
    } else if (op == "locally_isomorphic" || op == "globally_isomorphic") {
      const std::string a = arg("P"), b = arg("Q");
      const AnyBundle &A = bundle(a), &B = bundle(b);
      LocalIsoResult res;
      if (std::holds_alternative<CocycleBundle>(A) && std::holds_alternative<CocycleBundle>(B)) {
        const auto& ca = std::get<CocycleBundle>(A);
        const auto& cb = std::get<CocycleBundle>(B);
        if (op == "locally_isomorphic") {
          res = locally_isomorphic(ca, cb);
        } else {
          res.verdict = cohomologous(ca.cocycle, cb.cocycle) ? Verdict::pass() : Verdict::refuted("not cohomologous");
        }
      } else if (op == "locally_isomorphic") {
        std::optional<OpenCover> cover;
        const PrincipalBundle& P = principal(a);
        if (f.has("cover")) {
          OpenCover c{P.base(), {}};
          std::size_t k = 0;
          for (const auto& row : f.num_rows("cover")) {
            if (row.size() != 2) f.fail("cover", "expected [[lo, hi], ...]");
            c.pieces.push_back(Domain::interval("piece" + std::to_string(k++), row[0], row[1], sample_config()));
          }
          cover = c;
        }
        res = locally_isomorphic(P, principal(b), bundle_action(a), cover, tol_.eq_tol);
      } else {
        res = globally_isomorphic(principal(a), principal(b), bundle_action(a), tol_.eq_tol);
      }
      r.verdict = res.verdict;
      Json m = Json::array();
      for (const auto& piece : res.matching)
        m.push_back(Json{{"lo", piece.lo}, {"hi", piece.hi}, {"label", piece.label.index}});
      if (!m.empty()) r.details["matching"] = std::move(m);
    } else if (op == "cocycle_classes") {
      const GroupModel g = group(arg("group"));
      const auto classes = cocycle_classes(g, cover_graph(arg("cover")));
      r.verdict = Verdict::pass();
      r.count = static_cast<long>(classes.size());
      Json reps = Json::array();
      for (const auto& c : classes) reps.push_back(Json{{"representative", c.representative.describe()}, {"size", c.count}});
      r.details["classes"] = std::move(reps);
    } else if (op == "isomorphism_classes" || op == "discretization_classes" || op == "coarse_classes") {
      const std::string l = arg("list");
      const BundleList& L = bundle_list(l);
      const auto bundles = resolve_list(L);
      const BundleRelation rel = op == "isomorphism_classes"      ? BundleRelation::Isomorphic
                                 : op == "discretization_classes" ? BundleRelation::LocallyIsomorphic
                                                                  : BundleRelation::FiberwiseIsomorphic;
      const Partition p = classify_bundles(bundles, list_action(L, bundles), rel, tol_.eq_tol);
      r.count = static_cast<long>(p.count());
      r.verdict = std::any_of(p.unknown.begin(), p.unknown.end(), [](bool u) { return u; })
                      ? Verdict::unknown("some comparisons are undecided")
                      : Verdict::pass();
      r.details["classes"] = partition_json(p, L);
    } else if (op == "partition_chain") {
      const std::string l = arg("list");
      const BundleList& L = bundle_list(l);
      const auto bundles = resolve_list(L);
      const ActionGroupoid g = list_action(L, bundles);
      const Partition iso = isomorphism_classes(bundles, g, tol_.eq_tol);
      const Partition disc = discretization_classes(bundles, g, tol_.eq_tol);
      const Partition coarse = coarse_classes(bundles, g, tol_.eq_tol);
      r.details["isomorphism"] = partition_json(iso, L);
      r.details["discretization"] = partition_json(disc, L);
      r.details["coarse"] = partition_json(coarse, L);
      if (!refines(iso, disc)) {
        r.verdict = Verdict::refuted("isomorphism classes do not refine discretization classes");
      } else if (!refines(disc, coarse)) {
        r.verdict = Verdict::refuted("discretization classes do not refine coarse classes");
      } else {
        r.verdict = Verdict::pass();
      }
      r.count = static_cast<long>(disc.count());
    } else if (op == "d_open") {
      const ActionGroupoid& g = action(arg("action"));
      const std::string ind = arg("indicator");
      const auto indicator = catalog::make_indicator(ind, g, f.nums("params"), tol_.eq_tol);
      const DiffeologicalSpace X = orbit_space(g, tol_.eq_tol);
      r.verdict = d_open(X, indicator, {quotient_of_identity(g, tol_.eq_tol)});
    } else if (op == "concrete") {
      const FinitePresheaf& P = presheaf(arg("presheaf"));
      if (auto obj = f.opt_str("object")) {
        subject += " object=" + *obj;
        r.verdict = is_concrete_at(P, P.site->object_index(*obj));
      } else {
        r.verdict = is_concrete(P);
      }
    } else if (op == "kappa") {
      const FinitePresheaf& P = presheaf(arg("presheaf"));
      const auto K = concretize_kappa(P);
      r.verdict = is_concrete(K.presheaf);
      record_sizes(r, P, K.presheaf);
    } else if (op == "kappa_preserves") {
      const FinitePresheaf& P = presheaf(arg("presheaf"));
      const auto K = concretize_kappa(P);
      r.verdict = is_isomorphism(P, K.presheaf, K.unit) ? Verdict::pass()
                                                         : Verdict::refuted("κ identifies distinct elements");
      record_sizes(r, P, K.presheaf);
    } else if (op == "sheafify") {
      const FinitePresheaf& P = presheaf(arg("presheaf"));
      const auto S = sheafify(P);
      r.verdict = sheaf_condition(S.sheaf);
      r.details["iterations"] = S.iterations;
      record_sizes(r, P, S.sheaf);
    } else if (op == "sheaf_condition") {
      r.verdict = sheaf_condition(presheaf(arg("presheaf")));
    } else if (op == "kappa_hat_idempotent") {
      const FinitePresheaf& P = presheaf(arg("presheaf"));
      const auto once = kappa_hat(P);
      const auto twice = kappa_hat(once.sheaf);
      r.verdict = is_isomorphism(once.sheaf, twice.sheaf, twice.unit)
                      ? Verdict::pass()
                      : Verdict::refuted("κ̂ changes an already-sheafified concrete presheaf");
      record_sizes(r, P, once.sheaf);
    } else if (op == "sheafify_once") {
      const FinitePresheaf& P = presheaf(arg("presheaf"));
      const auto a = sheafify(concretize_kappa(sheafify(P).sheaf).presheaf).sheaf;
      const auto b = sheafify(concretize_kappa(P).presheaf).sheaf;
      r.verdict = find_isomorphism(a, b) ? Verdict::pass()
                                         : Verdict::refuted("sheafifying first changes the result");
      record_sizes(r, P, b);
    } else if (op == "adjunction") {
      const FinitePresheaf& P = presheaf(arg("P"));
      const FinitePresheaf& C = presheaf(arg("C"));
      const auto& m = lookup(morphisms_, arg("phi"), "morphism");
      if (m.source != f.str("P") || m.target != f.str("C"))
        throw Error(ErrorKind::InvalidArgument, "φ does not go from P to C");
      const auto res = verify_left_adjoint_factorization(P, C, m.morphism);
      r.verdict = res.verdict;
      r.details["factorizations"] = res.factorizations;
      r.details["nodes"] = res.nodes;
    } else if (op == "adjunction_random") {
      const long trials = f.opt_int("trials").value_or(100);
      const SitePtr site = small_random_site();
      std::mt19937_64 rng(seed_);
      long passed = 0;
      std::size_t nodes = 0;
      r.verdict = Verdict::pass();
      for (long t = 0; t < trials; ++t) {
        const auto trial = random_adjunction_trial(site, rng);
        const auto res = verify_left_adjoint_factorization(trial.P, trial.C, trial.phi);
        nodes += res.nodes;
        if (res.verdict.passed() && res.factorizations == 1) {
          ++passed;
        } else if (r.verdict.passed()) {
          r.verdict = res.verdict;
          r.verdict.reason = "trial " + std::to_string(t) + ": " + res.verdict.reason;
          r.verdict.in_piece(static_cast<std::size_t>(t));
        }
      }
      r.count = passed;
      r.details["trials"] = trials;
      r.details["nodes"] = nodes;
    } else if (op == "basic") {
      r.verdict = basic_check(form(arg("form")), action(arg("action")), tol_);
    } else if (op == "basic_to_orbit") {
      const DiffeologicalForm a = basic_to_orbit_form(form(arg("form")), action(arg("action")), tol_);
      r.verdict = Verdict::pass();
      r.details["form"] = a.name;
    } else if (op == "orbit_form_roundtrip") {
      const EuclForm& mu = form(arg("form"));
      const ActionGroupoid& g = action(arg("action"));
      const double tol = tol_arg("tol", tol_.exact_tol);
      const DiffeologicalForm a = basic_to_orbit_form(mu, g, tol_);
      const EuclForm back = orbit_form_to_basic(a, g, tol_);
      r.verdict = compare_forms(back, mu, tol);
      if (r.verdict.passed()) {
        const Verdict v2 = compare_orbit_forms(basic_to_orbit_form(back, g, tol_), a, tol);
        if (!v2.passed()) r.verdict = v2;
      }
    } else if (op == "lift_independence") {
      const EuclForm& mu = form(arg("form"));
      const ActionGroupoid& g = action(arg("action"));
      const auto lifts = f.strs("lifts");
      if (lifts.size() != 2) f.fail("lifts", "expected two map names");
      subject += " lifts=" + lifts[0] + "," + lifts[1];
      Tolerances t = tol_;
      t.eq_tol = tol_arg("tol", tol_.eq_tol);
      r.verdict = lift_independence(mu, g, map(lifts[0]), map(lifts[1]), t);
    } else if (op == "compatibility") {
      const EuclForm& mu = form(arg("form"));
      const std::string b = arg("bundle");
      const ActionGroupoid& g = bundle_action(b);
      const DiffeologicalForm a = basic_to_orbit_form(mu, g, tol_);
      const auto [p, w] = plot_from_bundle(principal(b), g, std::nullopt, tol_.eq_tol);
      r.verdict = check_compatibility(a, p, w, map(arg("map")), std::nullopt, tol_);
    } else {
      throw Error(ErrorKind::ParseError, source_ + ": [[assert]] unknown op '" + op + "'");
    }
    return r;
  }

  static void record_sizes(Observed& r, const FinitePresheaf& before, const FinitePresheaf& after) {
    r.details["before"] = sizes_json(before);
    r.details["after"] = sizes_json(after);
    for (std::size_t o = 0; o < after.labels.size(); ++o)
      r.sizes[after.site->object(o).name] = static_cast<long>(after.size(o));
  }

  /// Random composable pairs g∘f of catalog self-maps: the chain-rule
  /// jacobian of the composite against central differences of the composite.
  Verdict chain_rule_check(long pairs, double tol, Json& details) const {
    std::mt19937_64 rng(seed_);
    const Domain I = Domain::interval("J", -2.5, 2.5, SampleConfig{std::size_t{16}, seed_});
    const Domain Q = Domain::box("J2", vec({-2.5, -2.5}), vec({2.5, 2.5}), {}, SampleConfig{std::size_t{16}, seed_});
    const auto one = catalog::self_maps(I), two = catalog::self_maps(Q);
    double worst = 0.0;
    for (long k = 0; k < pairs; ++k) {
      const auto& pool = unit_uniform(rng) < 0.5 ? one : two;
      const auto& fm = pool[static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(pool.size()))];
      const auto& gm = pool[static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(pool.size()))];
      const SmoothEuclMap c = compose(gm, fm);
      for (std::size_t i = 0; i < c.domain().samples().size(); ++i) {
        const Vector& x = c.domain().samples()[i];
        // Stay clear of the boundary so the stencil fits.
        if ((x.array().abs() > 2.4).any()) continue;
        const double d = max_abs(Matrix(c.jacobian(x) - fd_jacobian(c, x, tol_.fd_step)));
        worst = std::max(worst, d);
        if (!(d <= tol))
          return Verdict::refuted("chain rule fails for " + gm.name() + "∘" + fm.name())
              .at(x)
              .at_sample(i)
              .in_piece(static_cast<std::size_t>(k))
              .with_deviation(d);
      }
    }
    details["pairs"] = pairs;
    return Verdict::pass().with_deviation(worst);
  }

  std::string source_;
  std::shared_ptr<toml::table> root_;
  std::string name_;
  std::uint64_t seed_ = 0;
  int samples_ = 64;
  Tolerances tol_;
  std::map<std::string, GroupModel> groups_;
  std::map<std::string, Domain> domains_;
  std::map<std::string, ActionGroupoid> actions_;
  std::map<std::string, SmoothEuclMap> maps_;
  std::map<std::string, AnyBundle> bundles_;
  std::map<std::string, std::string> bundle_action_;
  std::map<std::string, BundleList> lists_;
  std::map<std::string, EuclForm> forms_;
  std::map<std::string, SitePtr> sites_;
  std::map<std::string, FinitePresheaf> presheaves_;
  std::map<std::string, NamedMorphism> morphisms_;
  std::vector<AssertSpec> asserts_;
};

}  // namespace diffeo::scenario
