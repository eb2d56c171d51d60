#include "diffeo/diffeo.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace diffeo;
using namespace diffeo::scenario;

struct Common {
  std::string report = "text";
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::vector<std::string> tol;
  bool fail_fast = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--report", c.report, "text or json")->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--seed", c.seed, "sampling seed");
  cmd->add_option("--samples", c.samples, "samples per domain")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", c.tol, "name=value, or a bare number for eq_tol");
  cmd->add_flag("--fail-fast", c.fail_fast, "stop at the first mismatching assertion");
  cmd->add_flag("--timing", c.timing, "print wall-clock time");
}

Overrides overrides(const Common& c) {
  Overrides o;
  o.seed = c.seed;
  o.samples = c.samples;
  for (const auto& t : c.tol) {
    const auto eq = t.find('=');
    const std::string key = eq == std::string::npos ? "eq_tol" : t.substr(0, eq);
    const std::string val = eq == std::string::npos ? t : t.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) throw Error(ErrorKind::InvalidArgument, "--tol " + t + " is not a number");
    o.tolerances.emplace_back(key, v);
  }
  return o;
}

int emit(const Report& r, const Common& c) {
  if (c.report == "json") {
    std::cout << report_json(r).dump(2) << "\n";
  } else {
    std::cout << render_text(r);
  }
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks diffeological orbit-space scenarios"};
  app.require_subcommand(1);

  Common common;
  std::string file, list, sheaf_mode;

  auto* run = app.add_subcommand("run", "run every assertion in a scenario file");
  run->add_option("file", file, "scenario file")->required();
  add_common(run, common);

  auto* classify = app.add_subcommand("classify", "partition a bundle list three ways");
  classify->add_option("file", file, "scenario file")->required();
  classify->add_option("list", list, "bundle list name")->required();
  add_common(classify, common);

  auto* sheaf = app.add_subcommand("sheaf", "presheaf analyses");
  sheaf->add_option("mode", sheaf_mode, "concreteness, kappa, sheafify or adjunction-check")
      ->required()
      ->check(CLI::IsMember({"concreteness", "kappa", "sheafify", "adjunction-check"}));
  sheaf->add_option("file", file, "scenario file")->required();
  add_common(sheaf, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Scenario s = Scenario::load(file, overrides(common));
    RunOptions opt;
    opt.fail_fast = common.fail_fast;
    opt.timing = common.timing;
    if (*run) return emit(s.run(opt), common);
    if (*classify) return emit(s.classify(list, opt), common);
    return emit(s.sheaf_command(sheaf_mode, opt), common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
