#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "lsl/lsl.hpp"

namespace {

// flag -> config key; values are parsed by the config code so the two
// spellings accept the same syntax
const std::map<std::string, std::pair<std::string, std::string>> flag_keys = {
    {"grid", {"grid", "n"}},          {"box", {"grid", "box"}},          {"eps", {"family", "eps"}},
    {"alpha", {"family", "alpha"}},   {"gamma", {"family", "gamma"}},    {"sigma", {"family", "sigma"}},
    {"kappa", {"family", "kappa"}},   {"eta", {"family", "eta"}},        {"out", {"output", "dir"}},
    {"seed", {"run", "seed"}},        {"threads", {"run", "threads"}},   {"input", {"input", "field"}},
    {"generator", {"input", "generator"}}, {"norms", {"input", "norms"}}, {"dt", {"solver", "dt"}},
    {"t-end", {"solver", "t_end"}},
};

}  // namespace

int main(int argc, char** argv) {
  lsl::tune_allocator();
  CLI::App app{"lsl: life-span lower bounds toolkit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::map<std::string, std::string> given;
  app.add_option("--config", config_path, "key = value config file");
  for (const auto& [flag, key] : flag_keys) app.add_option("--" + flag, given[flag], key.first + "." + key.second);

  const std::map<std::string, std::string> subs = {
      {"norms", "norms of a stored or generated field"},
      {"bounds", "Q0, Q1, T_FP, T_L and the BMO^-1 verdict"},
      {"sweep", "oscillatory-family sweep and exponent fits"},
      {"solve", "run the solver, write the energy ledger"},
      {"check", "fast invariant suite"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lsl::exit_usage;
  }

  try {
    lsl::ExperimentConfig cfg = config_path.empty() ? lsl::ExperimentConfig{} : lsl::load_config(config_path);
    if (given["threads"].empty())
      if (const char* env = std::getenv("LSL_THREADS"); env && *env) given["threads"] = env;
    for (const auto& [flag, value] : given) {
      if (value.empty() && !(flag == "norms" && app.get_option("--norms")->count() > 0)) continue;
      const auto& key = flag_keys.at(flag);
      lsl::apply_setting(cfg, key.first, key.second, value);
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "norms") return lsl::cmd_norms(cfg, std::cout);
    if (cmd == "bounds") return lsl::cmd_bounds(cfg, std::cout);
    if (cmd == "sweep") return lsl::cmd_sweep(cfg, std::cout);
    if (cmd == "solve") return lsl::cmd_solve(cfg, std::cout);
    return lsl::cmd_check(cfg, std::cout);
  } catch (const lsl::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lsl::exit_usage;
  } catch (const lsl::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return lsl::exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lsl::exit_usage;
  }
}
