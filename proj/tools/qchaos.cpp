// qchaos: run one experiment from a config file.
//
//   qchaos strong-qct --config strong.ini --out results/strong --workers 4
//
// Exit status: 0 success, 2 invariant violation, 3 configuration error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qchaos/config.hpp"
#include "qchaos/errors.hpp"
#include "qchaos/experiments.hpp"
#include "qchaos/io.hpp"

namespace {

constexpr int kInvariant = 2;
constexpr int kConfig = 3;

void print_entries(const nlohmann::json& entries) {
  std::printf("%-28s %12s %12s %12s %4s  %s\n", "criterion", "lhs", "rhs", "margin", "rel", "status");
  for (const auto& e : entries) {
    auto num = [](const nlohmann::json& v) {
      char buf[32];
      if (v.is_number()) {
        std::snprintf(buf, sizeof buf, "%12.4g", v.get<double>());
      } else {
        std::snprintf(buf, sizeof buf, "%12s", v.get<std::string>().c_str());
      }
      return std::string(buf);
    };
    std::string name = e.at("name").get<std::string>();
    if (e.contains("D")) name += " (D=" + nlohmann::json(e.at("D")).dump() + ")";
    std::string status = e.at("satisfied").get<bool>() ? "ok" : "FAIL";
    if (e.contains("verdict")) status = e.at("verdict").get<std::string>();
    std::printf("%-28s %s %s %s %4s  %s\n", name.c_str(), num(e.at("lhs")).c_str(),
                num(e.at("rhs")).c_str(), num(e.at("margin")).c_str(),
                e.at("relation").get<std::string>().c_str(), status.c_str());
  }
}

void report(const qchaos::ExperimentConfig& cfg, const qchaos::ExperimentResult& res) {
  const auto& s = res.summary;
  switch (cfg.kind) {
    case qchaos::ExperimentKind::StrongQct:
      std::printf("max sqrt(Vx) = %.4g, action s = %.4g\n", s.at("max_sqrt_vx").get<double>(),
                  s.at("action_s").get<double>());
      if (res.qct) print_entries(qchaos::to_json(*res.qct).at("entries"));
      break;
    case qchaos::ExperimentKind::WeakQct:
      for (const auto& r : s.at("runs")) {
        std::printf("D=%-8.3g slice L1 %.4f  field L1 %.4f  min/max W %.4f\n", r.at("D").get<double>(),
                    r.at("slice_l1").get<double>(), r.at("field_l1").get<double>(),
                    -r.at("negative_ratio").get<double>());
      }
      print_entries(s.at("t_star"));
      break;
    case qchaos::ExperimentKind::LyapunovSweep:
      for (const auto& e : s.at("estimates")) {
        std::printf("k=%-10.4g lambda = %.4f +- %.4f (n=%zu)\n", e.at("k").get<double>(),
                    e.at("lambda_mean").get<double>(), e.at("lambda_stderr").get<double>(),
                    e.at("n").get<std::size_t>());
      }
      break;
    case qchaos::ExperimentKind::StrobeMap:
      std::printf("KS p = %.4g, rms radius ratio = %.4f\n", s.at("ks_p_value").get<double>(),
                  s.at("rms_radius_ratio").get<double>());
      break;
    case qchaos::ExperimentKind::IsolatedDecay:
      std::printf("log-log slope = %.4f, final lambda = %.4g\n", s.at("loglog_slope").get<double>(),
                  s.at("lambda_mean").get<double>());
      break;
  }
  std::printf("wrote %zu files to %s\n", res.files.size(), res.out_dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuously observed quantum chaos experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  bool dump_noise = false;

  const char* names[] = {"strong-qct", "weak-qct", "lyapunov-sweep", "strobe-map", "isolated-decay"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides [experiment] out)");
    sub->add_option("--seed", seed, "base seed (overrides [numerics] base_seed)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--dump-noise", dump_noise, "write the Wiener increments of every realization");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }

  const std::string experiment = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommands().front();
  try {
    qchaos::ExperimentConfig cfg = qchaos::load_config(config_path);
    if (qchaos::to_string(cfg.kind) != experiment) {
      throw qchaos::ConfigError("config describes '" + qchaos::to_string(cfg.kind) +
                                "' but the command is '" + experiment + "'");
    }
    qchaos::RunOptions opts;
    if (sub->count("--out")) opts.out_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--workers")) opts.workers = workers;
    opts.dump_noise = dump_noise;
    qchaos::apply_overrides(cfg, opts);
    const auto res = qchaos::run_experiment(cfg, {.dump_noise = dump_noise});
    report(cfg, res);
    return 0;
  } catch (const qchaos::ConfigError& e) {
    std::cerr << "qchaos: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const qchaos::InvariantViolation& e) {
    std::cerr << "qchaos: invariant violated: " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "qchaos: " << e.what() << '\n';
    return 1;
  }
}
