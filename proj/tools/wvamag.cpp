#include <CLI11.hpp>

#include "wva/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"trapped-ion weak-value magnetometry simulator"};
  app.set_version_flag("--version", std::string(wva::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;
  std::optional<wva::Experiment> chosen;

  const std::vector<std::string> experiments = {
      "estimate", "kick", "flywheel", "fisher", "decohere", "husimi", "zassenhaus-check"};
  for (const auto& name : experiments) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config,-c", config_path, "config file (flat key=value or JSON)");
    sub->add_option("--out,-o", output_dir,
                    "output directory (default: config output_dir, then $WVAMAG_OUTPUT_DIR)");
    sub->add_option("--set,-s", overrides, "override a config key, e.g. -s params.k_scale=2");
    sub->callback([&chosen, name] { chosen = wva::experiment_from_string(name); });
  }

  CLI11_PARSE(app, argc, argv);
  return wva::run_cli(chosen, config_path, overrides, output_dir);
}
