#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "common.hpp"
#include "cordscan/error.hpp"
#include "cordscan/log.hpp"

using namespace cordscan;

int main(int argc, char** argv) {
  CLI::App app{"Diffusion MRI metrics of the cervical spinal cord: phantom generation, model fitting, per-level "
               "aggregation, statistics and classification.\nSet CORDSCAN_LOG=debug|info|warn|error|off for logging."};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);

  cli::Action action;
  cli::add_phantom_command(app, action);
  cli::add_fit_command(app, action);
  cli::add_aggregate_command(app, action);
  cli::add_stats_command(app, action);
  cli::add_classify_command(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kUsage;
  }

  log::init_from_env();
  try {
    return action ? action() : cli::kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_input_error(e.code()) ? cli::kUsage : cli::kDegenerate;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return cli::kUsage;
  }
}
