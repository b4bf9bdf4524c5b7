// sdl: run one experiment described by a JSON config.

#include <iostream>

#include "CLI11.hpp"
#include "sdl/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate, solve and check social-learning adoption games on networks"};
  sdl::RunOptions opts;
  std::uint64_t seed = 0;
  app.add_option("--config", opts.config_path, "experiment config (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--jobs", opts.jobs, "worker threads (falls back to SDL_JOBS)");
  app.add_flag("--verify", opts.verify, "run the invariant checks for this experiment");
  app.set_version_flag("--version", sdl::kToolVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : sdl::kExitValidation;
  }
  if (*seed_opt) opts.seed = seed;

  auto r = sdl::run_config_file(opts);
  std::cout << r.report.dump(2) << "\n";
  if (r.exit_code != sdl::kExitOk) std::cerr << "sdl: " << r.message << "\n";
  return r.exit_code;
}
