// snumlab command-line front end. Talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "snumlab/snumlab.h"

namespace {

struct Options {
  std::string config;
  std::string out = "snumlab-out";
  std::uint64_t seed = 0;
  std::string format = "all";
};

int exit_code_for(snl_status s) {
  switch (s) {
    case SNL_OK: return 0;
    case SNL_CONFIG: return 2;
    case SNL_PRECONDITION:
    case SNL_UNSUPPORTED_BOUNDARY:
    case SNL_UNSUPPORTED_ENDPOINT: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximation numbers, weighted lattices and nuclearity of block-radial embeddings"};
  app.set_version_flag("--version", snl_version());
  app.require_subcommand(1);

  Options opt;
  const char* commands[][2] = {
      {"rates", "predicted embedding rates with block-split fits"},
      {"diag", "diagonal-operator bounds, lower sections and fits"},
      {"lattice", "weighted cube counting"},
      {"nuclear", "nuclearity verdicts and series diagnostics"},
      {"equiv", "reindexing norm-equivalence windows"},
  };
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "YAML sweep file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "seed for random sampling")->capture_default_str();
    sub->add_option("--format", opt.format, "csv, json or all")
        ->check(CLI::IsMember({"csv", "json", "all"}))
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  snl_run_summary summary{};
  const snl_status s =
      snl_run_command(command.c_str(), opt.config.c_str(), opt.out.c_str(), opt.seed, opt.format.c_str(), &summary);
  if (s != SNL_OK) {
    std::fprintf(stderr, "snumlab %s: %s: %s\n", command.c_str(), snl_status_name(s), snl_last_error());
    return exit_code_for(s);
  }
  std::fprintf(stderr, "snumlab %s: %zu points, %zu failed -> %s\n", command.c_str(), summary.points,
               summary.failures, opt.out.c_str());
  return summary.exit_code;
}
