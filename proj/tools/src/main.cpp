#include "ssc/experiment.hpp"
#include "ssc_cli/cli.hpp"

#include <csignal>
#include <iostream>

namespace {

extern "C" void on_interrupt(int) { ssc::experiment::request_stop(); }

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  // Only experiment runs stop gracefully; other commands keep the default action.
  if (!args.empty() && args.front() == "experiment") {
    std::signal(SIGINT, on_interrupt);
    std::signal(SIGTERM, on_interrupt);
  }
  return ssc::cli::run(args, std::cout, std::cerr);
}
