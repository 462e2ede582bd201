// tools/asvq_main.cc

// Copyright 2026  The asvq Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line front end.  Every failure prints exactly one line
//   error: <kind>: <message>
// on stderr and exits nonzero (1 for runtime errors, 2 for usage errors).

#include <iostream>

#include "CLI11.hpp"
#include "commands.h"

int main(int argc, char **argv) {
  CLI::App app{"asvq: GMM-UBM, i-vector/PLDA and quality-aware fusion toolkit"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "INI config file; [section] names match subcommands");
  app.set_version_flag("--version", "asvq 0.1.0");

  asvq::tools::GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--deterministic", global.deterministic,
               "Fix reduction order so results are bit-stable");

  asvq::tools::RegisterFeatureCommands(app, global);
  asvq::tools::RegisterModelCommands(app, global);
  asvq::tools::RegisterAnalysisCommands(app, global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::string msg = e.what();
    if (app.get_subcommands().empty() && !app.remaining().empty())
      msg = "unknown subcommand '" + app.remaining().front() + "'";
    for (char &c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "error: usage: " << msg << '\n';
    return 2;
  } catch (const asvq::Error &e) {
    std::cerr << "error: " << asvq::ErrorKindName(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
