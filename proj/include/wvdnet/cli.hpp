#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "wvdnet/config.hpp"

namespace wvdnet {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

// Subcommands: preprocess, synth, train, evaluate, stream, export.
// args excludes the program name. Errors are reported as one line on err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The commands behind the subcommands; they throw on failure.
void cmd_synth(const RunConfig& cfg, std::ostream& out);
void cmd_preprocess(const RunConfig& cfg, std::ostream& out);
void cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_stream(const RunConfig& cfg, const std::string& input_wav, const std::string& out_csv, std::ostream& out);
void cmd_export(const RunConfig& cfg, const std::string& clip, const std::string& out_path, std::ostream& out);

}  // namespace wvdnet
