#pragma once

#include <string>
#include <vector>

namespace wattline {

struct CaptureResult {
    std::string out;        // child stdout, as captured
    int exit_code = 0;      // valid when !timed_out and term_signal == 0
    int term_signal = 0;    // nonzero if the child died on a signal
    bool timed_out = false; // deadline hit; child was killed
};

// Run argv with stdout captured, killing the child if it outlives
// timeout_ms (<= 0 means no deadline). Throws SpawnError if the program
// cannot be executed at all.
CaptureResult run_capture(const std::vector<std::string>& argv, int timeout_ms);

struct RunStatus {
    int exit_code = 0;   // valid when term_signal == 0
    int term_signal = 0; // nonzero if the child died on a signal
};

// Run argv with inherited stdio and wait for it. Throws SpawnError if the
// program cannot be executed at all.
RunStatus run_passthrough(const std::vector<std::string>& argv);

} // namespace wattline
