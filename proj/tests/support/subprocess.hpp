#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "support/testutil.hpp"

namespace testutil {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::filesystem::path scratch_dir() {
    const auto dir =
        std::filesystem::temp_directory_path() / ("xtt_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

/// Runs a shell command, capturing stdout, stderr and the exit code.
inline CommandResult run_command(const std::string& cmd) {
    static int counter = 0;
    const auto dir = scratch_dir();
    const auto out_path = dir / ("out" + std::to_string(counter));
    const auto err_path = dir / ("err" + std::to_string(counter));
    ++counter;
    const std::string full = cmd + " >" + out_path.string() + " 2>" + err_path.string();
    const int status = std::system(full.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path.string());
    result.err = slurp(err_path.string());
    return result;
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
    const auto path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

}  // namespace testutil
