#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "npglm/io.hpp"

namespace npglm::testing {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("npglm-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Runs the CLI binary with `args` inside `dir`, capturing both streams.
inline CliResult RunCli(const std::string& binary, const TempDir& dir, const std::string& args) {
  const std::string out = dir / ".stdout";
  const std::string err = dir / ".stderr";
  const std::string command =
      "cd '" + dir.path().string() + "' && '" + binary + "' " + args + " > '" + out + "' 2> '" + err + "'";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = io::ReadFile(out);
  result.err = io::ReadFile(err);
  return result;
}

}  // namespace npglm::testing
