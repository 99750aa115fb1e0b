#pragma once

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace asc_test {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs to completion; stdout and stderr captured.
ProcessResult run_process(const std::vector<std::string>& args);

// A child left running, stderr redirected to a file.
class BackgroundProcess {
 public:
  BackgroundProcess(const std::vector<std::string>& args, const std::filesystem::path& err_file);
  ~BackgroundProcess();
  BackgroundProcess(const BackgroundProcess&) = delete;
  BackgroundProcess& operator=(const BackgroundProcess&) = delete;

  void signal(int sig) const;
  // Exit code, or nullopt on timeout. A signal death yields 128 + signo.
  std::optional<int> wait(std::chrono::milliseconds timeout);
  bool running();
  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
  std::optional<int> status_;
};

// Polls a file until it contains the needle.
bool wait_for_text(const std::filesystem::path& file, const std::string& needle,
                   std::chrono::milliseconds timeout);

}  // namespace asc_test
