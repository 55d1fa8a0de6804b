#pragma once

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>

#include "stackgame/experiments.hpp"
#include "stackgame/game.hpp"

namespace test_util {

inline stackgame::Game high_risk() {
  return stackgame::fixed_game(stackgame::FixedGameName::HighRisk);
}

inline stackgame::Game play_safe() {
  return stackgame::fixed_game(stackgame::FixedGameName::PlaySafe);
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  std::string wrapped = command + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(wrapped.c_str(), "r"), pclose);
  if (!pipe) throw std::runtime_error("popen failed for: " + command);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe.get())) > 0) result.output.append(buf, n);
  int status = pclose(pipe.release());
  result.exit_code = status == -1 ? -1 : WEXITSTATUS(status);
  return result;
}

inline std::string read_file(const std::string& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> f(fopen(path.c_str(), "rb"), fclose);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), f.get())) > 0) out.append(buf, n);
  return out;
}

}  // namespace test_util
