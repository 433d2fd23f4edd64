#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tada::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kIo = 2;
constexpr int kInfeasibleMoments = 3;
constexpr int kCoxFailure = 4;
constexpr int kBootstrapFailure = 5;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);
// argv[0] is supplied.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tada::cli
